//! Linear combinations of traces of noncommutative words in abstract shape
//! operators `A1..Ap`, and a replay of the g = 4 Willmore argument.
//!
//! Traces are invariant under cyclic rotation of their argument, so every
//! word is stored in its minimal rotation. Matrix identities are traced
//! term by term, which turns them into linear relations over canonical words;
//! a goal follows from the relations iff it reduces to zero modulo their span.
//!
//! The hypotheses used for g = 4 (one instance per admissible index choice):
//!
//! ```text
//! A_α − A_α³ = 0                                   for all α
//! A_α − A_β²A_α − A_βA_αA_β − A_αA_β² = 0          for all α ≠ β
//! Tr A_α = 0                                       for all α
//! ```
//!
//! and the goal for each α is `Σ_β Tr(A_β² A_α) = 0`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::exactnum::{Cursor, QuadExt, ScalarParseError};
use crate::linalg::{write_signed_term, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("empty word")]
    EmptyWord,
    #[error("cannot instantiate over zero generators")]
    NoGenerators,
    #[error("{message} at position {position}")]
    Syntax { position: usize, message: String },
    #[error("invalid generator at position {position}: {message}")]
    Validation { position: usize, message: String },
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<TraceError>,
    },
}

impl From<ScalarParseError> for TraceError {
    fn from(e: ScalarParseError) -> Self {
        TraceError::Syntax {
            position: e.position,
            message: e.message,
        }
    }
}

/// A product of generators, as 1-based indices.
///
/// Ordered by length first, then lexicographically by index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(indices: Vec<u32>) -> Result<Self, TraceError> {
        if indices.is_empty() {
            return Err(TraceError::EmptyWord);
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rotate(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        let len = v.len();
        v.rotate_left(k % len);
        Self(v)
    }

    /// The lexicographically smallest rotation.
    pub fn canonical(&self) -> Self {
        (0..self.0.len())
            .map(|k| self.rotate(k))
            .min()
            .expect("nonempty word")
    }

    /// Matrix product of the assigned generators; `gens[i]` is `A_{i+1}`.
    pub fn eval(&self, gens: &[Matrix<QuadExt>]) -> Matrix<QuadExt> {
        let mut it = self.0.iter();
        let first = gens[*it.next().expect("nonempty") as usize - 1].clone();
        it.fold(first, |acc, &g| {
            acc.mul(&gens[g as usize - 1]).expect("conformable")
        })
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `A1*A2^2`: runs of equal generators are written as powers.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let g = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == g {
                run += 1;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if run == 1 {
                write!(f, "A{g}")?;
            } else {
                write!(f, "A{g}^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

pub fn canonicalize_cyclic(word: &[u32]) -> Result<Word, TraceError> {
    Ok(Word::new(word.to_vec())?.canonical())
}

/// `Σ c_w · Tr(w)` over canonical words; no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TraceExpr {
    terms: BTreeMap<Word, QuadExt>,
}

impl TraceExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn trace_of_word(word: &Word) -> Self {
        let mut e = Self::zero();
        e.add_term(word, QuadExt::one());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &QuadExt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &Word) -> QuadExt {
        self.terms
            .get(&word.canonical())
            .cloned()
            .unwrap_or_default()
    }

    /// Adds `c · Tr(word)`, canonicalizing the word.
    pub fn add_term(&mut self, word: &Word, c: QuadExt) {
        if c.is_zero() {
            return;
        }
        let key = word.canonical();
        let slot = self.terms.entry(key.clone()).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &TraceExpr, c: &QuadExt) {
        for (w, x) in &other.terms {
            self.add_term(w, x * c);
        }
    }

    pub fn scaled(&self, c: &QuadExt) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &TraceExpr) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &QuadExt::from_int(-1));
        out
    }

    /// Largest word under (length, lex) order.
    pub fn leading(&self) -> Option<(&Word, &QuadExt)> {
        self.terms.iter().next_back()
    }

    /// Largest generator index referenced.
    pub fn max_index(&self) -> Option<u32> {
        self.terms.keys().flat_map(|w| w.0.iter().copied()).max()
    }

    /// Evaluates on concrete generator matrices (`gens[i]` is `A_{i+1}`).
    pub fn eval(&self, gens: &[Matrix<QuadExt>]) -> QuadExt {
        let mut acc = QuadExt::zero();
        for (w, c) in &self.terms {
            acc += &(c * &w.eval(gens).trace().expect("square"));
        }
        acc
    }
}

impl fmt::Display for TraceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            write_signed_term(f, i == 0, c, &format!("Tr({w})"))?;
        }
        Ok(())
    }
}

/// A concrete matrix identity `Σ c_k · w_k = 0` in noncommuting generators.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixIdentity {
    pub terms: Vec<(QuadExt, Word)>,
}

impl MatrixIdentity {
    pub fn eval(&self, gens: &[Matrix<QuadExt>]) -> Matrix<QuadExt> {
        let n = gens[0].rows();
        let mut acc = Matrix::zeros(n, n);
        for (c, w) in &self.terms {
            acc = acc.add(&w.eval(gens).scale(c)).expect("equal shapes");
        }
        acc
    }
}

impl fmt::Display for MatrixIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (i, (c, w)) in self.terms.iter().enumerate() {
            write_signed_term(f, i == 0, c, &w.to_string())?;
        }
        f.write_str(" = 0")
    }
}

/// A family of matrix identities over index variables, e.g. "for all α ≠ β".
#[derive(Debug, Clone, PartialEq)]
pub struct SchematicIdentity {
    pub name: String,
    pub variables: Vec<String>,
    /// Pairs of variable positions that must take different values.
    pub distinct: Vec<(usize, usize)>,
    /// Terms as (coefficient, word over variable positions).
    pub terms: Vec<(QuadExt, Vec<usize>)>,
}

impl SchematicIdentity {
    /// `A_α − A_α³ = 0` for all α.
    pub fn cubic() -> Self {
        Self {
            name: "cubic".into(),
            variables: vec!["alpha".into()],
            distinct: vec![],
            terms: vec![
                (QuadExt::one(), vec![0]),
                (QuadExt::from_int(-1), vec![0, 0, 0]),
            ],
        }
    }

    /// `A_α − A_β²A_α − A_βA_αA_β − A_αA_β² = 0` for all α ≠ β.
    pub fn mixed_cubic() -> Self {
        let minus = QuadExt::from_int(-1);
        Self {
            name: "mixed".into(),
            variables: vec!["alpha".into(), "beta".into()],
            distinct: vec![(0, 1)],
            terms: vec![
                (QuadExt::one(), vec![0]),
                (minus.clone(), vec![1, 1, 0]),
                (minus.clone(), vec![1, 0, 1]),
                (minus, vec![0, 1, 1]),
            ],
        }
    }
}

/// One instance of a schematic identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    /// Value (1-based generator index) of each index variable.
    pub assignment: Vec<u32>,
    pub identity: MatrixIdentity,
}

/// Every assignment of the index variables to `1..=p` meeting the side
/// conditions, first variable varying slowest. Distinctness constraints that
/// cannot be met for small `p` simply yield no instances.
pub fn instantiate(id: &SchematicIdentity, p: u32) -> Result<Vec<Instance>, TraceError> {
    if p == 0 {
        return Err(TraceError::NoGenerators);
    }
    let k = id.variables.len();
    let mut out = Vec::new();
    let mut assignment = vec![1u32; k];
    loop {
        if id
            .distinct
            .iter()
            .all(|&(a, b)| assignment[a] != assignment[b])
        {
            let terms = id
                .terms
                .iter()
                .map(|(c, vars)| {
                    let w = vars.iter().map(|&v| assignment[v]).collect();
                    Ok((c.clone(), Word::new(w)?))
                })
                .collect::<Result<Vec<_>, TraceError>>()?;
            out.push(Instance {
                assignment: assignment.clone(),
                identity: MatrixIdentity { terms },
            });
        }
        // odometer increment, last variable fastest
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if assignment[pos] < p {
                assignment[pos] += 1;
                break;
            }
            assignment[pos] = 1;
        }
    }
}

/// Applies the trace term-wise and merges cyclically equal words.
pub fn trace_of(identity: &MatrixIdentity) -> TraceExpr {
    let mut e = TraceExpr::zero();
    for (c, w) in &identity.terms {
        e.add_term(w, c.clone());
    }
    e
}

/// One elimination: `multiplier · row(pivot)` was subtracted.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionStep {
    pub pivot: Word,
    pub multiplier: QuadExt,
    /// Index of the relation whose insertion created the pivot row.
    pub relation: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub residual: TraceExpr,
    pub steps: Vec<ReductionStep>,
}

impl Reduction {
    pub fn is_proved(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Row-echelon basis of a span of trace relations; each row is monic in its
/// leading word and pivots are pairwise distinct.
#[derive(Debug, Clone, Default)]
pub struct EchelonBasis {
    rows: HashMap<Word, (TraceExpr, usize)>,
}

impl EchelonBasis {
    pub fn new(relations: &[TraceExpr]) -> Self {
        let mut basis = Self::default();
        for (i, r) in relations.iter().enumerate() {
            basis.insert(r, i);
        }
        basis
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a relation; returns false if it was already in the span.
    pub fn insert(&mut self, relation: &TraceExpr, index: usize) -> bool {
        let reduced = self.reduce(relation).residual;
        let Some((pivot, lead)) = reduced.leading() else {
            return false;
        };
        let pivot = pivot.clone();
        let row = reduced.scaled(&lead.inv().expect("nonzero leading coefficient"));
        self.rows.insert(pivot, (row, index));
        true
    }

    /// Unique normal form of `expr` modulo the span: eliminates the largest
    /// pivot word present until none remains.
    pub fn reduce(&self, expr: &TraceExpr) -> Reduction {
        let mut residual = expr.clone();
        let mut steps = Vec::new();
        loop {
            let hit = residual
                .terms()
                .rev()
                .find(|(w, _)| self.rows.contains_key(*w))
                .map(|(w, c)| (w.clone(), c.clone()));
            let Some((pivot, c)) = hit else {
                break;
            };
            let (row, relation) = &self.rows[&pivot];
            residual.add_scaled(row, &-&c);
            steps.push(ReductionStep {
                pivot,
                multiplier: c,
                relation: *relation,
            });
        }
        Reduction { residual, steps }
    }
}

/// Residual of `goal` modulo the span of `relations` (each read as `= 0`).
pub fn reduce_goal(goal: &TraceExpr, relations: &[TraceExpr]) -> Reduction {
    EchelonBasis::new(relations).reduce(goal)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRelation {
    pub label: String,
    pub expr: TraceExpr,
}

/// The traced g = 4 hypotheses for `p` generators, in a fixed order.
pub fn g4_relations(p: u32) -> Result<Vec<LabeledRelation>, TraceError> {
    let mut out = Vec::new();
    for inst in instantiate(&SchematicIdentity::cubic(), p)? {
        out.push(LabeledRelation {
            label: format!("cubic[{}]", inst.assignment[0]),
            expr: trace_of(&inst.identity),
        });
    }
    for inst in instantiate(&SchematicIdentity::mixed_cubic(), p)? {
        out.push(LabeledRelation {
            label: format!("mixed[{},{}]", inst.assignment[0], inst.assignment[1]),
            expr: trace_of(&inst.identity),
        });
    }
    for a in 1..=p {
        out.push(LabeledRelation {
            label: format!("minimal[{a}]"),
            expr: TraceExpr::trace_of_word(&Word(vec![a])),
        });
    }
    Ok(out)
}

/// `Σ_β Tr(A_β² A_α)`.
pub fn willmore_goal(alpha: u32, p: u32) -> TraceExpr {
    let mut goal = TraceExpr::zero();
    for beta in 1..=p {
        goal.add_term(&Word(vec![beta, beta, alpha]), QuadExt::one());
    }
    goal
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoalReport {
    pub alpha: u32,
    pub goal: TraceExpr,
    pub reduction: Reduction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofReport {
    pub p: u32,
    pub relations: Vec<LabeledRelation>,
    pub rank: usize,
    pub goals: Vec<GoalReport>,
    pub verdict: bool,
}

/// Derives the Willmore condition for every α from the g = 4 hypotheses.
pub fn verify_g4(p: u32) -> Result<ProofReport, TraceError> {
    let relations = g4_relations(p)?;
    let exprs: Vec<TraceExpr> = relations.iter().map(|r| r.expr.clone()).collect();
    let basis = EchelonBasis::new(&exprs);
    let goals: Vec<GoalReport> = (1..=p)
        .map(|alpha| {
            let goal = willmore_goal(alpha, p);
            let reduction = basis.reduce(&goal);
            GoalReport {
                alpha,
                goal,
                reduction,
            }
        })
        .collect();
    let verdict = goals.iter().all(|g| g.reduction.is_proved());
    Ok(ProofReport {
        p,
        rank: basis.rank(),
        relations,
        goals,
        verdict,
    })
}

/// Parses `term (("+" | "-") term)*` with `term := [coeff "*"] "Tr(" word ")"`.
///
/// A coefficient is a single scalar term (`3`, `-2/3`, `2*sqrt3`, `sqrt3`) or a
/// parenthesized full scalar such as `(1+sqrt3)`.
pub fn parse_trace_expr(text: &str) -> Result<TraceExpr, TraceError> {
    let mut cur = Cursor::new(text);
    let e = expr(&mut cur)?;
    if cur.peek().is_some() {
        return Err(TraceError::Syntax {
            position: cur.pos,
            message: "unexpected trailing input".into(),
        });
    }
    Ok(e)
}

fn expr(cur: &mut Cursor<'_>) -> Result<TraceExpr, TraceError> {
    let mut out = TraceExpr::zero();
    let mut negate = if cur.eat(b'-') {
        true
    } else {
        cur.eat(b'+');
        false
    };
    loop {
        let (c, w) = term(cur)?;
        out.add_term(&w, if negate { -c } else { c });
        negate = match cur.peek() {
            Some(b'+') => false,
            Some(b'-') => true,
            _ => return Ok(out),
        };
        cur.pos += 1;
    }
}

fn term(cur: &mut Cursor<'_>) -> Result<(QuadExt, Word), TraceError> {
    let coeff = if cur.looking_at("Tr") {
        QuadExt::one()
    } else {
        let c = if cur.eat(b'(') {
            let c = cur.scalar()?;
            cur.expect(b')')?;
            c
        } else {
            cur.term()?.0
        };
        cur.expect(b'*')?;
        c
    };
    if !cur.eat_keyword("Tr") {
        return Err(TraceError::Syntax {
            position: cur.pos,
            message: "expected 'Tr'".into(),
        });
    }
    cur.expect(b'(')?;
    let mut indices = Vec::new();
    loop {
        factor(cur, &mut indices)?;
        if !cur.eat(b'*') {
            break;
        }
    }
    cur.expect(b')')?;
    Ok((coeff, Word::new(indices)?))
}

fn factor(cur: &mut Cursor<'_>, out: &mut Vec<u32>) -> Result<(), TraceError> {
    if !cur.eat(b'A') {
        return Err(TraceError::Syntax {
            position: cur.pos,
            message: "expected generator 'A<index>'".into(),
        });
    }
    let at = cur.pos;
    let index = small_int(cur.digits()?, at)?;
    if index == 0 {
        return Err(TraceError::Validation {
            position: at,
            message: "generator indices start at 1".into(),
        });
    }
    let mut power = 1;
    if cur.eat(b'^') {
        let at = cur.pos;
        power = small_int(cur.digits()?, at)?;
        if power == 0 {
            return Err(TraceError::Validation {
                position: at,
                message: "exponent must be positive".into(),
            });
        }
    }
    out.extend(std::iter::repeat_n(index, power as usize));
    Ok(())
}

fn small_int(v: num_bigint::BigInt, position: usize) -> Result<u32, TraceError> {
    u32::try_from(v).map_err(|_| TraceError::Validation {
        position,
        message: "integer too large".into(),
    })
}

/// Parses a relation file: one `lhs = rhs` (or `lhs = 0`) per line, `#` comments.
/// Each relation is returned as `lhs − rhs`.
pub fn parse_relations(text: &str) -> Result<Vec<TraceExpr>, TraceError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let wrap = |e: TraceError| TraceError::Line {
            line: i + 1,
            source: Box::new(e),
        };
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| {
            wrap(TraceError::Syntax {
                position: line.len(),
                message: "expected '='".into(),
            })
        })?;
        let lhs = parse_trace_expr(lhs).map_err(wrap)?;
        let rhs = if rhs.trim() == "0" {
            TraceExpr::zero()
        } else {
            parse_trace_expr(rhs).map_err(wrap)?
        };
        out.push(lhs.sub(&rhs));
    }
    Ok(out)
}
