//! Shape-operator datasets: the built-in g = 6 focal submanifold data, a block
//! builder for the `m = 2` families, and the line-oriented dataset format.
//!
//! ```text
//! # comment
//! dataset <identifier>
//! dim <n>
//! codim <p>
//! operator <label>      (p times)
//! <n rows of n scalars>
//! ```
//!
//! Entries printed with a radical in the denominator are stored rationalized:
//! `1/√3` is `1/3*sqrt3`, `2/√3` is `2/3*sqrt3`, `−2/√3` is `-2/3*sqrt3`.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::exactnum::{parse_scalar, QuadExt};
use crate::linalg::Matrix;

/// Names of the built-in datasets, in reporting order.
pub const BUILTIN_NAMES: [&str; 4] = ["g6_m1_M1", "g6_m1_M2", "g6_m2_M1", "g6_m2_M2"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown dataset '{0}'")]
    UnknownDataset(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("operator '{label}' (line {line}) is not symmetric at ({row}, {col})")]
    NotSymmetric {
        label: String,
        line: usize,
        row: usize,
        col: usize,
    },
    #[error("block grid: {0}")]
    Format(String),
    #[error("invalid dataset: {0}")]
    Invalid(String),
}

/// A single-point datum: `p` symmetric `n × n` shape operators.
///
/// The `g_tag`/`m_tag` fields are informational and not part of the textual
/// format; equality compares only the data that round-trips.
#[derive(Debug, Clone)]
pub struct ShapeOperatorSet {
    pub name: String,
    pub g_tag: Option<u32>,
    pub m_tag: Option<u32>,
    labels: Vec<String>,
    operators: Vec<Matrix<QuadExt>>,
}

impl PartialEq for ShapeOperatorSet {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.labels == other.labels && self.operators == other.operators
    }
}

impl ShapeOperatorSet {
    /// Validates shape and symmetry. Labels default to `A1..Ap` when `None`.
    pub fn new(
        name: impl Into<String>,
        operators: Vec<Matrix<QuadExt>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, CatalogError> {
        let name = name.into();
        validate_identifier(&name).map_err(CatalogError::Invalid)?;
        let first = operators
            .first()
            .ok_or_else(|| CatalogError::Invalid("at least one operator is required".into()))?;
        let n = first.rows();
        let labels =
            labels.unwrap_or_else(|| (1..=operators.len()).map(|a| format!("A{a}")).collect());
        if labels.len() != operators.len() {
            return Err(CatalogError::Invalid(format!(
                "{} labels for {} operators",
                labels.len(),
                operators.len()
            )));
        }
        for (label, op) in labels.iter().zip(&operators) {
            validate_identifier(label).map_err(CatalogError::Invalid)?;
            if op.shape() != (n, n) || n == 0 {
                return Err(CatalogError::Invalid(format!(
                    "operator '{label}' has shape {:?}, expected {n}x{n}",
                    op.shape()
                )));
            }
            if let Some((row, col)) = asymmetry(op) {
                return Err(CatalogError::NotSymmetric {
                    label: label.clone(),
                    line: 0,
                    row,
                    col,
                });
            }
        }
        Ok(Self {
            name,
            g_tag: None,
            m_tag: None,
            labels,
            operators,
        })
    }

    pub fn with_tags(mut self, g: u32, m: u32) -> Self {
        self.g_tag = Some(g);
        self.m_tag = Some(m);
        self
    }

    /// Tangent dimension.
    pub fn n(&self) -> usize {
        self.operators[0].rows()
    }

    /// Codimension, i.e. number of shape operators.
    pub fn p(&self) -> usize {
        self.operators.len()
    }

    pub fn operators(&self) -> &[Matrix<QuadExt>] {
        &self.operators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `Σ_α A_α²`.
    pub fn sum_of_squares(&self) -> Matrix<QuadExt> {
        let mut acc = Matrix::zeros(self.n(), self.n());
        for a in &self.operators {
            acc = acc
                .add(&a.mul(a).expect("square operators"))
                .expect("equal shapes");
        }
        acc
    }

    /// Canonical text form; `parse_dataset` inverts it exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "dataset {}", self.name).unwrap();
        writeln!(out, "dim {}", self.n()).unwrap();
        writeln!(out, "codim {}", self.p()).unwrap();
        for (label, op) in self.labels.iter().zip(&self.operators) {
            writeln!(out, "operator {label}").unwrap();
            for i in 0..op.rows() {
                let row: Vec<String> = op.row(i).iter().map(ToString::to_string).collect();
                writeln!(out, "{}", row.join(" ")).unwrap();
            }
        }
        out
    }
}

impl fmt::Display for ShapeOperatorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn asymmetry(m: &Matrix<QuadExt>) -> Option<(usize, usize)> {
    (0..m.rows())
        .flat_map(|i| (i + 1..m.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| m.get(i, j) != m.get(j, i))
}

fn validate_identifier(s: &str) -> Result<(), String> {
    if !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
    {
        Ok(())
    } else {
        Err(format!("invalid identifier '{s}'"))
    }
}

/// Parses the dataset format, validating row lengths and symmetry.
pub fn parse_dataset(text: &str) -> Result<ShapeOperatorSet, CatalogError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let last_line = text.lines().count().max(1);
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| CatalogError::Parse {
            line: last_line,
            message: format!("unexpected end of input, expected {what}"),
        })
    };

    let (line, header) = next("'dataset <name>'")?;
    let name = keyword_value(line, header, "dataset")?.to_string();
    validate_identifier(&name).map_err(|message| CatalogError::Parse { line, message })?;
    let (line, dim) = next("'dim <n>'")?;
    let n = count_value(line, dim, "dim")?;
    let (line, codim) = next("'codim <p>'")?;
    let p = count_value(line, codim, "codim")?;

    let mut labels = Vec::with_capacity(p);
    let mut operators = Vec::with_capacity(p);
    for _ in 0..p {
        let (op_line, header) = next("'operator <label>'")?;
        let label = keyword_value(op_line, header, "operator")?.to_string();
        validate_identifier(&label).map_err(|message| CatalogError::Parse {
            line: op_line,
            message,
        })?;
        let mut entries = Vec::with_capacity(n * n);
        for _ in 0..n {
            let (line, row) = next("a matrix row")?;
            let tokens: Vec<&str> = row.split_whitespace().collect();
            if tokens.len() != n {
                return Err(CatalogError::Parse {
                    line,
                    message: format!("row has {} scalars, expected {n}", tokens.len()),
                });
            }
            for tok in tokens {
                let x = parse_scalar(tok).map_err(|e| CatalogError::Parse {
                    line,
                    message: format!("bad scalar '{tok}': {e}"),
                })?;
                entries.push(x);
            }
        }
        let op = Matrix::from_vec(n, n, entries);
        if let Some((row, col)) = asymmetry(&op) {
            return Err(CatalogError::NotSymmetric {
                label,
                line: op_line,
                row,
                col,
            });
        }
        labels.push(label);
        operators.push(op);
    }
    if let Some((line, extra)) = lines.next() {
        return Err(CatalogError::Parse {
            line,
            message: format!("unexpected trailing content '{extra}'"),
        });
    }
    ShapeOperatorSet::new(name, operators, Some(labels))
}

fn keyword_value<'a>(line: usize, text: &'a str, keyword: &str) -> Result<&'a str, CatalogError> {
    let mut parts = text.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == keyword => Ok(v),
        _ => Err(CatalogError::Parse {
            line,
            message: format!("expected '{keyword} <value>', found '{text}'"),
        }),
    }
}

fn count_value(line: usize, text: &str, keyword: &str) -> Result<usize, CatalogError> {
    let v = keyword_value(line, text, keyword)?;
    match v.parse::<usize>() {
        Ok(k) if k > 0 => Ok(k),
        _ => Err(CatalogError::Parse {
            line,
            message: format!("'{keyword}' needs a positive integer, found '{v}'"),
        }),
    }
}

/// One cell of a block grid.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockCell {
    Zero,
    /// `q·I`
    Identity(QuadExt),
    /// `q·J` with `J = [[0, −1], [1, 0]]`; only for 2×2 blocks.
    Rotation(QuadExt),
}

/// A square grid of scalar-multiple-of-`I`/`J` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    pub block_size: usize,
    pub grid: Vec<Vec<BlockCell>>,
}

impl BlockSpec {
    pub fn new(block_size: usize, grid: Vec<Vec<BlockCell>>) -> Self {
        Self { block_size, grid }
    }

    /// Block-diagonal grid with the given cells on the diagonal.
    pub fn diagonal(block_size: usize, cells: Vec<BlockCell>) -> Self {
        let k = cells.len();
        let grid = cells
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                let mut row = vec![BlockCell::Zero; k];
                row[i] = c;
                row
            })
            .collect();
        Self::new(block_size, grid)
    }

    /// Grid with the listed `(row, col, cell)` entries and zeros elsewhere.
    pub fn sparse(block_size: usize, k: usize, cells: Vec<(usize, usize, BlockCell)>) -> Self {
        let mut grid = vec![vec![BlockCell::Zero; k]; k];
        for (i, j, c) in cells {
            grid[i][j] = c;
        }
        Self::new(block_size, grid)
    }

    pub fn expand(&self) -> Result<Matrix<QuadExt>, CatalogError> {
        let b = self.block_size;
        if b != 1 && b != 2 {
            return Err(CatalogError::Format(format!(
                "block size must be 1 or 2, got {b}"
            )));
        }
        let k = self.grid.len();
        if k == 0 {
            return Err(CatalogError::Format("empty grid".into()));
        }
        if let Some((i, row)) = self.grid.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(CatalogError::Format(format!(
                "row {i} has {} cells, expected {k}",
                row.len()
            )));
        }
        let mut m = Matrix::zeros(k * b, k * b);
        for (bi, row) in self.grid.iter().enumerate() {
            for (bj, cell) in row.iter().enumerate() {
                let (r0, c0) = (bi * b, bj * b);
                match cell {
                    BlockCell::Zero => {}
                    BlockCell::Identity(q) => {
                        for d in 0..b {
                            m.set(r0 + d, c0 + d, q.clone());
                        }
                    }
                    BlockCell::Rotation(q) => {
                        if b != 2 {
                            return Err(CatalogError::Format("J blocks need block size 2".into()));
                        }
                        m.set(r0, c0 + 1, -q);
                        m.set(r0 + 1, c0, q.clone());
                    }
                }
            }
        }
        Ok(m)
    }
}

fn q(s: &str) -> QuadExt {
    parse_scalar(s).expect("built-in scalar")
}

fn diag(entries: &[&str]) -> Matrix<QuadExt> {
    Matrix::diag(entries.iter().map(|s| q(s)).collect())
}

fn symmetric(n: usize, upper: &[(usize, usize, &str)]) -> Matrix<QuadExt> {
    let mut m = Matrix::zeros(n, n);
    for &(i, j, s) in upper {
        m.set(i, j, q(s));
        m.set(j, i, q(s));
    }
    m
}

fn labels(names: &[&str]) -> Option<Vec<String>> {
    Some(names.iter().map(|s| s.to_string()).collect())
}

/// diag(√3, 1/√3, 0, −1/√3, −√3), shared by both m = 1 focal submanifolds.
fn m1_first_operator() -> Matrix<QuadExt> {
    diag(&["sqrt3", "1/3*sqrt3", "0", "-1/3*sqrt3", "-sqrt3"])
}

/// Block-diagonal (√3I, 1/√3·I, 0, −1/√3·I, −√3I), shared by both m = 2 focal submanifolds.
pub fn m2_first_block_spec() -> BlockSpec {
    use BlockCell::*;
    BlockSpec::diagonal(
        2,
        vec![
            Identity(q("sqrt3")),
            Identity(q("1/3*sqrt3")),
            Zero,
            Identity(q("-1/3*sqrt3")),
            Identity(q("-sqrt3")),
        ],
    )
}

/// Block specs of the second and third operators of `g6_m2_M1` / `g6_m2_M2`.
/// Grid indices are 0-based.
pub fn m2_block_specs(name: &str) -> Option<[BlockSpec; 3]> {
    use BlockCell::*;
    let first = m2_first_block_spec();
    match name {
        "g6_m2_M1" => Some([
            first,
            BlockSpec::sparse(
                2,
                5,
                vec![
                    (0, 4, Rotation(q("sqrt3"))),
                    (1, 3, Rotation(q("1/3*sqrt3"))),
                    (3, 1, Rotation(q("-1/3*sqrt3"))),
                    (4, 0, Rotation(q("-sqrt3"))),
                ],
            ),
            BlockSpec::sparse(
                2,
                5,
                vec![
                    (0, 4, Identity(q("sqrt3"))),
                    (1, 3, Identity(q("1/3*sqrt3"))),
                    (3, 1, Identity(q("1/3*sqrt3"))),
                    (4, 0, Identity(q("sqrt3"))),
                ],
            ),
        ]),
        "g6_m2_M2" => Some([
            first,
            BlockSpec::sparse(
                2,
                5,
                vec![
                    (0, 1, Rotation(q("1"))),
                    (1, 0, Rotation(q("-1"))),
                    (1, 3, Rotation(q("-2/3*sqrt3"))),
                    (3, 1, Rotation(q("2/3*sqrt3"))),
                    (3, 4, Rotation(q("1"))),
                    (4, 3, Rotation(q("-1"))),
                ],
            ),
            BlockSpec::sparse(
                2,
                5,
                vec![
                    (0, 1, Identity(q("-1"))),
                    (1, 0, Identity(q("-1"))),
                    (1, 3, Identity(q("2/3*sqrt3"))),
                    (3, 1, Identity(q("2/3*sqrt3"))),
                    (3, 4, Identity(q("-1"))),
                    (4, 3, Identity(q("-1"))),
                ],
            ),
        ]),
        _ => None,
    }
}

/// Looks up a built-in dataset by name.
pub fn builtin(name: &str) -> Result<ShapeOperatorSet, CatalogError> {
    let set = match name {
        "g6_m1_M1" => {
            let a7 = symmetric(5, &[(0, 4, "sqrt3"), (1, 3, "1/3*sqrt3")]);
            ShapeOperatorSet::new(name, vec![m1_first_operator(), a7], labels(&["A6", "A7"]))?
                .with_tags(6, 1)
        }
        "g6_m1_M2" => {
            let a7 = symmetric(5, &[(0, 1, "1"), (1, 3, "-2/3*sqrt3"), (3, 4, "1")]);
            ShapeOperatorSet::new(name, vec![m1_first_operator(), a7], labels(&["A6", "A7"]))?
                .with_tags(6, 1)
        }
        "g6_m2_M1" | "g6_m2_M2" => {
            let specs = m2_block_specs(name).expect("m = 2 block specs");
            let ops = specs
                .iter()
                .map(BlockSpec::expand)
                .collect::<Result<Vec<_>, _>>()?;
            ShapeOperatorSet::new(name, ops, labels(&["A11", "A12", "A13"]))?.with_tags(6, 2)
        }
        other => return Err(CatalogError::UnknownDataset(other.to_string())),
    };
    Ok(set)
}

/// All built-in datasets in reporting order.
pub fn builtins() -> Vec<ShapeOperatorSet> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n).expect("built-in dataset"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_m1_operator_matches_printed_diagonal() {
        let set = builtin("g6_m1_M1").unwrap();
        assert_eq!(
            set.operators()[0],
            diag(&["sqrt3", "1/3*sqrt3", "0", "-1/3*sqrt3", "-sqrt3"])
        );
        assert_eq!((set.n(), set.p()), (5, 2));
        assert_eq!(set.labels(), ["A6", "A7"]);
    }

    #[test]
    fn unknown_name() {
        assert_eq!(
            builtin("g4_m1"),
            Err(CatalogError::UnknownDataset("g4_m1".into()))
        );
    }

    #[test]
    fn block_expansion_examples() {
        let m = BlockSpec::new(2, vec![vec![BlockCell::Identity(q("sqrt3"))]])
            .expand()
            .unwrap();
        assert_eq!(m, diag(&["sqrt3", "sqrt3"]));
        let m = BlockSpec::new(2, vec![vec![BlockCell::Rotation(q("sqrt3"))]])
            .expand()
            .unwrap();
        assert_eq!(m.to_string(), "[0, -sqrt3]; [sqrt3, 0]");
        let m = BlockSpec::sparse(2, 3, vec![]).expand().unwrap();
        assert!(m.is_zero() && m.shape() == (6, 6));
    }

    #[test]
    fn block_format_errors() {
        let ragged = BlockSpec::new(
            2,
            vec![
                vec![BlockCell::Zero, BlockCell::Zero],
                vec![BlockCell::Zero],
            ],
        );
        assert!(matches!(ragged.expand(), Err(CatalogError::Format(_))));
        let j1 = BlockSpec::new(1, vec![vec![BlockCell::Rotation(q("1"))]]);
        assert!(matches!(j1.expand(), Err(CatalogError::Format(_))));
        assert!(BlockSpec::new(3, vec![vec![BlockCell::Zero]])
            .expand()
            .is_err());
    }

    #[test]
    fn all_builtins_symmetric_and_round_trip() {
        for set in builtins() {
            assert!(
                set.operators().iter().all(Matrix::is_symmetric),
                "{}",
                set.name
            );
            let text = set.serialize();
            let back = parse_dataset(&text).unwrap();
            assert_eq!(back, set);
            assert_eq!(back.serialize(), text);
        }
    }

    #[test]
    fn m2_operators_are_block_expansions() {
        for name in ["g6_m2_M1", "g6_m2_M2"] {
            let set = builtin(name).unwrap();
            let specs = m2_block_specs(name).unwrap();
            for (spec, op) in specs.iter().zip(set.operators()) {
                assert_eq!(&spec.expand().unwrap(), op);
            }
        }
    }

    #[test]
    fn rotation_blocks_give_symmetric_operator() {
        let set = builtin("g6_m2_M1").unwrap();
        let a12 = &set.operators()[1];
        assert!(a12.is_symmetric());
        assert_eq!(a12.get(0, 9), &q("-sqrt3"));
        assert_eq!(a12.get(1, 8), &q("sqrt3"));
        assert_eq!(a12.get(9, 0), &q("-sqrt3"));
    }

    const SMALL: &str =
        "# two by two\ndataset tiny\ndim 2\ncodim 1\noperator A1\n1    sqrt3\nsqrt3\t-1\n";

    #[test]
    fn parses_with_comments_and_whitespace_runs() {
        let set = parse_dataset(SMALL).unwrap();
        assert_eq!(set.name, "tiny");
        assert_eq!(set.operators()[0].get(0, 1), &QuadExt::sqrt3());
        assert_eq!(
            set.serialize(),
            "dataset tiny\ndim 2\ncodim 1\noperator A1\n1 sqrt3\nsqrt3 -1\n"
        );
    }

    #[test]
    fn rejects_asymmetric_operator() {
        let text = SMALL.replace("sqrt3\t-1", "2\t-1");
        let err = parse_dataset(&text).unwrap_err();
        assert!(
            matches!(
                err,
                CatalogError::NotSymmetric {
                    row: 0,
                    col: 1,
                    line: 5,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn rejects_short_row() {
        let set = builtin("g6_m1_M1").unwrap();
        let text = set.serialize().replacen("sqrt3 0 0 0 0", "sqrt3 0 0 0", 1);
        let err = parse_dataset(&text).unwrap_err();
        assert_eq!(
            err,
            CatalogError::Parse {
                line: 5,
                message: "row has 4 scalars, expected 5".into()
            }
        );
    }

    #[test]
    fn rejects_bad_headers_and_scalars() {
        assert!(matches!(
            parse_dataset("dataset\n"),
            Err(CatalogError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_dataset("dataset x\ndim two\n"),
            Err(CatalogError::Parse { line: 2, .. })
        ));
        let bad = SMALL.replace("1    sqrt3", "1 sqrt5");
        assert!(matches!(
            parse_dataset(&bad),
            Err(CatalogError::Parse { line: 6, .. })
        ));
        let truncated = "dataset x\ndim 2\ncodim 1\noperator A\n1 0\n";
        assert!(matches!(
            parse_dataset(truncated),
            Err(CatalogError::Parse { .. })
        ));
        let trailing = format!("{SMALL}extra\n");
        assert!(matches!(
            parse_dataset(&trailing),
            Err(CatalogError::Parse { line: 8, .. })
        ));
    }
}
