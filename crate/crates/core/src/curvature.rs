//! Pointwise curvature of a submanifold `N^n ⊂ S^{n+p}` from its shape
//! operators in an orthonormal frame.
//!
//! * Gauss equation: `R_ijkl = δ_ik δ_jl − δ_il δ_jk + Σ_α (h^α_ik h^α_jl − h^α_il h^α_jk)`
//! * Ricci (minimal case): `Ric = (n−1)·I − Σ_α A_α²`
//! * Willmore, for minimal `N` with constant `S`: `Tr((Σ_β A_β²)·A_α) = 0` for every `α`,
//!   equivalently `Σ_ij R_ij h^α_ij = Tr(Ric·A_α) = 0`.
//!
//! Constancy of `S` is a hypothesis here: a dataset is a single point of a
//! homogeneous focal submanifold, so it cannot be checked pointwise.
//! The mean curvature vector is zero throughout; non-minimal input is
//! rejected where the minimal-case formulas are used.

use thiserror::Error;

use crate::catalog::ShapeOperatorSet;
use crate::exactnum::QuadExt;
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurvatureError {
    #[error("dataset '{0}' is not minimal; the minimal-case Ricci formula does not apply")]
    NotMinimal(String),
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("Willmore consistency identity failed for operator {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RicciTensor {
    pub matrix: Matrix<QuadExt>,
}

impl RicciTensor {
    /// Scalar curvature `Σ_i R_ii`.
    pub fn scalar_curvature(&self) -> QuadExt {
        self.matrix.trace().expect("square")
    }
}

/// `Tr A_α = 0` for every operator.
pub fn minimality_check(data: &ShapeOperatorSet) -> bool {
    operator_traces(data).iter().all(QuadExt::is_zero)
}

pub fn operator_traces(data: &ShapeOperatorSet) -> Vec<QuadExt> {
    data.operators()
        .iter()
        .map(|a| a.trace().expect("square"))
        .collect()
}

/// Squared norm of the second fundamental form, `S = Σ_α Tr(A_α²)`.
pub fn square_norm_s(data: &ShapeOperatorSet) -> QuadExt {
    data.sum_of_squares().trace().expect("square")
}

/// `(n−1)·I − Σ_α A_α²` without checking minimality.
pub fn minimal_form_ricci_matrix(data: &ShapeOperatorSet) -> Matrix<QuadExt> {
    let n = data.n();
    Matrix::identity(n)
        .scale(&QuadExt::from_int(n as i64 - 1))
        .sub(&data.sum_of_squares())
        .expect("equal shapes")
}

pub fn ricci(data: &ShapeOperatorSet) -> Result<RicciTensor, CurvatureError> {
    if !minimality_check(data) {
        return Err(CurvatureError::NotMinimal(data.name.clone()));
    }
    Ok(RicciTensor {
        matrix: minimal_form_ricci_matrix(data),
    })
}

/// One component of the Gauss-equation curvature tensor (0-based indices).
pub fn riemann(
    data: &ShapeOperatorSet,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<QuadExt, CurvatureError> {
    let n = data.n();
    if let Some(&index) = [i, j, k, l].iter().find(|&&x| x >= n) {
        return Err(CurvatureError::IndexOutOfRange { index, n });
    }
    Ok(riemann_unchecked(data.operators(), i, j, k, l))
}

fn riemann_unchecked(ops: &[Matrix<QuadExt>], i: usize, j: usize, k: usize, l: usize) -> QuadExt {
    let delta = |a: usize, b: usize| i64::from(a == b);
    let mut r = QuadExt::from_int(delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k));
    for h in ops {
        r += &(h.get(i, k) * h.get(j, l) - h.get(i, l) * h.get(j, k));
    }
    r
}

/// The full `n⁴` Gauss-equation tensor, for symmetry audits and contraction.
#[derive(Debug, Clone)]
pub struct RiemannTensor {
    n: usize,
    components: Vec<QuadExt>,
}

impl RiemannTensor {
    pub fn assemble(data: &ShapeOperatorSet) -> Self {
        let n = data.n();
        let mut components = Vec::with_capacity(n.pow(4));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        components.push(riemann_unchecked(data.operators(), i, j, k, l));
                    }
                }
            }
        }
        Self { n, components }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &QuadExt {
        let n = self.n;
        &self.components[((i * n + j) * n + k) * n + l]
    }

    /// `R_ij = Σ_k R_ikjk`, valid with or without minimality.
    pub fn contract(&self) -> Matrix<QuadExt> {
        let n = self.n;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = QuadExt::zero();
                for k in 0..n {
                    acc += self.get(i, k, j, k);
                }
                m.set(i, j, acc);
            }
        }
        m
    }

    /// Checks antisymmetry in each pair, pair symmetry and the first Bianchi
    /// identity over every index quadruple.
    pub fn audit_symmetries(&self) -> SymmetryAudit {
        let n = self.n;
        let mut audit = SymmetryAudit::default();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        audit.quadruples += 1;
                        let r = self.get(i, j, k, l);
                        let ok_pairs = *r == -self.get(j, i, k, l)
                            && *r == -self.get(i, j, l, k)
                            && r == self.get(k, l, i, j);
                        let bianchi = r + self.get(i, k, l, j) + self.get(i, l, j, k);
                        if !ok_pairs || !bianchi.is_zero() {
                            audit.violations += 1;
                            audit.first_violation.get_or_insert([i, j, k, l]);
                        }
                    }
                }
            }
        }
        audit
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymmetryAudit {
    pub quadruples: usize,
    pub violations: usize,
    pub first_violation: Option<[usize; 4]>,
}

impl SymmetryAudit {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Both forms of the Willmore criterion and the identity linking them.
#[derive(Debug, Clone, PartialEq)]
pub struct WillmoreReport {
    /// `Tr((Σ_β A_β²)·A_α)` per operator.
    pub per_normal_traces: Vec<QuadExt>,
    /// `Σ_ij R_ij h^α_ij = Tr(Ric·A_α)` per operator.
    pub ricci_form_traces: Vec<QuadExt>,
    pub willmore: bool,
    pub ricci_form_willmore: bool,
}

/// Willmore criterion for minimal data (constant `S` assumed).
///
/// Verifies `Tr(Ric·A_α) = (n−1)·Tr A_α − Tr((Σ A_β²)·A_α)` for every `α`
/// and fails with [`CurvatureError::Inconsistent`] otherwise.
pub fn willmore_check(data: &ShapeOperatorSet) -> Result<WillmoreReport, CurvatureError> {
    let ric = ricci(data)?;
    let report = willmore_forms(data, &ric.matrix);
    if let Some(alpha) = consistency_failure(data, &report) {
        return Err(CurvatureError::Inconsistent(data.labels()[alpha].clone()));
    }
    Ok(report)
}

/// Evaluates both Willmore forms against a given Ricci matrix.
pub fn willmore_forms(data: &ShapeOperatorSet, ricci_matrix: &Matrix<QuadExt>) -> WillmoreReport {
    let sum_sq = data.sum_of_squares();
    let per_normal_traces: Vec<QuadExt> = data
        .operators()
        .iter()
        .map(|a| sum_sq.mul(a).and_then(|m| m.trace()).expect("square"))
        .collect();
    let ricci_form_traces: Vec<QuadExt> = data
        .operators()
        .iter()
        .map(|a| entrywise_contraction(ricci_matrix, a))
        .collect();
    WillmoreReport {
        willmore: per_normal_traces.iter().all(QuadExt::is_zero),
        ricci_form_willmore: ricci_form_traces.iter().all(QuadExt::is_zero),
        per_normal_traces,
        ricci_form_traces,
    }
}

/// Index of the first operator violating the consistency identity, if any.
pub fn consistency_failure(data: &ShapeOperatorSet, report: &WillmoreReport) -> Option<usize> {
    let n_minus_1 = QuadExt::from_int(data.n() as i64 - 1);
    let traces = operator_traces(data);
    (0..data.p()).find(|&a| {
        let expected = &n_minus_1 * &traces[a] - &report.per_normal_traces[a];
        report.ricci_form_traces[a] != expected
    })
}

/// `Σ_ij X_ij Y_ij`.
fn entrywise_contraction(x: &Matrix<QuadExt>, y: &Matrix<QuadExt>) -> QuadExt {
    let mut acc = QuadExt::zero();
    for (a, b) in x.entries().iter().zip(y.entries()) {
        acc += &(a * b);
    }
    acc
}

/// `Some(c)` iff `Ric = c·I` exactly.
pub fn einstein_check(ric: &RicciTensor) -> Option<QuadExt> {
    let m = &ric.matrix;
    let c = m.get(0, 0).clone();
    (*m == Matrix::identity(m.rows()).scale(&c)).then_some(c)
}

/// Everything the verifier reports about one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub minimal: bool,
    pub s: QuadExt,
    pub ricci: Option<RicciTensor>,
    pub einstein: Option<QuadExt>,
    pub willmore: bool,
    pub per_normal_traces: Vec<QuadExt>,
}

pub fn analyze(data: &ShapeOperatorSet) -> Result<CurvatureReport, CurvatureError> {
    let minimal = minimality_check(data);
    let s = square_norm_s(data);
    if !minimal {
        return Ok(CurvatureReport {
            minimal,
            s,
            ricci: None,
            einstein: None,
            willmore: false,
            per_normal_traces: Vec::new(),
        });
    }
    let ric = ricci(data)?;
    let w = willmore_check(data)?;
    Ok(CurvatureReport {
        minimal,
        s,
        einstein: einstein_check(&ric),
        ricci: Some(ric),
        willmore: w.willmore,
        per_normal_traces: w.per_normal_traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::exactnum::parse_scalar;

    fn q(s: &str) -> QuadExt {
        parse_scalar(s).unwrap()
    }

    fn single(entries: &[&str]) -> ShapeOperatorSet {
        let m = Matrix::diag(entries.iter().map(|s| q(s)).collect());
        ShapeOperatorSet::new("single", vec![m], None).unwrap()
    }

    fn zero_ops(n: usize, p: usize) -> ShapeOperatorSet {
        ShapeOperatorSet::new("flat", vec![Matrix::zeros(n, n); p], None).unwrap()
    }

    #[test]
    fn minimality_examples() {
        assert!(minimality_check(&builtin("g6_m1_M1").unwrap()));
        assert!(minimality_check(&builtin("g6_m2_M2").unwrap()));
        assert!(!minimality_check(&single(&["1", "0"])));
    }

    #[test]
    fn square_norm_examples() {
        assert_eq!(
            square_norm_s(&builtin("g6_m1_M1").unwrap()),
            QuadExt::frac(40, 3)
        );
        assert_eq!(
            square_norm_s(&builtin("g6_m2_M1").unwrap()),
            QuadExt::from_int(40)
        );
        assert_eq!(square_norm_s(&zero_ops(4, 2)), QuadExt::zero());
    }

    #[test]
    fn ricci_of_round_sphere_and_non_minimal_rejection() {
        let ric = ricci(&zero_ops(5, 2)).unwrap();
        assert_eq!(ric.matrix, Matrix::identity(5).scale(&QuadExt::from_int(4)));
        assert_eq!(einstein_check(&ric), Some(QuadExt::from_int(4)));
        assert!(matches!(
            ricci(&single(&["1", "0"])),
            Err(CurvatureError::NotMinimal(_))
        ));
        assert!(willmore_check(&single(&["1", "0"])).is_err());
    }

    #[test]
    fn riemann_examples() {
        let m1 = builtin("g6_m1_M1").unwrap();
        assert_eq!(riemann(&m1, 0, 1, 0, 1).unwrap(), QuadExt::from_int(2));
        assert_eq!(riemann(&m1, 2, 2, 0, 3).unwrap(), QuadExt::zero());
        assert_eq!(
            riemann(&zero_ops(3, 1), 0, 1, 0, 1).unwrap(),
            QuadExt::one()
        );
        assert_eq!(
            riemann(&m1, 0, 5, 0, 0),
            Err(CurvatureError::IndexOutOfRange { index: 5, n: 5 })
        );
    }

    #[test]
    fn willmore_without_einstein() {
        let set = single(&["1", "-1", "0"]);
        let w = willmore_check(&set).unwrap();
        assert!(w.willmore && w.ricci_form_willmore);
        assert_eq!(w.per_normal_traces, vec![QuadExt::zero()]);
        let ric = ricci(&set).unwrap();
        assert_eq!(ric.matrix, Matrix::diag(vec![q("1"), q("1"), q("2")]));
        assert_eq!(einstein_check(&ric), None);
    }

    #[test]
    fn non_willmore_minimal_data_is_detected() {
        // diag(2, -1, -1): Tr(A^3) = 8 - 2 = 6
        let set = single(&["2", "-1", "-1"]);
        let w = willmore_check(&set).unwrap();
        assert!(!w.willmore && !w.ricci_form_willmore);
        assert_eq!(w.per_normal_traces, vec![QuadExt::from_int(6)]);
        assert_eq!(w.ricci_form_traces, vec![QuadExt::from_int(-6)]);
    }

    #[test]
    fn contraction_matches_general_ricci_line() {
        // Non-minimal data: Σ_k R_ikjk = (n-1)δ_ij + Σ_α (h_ij tr A_α − (A_α²)_ij)
        let a =
            Matrix::from_rows(vec![vec![q("1"), q("sqrt3")], vec![q("sqrt3"), q("2/3")]]).unwrap();
        let set = ShapeOperatorSet::new("x", vec![a.clone()], None).unwrap();
        let contracted = RiemannTensor::assemble(&set).contract();
        let tr = a.trace().unwrap();
        let expected = Matrix::identity(2)
            .add(&a.scale(&tr))
            .unwrap()
            .sub(&a.mul(&a).unwrap())
            .unwrap();
        assert_eq!(contracted, expected);
    }
}
