//! Dense exact matrices over a commutative Q-algebra, with trace and the
//! Faddeev–LeVerrier characteristic polynomial.

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::exactnum::QuadExt;

/// Minimal ring contract for matrix coefficients.
///
/// Elements must form a commutative algebra over the rationals, so that
/// division by a nonzero integer is always exact. Constants are produced
/// "like" an existing element because some rings (polynomials) carry a
/// context such as the number of variables.
pub trait CoeffRing: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / k`; `k` is nonzero.
    fn div_int(&self, k: i64) -> Self;

    fn int_like(&self, k: i64) -> Self {
        let one = self.one_like();
        let mut acc = self.zero_like();
        for _ in 0..k.unsigned_abs() {
            acc = acc.add(&one);
        }
        if k < 0 {
            acc.neg()
        } else {
            acc
        }
    }
}

impl CoeffRing for QuadExt {
    fn zero_like(&self) -> Self {
        QuadExt::zero()
    }
    fn one_like(&self) -> Self {
        QuadExt::one()
    }
    fn is_zero(&self) -> bool {
        QuadExt::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_int(&self, k: i64) -> Self {
        QuadExt::div_int(self, k)
    }
    fn int_like(&self, k: i64) -> Self {
        QuadExt::from_int(k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("ragged rows: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("empty matrix")]
    Empty,
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    entries: Vec<R>,
}

impl<R: CoeffRing> Matrix<R> {
    /// Builds a matrix from a row-major vector. Panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<R>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map(Vec::len).ok_or(LinalgError::Empty)?;
        let mut entries = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(LinalgError::Ragged {
                    row: i,
                    expected: ncols,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self::from_vec(nrows, ncols, entries))
    }

    /// `rows × cols` matrix filled with `zero`.
    pub fn filled(rows: usize, cols: usize, zero: &R) -> Self {
        Self::from_vec(rows, cols, vec![zero.clone(); rows * cols])
    }

    /// Identity built from a prototype element's ring constants.
    pub fn identity_like(n: usize, proto: &R) -> Self {
        let mut m = Self::filled(n, n, &proto.zero_like());
        for i in 0..n {
            m.entries[i * n + i] = proto.one_like();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[R] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: R) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        Self::from_vec(self.cols, self.rows, entries)
    }

    pub fn map<S: CoeffRing>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix::from_vec(self.rows, self.cols, self.entries.iter().map(f).collect())
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|x| c.mul(x))
    }

    fn zipped(
        &self,
        rhs: &Self,
        op: &'static str,
        f: impl Fn(&R, &R) -> R,
    ) -> Result<Self, LinalgError> {
        if self.shape() != rhs.shape() {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(Self::from_vec(self.rows, self.cols, entries))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.zipped(rhs, "add", |a, b| a.add(b))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.zipped(rhs, "sub", |a, b| a.sub(b))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "mul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut entries = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: Option<R> = None;
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b);
                    acc = Some(match acc {
                        Some(s) => s.add(&prod),
                        None => prod,
                    });
                }
                entries.push(acc.unwrap_or_else(|| self.get(i, 0).zero_like()));
            }
        }
        Ok(Self::from_vec(self.rows, rhs.cols, entries))
    }

    pub fn trace(&self) -> Result<R, LinalgError> {
        self.require_square("trace")?;
        let mut acc = self.entries[0].zero_like();
        for i in 0..self.rows {
            acc = acc.add(self.get(i, i));
        }
        Ok(acc)
    }

    /// Exact entrywise symmetry test. Non-square matrices are never symmetric.
    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CoeffRing::is_zero)
    }

    fn require_square(&self, op: &'static str) -> Result<(), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                op,
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.rows == 0 {
            return Err(LinalgError::Empty);
        }
        Ok(())
    }

    /// `det(λI − A)` by the Faddeev–LeVerrier recurrence
    ///
    /// ```text
    /// M_0 = 0,  c_n = 1
    /// M_k = A·M_{k-1} + c_{n-k+1}·I
    /// c_{n-k} = −tr(A·M_k) / k
    /// ```
    ///
    /// which only needs matrix products and exact division by `1..=n`.
    pub fn char_poly(&self) -> Result<UniPoly<R>, LinalgError> {
        self.require_square("char_poly")?;
        let n = self.rows;
        let proto = &self.entries[0];
        let ident = Self::identity_like(n, proto);
        let mut coeffs = vec![proto.zero_like(); n + 1];
        coeffs[n] = proto.one_like();
        // M_1 = I, so A·M_1 = A
        let mut am = self.clone();
        for k in 1..=n {
            let c = am.trace()?.neg().div_int(k as i64);
            coeffs[n - k] = c.clone();
            if k < n {
                let m = am.add(&ident.scale(&c))?;
                am = self.mul(&m)?;
            }
        }
        Ok(UniPoly::new(coeffs))
    }
}

impl Matrix<QuadExt> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, &QuadExt::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::identity_like(n, &QuadExt::one())
    }

    pub fn diag(values: Vec<QuadExt>) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.into_iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Float copy, row-major.
    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.entries.iter().map(QuadExt::to_f64).collect()
    }
}

/// `[a, b, c]` per row, rows separated by `; `.
impl fmt::Display for Matrix<QuadExt> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            f.write_str("[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// Univariate polynomial in λ, coefficients lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly<R> {
    coeffs: Vec<R>,
}

impl<R: CoeffRing> UniPoly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(CoeffRing::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Option<&R> {
        self.coeffs.get(k)
    }

    pub fn leading(&self) -> Option<&R> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| *c == c.one_like())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let (Some(p), Some(_)) = (self.coeffs.first(), rhs.coeffs.first()) else {
            return Self { coeffs: Vec::new() };
        };
        let mut out = vec![p.zero_like(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    /// Quotient and remainder by a monic divisor.
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let d = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= d {
            return (Self { coeffs: Vec::new() }, self.clone());
        }
        let mut rem = self.coeffs.clone();
        let zero = rem[0].zero_like();
        let mut quot = vec![zero; rem.len() - d];
        for k in (0..quot.len()).rev() {
            let c = rem[k + d].clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].sub(&c.mul(dc));
            }
            quot[k] = c;
        }
        rem.truncate(d);
        (Self::new(quot), Self::new(rem))
    }

    /// `p(A)` for a square matrix `A`, by Horner's rule.
    pub fn eval_matrix(&self, a: &Matrix<R>) -> Result<Matrix<R>, LinalgError> {
        a.require_square("eval_matrix")?;
        let proto = &a.entries[0];
        let ident = Matrix::identity_like(a.rows, proto);
        let mut acc = Matrix::filled(a.rows, a.rows, &proto.zero_like());
        for c in self.coeffs.iter().rev() {
            acc = a.mul(&acc)?.add(&ident.scale(c))?;
        }
        Ok(acc)
    }
}

impl UniPoly<QuadExt> {
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64())
    }
}

/// Highest degree first, variable `l`: `l^5 - 10/3*l^3 + l`.
impl fmt::Display for UniPoly<QuadExt> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, &QuadExt)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (k, c)) in terms.into_iter().enumerate() {
            let monomial = match k {
                0 => String::new(),
                1 => "l".to_string(),
                _ => format!("l^{k}"),
            };
            write_signed_term(f, idx == 0, c, &monomial)?;
        }
        Ok(())
    }
}

/// Writes `± coeff*monomial` with unit coefficients elided. Coefficients with
/// both a rational and a √3 part are parenthesized.
pub(crate) fn write_signed_term(
    f: &mut impl fmt::Write,
    first: bool,
    c: &QuadExt,
    monomial: &str,
) -> fmt::Result {
    let compound = !c.is_rational() && !c.rational_part().is_zero();
    let negative = !compound && c.signum() < 0;
    let magnitude = if negative { -c } else { c.clone() };
    if first {
        if negative {
            f.write_str("-")?;
        }
    } else {
        f.write_str(if negative { " - " } else { " + " })?;
    }
    if monomial.is_empty() {
        if compound {
            write!(f, "({magnitude})")
        } else {
            write!(f, "{magnitude}")
        }
    } else if magnitude.is_one() {
        f.write_str(monomial)
    } else if compound {
        write!(f, "({magnitude})*{monomial}")
    } else {
        write!(f, "{magnitude}*{monomial}")
    }
}
