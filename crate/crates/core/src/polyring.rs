//! Multivariate polynomials over Q(√3) in the normal coordinates `t1..tp`,
//! and reduction modulo the unit-sphere relation `t1² + … + tp² − 1`.
//!
//! Monomials are ordered lexicographically with `t1` highest, so the relation
//! has leading monomial `t1²` and division by it yields a unique remainder in
//! which every monomial has `t1`-degree at most one. The quotient ring is the
//! coordinate ring of the complex quadric `Σ t² = 1`, which is irreducible for
//! `p ≥ 2` and in which the real unit sphere is Zariski-dense; hence a
//! polynomial is constant on the real sphere exactly when its remainder is a
//! constant. For `p = 1` the "sphere" is the two points `±1` and the remainder
//! `c0 + c1·t1` is constant there iff `c1 = 0`, so the same test applies.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::exactnum::QuadExt;
use crate::linalg::{write_signed_term, CoeffRing};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableCount { left: usize, right: usize },
    #[error("evaluation point has {found} coordinates, polynomial has {expected} variables")]
    PointDimension { expected: usize, found: usize },
}

/// Exponent vector, one entry per variable.
pub type Exponents = Vec<u32>;

/// Sparse polynomial with dense exponent vectors; no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, QuadExt>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: QuadExt) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate `t_{index+1}` (0-based `index`).
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self::monomial(e, QuadExt::one())
    }

    pub fn monomial(exponents: Exponents, c: QuadExt) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    /// `t1² + … + tp² − 1`.
    pub fn sphere_relation(nvars: usize) -> Self {
        let mut r = Self::constant(nvars, QuadExt::from_int(-1));
        for i in 0..nvars {
            let mut e = vec![0; nvars];
            e[i] = 2;
            r.add_term(e, QuadExt::one());
        }
        r
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &QuadExt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> QuadExt {
        self.terms.get(exponents).cloned().unwrap_or_default()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// The value if this polynomial has degree 0 (zero counts as constant).
    pub fn as_constant(&self) -> Option<QuadExt> {
        match self.terms.len() {
            0 => Some(QuadExt::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().expect("one term");
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Leading monomial under lex order with `t1` highest.
    pub fn leading_exponents(&self) -> Option<&Exponents> {
        self.terms.keys().next_back()
    }

    fn add_term(&mut self, exponents: Exponents, c: QuadExt) {
        debug_assert_eq!(exponents.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exponents) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_vars(&self, rhs: &Self) -> Result<(), PolyError> {
        if self.nvars != rhs.nvars {
            return Err(PolyError::VariableCount {
                left: self.nvars,
                right: rhs.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, PolyError> {
        self.check_vars(rhs)?;
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, PolyError> {
        self.check_vars(rhs)?;
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, PolyError> {
        self.check_vars(rhs)?;
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &QuadExt) -> Self {
        let mut out = Self::zero(self.nvars);
        if !c.is_zero() {
            for (e, x) in &self.terms {
                out.terms.insert(e.clone(), x * c);
            }
        }
        out
    }

    /// Remainder of division by the sphere relation under lex order.
    ///
    /// Repeatedly rewrites the lex-largest monomial `t1^k·m` with `k ≥ 2` as
    /// `t1^(k−2)·m·(1 − t2² − … − tp²)`; each step lowers the `t1`-degree of
    /// the rewritten part, and the lex-largest offending monomial strictly
    /// decreases, so the loop terminates.
    pub fn reduce_mod_sphere(&self) -> Self {
        if self.nvars == 0 {
            return self.clone();
        }
        let mut work = self.clone();
        let mut done = Self::zero(self.nvars);
        while let Some((e, c)) = work.terms.pop_last() {
            if e[0] < 2 {
                done.add_term(e, c);
                continue;
            }
            let mut base = e.clone();
            base[0] -= 2;
            work.add_term(base.clone(), c.clone());
            for i in 1..self.nvars {
                let mut shifted = base.clone();
                shifted[i] += 2;
                work.add_term(shifted, -&c);
            }
        }
        done
    }

    /// Evaluates at a float point, coefficients converted with [`QuadExt::to_f64`].
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::PointDimension {
                expected: self.nvars,
                found: point.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(c.to_f64(), |acc, (&k, &x)| acc * x.powi(k as i32))
            })
            .sum())
    }
}

impl CoeffRing for MultiPoly {
    fn zero_like(&self) -> Self {
        Self::zero(self.nvars)
    }
    fn one_like(&self) -> Self {
        Self::constant(self.nvars, QuadExt::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, rhs: &Self) -> Self {
        self.checked_add(rhs).expect("same variable count")
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.checked_sub(rhs).expect("same variable count")
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.checked_mul(rhs).expect("same variable count")
    }
    fn neg(&self) -> Self {
        self.scale(&QuadExt::from_int(-1))
    }
    fn div_int(&self, k: i64) -> Self {
        self.scale(&QuadExt::frac(1, k))
    }
    fn int_like(&self, k: i64) -> Self {
        Self::constant(self.nvars, QuadExt::from_int(k))
    }
}

/// Lex-descending terms, e.g. `t1^2*t2 - 2/3*t1 + sqrt3`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let monomial: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("t{}", i + 1)
                    } else {
                        format!("t{}^{k}", i + 1)
                    }
                })
                .collect();
            write_signed_term(f, idx == 0, c, &monomial.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(nvars: usize, i: usize) -> MultiPoly {
        MultiPoly::var(nvars, i)
    }

    #[test]
    fn arithmetic_examples() {
        let s = t(2, 0).add(&t(2, 1));
        assert_eq!(s.mul(&s).to_string(), "t1^2 + 2*t1*t2 + t2^2");
        let r = t(2, 0).scale(&QuadExt::sqrt3());
        assert_eq!(r.mul(&r).to_string(), "3*t1^2");
        assert!(t(2, 0).mul(&MultiPoly::zero(2)).is_empty());
    }

    #[test]
    fn variable_count_mismatch() {
        assert_eq!(
            t(2, 0).checked_add(&t(3, 0)),
            Err(PolyError::VariableCount { left: 2, right: 3 })
        );
        assert!(t(2, 0).eval_f64(&[1.0]).is_err());
    }

    #[test]
    fn reduction_examples() {
        let sq = t(2, 0).mul(&t(2, 0)).add(&t(2, 1).mul(&t(2, 1)));
        assert_eq!(sq.reduce_mod_sphere().as_constant(), Some(QuadExt::one()));
        let cube = t(2, 0).mul(&t(2, 0)).mul(&t(2, 0));
        assert_eq!(cube.reduce_mod_sphere().to_string(), "-t1*t2^2 + t1");
        // p = 1: t1^3 = t1
        let c1 = t(1, 0).mul(&t(1, 0)).mul(&t(1, 0));
        assert_eq!(c1.reduce_mod_sphere(), t(1, 0));
    }

    #[test]
    fn evaluation_examples() {
        let sq = t(2, 0).mul(&t(2, 0)).add(&t(2, 1).mul(&t(2, 1)));
        assert!((sq.eval_f64(&[0.6, 0.8]).unwrap() - 1.0).abs() < 1e-15);
        let c = MultiPoly::constant(3, QuadExt::frac(10, 3));
        assert_eq!(c.eval_f64(&[0.3, -0.1, 0.9]).unwrap(), 3.3333333333333335);
        let r = t(2, 0).scale(&QuadExt::sqrt3());
        assert_eq!(r.eval_f64(&[1.0, 0.0]).unwrap(), 1.7320508075688772);
    }

    fn arb_poly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec(
            (
                prop::collection::vec(0u32..4, nvars),
                -5i64..6,
                1i64..4,
                -2i64..3,
            ),
            0..6,
        )
        .prop_map(move |terms| {
            let mut p = MultiPoly::zero(nvars);
            for (e, a, d, b) in terms {
                p.add_term(e, QuadExt::frac(a, d) + QuadExt::frac_sqrt3(b, d));
            }
            p
        })
    }

    fn unit_point(raw: &[f64]) -> Option<Vec<f64>> {
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        (norm > 1e-3).then(|| raw.iter().map(|x| x / norm).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn reduction_is_idempotent(f in (1usize..4).prop_flat_map(arb_poly)) {
            let r = f.reduce_mod_sphere();
            prop_assert_eq!(r.reduce_mod_sphere(), r.clone());
            prop_assert!(r.terms().all(|(e, _)| e[0] < 2));
        }

        #[test]
        fn relation_multiples_reduce_to_zero(f in arb_poly(3)) {
            let r = MultiPoly::sphere_relation(3);
            prop_assert!(f.mul(&r).reduce_mod_sphere().is_empty());
        }

        #[test]
        fn reduction_preserves_values_on_sphere(
            f in arb_poly(3),
            raw in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 100),
        ) {
            let r = f.reduce_mod_sphere();
            prop_assert_eq!(r.reduce_mod_sphere(), r.clone());
            for pt in raw.iter().filter_map(|x| unit_point(x)) {
                let a = f.eval_f64(&pt).unwrap();
                let b = r.eval_f64(&pt).unwrap();
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs())), "{} vs {}", a, b);
            }
        }
    }
}
