//! Spectral invariance over the unit normal sphere.
//!
//! For a unit normal `ξ = Σ t_α e_α` the shape operator is `A(t) = Σ t_α A_α`.
//! The symbolic sweep computes `det(λI − A(t))` with polynomial entries and
//! reduces every λ-coefficient modulo `Σ t_α² = 1`; the characteristic
//! polynomial is the same for every unit normal iff all reductions are
//! constants. The numeric sweep samples the sphere and is only a cross-check.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::catalog::ShapeOperatorSet;
use crate::exactnum::QuadExt;
use crate::linalg::{Matrix, UniPoly};
use crate::polyring::MultiPoly;

#[derive(Debug, Clone, PartialEq)]
pub enum SweepVerdict {
    /// Every unit normal has this characteristic polynomial.
    Constant(UniPoly<QuadExt>),
    /// The coefficient of `λ^power` is not constant on the sphere; `reduced`
    /// is its remainder modulo the sphere relation.
    NonConstant { power: usize, reduced: MultiPoly },
}

impl SweepVerdict {
    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }

    pub fn char_poly(&self) -> Option<&UniPoly<QuadExt>> {
        match self {
            Self::Constant(p) => Some(p),
            Self::NonConstant { .. } => None,
        }
    }
}

/// `A(t) = Σ_α t_α A_α` with entries in `Q(√3)[t_1..t_p]`.
pub fn generic_shape_operator(data: &ShapeOperatorSet) -> Matrix<MultiPoly> {
    let p = data.p();
    let n = data.n();
    let mut acc = Matrix::filled(n, n, &MultiPoly::zero(p));
    for (alpha, op) in data.operators().iter().enumerate() {
        let t = MultiPoly::var(p, alpha);
        let term = op.map(|x| t.scale(x));
        acc = acc.add(&term).expect("equal shapes");
    }
    acc
}

/// λ-coefficients of `det(λI − A(t))`, lowest degree first, unreduced.
pub fn symbolic_coefficients(data: &ShapeOperatorSet) -> Vec<MultiPoly> {
    let cp = generic_shape_operator(data)
        .char_poly()
        .expect("square operator");
    cp.coeffs().to_vec()
}

pub fn symbolic_sweep(data: &ShapeOperatorSet) -> SweepVerdict {
    let mut constants = Vec::new();
    for (power, coeff) in symbolic_coefficients(data).iter().enumerate() {
        let reduced = coeff.reduce_mod_sphere();
        match reduced.as_constant() {
            Some(c) => constants.push(c),
            None => return SweepVerdict::NonConstant { power, reduced },
        }
    }
    SweepVerdict::Constant(UniPoly::new(constants))
}

/// Deterministic unit normals for a seed.
///
/// * `p = 1`: alternately `+1` and `−1`.
/// * `p = 2`: equispaced angles, all shifted by one seeded jitter.
/// * `p ≥ 3`: normalized Gaussian triples from a seeded ChaCha stream.
pub fn sample_unit_normals(p: usize, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match p {
        0 => vec![Vec::new(); samples],
        1 => (0..samples)
            .map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }])
            .collect(),
        2 => {
            let step = TAU / samples as f64;
            let jitter = rng.random::<f64>() * step;
            (0..samples)
                .map(|i| {
                    let theta = i as f64 * step + jitter;
                    vec![theta.cos(), theta.sin()]
                })
                .collect()
        }
        _ => (0..samples)
            .map(|_| loop {
                let v: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    break v.into_iter().map(|x| x / norm).collect();
                }
            })
            .collect(),
    }
}

/// Maximum absolute deviation of any λ-coefficient from its value at the
/// first sample.
pub fn numeric_sweep(data: &ShapeOperatorSet, samples: usize, seed: u64) -> f64 {
    assert!(samples >= 1, "at least one sample is required");
    let coeffs = symbolic_coefficients(data);
    let points = sample_unit_normals(data.p(), samples, seed);
    let eval = |pt: &[f64]| -> Vec<f64> {
        coeffs
            .iter()
            .map(|c| c.eval_f64(pt).expect("point dimension"))
            .collect()
    };
    let reference = eval(&points[0]);
    points[1..]
        .iter()
        .flat_map(|pt| {
            eval(pt)
                .into_iter()
                .zip(&reference)
                .map(|(v, r)| (v - r).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}
