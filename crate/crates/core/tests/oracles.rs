//! Float and hand-expansion oracles for the exact pipeline.

use nalgebra::DMatrix;

use willmore_cert::catalog::builtin;
use willmore_cert::curvature::{ricci, riemann};
use willmore_cert::sweep::{symbolic_coefficients, symbolic_sweep};
use willmore_cert::{parse_scalar, QuadExt, ShapeOperatorSet};

fn float_matrix(data: &ShapeOperatorSet, t: &[f64]) -> DMatrix<f64> {
    let n = data.n();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (op, ta) in data.operators().iter().zip(t) {
        a += DMatrix::from_row_slice(n, n, &op.to_f64_vec()) * *ta;
    }
    a
}

fn sorted_eigenvalues(a: DMatrix<f64>) -> Vec<f64> {
    let mut eig: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

#[test]
fn single_operator_spectrum_matches_eigensolver() {
    let data = builtin("g6_m1_M2").unwrap();
    let eig = sorted_eigenvalues(float_matrix(&data, &[0.0, 1.0]));
    let s3 = 3f64.sqrt();
    let expected = [-s3, -1.0 / s3, 0.0, 1.0 / s3, s3];
    for (x, y) in eig.iter().zip(expected) {
        assert!((x - y).abs() < 1e-12, "{eig:?}");
    }
    // Same roots from the exact characteristic polynomial.
    let cp = data.operators()[1].char_poly().unwrap();
    for y in expected {
        assert!(cp.eval_f64(y).abs() < 1e-12);
    }
}

/// e2 of the eigenvalues is the λ^{n-2} coefficient of det(λI − A).
#[test]
fn cubic_coefficient_is_constant_on_the_circle() {
    let data = builtin("g6_m1_M1").unwrap();
    let exact = symbolic_sweep(&data)
        .char_poly()
        .unwrap()
        .coeff(3)
        .unwrap()
        .clone();
    assert_eq!(exact, parse_scalar("-10/3").unwrap());
    for k in 0..100 {
        let theta = k as f64 * std::f64::consts::TAU / 100.0 + 0.1;
        let eig = sorted_eigenvalues(float_matrix(&data, &[theta.cos(), theta.sin()]));
        let mut e2 = 0.0;
        for i in 0..eig.len() {
            for j in i + 1..eig.len() {
                e2 += eig[i] * eig[j];
            }
        }
        assert!((e2 - exact.to_f64()).abs() < 1e-12, "theta={theta}: {e2}");
    }
}

/// Squares the quintic by hand with integer ninths.
#[test]
fn m2_polynomial_is_square_of_m1_polynomial() {
    // 9·(l^5 − 10/3 l^3 + l), lowest degree first.
    let quintic: [i64; 6] = [0, 9, 0, -30, 0, 9];
    let mut square = [0i64; 11];
    for (i, a) in quintic.iter().enumerate() {
        for (j, b) in quintic.iter().enumerate() {
            square[i + j] += a * b;
        }
    }
    let expected: Vec<QuadExt> = square.iter().map(|&c| QuadExt::frac(c, 81)).collect();
    for name in ["g6_m2_M1", "g6_m2_M2"] {
        let cp = symbolic_sweep(&builtin(name).unwrap());
        assert_eq!(
            cp.char_poly().unwrap().coeffs(),
            expected.as_slice(),
            "{name}"
        );
    }
}

#[test]
fn unreduced_coefficients_agree_with_eigenvalues_off_the_sphere() {
    // Off the sphere the coefficients scale homogeneously: e_k(rA) = r^k e_k(A).
    let data = builtin("g6_m2_M1").unwrap();
    let coeffs = symbolic_coefficients(&data);
    let t = [0.6, -1.1, 0.9];
    let eig = sorted_eigenvalues(float_matrix(&data, &t));
    let trace_sq: f64 = eig.iter().map(|x| x * x).sum();
    // λ^{n-2} coefficient equals e2 = −Σλ²/2 for traceless A.
    let c = coeffs[data.n() - 2].eval_f64(&t).unwrap();
    assert!(
        (c + trace_sq / 2.0).abs() < 1e-9,
        "{c} vs {}",
        -trace_sq / 2.0
    );
}

#[test]
fn riemann_by_direct_substitution() {
    let data = builtin("g6_m1_M1").unwrap();
    assert_eq!(riemann(&data, 0, 1, 0, 1).unwrap(), QuadExt::from_int(2));
    // Sectional sums reproduce the Ricci diagonal.
    let ric = ricci(&data).unwrap().matrix;
    for i in 0..data.n() {
        let mut acc = QuadExt::zero();
        for k in 0..data.n() {
            acc += &riemann(&data, i, k, i, k).unwrap();
        }
        assert_eq!(&acc, ric.get(i, i));
    }
}
