mod common;

use blockpr::lifting::{
    forward_measure, lifted_conditioning, LiftedSolver, MeasurementGrid, Parametrization, SolverStrategy,
};
use blockpr::masks::{build_masks, MaskFamily, MaskKind};
use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn families(d: usize, delta: usize) -> Vec<MaskFamily> {
    vec![
        build_masks(MaskKind::UnitPair, d, delta).unwrap(),
        build_masks(MaskKind::exponential(delta), d, delta).unwrap(),
    ]
}

#[test]
fn isometric_kappa_matches_dense_svd() {
    for (d, delta) in [(6, 2), (7, 3), (12, 3), (16, 4)] {
        for masks in families(d, delta) {
            let fast = lifted_conditioning(&masks, Parametrization::Isometric).unwrap();
            let (lo, hi) = extreme_singular_values(singular_values(&dense_lifted(&masks, true)).into_iter());
            assert!(rel(fast.sigma_min, lo) < 1e-9, "d={d} delta={delta}");
            assert!(rel(fast.sigma_max, hi) < 1e-9);
            assert!(rel(fast.kappa, hi / lo) < 1e-9);
        }
    }
}

#[test]
fn d6_delta2_unit_pair_is_an_18_by_18_system() {
    let masks = build_masks(MaskKind::UnitPair, 6, 2).unwrap();
    let a = dense_lifted(&masks, true);
    assert_eq!((a.nrows(), a.ncols()), (18, 18));
    let solver = LiftedSolver::build(&masks, SolverStrategy::BlockCirculantFft).unwrap();
    let (lo, hi) = extreme_singular_values(singular_values(&a).into_iter());
    assert!(rel(solver.kappa(), hi / lo) < 1e-9);
}

#[test]
fn coefficient_kappa_matches_dense_svd() {
    for (d, delta) in [(5, 3), (9, 4), (16, 5)] {
        let masks = build_masks(MaskKind::UnitPair, d, delta).unwrap();
        let fast = lifted_conditioning(&masks, Parametrization::Coefficients).unwrap();
        let (lo, hi) = extreme_singular_values(singular_values(&dense_lifted(&masks, false)).into_iter());
        assert!(rel(fast.kappa, hi / lo) < 1e-9);
        let closed = LiftedSolver::build(&masks, SolverStrategy::UnitPairClosed).unwrap();
        assert!(rel(closed.kappa(), hi / lo) < 1e-9);
    }
}

#[test]
fn elementary_kappa_matches_dense_complex_svd() {
    for (d, delta) in [(5, 2), (9, 3), (14, 4)] {
        for masks in families(d, delta) {
            let fast = lifted_conditioning(&masks, Parametrization::Elementary).unwrap();
            let m = dense_elementary(&masks);
            assert_eq!(m.nrows(), m.ncols());
            let (lo, hi) = extreme_singular_values(complex_singular_values(&m).into_iter());
            assert!(rel(fast.sigma_min, lo) < 1e-9, "d={d} delta={delta}");
            assert!(rel(fast.sigma_max, hi) < 1e-9);
        }
    }
}

#[test]
fn unit_pair_outer_products_form_a_basis() {
    for (d, delta) in [(3, 2), (8, 3), (11, 5), (20, 8)] {
        let masks = build_masks(MaskKind::UnitPair, d, delta).unwrap();
        let a = dense_lifted(&masks, true);
        let gram = a.transpose() * &a;
        let (lo, _) = extreme_singular_values(singular_values(&gram).into_iter());
        assert_eq!(a.nrows(), a.ncols());
        assert!(lo > 1e-6, "d={d} delta={delta}: smallest Gram eigenvalue {lo}");
    }
}

#[test]
fn closed_form_matches_dense_pseudoinverse_on_arbitrary_data() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for (d, delta) in [(5, 2), (8, 3), (16, 4), (32, 8)] {
        let masks = build_masks(MaskKind::UnitPair, d, delta).unwrap();
        let solver = LiftedSolver::build(&masks, SolverStrategy::UnitPairClosed).unwrap();
        let y: Vec<f64> = (0..d * masks.count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let grid = MeasurementGrid::new(d, delta, masks.count(), y.clone()).unwrap();
        let fast = solver.invert(&grid).unwrap().matrix;
        let slow = dense_pinv_invert(&masks, &y);
        let scale = slow.max_abs();
        assert!(max_abs_diff(&fast, &slow) <= 1e-9 * scale, "d={d} delta={delta}");
    }
}

#[test]
fn fft_solver_matches_dense_least_squares_for_extra_masks() {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let (d, delta) = (10, 3);
    let masks: Vec<Vec<Complex64>> = (0..7)
        .map(|_| {
            let mut m = vec![ZERO; d];
            for v in m.iter_mut().take(delta) {
                *v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            m
        })
        .collect();
    let masks = MaskFamily::custom(masks, delta, MaskKind::Custom).unwrap();
    let solver = LiftedSolver::build(&masks, SolverStrategy::BlockCirculantFft).unwrap();
    let y: Vec<f64> = (0..d * 7).map(|_| rng.random_range(0.0..2.0)).collect();
    let grid = MeasurementGrid::new(d, delta, 7, y.clone()).unwrap();
    let fast = solver.invert(&grid).unwrap().matrix;
    let slow = dense_pinv_invert(&masks, &y);
    assert!(max_abs_diff(&fast, &slow) <= 1e-9 * slow.max_abs());
}

#[test]
fn forward_map_agrees_with_definition() {
    let x = complex_gaussian_signal(9, 5);
    let masks = build_masks(MaskKind::exponential(3), 9, 3).unwrap();
    let e = x.entries();
    let outer = nalgebra::DMatrix::from_fn(9, 9, |i, j| e[i] * e[j].conj());
    let direct = apply_dense(&outer, &masks);
    for (a, b) in forward_measure(&x, &masks).unwrap().values().iter().zip(&direct) {
        assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
    }
}

/// The recovery premise `||X - X0||_F <= ||n|| / sigma_min <= kappa ||n||`.
#[test]
fn inversion_error_is_bounded_by_conditioning() {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    for (kind, strategy) in [
        (MaskKind::UnitPair, SolverStrategy::UnitPairClosed),
        (MaskKind::UnitPair, SolverStrategy::BlockCirculantFft),
        (MaskKind::exponential(4), SolverStrategy::BlockCirculantFft),
    ] {
        let (d, delta) = (24, 4);
        let masks = build_masks(kind, d, delta).unwrap();
        let solver = LiftedSolver::build(&masks, strategy).unwrap();
        let iso = lifted_conditioning(&masks, Parametrization::Isometric).unwrap();
        for t in 0..100 {
            let x = complex_gaussian_signal(d, 100 + t);
            let clean = forward_measure(&x, &masks).unwrap();
            let noise: Vec<f64> = (0..clean.total()).map(|_| rng.random_range(-0.1..0.1)).collect();
            let nn = noise.iter().map(|v| v * v).sum::<f64>().sqrt();
            let y: Vec<f64> = clean.values().iter().zip(&noise).map(|(a, b)| a + b).collect();
            let est = solver.invert(&clean.with_values(y).unwrap()).unwrap().matrix;
            let x0 = blockpr::banded::lifted_outer(&x, delta);
            let err = est.sub(&x0).unwrap().frobenius_norm();
            assert!(err <= nn / iso.sigma_min * (1.0 + 1e-9));
            if iso.sigma_max >= 1.0 {
                assert!(err <= iso.kappa * nn);
            }
        }
    }
}
