use nalgebra::DMatrix;
use num_complex::Complex64;
use passive_lsm::inversion::{indicator_map, morozov_alpha, probe, rhs_vector, svd, tikhonov_gnorm, GridSpec, RhsMode};
use passive_lsm::linalg::CMatrix;
use passive_lsm::specfun::{hankel1, WaveContext};
use passive_lsm::Point;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn random_matrix(n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

#[test]
fn singular_values_match_hermitian_eigenvalues() {
    for seed in 0..5 {
        let a = random_matrix(8, seed);
        let s = svd(&a).unwrap().singular_values;
        let ata = a.adjoint().matmul(&a).unwrap();
        let h = DMatrix::from_fn(8, 8, |i, j| {
            let z = ata[(i, j)];
            nalgebra::Complex::new(z.re, z.im)
        });
        let mut eig: Vec<f64> = h.symmetric_eigenvalues().iter().map(|e| e.max(0.0).sqrt()).collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        for (x, y) in s.iter().zip(&eig) {
            assert!((x - y).abs() < 1e-8, "{s:?} vs {eig:?}");
        }
    }
}

#[test]
fn rhs_entries_are_hankel_magnitudes() {
    let ctx = WaveContext::new(TAU).unwrap();
    let recv: Vec<Point> = (0..10).map(|j| Point::from_polar(5.0, TAU * j as f64 / 10.0)).collect();
    let z = Point::new(1.0, -0.5);
    for (p, x) in rhs_vector(&recv, z, &ctx).unwrap().iter().zip(&recv) {
        let h = hankel1(0, ctx.k() * x.dist(z)).unwrap();
        assert!((p.norm() - 0.25 * h.norm()).abs() < 1e-15);
        assert_eq!(*p, ctx.green(*x, z).unwrap());
    }
}

fn spectrum() -> impl Strategy<Value = (Vec<f64>, Vec<(f64, f64)>)> {
    (2usize..12).prop_flat_map(|n| {
        (prop::collection::vec(1e-6f64..10.0, n), prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n))
    })
}

proptest! {
    #[test]
    fn filter_is_monotone_in_alpha((s, b) in spectrum(), a1 in 1e-6f64..1e2, factor in 1.01f64..100.0) {
        let b: Vec<Complex64> = b.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
        prop_assume!(b.iter().all(|z| z.norm() > 1e-3));
        let (g1, r1) = tikhonov_gnorm(&s, &b, a1).unwrap();
        let (g2, r2) = tikhonov_gnorm(&s, &b, a1 * factor).unwrap();
        prop_assert!(g2 < g1);
        prop_assert!(r2 > r1);
    }

    #[test]
    fn discrepancy_root_balances_residual((s, b) in spectrum(), rel_delta in 1e-4f64..0.5) {
        let b: Vec<Complex64> = b.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
        prop_assume!(b.iter().any(|z| z.norm() > 1e-3));
        let delta = rel_delta * s.iter().cloned().fold(0.0, f64::max);
        let alpha = morozov_alpha(&s, &b, delta).unwrap();
        let (g, r) = tikhonov_gnorm(&s, &b, alpha).unwrap();
        prop_assert!((r * r - delta * delta * g * g).abs() <= 1e-6 * delta * delta * g * g);
    }

    #[test]
    fn single_value_root_scales(s in 1e-3f64..1e3, d in 1e-4f64..1.0, c in 0.1f64..10.0) {
        let b = [Complex64::new(1.0, 0.0)];
        let a = morozov_alpha(&[s], &b, d).unwrap();
        let scaled = morozov_alpha(&[c * s], &b, c * d).unwrap();
        prop_assert!((a - d * s).abs() <= 1e-12 * d * s);
        prop_assert!((scaled - c * c * a).abs() <= 1e-11 * c * c * a);
    }
}

#[test]
fn small_noise_gives_small_alpha() {
    let s = [2.0, 1.0, 0.5];
    let b = [Complex64::new(1.0, 0.0); 3];
    let alphas: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|&d| morozov_alpha(&s, &b, d).unwrap()).collect();
    assert!(alphas[0] > alphas[1] && alphas[1] > alphas[2] && alphas[2] < 1e-5);
}

#[test]
fn probe_agrees_with_direct_tikhonov_solve() {
    let ctx = WaveContext::new(TAU).unwrap();
    let recv: Vec<Point> = (0..16).map(|j| Point::from_polar(5.0, TAU * j as f64 / 16.0)).collect();
    let a = random_matrix(16, 4);
    let f = svd(&a).unwrap();
    let z = Point::new(0.7, 1.1);
    let p = probe(&f, &recv, &ctx, z, 0.05, RhsMode::Green).unwrap();
    // (A*A + αI) g = A* φ solved by LU, independent of the SVD.
    let phi = rhs_vector(&recv, z, &ctx).unwrap();
    let ah = a.adjoint();
    let normal = ah.matmul(&a).unwrap().add(&CMatrix::identity(16).scale(Complex64::new(p.alpha, 0.0))).unwrap();
    let g = passive_lsm::linalg::LuFactors::new(&normal).unwrap().solve(&ah.matvec(&phi).unwrap());
    let gn = passive_lsm::linalg::vec_norm(&g);
    assert!((gn - p.g_norm).abs() < 1e-9 * gn);
}

#[test]
fn mixed_rhs_with_unit_plain_part_equals_green() {
    let ctx = WaveContext::new(TAU).unwrap();
    let recv: Vec<Point> = (0..8).map(|j| Point::from_polar(5.0, TAU * j as f64 / 8.0)).collect();
    let a = random_matrix(8, 1);
    let grid = GridSpec::square(2.0, 4);
    let plain = indicator_map(&a, &recv, &ctx, 0.01, &grid, 5.0, RhsMode::Green).unwrap();
    let mixed = indicator_map(
        &a,
        &recv,
        &ctx,
        0.01,
        &grid,
        5.0,
        RhsMode::Mixed { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) },
    )
    .unwrap();
    assert_eq!(plain.values, mixed.values);
}
