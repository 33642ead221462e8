use num_complex::Complex64;
use passive_lsm::acquisition::{
    add_noise, covariance_matrix, cross_correlation_matrix, imaginary_near_field_matrix, near_field_matrix,
    noise_matrix, FieldMatrix,
};
use passive_lsm::forward::{Medium, SingleLayerSystem};
use passive_lsm::geometry::{circle_points, place_scatterer, BoundaryCurve, CurveKind, PointRole, PointSetSpec};
use passive_lsm::linalg::CMatrix;
use passive_lsm::specfun::WaveContext;
use passive_lsm::Point;
use std::f64::consts::TAU;

fn ctx() -> WaveContext {
    WaveContext::new(TAU).unwrap()
}

fn kite_medium() -> Medium {
    let kite = place_scatterer(CurveKind::Kite, Point::new(2.0, 2.0), 0.5).unwrap();
    Medium::Obstacles(SingleLayerSystem::assemble(vec![kite.discretize(256).unwrap()], ctx()).unwrap())
}

fn ring(role: PointRole, radius: f64, n: usize) -> passive_lsm::geometry::PointSet {
    circle_points(&PointSetSpec::full_circle(role, radius, n)).unwrap()
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm()
}

#[test]
fn near_field_is_symmetric_and_imaginary_part_skew() {
    let medium = kite_medium();
    let n = near_field_matrix(&ring(PointRole::Receiver, 5.0, 40), &medium).unwrap();
    assert!(rel(&n.entries.transpose(), &n.entries) < 1e-6);
    let i = imaginary_near_field_matrix(&n).unwrap();
    assert!(i.entries.add(&i.entries.conj()).unwrap().max_abs() == 0.0);
    assert!(i.entries.add(&i.entries.adjoint()).unwrap().frobenius_norm() < 1e-6 * i.entries.frobenius_norm());
    assert!(i.entries.frobenius_norm() <= 2.0 * n.entries.frobenius_norm());
    for (a, b) in i.entries.as_slice().iter().zip(n.entries.as_slice()) {
        assert_eq!(*a, Complex64::new(0.0, 2.0 * b.im));
    }
}

#[test]
fn near_field_matches_series_for_a_circle() {
    let ctx = ctx();
    let medium = Medium::Obstacles(
        SingleLayerSystem::assemble(
            vec![BoundaryCurve::new(CurveKind::Circle { radius: 0.5 }).discretize(128).unwrap()],
            ctx,
        )
        .unwrap(),
    );
    let recv = ring(PointRole::Receiver, 5.0, 12);
    let n = near_field_matrix(&recv, &medium).unwrap();
    for j in 0..12 {
        for m in 0..12 {
            let exact =
                passive_lsm::forward::mie_scattered_circle(&ctx, 0.5, Point::ORIGIN, recv.points[j], recv.points[m])
                    .unwrap();
            assert!((n.entries[(j, m)] - exact).norm() < 1e-10);
        }
    }
}

#[test]
fn cross_correlation_without_scatterer_nearly_vanishes() {
    let recv = ring(PointRole::Receiver, 5.0, 20);
    let src = ring(PointRole::DeterministicSource, 50.0, 400);
    let c = cross_correlation_matrix(&recv, &src, &Medium::Free(ctx())).unwrap();
    // HK quadrature defect at radius 50 is a few 1e-3 of the bracket (≈ 1/2).
    assert!(c.entries.max_abs() < 5e-3, "{}", c.entries.max_abs());
}

#[test]
fn cross_correlation_is_nearly_skew_hermitian() {
    let medium = kite_medium();
    let recv = ring(PointRole::Receiver, 5.0, 40);
    let src = ring(PointRole::DeterministicSource, 50.0, 80);
    let c = cross_correlation_matrix(&recv, &src, &medium).unwrap();
    assert!(c.entries.add(&c.entries.adjoint()).unwrap().frobenius_norm() < 0.05 * c.entries.frobenius_norm());
}

fn power_iteration_norm(e: &CMatrix) -> f64 {
    let n = e.cols();
    let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + i as f64 * 0.01, 0.3)).collect();
    let mut sigma = 0.0;
    for _ in 0..20_000 {
        let w = e.adjoint().matvec(&e.matvec(&v).unwrap()).unwrap();
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let next = norm.sqrt() / v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().sqrt();
        v = w.iter().map(|z| z / norm).collect();
        if (next - sigma).abs() < 1e-15 * next {
            return next;
        }
        sigma = next;
    }
    sigma
}

fn unit_matrix(n: usize) -> FieldMatrix {
    let mut m = near_field_matrix(&ring(PointRole::Receiver, 5.0, n), &Medium::Free(ctx())).unwrap();
    m.entries = CMatrix::from_fn(n, n, |i, j| Complex64::new((i + 2 * j) as f64 % 3.0 - 1.0, 0.5));
    m
}

#[test]
fn delta_is_the_spectral_norm_of_the_noise() {
    let m = unit_matrix(10);
    let noisy = add_noise(&m, 0.05, 17).unwrap();
    let e = noisy.entries.sub(&m.entries).unwrap();
    let oracle = power_iteration_norm(&e);
    assert!((noisy.delta() - oracle).abs() < 1e-10 * oracle, "{} vs {oracle}", noisy.delta());
    let direct = noise_matrix(&m.entries, 0.05, 17).unwrap();
    assert!(e.sub(&direct).unwrap().max_abs() < 1e-15);
}

#[test]
fn noise_energy_matches_its_variance() {
    // E‖E‖_F² = amp² max|A|² J²; the sum of 2J² squared normals has relative
    // standard deviation 1/J, so the 50-seed mean sits within 3σ/√50.
    let j = 16;
    let m = unit_matrix(j);
    let amp = 0.05;
    let expected = (amp * m.entries.max_abs()).powi(2) * (j * j) as f64;
    let seeds = 50;
    let mean: f64 = (0..seeds).map(|s| noise_matrix(&m.entries, amp, s).unwrap().frobenius_norm().powi(2)).sum::<f64>()
        / seeds as f64;
    let sigma = expected / j as f64 / (seeds as f64).sqrt();
    assert!((mean - expected).abs() < 3.0 * sigma, "{mean} vs {expected}");
}

#[test]
fn single_realization_is_rank_one() {
    let medium = kite_medium();
    let recv = ring(PointRole::Receiver, 5.0, 8);
    let src = ring(PointRole::DeterministicSource, 50.0, 40);
    let cov = covariance_matrix(&recv, &src, 1, 5, &medium).unwrap();
    // Undo the bracket: the statistical term 2ik 𝒰 𝒰* must have rank one.
    let bracket = CMatrix::from_fn(8, 8, |j, m| {
        let r = recv.points[j].dist(recv.points[m]);
        Complex64::new(0.0, 0.5 * passive_lsm::specfun::bessel_j(0, TAU * r.max(1e-300)).unwrap())
    });
    let term = cov.entries.add(&bracket).unwrap();
    let s = passive_lsm::inversion::svd(&term).unwrap().singular_values;
    assert!(s[1] < 1e-12 * s[0], "{s:?}");
}

/// Root-mean-square over seeds of the deviation from the first-setup limit,
/// relative to the statistical term, stays below 3/√M. For complex Gaussian
/// sources the mean square is tr(Γ)²/M ≤ J‖Γ‖²/M with J = 8.
#[test]
fn covariance_converges_to_cross_correlation() {
    let ctx = ctx();
    let medium = Medium::Obstacles(
        SingleLayerSystem::assemble(
            vec![BoundaryCurve::new(CurveKind::Circle { radius: 0.25 }).discretize(128).unwrap()],
            ctx,
        )
        .unwrap(),
    );
    let recv = ring(PointRole::Receiver, 1.0, 8);
    let src = ring(PointRole::DeterministicSource, 50.0, 80);
    let limit = cross_correlation_matrix(&recv, &src, &medium).unwrap();
    let bracket = CMatrix::from_fn(8, 8, |j, m| {
        let r = recv.points[j].dist(recv.points[m]);
        Complex64::new(0.0, 0.5 * passive_lsm::specfun::bessel_j(0, ctx.k() * r.max(1e-300)).unwrap())
    });
    let term = limit.entries.add(&bracket).unwrap().frobenius_norm();
    let m = 10_000;
    let seeds = 10;
    let ms: f64 = (0..seeds)
        .map(|s| {
            let cov = covariance_matrix(&recv, &src, m, s, &medium).unwrap();
            (cov.entries.sub(&limit.entries).unwrap().frobenius_norm() / term).powi(2)
        })
        .sum::<f64>()
        / seeds as f64;
    assert!(ms.sqrt() < 3.0 / (m as f64).sqrt(), "{}", ms.sqrt() * (m as f64).sqrt());
}
