//! Built-in oracle and property checks with a machine-readable report.

use crate::acquisition::{covariance_matrix, cross_correlation_matrix, imaginary_near_field_matrix, near_field_matrix};
use crate::error::{Error, Result};
use crate::forward::{mie_scattered_circle, Medium, SingleLayerSystem};
use crate::geometry::{
    circle_points, place_scatterer, uniform_random_points, BoundaryCurve, CurveKind, PointRole, PointSetSpec,
};
use crate::inversion::{morozov_alpha, svd};
use crate::linalg::{vec_norm, CMatrix};
use crate::point::Point;
use crate::specfun::{bessel_jy_orders, WaveContext};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

pub const SUITES: &[&str] =
    &["specfun", "forward", "hk", "bridge", "beta", "quadrature", "morozov", "covariance", "all"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: Vec<f64>,
    pub threshold: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn check(name: &str, measured: Vec<f64>, threshold: &str, passed: bool) -> Check {
    Check { name: name.into(), measured, threshold: threshold.into(), passed }
}

/// Failures inside a check become failed entries rather than errors.
fn guarded(name: &str, f: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    f().unwrap_or_else(|e| vec![check(name, Vec::new(), &format!("error: {e}"), false)])
}

/// Runs the named suite (see [`SUITES`]).
pub fn validate(suite: &str) -> Result<ValidationReport> {
    let mut checks = Vec::new();
    let all = suite == "all";
    if !SUITES.contains(&suite) {
        return Err(Error::Config(format!("unknown suite {suite:?}; known: {}", SUITES.join(", "))));
    }
    if all || suite == "specfun" {
        checks.extend(guarded("wronskian", specfun_checks));
    }
    if all || suite == "forward" {
        checks.extend(guarded("mie", forward_checks));
    }
    if all || suite == "hk" {
        checks.extend(guarded("hk", hk_checks));
    }
    if all || suite == "bridge" {
        checks.extend(guarded("bridge", bridge_checks));
    }
    if all || suite == "beta" {
        checks.extend(guarded("beta", beta_checks));
    }
    if all || suite == "quadrature" {
        checks.extend(guarded("quadrature", quadrature_checks));
    }
    if all || suite == "morozov" {
        checks.extend(guarded("morozov", morozov_checks));
    }
    if all || suite == "covariance" {
        checks.extend(guarded("covariance", covariance_checks));
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport { suite: suite.into(), passed, checks })
}

fn specfun_checks() -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    for x in [0.1, 1.0, 10.0, 100.0] {
        let (j, y) = bessel_jy_orders(41, x)?;
        let exact = 2.0 / (PI * x);
        for n in 0..=40 {
            worst = worst.max(((j[n + 1] * y[n] - j[n] * y[n + 1]) - exact).abs() / exact);
        }
    }
    Ok(vec![check("wronskian relative residual, n <= 40", vec![worst], "< 1e-10", worst < 1e-10)])
}

/// Max relative Nyström error against the circle series, radius λ/4,
/// source at 5λ, 64 receivers at 5λ.
pub fn mie_error(nodes: usize) -> Result<f64> {
    let ctx = WaveContext::new(TAU)?;
    let a = 0.25;
    let y = Point::new(5.0, 0.0);
    let sys =
        SingleLayerSystem::assemble(vec![BoundaryCurve::new(CurveKind::Circle { radius: a }).discretize(nodes)?], ctx)?;
    let sol = sys.solve_point_source(y)?;
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..64 {
        let x = Point::from_polar(5.0, TAU * (i as f64 + 0.5) / 64.0);
        let exact = mie_scattered_circle(&ctx, a, Point::ORIGIN, x, y)?;
        err = err.max((sol.evaluate_scattered(x)? - exact).norm());
        scale = scale.max(exact.norm());
    }
    Ok(err / scale)
}

fn forward_checks() -> Result<Vec<Check>> {
    let e64 = mie_error(64)?;
    let e128 = mie_error(128)?;
    let e256 = mie_error(256)?;
    Ok(vec![
        check("circle vs series, 256 nodes", vec![e256], "< 1e-6", e256 < 1e-6),
        check("error ratio 64 -> 128 nodes", vec![e64, e128, e64 / e128], "> 10", e64 / e128 > 10.0),
    ])
}

/// Worst relative defect of the Helmholtz–Kirchhoff identity over pairs of
/// `points`, with `count` equispaced sources on a circle of radius `radius`.
pub fn hk_error(medium: &Medium, points: &[Point], radius: f64, count: usize) -> Result<f64> {
    let k = medium.ctx().k();
    let zs: Vec<Point> = (0..count).map(|i| Point::from_polar(radius, TAU * i as f64 / count as f64)).collect();
    let u = medium.total_block(points, &zs)?;
    let w = TAU * radius / count as f64;
    let mut worst: f64 = 0.0;
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i == j {
                continue;
            }
            let q: Complex64 = (0..count).map(|l| u[(i, l)].conj() * u[(j, l)]).sum::<Complex64>() * w;
            let direct = medium.total_block(&[points[i]], &[points[j]])?[(0, 0)];
            let lhs = direct - direct.conj();
            worst = worst.max((lhs - Complex64::new(0.0, 2.0 * k) * q).norm() / lhs.norm());
        }
    }
    Ok(worst)
}

pub fn hk_points() -> Vec<Point> {
    vec![
        Point::new(4.0, -1.0),
        Point::new(-1.0, 3.5),
        Point::new(0.5, 0.2),
        Point::new(-4.5, 1.0),
        Point::new(1.0, -4.0),
    ]
}

/// Ellipse and kite of the full-aperture experiments in one medium.
pub fn two_scatterer_medium(ctx: WaveContext, nodes: usize) -> Result<Medium> {
    let e = place_scatterer(CurveKind::Ellipse { a: 1.5, b: 1.0 }, Point::new(-2.0, -2.0), 0.5)?;
    let k = place_scatterer(CurveKind::Kite, Point::new(2.0, 2.0), 0.5)?;
    Ok(Medium::Obstacles(SingleLayerSystem::assemble(vec![e.discretize(nodes)?, k.discretize(nodes)?], ctx)?))
}

fn hk_checks() -> Result<Vec<Check>> {
    let ctx = WaveContext::new(TAU)?;
    let mut out = Vec::new();
    for (label, medium) in [("free space", Medium::Free(ctx)), ("total field", two_scatterer_medium(ctx, 256)?)] {
        let errs =
            [25.0, 50.0, 100.0].iter().map(|&r| hk_error(&medium, &hk_points(), r, 512)).collect::<Result<Vec<_>>>()?;
        let monotone = errs[0] > errs[1] && errs[1] > errs[2];
        out.push(check(
            &format!("HK {label}, radii 25/50/100"),
            errs.clone(),
            "< 1e-2 at 100, strictly decreasing",
            errs[2] < 1e-2 && monotone,
        ));
    }
    Ok(out)
}

pub fn kite_medium(ctx: WaveContext) -> Result<Medium> {
    let kite = place_scatterer(CurveKind::Kite, Point::new(2.0, 2.0), 0.5)?;
    Ok(Medium::Obstacles(SingleLayerSystem::assemble(vec![kite.discretize(256)?], ctx)?))
}

fn relative(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    Ok(a.sub(b)?.frobenius_norm() / b.frobenius_norm())
}

fn bridge_checks() -> Result<Vec<Check>> {
    let ctx = WaveContext::new(TAU)?;
    let medium = kite_medium(ctx)?;
    let recv = circle_points(&PointSetSpec::full_circle(PointRole::Receiver, 5.0, 80))?;
    let src = circle_points(&PointSetSpec::full_circle(PointRole::DeterministicSource, 50.0, 80))?;
    let i = imaginary_near_field_matrix(&near_field_matrix(&recv, &medium)?)?;
    let c = cross_correlation_matrix(&recv, &src, &medium)?;
    let err = relative(&c.entries, &i.entries)?;
    Ok(vec![check("||C - I|| / ||I||, kite, beta = 0, L = 80", vec![err], "< 0.05", err < 0.05)])
}

/// Mean `‖C − I‖/‖I‖` over `seeds` jittered source layouts.
pub fn mean_bridge_error(medium: &Medium, beta: f64, count: usize, seeds: u64) -> Result<f64> {
    let recv = circle_points(&PointSetSpec::full_circle(PointRole::Receiver, 5.0, 80))?;
    let i = imaginary_near_field_matrix(&near_field_matrix(&recv, medium)?)?;
    let mut total = 0.0;
    for s in 0..seeds {
        let src = circle_points(&PointSetSpec::full_circle(PointRole::RandomSource, 50.0, count).with_beta(beta, s))?;
        total += relative(&cross_correlation_matrix(&recv, &src, medium)?.entries, &i.entries)?;
    }
    Ok(total / seeds as f64)
}

fn beta_checks() -> Result<Vec<Check>> {
    let medium = kite_medium(WaveContext::new(TAU)?)?;
    let m: Vec<f64> = [0.3, 0.6, 0.9].iter().map(|&b| mean_bridge_error(&medium, b, 80, 10)).collect::<Result<_>>()?;
    let l200 = mean_bridge_error(&medium, 0.9, 200, 10)?;
    Ok(vec![
        check("mean error, beta 0.3/0.6/0.9, L = 80", m.clone(), "strictly increasing", m[0] < m[1] && m[1] < m[2]),
        check("beta 0.9 with L = 200 vs beta 0.3 with L = 80", vec![l200, m[0]], "first < second", l200 < m[0]),
    ])
}

fn quadrature_checks() -> Result<Vec<Check>> {
    let medium = kite_medium(WaveContext::new(TAU)?)?;
    let recv = circle_points(&PointSetSpec::full_circle(PointRole::Receiver, 5.0, 80))?;
    let i = imaginary_near_field_matrix(&near_field_matrix(&recv, &medium)?)?;
    let counts = [40usize, 160, 640];
    let mut errs = Vec::new();
    for &l in &counts {
        let mut total = 0.0;
        for s in 0..10 {
            let src = uniform_random_points(PointRole::RandomSource, 50.0, l, s)?;
            total += relative(&cross_correlation_matrix(&recv, &src, &medium)?.entries, &i.entries)?;
        }
        errs.push(total / 10.0);
    }
    let slope = log_log_slope(&counts.map(|c| c as f64), &errs);
    let mut measured = errs;
    measured.push(slope);
    Ok(vec![check(
        "log-log slope of ||C - I|| vs L (40, 160, 640)",
        measured,
        "-0.5 +- 0.15",
        (slope + 0.5).abs() <= 0.15,
    )])
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

fn morozov_checks() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..24);
        let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let phi: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let f = svd(&a)?;
        let delta = f.largest() * 10f64.powf(rng.random_range(-4.0..-1.0));
        let b = f.project(&phi);
        let alpha = morozov_alpha(&f.singular_values, &b, delta)?;
        // g = V S_α b, then the residual directly from A.
        let filtered: Vec<Complex64> =
            b.iter().zip(&f.singular_values).map(|(bj, &s)| bj * (s / (alpha + s * s))).collect();
        let g = f.v.matvec(&filtered)?;
        let ag = a.matvec(&g)?;
        let r: Vec<Complex64> = ag.iter().zip(&phi).map(|(x, y)| x - y).collect();
        let (res, gn) = (vec_norm(&r), vec_norm(&g));
        worst = worst.max((res * res - delta * delta * gn * gn).abs() / (delta * delta * gn * gn));
    }
    Ok(vec![check("Morozov identity, 100 random instances", vec![worst], "< 1e-6", worst < 1e-6)])
}

fn covariance_checks() -> Result<Vec<Check>> {
    let medium = kite_medium(WaveContext::new(TAU)?)?;
    let recv = circle_points(&PointSetSpec::full_circle(PointRole::Receiver, 5.0, 80))?;
    let src = circle_points(&PointSetSpec::full_circle(PointRole::DeterministicSource, 50.0, 80))?;
    let limit = cross_correlation_matrix(&recv, &src, &medium)?;
    let mut errs = Vec::new();
    for m in [200, 800] {
        let mut total = 0.0;
        for s in 0..10 {
            total += relative(&covariance_matrix(&recv, &src, m, s, &medium)?.entries, &limit.entries)?;
        }
        errs.push(total / 10.0);
    }
    let ratio = errs[0] / errs[1];
    Ok(vec![check(
        "covariance error vs limit, M = 200 and 800 (ratio ideal 2)",
        vec![errs[0], errs[1], ratio],
        "decreasing, ratio within [1, 4]",
        errs[1] < errs[0] && (1.0..=4.0).contains(&ratio),
    )])
}
