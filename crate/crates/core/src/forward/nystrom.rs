//! Single-layer Nyström solver for the exterior sound-soft problem.
//!
//! The scattered field is sought as a single-layer potential
//! `u^s(x) = ∫_∂D φ(x, y) ψ(y) ds(y)`; the Dirichlet condition
//! `φ(·, y₀) + u^s = 0` on `∂D` becomes a first-kind integral equation for the
//! density `ψ`. On each curve the logarithmic singularity of the kernel is
//! split off and integrated with the trigonometric product weights
//!
//! ```text
//! R_j = −(2π/m) Σ_{l=1}^{m−1} cos(l t_j)/l − (π/m²) cos(m t_j),   N = 2m nodes,
//! ```
//!
//! while the smooth remainder and all curve-to-curve interactions use the
//! trapezoid rule. Unknowns are the nodal charges `q_j = w_j ψ_j`
//! (`w_j` the arc-length weights), which makes the system matrix symmetric.

use crate::error::{Error, Result};
use crate::geometry::DiscretizedBoundary;
use crate::linalg::{CMatrix, LuFactors};
use crate::point::Point;
use crate::specfun::{green_at_distance, j0, WaveContext};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Condition estimates above this flag a (near) interior Dirichlet eigenvalue.
pub const RESONANCE_THRESHOLD: f64 = 1e10;
/// Evaluation points closer than this many node spacings use upsampling.
const NEAR_SPACINGS: f64 = 3.0;
const UPSAMPLE: usize = 4;
/// Sources and receivers must keep this clearance (in wavelengths).
const CLEARANCE: f64 = 1e-3;

/// Diagnostics raised while assembling or evaluating.
#[derive(Debug, Clone, PartialEq)]
pub enum ForwardWarning {
    /// `k²` is close to an interior Dirichlet eigenvalue.
    Resonance { condition_estimate: f64 },
    /// Upsampled near-boundary quadrature did not reach `1e-6`.
    NearBoundaryAccuracy { point: Point, estimated_error: f64 },
}

/// Assembled and factorised single-layer operator on one or more curves.
#[derive(Debug)]
pub struct SingleLayerSystem {
    ctx: WaveContext,
    boundaries: Vec<DiscretizedBoundary>,
    nodes: Vec<Point>,
    weights: Vec<f64>,
    matrix: CMatrix,
    lu: LuFactors,
    condition_estimate: f64,
    warnings: Vec<ForwardWarning>,
    /// Bounding discs `(center, radius)` per curve.
    bounds: Vec<(Point, f64)>,
}

impl SingleLayerSystem {
    /// Assembles the Nyström matrix for all `boundaries` and factorises it.
    pub fn assemble(boundaries: Vec<DiscretizedBoundary>, ctx: WaveContext) -> Result<Self> {
        for b in &boundaries {
            if b.len() < 32 || b.len() % 2 != 0 {
                return Err(Error::Geometry(format!("boundary needs an even node count >= 32, got {}", b.len())));
            }
        }
        let nodes: Vec<Point> = boundaries.iter().flat_map(|b| b.nodes.iter().copied()).collect();
        let weights: Vec<f64> = boundaries.iter().flat_map(|b| b.weights.iter().copied()).collect();
        let mut owner = Vec::with_capacity(nodes.len());
        let mut local = Vec::with_capacity(nodes.len());
        for (c, b) in boundaries.iter().enumerate() {
            for j in 0..b.len() {
                owner.push(c);
                local.push(j);
            }
        }
        let log_weights: Vec<Vec<f64>> = boundaries.iter().map(|b| log_weights(b.len())).collect();
        let k = ctx.k();
        let n = nodes.len();
        let rows: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if owner[i] != owner[j] {
                            return green_at_distance(k, nodes[i].dist(nodes[j]));
                        }
                        let b = &boundaries[owner[i]];
                        let (li, lj) = (local[i], local[j]);
                        let m = b.len();
                        let h = TAU / m as f64;
                        let rw = log_weights[owner[i]][(li + m - lj) % m];
                        if li == lj {
                            let k1 = -1.0 / (4.0 * PI);
                            let k2 = Complex64::new(-((0.5 * k * b.speeds[li]).ln() + EULER_GAMMA) / (2.0 * PI), 0.25);
                            k2 + rw * k1 / h
                        } else {
                            let r = nodes[i].dist(nodes[j]);
                            let k1 = -j0(k * r) / (4.0 * PI);
                            let dt = b.params[li] - b.params[lj];
                            let log_factor = (4.0 * (0.5 * dt).sin().powi(2)).ln();
                            green_at_distance(k, r) - k1 * log_factor + rw * k1 / h
                        }
                    })
                    .collect()
            })
            .collect();
        let data = rows.into_iter().flatten().collect();
        let matrix = CMatrix::from_row_major(n, n, data)?;
        let (lu, condition_estimate) = if n == 0 {
            (LuFactors::new(&matrix)?, 1.0)
        } else {
            let lu = LuFactors::new(&matrix)?;
            let cond = matrix.norm_one() * lu.inverse_norm_one_estimate();
            (lu, cond)
        };
        let mut warnings = Vec::new();
        if !(condition_estimate <= RESONANCE_THRESHOLD) {
            log::warn!(
                "single-layer system is near resonance (condition estimate {condition_estimate:.3e}); \
                 k^2 may be an interior Dirichlet eigenvalue"
            );
            warnings.push(ForwardWarning::Resonance { condition_estimate });
        }
        let bounds = boundaries
            .iter()
            .map(|b| {
                let c = b.curve.center;
                let r = b.nodes.iter().map(|p| p.dist(c)).fold(0.0, f64::max);
                (c, r)
            })
            .collect();
        Ok(Self { ctx, boundaries, nodes, weights, matrix, lu, condition_estimate, warnings, bounds })
    }

    /// A system without scatterers: every scattered field vanishes.
    pub fn empty(ctx: WaveContext) -> Result<Self> {
        Self::assemble(Vec::new(), ctx)
    }

    pub fn ctx(&self) -> &WaveContext {
        &self.ctx
    }

    pub fn boundaries(&self) -> &[DiscretizedBoundary] {
        &self.boundaries
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The symmetric Nyström matrix acting on nodal charges.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// 1-norm condition estimate of [`Self::matrix`].
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    pub fn warnings(&self) -> &[ForwardWarning] {
        &self.warnings
    }

    pub fn is_resonant(&self) -> bool {
        self.warnings.iter().any(|w| matches!(w, ForwardWarning::Resonance { .. }))
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Rejects points inside a scatterer or within `1e-3 λ` of a boundary.
    pub fn check_exterior(&self, p: Point) -> Result<()> {
        let clearance = CLEARANCE * self.ctx.wavelength();
        for (b, &(c, r)) in self.boundaries.iter().zip(&self.bounds) {
            if p.dist(c) > r + clearance {
                continue;
            }
            if b.curve.contains(p) {
                return Err(Error::Geometry(format!("point ({}, {}) lies inside a scatterer", p.x, p.y)));
            }
            if b.curve.distance(p) < clearance {
                return Err(Error::Geometry(format!("point ({}, {}) is within {clearance:e} of a boundary", p.x, p.y)));
            }
        }
        Ok(())
    }

    /// Boundary data `−φ(x_q, y)` for a point source at `y`.
    fn incident_rhs(&self, y: Point) -> Vec<Complex64> {
        let k = self.ctx.k();
        self.nodes.iter().map(|&p| -green_at_distance(k, p.dist(y))).collect()
    }

    /// Solves for the density generated by a point source at `y`.
    pub fn solve_point_source(&self, y: Point) -> Result<ScatterSolution<'_>> {
        self.check_exterior(y)?;
        let charges = self.lu.solve(&self.incident_rhs(y));
        Ok(ScatterSolution { system: self, source: y, charges, fine: OnceLock::new() })
    }

    /// Whether `x` is close enough to a boundary to need upsampled quadrature.
    fn is_near(&self, x: Point) -> bool {
        self.boundaries.iter().zip(&self.bounds).any(|(b, &(c, r))| {
            let limit = NEAR_SPACINGS * b.spacing();
            x.dist(c) <= r + limit && b.nodes.iter().any(|p| p.dist(x) < limit)
        })
    }

    /// Scattered fields `u^s(x_j, z_l)` for all receiver/source pairs, as a
    /// `receivers × sources` matrix.
    pub fn scattered_block(&self, receivers: &[Point], sources: &[Point]) -> Result<CMatrix> {
        if self.is_empty() {
            return Ok(CMatrix::zeros(receivers.len(), sources.len()));
        }
        for &p in receivers.iter().chain(sources) {
            self.check_exterior(p)?;
        }
        let k = self.ctx.k();
        let charges: Vec<Vec<Complex64>> = sources.par_iter().map(|&z| self.lu.solve(&self.incident_rhs(z))).collect();
        let near: Vec<bool> = receivers.iter().map(|&x| self.is_near(x)).collect();
        let rows: Vec<Vec<Complex64>> = receivers
            .par_iter()
            .zip(&near)
            .map(|(&x, &is_near)| {
                if is_near {
                    sources
                        .iter()
                        .zip(&charges)
                        .map(|(&z, q)| {
                            let sol =
                                ScatterSolution { system: self, source: z, charges: q.clone(), fine: OnceLock::new() };
                            sol.near_value(x).0
                        })
                        .collect()
                } else {
                    let kernel: Vec<Complex64> = self.nodes.iter().map(|&p| green_at_distance(k, p.dist(x))).collect();
                    charges.iter().map(|q| kernel.iter().zip(q).map(|(&a, &b)| a * b).sum()).collect()
                }
            })
            .collect();
        CMatrix::from_row_major(receivers.len(), sources.len(), rows.into_iter().flatten().collect())
    }

    /// Total fields `u(x_j, z_l) = φ(x_j, z_l) + u^s(x_j, z_l)`.
    pub fn total_block(&self, receivers: &[Point], sources: &[Point]) -> Result<CMatrix> {
        let mut block = self.scattered_block(receivers, sources)?;
        for (i, &x) in receivers.iter().enumerate() {
            for (j, &z) in sources.iter().enumerate() {
                block[(i, j)] += crate::specfun::green2d(&self.ctx, x, z)?;
            }
        }
        Ok(block)
    }

    /// `u(x, y) = φ(x, y) + u^s(x, y)`.
    pub fn total_field(&self, x: Point, y: Point) -> Result<Complex64> {
        let incident = crate::specfun::green2d(&self.ctx, x, y)?;
        if self.is_empty() {
            return Ok(incident);
        }
        Ok(incident + self.solve_point_source(y)?.evaluate_scattered(x)?)
    }
}

/// Density of the single-layer potential for one point source.
#[derive(Debug)]
pub struct ScatterSolution<'a> {
    system: &'a SingleLayerSystem,
    source: Point,
    charges: Vec<Complex64>,
    fine: OnceLock<[Vec<(Point, Complex64)>; 2]>,
}

impl<'a> ScatterSolution<'a> {
    pub fn source(&self) -> Point {
        self.source
    }

    pub fn ctx(&self) -> &WaveContext {
        self.system.ctx()
    }

    /// Nodal charges `w_j ψ_j`.
    pub fn charges(&self) -> &[Complex64] {
        &self.charges
    }

    /// Density values `ψ_j` at the boundary nodes.
    pub fn density(&self) -> Vec<Complex64> {
        self.charges.iter().zip(&self.system.weights).map(|(q, w)| q / w).collect()
    }

    /// Relative residual of the discrete boundary equation.
    pub fn boundary_residual(&self) -> Result<f64> {
        let rhs = self.system.incident_rhs(self.source);
        let lhs = self.system.matrix.matvec(&self.charges)?;
        let diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        let scale = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(diff.iter().map(|z| z.norm()).fold(0.0, f64::max) / scale)
    }

    /// Resolution estimate for the density: on each curve, the largest
    /// Fourier coefficient in the top eighth of the resolved band relative to
    /// the largest coefficient overall. For analytic curves this tracks the
    /// discretization error of the scattered field.
    pub fn spectral_tail(&self) -> f64 {
        let density = self.density();
        let mut offset = 0;
        let mut worst: f64 = 0.0;
        for b in &self.system.boundaries {
            let n = b.len();
            let coeffs = dft(&density[offset..offset + n]);
            offset += n;
            let band = (n / 2) as i64;
            let cutoff = band - (band / 8).max(1);
            let peak = coeffs.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
            let tail = coeffs.iter().filter(|(l, _)| l.abs() >= cutoff).map(|(_, c)| c.norm()).fold(0.0, f64::max);
            if peak > 0.0 {
                worst = worst.max(tail / peak);
            }
        }
        worst
    }

    /// `u^s(x) = Σ_q φ(x, x_q) w_q ψ_q`, with upsampled quadrature close to
    /// the boundary.
    pub fn evaluate_scattered(&self, x: Point) -> Result<Complex64> {
        Ok(self.evaluate_with_estimate(x)?.0)
    }

    /// Like [`Self::evaluate_scattered`], also returning an error estimate
    /// (zero away from the boundary) and a warning when it exceeds `1e-6`.
    pub fn evaluate_with_estimate(&self, x: Point) -> Result<(Complex64, f64, Option<ForwardWarning>)> {
        self.system.check_exterior(x)?;
        if self.system.is_near(x) {
            let (value, err) = self.near_value(x);
            let warning = (err > 1e-6).then(|| {
                log::warn!("near-boundary evaluation at ({}, {}) estimated error {err:.2e}", x.x, x.y);
                ForwardWarning::NearBoundaryAccuracy { point: x, estimated_error: err }
            });
            return Ok((value, err, warning));
        }
        let k = self.system.ctx.k();
        let value =
            self.system.nodes.iter().zip(&self.charges).map(|(&p, &q)| green_at_distance(k, p.dist(x)) * q).sum();
        Ok((value, 0.0, None))
    }

    /// Value on the `2·UPSAMPLE`-times refined quadrature, with the relative
    /// difference to the `UPSAMPLE`-times refinement as error estimate.
    fn near_value(&self, x: Point) -> (Complex64, f64) {
        let k = self.system.ctx.k();
        let [coarse, fine] = self.fine.get_or_init(|| [self.upsampled(UPSAMPLE), self.upsampled(2 * UPSAMPLE)]);
        let sum = |pts: &[(Point, Complex64)]| -> Complex64 {
            pts.iter()
                .map(|&(p, q)| {
                    let r = p.dist(x);
                    if r == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        green_at_distance(k, r) * q
                    }
                })
                .sum()
        };
        let v_fine = sum(fine);
        let v_coarse = sum(coarse);
        let err = (v_fine - v_coarse).norm() / v_fine.norm().max(1e-300);
        (v_fine, err)
    }

    /// Trigonometric interpolation of the density onto `factor` times as
    /// many nodes, returned as (node, charge) pairs.
    fn upsampled(&self, factor: usize) -> Vec<(Point, Complex64)> {
        let density = self.density();
        let mut out = Vec::new();
        let mut offset = 0;
        for b in &self.system.boundaries {
            let n = b.len();
            let psi = &density[offset..offset + n];
            offset += n;
            let coeffs = dft(psi);
            let fine_n = n * factor;
            let h = TAU / fine_n as f64;
            for i in 0..fine_n {
                let t = h * i as f64;
                let value = trig_eval(&coeffs, t);
                let speed = b.curve.derivative(t).norm();
                out.push((b.curve.point(t), value * speed * h));
            }
        }
        out
    }
}

/// Weights `R_j` of the product rule for `∫ ln(4 sin²((t−τ)/2)) f(τ) dτ`
/// on `n = 2m` equispaced nodes, indexed by the node offset `j`.
fn log_weights(n: usize) -> Vec<f64> {
    let m = n / 2;
    let mf = m as f64;
    (0..n)
        .map(|j| {
            let t = PI * j as f64 / mf;
            let mut s = 0.0;
            for l in 1..m {
                s += (l as f64 * t).cos() / l as f64;
            }
            -2.0 * PI / mf * s - PI / (mf * mf) * (mf * t).cos()
        })
        .collect()
}

/// Discrete Fourier coefficients `c_l`, `l = −n/2..n/2`, of equispaced
/// samples; the Nyquist mode is split evenly between `±n/2`.
fn dft(samples: &[Complex64]) -> Vec<(i64, Complex64)> {
    let n = samples.len();
    let half = (n / 2) as i64;
    (-half..=half)
        .map(|l| {
            let mut c: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, &v)| v * Complex64::from_polar(1.0, -TAU * (l * j as i64) as f64 / n as f64))
                .sum::<Complex64>()
                / n as f64;
            if l.abs() == half {
                c *= 0.5;
            }
            (l, c)
        })
        .collect()
}

fn trig_eval(coeffs: &[(i64, Complex64)], t: f64) -> Complex64 {
    coeffs.iter().map(|&(l, c)| c * Complex64::from_polar(1.0, l as f64 * t)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{place_scatterer, BoundaryCurve, CurveKind};

    fn ctx() -> WaveContext {
        WaveContext::new(TAU).unwrap()
    }

    fn circle(radius: f64, n: usize) -> DiscretizedBoundary {
        BoundaryCurve::new(CurveKind::Circle { radius }).discretize(n).unwrap()
    }

    #[test]
    fn log_weights_integrate_the_logarithm() {
        // ∫ ln(4 sin²(τ/2)) dτ = 0 and ∫ ln(4 sin²(τ/2)) cos τ dτ = −2π
        let n = 32;
        let w = log_weights(n);
        let total: f64 = w.iter().sum();
        assert!(total.abs() < 1e-12);
        let first: f64 = w.iter().enumerate().map(|(j, r)| r * (TAU * j as f64 / n as f64).cos()).sum();
        assert!((first + TAU).abs() < 1e-12);
    }

    #[test]
    fn matrix_is_symmetric() {
        let kite = place_scatterer(CurveKind::Kite, Point::new(2.0, 2.0), 0.5).unwrap();
        let sys = SingleLayerSystem::assemble(vec![kite.discretize(64).unwrap()], ctx()).unwrap();
        let a = sys.matrix();
        let asym = a.sub(&a.transpose()).unwrap().frobenius_norm() / a.frobenius_norm();
        assert!(asym < 1e-10, "{asym}");
    }

    #[test]
    fn condition_estimate_is_moderate_off_resonance() {
        let sys = SingleLayerSystem::assemble(vec![circle(0.25, 256)], ctx()).unwrap();
        assert!(sys.condition_estimate() < 1e4, "{}", sys.condition_estimate());
        assert!(!sys.is_resonant());
    }

    #[test]
    fn resonance_is_flagged_at_a_bessel_zero() {
        // j_{0,1} = 2.404825557695773: J0(ka) = 0 makes k² a Dirichlet eigenvalue.
        let a = 0.25;
        let k = 2.404_825_557_695_773 / a;
        let sys = SingleLayerSystem::assemble(vec![circle(a, 64)], WaveContext::new(k).unwrap()).unwrap();
        assert!(sys.is_resonant(), "cond {}", sys.condition_estimate());
    }

    #[test]
    fn boundary_condition_holds() {
        let kite = place_scatterer(CurveKind::Kite, Point::ORIGIN, 0.5).unwrap();
        let sys = SingleLayerSystem::assemble(vec![kite.discretize(128).unwrap()], ctx()).unwrap();
        let y = Point::new(5.0, 1.0);
        let sol = sys.solve_point_source(y).unwrap();
        assert!(sol.boundary_residual().unwrap() < 1e-8);
        // Points closer than the clearance are rejected.
        let p = kite.point(0.123);
        assert!(sol.evaluate_scattered(p).is_err());
    }

    #[test]
    fn total_field_is_incident_without_scatterers() {
        let sys = SingleLayerSystem::empty(ctx()).unwrap();
        let (x, y) = (Point::new(1.0, 0.0), Point::new(0.0, 3.0));
        assert_eq!(sys.total_field(x, y).unwrap(), ctx().green(x, y).unwrap());
        assert_eq!(sys.scattered_block(&[x], &[y]).unwrap()[(0, 0)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn sources_inside_or_touching_are_rejected() {
        let sys = SingleLayerSystem::assemble(vec![circle(0.5, 64)], ctx()).unwrap();
        assert!(matches!(sys.solve_point_source(Point::ORIGIN), Err(Error::Geometry(_))));
        assert!(matches!(sys.solve_point_source(Point::new(0.5 + 1e-5, 0.0)), Err(Error::Geometry(_))));
        assert!(SingleLayerSystem::assemble(vec![circle(0.5, 16)], ctx()).is_err());
    }

    #[test]
    fn dft_round_trip() {
        let samples: Vec<Complex64> =
            (0..16).map(|j| Complex64::new((j as f64).sin(), (0.3 * j as f64).cos())).collect();
        let c = dft(&samples);
        for (j, s) in samples.iter().enumerate() {
            let v = trig_eval(&c, TAU * j as f64 / 16.0);
            assert!((v - s).norm() < 1e-12);
        }
    }
}
