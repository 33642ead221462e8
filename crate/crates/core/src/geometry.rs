//! Scatterer boundaries and receiver/source layouts.
//!
//! Curves are smooth closed `2π`-periodic parametrizations traversed
//! counter-clockwise, so `(y', −x') / |x'|` is the outward normal.

use crate::error::{Error, Result};
use crate::point::Point;
use crate::seeding;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Canonical shape of a boundary before placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum CurveKind {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// `(cos t + 0.65 cos 2t − 0.65, 1.5 sin t)`
    Kite,
}

/// The kite curve `(cos t + 0.65 cos 2t − 0.65, 1.5 sin t)`.
pub fn canonical_kite(t: f64) -> Point {
    Point::new(t.cos() + 0.65 * (2.0 * t).cos() - 0.65, 1.5 * t.sin())
}

impl CurveKind {
    /// Point, first and second derivative of the canonical curve.
    fn eval(&self, t: f64) -> [Point; 3] {
        let (s, c) = t.sin_cos();
        match *self {
            CurveKind::Circle { radius } => [
                Point::new(radius * c, radius * s),
                Point::new(-radius * s, radius * c),
                Point::new(-radius * c, -radius * s),
            ],
            CurveKind::Ellipse { a, b } => {
                [Point::new(a * c, b * s), Point::new(-a * s, b * c), Point::new(-a * c, -b * s)]
            }
            CurveKind::Kite => {
                let (s2, c2) = (2.0 * t).sin_cos();
                [canonical_kite(t), Point::new(-s - 1.3 * s2, 1.5 * c), Point::new(-c - 2.6 * c2, -1.5 * s)]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CurveKind::Circle { radius } => radius > 0.0 && radius.is_finite(),
            CurveKind::Ellipse { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
            CurveKind::Kite => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Geometry(format!("invalid curve parameters {self:?}")))
        }
    }

    /// Largest distance between two points of the canonical curve.
    pub fn diameter(&self) -> f64 {
        match *self {
            CurveKind::Circle { radius } => 2.0 * radius,
            CurveKind::Ellipse { a, b } => 2.0 * a.max(b),
            CurveKind::Kite => {
                let pts: Vec<Point> = (0..2048).map(|i| canonical_kite(TAU * i as f64 / 2048.0)).collect();
                let mut best = 0.0f64;
                for (i, p) in pts.iter().enumerate() {
                    for q in &pts[i + 1..] {
                        best = best.max(p.dist(*q));
                    }
                }
                best
            }
        }
    }
}

/// A placed boundary curve: `x(t) = center + scale · R(rotation) · p(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub kind: CurveKind,
    pub center: Point,
    pub scale: f64,
    #[serde(default)]
    pub rotation: f64,
}

impl BoundaryCurve {
    pub fn new(kind: CurveKind) -> Self {
        Self { kind, center: Point::ORIGIN, scale: 1.0, rotation: 0.0 }
    }

    pub fn point(&self, t: f64) -> Point {
        self.center + self.kind.eval(t)[0].rotate(self.rotation) * self.scale
    }

    pub fn derivative(&self, t: f64) -> Point {
        self.kind.eval(t)[1].rotate(self.rotation) * self.scale
    }

    pub fn second_derivative(&self, t: f64) -> Point {
        self.kind.eval(t)[2].rotate(self.rotation) * self.scale
    }

    pub fn diameter(&self) -> f64 {
        self.kind.diameter() * self.scale
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.validate()?;
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Geometry(format!("scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }

    /// Trapezoid-rule discretization with `n` equispaced parameter nodes.
    pub fn discretize(&self, n: usize) -> Result<DiscretizedBoundary> {
        self.validate()?;
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::Geometry(format!("node count must be even and >= 4, got {n}")));
        }
        let h = TAU / n as f64;
        let mut params = Vec::with_capacity(n);
        let mut nodes = Vec::with_capacity(n);
        let mut normals = Vec::with_capacity(n);
        let mut speeds = Vec::with_capacity(n);
        for j in 0..n {
            let t = h * j as f64;
            let d = self.derivative(t);
            let speed = d.norm();
            if speed <= 0.0 {
                return Err(Error::Geometry(format!("degenerate parametrization at t = {t}")));
            }
            params.push(t);
            nodes.push(self.point(t));
            normals.push(Point::new(d.y / speed, -d.x / speed));
            speeds.push(speed);
        }
        let weights = speeds.iter().map(|s| s * h).collect();
        Ok(DiscretizedBoundary { curve: *self, params, nodes, normals, speeds, weights })
    }

    fn polygon(&self) -> Vec<Point> {
        const SAMPLES: usize = 2048;
        (0..SAMPLES).map(|i| self.point(TAU * i as f64 / SAMPLES as f64)).collect()
    }

    /// Whether `p` lies in the open interior (winding-number test on a fine
    /// polygon).
    pub fn contains(&self, p: Point) -> bool {
        let poly = self.polygon();
        let mut winding = 0i32;
        for (i, a) in poly.iter().enumerate() {
            let b = poly[(i + 1) % poly.len()];
            let cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
            if a.y <= p.y {
                if b.y > p.y && cross > 0.0 {
                    winding += 1;
                }
            } else if b.y <= p.y && cross < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }

    /// Approximate distance from `p` to the curve.
    pub fn distance(&self, p: Point) -> f64 {
        let poly = self.polygon();
        let mut best = f64::INFINITY;
        for (i, &a) in poly.iter().enumerate() {
            let b = poly[(i + 1) % poly.len()];
            let ab = b - a;
            let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
            best = best.min(p.dist(a + ab * t));
        }
        best
    }
}

/// Scales a canonical curve so its diameter equals `size` and centres its
/// parametrization origin at `center`.
pub fn place_scatterer(kind: CurveKind, center: Point, size: f64) -> Result<BoundaryCurve> {
    kind.validate()?;
    if !(size > 0.0 && size.is_finite()) {
        return Err(Error::Geometry(format!("size must be positive, got {size}")));
    }
    Ok(BoundaryCurve { kind, center, scale: size / kind.diameter(), rotation: 0.0 })
}

/// Quadrature nodes of a boundary curve.
#[derive(Debug, Clone)]
pub struct DiscretizedBoundary {
    pub curve: BoundaryCurve,
    pub params: Vec<f64>,
    pub nodes: Vec<Point>,
    /// Outward unit normals.
    pub normals: Vec<Point>,
    /// `|x'(t_j)|`
    pub speeds: Vec<f64>,
    /// Arc-length weights `(2π/n) |x'(t_j)|`.
    pub weights: Vec<f64>,
}

impl DiscretizedBoundary {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Mean arc-length spacing between nodes.
    pub fn spacing(&self) -> f64 {
        self.perimeter() / self.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointRole {
    Receiver,
    DeterministicSource,
    RandomSource,
}

/// How a point set on a circle or arc was generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSetSpec {
    pub role: PointRole,
    pub radius: f64,
    pub count: usize,
    /// Points are jittered forward by `U[0, beta]` of a spacing.
    #[serde(default)]
    pub beta: f64,
    /// Angular interval `[θ_min, θ_max]`; full circle when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arc: Option<[f64; 2]>,
    #[serde(default)]
    pub seed: u64,
}

impl PointSetSpec {
    pub fn full_circle(role: PointRole, radius: f64, count: usize) -> Self {
        Self { role, radius, count, beta: 0.0, arc: None, seed: 0 }
    }

    pub fn with_beta(mut self, beta: f64, seed: u64) -> Self {
        self.beta = beta;
        self.seed = seed;
        self
    }

    pub fn with_arc(mut self, arc: Option<[f64; 2]>) -> Self {
        self.arc = arc;
        self
    }

    /// Length of the generating circle or arc.
    pub fn curve_length(&self) -> f64 {
        let [lo, hi] = self.arc.unwrap_or([0.0, TAU]);
        self.radius * (hi - lo)
    }
}

/// Points with their generation record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub spec: PointSetSpec,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn role(&self) -> PointRole {
        self.spec.role
    }
}

/// Points `radius · e^{iθ_j}`, `θ_j = θ_min + (θ_max − θ_min)(j − 1 + β_j)/count`
/// with `β_j ~ U[0, β]` drawn from the `(seed, "sources")` stream.
pub fn circle_points(spec: &PointSetSpec) -> Result<PointSet> {
    if spec.count == 0 {
        return Err(Error::Geometry("point count must be at least 1".into()));
    }
    if !(spec.radius > 0.0 && spec.radius.is_finite()) {
        return Err(Error::Geometry(format!("radius must be positive, got {}", spec.radius)));
    }
    if !(0.0..1.0).contains(&spec.beta) {
        return Err(Error::Geometry(format!("beta must lie in [0, 1), got {}", spec.beta)));
    }
    let [lo, hi] = spec.arc.unwrap_or([0.0, TAU]);
    if !(hi > lo) {
        return Err(Error::Geometry(format!("empty arc [{lo}, {hi}]")));
    }
    let step = (hi - lo) / spec.count as f64;
    let mut rng = seeding::substream(spec.seed, seeding::TAG_SOURCES, 0);
    let points = (0..spec.count)
        .map(|j| {
            let jitter = if spec.beta > 0.0 { rng.random::<f64>() * spec.beta } else { 0.0 };
            Point::from_polar(spec.radius, lo + step * (j as f64 + jitter))
        })
        .collect();
    Ok(PointSet { points, spec: *spec })
}

/// `count` points at independent uniformly distributed angles on the full
/// circle, drawn from the `(seed, "sources", 1)` stream and sorted by angle.
pub fn uniform_random_points(role: PointRole, radius: f64, count: usize, seed: u64) -> Result<PointSet> {
    let spec = PointSetSpec::full_circle(role, radius, count);
    circle_points(&spec)?;
    let mut rng = seeding::substream(seed, seeding::TAG_SOURCES, 1);
    let mut angles: Vec<f64> = (0..count).map(|_| rng.random::<f64>() * TAU).collect();
    angles.sort_by(f64::total_cmp);
    let points = angles.into_iter().map(|t| Point::from_polar(radius, t)).collect();
    Ok(PointSet { points, spec: PointSetSpec { seed, ..spec } })
}
