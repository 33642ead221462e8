//! Separation-of-variables solution for a sound-soft circle.
//!
//! For a circle of radius `a` and a point source at `y`, both outside,
//!
//! ```text
//! u^s(x, y) = −(i/4) Σ_n J_n(ka)/H_n(ka) · H_n(k|x−c|) H_n(k|y−c|) e^{in(θ_x − θ_y)}
//! ```
//!
//! with `H_n` the first-kind Hankel function. The terms for `±n` coincide, so
//! the sum is folded onto `n ≥ 0` with a cosine.

use crate::error::{Error, Result};
use crate::point::Point;
use crate::specfun::{bessel_jy_orders, WaveContext, MAX_ORDER};
use num_complex::Complex64;

/// Relative size of the last retained term above which truncation is reported.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Default number of retained orders: `⌈ka⌉ + 20`, capped at the largest
/// supported Bessel order.
pub fn default_terms(ctx: &WaveContext, radius: f64) -> u32 {
    ((ctx.k() * radius).ceil() as u32 + 20).min(MAX_ORDER)
}

/// Series value with `terms` orders, and the relative magnitude of the last
/// retained term.
pub fn mie_series(
    ctx: &WaveContext,
    radius: f64,
    center: Point,
    x: Point,
    y: Point,
    terms: u32,
) -> Result<(Complex64, f64)> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("circle radius must be positive, got {radius}")));
    }
    let (dx, dy) = (x - center, y - center);
    let (rx, ry) = (dx.norm(), dy.norm());
    if rx <= radius || ry <= radius {
        return Err(Error::Geometry("Mie series needs both points outside the circle".into()));
    }
    let terms = terms.min(MAX_ORDER);
    let k = ctx.k();
    let (ja, ya) = bessel_jy_orders(terms, k * radius)?;
    let (jx, yx) = bessel_jy_orders(terms, k * rx)?;
    let (jy, yy) = bessel_jy_orders(terms, k * ry)?;
    let dtheta = dx.angle() - dy.angle();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = 0.0;
    for n in 0..=terms as usize {
        let ratio = ja[n] / Complex64::new(ja[n], ya[n]);
        let hx = Complex64::new(jx[n], yx[n]);
        let hy = Complex64::new(jy[n], yy[n]);
        let fold = if n == 0 { 1.0 } else { 2.0 * (n as f64 * dtheta).cos() };
        let term = ratio * hx * hy * fold;
        sum += term;
        last = term.norm();
    }
    let value = Complex64::new(0.0, -0.25) * sum;
    let tail = 0.25 * last / value.norm().max(f64::MIN_POSITIVE);
    Ok((value, tail))
}

/// Scattered field of a sound-soft circle, truncated at [`default_terms`].
/// Logs a warning if the truncation tail exceeds [`TAIL_TOLERANCE`].
pub fn mie_scattered_circle(ctx: &WaveContext, radius: f64, center: Point, x: Point, y: Point) -> Result<Complex64> {
    let (value, tail) = mie_series(ctx, radius, center, x, y, default_terms(ctx, radius))?;
    if tail > TAIL_TOLERANCE {
        log::warn!("circle series truncated with relative tail {tail:.2e}");
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn cancels_incident_field_on_the_boundary() {
        let ctx = WaveContext::new(TAU).unwrap();
        let a = 0.3;
        let y = Point::new(2.0, -1.0);
        for t in [0.0, 1.0, 2.5, 4.0] {
            let x = Point::from_polar(a * (1.0 + 1e-12), t);
            let us = mie_scattered_circle(&ctx, a, Point::ORIGIN, x, y).unwrap();
            let inc = ctx.green(x, y).unwrap();
            assert!((us + inc).norm() < 1e-9 * inc.norm(), "{}", (us + inc).norm());
        }
    }

    #[test]
    fn reciprocity() {
        let ctx = WaveContext::new(TAU).unwrap();
        let c = Point::new(0.5, 0.5);
        let (x, y) = (Point::new(3.0, 0.0), Point::new(-1.0, 2.0));
        let a = mie_scattered_circle(&ctx, 0.4, c, x, y).unwrap();
        let b = mie_scattered_circle(&ctx, 0.4, c, y, x).unwrap();
        assert!((a - b).norm() < 1e-14 * a.norm());
    }

    #[test]
    fn default_truncation_tail_is_small() {
        let ctx = WaveContext::new(TAU).unwrap();
        let (_, tail) = mie_series(
            &ctx,
            0.25,
            Point::ORIGIN,
            Point::new(5.0, 0.0),
            Point::new(0.0, 50.0),
            default_terms(&ctx, 0.25),
        )
        .unwrap();
        assert!(tail < TAIL_TOLERANCE, "{tail}");
    }

    #[test]
    fn interior_points_are_rejected() {
        let ctx = WaveContext::new(1.0).unwrap();
        assert!(mie_scattered_circle(&ctx, 1.0, Point::ORIGIN, Point::new(0.5, 0.0), Point::new(3.0, 0.0)).is_err());
    }
}
