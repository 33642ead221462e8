//! Tikhonov filtering in the SVD basis and Morozov's discrepancy principle.
//!
//! With `b = U* φ_z`, the Tikhonov solution of `A g = φ_z` has
//! `(V* g)_j = σ_j / (α + σ_j²) · b_j`, so
//!
//! ```text
//! ‖g‖²            = Σ σ_j² / (α + σ_j²)² |b_j|²
//! ‖A g − φ_z‖²    = Σ α²   / (α + σ_j²)² |b_j|²
//! ```
//!
//! Morozov's principle picks `α` with `‖A g − φ_z‖ = δ ‖g‖`, the root of
//! `F(α) = Σ (α² − δ²σ_j²) / (α + σ_j²)² |b_j|²`, which is increasing in `α`.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Lower end of the root bracket.
pub const ALPHA_FLOOR: f64 = 1e-30;
/// Relative width at which bisection stops.
pub const ALPHA_TOLERANCE: f64 = 1e-12;

/// Norm of the Tikhonov solution and of its residual.
pub fn tikhonov_gnorm(singular_values: &[f64], b: &[Complex64], alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("regularization parameter must be positive, got {alpha}")));
    }
    if singular_values.len() != b.len() {
        return Err(Error::Dimension(format!(
            "{} singular values but {} coefficients",
            singular_values.len(),
            b.len()
        )));
    }
    let (mut g, mut r) = (0.0, 0.0);
    for (&s, bj) in singular_values.iter().zip(b) {
        let d = alpha + s * s;
        let mag = bj.norm();
        g += (s / d * mag).powi(2);
        r += (alpha / d * mag).powi(2);
    }
    Ok((g.sqrt(), r.sqrt()))
}

/// `F(α)` written to avoid overflow for huge `α`.
fn discrepancy(singular_values: &[f64], b: &[Complex64], delta: f64, alpha: f64) -> f64 {
    singular_values
        .iter()
        .zip(b)
        .map(|(&s, bj)| {
            let d = alpha + s * s;
            ((alpha / d).powi(2) - (delta * s / d).powi(2)) * bj.norm_sqr()
        })
        .sum()
}

/// Positive root of the discrepancy equation.
///
/// Fails with [`Error::NoiseExceedsSignal`] when `F` has no sign change,
/// e.g. for a zero matrix; callers then fall back to the `α → ∞` limit
/// `g = 0`.
pub fn morozov_alpha(singular_values: &[f64], b: &[Complex64], delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("noise level must be positive, got {delta}")));
    }
    if singular_values.len() != b.len() {
        return Err(Error::Dimension(format!(
            "{} singular values but {} coefficients",
            singular_values.len(),
            b.len()
        )));
    }
    if b.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(Error::Domain("right-hand side has no component".into()));
    }
    let f = |a: f64| discrepancy(singular_values, b, delta, a);
    let mut lo = ALPHA_FLOOR;
    if f(lo) >= 0.0 {
        return Err(Error::NoiseExceedsSignal);
    }
    let mut hi = 1.0f64;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoiseExceedsSignal);
        }
    }
    // Geometric bisection to shrink many decades quickly, then arithmetic.
    let mut iterations = 0;
    while hi > 2.0 * lo {
        let mid = (lo * hi).sqrt();
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    while hi - lo > ALPHA_TOLERANCE * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations > 10_000 {
            return Err(Error::Convergence { what: "discrepancy bisection".into(), iterations });
        }
    }
    Ok(0.5 * (lo + hi))
}
