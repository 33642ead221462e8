//! Bessel and Hankel functions of integer order and real argument, and the
//! free-space Green's function of the two-dimensional Helmholtz equation.
//!
//! Below the crossover `x = 12` the order-0 and order-1 functions come from
//! their power series; above it from the Hankel asymptotic expansion.
//! Higher orders of `J` use Miller's downward recurrence (normalised by
//! `J0 + 2 Σ J_2k = 1`) whenever the order is not below the argument, and
//! forward recurrence otherwise. `Y` always uses forward recurrence, which is
//! stable for the second kind.

use crate::error::{Error, Result};
use crate::point::Point;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

/// Largest supported order.
pub const MAX_ORDER: u32 = 60;
/// Largest supported argument.
pub const MAX_ARGUMENT: f64 = 1.0e4;
/// Switch from power series to the asymptotic expansion.
const CROSSOVER: f64 = 12.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Wavenumber and wavelength of the time-harmonic field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWave")]
pub struct WaveContext {
    k: f64,
    lambda: f64,
}

#[derive(Deserialize)]
struct RawWave {
    k: f64,
}

impl TryFrom<RawWave> for WaveContext {
    type Error = Error;
    fn try_from(raw: RawWave) -> Result<Self> {
        WaveContext::new(raw.k)
    }
}

impl WaveContext {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
        }
        Ok(Self { k, lambda: TAU / k })
    }

    pub fn from_wavelength(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Domain(format!("wavelength must be positive, got {lambda}")));
        }
        Self::new(TAU / lambda)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn wavelength(&self) -> f64 {
        self.lambda
    }

    /// `φ(x, y) = (i/4) H0⁽¹⁾(k|x − y|)`; see [`green2d`].
    pub fn green(&self, x: Point, y: Point) -> Result<Complex64> {
        green2d(self, x, y)
    }
}

fn check_domain(n: u32, x: f64) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::Domain(format!("order {n} exceeds cap {MAX_ORDER}")));
    }
    if !(x > 0.0 && x <= MAX_ARGUMENT) {
        return Err(Error::Domain(format!("argument {x} outside (0, {MAX_ARGUMENT}]")));
    }
    Ok(())
}

/// Bessel function of the first kind `J_n(x)`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    check_domain(n, x)?;
    Ok(match n {
        0 => jy01(x).0,
        1 => jy01(x).1,
        _ if x >= CROSSOVER && f64::from(n) < x => {
            let (j0, j1, _, _) = jy01(x);
            forward(j0, j1, n, x)
        }
        _ => miller(n, x)[n as usize],
    })
}

/// Bessel function of the second kind `Y_n(x)`. Diverges logarithmically
/// (order 0) or algebraically as `x → 0⁺`; tiny arguments may overflow.
pub fn bessel_y(n: u32, x: f64) -> Result<f64> {
    check_domain(n, x)?;
    let (_, _, y0, y1) = jy01(x);
    Ok(match n {
        0 => y0,
        1 => y1,
        _ => forward(y0, y1, n, x),
    })
}

/// Hankel function of the first kind `H_n⁽¹⁾(x) = J_n(x) + i Y_n(x)`.
pub fn hankel1(n: u32, x: f64) -> Result<Complex64> {
    Ok(Complex64::new(bessel_j(n, x)?, bessel_y(n, x)?))
}

/// Hankel function of the second kind, the complex conjugate of `H_n⁽¹⁾`
/// for real argument.
pub fn hankel2(n: u32, x: f64) -> Result<Complex64> {
    Ok(hankel1(n, x)?.conj())
}

/// `J_0..=J_nmax` and `Y_0..=Y_nmax` at one argument.
pub fn bessel_jy_orders(nmax: u32, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_domain(nmax, x)?;
    let (j0, j1, y0, y1) = jy01(x);
    let len = nmax as usize + 1;
    let j = if nmax <= 1 {
        vec![j0, j1][..len].to_vec()
    } else if x >= CROSSOVER && f64::from(nmax) < x {
        sequence(j0, j1, nmax, x)
    } else {
        miller(nmax, x)
    };
    let y = sequence(y0, y1, nmax, x)[..len].to_vec();
    Ok((j, y))
}

/// Free-space Green's function `φ(x, y) = (i/4) H0⁽¹⁾(k|x − y|)`.
///
/// Fails when the two points are closer than `1e-14 λ`.
pub fn green2d(ctx: &WaveContext, x: Point, y: Point) -> Result<Complex64> {
    let r = x.dist(y);
    if r < 1e-14 * ctx.lambda {
        return Err(Error::Singularity(format!("green function evaluated at coincident points ({}, {})", x.x, x.y)));
    }
    check_domain(0, ctx.k * r)?;
    Ok(green_at_distance(ctx.k, r))
}

/// Unchecked kernel for inner loops; the caller guarantees `r > 0`.
#[inline]
pub(crate) fn green_at_distance(k: f64, r: f64) -> Complex64 {
    let (j0, _, y0, _) = jy01(k * r);
    Complex64::new(-0.25 * y0, 0.25 * j0)
}

/// `J0(x)` without domain checks.
#[inline]
pub(crate) fn j0(x: f64) -> f64 {
    if x < CROSSOVER {
        series_j0(x)
    } else {
        asymptotic(0, x).0
    }
}

/// `(J0, J1, Y0, Y1)` at `x > 0`.
pub(crate) fn jy01(x: f64) -> (f64, f64, f64, f64) {
    if x < CROSSOVER {
        series01(x)
    } else {
        let (j0, y0) = asymptotic(0, x);
        let (j1, y1) = asymptotic(1, x);
        (j0, j1, y0, y1)
    }
}

fn series_j0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        let m = f64::from(m);
        term *= -q / (m * m);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn series01(x: f64) -> (f64, f64, f64, f64) {
    let q = 0.25 * x * x;
    let half = 0.5 * x;
    // term_m = (-q)^m / (m!)^2, term1_m = (-q)^m / (m!(m+1)!)
    let mut term0 = 1.0;
    let mut term1 = 1.0;
    let mut harmonic = 0.0;
    let mut j0 = 1.0;
    let mut j1 = 1.0;
    let mut y0_tail = 0.0;
    // ψ(1) + ψ(2) = -2γ + 1
    let mut y1_tail = 1.0 - 2.0 * EULER_GAMMA;
    for m in 1..200u32 {
        let mf = f64::from(m);
        term0 *= -q / (mf * mf);
        term1 *= -q / (mf * (mf + 1.0));
        let harmonic_next = harmonic + 1.0 / mf;
        j0 += term0;
        j1 += term1;
        y0_tail += harmonic_next * term0;
        // ψ(m+1) + ψ(m+2) = -2γ + H_m + H_{m+1}
        let h_m1 = harmonic_next + 1.0 / (mf + 1.0);
        y1_tail += (harmonic_next + h_m1 - 2.0 * EULER_GAMMA) * term1;
        harmonic = harmonic_next;
        if term0.abs().max(term1.abs()) * (1.0 + harmonic) < 1e-18 {
            break;
        }
    }
    let j1 = half * j1;
    let log_term = half.ln();
    let y0 = (2.0 / PI) * ((log_term + EULER_GAMMA) * j0 - y0_tail);
    let y1 = -2.0 / (PI * x) + (2.0 / PI) * log_term * j1 - half * y1_tail / PI;
    (j0, j1, y0, y1)
}

/// Hankel asymptotic expansion for orders 0 and 1.
fn asymptotic(nu: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * f64::from(nu * nu);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    for k in 1..64u32 {
        let odd = f64::from(2 * k - 1);
        let next = term * (mu - odd * odd) / (f64::from(k) * 8.0 * x);
        if next.abs() >= term.abs() || next == 0.0 {
            break;
        }
        term = next;
        // t_k enters P (even k) or Q (odd k) with alternating signs.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    // χ = x − νπ/2 − π/4
    let (cos_chi, sin_chi) = if nu == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2)
    };
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * cos_chi - q * sin_chi), amp * (p * sin_chi + q * cos_chi))
}

fn forward(f0: f64, f1: f64, n: u32, x: f64) -> f64 {
    *sequence(f0, f1, n, x).last().expect("non-empty")
}

/// `f_0..=f_n` by the three-term recurrence `f_{m+1} = (2m/x) f_m − f_{m−1}`.
fn sequence(f0: f64, f1: f64, n: u32, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 2);
    out.push(f0);
    out.push(f1);
    for m in 1..n {
        let next = 2.0 * f64::from(m) / x * out[m as usize] - out[m as usize - 1];
        out.push(next);
    }
    out.truncate(n as usize + 1);
    out
}

/// Miller's algorithm: `J_0..=J_nmax` by downward recurrence.
fn miller(nmax: u32, x: f64) -> Vec<f64> {
    const BIG: f64 = 1e250;
    let top = f64::from(nmax).max(x);
    let mut start = (top + 30.0 + (80.0 * top).sqrt()) as usize;
    start += start % 2;
    let nmax = nmax as usize;
    let mut out = vec![0.0; nmax + 1];
    let mut above = 0.0;
    let mut current = 1e-300_f64.max(f64::MIN_POSITIVE);
    let mut even_sum = 0.0;
    for order in (1..=start).rev() {
        let below = 2.0 * order as f64 / x * current - above;
        above = current;
        current = below;
        let m = order - 1;
        if current.abs() > BIG {
            current /= BIG;
            above /= BIG;
            even_sum /= BIG;
            out.iter_mut().for_each(|v| *v /= BIG);
        }
        if m <= nmax {
            out[m] = current;
        }
        if m > 0 && m % 2 == 0 {
            even_sum += current;
        }
    }
    let norm = current + 2.0 * even_sum;
    out.iter_mut().for_each(|v| *v /= norm);
    out
}
