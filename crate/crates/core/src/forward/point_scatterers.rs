//! Point-scatterer model for small obstacles.
//!
//! Each small sound-soft disk of radius `ρ` at `c` is replaced by a point
//! scatterer with reflection coefficient `λ = 4i / H0(kρ)`, chosen so that a
//! single such point reproduces the monopole term of the disk's series.
//! Multiple scattering between points is neglected:
//! `u^s(x, y) = Σ_p λ_p φ(x, c_p) φ(c_p, y)`.

use crate::error::{Error, Result};
use crate::point::Point;
use crate::specfun::{green2d, hankel1, WaveContext};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointScattererConfig {
    pub centers: Vec<Point>,
    /// Effective disk radii, one per center.
    pub radii: Vec<f64>,
}

impl PointScattererConfig {
    pub fn new(centers: Vec<Point>, radii: Vec<f64>) -> Result<Self> {
        let cfg = Self { centers, radii };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.centers.len() != self.radii.len() {
            return Err(Error::Dimension(format!(
                "{} point scatterers but {} radii",
                self.centers.len(),
                self.radii.len()
            )));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
            return Err(Error::Domain(format!("point scatterer radius must be positive, got {r}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Reflection coefficients `4i / H0(kρ_p)`.
    pub fn reflection(&self, ctx: &WaveContext) -> Result<Vec<Complex64>> {
        self.radii.iter().map(|&r| Ok(Complex64::new(0.0, 4.0) / hankel1(0, ctx.k() * r)?)).collect()
    }

    /// Scattered field at `x` for a point source at `y`.
    pub fn scattered(&self, ctx: &WaveContext, x: Point, y: Point) -> Result<Complex64> {
        let lambda = self.reflection(ctx)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for (&c, l) in self.centers.iter().zip(&lambda) {
            sum += l * green2d(ctx, x, c)? * green2d(ctx, c, y)?;
        }
        Ok(sum)
    }
}
