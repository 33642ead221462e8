//! Linear sampling indicator on a grid of probe points.

use super::regularization::{morozov_alpha, tikhonov_gnorm};
use super::svd::{svd, SvdFactors};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::point::Point;
use crate::specfun::{green2d, WaveContext};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative floor applied to the noise level so that noise-free data still
/// gets a (tiny) positive regularization parameter.
pub const DELTA_FLOOR: f64 = 1e-14;

/// Uniform probe grid including both end points of each range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, n: usize) -> Self {
        Self { x_range: [-half_width, half_width], y_range: [-half_width, half_width], nx: n, ny: n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Config(format!("grid needs at least 2x2 points, got {}x{}", self.nx, self.ny)));
        }
        if !(self.x_range[1] > self.x_range[0]) || !(self.y_range[1] > self.y_range[0]) {
            return Err(Error::Config("grid ranges must be increasing".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        (self.x_range[1] - self.x_range[0]) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_range[1] - self.y_range[0]) / (self.ny - 1) as f64
    }

    /// Point of cell `(ix, iy)`; `iy = 0` is the bottom row.
    pub fn point(&self, ix: usize, iy: usize) -> Point {
        Point::new(self.x_range[0] + self.dx() * ix as f64, self.y_range[0] + self.dy() * iy as f64)
    }

    /// All points, row by row from the bottom, `x` varying fastest.
    pub fn points(&self) -> Vec<Point> {
        (0..self.ny).flat_map(|iy| (0..self.nx).map(move |ix| self.point(ix, iy))).collect()
    }
}

/// Right-hand side used when probing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum RhsMode {
    /// `φ(x_j, z)`.
    #[default]
    Green,
    /// `a φ(x_j, z) + b conj(φ(x_j, z))`.
    Mixed { a: Complex64, b: Complex64 },
}

/// `(φ_z)_j = φ(x_j, z)`.
pub fn rhs_vector(receivers: &[Point], z: Point, ctx: &WaveContext) -> Result<Vec<Complex64>> {
    receivers.iter().map(|&x| green2d(ctx, x, z)).collect()
}

fn rhs_with_mode(receivers: &[Point], z: Point, ctx: &WaveContext, mode: RhsMode) -> Result<Vec<Complex64>> {
    let phi = rhs_vector(receivers, z, ctx)?;
    Ok(match mode {
        RhsMode::Green => phi,
        RhsMode::Mixed { a, b } => phi.iter().map(|p| a * p + b * p.conj()).collect(),
    })
}

/// Outcome of probing one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub z: Point,
    pub alpha: f64,
    pub g_norm: f64,
    pub residual: f64,
}

/// Morozov-regularized solve for one probe point.
pub fn probe(
    factors: &SvdFactors,
    receivers: &[Point],
    ctx: &WaveContext,
    z: Point,
    delta: f64,
    mode: RhsMode,
) -> Result<ProbeResult> {
    let phi = rhs_with_mode(receivers, z, ctx, mode)?;
    let b = factors.project(&phi);
    let alpha = morozov_alpha(&factors.singular_values, &b, delta)?;
    let (g_norm, residual) = tikhonov_gnorm(&factors.singular_values, &b, alpha)?;
    Ok(ProbeResult { z, alpha, g_norm, residual })
}

/// Indicator values on a grid, stored row by row from the bottom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorMap {
    pub grid: GridSpec,
    pub mask_radius: f64,
    /// `‖g_z‖` inside the mask, 0 elsewhere.
    pub values: Vec<f64>,
    /// `1/‖g_z‖` min–max normalized over valid cells, 0 elsewhere.
    pub reciprocal: Vec<f64>,
    /// Cells inside the mask radius whose probe succeeded.
    pub mask: Vec<bool>,
    /// Per-cell probe outcome, `None` where masked out or failed.
    pub probes: Vec<Option<ProbeResult>>,
    /// Noise level actually used in the discrepancy equation.
    pub delta: f64,
    pub reciprocal_min: f64,
    pub reciprocal_max: f64,
}

impl IndicatorMap {
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.grid.nx + ix
    }
}

/// Probes every grid point with one SVD of `matrix`.
pub fn indicator_map(
    matrix: &CMatrix,
    receivers: &[Point],
    ctx: &WaveContext,
    delta: f64,
    grid: &GridSpec,
    mask_radius: f64,
    mode: RhsMode,
) -> Result<IndicatorMap> {
    grid.validate()?;
    if matrix.rows() != receivers.len() {
        return Err(Error::Dimension(format!("matrix has {} rows for {} receivers", matrix.rows(), receivers.len())));
    }
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("noise level must be nonnegative, got {delta}")));
    }
    let factors = svd(matrix)?;
    indicator_map_with_factors(&factors, receivers, ctx, delta, grid, mask_radius, mode)
}

/// As [`indicator_map`], reusing a precomputed factorization.
pub fn indicator_map_with_factors(
    factors: &SvdFactors,
    receivers: &[Point],
    ctx: &WaveContext,
    delta: f64,
    grid: &GridSpec,
    mask_radius: f64,
    mode: RhsMode,
) -> Result<IndicatorMap> {
    grid.validate()?;
    let delta = delta.max(DELTA_FLOOR * factors.largest());
    let probes: Vec<Option<ProbeResult>> = grid
        .points()
        .into_par_iter()
        .map(|z| {
            if z.norm() > mask_radius {
                return None;
            }
            match probe(factors, receivers, ctx, z, delta, mode) {
                Ok(p) if p.g_norm > 0.0 && p.g_norm.is_finite() => Some(p),
                Ok(_) => None,
                Err(e) => {
                    log::debug!("probe at ({}, {}) failed: {e}", z.x, z.y);
                    None
                }
            }
        })
        .collect();
    let mask: Vec<bool> = probes.iter().map(Option::is_some).collect();
    let values: Vec<f64> = probes.iter().map(|p| p.map_or(0.0, |p| p.g_norm)).collect();
    let inv: Vec<f64> = probes.iter().flatten().map(|p| 1.0 / p.g_norm).collect();
    let lo = inv.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = inv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let reciprocal = probes
        .iter()
        .map(|p| match p {
            Some(p) if hi > lo => (1.0 / p.g_norm - lo) / (hi - lo),
            _ => 0.0,
        })
        .collect();
    Ok(IndicatorMap {
        grid: *grid,
        mask_radius,
        values,
        reciprocal,
        mask,
        probes,
        delta,
        reciprocal_min: if inv.is_empty() { 0.0 } else { lo },
        reciprocal_max: if inv.is_empty() { 0.0 } else { hi },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn rhs_is_uniform_at_the_array_center() {
        let ctx = WaveContext::new(TAU).unwrap();
        let recv: Vec<Point> = (0..12).map(|j| Point::from_polar(5.0, TAU * j as f64 / 12.0)).collect();
        let phi = rhs_vector(&recv, Point::ORIGIN, &ctx).unwrap();
        assert!(phi.iter().all(|p| (p - phi[0]).norm() < 1e-15));
        assert!(rhs_vector(&recv, recv[3], &ctx).is_err());
    }

    #[test]
    fn zero_matrix_gives_flat_map() {
        let ctx = WaveContext::new(TAU).unwrap();
        let recv: Vec<Point> = (0..8).map(|j| Point::from_polar(5.0, TAU * j as f64 / 8.0)).collect();
        let grid = GridSpec::square(2.0, 5);
        let map = indicator_map(&CMatrix::zeros(8, 8), &recv, &ctx, 0.1, &grid, 5.0, RhsMode::Green).unwrap();
        assert!(map.values.iter().all(|&v| v == 0.0));
        assert!(map.reciprocal.iter().all(|&v| v == 0.0));
        assert!(map.mask.iter().all(|&m| !m));
    }

    #[test]
    fn mask_radius_zeroes_outer_cells() {
        let ctx = WaveContext::new(TAU).unwrap();
        let recv: Vec<Point> = (0..8).map(|j| Point::from_polar(5.0, TAU * j as f64 / 8.0)).collect();
        let grid = GridSpec::square(6.0, 7);
        let map = indicator_map(&CMatrix::identity(8), &recv, &ctx, 0.01, &grid, 5.0, RhsMode::Green).unwrap();
        for (i, z) in grid.points().iter().enumerate() {
            assert_eq!(map.mask[i], z.norm() <= 5.0);
            assert!(map.values[i] >= 0.0);
        }
    }
}
