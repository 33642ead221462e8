//! Forward scattering: fields generated by point sources in the presence of
//! sound-soft obstacles.

pub mod mie;
pub mod nystrom;
pub mod point_scatterers;

pub use mie::{mie_scattered_circle, mie_series};
pub use nystrom::{ForwardWarning, ScatterSolution, SingleLayerSystem, RESONANCE_THRESHOLD};
pub use point_scatterers::PointScattererConfig;

use crate::error::Result;
use crate::linalg::CMatrix;
use crate::point::Point;
use crate::specfun::{green2d, WaveContext};
use num_complex::Complex64;

/// The medium in which sources radiate.
#[derive(Debug)]
pub enum Medium {
    /// Homogeneous background, no scatterer.
    Free(WaveContext),
    /// Extended sound-soft obstacles solved by boundary integrals.
    Obstacles(SingleLayerSystem),
    /// Small obstacles approximated as point scatterers.
    Points { config: PointScattererConfig, ctx: WaveContext },
}

impl Medium {
    pub fn ctx(&self) -> &WaveContext {
        match self {
            Medium::Free(ctx) | Medium::Points { ctx, .. } => ctx,
            Medium::Obstacles(sys) => sys.ctx(),
        }
    }

    /// Scattered fields `u^s(x_j, z_l)` as a `receivers × sources` matrix.
    pub fn scattered_block(&self, receivers: &[Point], sources: &[Point]) -> Result<CMatrix> {
        match self {
            Medium::Free(_) => Ok(CMatrix::zeros(receivers.len(), sources.len())),
            Medium::Obstacles(sys) => sys.scattered_block(receivers, sources),
            Medium::Points { config, ctx } => {
                config.validate()?;
                let lambda = config.reflection(ctx)?;
                let project = |pts: &[Point]| -> Result<Vec<Vec<Complex64>>> {
                    pts.iter().map(|&p| config.centers.iter().map(|&c| green2d(ctx, p, c)).collect()).collect()
                };
                let rx = project(receivers)?;
                let sz = project(sources)?;
                Ok(CMatrix::from_fn(receivers.len(), sources.len(), |i, j| {
                    rx[i].iter().zip(&sz[j]).zip(&lambda).map(|((a, b), l)| l * a * b).sum()
                }))
            }
        }
    }

    /// Total fields `φ(x_j, z_l) + u^s(x_j, z_l)`.
    pub fn total_block(&self, receivers: &[Point], sources: &[Point]) -> Result<CMatrix> {
        let mut block = self.scattered_block(receivers, sources)?;
        let ctx = self.ctx();
        for (i, &x) in receivers.iter().enumerate() {
            for (j, &z) in sources.iter().enumerate() {
                block[(i, j)] += green2d(ctx, x, z)?;
            }
        }
        Ok(block)
    }
}
