//! Experiment configuration, stored as TOML.

use crate::error::{Error, Result};
use crate::forward::PointScattererConfig;
use crate::geometry::{BoundaryCurve, CurveKind, PointRole, PointSetSpec};
use crate::inversion::{GridSpec, RhsMode};
use crate::point::Point;
use crate::specfun::WaveContext;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One extended scatterer: a canonical shape placed at `center` and scaled
/// so that its diameter equals `size`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScattererSpec {
    #[serde(flatten)]
    pub kind: CurveKind,
    pub center: Point,
    pub size: f64,
    #[serde(default)]
    pub rotation: f64,
}

impl ScattererSpec {
    pub fn curve(&self) -> Result<BoundaryCurve> {
        let mut curve = crate::geometry::place_scatterer(self.kind, self.center, self.size)?;
        curve.rotation = self.rotation;
        Ok(curve)
    }
}

/// Points on a circle or arc centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArraySpec {
    pub radius: f64,
    pub count: usize,
    #[serde(default)]
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arc: Option<[f64; 2]>,
}

impl ArraySpec {
    pub fn point_set_spec(&self, role: PointRole, seed: u64) -> PointSetSpec {
        PointSetSpec { role, radius: self.radius, count: self.count, beta: self.beta, arc: self.arc, seed }
    }
}

/// Which measurement matrix to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measurement {
    NearField,
    ImaginaryNearField,
    CrossCorrelation,
    /// Second setup: empirical covariance over `realizations` draws.
    Covariance {
        realizations: usize,
    },
}

impl Measurement {
    /// Whether the measurement uses the outer source array.
    pub fn uses_sources(&self) -> bool {
        matches!(self, Measurement::CrossCorrelation | Measurement::Covariance { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    /// Initial nodes per scatterer.
    pub nodes: usize,
    /// Double the node count while the density resolution estimate exceeds
    /// `tolerance`, up to `max_nodes`.
    pub adaptive: bool,
    pub tolerance: f64,
    pub max_nodes: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Self { nodes: 256, adaptive: true, tolerance: 1e-8, max_nodes: 1024 }
    }
}

/// A complete, self-contained experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    /// Wavenumber `k`; the wavelength is `2π/k`.
    pub k: f64,
    pub measurement: Measurement,
    pub noise_amplitude: f64,
    pub mask_radius: f64,
    #[serde(default)]
    pub scatterers: Vec<ScattererSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_scatterers: Option<PointScattererConfig>,
    pub receivers: ArraySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sources: Option<ArraySpec>,
    pub grid: GridSpec,
    #[serde(default)]
    pub rhs: RhsMode,
    #[serde(default)]
    pub discretization: Discretization,
}

impl ExperimentConfig {
    pub fn ctx(&self) -> Result<WaveContext> {
        WaveContext::new(self.k)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Sets a dotted key (e.g. `grid.nx` or `noise_amplitude`) to a TOML
    /// literal, then re-validates.
    pub fn set(&mut self, key: &str, literal: &str) -> Result<()> {
        let mut doc: toml::Table = toml::from_str(&self.to_toml()?).map_err(|e| Error::Config(e.to_string()))?;
        let value = parse_literal(literal)?;
        let parts: Vec<&str> = key.split('.').collect();
        let (last, path) = parts.split_last().ok_or_else(|| Error::Config("empty key".into()))?;
        let mut table = &mut doc;
        for part in path {
            let entry = table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(Default::default()));
            table = entry.as_table_mut().ok_or_else(|| Error::Config(format!("{part:?} in {key:?} is not a table")))?;
        }
        table.insert(last.to_string(), value);
        let text = toml::to_string(&doc).map_err(|e| Error::Config(e.to_string()))?;
        *self = Self::from_toml(&text).map_err(|e| Error::Config(format!("override {key}={literal}: {e}")))?;
        Ok(())
    }

    /// Checks values and that receivers and sources lie outside every
    /// scatterer.
    pub fn validate(&self) -> Result<()> {
        let ctx = self.ctx().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.noise_amplitude >= 0.0) {
            return Err(Error::Config(format!("noise amplitude must be nonnegative, got {}", self.noise_amplitude)));
        }
        if !(self.mask_radius > 0.0) {
            return Err(Error::Config(format!("mask radius must be positive, got {}", self.mask_radius)));
        }
        if self.scatterers.is_empty() && self.point_scatterers.is_none() {
            return Err(Error::Config("no scatterer configured".into()));
        }
        if !self.scatterers.is_empty() && self.point_scatterers.is_some() {
            return Err(Error::Config("extended and point scatterers cannot be mixed".into()));
        }
        if let Some(p) = &self.point_scatterers {
            p.validate()?;
        }
        if self.measurement.uses_sources() && self.sources.is_none() {
            return Err(Error::Config("this measurement needs a [sources] array".into()));
        }
        if let Measurement::Covariance { realizations: 0 } = self.measurement {
            return Err(Error::Config("covariance needs at least one realization".into()));
        }
        let d = &self.discretization;
        if d.nodes < 32 || !d.nodes.is_multiple_of(2) || d.max_nodes < d.nodes {
            return Err(Error::Config(format!("invalid discretization {d:?}")));
        }
        self.grid.validate()?;
        let mut arrays =
            vec![crate::geometry::circle_points(&self.receivers.point_set_spec(PointRole::Receiver, self.seed))?];
        if let Some(s) = &self.sources {
            arrays.push(crate::geometry::circle_points(&s.point_set_spec(PointRole::RandomSource, self.seed))?);
        }
        let clearance = 1e-3 * ctx.wavelength();
        let curves = self.scatterers.iter().map(ScattererSpec::curve).collect::<Result<Vec<_>>>()?;
        for (i, c) in curves.iter().enumerate() {
            c.validate()?;
            for set in &arrays {
                for &p in &set.points {
                    if c.contains(p) || c.distance(p) < clearance {
                        return Err(Error::Geometry(format!(
                            "array point ({:.4}, {:.4}) is not exterior to scatterer {i}",
                            p.x, p.y
                        )));
                    }
                }
            }
            for (j, other) in curves.iter().enumerate().skip(i + 1) {
                let touching = (0..256).any(|s| {
                    let t = std::f64::consts::TAU * s as f64 / 256.0;
                    other.contains(c.point(t)) || c.contains(other.point(t))
                });
                if touching {
                    return Err(Error::Geometry(format!("scatterers {i} and {j} overlap")));
                }
            }
        }
        if let Some(p) = &self.point_scatterers {
            for set in &arrays {
                for &x in &set.points {
                    if p.centers.iter().any(|c| c.dist(x) < clearance) {
                        return Err(Error::Geometry("array point coincides with a point scatterer".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

fn parse_literal(literal: &str) -> Result<toml::Value> {
    let doc: toml::Table = toml::from_str(&format!("v = {literal}"))
        .or_else(|_| toml::from_str(&format!("v = {:?}", literal)))
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    Ok(doc["v"].clone())
}
