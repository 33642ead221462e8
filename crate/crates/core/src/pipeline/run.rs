//! Orchestration: acquire → noise → invert → write.

use super::config::{ExperimentConfig, Measurement};
use super::output::{sha256_hex, write_indicator, write_indicator_raw, write_pgm};
use crate::acquisition::{
    add_noise, covariance_matrix, cross_correlation_matrix, imaginary_near_field_matrix, near_field_matrix, write_csv,
    FieldMatrix,
};
use crate::error::{Error, Result};
use crate::forward::{Medium, SingleLayerSystem};
use crate::geometry::{circle_points, PointRole, PointSet};
use crate::inversion::{indicator_map, IndicatorMap};
use crate::point::Point;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

pub const MATRIX_FILE: &str = "matrix.csv";
pub const INDICATOR_RAW_FILE: &str = "indicator_raw.csv";
pub const INDICATOR_FILE: &str = "indicator.csv";
pub const IMAGE_FILE: &str = "indicator.pgm";
pub const MANIFEST_FILE: &str = "manifest.json";

trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| match e {
            e @ Error::Stage { .. } => e,
            e => Error::Stage { stage, source: Box::new(e) },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub software: String,
    pub version: String,
    pub config: ExperimentConfig,
    /// Spectral norm of the added noise.
    pub delta: f64,
    /// Noise level used in the discrepancy equation (floored for noise-free
    /// data).
    pub delta_used: f64,
    /// Boundary nodes per scatterer after refinement.
    pub nodes: Vec<usize>,
    pub condition_estimate: Option<f64>,
    pub warnings: Vec<String>,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
    pub files: Vec<FileRecord>,
}

/// Results of a run before anything is written.
#[derive(Debug)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub receivers: PointSet,
    pub sources: Option<PointSet>,
    /// The noise-free matrix.
    pub clean: FieldMatrix,
    pub matrix: FieldMatrix,
    pub map: IndicatorMap,
    pub nodes: Vec<usize>,
    pub condition_estimate: Option<f64>,
    pub warnings: Vec<String>,
    pub timings: BTreeMap<String, f64>,
}

/// Builds the medium, refining the boundary discretization until the
/// density resolution estimate for the nearest array point falls below the
/// configured tolerance.
pub fn build_medium(cfg: &ExperimentConfig, probes: &[Point]) -> Result<(Medium, Vec<usize>)> {
    let ctx = cfg.ctx()?;
    if let Some(points) = &cfg.point_scatterers {
        return Ok((Medium::Points { config: points.clone(), ctx }, Vec::new()));
    }
    let curves = cfg.scatterers.iter().map(|s| s.curve()).collect::<Result<Vec<_>>>()?;
    let d = cfg.discretization;
    let mut n = d.nodes;
    loop {
        let boundaries = curves.iter().map(|c| c.discretize(n)).collect::<Result<Vec<_>>>()?;
        let system = SingleLayerSystem::assemble(boundaries, ctx)?;
        if !d.adaptive || n * 2 > d.max_nodes {
            return Ok((Medium::Obstacles(system), vec![n; curves.len()]));
        }
        let mut worst: f64 = 0.0;
        for c in &curves {
            if let Some(&y) = probes.iter().min_by(|a, b| c.distance(**a).total_cmp(&c.distance(**b))) {
                worst = worst.max(system.solve_point_source(y)?.spectral_tail());
            }
        }
        if worst <= d.tolerance {
            return Ok((Medium::Obstacles(system), vec![n; curves.len()]));
        }
        log::info!("refining boundaries from {n} to {} nodes (resolution estimate {worst:.2e})", 2 * n);
        n *= 2;
    }
}

/// Runs the experiment in memory.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        timings.insert(name.to_string(), clock.elapsed().as_secs_f64());
        clock = Instant::now();
    };
    cfg.validate().stage("validate")?;
    let ctx = cfg.ctx().stage("validate")?;
    let receivers = circle_points(&cfg.receivers.point_set_spec(PointRole::Receiver, cfg.seed)).stage("geometry")?;
    let sources = match (&cfg.sources, cfg.measurement.uses_sources()) {
        (Some(s), true) => {
            let role = if s.beta > 0.0 { PointRole::RandomSource } else { PointRole::DeterministicSource };
            Some(circle_points(&s.point_set_spec(role, cfg.seed)).stage("geometry")?)
        }
        _ => None,
    };
    let mut probes = receivers.points.clone();
    if let Some(s) = &sources {
        probes.extend_from_slice(&s.points);
    }
    let (medium, nodes) = build_medium(cfg, &probes).stage("forward")?;
    let mut warnings = Vec::new();
    let condition_estimate = match &medium {
        Medium::Obstacles(sys) => {
            warnings.extend(sys.warnings().iter().map(|w| format!("{w:?}")));
            Some(sys.condition_estimate())
        }
        _ => None,
    };
    lap("forward", &mut timings);
    let clean = match cfg.measurement {
        Measurement::NearField => near_field_matrix(&receivers, &medium),
        Measurement::ImaginaryNearField => {
            near_field_matrix(&receivers, &medium).and_then(|n| imaginary_near_field_matrix(&n))
        }
        Measurement::CrossCorrelation => {
            cross_correlation_matrix(&receivers, sources.as_ref().expect("validated"), &medium)
        }
        Measurement::Covariance { realizations } => {
            covariance_matrix(&receivers, sources.as_ref().expect("validated"), realizations, cfg.seed, &medium)
        }
    }
    .stage("acquisition")?;
    lap("acquisition", &mut timings);
    let matrix = add_noise(&clean, cfg.noise_amplitude, cfg.seed).stage("noise")?;
    lap("noise", &mut timings);
    let map =
        indicator_map(&matrix.entries, &receivers.points, &ctx, matrix.delta(), &cfg.grid, cfg.mask_radius, cfg.rhs)
            .stage("inversion")?;
    lap("inversion", &mut timings);
    Ok(RunOutput {
        config: cfg.clone(),
        receivers,
        sources,
        clean,
        matrix,
        map,
        nodes,
        condition_estimate,
        warnings,
        timings,
    })
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<FileRecord> {
    std::fs::write(dir.join(name), bytes)?;
    Ok(FileRecord { name: name.to_string(), bytes: bytes.len() as u64, sha256: sha256_hex(bytes) })
}

/// Runs the experiment and writes all outputs plus `manifest.json` to `dir`.
pub fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<RunManifest> {
    let out = execute(cfg)?;
    write_outputs(&out, dir).stage("output")
}

/// Writes the files of a finished run.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<RunManifest> {
    std::fs::create_dir_all(dir)?;
    let start = Instant::now();
    let mut files = Vec::new();
    let mut buf = Vec::new();
    write_csv(&out.matrix, &mut buf)?;
    files.push(write_file(dir, MATRIX_FILE, &buf)?);
    buf.clear();
    write_indicator_raw(&out.map, &mut buf)?;
    files.push(write_file(dir, INDICATOR_RAW_FILE, &buf)?);
    buf.clear();
    write_indicator(&out.map, &mut buf)?;
    files.push(write_file(dir, INDICATOR_FILE, &buf)?);
    buf.clear();
    write_pgm(&out.map, &mut buf)?;
    files.push(write_file(dir, IMAGE_FILE, &buf)?);
    let mut timings = out.timings.clone();
    timings.insert("output".into(), start.elapsed().as_secs_f64());
    let manifest = RunManifest {
        software: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: out.config.clone(),
        delta: out.matrix.delta(),
        delta_used: out.map.delta,
        nodes: out.nodes.clone(),
        condition_estimate: out.condition_estimate,
        warnings: out.warnings.clone(),
        timings,
        files,
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(dir.join(MANIFEST_FILE), json + "\n")?;
    Ok(manifest)
}

/// Reads `manifest.json` from `dir` and checks every listed file against its
/// recorded size and checksum.
pub fn verify_manifest(dir: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(dir.join(MANIFEST_FILE))?;
    let manifest: RunManifest = serde_json::from_str(&text)?;
    for f in &manifest.files {
        let bytes = std::fs::read(dir.join(&f.name))?;
        if bytes.len() as u64 != f.bytes || sha256_hex(&bytes) != f.sha256 {
            return Err(Error::Parse(format!("{} does not match its manifest checksum", f.name)));
        }
    }
    Ok(manifest)
}
