//! Named experiments.
//!
//! | name | setup |
//! |------|-------|
//! | `ellipse-N`, `ellipse-I`, `ellipse-C` | ellipse at (−2, −2) with the N, I or C matrix |
//! | `kite-N`, `kite-I`, `kite-C` | kite at (2, 2) |
//! | `kite-beta(β, L)` | kite, cross-correlation with `L` sources jittered by `β` |
//! | `wavenumber(k, J)` | kite-C at wavenumber `k` (e.g. `4pi`) with `J = L` points |
//! | `setup2(M)` | kite, covariance of `M` realizations with `J = L = M` |
//! | `limited-aperture(N\|I\|C)` | kite with receivers and sources on the upper half circle |
//! | `point-scatterers` | three small disks modelled as point scatterers, I matrix |
//!
//! Arguments may also be written after a colon: `kite-beta:0.3,80`.

use super::config::{ArraySpec, Discretization, ExperimentConfig, Measurement, ScattererSpec};
use crate::error::{Error, Result};
use crate::forward::PointScattererConfig;
use crate::geometry::CurveKind;
use crate::inversion::{GridSpec, RhsMode};
use crate::point::Point;
use std::f64::consts::{PI, TAU};

pub const DEFAULT_SEED: u64 = 2024;

/// Names accepted by [`preset`], with placeholder arguments.
pub const PRESET_NAMES: &[&str] = &[
    "ellipse-N",
    "ellipse-I",
    "ellipse-C",
    "kite-N",
    "kite-I",
    "kite-C",
    "kite-beta(0.3,80)",
    "wavenumber(4pi,160)",
    "setup2(200)",
    "limited-aperture(C)",
    "point-scatterers",
];

fn ellipse() -> ScattererSpec {
    ScattererSpec {
        kind: CurveKind::Ellipse { a: 1.5, b: 1.0 },
        center: Point::new(-2.0, -2.0),
        size: 0.5,
        rotation: 0.0,
    }
}

fn kite() -> ScattererSpec {
    ScattererSpec { kind: CurveKind::Kite, center: Point::new(2.0, 2.0), size: 0.5, rotation: 0.0 }
}

fn base(name: &str, scatterer: ScattererSpec, measurement: Measurement) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        seed: DEFAULT_SEED,
        k: TAU,
        measurement,
        noise_amplitude: 5e-2,
        mask_radius: 5.0,
        scatterers: vec![scatterer],
        point_scatterers: None,
        receivers: ArraySpec { radius: 5.0, count: 80, beta: 0.0, arc: None },
        sources: measurement.uses_sources().then_some(ArraySpec { radius: 50.0, count: 80, beta: 0.1, arc: None }),
        grid: GridSpec::square(6.0, 100),
        rhs: RhsMode::Green,
        discretization: Discretization::default(),
    }
}

fn matrix_letter(s: &str) -> Result<Measurement> {
    match s {
        "N" => Ok(Measurement::NearField),
        "I" => Ok(Measurement::ImaginaryNearField),
        "C" => Ok(Measurement::CrossCorrelation),
        other => Err(Error::UnknownPreset(format!("unknown matrix kind {other:?} (expected N, I or C)"))),
    }
}

/// Parses `4pi`, `2*pi`, `pi`, `12.566` and the like.
fn parse_wavenumber(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase().replace('π', "pi");
    let bad = || Error::UnknownPreset(format!("cannot parse wavenumber {s:?}"));
    if let Some(coef) = t.strip_suffix("pi") {
        let coef = coef.trim_end_matches('*').trim();
        let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
        return Ok(c * PI);
    }
    t.parse::<f64>().map_err(|_| bad())
}

/// Splits `base(a,b)` or `base:a,b` into the base name and arguments.
fn split_name(name: &str) -> Result<(&str, Vec<&str>)> {
    let name = name.trim();
    if let Some(open) = name.find('(') {
        let inner = name[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| Error::UnknownPreset(format!("unbalanced parentheses in {name:?}")))?;
        return Ok((&name[..open], inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()));
    }
    if let Some((b, args)) = name.split_once(':') {
        return Ok((b, args.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()));
    }
    Ok((name, Vec::new()))
}

fn arity(name: &str, args: &[&str], n: usize) -> Result<()> {
    if args.len() != n {
        return Err(Error::UnknownPreset(format!("{name} takes {n} argument(s), got {}", args.len())));
    }
    Ok(())
}

fn num<T: std::str::FromStr>(name: &str, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::UnknownPreset(format!("bad argument {s:?} for {name}")))
}

/// Resolves a preset name to a full configuration.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let (base_name, args) = split_name(name)?;
    let canonical = name.trim().to_string();
    let mut cfg = match base_name {
        "ellipse-N" | "ellipse-I" | "ellipse-C" | "kite-N" | "kite-I" | "kite-C" => {
            arity(base_name, &args, 0)?;
            let (shape, letter) = base_name.split_once('-').expect("dash in name");
            let scatterer = if shape == "ellipse" { ellipse() } else { kite() };
            base(&canonical, scatterer, matrix_letter(letter)?)
        }
        "kite-beta" => {
            arity(base_name, &args, 2)?;
            let beta: f64 = num(base_name, args[0])?;
            let count: usize = num(base_name, args[1])?;
            let mut cfg = base(&canonical, kite(), Measurement::CrossCorrelation);
            cfg.sources = Some(ArraySpec { radius: 50.0, count, beta, arc: None });
            cfg
        }
        "wavenumber" => {
            arity(base_name, &args, 2)?;
            let k = parse_wavenumber(args[0])?;
            let count: usize = num(base_name, args[1])?;
            let mut cfg = base(&canonical, kite(), Measurement::CrossCorrelation);
            cfg.k = k;
            cfg.receivers.count = count;
            if let Some(s) = cfg.sources.as_mut() {
                s.count = count;
            }
            cfg
        }
        "setup2" => {
            arity(base_name, &args, 1)?;
            let m: usize = num(base_name, args[0])?;
            let mut cfg = base(&canonical, kite(), Measurement::Covariance { realizations: m });
            cfg.receivers.count = m;
            cfg.sources = Some(ArraySpec { radius: 50.0, count: m, beta: 0.0, arc: None });
            cfg
        }
        "limited-aperture" => {
            arity(base_name, &args, 1)?;
            let mut cfg = base(&canonical, kite(), matrix_letter(args[0])?);
            cfg.receivers.arc = Some([0.0, PI]);
            if let Some(s) = cfg.sources.as_mut() {
                s.arc = Some([0.0, PI]);
            }
            cfg
        }
        "point-scatterers" => {
            arity(base_name, &args, 0)?;
            let mut cfg = base(&canonical, kite(), Measurement::ImaginaryNearField);
            cfg.scatterers.clear();
            cfg.point_scatterers = Some(PointScattererConfig {
                centers: vec![Point::new(-2.0, 1.5), Point::new(2.0, 2.0), Point::new(0.5, -2.5)],
                radii: vec![0.01; 3],
            });
            cfg
        }
        _ => return Err(Error::UnknownPreset(format!("{name:?}; known presets: {}", PRESET_NAMES.join(", ")))),
    };
    cfg.name = canonical;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kite_c_values() {
        let cfg = preset("kite-C").unwrap();
        let s = cfg.sources.unwrap();
        assert_eq!((s.count, s.beta, s.radius), (80, 0.1, 50.0));
        assert_eq!(cfg.receivers.count, 80);
        assert_eq!(cfg.k, TAU);
        assert_eq!(cfg.noise_amplitude, 5e-2);
        assert_eq!((cfg.grid.nx, cfg.grid.ny, cfg.grid.x_range), (100, 100, [-6.0, 6.0]));
    }

    #[test]
    fn argument_forms() {
        let a = preset("wavenumber(4pi,160)").unwrap();
        let b = preset("wavenumber:4pi,160").unwrap();
        assert!((a.k - 4.0 * PI).abs() < 1e-15);
        assert_eq!(a.receivers.count, 160);
        assert_eq!(a.sources.unwrap().count, 160);
        assert_eq!(a.k, b.k);
        let s2 = preset("setup2(200)").unwrap();
        assert_eq!(s2.measurement, Measurement::Covariance { realizations: 200 });
        assert_eq!((s2.receivers.count, s2.sources.unwrap().count), (200, 200));
        assert_eq!(preset("kite-beta(0.6,200)").unwrap().sources.unwrap().beta, 0.6);
    }

    #[test]
    fn every_listed_preset_resolves() {
        for name in PRESET_NAMES {
            preset(name).unwrap();
        }
        for bad in ["kite-X", "kite-beta(1)", "wavenumber(fourpi,160)", "nothing"] {
            assert!(matches!(preset(bad), Err(Error::UnknownPreset(_))), "{bad}");
        }
    }

    #[test]
    fn toml_round_trip_and_overrides() {
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
            assert_eq!(back, cfg);
        }
        let mut cfg = preset("ellipse-N").unwrap();
        cfg.set("grid.nx", "40").unwrap();
        cfg.set("noise_amplitude", "0.1").unwrap();
        assert_eq!((cfg.grid.nx, cfg.noise_amplitude), (40, 0.1));
        // a scatterer on the receiver circle is rejected
        assert!(cfg.set("scatterers", "[{ shape = \"kite\", center = { x = 5.0, y = 0.0 }, size = 0.5 }]").is_err());
    }
}
