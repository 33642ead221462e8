use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use passive_lsm::pipeline::{self, preset, ExperimentConfig, PRESET_NAMES};
use std::path::PathBuf;

/// Linear sampling reconstructions of sound-soft obstacles from active and
/// passive (cross-correlation) measurements.
#[derive(Parser)]
#[command(name = "passive-lsm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write matrix, indicator maps and manifest.
    Run(RunArgs),
    /// Run a built-in validation suite and print a JSON report.
    Validate {
        /// One of specfun, forward, hk, bridge, beta, quadrature, morozov, covariance, all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Print the resolved configuration of a preset as TOML.
    Info {
        #[arg(long, required_unless_present = "list")]
        preset: Option<String>,
        /// List the preset names instead.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Preset name, e.g. kite-C or "kite-beta(0.3,80)".
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: `out/<preset name>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Noise amplitude relative to the largest matrix entry.
    #[arg(long)]
    noise: Option<f64>,
    /// Override any configuration key, e.g. `--set grid.nx=50`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))?,
        _ => bail!("give exactly one of --preset or --config"),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(noise) = args.noise {
        cfg.noise_amplitude = noise;
    }
    for item in &args.overrides {
        let (key, value) = item.split_once('=').with_context(|| format!("override {item:?} is not KEY=VALUE"))?;
        cfg.set(key.trim(), value.trim())?;
    }
    cfg.validate()?;
    let out = args.out.unwrap_or_else(|| PathBuf::from("out").join(sanitize(&cfg.name)));
    let manifest = pipeline::run(&cfg, &out)?;
    for w in &manifest.warnings {
        log::warn!("{w}");
    }
    println!("wrote {} files to {} (delta = {:.6e})", manifest.files.len() + 1, out.display(), manifest.delta);
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(threads) = std::env::var("LSM_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not set thread count: {e}");
                }
            }
            _ => log::warn!("ignoring LSM_THREADS={threads:?}"),
        }
    }
    let result = match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Validate { suite } => pipeline::validate(&suite).map_err(Into::into).and_then(|report| {
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }),
        Command::Info { preset: name, list } => {
            if list {
                PRESET_NAMES.iter().for_each(|n| println!("{n}"));
                Ok(())
            } else {
                preset(name.as_deref().unwrap_or_default())
                    .and_then(|cfg| cfg.to_toml())
                    .map(|text| print!("{text}"))
                    .map_err(Into::into)
            }
        }
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
