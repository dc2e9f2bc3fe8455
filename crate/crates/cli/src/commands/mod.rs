//! Subcommands. Each resolves its arguments against the optional config
//! file, writes its outputs through [`RunOutput`] and finishes with the
//! manifest.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;
use tls_noise::geometry::{sample_configuration_with, LayerRegion, OrientationClass};
use tls_noise::inference::ModelHypothesis;
use tls_noise::numeric::stream_rng;
use tls_noise::TlsConfiguration;

use crate::config::{given_only, resolve, Geometry};
use crate::error::{invalid, CliResult};
use crate::output::RunOutput;

pub mod brier;
pub mod continuum;
pub mod infer;
pub mod scan;
pub mod simulate;
pub mod spectra;

/// Charge-noise spectra from two-level-system dipoles: simulation and
/// inference.
#[derive(Debug, Parser)]
#[command(name = "tlsnoise", version)]
pub struct Cli {
    /// JSON file supplying values for any long flag (keys as flag names
    /// without the leading dashes); command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate telegraph noise records and compare estimated spectra with
    /// the analytic ones.
    Simulate(simulate::SimulateArgs),
    /// Analytic APSD/CPSD of one configuration, or orientation-class
    /// phase statistics over an ensemble.
    Spectra(spectra::SpectraArgs),
    /// Continuum layer integrals against qubit separation.
    Continuum(continuum::ContinuumArgs),
    /// Single-dipole cost scan under a deliberately wrong assumption.
    ScanUnderdetermined(scan::ScanArgs),
    /// Posterior over (count, length, orientation) from auto spectra.
    InferApsd(infer::InferArgs),
    /// Posterior with cross-spectrum phases, alongside the APSD-only one.
    InferCpsd(infer::InferArgs),
    /// Brier scores of the one-dot, two-dot and two-sample designs.
    BrierEval(brier::BrierArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Spectra(_) => "spectra",
            Command::Continuum(_) => "continuum",
            Command::ScanUnderdetermined(_) => "scan-underdetermined",
            Command::InferApsd(_) => "infer-apsd",
            Command::InferCpsd(_) => "infer-cpsd",
            Command::BrierEval(_) => "brier-eval",
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let file = cli.config.as_deref();
    let name = cli.command.name();
    match &cli.command {
        Command::Simulate(a) => simulate::run(&resolve(a, file)?, name),
        Command::Spectra(a) => spectra::run(&resolve(a, file)?, name),
        Command::Continuum(a) => continuum::run(&resolve(a, file)?, name),
        Command::ScanUnderdetermined(a) => scan::run(&resolve(a, file)?, name),
        Command::InferApsd(a) => infer::run(&resolve(a, file)?, name, false),
        Command::InferCpsd(a) => infer::run(&resolve(a, file)?, name, true),
        Command::BrierEval(a) => brier::run(&resolve(a, file)?, name),
    }
}

/// Writes the manifest; its config holds every flag that was set, from the
/// command line or the config file.
fn finish<T: Serialize>(out: RunOutput, seed: Option<u64>, args: &T) -> CliResult<()> {
    let config = Value::Object(given_only(serde_json::to_value(args).map_err(anyhow::Error::from)?));
    let dir = out.dir().to_path_buf();
    out.finish(seed, &config)?;
    println!("wrote {}", dir.display());
    Ok(())
}

/// Stream tag for configurations drawn by `simulate` and `spectra`.
const CONFIG_STREAM: u64 = 0x51;

/// A configuration read from `tls_file`, or drawn from `n` dipoles of
/// length `ell` with the given orientation in the geometry's layer.
fn configuration(
    tls_file: Option<&Path>,
    out: &mut RunOutput,
    geometry: &Geometry,
    (n, ell, orientation): (usize, f64, OrientationClass),
    seed: u64,
) -> CliResult<TlsConfiguration> {
    if let Some(path) = tls_file {
        out.input(path)?;
        let text = std::fs::read_to_string(path).map_err(anyhow::Error::from)?;
        return Ok(TlsConfiguration::from_json(&text)?);
    }
    let h = hypothesis(geometry, n, ell, orientation, geometry.layer()?)?;
    Ok(sample_configuration_with(&h, &mut stream_rng(seed, &[CONFIG_STREAM]))?)
}

fn hypothesis(
    geometry: &Geometry,
    n: usize,
    ell: f64,
    orientation: OrientationClass,
    layer: LayerRegion,
) -> CliResult<ModelHypothesis> {
    let h = ModelHypothesis {
        n_tls: n,
        dipole_length: ell,
        orientation,
        layer,
        rate_interval: geometry.rates(),
        prior_weight: 1.0,
        epsilon_r: geometry.epsilon_r(),
    };
    h.validate()?;
    Ok(h)
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("--{name} must be positive, got {v}")))
    }
}
