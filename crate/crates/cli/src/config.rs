//! Run configuration: command-line flags layered over an optional JSON file.
//!
//! Every argument struct keeps its fields optional so that "not given" is
//! distinguishable from "given with the default value". Precedence is
//! command line, then file, then the defaults applied by each command.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use tls_noise::geometry::{LayerBox, LayerRegion, OrientationClass};
use tls_noise::spectra::{LogBins, Observable};
use tls_noise::QubitLayout;

use crate::error::{invalid, CliResult};

/// Flags shared by every command.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct Common {
    /// Master RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte-Carlo draws per hypothesis.
    #[arg(long)]
    pub n_mc: Option<usize>,
    /// Acceptance band half-width in standard deviations.
    #[arg(long)]
    pub band_k: Option<f64>,
    #[arg(long)]
    pub bins_per_decade: Option<usize>,
    #[arg(long)]
    pub f_min: Option<f64>,
    #[arg(long)]
    pub f_max: Option<f64>,
    /// voltage, ex, ey or ez.
    #[arg(long)]
    pub observable: Option<String>,
    /// fully-random, hor-random, hor-x, hor-y or ver-z (comma-separated
    /// where a command sweeps several).
    #[arg(long)]
    pub orientation: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl Common {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn band_k(&self) -> CliResult<f64> {
        let k = self.band_k.unwrap_or(tls_noise::inference::DEFAULT_BAND_MULTIPLIER);
        if !(k >= 0.0 && k.is_finite()) {
            return Err(invalid(format!("--band-k must be non-negative, got {k}")));
        }
        Ok(k)
    }

    pub fn observable(&self) -> CliResult<Observable> {
        Ok(Observable::parse(self.observable.as_deref().unwrap_or("voltage"))?)
    }

    pub fn orientations(&self, default: &[OrientationClass]) -> CliResult<Vec<OrientationClass>> {
        match &self.orientation {
            None => Ok(default.to_vec()),
            Some(s) => s.split(',').map(|o| Ok(OrientationClass::parse(o.trim())?)).collect(),
        }
    }

    pub fn orientation(&self, default: OrientationClass) -> CliResult<OrientationClass> {
        match self.orientations(&[default])?.as_slice() {
            [one] => Ok(*one),
            _ => Err(invalid("this command takes a single --orientation")),
        }
    }

    pub fn frequency_range(&self, default: (f64, f64)) -> CliResult<(f64, f64)> {
        let lo = self.f_min.unwrap_or(default.0);
        let hi = self.f_max.unwrap_or(default.1);
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(invalid(format!("need 0 < --f-min < --f-max, got [{lo}, {hi}]")));
        }
        Ok((lo, hi))
    }

    pub fn bins(&self, default_range: (f64, f64), default_per_decade: usize) -> CliResult<LogBins> {
        let (lo, hi) = self.frequency_range(default_range)?;
        Ok(LogBins::new(lo, hi, self.bins_per_decade.unwrap_or(default_per_decade))?)
    }

    pub fn n_mc(&self, default: usize) -> CliResult<usize> {
        match self.n_mc.unwrap_or(default) {
            0 => Err(invalid("--n-mc must be at least 1")),
            n => Ok(n),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

/// Qubit sites and the dipole layer.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct Geometry {
    /// Distance between the two qubit sites on the x axis (nm).
    #[arg(long)]
    pub separation: Option<f64>,
    /// Layer half-width in x (nm).
    #[arg(long)]
    pub x_half: Option<f64>,
    /// Layer half-width in y (nm).
    #[arg(long)]
    pub y_half: Option<f64>,
    /// Lower layer height (nm).
    #[arg(long)]
    pub z_min: Option<f64>,
    /// Upper layer height (nm).
    #[arg(long)]
    pub z_max: Option<f64>,
    #[arg(long)]
    pub epsilon_r: Option<f64>,
    /// Lower bound of the log-uniform switching-rate prior (Hz).
    #[arg(long)]
    pub rate_min: Option<f64>,
    #[arg(long)]
    pub rate_max: Option<f64>,
}

impl Geometry {
    pub fn layout(&self) -> CliResult<QubitLayout> {
        Ok(QubitLayout::pair_on_x(self.separation.unwrap_or(100.0))?)
    }

    pub fn layer(&self) -> CliResult<LayerRegion> {
        let x = self.x_half.unwrap_or(150.0);
        let y = self.y_half.unwrap_or(150.0);
        let z0 = self.z_min.unwrap_or(72.0);
        let z1 = self.z_max.unwrap_or(z0.max(72.0));
        let region = LayerRegion::Box(LayerBox::new((-x, x), (-y, y), (z0, z1))?);
        region.validate()?;
        Ok(region)
    }

    pub fn layer_area_nm2(&self) -> f64 {
        4.0 * self.x_half.unwrap_or(150.0) * self.y_half.unwrap_or(150.0)
    }

    pub fn epsilon_r(&self) -> f64 {
        self.epsilon_r.unwrap_or(11.0)
    }

    pub fn rates(&self) -> (f64, f64) {
        (self.rate_min.unwrap_or(1e-5), self.rate_max.unwrap_or(1.0))
    }
}

/// Drops nulls and empty arrays: they mean "flag not given".
pub(crate) fn given_only(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m
            .into_iter()
            .filter(|(_, v)| !(v.is_null() || v.as_array().is_some_and(|a| a.is_empty())))
            .collect(),
        _ => Map::new(),
    }
}

/// Layers command-line `args` over the JSON object in `file`.
pub fn resolve<T: Serialize + DeserializeOwned>(args: &T, file: Option<&Path>) -> CliResult<T> {
    let cli = given_only(serde_json::to_value(args).context("encoding arguments")?);
    let Some(path) = file else {
        return Ok(serde_json::from_value(Value::Object(cli)).context("decoding arguments")?);
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let parsed: Value = serde_json::from_str(&text).map_err(|e| invalid(format!("config {}: {e}", path.display())))?;
    let Value::Object(mut merged) = parsed else {
        return Err(invalid(format!("config {} must hold a JSON object", path.display())));
    };
    let known: BTreeSet<String> = match serde_json::to_value(args).context("encoding arguments")? {
        Value::Object(m) => m.keys().cloned().collect(),
        _ => BTreeSet::new(),
    };
    if let Some(k) = merged.keys().find(|k| !known.contains(*k)) {
        return Err(invalid(format!("config {}: unknown key '{k}'", path.display())));
    }
    merged.extend(cli);
    serde_json::from_value(Value::Object(merged)).map_err(|e| invalid(format!("config {}: {e}", path.display())))
}
