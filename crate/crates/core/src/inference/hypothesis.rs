use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LayerRegion, OrientationClass};

/// One point of the swept model space. All dipoles share the moment
/// `1 e × dipole_length`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHypothesis {
    pub n_tls: usize,
    /// ℓ in nm.
    pub dipole_length: f64,
    pub orientation: OrientationClass,
    pub layer: LayerRegion,
    /// Switching rates are log-uniform on this interval (Hz).
    pub rate_interval: (f64, f64),
    pub prior_weight: f64,
    pub epsilon_r: f64,
}

impl ModelHypothesis {
    pub fn validate(&self) -> Result<()> {
        if self.n_tls == 0 {
            return Err(Error::invalid("hypothesis needs at least one TLS"));
        }
        if !(self.dipole_length > 0.0 && self.dipole_length.is_finite()) {
            return Err(Error::invalid("dipole length must be positive"));
        }
        if !(0.0..=1.0).contains(&self.prior_weight) {
            return Err(Error::invalid("prior weight must lie in [0, 1]"));
        }
        let (lo, hi) = self.rate_interval;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::InvalidRange(format!("rate interval ({lo}, {hi})")));
        }
        if !(self.epsilon_r > 0.0) {
            return Err(Error::invalid("epsilon_r must be positive"));
        }
        self.layer.validate()
    }

    pub fn moment_e_nm(&self) -> f64 {
        self.dipole_length
    }
}

/// Geometric series of `n` integers from `first` to `last`, rounded and
/// de-duplicated.
pub fn geometric_counts(first: usize, last: usize, n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = crate::numeric::logspace(first as f64, last as f64, n)
        .into_iter()
        .map(|v| v.round() as usize)
        .collect();
    out.dedup();
    out
}

/// `n` log-spaced dipole lengths from `lo` to `hi` (nm).
pub fn log_lengths(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    crate::numeric::logspace(lo, hi, n)
}

/// Cartesian product of counts × lengths × orientations on one layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisSweep {
    pub counts: Vec<usize>,
    pub lengths: Vec<f64>,
    pub orientations: Vec<OrientationClass>,
    pub layer: LayerRegion,
    pub rate_interval: (f64, f64),
    pub epsilon_r: f64,
}

impl HypothesisSweep {
    /// Default grids: 13 geometric counts from 1 to 177 and lengths over two
    /// decades.
    pub fn with_defaults(layer: LayerRegion, orientations: Vec<OrientationClass>, length_range: (f64, f64), n_lengths: usize) -> Self {
        HypothesisSweep {
            counts: geometric_counts(1, 177, 13),
            lengths: log_lengths(length_range.0, length_range.1, n_lengths),
            orientations,
            layer,
            rate_interval: (1e-5, 1.0),
            epsilon_r: 11.0,
        }
    }

    /// Hypotheses in (count, length, orientation) order with a uniform prior.
    pub fn hypotheses(&self) -> Vec<ModelHypothesis> {
        let total = self.counts.len() * self.lengths.len() * self.orientations.len();
        let prior = 1.0 / total as f64;
        let mut out = Vec::with_capacity(total);
        for &n in &self.counts {
            for &l in &self.lengths {
                for &o in &self.orientations {
                    out.push(ModelHypothesis {
                        n_tls: n,
                        dipole_length: l,
                        orientation: o,
                        layer: self.layer.clone(),
                        rate_interval: self.rate_interval,
                        prior_weight: prior,
                        epsilon_r: self.epsilon_r,
                    });
                }
            }
        }
        out
    }
}
