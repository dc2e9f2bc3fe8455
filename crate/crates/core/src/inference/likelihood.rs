use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample_configuration_with, TlsConfiguration};
use crate::numeric::{stream_id, stream_rng};
use crate::spectra::lorentzian;

use super::hypothesis::ModelHypothesis;
use super::measurement::MeasurementSet;

const MC_STREAM: u64 = 0x3c;
/// Draws per parallel job.
const DRAW_CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodEstimate {
    pub likelihood: f64,
    pub n_success: usize,
    pub n_mc: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodOptions {
    pub n_mc: usize,
    pub rng_seed: u64,
    /// Report `(n_success + 1) / (n_mc + 2)` instead of `n_success / n_mc`.
    pub laplace: bool,
}

impl LikelihoodOptions {
    pub fn new(n_mc: usize, rng_seed: u64) -> Self {
        LikelihoodOptions {
            n_mc,
            rng_seed,
            laplace: false,
        }
    }
}

/// Does one configuration reproduce every band and phase of `m`?
fn accepts(config: &TlsConfiguration, m: &MeasurementSet, kbuf: &mut Vec<f64>, vbuf: &mut Vec<f64>) -> Result<bool> {
    let eps = config.epsilon_r();
    for s in &m.apsd {
        let site = m.layout.site(s.site)?;
        kbuf.clear();
        for t in config.tls() {
            let k = m.observable.kernel(t, site, eps)?;
            kbuf.push(k * k);
        }
        for (i, b) in s.spectrum.bins.iter().enumerate() {
            let v: f64 = config
                .tls()
                .iter()
                .zip(kbuf.iter())
                .map(|(t, w)| w * lorentzian(b.f_center, t.tau()))
                .sum();
            let (lo, hi) = s.spectrum.band(i);
            if !(v >= lo && v <= hi) {
                return Ok(false);
            }
        }
    }
    if !m.phases.is_empty() {
        let (a, b) = m.phase_sites;
        let (ra, rb) = (m.layout.site(a)?, m.layout.site(b)?);
        vbuf.clear();
        for t in config.tls() {
            let ka = m.observable.kernel(t, ra, eps)?;
            let kb = m.observable.kernel(t, rb, eps)?;
            vbuf.push(ka * kb);
        }
        for p in &m.phases {
            let s: f64 = config
                .tls()
                .iter()
                .zip(vbuf.iter())
                .map(|(t, w)| w * lorentzian(p.f_center, t.tau()))
                .sum();
            if (s < 0.0) != p.is_pi() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Fraction of `n_mc` configurations drawn from `hypothesis` that fall inside
/// every band of `measurement` and match every observed phase. Draw `i` uses
/// its own RNG stream, so the count does not depend on scheduling.
pub fn mc_likelihood(
    hypothesis: &ModelHypothesis,
    measurement: &MeasurementSet,
    n_mc: usize,
    rng_seed: u64,
) -> Result<LikelihoodEstimate> {
    if n_mc == 0 {
        return Err(Error::invalid("n_mc must be at least 1"));
    }
    hypothesis.validate()?;
    measurement.validate()?;
    let n_chunks = n_mc.div_ceil(DRAW_CHUNK);
    let n_success = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let (mut kbuf, mut vbuf) = (Vec::new(), Vec::new());
            let mut count = 0usize;
            for draw in c * DRAW_CHUNK..((c + 1) * DRAW_CHUNK).min(n_mc) {
                let mut rng = stream_rng(rng_seed, &[MC_STREAM, draw as u64]);
                let config = sample_configuration_with(hypothesis, &mut rng)?;
                if accepts(&config, measurement, &mut kbuf, &mut vbuf)? {
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(LikelihoodEstimate {
        likelihood: n_success as f64 / n_mc as f64,
        n_success,
        n_mc,
    })
}

/// Seed of hypothesis `index` under master seed `rng_seed`.
pub(crate) fn hypothesis_seed(rng_seed: u64, index: usize) -> u64 {
    stream_id(&[rng_seed, index as u64])
}

/// Likelihoods for every hypothesis, each on its own RNG stream derived from
/// the master seed and the hypothesis index.
pub fn sweep_likelihoods(
    hypotheses: &[ModelHypothesis],
    measurement: &MeasurementSet,
    options: &LikelihoodOptions,
) -> Result<Vec<LikelihoodEstimate>> {
    hypotheses
        .par_iter()
        .enumerate()
        .map(|(j, h)| {
            let mut est = mc_likelihood(h, measurement, options.n_mc, hypothesis_seed(options.rng_seed, j))?;
            if options.laplace {
                est.likelihood = (est.n_success as f64 + 1.0) / (est.n_mc as f64 + 2.0);
            }
            Ok(est)
        })
        .collect()
}
