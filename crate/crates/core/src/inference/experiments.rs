//! Synthetic end-to-end experiments: Brier comparison of measurement
//! designs, the (n_T, ℓ) posterior ridge and the effect of phase filtering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample_configuration_with, LayerBox, LayerRegion, OrientationClass, QubitLayout};
use crate::numeric::{stream_id, stream_rng};
use crate::spectra::{LogBins, Observable};
use crate::telegraph::TimeSeriesSpec;

use super::hypothesis::{HypothesisSweep, ModelHypothesis};
use super::likelihood::{sweep_likelihoods, LikelihoodOptions};
use super::measurement::{NoiseModel, SyntheticSetup};
use super::posterior::{bayes_update, brier, expectations, sequential_update, Expectations, PosteriorTable};

const TRUTH_STREAM: u64 = 0x7a;
const NOISE_STREAM: u64 = 0x7b;
const MC_SEED_STREAM: u64 = 0x7c;

fn truth_config(h: &ModelHypothesis, seed: u64, sample: u64) -> Result<crate::TlsConfiguration> {
    sample_configuration_with(h, &mut stream_rng(seed, &[TRUTH_STREAM, sample]))
}

/// Gives the noise model its own realization seed for `(seed, sample)`.
fn reseed(noise: &NoiseModel, seed: u64, sample: u64) -> NoiseModel {
    match noise {
        NoiseModel::Simulated(spec) => NoiseModel::Simulated(TimeSeriesSpec {
            rng_seed: stream_id(&[seed, NOISE_STREAM, sample]),
            ..*spec
        }),
        other => other.clone(),
    }
}

fn mc_options(n_mc: usize, seed: u64, tag: u64) -> LikelihoodOptions {
    LikelihoodOptions::new(n_mc, stream_id(&[seed, MC_SEED_STREAM, tag]))
}

/// Posterior over `hypotheses`, or the prior itself when every hypothesis is
/// rejected. The flag reports whether the fallback was used.
fn update_or_prior(hypotheses: &[ModelHypothesis], samples: &[Vec<f64>], n_mc: usize, seed: u64) -> Result<(PosteriorTable, bool)> {
    match sequential_update(hypotheses, samples, n_mc, seed) {
        Ok(t) => Ok((t, false)),
        Err(Error::AllRejected) => {
            let ones = vec![1.0; hypotheses.len()];
            Ok((bayes_update(hypotheses, &ones, n_mc, seed)?, true))
        }
        Err(e) => Err(e),
    }
}

/// Mock experiment comparing one dot, two dots and two samples measured with
/// one dot, for a known dipole count and length among a small grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrierProtocol {
    pub layer: LayerRegion,
    pub layout: QubitLayout,
    pub observable: Observable,
    pub orientation: OrientationClass,
    pub counts: Vec<usize>,
    /// Dipole lengths ℓ (nm).
    pub lengths: Vec<f64>,
    /// Index into the hypothesis list (count-major).
    pub truth: usize,
    pub rate_interval: (f64, f64),
    pub epsilon_r: f64,
    pub bins: LogBins,
    pub band_multiplier: f64,
    pub noise: NoiseModel,
    pub n_mc: usize,
}

impl Default for BrierProtocol {
    /// One true dipole of ℓ = 1 nm among ℓ ∈ {0.1, 1, 10} nm and counts
    /// {1, 10}, in a 200 × 300 × 25 nm layer starting 50 nm above the dots.
    fn default() -> Self {
        BrierProtocol {
            layer: LayerRegion::Box(LayerBox::new((-100.0, 100.0), (-150.0, 150.0), (50.0, 75.0)).unwrap()),
            layout: QubitLayout::pair_on_x(100.0).unwrap(),
            observable: Observable::Voltage,
            orientation: OrientationClass::VerticalZ,
            counts: vec![1, 10],
            lengths: vec![0.1, 1.0, 10.0],
            truth: 1,
            rate_interval: (1e-5, 1.0),
            epsilon_r: 11.0,
            bins: LogBins::new(1e-4, 1e-1, 10).unwrap(),
            band_multiplier: 3.0,
            noise: NoiseModel::Simulated(TimeSeriesSpec::new(1e5, 1.0, 100, 0).unwrap()),
            n_mc: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrierOutcome {
    pub seed: u64,
    pub one_dot: f64,
    pub two_dots: f64,
    pub two_samples: f64,
    /// Designs whose likelihoods were all zero and fell back to the prior.
    pub all_rejected: Vec<&'static str>,
    pub tables: [PosteriorTable; 3],
}

impl BrierProtocol {
    pub fn hypotheses(&self) -> Vec<ModelHypothesis> {
        let total = (self.counts.len() * self.lengths.len()) as f64;
        let mut out = Vec::new();
        for &n in &self.counts {
            for &l in &self.lengths {
                out.push(ModelHypothesis {
                    n_tls: n,
                    dipole_length: l,
                    orientation: self.orientation,
                    layer: self.layer.clone(),
                    rate_interval: self.rate_interval,
                    prior_weight: 1.0 / total,
                    epsilon_r: self.epsilon_r,
                });
            }
        }
        out
    }

    fn setup(&self, sites: Vec<usize>, seed: u64, sample: u64) -> SyntheticSetup {
        SyntheticSetup {
            layout: self.layout.clone(),
            observable: self.observable,
            bins: self.bins.clone(),
            band_multiplier: self.band_multiplier,
            noise: reseed(&self.noise, seed, sample),
            apsd_sites: sites,
            phase_sites: None,
        }
    }

    /// Runs all three designs for one seed. Sample A is shared by the
    /// one-dot, two-dot and two-sample designs; sample B is a fresh
    /// configuration from the same true hypothesis.
    pub fn run(&self, seed: u64) -> Result<BrierOutcome> {
        let hyps = self.hypotheses();
        let truth = hyps
            .get(self.truth)
            .ok_or_else(|| Error::invalid("truth index out of range"))?;
        let sample_a = truth_config(truth, seed, 0)?;
        let sample_b = truth_config(truth, seed, 1)?;

        let one_a = self.setup(vec![0], seed, 0).measure(&sample_a)?;
        let two_a = self.setup(vec![0, 1], seed, 0).measure(&sample_a)?;
        let one_b = self.setup(vec![0], seed, 1).measure(&sample_b)?;

        let lik = |m, tag| -> Result<Vec<f64>> {
            Ok(sweep_likelihoods(&hyps, m, &mc_options(self.n_mc, seed, tag))?
                .iter()
                .map(|e| e.likelihood)
                .collect())
        };
        let l_one_a = lik(&one_a, 0)?;
        let l_two_a = lik(&two_a, 1)?;
        let l_one_b = lik(&one_b, 2)?;

        let mut all_rejected = Vec::new();
        let mut design = |name, samples: &[Vec<f64>]| -> Result<PosteriorTable> {
            let (t, fallback) = update_or_prior(&hyps, samples, self.n_mc, seed)?;
            if fallback {
                all_rejected.push(name);
            }
            Ok(t)
        };
        let t1 = design("one-dot", &[l_one_a.clone()])?;
        let t2 = design("two-dots", &[l_two_a])?;
        let t3 = design("two-samples", &[l_one_a, l_one_b])?;
        Ok(BrierOutcome {
            seed,
            one_dot: brier(&t1, self.truth)?,
            two_dots: brier(&t2, self.truth)?,
            two_samples: brier(&t3, self.truth)?,
            all_rejected,
            tables: [t1, t2, t3],
        })
    }
}

/// Sweep over (n_T, ℓ) on synthetic data from one hypothesis, for studying
/// the shape of the marginal posterior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeStudy {
    pub sweep: HypothesisSweep,
    /// Index of the true hypothesis in `sweep.hypotheses()`.
    pub truth: usize,
    pub layout: QubitLayout,
    pub observable: Observable,
    pub apsd_sites: Vec<usize>,
    pub bins: LogBins,
    pub band_multiplier: f64,
    pub noise: NoiseModel,
    pub n_mc: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RidgeOutcome {
    pub table: PosteriorTable,
    pub expectations: Expectations,
    pub crest: Vec<CrestPoint>,
    /// Mass-weighted slope of the crest in (ln n_T, ln ℓ).
    pub slope: Option<f64>,
}

/// One n_T row of the marginal posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrestPoint {
    pub n_tls: usize,
    /// Posterior-weighted mean of ln ℓ within the row.
    pub mean_ln_ell: f64,
    /// Posterior mass of the row.
    pub mass: f64,
}

/// Crest of the marginal posterior (one point per n_T row with mass) and the
/// mass-weighted least-squares slope of ln ℓ against ln n_T.
pub fn ridge_crest(e: &Expectations) -> (Vec<CrestPoint>, Option<f64>) {
    let (counts, _) = e.axes();
    let crest: Vec<CrestPoint> = counts
        .iter()
        .filter_map(|&n| {
            let row: Vec<_> = e.marginal.iter().filter(|c| c.n_tls == n).collect();
            let mass: f64 = row.iter().map(|c| c.probability).sum();
            (mass > 0.0).then(|| CrestPoint {
                n_tls: n,
                mean_ln_ell: row.iter().map(|c| c.probability * c.ell_nm.ln()).sum::<f64>() / mass,
                mass,
            })
        })
        .collect();
    if crest.len() < 2 {
        return (crest, None);
    }
    let w: f64 = crest.iter().map(|c| c.mass).sum();
    let x = |c: &CrestPoint| (c.n_tls as f64).ln();
    let mx = crest.iter().map(|c| c.mass * x(c)).sum::<f64>() / w;
    let my = crest.iter().map(|c| c.mass * c.mean_ln_ell).sum::<f64>() / w;
    let sxy: f64 = crest.iter().map(|c| c.mass * (x(c) - mx) * (c.mean_ln_ell - my)).sum();
    let sxx: f64 = crest.iter().map(|c| c.mass * (x(c) - mx).powi(2)).sum();
    (crest, (sxx > 0.0).then(|| sxy / sxx))
}

impl RidgeStudy {
    pub fn run(&self, seed: u64) -> Result<RidgeOutcome> {
        let hyps = self.sweep.hypotheses();
        let truth = hyps
            .get(self.truth)
            .ok_or_else(|| Error::invalid("truth index out of range"))?;
        let config = truth_config(truth, seed, 0)?;
        let setup = SyntheticSetup {
            layout: self.layout.clone(),
            observable: self.observable,
            bins: self.bins.clone(),
            band_multiplier: self.band_multiplier,
            noise: reseed(&self.noise, seed, 0),
            apsd_sites: self.apsd_sites.clone(),
            phase_sites: None,
        };
        let m = setup.measure(&config)?;
        let opts = mc_options(self.n_mc, seed, 0);
        let lik: Vec<f64> = sweep_likelihoods(&hyps, &m, &opts)?
            .iter()
            .map(|e| e.likelihood)
            .collect();
        let table = bayes_update(&hyps, &lik, self.n_mc, opts.rng_seed)?;
        let expectations = expectations(&table);
        let (crest, slope) = ridge_crest(&expectations);
        Ok(RidgeOutcome {
            table,
            expectations,
            crest,
            slope,
        })
    }
}

/// Two-site inference with and without CPSD phase observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseFilterStudy {
    pub sweep: HypothesisSweep,
    pub truth: usize,
    pub layout: QubitLayout,
    pub observable: Observable,
    pub bins: LogBins,
    pub band_multiplier: f64,
    pub noise: NoiseModel,
    pub n_mc: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseFilterOutcome {
    pub seed: u64,
    pub apsd_only: Expectations,
    pub with_phase: Expectations,
    pub n_phase_pi: usize,
}

impl PhaseFilterOutcome {
    /// Phase information moved mass towards fewer, larger dipoles.
    pub fn shifted_to_fewer_larger(&self) -> bool {
        self.with_phase.mean_n_tls < self.apsd_only.mean_n_tls
            && self.with_phase.mean_ell_nm > self.apsd_only.mean_ell_nm
    }
}

impl PhaseFilterStudy {
    pub fn run(&self, seed: u64) -> Result<PhaseFilterOutcome> {
        let hyps = self.sweep.hypotheses();
        let truth = hyps
            .get(self.truth)
            .ok_or_else(|| Error::invalid("truth index out of range"))?;
        let config = truth_config(truth, seed, 0)?;
        let setup = SyntheticSetup {
            layout: self.layout.clone(),
            observable: self.observable,
            bins: self.bins.clone(),
            band_multiplier: self.band_multiplier,
            noise: reseed(&self.noise, seed, 0),
            apsd_sites: vec![0, 1],
            phase_sites: Some((0, 1)),
        };
        let with = setup.measure(&config)?;
        let without = with.clone().without_phases();
        let opts = mc_options(self.n_mc, seed, 0);
        let post = |m| -> Result<Expectations> {
            let lik: Vec<f64> = sweep_likelihoods(&hyps, m, &opts)?
                .iter()
                .map(|e| e.likelihood)
                .collect();
            Ok(expectations(&bayes_update(&hyps, &lik, self.n_mc, opts.rng_seed)?))
        };
        Ok(PhaseFilterOutcome {
            seed,
            apsd_only: post(&without)?,
            with_phase: post(&with)?,
            n_phase_pi: with.phases.iter().filter(|p| p.is_pi()).count(),
        })
    }
}
