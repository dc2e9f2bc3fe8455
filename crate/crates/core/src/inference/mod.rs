//! Bayesian inference over swept TLS hypotheses.
//!
//! A hypothesis fixes the dipole count, dipole length, orientation class,
//! layer geometry and switching-rate prior. Its likelihood for a measured
//! set of binned spectra is the fraction of configurations drawn from it
//! whose analytic spectra fall inside every measured band (and, optionally,
//! reproduce observed cross-spectrum phases).
//!
//! Posteriors are only as complete as the hypothesis set: mass that belongs
//! to configurations outside the sweep is redistributed over the hypotheses
//! that were tested. [`OUT_OF_MODEL_WARNING`] is attached to every report.

mod experiments;
mod filters;
mod hypothesis;
mod likelihood;
mod measurement;
mod posterior;
mod scan;

pub use experiments::{
    ridge_crest, BrierOutcome, CrestPoint, BrierProtocol, PhaseFilterOutcome, PhaseFilterStudy, RidgeOutcome,
    RidgeStudy,
};
pub use filters::{band_accept, cost, phase_accept, MeasuredSpectrum};
pub use hypothesis::{geometric_counts, log_lengths, HypothesisSweep, ModelHypothesis};
pub use likelihood::{mc_likelihood, sweep_likelihoods, LikelihoodEstimate, LikelihoodOptions};
pub use measurement::{
    DEFAULT_BAND_MULTIPLIER,
    BinnedSpectrum, MeasurementSet, NoiseModel, PhaseObservation, SiteSpectrum, SpectrumBin,
    SyntheticSetup,
};
pub use posterior::{
    bayes_update, brier, expectations, sequential_update, ConditionalExpectation, Expectations,
    MarginalCell, PosteriorEntry, PosteriorTable,
};
pub use scan::{cost_map, scan_to_csv, underdetermination_scan, ScanFamily, ScanPoint, ScanSetup};

/// Standing caveat printed with every posterior.
pub const OUT_OF_MODEL_WARNING: &str = "warning: posterior probabilities are normalized over the \
swept hypotheses only; configurations outside the sweep are not represented and the listed \
probabilities overstate confidence if the true configuration is out of model";
