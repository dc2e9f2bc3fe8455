use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{QubitLayout, TlsConfiguration};
use crate::numeric::mean_std;
use crate::spectra::{analytic_apsd, analytic_cpsd, FrequencyGrid, LogBins, Observable};
use crate::telegraph::{cross_periodogram, periodogram, synthesize_realization, TimeSeriesSpec};

/// Default band half-width in standard deviations.
pub const DEFAULT_BAND_MULTIPLIER: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBin {
    pub f_center: f64,
    pub mean: f64,
    pub sigma: f64,
}

/// Binned measured spectrum with acceptance bands `mean ± k·sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedSpectrum {
    pub bins: Vec<SpectrumBin>,
    pub band_multiplier: f64,
}

impl BinnedSpectrum {
    pub fn new(bins: Vec<SpectrumBin>, band_multiplier: f64) -> Result<Self> {
        let s = BinnedSpectrum {
            bins,
            band_multiplier,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins.is_empty() {
            return Err(Error::invalid("binned spectrum has no bins"));
        }
        if !(self.band_multiplier >= 0.0) {
            return Err(Error::invalid("band multiplier must be non-negative"));
        }
        for b in &self.bins {
            if !(b.sigma > 0.0) || !b.mean.is_finite() || !(b.f_center > 0.0) {
                return Err(Error::invalid(format!(
                    "bin at {} Hz needs positive sigma and finite mean",
                    b.f_center
                )));
            }
        }
        if self.bins.windows(2).any(|w| w[1].f_center <= w[0].f_center) {
            return Err(Error::invalid("bin centers must be strictly increasing"));
        }
        Ok(())
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.f_center).collect()
    }

    pub fn center_grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(self.centers())
    }

    /// Acceptance interval of bin `i`.
    pub fn band(&self, i: usize) -> (f64, f64) {
        let b = &self.bins[i];
        let w = self.band_multiplier * b.sigma;
        (b.mean - w, b.mean + w)
    }

    /// True iff `values[i]` lies inside band `i` for every bin.
    pub(crate) fn contains(&self, values: &[f64]) -> bool {
        values.len() == self.bins.len()
            && values.iter().enumerate().all(|(i, v)| {
                let (lo, hi) = self.band(i);
                *v >= lo && *v <= hi
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteSpectrum {
    pub site: usize,
    pub spectrum: BinnedSpectrum,
}

/// Observed cross-spectrum phase, 0 or π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseObservation {
    pub f_center: f64,
    pub phase: f64,
}

impl PhaseObservation {
    pub fn is_pi(&self) -> bool {
        !crate::spectra::is_zero_phase(self.phase)
    }
}

/// Everything one experiment (one sample) provides to the inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    pub layout: QubitLayout,
    pub observable: Observable,
    pub apsd: Vec<SiteSpectrum>,
    /// Site pair the phases refer to; ignored when `phases` is empty.
    pub phase_sites: (usize, usize),
    pub phases: Vec<PhaseObservation>,
}

impl MeasurementSet {
    pub fn new(
        layout: QubitLayout,
        observable: Observable,
        apsd: Vec<SiteSpectrum>,
        phase_sites: (usize, usize),
        phases: Vec<PhaseObservation>,
    ) -> Result<Self> {
        let m = MeasurementSet {
            layout,
            observable,
            apsd,
            phase_sites,
            phases,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.apsd.is_empty() {
            return Err(Error::invalid("measurement needs at least one APSD"));
        }
        for s in &self.apsd {
            self.layout.site(s.site)?;
            s.spectrum.validate()?;
        }
        if !self.phases.is_empty() {
            let (a, b) = self.phase_sites;
            self.layout.site(a)?;
            self.layout.site(b)?;
            if a == b {
                return Err(Error::invalid("phase observations need two distinct sites"));
            }
            for p in &self.phases {
                let ok = p.phase.abs() < 1e-9 || (p.phase - PI).abs() < 1e-9;
                if !ok || !(p.f_center > 0.0) {
                    return Err(Error::invalid(format!(
                        "phase observation at {} Hz must be 0 or π",
                        p.f_center
                    )));
                }
            }
        }
        Ok(())
    }

    /// Same measurement with every band multiplier replaced by `k`.
    pub fn with_band_multiplier(mut self, k: f64) -> Self {
        for s in &mut self.apsd {
            s.spectrum.band_multiplier = k;
        }
        self
    }

    /// Same measurement without phase observations.
    pub fn without_phases(mut self) -> Self {
        self.phases.clear();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("measurement serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: MeasurementSet =
            serde_json::from_str(s).map_err(|e| Error::invalid(format!("measurement JSON: {e}")))?;
        m.validate()?;
        Ok(m)
    }
}

/// How synthetic measurement uncertainties are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    /// Telegraph records are simulated and FFT-estimated; bin means and
    /// sigmas are the ensemble mean and standard deviation over realizations
    /// of the bin-averaged periodogram. Phases are the sign of the binned
    /// cross periodogram.
    Simulated(TimeSeriesSpec),
    /// Bin means are the analytic spectrum at the bin center and
    /// `sigma = rel_sigma · mean`. Phases are the analytic phase.
    Analytic { rel_sigma: f64 },
}

/// Recipe for turning a known configuration into a [`MeasurementSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSetup {
    pub layout: QubitLayout,
    pub observable: Observable,
    pub bins: LogBins,
    pub band_multiplier: f64,
    pub noise: NoiseModel,
    pub apsd_sites: Vec<usize>,
    pub phase_sites: Option<(usize, usize)>,
}

impl SyntheticSetup {
    pub fn measure(&self, truth: &TlsConfiguration) -> Result<MeasurementSet> {
        if self.apsd_sites.is_empty() {
            return Err(Error::invalid("synthetic setup needs at least one APSD site"));
        }
        let centers = self.bins.centers();
        let (apsd, phases) = match &self.noise {
            NoiseModel::Analytic { rel_sigma } => self.analytic(truth, &centers, *rel_sigma)?,
            NoiseModel::Simulated(spec) => self.simulated(truth, &centers, spec)?,
        };
        MeasurementSet::new(
            self.layout.clone(),
            self.observable,
            apsd,
            self.phase_sites.unwrap_or((0, 0)),
            phases,
        )
    }

    fn analytic(
        &self,
        truth: &TlsConfiguration,
        centers: &[f64],
        rel_sigma: f64,
    ) -> Result<(Vec<SiteSpectrum>, Vec<PhaseObservation>)> {
        if !(rel_sigma > 0.0) {
            return Err(Error::invalid("rel_sigma must be positive"));
        }
        let grid = FrequencyGrid::new(centers.to_vec())?;
        let apsd = self
            .apsd_sites
            .iter()
            .map(|&site| {
                let s = analytic_apsd(truth, &self.layout, site, self.observable, &grid)?;
                let bins = centers
                    .iter()
                    .zip(&s.values)
                    .map(|(&f, &v)| SpectrumBin {
                        f_center: f,
                        mean: v,
                        sigma: rel_sigma * v,
                    })
                    .collect();
                Ok(SiteSpectrum {
                    site,
                    spectrum: BinnedSpectrum::new(bins, self.band_multiplier)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let phases = match self.phase_sites {
            Some((a, b)) => {
                let c = analytic_cpsd(truth, &self.layout, a, b, self.observable, &grid)?;
                centers
                    .iter()
                    .zip(&c.phase)
                    .map(|(&f, &p)| PhaseObservation { f_center: f, phase: p })
                    .collect()
            }
            None => Vec::new(),
        };
        Ok((apsd, phases))
    }

    fn simulated(
        &self,
        truth: &TlsConfiguration,
        centers: &[f64],
        spec: &TimeSeriesSpec,
    ) -> Result<(Vec<SiteSpectrum>, Vec<PhaseObservation>)> {
        spec.validate()?;
        let mut sites = self.apsd_sites.clone();
        let pair = self.phase_sites.map(|(a, b)| {
            let mut idx = |s: usize| match sites.iter().position(|&x| x == s) {
                Some(i) => i,
                None => {
                    sites.push(s);
                    sites.len() - 1
                }
            };
            (idx(a), idx(b))
        });
        let grid = spec.fft_grid();
        let members = self.bins.members(grid.values());
        if let Some(i) = members.iter().position(Vec::is_empty) {
            return Err(Error::GridCoverage {
                lo: self.bins.edges[i],
                hi: self.bins.edges[i + 1],
            });
        }
        let bin_mean = |p: &[f64]| -> Vec<f64> {
            members
                .iter()
                .map(|m| m.iter().map(|&i| p[i]).sum::<f64>() / m.len() as f64)
                .collect()
        };
        // Per realization: binned APSD per site and binned cross periodogram.
        let per_real = (0..spec.n_realizations)
            .into_par_iter()
            .map(|r| {
                let rec = synthesize_realization(truth, &self.layout, &sites, self.observable, spec, r)?;
                let apsd: Vec<Vec<f64>> = rec
                    .iter()
                    .take(self.apsd_sites.len())
                    .map(|x| bin_mean(&periodogram(x, spec.sample_interval)))
                    .collect();
                let cross = match pair {
                    Some((a, b)) => {
                        let c = cross_periodogram(&rec[a], &rec[b], spec.sample_interval)?;
                        members
                            .iter()
                            .map(|m| m.iter().map(|&i| c[i]).sum::<Complex64>())
                            .collect()
                    }
                    None => Vec::new(),
                };
                Ok((apsd, cross))
            })
            .collect::<Result<Vec<(Vec<Vec<f64>>, Vec<Complex64>)>>>()?;

        let apsd = self
            .apsd_sites
            .iter()
            .enumerate()
            .map(|(si, &site)| {
                let bins = centers
                    .iter()
                    .enumerate()
                    .map(|(b, &f)| {
                        let vals: Vec<f64> = per_real.iter().map(|(a, _)| a[si][b]).collect();
                        let (mean, sigma) = mean_std(&vals);
                        if !(sigma > 0.0) {
                            return Err(Error::DegenerateSpectrum { frequency_hz: f });
                        }
                        Ok(SpectrumBin {
                            f_center: f,
                            mean,
                            sigma,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(SiteSpectrum {
                    site,
                    spectrum: BinnedSpectrum::new(bins, self.band_multiplier)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let phases = if pair.is_some() {
            centers
                .iter()
                .enumerate()
                .map(|(b, &f)| {
                    let total: Complex64 = per_real.iter().map(|(_, c)| c[b]).sum();
                    PhaseObservation {
                        f_center: f,
                        phase: if total.re >= 0.0 { 0.0 } else { PI },
                    }
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok((apsd, phases))
    }
}
