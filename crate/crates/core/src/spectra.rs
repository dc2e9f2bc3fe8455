//! Analytic auto and cross power spectral densities of independent TLS.
//!
//! Convention: spectra are one-sided, defined for f > 0. A unit-variance
//! telegraph signal with autocorrelation `exp(-|t|/τ)` has
//!
//! ```text
//! L(f; τ) = 4τ / (1 + (2π f τ)²),   ∫₀^∞ L df = 1
//! ```
//!
//! and the FFT estimators in [`crate::telegraph`] use the matching
//! normalization.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    field_kernel, sample_configuration_with, voltage_kernel, OrientationClass, QubitLayout, Tls,
    TlsConfiguration,
};
use crate::inference::ModelHypothesis;
use crate::numeric::{log_trapezoid, mean_std, median_iqr, pairwise_sum, stream_rng};

/// Which noise quantity a spectrum describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    Voltage,
    FieldX,
    FieldY,
    FieldZ,
}

impl Observable {
    pub fn label(self) -> &'static str {
        match self {
            Observable::Voltage => "voltage",
            Observable::FieldX => "ex",
            Observable::FieldY => "ey",
            Observable::FieldZ => "ez",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [Observable::Voltage, Observable::FieldX, Observable::FieldY, Observable::FieldZ]
            .into_iter()
            .find(|o| o.label() == s)
            .ok_or_else(|| Error::invalid(format!("unknown observable '{s}'")))
    }

    /// Amplitude of this observable at `site` per unit telegraph state.
    pub fn kernel(self, tls: &Tls, site: crate::Vec3, epsilon_r: f64) -> Result<f64> {
        match self {
            Observable::Voltage => voltage_kernel(tls, site, epsilon_r),
            Observable::FieldX => Ok(field_kernel(tls, site, epsilon_r)?.x),
            Observable::FieldY => Ok(field_kernel(tls, site, epsilon_r)?.y),
            Observable::FieldZ => Ok(field_kernel(tls, site, epsilon_r)?.z),
        }
    }
}

/// Per-TLS kernels at one site, in configuration order.
pub fn site_kernels(
    config: &TlsConfiguration,
    layout: &QubitLayout,
    site: usize,
    observable: Observable,
) -> Result<Vec<f64>> {
    let r = layout.site(site)?;
    config
        .tls()
        .iter()
        .map(|t| observable.kernel(t, r, config.epsilon_r()))
        .collect()
}

/// Lorentzian line shape of a unit-variance telegraph signal.
pub fn lorentzian(f: f64, tau: f64) -> f64 {
    let w = 2.0 * PI * f * tau;
    4.0 * tau / (1.0 + w * w)
}

/// Strictly increasing positive frequencies (Hz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FrequencyGrid {
    values: Vec<f64>,
}

impl TryFrom<Vec<f64>> for FrequencyGrid {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        FrequencyGrid::new(v)
    }
}

impl From<FrequencyGrid> for Vec<f64> {
    fn from(g: FrequencyGrid) -> Self {
        g.values
    }
}

impl FrequencyGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("frequency grid is empty"));
        }
        if values.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::invalid("frequencies must be positive and finite"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("frequencies must be strictly increasing"));
        }
        Ok(FrequencyGrid { values })
    }

    pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || n < 2 {
            return Err(Error::InvalidRange(format!("log grid [{lo}, {hi}] with {n} points")));
        }
        FrequencyGrid::new(crate::numeric::logspace(lo, hi, n))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// How a spectrum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Analytic,
    Estimated { n_realizations: usize },
}

/// Auto power spectral density at one site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSeries {
    pub grid: FrequencyGrid,
    pub values: Vec<f64>,
    pub observable: Observable,
    pub site_index: usize,
    pub origin: Origin,
}

impl SpectrumSeries {
    pub fn new(
        grid: FrequencyGrid,
        values: Vec<f64>,
        observable: Observable,
        site_index: usize,
        origin: Origin,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::invalid("spectrum values must be non-negative"));
        }
        Ok(SpectrumSeries {
            grid,
            values,
            observable,
            site_index,
            origin,
        })
    }

    /// CSV with header `frequency_hz,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("frequency_hz,value\n");
        for (f, v) in self.grid.values().iter().zip(&self.values) {
            writeln!(out, "{f:e},{v:e}").unwrap();
        }
        out
    }
}

/// Cross power spectral density between two sites and its Pearson
/// normalization `C = S_ab / sqrt(S_a S_b) = c e^{iγ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSpectrum {
    pub grid: FrequencyGrid,
    pub values: Vec<Complex64>,
    pub normalized: Vec<Complex64>,
    /// γ(f) in [−π, π]; exactly 0 or π for analytic spectra.
    pub phase: Vec<f64>,
    /// c(f) = |C(f)|.
    pub strength: Vec<f64>,
    pub observable: Observable,
    pub site_a: usize,
    pub site_b: usize,
    pub origin: Origin,
}

impl CrossSpectrum {
    /// Assembles the normalized quantities from a raw cross spectrum and
    /// the two auto spectra.
    pub fn from_parts(
        grid: FrequencyGrid,
        values: Vec<Complex64>,
        apsd_a: &[f64],
        apsd_b: &[f64],
        observable: Observable,
        (site_a, site_b): (usize, usize),
        origin: Origin,
    ) -> Result<Self> {
        let n = grid.len();
        for len in [values.len(), apsd_a.len(), apsd_b.len()] {
            if len != n {
                return Err(Error::LengthMismatch { expected: n, found: len });
            }
        }
        let mut normalized = Vec::with_capacity(n);
        for i in 0..n {
            let denom = (apsd_a[i] * apsd_b[i]).sqrt();
            if !(denom > 0.0) {
                return Err(Error::DegenerateSpectrum {
                    frequency_hz: grid.values()[i],
                });
            }
            normalized.push(values[i] / denom);
        }
        let phase = match origin {
            Origin::Analytic => values
                .iter()
                .map(|v| if v.re >= 0.0 { 0.0 } else { PI })
                .collect(),
            Origin::Estimated { .. } => values.iter().map(|v| v.im.atan2(v.re)).collect(),
        };
        let strength = normalized.iter().map(|c| c.norm()).collect();
        Ok(CrossSpectrum {
            grid,
            values,
            normalized,
            phase,
            strength,
            observable,
            site_a,
            site_b,
            origin,
        })
    }

    /// CSV with header `frequency_hz,re,im,strength,phase`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("frequency_hz,re,im,strength,phase\n");
        for i in 0..self.grid.len() {
            let v = self.values[i];
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e}",
                self.grid.values()[i],
                v.re,
                v.im,
                self.strength[i],
                self.phase[i]
            )
            .unwrap();
        }
        out
    }
}

/// `Σ_n w_n L(f; τ_n)` at every grid frequency, summed pairwise over TLS.
pub fn lorentzian_sum(weights: &[f64], taus: &[f64], freqs: &[f64]) -> Vec<f64> {
    let mut terms = vec![0.0; weights.len()];
    freqs
        .iter()
        .map(|&f| {
            for (t, (w, tau)) in terms.iter_mut().zip(weights.iter().zip(taus)) {
                *t = w * lorentzian(f, *tau);
            }
            pairwise_sum(&terms)
        })
        .collect()
}

fn taus(config: &TlsConfiguration) -> Vec<f64> {
    config.tls().iter().map(Tls::tau).collect()
}

fn require_nonempty(config: &TlsConfiguration) -> Result<()> {
    if config.is_empty() {
        Err(Error::invalid("configuration has no TLS"))
    } else {
        Ok(())
    }
}

/// `S(f) = Σ_n k_n² L(f; τ_n)` at one site.
pub fn analytic_apsd(
    config: &TlsConfiguration,
    layout: &QubitLayout,
    site: usize,
    observable: Observable,
    grid: &FrequencyGrid,
) -> Result<SpectrumSeries> {
    require_nonempty(config)?;
    let k = site_kernels(config, layout, site, observable)?;
    let w: Vec<f64> = k.iter().map(|k| k * k).collect();
    let values = lorentzian_sum(&w, &taus(config), grid.values());
    SpectrumSeries::new(grid.clone(), values, observable, site, Origin::Analytic)
}

/// `S_ab(f) = Σ_n k_n(a) k_n(b) L(f; τ_n)`, real for independent TLS.
pub fn analytic_cpsd(
    config: &TlsConfiguration,
    layout: &QubitLayout,
    site_a: usize,
    site_b: usize,
    observable: Observable,
    grid: &FrequencyGrid,
) -> Result<CrossSpectrum> {
    require_nonempty(config)?;
    if site_a == site_b {
        return Err(Error::invalid("cross spectrum needs two distinct site indices"));
    }
    let ka = site_kernels(config, layout, site_a, observable)?;
    let kb = site_kernels(config, layout, site_b, observable)?;
    let tau = taus(config);
    let f = grid.values();
    let wa: Vec<f64> = ka.iter().map(|k| k * k).collect();
    let wb: Vec<f64> = kb.iter().map(|k| k * k).collect();
    let wab: Vec<f64> = ka.iter().zip(&kb).map(|(a, b)| a * b).collect();
    let sa = lorentzian_sum(&wa, &tau, f);
    let sb = lorentzian_sum(&wb, &tau, f);
    let sab = lorentzian_sum(&wab, &tau, f)
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    CrossSpectrum::from_parts(
        grid.clone(),
        sab,
        &sa,
        &sb,
        observable,
        (site_a, site_b),
        Origin::Analytic,
    )
}

/// True when a phase counts as "in phase" (|γ| < π/2).
pub fn is_zero_phase(phase: f64) -> bool {
    phase.abs() < PI / 2.0
}

/// Percentages of 0 and π phase over `[f_lo, f_hi]` with 1/f weight
/// (equal weight per decade). Estimated phases are assigned to the nearer
/// of 0 and π.
pub fn weighted_phase_percentages(cross: &CrossSpectrum, f_lo: f64, f_hi: f64) -> Result<(f64, f64)> {
    let f = cross.grid.values();
    if !(f_lo < f_hi) || f_lo < cross.grid.first() || f_hi > cross.grid.last() || f.len() < 2 {
        return Err(Error::EmptyRange { lo: f_lo, hi: f_hi });
    }
    let zero: Vec<f64> = cross
        .phase
        .iter()
        .map(|&p| if is_zero_phase(p) { 1.0 } else { 0.0 })
        .collect();
    let pi: Vec<f64> = zero.iter().map(|z| 1.0 - z).collect();
    let w_zero = log_trapezoid(f, &zero, f_lo, f_hi)?;
    let w_pi = log_trapezoid(f, &pi, f_lo, f_hi)?;
    let total = w_zero + w_pi;
    Ok((100.0 * w_zero / total, 100.0 * w_pi / total))
}

/// Ensemble experiment comparing orientation classes on one geometry.
#[derive(Debug, Clone)]
pub struct EnsembleStudy {
    /// Geometry, dipole count, moment and rate prior; its orientation is
    /// replaced by each class in turn.
    pub base: ModelHypothesis,
    pub classes: Vec<OrientationClass>,
    pub layout: QubitLayout,
    pub sites: (usize, usize),
    pub observable: Observable,
    pub n_samples: usize,
    pub rng_seed: u64,
    pub grid: FrequencyGrid,
    /// Range of the weighted phase percentages.
    pub phase_range: (f64, f64),
    /// Frequencies at which correlation strength is averaged.
    pub strength_freqs: Vec<f64>,
}

/// Per-class ensemble summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrientationSummary {
    pub orientation: OrientationClass,
    pub pct_zero: Vec<f64>,
    pub pct_pi: Vec<f64>,
    pub median_pct_zero: f64,
    pub iqr_pct_zero: f64,
    pub median_pct_pi: f64,
    pub iqr_pct_pi: f64,
    pub strength_mean: f64,
    pub strength_std: f64,
}

/// Phase and correlation-strength statistics per orientation class.
///
/// Sample `s` of class index `c` draws from RNG stream `[c, s]`.
pub fn orientation_ensemble_stats(study: &EnsembleStudy) -> Result<Vec<OrientationSummary>> {
    if study.n_samples == 0 {
        return Err(Error::invalid("n_samples must be at least 1"));
    }
    let strength_grid = FrequencyGrid::new(study.strength_freqs.clone())?;
    let (a, b) = study.sites;
    study
        .classes
        .iter()
        .enumerate()
        .map(|(ci, &class)| {
            let mut hyp = study.base.clone();
            hyp.orientation = class;
            let mut pct_zero = Vec::with_capacity(study.n_samples);
            let mut strengths = Vec::with_capacity(study.n_samples * strength_grid.len());
            for s in 0..study.n_samples {
                let mut rng = stream_rng(study.rng_seed, &[ci as u64, s as u64]);
                let config = sample_configuration_with(&hyp, &mut rng)?;
                let cross =
                    analytic_cpsd(&config, &study.layout, a, b, study.observable, &study.grid)?;
                let (z, _) =
                    weighted_phase_percentages(&cross, study.phase_range.0, study.phase_range.1)?;
                pct_zero.push(z);
                let at =
                    analytic_cpsd(&config, &study.layout, a, b, study.observable, &strength_grid)?;
                strengths.extend_from_slice(&at.strength);
            }
            let pct_pi: Vec<f64> = pct_zero.iter().map(|z| 100.0 - z).collect();
            let (median_pct_zero, iqr_pct_zero) = median_iqr(&pct_zero);
            let (median_pct_pi, iqr_pct_pi) = median_iqr(&pct_pi);
            let (strength_mean, strength_std) = mean_std(&strengths);
            Ok(OrientationSummary {
                orientation: class,
                pct_zero,
                pct_pi,
                median_pct_zero,
                iqr_pct_zero,
                median_pct_pi,
                iqr_pct_pi,
                strength_mean,
                strength_std,
            })
        })
        .collect()
}

/// Logarithmically spaced frequency bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogBins {
    pub edges: Vec<f64>,
}

impl LogBins {
    /// Bins from `f_lo` to `f_hi` with `per_decade` bins per decade; the last
    /// bin is shortened if the span is not a whole number of bins.
    pub fn new(f_lo: f64, f_hi: f64, per_decade: usize) -> Result<Self> {
        if !(f_lo > 0.0 && f_hi > f_lo) || per_decade == 0 {
            return Err(Error::InvalidRange(format!(
                "bins over [{f_lo}, {f_hi}] with {per_decade} per decade"
            )));
        }
        let decades = (f_hi / f_lo).log10();
        let n = ((decades * per_decade as f64) - 1e-9).ceil().max(1.0) as usize;
        let mut edges: Vec<f64> = (0..n)
            .map(|i| f_lo * 10f64.powf(i as f64 / per_decade as f64))
            .collect();
        edges.push(f_hi);
        Ok(LogBins { edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Geometric centers.
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect()
    }

    /// Bin index of `f` (half-open `[lo, hi)`, last bin closed).
    pub fn index_of(&self, f: f64) -> Option<usize> {
        let n = self.len();
        if f < self.edges[0] || f > self.edges[n] {
            return None;
        }
        let i = self.edges.partition_point(|e| *e <= f);
        Some(i.saturating_sub(1).min(n - 1))
    }

    /// Groups grid indices by bin; empty bins yield empty vectors.
    pub fn members(&self, freqs: &[f64]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (i, &f) in freqs.iter().enumerate() {
            if let Some(b) = self.index_of(f) {
                out[b].push(i);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn single(pos: Vec3, orient: Vec3, rate: f64) -> TlsConfiguration {
        TlsConfiguration::new(vec![Tls::new(pos, orient, 1.0, rate).unwrap()], 11.0).unwrap()
    }

    #[test]
    fn lorentzian_integrates_to_one() {
        // ∫₀^F 4τ/(1+(2πfτ)²) df = (2/π) atan(2πFτ)
        let tau = 0.3;
        let f = crate::numeric::logspace(1e-6, 1e6, 20001);
        let v: Vec<f64> = f.iter().map(|&f| lorentzian(f, tau) * f).collect();
        let got = log_trapezoid(&f, &v, 1e-6, 1e6).unwrap();
        let exact = 2.0 / PI * ((2.0 * PI * 1e6 * tau).atan() - (2.0 * PI * 1e-6 * tau).atan());
        assert!((got - exact).abs() < 1e-6, "{got} vs {exact}");
    }

    #[test]
    fn single_tls_shape_and_half_power() {
        let c = single(Vec3::new(10.0, 5.0, 60.0), Vec3::Z, 0.05);
        let layout = QubitLayout::pair_on_x(100.0).unwrap();
        let tau = c.tls()[0].tau();
        let fc = 1.0 / (2.0 * PI * tau);
        let grid = FrequencyGrid::new(vec![1e-9, 0.3 * fc, fc, 4.0 * fc]).unwrap();
        let s = analytic_apsd(&c, &layout, 0, Observable::Voltage, &grid).unwrap();
        let s0 = s.values[0];
        for (f, v) in grid.values().iter().zip(&s.values) {
            let expect = 1.0 / (1.0 + (2.0 * PI * f * tau).powi(2));
            assert!((v / s0 - expect).abs() < 1e-9);
        }
        assert!((s.values[2] / s0 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn identical_colocated_pair_doubles() {
        let one = single(Vec3::new(-20.0, 30.0, 72.0), Vec3::new(0.6, 0.8, 0.0), 0.01);
        let two = one.union(&one).unwrap();
        let layout = QubitLayout::pair_on_x(100.0).unwrap();
        let grid = FrequencyGrid::log_spaced(1e-5, 1.0, 30).unwrap();
        let s1 = analytic_apsd(&one, &layout, 1, Observable::FieldX, &grid).unwrap();
        let s2 = analytic_apsd(&two, &layout, 1, Observable::FieldX, &grid).unwrap();
        for (a, b) in s1.values.iter().zip(&s2.values) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn single_tls_cross_is_unit_strength() {
        let c = single(Vec3::new(33.0, -12.0, 50.0), Vec3::new(0.0, 0.6, 0.8), 0.2);
        let layout = QubitLayout::pair_on_x(100.0).unwrap();
        let grid = FrequencyGrid::log_spaced(1e-4, 1.0, 25).unwrap();
        let x = analytic_cpsd(&c, &layout, 0, 1, Observable::Voltage, &grid).unwrap();
        for (s, p) in x.strength.iter().zip(&x.phase) {
            assert!((s - 1.0).abs() < 1e-12);
            assert_eq!(*p, x.phase[0]);
        }
    }

    #[test]
    fn slab_dipole_is_anticorrelated() {
        let c = single(Vec3::new(0.0, 0.0, 72.0), Vec3::X, 0.01);
        let layout = QubitLayout::pair_on_x(100.0).unwrap();
        let grid = FrequencyGrid::log_spaced(1e-5, 1.0, 40).unwrap();
        let x = analytic_cpsd(&c, &layout, 0, 1, Observable::Voltage, &grid).unwrap();
        assert!(x.phase.iter().all(|p| *p == PI));
        assert_eq!(weighted_phase_percentages(&x, 1e-5, 1.0).unwrap(), (0.0, 100.0));
    }

    #[test]
    fn cpsd_requires_distinct_sites_and_nonzero_apsd() {
        let layout = QubitLayout::pair_on_x(100.0).unwrap();
        let grid = FrequencyGrid::log_spaced(1e-3, 1.0, 5).unwrap();
        let c = single(Vec3::new(0.0, 0.0, 72.0), Vec3::Z, 0.01);
        assert!(analytic_cpsd(&c, &layout, 0, 0, Observable::Voltage, &grid).is_err());
        // x̂ dipole directly above site 1 produces no potential there
        let dead = single(Vec3::new(50.0, 0.0, 72.0), Vec3::X, 0.01);
        assert!(matches!(
            analytic_cpsd(&dead, &layout, 0, 1, Observable::Voltage, &grid),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn phase_percentages_zero_and_half() {
        let grid = FrequencyGrid::log_spaced(1e-4, 1.0, 100).unwrap();
        let n = grid.len();
        let zeros = vec![Complex64::new(1.0, 0.0); n];
        let ones = vec![1.0; n];
        let x = CrossSpectrum::from_parts(
            grid.clone(),
            zeros,
            &ones,
            &ones,
            Observable::Voltage,
            (0, 1),
            Origin::Analytic,
        )
        .unwrap();
        assert_eq!(weighted_phase_percentages(&x, 1e-4, 1.0).unwrap(), (100.0, 0.0));

        let half: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(if i < n / 2 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        let x = CrossSpectrum::from_parts(
            grid,
            half,
            &ones,
            &ones,
            Observable::Voltage,
            (0, 1),
            Origin::Analytic,
        )
        .unwrap();
        let (z, p) = weighted_phase_percentages(&x, 1e-4, 1.0).unwrap();
        assert!((z - 50.0).abs() < 1e-9 && (p - 50.0).abs() < 1e-9, "{z} {p}");
        assert!(matches!(
            weighted_phase_percentages(&x, 1.0, 1e-4),
            Err(Error::EmptyRange { .. })
        ));
    }

    #[test]
    fn log_bins_layout() {
        let b = LogBins::new(1e-4, 1.0, 1).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.index_of(1e-4), Some(0));
        assert_eq!(b.index_of(1.0), Some(3));
        assert_eq!(b.index_of(0.05), Some(2));
        assert_eq!(b.index_of(2.0), None);
        let c = b.centers();
        assert!((c[0] - 10f64.powf(-3.5)).abs() < 1e-15);
    }

    #[test]
    fn csv_headers() {
        let c = single(Vec3::new(0.0, 10.0, 72.0), Vec3::Z, 0.01);
        let layout = QubitLayout::pair_on_x(100.0).unwrap();
        let grid = FrequencyGrid::log_spaced(1e-3, 1.0, 3).unwrap();
        let s = analytic_apsd(&c, &layout, 0, Observable::Voltage, &grid).unwrap();
        assert!(s.to_csv().starts_with("frequency_hz,value\n"));
        assert_eq!(s.to_csv().lines().count(), 4);
        let x = analytic_cpsd(&c, &layout, 0, 1, Observable::Voltage, &grid).unwrap();
        assert!(x.to_csv().starts_with("frequency_hz,re,im,strength,phase\n"));
    }
}
