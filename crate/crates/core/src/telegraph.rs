//! Random telegraph simulation and FFT spectral estimation.
//!
//! Each TLS flips as a Poisson process; the state is read off on a uniform
//! sampling grid. Spectra are averaged rectangular-window periodograms with
//! the one-sided normalization used by [`crate::spectra`]:
//!
//! ```text
//! P_k = 2 Δt |X_k|² / N      (0 < k < N/2)
//! P_k =   Δt |X_k|² / N      (k = N/2)
//! ```
//!
//! The DC bin is never reported.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{QubitLayout, Tls, TlsConfiguration};
use crate::numeric::stream_rng;
use crate::spectra::{site_kernels, CrossSpectrum, FrequencyGrid, Observable, Origin};

/// RNG domain tag for telegraph streams.
const TELEGRAPH_STREAM: u64 = 0x7e1e;
/// Realizations per parallel job; fixed so the reduction tree never changes.
const CHUNK: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesSpec {
    pub duration: f64,
    pub sample_interval: f64,
    pub n_realizations: usize,
    pub rng_seed: u64,
}

impl TimeSeriesSpec {
    pub fn new(duration: f64, sample_interval: f64, n_realizations: usize, rng_seed: u64) -> Result<Self> {
        let spec = TimeSeriesSpec {
            duration,
            sample_interval,
            n_realizations,
            rng_seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Requires a positive interval, at least one realization and an even
    /// whole number (≥ 2) of samples, so the top FFT bin sits at Nyquist.
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_interval > 0.0 && self.sample_interval.is_finite()) {
            return Err(Error::invalid("sample interval must be positive"));
        }
        if self.n_realizations == 0 {
            return Err(Error::invalid("need at least one realization"));
        }
        let ratio = self.duration / self.sample_interval;
        let n = ratio.round();
        if !ratio.is_finite() || (ratio - n).abs() > 1e-9 * n.max(1.0) || n < 2.0 {
            return Err(Error::invalid(format!(
                "duration / sample_interval = {ratio} is not a whole number >= 2"
            )));
        }
        if n as u64 % 2 != 0 {
            return Err(Error::invalid("number of samples must be even"));
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        (self.duration / self.sample_interval).round() as usize
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.sample_interval
    }

    /// FFT bin frequencies `k / (N Δt)` for `k = 1..=N/2`.
    pub fn fft_grid(&self) -> FrequencyGrid {
        let n = self.n_samples();
        let df = 1.0 / (n as f64 * self.sample_interval);
        FrequencyGrid::new((1..=n / 2).map(|k| k as f64 * df).collect()).expect("valid FFT grid")
    }
}

/// Telegraph states `±1` at `t = i Δt`, deterministic in
/// `(spec.rng_seed, tls_index, realization)`.
pub fn simulate_telegraph(tls: &Tls, tls_index: usize, spec: &TimeSeriesSpec, realization: usize) -> Result<Vec<i8>> {
    spec.validate()?;
    let mut rng = stream_rng(
        spec.rng_seed,
        &[TELEGRAPH_STREAM, tls_index as u64, realization as u64],
    );
    let n = spec.n_samples();
    let exp = Exp::new(tls.switch_rate()).map_err(|e| Error::invalid(e.to_string()))?;
    let mut state: i8 = if rng.random::<bool>() { 1 } else { -1 };
    let mut next_flip = exp.sample(&mut rng);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 * spec.sample_interval;
        while next_flip <= t {
            state = -state;
            next_flip += exp.sample(&mut rng);
        }
        out.push(state);
    }
    Ok(out)
}

fn all_site_kernels(config: &TlsConfiguration, layout: &QubitLayout, sites: &[usize], observable: Observable) -> Result<Vec<Vec<f64>>> {
    sites
        .iter()
        .map(|&s| site_kernels(config, layout, s, observable))
        .collect()
}

fn superpose(config: &TlsConfiguration, kernels: &[Vec<f64>], spec: &TimeSeriesSpec, realization: usize) -> Result<Vec<Vec<f64>>> {
    let n = spec.n_samples();
    let mut records = vec![vec![0.0; n]; kernels.len()];
    for (ti, tls) in config.tls().iter().enumerate() {
        let s = simulate_telegraph(tls, ti, spec, realization)?;
        for (rec, k) in records.iter_mut().zip(kernels) {
            let k = k[ti];
            for (r, &si) in rec.iter_mut().zip(&s) {
                *r += k * f64::from(si);
            }
        }
    }
    Ok(records)
}

/// One realization of the noise records at the requested sites.
pub fn synthesize_realization(
    config: &TlsConfiguration,
    layout: &QubitLayout,
    sites: &[usize],
    observable: Observable,
    spec: &TimeSeriesSpec,
    realization: usize,
) -> Result<Vec<Vec<f64>>> {
    let kernels = all_site_kernels(config, layout, sites, observable)?;
    superpose(config, &kernels, spec, realization)
}

/// Noise records, indexed `[site][realization][sample]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitRecords {
    pub sites: Vec<Vec<Vec<f64>>>,
    pub sample_interval: f64,
}

impl QubitRecords {
    /// CSV of one realization: `time_s,site0,site1,...`.
    pub fn to_csv(&self, realization: usize) -> String {
        let mut out = String::from("time_s");
        for s in 0..self.sites.len() {
            write!(out, ",site{s}").unwrap();
        }
        out.push('\n');
        let n = self.sites.first().map_or(0, |s| s[realization].len());
        for i in 0..n {
            write!(out, "{:e}", i as f64 * self.sample_interval).unwrap();
            for site in &self.sites {
                write!(out, ",{:e}", site[realization][i]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Superposes kernel × telegraph state for every TLS at every layout site.
/// The same telegraph draws feed all sites.
pub fn synthesize_qubit_records(
    config: &TlsConfiguration,
    layout: &QubitLayout,
    observable: Observable,
    spec: &TimeSeriesSpec,
) -> Result<QubitRecords> {
    spec.validate()?;
    let sites: Vec<usize> = (0..layout.len()).collect();
    let kernels = all_site_kernels(config, layout, &sites, observable)?;
    let per_real = (0..spec.n_realizations)
        .into_par_iter()
        .map(|r| superpose(config, &kernels, spec, r))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![Vec::with_capacity(spec.n_realizations); layout.len()];
    for recs in per_real {
        for (site, rec) in out.iter_mut().zip(recs) {
            site.push(rec);
        }
    }
    Ok(QubitRecords {
        sites: out,
        sample_interval: spec.sample_interval,
    })
}

/// Positive-frequency FFT coefficients `X_k`, `k = 1..=N/2`.
fn positive_fft(planner: &mut FftPlanner<f64>, record: &[f64]) -> Vec<Complex64> {
    let n = record.len();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex64> = record.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft.process(&mut buf);
    buf[1..=n / 2].to_vec()
}

/// One-sided normalization factor for bin `k` (1-based) of an `n`-point FFT.
fn bin_scale(k: usize, n: usize, dt: f64) -> f64 {
    if 2 * k == n {
        dt / n as f64
    } else {
        2.0 * dt / n as f64
    }
}

/// Averaged auto spectrum estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatedSpectrum {
    pub grid: FrequencyGrid,
    pub apsd: Vec<f64>,
    pub n_realizations: usize,
}

impl EstimatedSpectrum {
    /// CSV with header `frequency_hz,value,n_realizations`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("frequency_hz,value,n_realizations\n");
        for (f, v) in self.grid.values().iter().zip(&self.apsd) {
            writeln!(out, "{f:e},{v:e},{}", self.n_realizations).unwrap();
        }
        out
    }
}

/// Averaged cross spectrum estimate with both auto spectra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatedCrossSpectrum {
    pub grid: FrequencyGrid,
    pub apsd_a: Vec<f64>,
    pub apsd_b: Vec<f64>,
    pub cpsd: Vec<Complex64>,
    pub n_realizations: usize,
}

impl EstimatedCrossSpectrum {
    /// Normalized form; phases are `atan2` of the raw estimate.
    pub fn to_cross_spectrum(&self, observable: Observable, sites: (usize, usize)) -> Result<CrossSpectrum> {
        CrossSpectrum::from_parts(
            self.grid.clone(),
            self.cpsd.clone(),
            &self.apsd_a,
            &self.apsd_b,
            observable,
            sites,
            Origin::Estimated {
                n_realizations: self.n_realizations,
            },
        )
    }

    /// CSV with header `frequency_hz,re,im,strength,phase,n_realizations`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("frequency_hz,re,im,strength,phase,n_realizations\n");
        for i in 0..self.grid.len() {
            let v = self.cpsd[i];
            let denom = (self.apsd_a[i] * self.apsd_b[i]).sqrt();
            let strength = if denom > 0.0 { v.norm() / denom } else { 0.0 };
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{}",
                self.grid.values()[i],
                v.re,
                v.im,
                strength,
                v.im.atan2(v.re),
                self.n_realizations
            )
            .unwrap();
        }
        out
    }
}

fn check_records(records: &[Vec<f64>], spec: &TimeSeriesSpec) -> Result<()> {
    spec.validate()?;
    if records.is_empty() {
        return Err(Error::invalid("no records"));
    }
    if records.len() != spec.n_realizations {
        return Err(Error::LengthMismatch {
            expected: spec.n_realizations,
            found: records.len(),
        });
    }
    for r in records {
        if r.len() != spec.n_samples() {
            return Err(Error::LengthMismatch {
                expected: spec.n_samples(),
                found: r.len(),
            });
        }
    }
    Ok(())
}

/// Periodogram of a single record (bins `1..=N/2`).
pub fn periodogram(record: &[f64], sample_interval: f64) -> Vec<f64> {
    let n = record.len();
    let mut planner = FftPlanner::new();
    positive_fft(&mut planner, record)
        .iter()
        .enumerate()
        .map(|(i, x)| bin_scale(i + 1, n, sample_interval) * x.norm_sqr())
        .collect()
}

/// Cross periodogram `2Δt/N · conj(X_a) X_b` of one pair of records.
pub fn cross_periodogram(a: &[f64], b: &[f64], sample_interval: f64) -> Result<Vec<Complex64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len();
    let mut planner = FftPlanner::new();
    let xa = positive_fft(&mut planner, a);
    let xb = positive_fft(&mut planner, b);
    Ok(xa
        .iter()
        .zip(&xb)
        .enumerate()
        .map(|(i, (x, y))| x.conj() * y * bin_scale(i + 1, n, sample_interval))
        .collect())
}

/// Realization-averaged periodogram.
pub fn estimate_psd(records: &[Vec<f64>], spec: &TimeSeriesSpec) -> Result<EstimatedSpectrum> {
    check_records(records, spec)?;
    let mut acc = vec![0.0; spec.n_samples() / 2];
    for r in records {
        for (a, p) in acc.iter_mut().zip(periodogram(r, spec.sample_interval)) {
            *a += p;
        }
    }
    let m = records.len() as f64;
    acc.iter_mut().for_each(|a| *a /= m);
    Ok(EstimatedSpectrum {
        grid: spec.fft_grid(),
        apsd: acc,
        n_realizations: records.len(),
    })
}

#[derive(Clone)]
struct CrossAccumulator {
    aa: Vec<f64>,
    bb: Vec<f64>,
    ab: Vec<Complex64>,
}

impl CrossAccumulator {
    fn zeros(m: usize) -> Self {
        CrossAccumulator {
            aa: vec![0.0; m],
            bb: vec![0.0; m],
            ab: vec![Complex64::new(0.0, 0.0); m],
        }
    }

    fn add_records(&mut self, planner: &mut FftPlanner<f64>, a: &[f64], b: &[f64], dt: f64) {
        let n = a.len();
        let xa = positive_fft(planner, a);
        let xb = positive_fft(planner, b);
        for i in 0..xa.len() {
            let s = bin_scale(i + 1, n, dt);
            self.aa[i] += s * xa[i].norm_sqr();
            self.bb[i] += s * xb[i].norm_sqr();
            self.ab[i] += xa[i].conj() * xb[i] * s;
        }
    }

    fn merge(&mut self, other: &CrossAccumulator) {
        for i in 0..self.aa.len() {
            self.aa[i] += other.aa[i];
            self.bb[i] += other.bb[i];
            self.ab[i] += other.ab[i];
        }
    }

    fn finish(mut self, spec: &TimeSeriesSpec, n_real: usize) -> EstimatedCrossSpectrum {
        let m = n_real as f64;
        self.aa.iter_mut().for_each(|v| *v /= m);
        self.bb.iter_mut().for_each(|v| *v /= m);
        self.ab.iter_mut().for_each(|v| *v /= m);
        EstimatedCrossSpectrum {
            grid: spec.fft_grid(),
            apsd_a: self.aa,
            apsd_b: self.bb,
            cpsd: self.ab,
            n_realizations: n_real,
        }
    }
}

/// Realization-averaged cross periodogram `2Δt/N · conj(X_a) X_b`, which
/// estimates `∫ dt e^{2πift} ⟨a(t) b(0)⟩` on positive frequencies.
pub fn estimate_cpsd(records_a: &[Vec<f64>], records_b: &[Vec<f64>], spec: &TimeSeriesSpec) -> Result<EstimatedCrossSpectrum> {
    check_records(records_a, spec)?;
    check_records(records_b, spec)?;
    let mut planner = FftPlanner::new();
    let mut acc = CrossAccumulator::zeros(spec.n_samples() / 2);
    for (a, b) in records_a.iter().zip(records_b) {
        acc.add_records(&mut planner, a, b, spec.sample_interval);
    }
    Ok(acc.finish(spec, records_a.len()))
}

/// Simulates and estimates the cross spectrum between two sites without
/// keeping every record in memory. Realizations run in parallel in fixed
/// chunks and are reduced in chunk order, so results do not depend on the
/// thread schedule.
pub fn simulate_cross_spectrum(
    config: &TlsConfiguration,
    layout: &QubitLayout,
    sites: (usize, usize),
    observable: Observable,
    spec: &TimeSeriesSpec,
) -> Result<EstimatedCrossSpectrum> {
    spec.validate()?;
    let kernels = all_site_kernels(config, layout, &[sites.0, sites.1], observable)?;
    let m = spec.n_samples() / 2;
    let n_chunks = spec.n_realizations.div_ceil(CHUNK);
    let partials = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut planner = FftPlanner::new();
            let mut acc = CrossAccumulator::zeros(m);
            for r in c * CHUNK..((c + 1) * CHUNK).min(spec.n_realizations) {
                let rec = superpose(config, &kernels, spec, r)?;
                acc.add_records(&mut planner, &rec[0], &rec[1], spec.sample_interval);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = CrossAccumulator::zeros(m);
    for p in &partials {
        total.merge(p);
    }
    Ok(total.finish(spec, spec.n_realizations))
}

/// Simulates one site and returns the per-realization periodograms
/// (`[realization][bin]`), for callers that need ensemble statistics.
pub fn simulate_periodograms(
    config: &TlsConfiguration,
    layout: &QubitLayout,
    site: usize,
    observable: Observable,
    spec: &TimeSeriesSpec,
) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let kernels = all_site_kernels(config, layout, &[site], observable)?;
    (0..spec.n_realizations)
        .into_par_iter()
        .map(|r| {
            let rec = superpose(config, &kernels, spec, r)?;
            Ok(periodogram(&rec[0], spec.sample_interval))
        })
        .collect()
}

/// Expected value of the averaged periodogram for independent telegraph
/// sources with kernel products `weights` and rates `rates`, including the
/// finite window and sampling effects. Comparing it with the analytic
/// Lorentzian sum isolates leakage and aliasing from statistical scatter.
pub fn expected_periodogram(weights: &[f64], rates: &[f64], spec: &TimeSeriesSpec) -> Vec<f64> {
    let n = spec.n_samples();
    let dt = spec.sample_interval;
    let nf = n as f64;
    (1..=n / 2)
        .map(|k| {
            let omega = 2.0 * std::f64::consts::PI * k as f64 / nf;
            let sum: f64 = weights
                .iter()
                .zip(rates)
                .map(|(w, g)| {
                    // Σ_{|m|<N} (1 − |m|/N) a^{|m|} e^{iωm} with a = exp(−2γΔt)
                    let a = (-2.0 * g * dt).exp();
                    let q = Complex64::from_polar(a, omega);
                    let one = Complex64::new(1.0, 0.0);
                    let qn = q.powu(n as u32);
                    let geo = (one - qn) / (one - q);
                    let lin = q * (one - q.powu(n as u32 - 1) * nf + qn * (nf - 1.0))
                        / ((one - q) * (one - q));
                    w * (2.0 * (geo - lin / nf).re - 1.0)
                })
                .sum();
            bin_scale(k, n, dt) * nf * sum
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn tls(rate: f64) -> Tls {
        Tls::new(Vec3::new(10.0, 0.0, 50.0), Vec3::Z, 1.0, rate).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(TimeSeriesSpec::new(10.0, 1.0, 1, 0).is_ok());
        assert!(TimeSeriesSpec::new(11.0, 1.0, 1, 0).is_err());
        assert!(TimeSeriesSpec::new(10.5, 1.0, 1, 0).is_err());
        assert!(TimeSeriesSpec::new(1.0, 1.0, 1, 0).is_err());
        assert!(TimeSeriesSpec::new(10.0, 0.0, 1, 0).is_err());
        assert!(TimeSeriesSpec::new(10.0, 1.0, 0, 0).is_err());
        let s = TimeSeriesSpec::new(1e5, 1.0, 1, 0).unwrap();
        assert_eq!(s.fft_grid().last(), 0.5);
        assert_eq!(s.fft_grid().len(), 50_000);
    }

    #[test]
    fn slow_tls_is_constant() {
        let spec = TimeSeriesSpec::new(1000.0, 1.0, 1, 3).unwrap();
        let s = simulate_telegraph(&tls(1e-12), 0, &spec, 0).unwrap();
        assert!(s.iter().all(|&v| v == s[0]));
        assert_eq!(s.len(), 1000);
    }

    #[test]
    fn telegraph_is_deterministic_per_stream() {
        let spec = TimeSeriesSpec::new(2000.0, 1.0, 2, 9).unwrap();
        let a = simulate_telegraph(&tls(0.05), 0, &spec, 1).unwrap();
        let b = simulate_telegraph(&tls(0.05), 0, &spec, 1).unwrap();
        let c = simulate_telegraph(&tls(0.05), 1, &spec, 1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn cosine_at_bin_center_is_single_spike() {
        let n = 64;
        let dt = 0.5;
        let k0 = 5;
        let amp = 3.0;
        let rec: Vec<f64> = (0..n)
            .map(|i| amp * (2.0 * std::f64::consts::PI * k0 as f64 * i as f64 / n as f64).cos())
            .collect();
        let p = periodogram(&rec, dt);
        // |X_k0| = amp N / 2, so P = 2 dt (amp N/2)² / N = dt amp² N / 2
        let expected = dt * amp * amp * n as f64 / 2.0;
        for (i, v) in p.iter().enumerate() {
            if i + 1 == k0 {
                assert!((v - expected).abs() < 1e-9 * expected);
            } else {
                assert!(v.abs() < 1e-9 * expected, "bin {} = {v}", i + 1);
            }
        }
    }

    #[test]
    fn estimators_reject_mismatched_records() {
        let spec = TimeSeriesSpec::new(8.0, 1.0, 1, 0).unwrap();
        assert!(matches!(
            estimate_psd(&[vec![0.0; 6]], &spec),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(estimate_cpsd(&[vec![0.0; 8]], &[vec![0.0; 8], vec![0.0; 8]], &spec).is_err());
    }

    #[test]
    fn expected_periodogram_white_limit() {
        // γ → ∞: uncorrelated samples, expected periodogram = 2Δt · weight
        let spec = TimeSeriesSpec::new(64.0, 0.5, 1, 0).unwrap();
        let e = expected_periodogram(&[2.0], &[1e6], &spec);
        for (i, v) in e.iter().enumerate() {
            let scale = if i + 1 == 64 { 1.0 } else { 2.0 };
            assert!((v - scale * 0.5 * 2.0).abs() < 1e-9, "{i} {v}");
        }
    }
}
