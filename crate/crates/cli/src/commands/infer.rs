use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use tls_noise::geometry::{sample_configuration_with, OrientationClass};
use tls_noise::inference::{
    bayes_update, expectations, geometric_counts, log_lengths, sweep_likelihoods, Expectations, HypothesisSweep,
    LikelihoodOptions, MeasurementSet, ModelHypothesis, NoiseModel, PosteriorTable, SiteSpectrum, SyntheticSetup,
    OUT_OF_MODEL_WARNING,
};
use tls_noise::numeric::{stream_id, stream_rng};
use tls_noise::telegraph::TimeSeriesSpec;
use tls_noise::{Error, TlsConfiguration};

use super::{finish, hypothesis, positive};
use crate::config::{Common, Geometry};
use crate::error::{invalid, CliError, CliResult};
use crate::ingest::{ingest_phases, ingest_psd, Rebin};
use crate::output::RunOutput;
use crate::svg::heatmap;

const TRUTH_STREAM: u64 = 0x7a;
const NOISE_STREAM: u64 = 0x7b;
const MC_SEED_STREAM: u64 = 0x7c;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct InferArgs {
    /// `--orientation` takes a comma-separated list of swept classes.
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: Geometry,

    /// Smallest and largest swept dipole count.
    #[arg(long)]
    pub counts_min: Option<usize>,
    #[arg(long)]
    pub counts_max: Option<usize>,
    /// Number of geometric steps between them (duplicates after rounding
    /// are dropped).
    #[arg(long)]
    pub n_counts: Option<usize>,
    /// Swept dipole lengths (nm), log-spaced.
    #[arg(long)]
    pub ell_min: Option<f64>,
    #[arg(long)]
    pub ell_max: Option<f64>,
    #[arg(long)]
    pub n_ell: Option<usize>,

    /// Measured PSD file; repeat for site 0, site 1.
    #[arg(long)]
    pub psd: Vec<PathBuf>,
    /// Re-bin raw PSD rows into log bins from --f-min, --f-max and
    /// --bins-per-decade.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub rebin: Option<bool>,
    /// Measured CPSD phases between sites 0 and 1 (infer-cpsd).
    #[arg(long)]
    pub phases: Option<PathBuf>,

    /// Synthetic truth, used when no --psd is given.
    #[arg(long)]
    pub truth_n: Option<usize>,
    #[arg(long)]
    pub truth_ell: Option<f64>,
    #[arg(long)]
    pub truth_orientation: Option<String>,
    /// Number of sites whose APSD is measured (1 or 2).
    #[arg(long)]
    pub sites: Option<usize>,
    /// simulated (ensemble standard deviation of telegraph estimates) or
    /// analytic (sigma = rel-sigma × spectrum).
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long)]
    pub rel_sigma: Option<f64>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub realizations: Option<usize>,

    /// Also render the (count, length) marginal as SVG.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub svg: Option<bool>,
}

/// Synthetic truth and the grid cell nearest to it.
#[derive(Serialize)]
struct Truth<'a> {
    hypothesis: &'a ModelHypothesis,
    configuration: &'a TlsConfiguration,
    /// Index of the nearest swept count and length.
    count_index: usize,
    length_index: usize,
}

#[derive(Serialize)]
struct Report<'a> {
    warning: &'static str,
    #[serde(flatten)]
    expectations: &'a Expectations,
    density_per_cm2: f64,
    mode: &'a ModelHypothesis,
    mode_posterior: f64,
}

#[derive(Serialize)]
struct Comparison {
    apsd_only_mean_n_tls: f64,
    apsd_only_mean_ell_nm: f64,
    with_phase_mean_n_tls: f64,
    with_phase_mean_ell_nm: f64,
    n_phase_pi: usize,
    n_phase_total: usize,
    shifted_to_fewer_larger: bool,
}

fn nearest_log(values: &[f64], x: f64) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if (v / x).ln().abs() < (values[best] / x).ln().abs() {
            best = i;
        }
    }
    best
}

fn sweep(a: &InferArgs) -> CliResult<HypothesisSweep> {
    let c = &a.common;
    let counts = geometric_counts(a.counts_min.unwrap_or(1), a.counts_max.unwrap_or(177), a.n_counts.unwrap_or(13));
    if counts.is_empty() || counts[0] == 0 {
        return Err(invalid("swept counts must start at 1 or more"));
    }
    let (l0, l1) = (positive("ell-min", a.ell_min.unwrap_or(0.02))?, positive("ell-max", a.ell_max.unwrap_or(2.0))?);
    let n_ell = a.n_ell.unwrap_or(13);
    if !(l0 <= l1) || n_ell == 0 {
        return Err(invalid("need --ell-min <= --ell-max and --n-ell >= 1"));
    }
    let (lo, hi) = a.geometry.rates();
    if !(lo > 0.0 && lo <= hi) {
        return Err(invalid(format!("need 0 < --rate-min <= --rate-max, got [{lo}, {hi}]")));
    }
    Ok(HypothesisSweep {
        counts,
        lengths: log_lengths(l0, l1, n_ell),
        orientations: c.orientations(&OrientationClass::ALL)?,
        layer: a.geometry.layer()?,
        rate_interval: (lo, hi),
        epsilon_r: a.geometry.epsilon_r(),
    })
}

fn ingested(a: &InferArgs, out: &mut RunOutput, with_phase: bool) -> CliResult<MeasurementSet> {
    let c = &a.common;
    let k = c.band_k()?;
    let rebin = match a.rebin.unwrap_or(false) {
        true => {
            let (f_min, f_max) = c.frequency_range((1e-4, 1e-1))?;
            Some(Rebin {
                f_min,
                f_max,
                per_decade: c.bins_per_decade.unwrap_or(10),
            })
        }
        false => None,
    };
    let layout = a.geometry.layout()?;
    if a.psd.len() > layout.len() {
        return Err(invalid(format!("{} --psd files for {} sites", a.psd.len(), layout.len())));
    }
    let mut apsd = Vec::new();
    for (site, path) in a.psd.iter().enumerate() {
        out.input(path)?;
        apsd.push(SiteSpectrum {
            site,
            spectrum: ingest_psd(path, rebin, k)?,
        });
    }
    let phases = match (&a.phases, with_phase) {
        (Some(path), true) => {
            out.input(path)?;
            ingest_phases(path)?
        }
        (None, true) => return Err(invalid("infer-cpsd with measured spectra needs --phases")),
        (Some(_), false) => return Err(invalid("--phases is only used by infer-cpsd")),
        (None, false) => Vec::new(),
    };
    Ok(MeasurementSet::new(layout, c.observable()?, apsd, (0, 1), phases)?)
}

fn synthetic(
    a: &InferArgs,
    sweep: &HypothesisSweep,
    out: &mut RunOutput,
    with_phase: bool,
) -> CliResult<MeasurementSet> {
    let c = &a.common;
    let seed = c.seed();
    let n = a.truth_n.unwrap_or(13);
    let ell = a.truth_ell.unwrap_or(0.2);
    let orientation = OrientationClass::parse(a.truth_orientation.as_deref().unwrap_or("fully-random"))?;
    let truth = hypothesis(&a.geometry, n, ell, orientation, sweep.layer.clone())?;
    let config = sample_configuration_with(&truth, &mut stream_rng(seed, &[TRUTH_STREAM, 0]))?;
    let noise = match a.noise.as_deref().unwrap_or("simulated") {
        "simulated" => NoiseModel::Simulated(TimeSeriesSpec::new(
            a.duration.unwrap_or(1e5),
            a.dt.unwrap_or(1.0),
            a.realizations.unwrap_or(100),
            stream_id(&[seed, NOISE_STREAM, 0]),
        )?),
        "analytic" => NoiseModel::Analytic {
            rel_sigma: positive("rel-sigma", a.rel_sigma.unwrap_or(0.3))?,
        },
        other => return Err(invalid(format!("--noise must be analytic or simulated, got '{other}'"))),
    };
    let default_sites = if with_phase { 2 } else { 1 };
    let n_sites = a.sites.unwrap_or(default_sites);
    if !(1..=2).contains(&n_sites) {
        return Err(invalid("--sites must be 1 or 2"));
    }
    let setup = SyntheticSetup {
        layout: a.geometry.layout()?,
        observable: c.observable()?,
        bins: c.bins((1e-4, 1e-1), 10)?,
        band_multiplier: c.band_k()?,
        noise,
        apsd_sites: (0..n_sites).collect(),
        phase_sites: with_phase.then_some((0, 1)),
    };
    let m = setup.measure(&config)?;
    let counts: Vec<f64> = sweep.counts.iter().map(|&n| n as f64).collect();
    out.write_json(
        "truth.json",
        &Truth {
            hypothesis: &truth,
            configuration: &config,
            count_index: nearest_log(&counts, n as f64),
            length_index: nearest_log(&sweep.lengths, ell),
        },
    )?;
    Ok(m)
}

fn posterior(hyps: &[ModelHypothesis], m: &MeasurementSet, n_mc: usize, seed: u64) -> CliResult<PosteriorTable> {
    let opts = LikelihoodOptions::new(n_mc, stream_id(&[seed, MC_SEED_STREAM, 0]));
    let lik: Vec<f64> = sweep_likelihoods(hyps, m, &opts)?
        .iter()
        .map(|e| e.likelihood)
        .collect();
    Ok(bayes_update(hyps, &lik, n_mc, opts.rng_seed)?)
}

fn write_posterior(
    out: &mut RunOutput,
    suffix: &str,
    table: &PosteriorTable,
    area_nm2: f64,
    svg: bool,
) -> CliResult<Expectations> {
    let e = expectations(table);
    let mode = &table.entries[table.mode()];
    let report = Report {
        warning: OUT_OF_MODEL_WARNING,
        expectations: &e,
        density_per_cm2: e.density_per_cm2(area_nm2),
        mode: &mode.hypothesis,
        mode_posterior: mode.posterior,
    };
    out.write(&format!("posterior{suffix}.csv"), table.to_csv())?;
    out.write(&format!("posterior{suffix}.json"), table.to_json() + "\n")?;
    out.write(&format!("marginal{suffix}.csv"), e.marginal_csv())?;
    out.write_json(&format!("expectations{suffix}.json"), &report)?;
    if svg {
        out.write(&format!("heatmap{suffix}.svg"), heatmap(&e))?;
    }
    println!(
        "{}: mode n_T = {}, ℓ = {:.3} nm, {} (p = {:.3}); <n_T> = {:.2}, <ℓ> = {:.3} nm, density {:.3e} cm^-2",
        if suffix.is_empty() { "posterior" } else { &suffix[1..] },
        mode.hypothesis.n_tls,
        mode.hypothesis.dipole_length,
        mode.hypothesis.orientation.label(),
        mode.posterior,
        e.mean_n_tls,
        e.mean_ell_nm,
        report.density_per_cm2
    );
    Ok(e)
}

pub fn run(a: &InferArgs, name: &str, with_phase: bool) -> CliResult<()> {
    let c = &a.common;
    let seed = c.seed();
    let n_mc = c.n_mc(1000)?;
    let sweep = sweep(a)?;
    let hyps = sweep.hypotheses();
    let mut out = RunOutput::create(&c.out_dir(), name)?;
    let m = if a.psd.is_empty() {
        if a.phases.is_some() {
            return Err(invalid("--phases needs measured --psd files"));
        }
        synthetic(a, &sweep, &mut out, with_phase)?
    } else {
        ingested(a, &mut out, with_phase)?
    };
    out.write("measurement.json", m.to_json() + "\n")?;
    eprintln!("{OUT_OF_MODEL_WARNING}");

    let area = a.geometry.layer_area_nm2();
    let svg = a.svg.unwrap_or(false);
    let result = (|| -> CliResult<()> {
        if with_phase {
            let without = m.clone().without_phases();
            let t0 = posterior(&hyps, &without, n_mc, seed)?;
            let e0 = write_posterior(&mut out, "_apsd_only", &t0, area, svg)?;
            let t1 = posterior(&hyps, &m, n_mc, seed)?;
            let e1 = write_posterior(&mut out, "", &t1, area, svg)?;
            let cmp = Comparison {
                apsd_only_mean_n_tls: e0.mean_n_tls,
                apsd_only_mean_ell_nm: e0.mean_ell_nm,
                with_phase_mean_n_tls: e1.mean_n_tls,
                with_phase_mean_ell_nm: e1.mean_ell_nm,
                n_phase_pi: m.phases.iter().filter(|p| p.is_pi()).count(),
                n_phase_total: m.phases.len(),
                shifted_to_fewer_larger: e1.mean_n_tls < e0.mean_n_tls && e1.mean_ell_nm > e0.mean_ell_nm,
            };
            out.write_json("comparison.json", &cmp)?;
        } else {
            write_posterior(&mut out, "", &posterior(&hyps, &m, n_mc, seed)?, area, svg)?;
        }
        Ok(())
    })();
    match result {
        Err(CliError::Model(Error::AllRejected)) => {
            eprintln!("no swept hypothesis reproduced the measurement; widen the sweep, --band-k or --n-mc");
            finish(out, Some(seed), a)?;
            Err(Error::AllRejected.into())
        }
        Err(e) => Err(e),
        Ok(()) => finish(out, Some(seed), a),
    }
}
