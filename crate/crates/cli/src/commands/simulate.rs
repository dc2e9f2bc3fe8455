use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use tls_noise::geometry::OrientationClass;
use tls_noise::numeric::{mean_std, stream_id};
use tls_noise::spectra::{analytic_apsd, analytic_cpsd, weighted_phase_percentages};
use tls_noise::telegraph::{simulate_cross_spectrum, synthesize_qubit_records, EstimatedSpectrum, TimeSeriesSpec};

use super::{configuration, finish};
use crate::config::{Common, Geometry};
use crate::error::CliResult;
use crate::output::RunOutput;

const NOISE_STREAM: u64 = 0x52;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: Geometry,
    /// Configuration JSON; when absent one is drawn from the layer.
    #[arg(long)]
    pub tls_file: Option<PathBuf>,
    #[arg(long)]
    pub n_tls: Option<usize>,
    /// Dipole length (nm); the moment is 1 e times this.
    #[arg(long)]
    pub ell: Option<f64>,
    /// Record length (s).
    #[arg(long)]
    pub duration: Option<f64>,
    /// Sample interval (s).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub realizations: Option<usize>,
    /// Also write the first realization's time series.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub write_records: Option<bool>,
}

pub fn run(a: &SimulateArgs, name: &str) -> CliResult<()> {
    let c = &a.common;
    let seed = c.seed();
    let observable = c.observable()?;
    let layout = a.geometry.layout()?;
    let bins = c.bins((1e-4, 1e-1), 10)?;
    let spec = TimeSeriesSpec::new(
        a.duration.unwrap_or(1e5),
        a.dt.unwrap_or(1.0),
        a.realizations.unwrap_or(100),
        stream_id(&[seed, NOISE_STREAM]),
    )?;

    let mut out = RunOutput::create(&c.out_dir(), name)?;
    let shape = (
        a.n_tls.unwrap_or(10),
        a.ell.unwrap_or(1.0),
        c.orientation(OrientationClass::FullyRandom)?,
    );
    let config = configuration(a.tls_file.as_deref(), &mut out, &a.geometry, shape, seed)?;

    let est = simulate_cross_spectrum(&config, &layout, (0, 1), observable, &spec)?;
    let grid = est.grid.clone();
    let ana = [
        analytic_apsd(&config, &layout, 0, observable, &grid)?,
        analytic_apsd(&config, &layout, 1, observable, &grid)?,
    ];
    let ana_cross = analytic_cpsd(&config, &layout, 0, 1, observable, &grid)?;
    let est_cross = est.to_cross_spectrum(observable, (0, 1))?;

    let mut binned = String::from("f_center_hz,estimated_site0,analytic_site0,rel_err_site0,estimated_site1,analytic_site1,rel_err_site1\n");
    let members = bins.members(grid.values());
    let mut worst: f64 = 0.0;
    for (b, idx) in members.iter().enumerate() {
        if idx.is_empty() {
            continue;
        }
        let f = (bins.edges[b] * bins.edges[b + 1]).sqrt();
        write!(binned, "{f:e}").unwrap();
        for (e, s) in [&est.apsd_a, &est.apsd_b].into_iter().zip(&ana) {
            let (em, _) = mean_std(&idx.iter().map(|&i| e[i]).collect::<Vec<_>>());
            let (am, _) = mean_std(&idx.iter().map(|&i| s.values[i]).collect::<Vec<_>>());
            let rel = (em - am).abs() / am;
            worst = worst.max(rel);
            write!(binned, ",{em:e},{am:e},{rel:e}").unwrap();
        }
        binned.push('\n');
    }
    let (lo, hi) = (bins.edges[0], *bins.edges.last().unwrap());
    let (ana_zero, _) = weighted_phase_percentages(&ana_cross, lo, hi)?;

    out.write("configuration.json", config.to_json())?;
    for (site, apsd) in [&est.apsd_a, &est.apsd_b].into_iter().enumerate() {
        let e = EstimatedSpectrum {
            grid: grid.clone(),
            apsd: apsd.clone(),
            n_realizations: est.n_realizations,
        };
        out.write(&format!("estimated_apsd_site{site}.csv"), e.to_csv())?;
        out.write(&format!("analytic_apsd_site{site}.csv"), ana[site].to_csv())?;
    }
    out.write("estimated_cpsd.csv", est_cross.to_csv())?;
    out.write("analytic_cpsd.csv", ana_cross.to_csv())?;
    out.write("binned.csv", binned)?;
    if a.write_records.unwrap_or(false) {
        let one = TimeSeriesSpec { n_realizations: 1, ..spec };
        let rec = synthesize_qubit_records(&config, &layout, observable, &one)?;
        out.write("records.csv", rec.to_csv(0))?;
    }
    println!(
        "{} TLS, {} realizations of {} samples; worst binned APSD error {:.1}%; analytic phase zero over {:.1}% of [{lo:e}, {hi:e}] Hz",
        config.len(),
        spec.n_realizations,
        spec.n_samples(),
        100.0 * worst,
        ana_zero
    );
    finish(out, Some(seed), a)
}
