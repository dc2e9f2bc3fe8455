use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use tls_noise::geometry::OrientationClass;
use tls_noise::numeric::mean_std;
use tls_noise::spectra::{
    analytic_apsd, analytic_cpsd, orientation_ensemble_stats, weighted_phase_percentages, EnsembleStudy,
};
use tls_noise::FrequencyGrid;

use super::{configuration, finish, hypothesis};
use crate::config::{Common, Geometry};
use crate::error::{invalid, CliResult};
use crate::output::RunOutput;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct SpectraArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: Geometry,
    #[arg(long)]
    pub tls_file: Option<PathBuf>,
    #[arg(long)]
    pub n_tls: Option<usize>,
    #[arg(long)]
    pub ell: Option<f64>,
    /// Log-spaced frequencies per decade.
    #[arg(long)]
    pub points_per_decade: Option<usize>,
    /// Sample this many configurations per orientation class and report
    /// phase statistics instead of a single configuration's spectra.
    #[arg(long)]
    pub ensemble: Option<usize>,
}

#[derive(Serialize)]
struct Summary {
    n_tls: usize,
    pct_zero: f64,
    pct_pi: f64,
    mean_strength: f64,
}

pub fn run(a: &SpectraArgs, name: &str) -> CliResult<()> {
    let c = &a.common;
    let (lo, hi) = c.frequency_range((1e-4, 1e-1))?;
    let per_decade = a.points_per_decade.unwrap_or(50);
    if per_decade == 0 {
        return Err(invalid("--points-per-decade must be at least 1"));
    }
    let n = ((hi / lo).log10() * per_decade as f64).ceil() as usize + 1;
    let grid = FrequencyGrid::log_spaced(lo, hi, n.max(2))?;
    let observable = c.observable()?;
    let layout = a.geometry.layout()?;
    let mut out = RunOutput::create(&c.out_dir(), name)?;
    let n_tls = a.n_tls.unwrap_or(10);
    let ell = a.ell.unwrap_or(1.0);

    if let Some(samples) = a.ensemble {
        let base = hypothesis(&a.geometry, n_tls, ell, OrientationClass::FullyRandom, a.geometry.layer()?)?;
        let study = EnsembleStudy {
            base,
            classes: c.orientations(&OrientationClass::ALL)?,
            layout,
            sites: (0, 1),
            observable,
            n_samples: samples,
            rng_seed: c.seed(),
            grid,
            phase_range: (lo, hi),
            strength_freqs: vec![(lo * hi).sqrt()],
        };
        let stats = orientation_ensemble_stats(&study)?;
        let mut csv = String::from("orientation,sample,pct_zero,pct_pi\n");
        for s in &stats {
            for (i, (z, p)) in s.pct_zero.iter().zip(&s.pct_pi).enumerate() {
                writeln!(csv, "{},{i},{z:e},{p:e}", s.orientation.label()).unwrap();
            }
            println!(
                "{:>12}: median pct_pi {:5.1} (IQR {:5.1}), strength {:.3} ± {:.3}",
                s.orientation.label(),
                s.median_pct_pi,
                s.iqr_pct_pi,
                s.strength_mean,
                s.strength_std
            );
        }
        out.write("ensemble.csv", csv)?;
        out.write_json("ensemble_summary.json", &stats)?;
        return finish(out, Some(c.seed()), a);
    }

    let shape = (n_tls, ell, c.orientation(OrientationClass::FullyRandom)?);
    let config = configuration(a.tls_file.as_deref(), &mut out, &a.geometry, shape, c.seed())?;
    let cross = analytic_cpsd(&config, &layout, 0, 1, observable, &grid)?;
    let (pct_zero, pct_pi) = weighted_phase_percentages(&cross, lo, hi)?;
    let summary = Summary {
        n_tls: config.len(),
        pct_zero,
        pct_pi,
        mean_strength: mean_std(&cross.strength).0,
    };
    out.write("configuration.json", config.to_json())?;
    for site in 0..2 {
        let s = analytic_apsd(&config, &layout, site, observable, &grid)?;
        out.write(&format!("apsd_site{site}.csv"), s.to_csv())?;
    }
    out.write("cpsd.csv", cross.to_csv())?;
    out.write_json("summary.json", &summary)?;
    println!("phase zero over {pct_zero:.1}% and π over {pct_pi:.1}% (1/f weighted)");
    finish(out, Some(c.seed()), a)
}
