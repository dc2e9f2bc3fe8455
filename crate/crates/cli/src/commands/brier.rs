use std::fmt::Write as _;

use clap::Args;
use serde::{Deserialize, Serialize};
use tls_noise::geometry::OrientationClass;
use tls_noise::inference::{BrierProtocol, NoiseModel};
use tls_noise::numeric::median_iqr;
use tls_noise::telegraph::TimeSeriesSpec;

use super::{finish, positive};
use crate::config::Common;
use crate::error::{invalid, CliResult};
use crate::output::RunOutput;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct BrierArgs {
    /// `--seed` is the first of `--n-seeds` consecutive seeds.
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n_seeds: Option<u64>,
    /// analytic or simulated measurement noise.
    #[arg(long)]
    pub noise: Option<String>,
    /// Relative sigma of the analytic noise model.
    #[arg(long)]
    pub rel_sigma: Option<f64>,
    #[arg(long)]
    pub realizations: Option<usize>,
}

#[derive(Serialize)]
struct Summary {
    seeds: Vec<u64>,
    median_one_dot: f64,
    median_two_dots: f64,
    median_two_samples: f64,
    /// two samples < two dots < one dot.
    ordering_holds: bool,
    prior_fallbacks: usize,
}

pub fn run(a: &BrierArgs, name: &str) -> CliResult<()> {
    let c = &a.common;
    let defaults = BrierProtocol::default();
    let noise = match a.noise.as_deref().unwrap_or("simulated") {
        "simulated" => NoiseModel::Simulated(TimeSeriesSpec::new(1e5, 1.0, a.realizations.unwrap_or(100), 0)?),
        "analytic" => NoiseModel::Analytic {
            rel_sigma: positive("rel-sigma", a.rel_sigma.unwrap_or(0.3))?,
        },
        other => return Err(invalid(format!("--noise must be analytic or simulated, got '{other}'"))),
    };
    let protocol = BrierProtocol {
        observable: c.observable()?,
        orientation: c.orientation(OrientationClass::VerticalZ)?,
        bins: c.bins((1e-4, 1e-1), 10)?,
        band_multiplier: c.band_k()?,
        noise,
        n_mc: c.n_mc(100_000)?,
        ..defaults
    };
    let first = c.seed();
    let n = a.n_seeds.unwrap_or(20);
    if n == 0 {
        return Err(invalid("--n-seeds must be at least 1"));
    }
    let seeds: Vec<u64> = (first..first + n).collect();

    let mut csv = String::from("seed,one_dot,two_dots,two_samples,prior_fallbacks\n");
    let (mut b1, mut b2, mut b3) = (Vec::new(), Vec::new(), Vec::new());
    let mut fallbacks = 0;
    for &s in &seeds {
        let o = protocol.run(s)?;
        writeln!(csv, "{s},{:e},{:e},{:e},{}", o.one_dot, o.two_dots, o.two_samples, o.all_rejected.join(";")).unwrap();
        b1.push(o.one_dot);
        b2.push(o.two_dots);
        b3.push(o.two_samples);
        fallbacks += o.all_rejected.len();
    }
    let summary = Summary {
        seeds,
        median_one_dot: median_iqr(&b1).0,
        median_two_dots: median_iqr(&b2).0,
        median_two_samples: median_iqr(&b3).0,
        ordering_holds: median_iqr(&b3).0 < median_iqr(&b2).0 && median_iqr(&b2).0 < median_iqr(&b1).0,
        prior_fallbacks: fallbacks,
    };
    let mut out = RunOutput::create(&c.out_dir(), name)?;
    out.write_json("protocol.json", &protocol)?;
    out.write("brier.csv", csv)?;
    out.write_json("summary.json", &summary)?;
    println!(
        "median Brier: one dot {:.3}, two dots {:.3}, two samples {:.3}",
        summary.median_one_dot, summary.median_two_dots, summary.median_two_samples
    );
    finish(out, Some(first), a)
}
