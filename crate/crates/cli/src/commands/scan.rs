use clap::Args;
use serde::{Deserialize, Serialize};
use tls_noise::geometry::OrientationClass;
use tls_noise::inference::{cost_map, scan_to_csv, ScanFamily, ScanPoint, ScanSetup};
use tls_noise::{FrequencyGrid, Tls, TlsConfiguration, Vec3};

use super::{finish, positive};
use crate::config::{Common, Geometry};
use crate::error::{invalid, CliResult};
use crate::output::RunOutput;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct ScanArgs {
    /// `--orientation` is the assumed (scanned) dipole axis.
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: Geometry,
    #[arg(long, allow_hyphen_values = true)]
    pub truth_x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub truth_y: Option<f64>,
    #[arg(long)]
    pub truth_z: Option<f64>,
    /// Axis of the true dipole: hor-x, hor-y or ver-z.
    #[arg(long)]
    pub truth_orientation: Option<String>,
    /// True dipole moment (e·nm).
    #[arg(long)]
    pub truth_moment: Option<f64>,
    /// Moments tried for the candidates (comma-separated, e·nm).
    #[arg(long)]
    pub moments: Option<String>,
    /// Switching rate shared by truth and candidates (Hz).
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_min: Option<f64>,
    #[arg(long)]
    pub y_max: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Candidate heights (comma-separated, nm); defaults to the truth's.
    #[arg(long)]
    pub zs: Option<String>,
    /// Measurement uncertainty as a fraction of the true spectrum.
    #[arg(long)]
    pub sigma_rel: Option<f64>,
    /// Cost below which a candidate counts as indistinguishable.
    #[arg(long)]
    pub threshold: Option<f64>,
}

fn axis_vector(o: OrientationClass) -> CliResult<Vec3> {
    match o {
        OrientationClass::HorizontalX => Ok(Vec3::X),
        OrientationClass::HorizontalY => Ok(Vec3::Y),
        OrientationClass::VerticalZ => Ok(Vec3::Z),
        other => Err(invalid(format!("scan needs a fixed axis, not {}", other.label()))),
    }
}

fn list(name: &str, s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("--{name}: '{v}' is not a number")))
        })
        .collect()
}

fn axis(lo: f64, hi: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(lo <= hi) {
        return Err(invalid(format!("empty scan range [{lo}, {hi}]")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

#[derive(Serialize)]
struct Summary {
    n_candidates: usize,
    n_below_threshold: usize,
    threshold: f64,
    best: Option<ScanPoint>,
}

pub fn run(a: &ScanArgs, name: &str) -> CliResult<()> {
    let c = &a.common;
    let rate = positive("rate", a.rate.unwrap_or(0.05))?;
    let truth_pos = Vec3::new(a.truth_x.unwrap_or(0.0), a.truth_y.unwrap_or(150.0), a.truth_z.unwrap_or(72.0));
    let truth_axis = axis_vector(OrientationClass::parse(a.truth_orientation.as_deref().unwrap_or("ver-z"))?)?;
    let truth = Tls::new(truth_pos, truth_axis, a.truth_moment.unwrap_or(1.0), rate)?;
    let (lo, hi) = c.frequency_range((1e-4, 1.0))?;
    let per_decade = c.bins_per_decade.unwrap_or(10).max(1);
    let n = ((hi / lo).log10() * per_decade as f64).round() as usize + 1;
    let setup = ScanSetup {
        truth: TlsConfiguration::new(vec![truth], a.geometry.epsilon_r())?,
        layout: a.geometry.layout()?,
        observable: c.observable()?,
        grid: FrequencyGrid::log_spaced(lo, hi, n.max(2))?,
        sigma_rel: positive("sigma-rel", a.sigma_rel.unwrap_or(0.1))?,
        threshold: positive("threshold", a.threshold.unwrap_or(0.1))?,
    };
    let step = positive("step", a.step.unwrap_or(1.0))?;
    let family = ScanFamily {
        orientation: axis_vector(c.orientation(OrientationClass::HorizontalX)?)?,
        switch_rate: rate,
        xs: axis(a.x_min.unwrap_or(-100.0), a.x_max.unwrap_or(100.0), step)?,
        ys: axis(a.y_min.unwrap_or(-200.0), a.y_max.unwrap_or(200.0), step)?,
        zs: match &a.zs {
            Some(s) => list("zs", s)?,
            None => vec![truth_pos.z],
        },
        moments: match &a.moments {
            Some(s) => list("moments", s)?,
            None => vec![a.truth_moment.unwrap_or(1.0)],
        },
    };

    let points = cost_map(&setup, &family)?;
    let low: Vec<ScanPoint> = points.iter().copied().filter(|p| p.cost < setup.threshold).collect();
    let best = points.iter().copied().min_by(|x, y| x.cost.total_cmp(&y.cost));
    let summary = Summary {
        n_candidates: points.len(),
        n_below_threshold: low.len(),
        threshold: setup.threshold,
        best,
    };
    let mut out = RunOutput::create(&c.out_dir(), name)?;
    out.write_json("setup.json", &(&setup, &family))?;
    out.write("cost_map.csv", scan_to_csv(&points))?;
    out.write("low_cost.csv", scan_to_csv(&low))?;
    out.write_json("summary.json", &summary)?;
    println!(
        "{} of {} candidates below cost {}",
        low.len(),
        points.len(),
        setup.threshold
    );
    finish(out, c.seed, a)
}
