use clap::Args;
use serde::{Deserialize, Serialize};
use tls_noise::continuum::{
    critical_separation, layer_integral_d0, separation_sweep, sweep_to_csv, DiscLayer, LayerOrientation,
};
use tls_noise::Error;

use super::{finish, positive};
use crate::config::Common;
use crate::error::{invalid, CliResult};
use crate::output::RunOutput;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct ContinuumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Disc radius R (nm).
    #[arg(long = "R", visible_alias = "radius")]
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    /// Layer height h above the qubits (nm).
    #[arg(long = "h", visible_alias = "height")]
    #[serde(rename = "h")]
    pub height: Option<f64>,
    #[arg(long)]
    pub d_min: Option<f64>,
    /// Largest qubit separation d (nm).
    #[arg(long)]
    pub d_max: Option<f64>,
    #[arg(long)]
    pub d_step: Option<f64>,
}

#[derive(Serialize)]
struct Summary {
    radius_nm: f64,
    height_nm: f64,
    /// Separation where A_x changes sign; absent when it does not within
    /// the sweep.
    critical_separation_nm: Option<f64>,
    a_x_d0: f64,
    a_y_d0: f64,
    a_z_d0: f64,
    a_r_d0: f64,
    ratio_z_over_x_d0: f64,
}

pub fn run(a: &ContinuumArgs, name: &str) -> CliResult<()> {
    let layer = DiscLayer::new(a.radius.unwrap_or(100.0), a.height.unwrap_or(50.0))?;
    let d_min = a.d_min.unwrap_or(0.0);
    let d_max = positive("d-max", a.d_max.unwrap_or(150.0))?;
    let step = positive("d-step", a.d_step.unwrap_or(1.0))?;
    if !(d_min >= 0.0 && d_min < d_max) {
        return Err(invalid(format!("need 0 <= --d-min < --d-max, got [{d_min}, {d_max}]")));
    }
    let n = ((d_max - d_min) / step + 1e-9).floor() as usize;
    let ds: Vec<f64> = (0..=n).map(|i| d_min + i as f64 * step).collect();
    let rows = separation_sweep(&layer, &ds)?;

    let d_c = match critical_separation(&layer, (d_min, d_max)) {
        Ok(d) => Some(d),
        Err(Error::NoBracket { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let d0 = |o| layer_integral_d0(&layer, o);
    let summary = Summary {
        radius_nm: layer.radius,
        height_nm: layer.height,
        critical_separation_nm: d_c,
        a_x_d0: d0(LayerOrientation::X),
        a_y_d0: d0(LayerOrientation::Y),
        a_z_d0: d0(LayerOrientation::Z),
        a_r_d0: d0(LayerOrientation::Random),
        ratio_z_over_x_d0: d0(LayerOrientation::Z) / d0(LayerOrientation::X),
    };

    let mut out = RunOutput::create(&a.common.out_dir(), name)?;
    out.write("sweep.csv", sweep_to_csv(&rows))?;
    out.write_json("summary.json", &summary)?;
    match d_c {
        Some(d) => println!("d_c = {d:.2} nm"),
        None => println!("A_x keeps its sign over [{d_min}, {d_max}] nm"),
    }
    finish(out, a.common.seed, a)
}
