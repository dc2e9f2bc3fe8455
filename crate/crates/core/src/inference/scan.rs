use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{QubitLayout, Tls, TlsConfiguration, Vec3};
use crate::spectra::{analytic_apsd, FrequencyGrid, Observable};

use super::filters::{cost, MeasuredSpectrum};

/// The "measured" side of a cost scan: a known configuration observed at
/// every site with `σ(f) = sigma_rel · S_m(f)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSetup {
    pub truth: TlsConfiguration,
    pub layout: QubitLayout,
    pub observable: Observable,
    pub grid: FrequencyGrid,
    pub sigma_rel: f64,
    pub threshold: f64,
}

/// Single-TLS candidates with a fixed (possibly wrong) orientation and
/// switching rate, scanned over position and moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanFamily {
    pub orientation: Vec3,
    pub switch_rate: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub zs: Vec<f64>,
    pub moments: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub moment: f64,
    /// Cost summed over all sites.
    pub cost: f64,
}

impl ScanSetup {
    fn measured(&self) -> Result<Vec<MeasuredSpectrum>> {
        if !(self.sigma_rel > 0.0) {
            return Err(Error::invalid("sigma_rel must be positive"));
        }
        (0..self.layout.len())
            .map(|site| {
                let s = analytic_apsd(&self.truth, &self.layout, site, self.observable, &self.grid)?;
                let sigma = s.values.iter().map(|v| self.sigma_rel * v).collect();
                MeasuredSpectrum::new(self.grid.clone(), s.values, sigma)
            })
            .collect()
    }
}

/// Summed cost of every candidate in the family, x-major then y, z, moment.
/// Candidates that coincide with a site are skipped.
pub fn cost_map(setup: &ScanSetup, family: &ScanFamily) -> Result<Vec<ScanPoint>> {
    let measured = setup.measured()?;
    let (f_l, f_u) = (setup.grid.first(), setup.grid.last());
    let eps = setup.truth.epsilon_r();
    let mut candidates = Vec::new();
    for &x in &family.xs {
        for &y in &family.ys {
            for &z in &family.zs {
                for &p in &family.moments {
                    candidates.push((x, y, z, p));
                }
            }
        }
    }
    let points = candidates
        .par_iter()
        .map(|&(x, y, z, p)| {
            let tls = Tls::new(Vec3::new(x, y, z), family.orientation, p, family.switch_rate)?;
            let config = TlsConfiguration::new(vec![tls], eps)?;
            let mut total = 0.0;
            for (site, m) in measured.iter().enumerate() {
                match analytic_apsd(&config, &setup.layout, site, setup.observable, &setup.grid) {
                    Ok(c) => total += cost(&c, m, f_l, f_u)?,
                    Err(Error::ZeroDistance { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
            Ok(Some(ScanPoint {
                x,
                y,
                z,
                moment: p,
                cost: total,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(points.into_iter().flatten().collect())
}

/// Candidates whose summed cost is below `setup.threshold`.
pub fn underdetermination_scan(setup: &ScanSetup, family: &ScanFamily) -> Result<Vec<ScanPoint>> {
    Ok(cost_map(setup, family)?
        .into_iter()
        .filter(|p| p.cost < setup.threshold)
        .collect())
}

/// Writes scan points as `x_nm,y_nm,z_nm,moment_e_nm,cost`.
pub fn scan_to_csv(points: &[ScanPoint]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("x_nm,y_nm,z_nm,moment_e_nm,cost\n");
    for p in points {
        writeln!(out, "{:e},{:e},{:e},{:e},{:e}", p.x, p.y, p.z, p.moment, p.cost).unwrap();
    }
    out
}
