use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::log_trapezoid;
use crate::spectra::{is_zero_phase, CrossSpectrum, FrequencyGrid, SpectrumSeries};

use super::measurement::{BinnedSpectrum, PhaseObservation};

const GRID_MATCH_TOL: f64 = 1e-9;

/// A measured spectrum on a frequency grid with its uncertainty `σ(f)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredSpectrum {
    pub grid: FrequencyGrid,
    pub values: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl MeasuredSpectrum {
    pub fn new(grid: FrequencyGrid, values: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        for v in [&values, &sigma] {
            if v.len() != grid.len() {
                return Err(Error::LengthMismatch {
                    expected: grid.len(),
                    found: v.len(),
                });
            }
        }
        if sigma.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::invalid("sigma must be positive"));
        }
        Ok(MeasuredSpectrum { grid, values, sigma })
    }
}

/// Log-frequency average of the squared deviation in units of σ:
///
/// ```text
/// 1/(ln f_u − ln f_l) ∫ df/f (S_m − S_c)² / σ²
/// ```
///
/// Both spectra must live on the same grid, which must cover `[f_l, f_u]`.
pub fn cost(candidate: &SpectrumSeries, measured: &MeasuredSpectrum, f_l: f64, f_u: f64) -> Result<f64> {
    if candidate.grid != measured.grid {
        return Err(Error::invalid("candidate and measured spectra must share a grid"));
    }
    let g = &measured.grid;
    if !(f_l < f_u) || f_l < g.first() || f_u > g.last() {
        return Err(Error::GridCoverage { lo: f_l, hi: f_u });
    }
    let z: Vec<f64> = candidate
        .values
        .iter()
        .zip(&measured.values)
        .zip(&measured.sigma)
        .map(|((c, m), s)| ((m - c) / s).powi(2))
        .collect();
    Ok(log_trapezoid(g.values(), &z, f_l, f_u)? / (f_u / f_l).ln())
}

fn matching_index(grid: &[f64], f: f64) -> Option<usize> {
    let i = grid.partition_point(|g| *g < f * (1.0 - GRID_MATCH_TOL));
    (i < grid.len() && (grid[i] - f).abs() <= GRID_MATCH_TOL * f).then_some(i)
}

/// True iff the candidate lies inside `mean ± k·sigma` at every bin center.
/// The candidate grid must contain every bin center.
pub fn band_accept(candidate: &SpectrumSeries, measured: &BinnedSpectrum) -> Result<bool> {
    let g = candidate.grid.values();
    let values = measured
        .bins
        .iter()
        .map(|b| {
            matching_index(g, b.f_center)
                .map(|i| candidate.values[i])
                .ok_or(Error::GridCoverage {
                    lo: b.f_center,
                    hi: b.f_center,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(measured.contains(&values))
}

/// True iff the candidate phase equals the observed phase at every listed
/// frequency. Vacuously true without observations.
pub fn phase_accept(candidate: &CrossSpectrum, observed: &[PhaseObservation]) -> Result<bool> {
    let g = candidate.grid.values();
    for o in observed {
        let i = matching_index(g, o.f_center).ok_or(Error::GridCoverage {
            lo: o.f_center,
            hi: o.f_center,
        })?;
        if is_zero_phase(candidate.phase[i]) == o.is_pi() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{Observable, Origin};

    fn series(grid: &FrequencyGrid, v: Vec<f64>) -> SpectrumSeries {
        SpectrumSeries::new(grid.clone(), v, Observable::Voltage, 0, Origin::Analytic).unwrap()
    }

    #[test]
    fn cost_examples() {
        let grid = FrequencyGrid::log_spaced(1e-4, 1.0, 401).unwrap();
        let m: Vec<f64> = grid.values().iter().map(|f| 1.0 / f).collect();
        let sigma: Vec<f64> = m.iter().map(|v| 0.3 * v).collect();
        let meas = MeasuredSpectrum::new(grid.clone(), m.clone(), sigma.clone()).unwrap();
        let same = series(&grid, m.clone());
        assert_eq!(cost(&same, &meas, 1e-4, 1.0).unwrap(), 0.0);
        let shifted = series(&grid, m.iter().zip(&sigma).map(|(a, s)| a + s).collect());
        assert!((cost(&shifted, &meas, 1e-4, 1.0).unwrap() - 1.0).abs() < 1e-12);
        // 2σ off in exactly the third decade
        let piece: Vec<f64> = grid
            .values()
            .iter()
            .zip(m.iter().zip(&sigma))
            .map(|(&f, (a, s))| if (1e-2..1e-1).contains(&f) { a + 2.0 * s } else { *a })
            .collect();
        let c = cost(&series(&grid, piece), &meas, 1e-4, 1.0).unwrap();
        assert!((c - 1.0).abs() < 0.02, "{c}");
        assert!(matches!(cost(&same, &meas, 1e-5, 1.0), Err(Error::GridCoverage { .. })));
    }

    #[test]
    fn band_acceptance() {
        use super::super::measurement::SpectrumBin;
        let grid = FrequencyGrid::new(vec![0.1, 1.0]).unwrap();
        let bins = BinnedSpectrum::new(
            vec![
                SpectrumBin { f_center: 0.1, mean: 10.0, sigma: 1.0 },
                SpectrumBin { f_center: 1.0, mean: 1.0, sigma: 0.1 },
            ],
            3.0,
        )
        .unwrap();
        assert!(band_accept(&series(&grid, vec![10.0, 1.0]), &bins).unwrap());
        assert!(!band_accept(&series(&grid, vec![13.0 + 1e-9, 1.0]), &bins).unwrap());
        let off = FrequencyGrid::new(vec![0.2, 1.0]).unwrap();
        assert!(band_accept(&series(&off, vec![10.0, 1.0]), &bins).is_err());
    }
}
