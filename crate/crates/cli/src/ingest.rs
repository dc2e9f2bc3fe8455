//! Reading measured spectra and phases from CSV.

use std::path::Path;

use thiserror::Error;
use tls_noise::inference::{BinnedSpectrum, PhaseObservation, SpectrumBin};
use tls_noise::numeric::mean_std;
use tls_noise::spectra::LogBins;

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("{path}: line {line}: {message}")]
    ParseError { path: String, line: u64, message: String },
    #[error("{path}: line {line}: sigma must be positive, got {sigma}")]
    NonPositiveSigma { path: String, line: u64, sigma: f64 },
    #[error("{path}: line {line}: frequencies must be strictly increasing")]
    UnsortedFrequencies { path: String, line: u64 },
    #[error("{path}: bin [{lo}, {hi}] Hz holds {count} point(s); at least 2 are needed for a standard deviation")]
    SparseBin { path: String, lo: f64, hi: f64, count: usize },
}

/// Log-spaced re-binning of raw `(frequency_hz, psd)` rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rebin {
    pub f_min: f64,
    pub f_max: f64,
    pub per_decade: usize,
}

struct Row {
    line: u64,
    values: Vec<f64>,
}

fn read_rows(path: &Path, required: &[&str], optional: &[&str]) -> Result<(Vec<Row>, Vec<bool>), IngestError> {
    let name = path.display().to_string();
    let parse_err = |line: u64, message: String| IngestError::ParseError {
        path: name.clone(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| parse_err(0, e.to_string()))?;
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let column = |c: &str| header.iter().position(|h| h == c);
    let mut idx = Vec::new();
    for c in required {
        idx.push(column(c).ok_or_else(|| parse_err(1, format!("missing column '{c}'")))?);
    }
    let mut present = Vec::new();
    for c in optional {
        present.push(column(c).is_some());
        idx.extend(column(c));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let values = idx
            .iter()
            .map(|&i| {
                let field = rec.get(i).unwrap_or("");
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(line, format!("'{field}' in column '{}' is not a finite number", &header[i])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(Row { line, values });
    }
    if rows.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }
    for w in rows.windows(2) {
        if w[1].values[0] <= w[0].values[0] {
            return Err(IngestError::UnsortedFrequencies {
                path: name,
                line: w[1].line,
            });
        }
    }
    if let Some(r) = rows.iter().find(|r| !(r.values[0] > 0.0)) {
        return Err(parse_err(r.line, "frequency must be positive".into()));
    }
    Ok((rows, present))
}

/// Reads a binned spectrum from a CSV with header `frequency_hz,psd,sigma`.
///
/// With `rebin`, the file holds raw `frequency_hz,psd` rows (any `sigma`
/// column is ignored) and each log bin's mean and sample standard deviation
/// become the bin values.
pub fn ingest_psd(path: &Path, rebin: Option<Rebin>, band_multiplier: f64) -> Result<BinnedSpectrum, IngestError> {
    let name = path.display().to_string();
    let (rows, present) = read_rows(path, &["frequency_hz", "psd"], &["sigma"])?;
    let bins = match rebin {
        None => {
            if !present[0] {
                return Err(IngestError::ParseError {
                    path: name,
                    line: 1,
                    message: "missing column 'sigma' (needed unless re-binning)".into(),
                });
            }
            let mut bins = Vec::with_capacity(rows.len());
            for r in &rows {
                let (f, psd, sigma) = (r.values[0], r.values[1], r.values[2]);
                if !(sigma > 0.0) {
                    return Err(IngestError::NonPositiveSigma {
                        path: name,
                        line: r.line,
                        sigma,
                    });
                }
                bins.push(SpectrumBin { f_center: f, mean: psd, sigma });
            }
            bins
        }
        Some(rb) => {
            let log_bins = LogBins::new(rb.f_min, rb.f_max, rb.per_decade).map_err(|e| IngestError::ParseError {
                path: name.clone(),
                line: 0,
                message: e.to_string(),
            })?;
            let freqs: Vec<f64> = rows.iter().map(|r| r.values[0]).collect();
            let mut bins = Vec::new();
            for (b, members) in log_bins.members(&freqs).iter().enumerate() {
                if members.is_empty() {
                    continue;
                }
                let (lo, hi) = (log_bins.edges[b], log_bins.edges[b + 1]);
                if members.len() < 2 {
                    return Err(IngestError::SparseBin { path: name, lo, hi, count: 1 });
                }
                let values: Vec<f64> = members.iter().map(|&i| rows[i].values[1]).collect();
                let (mean, sigma) = mean_std(&values);
                if !(sigma > 0.0) {
                    return Err(IngestError::NonPositiveSigma {
                        path: name,
                        line: rows[members[0]].line,
                        sigma,
                    });
                }
                bins.push(SpectrumBin {
                    f_center: (lo * hi).sqrt(),
                    mean,
                    sigma,
                });
            }
            bins
        }
    };
    BinnedSpectrum::new(bins, band_multiplier).map_err(|e| IngestError::ParseError {
        path: name,
        line: 0,
        message: e.to_string(),
    })
}

/// Reads CPSD phase observations from a CSV with header
/// `frequency_hz,phase`; phases must be 0 or π (radians).
pub fn ingest_phases(path: &Path) -> Result<Vec<PhaseObservation>, IngestError> {
    let (rows, _) = read_rows(path, &["frequency_hz", "phase"], &[])?;
    rows.iter()
        .map(|r| {
            let phase = r.values[1];
            if phase.abs() > 1e-6 && (phase - std::f64::consts::PI).abs() > 1e-6 {
                return Err(IngestError::ParseError {
                    path: path.display().to_string(),
                    line: r.line,
                    message: format!("phase {phase} is neither 0 nor π"),
                });
            }
            let phase = if phase.abs() <= 1e-6 { 0.0 } else { std::f64::consts::PI };
            Ok(PhaseObservation {
                f_center: r.values[0],
                phase,
            })
        })
        .collect()
}
