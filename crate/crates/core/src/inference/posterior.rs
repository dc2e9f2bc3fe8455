use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::OrientationClass;
use crate::numeric::pairwise_sum;

use super::hypothesis::ModelHypothesis;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorEntry {
    pub hypothesis: ModelHypothesis,
    pub likelihood: f64,
    pub posterior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorTable {
    pub entries: Vec<PosteriorEntry>,
    pub n_mc: usize,
    pub rng_seed: u64,
}

impl PosteriorTable {
    pub fn posteriors(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.posterior).collect()
    }

    /// Hypotheses with the posterior as prior weight, for a follow-up update.
    pub fn as_priors(&self) -> Vec<ModelHypothesis> {
        self.entries
            .iter()
            .map(|e| ModelHypothesis {
                prior_weight: e.posterior,
                ..e.hypothesis.clone()
            })
            .collect()
    }

    /// Index of the most probable hypothesis (first on ties).
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (i, e) in self.entries.iter().enumerate() {
            if e.posterior > self.entries[best].posterior {
                best = i;
            }
        }
        best
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("posterior serializes")
    }

    /// CSV with header `n_tls,ell_nm,orientation,likelihood,posterior`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n_tls,ell_nm,orientation,likelihood,posterior\n");
        for e in &self.entries {
            let h = &e.hypothesis;
            writeln!(
                out,
                "{},{:e},{},{:e},{:e}",
                h.n_tls,
                h.dipole_length,
                h.orientation.label(),
                e.likelihood,
                e.posterior
            )
            .unwrap();
        }
        out
    }
}

/// Bayes' rule over a finite hypothesis set with priors taken from
/// `prior_weight`. Fails with [`Error::AllRejected`] when no hypothesis has
/// positive prior × likelihood.
pub fn bayes_update(
    hypotheses: &[ModelHypothesis],
    likelihoods: &[f64],
    n_mc: usize,
    rng_seed: u64,
) -> Result<PosteriorTable> {
    if hypotheses.len() != likelihoods.len() {
        return Err(Error::LengthMismatch {
            expected: hypotheses.len(),
            found: likelihoods.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::invalid("no hypotheses"));
    }
    if likelihoods.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
        return Err(Error::invalid("likelihoods must be finite and non-negative"));
    }
    let joint: Vec<f64> = hypotheses
        .iter()
        .zip(likelihoods)
        .map(|(h, l)| h.prior_weight * l)
        .collect();
    let z = pairwise_sum(&joint);
    if !(z > 0.0) {
        return Err(Error::AllRejected);
    }
    let entries = hypotheses
        .iter()
        .zip(likelihoods)
        .zip(&joint)
        .map(|((h, &l), &j)| PosteriorEntry {
            hypothesis: h.clone(),
            likelihood: l,
            posterior: j / z,
        })
        .collect();
    Ok(PosteriorTable {
        entries,
        n_mc,
        rng_seed,
    })
}

/// Folds [`bayes_update`] over independent samples, each sample's posterior
/// serving as the next prior. The stored likelihood is the product over
/// samples.
pub fn sequential_update(
    hypotheses: &[ModelHypothesis],
    samples: &[Vec<f64>],
    n_mc: usize,
    rng_seed: u64,
) -> Result<PosteriorTable> {
    let (first, rest) = samples
        .split_first()
        .ok_or_else(|| Error::invalid("sequential update needs at least one sample"))?;
    let mut table = bayes_update(hypotheses, first, n_mc, rng_seed)?;
    for l in rest {
        let product: Vec<f64> = table
            .entries
            .iter()
            .zip(l)
            .map(|(e, l)| e.likelihood * l)
            .collect();
        table = bayes_update(&table.as_priors(), l, n_mc, rng_seed)?;
        for (e, p) in table.entries.iter_mut().zip(product) {
            e.likelihood = p;
        }
    }
    Ok(table)
}

/// One cell of the orientation-marginalized posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalCell {
    pub n_tls: usize,
    pub ell_nm: f64,
    pub probability: f64,
}

/// Posterior restricted to one orientation class. Means are `None` when the
/// class has no posterior mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalExpectation {
    pub orientation: OrientationClass,
    pub probability: f64,
    pub mean_n_tls: Option<f64>,
    pub mean_ell_nm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub mean_n_tls: f64,
    pub mean_ell_nm: f64,
    /// Dense grid over every swept (n_tls, ℓ) pair, n-major.
    pub marginal: Vec<MarginalCell>,
    pub conditionals: Vec<ConditionalExpectation>,
}

impl Expectations {
    /// CSV with header `n_tls,ell_nm,probability`, one row per grid cell.
    pub fn marginal_csv(&self) -> String {
        let mut out = String::from("n_tls,ell_nm,probability\n");
        for c in &self.marginal {
            writeln!(out, "{},{:e},{:e}", c.n_tls, c.ell_nm, c.probability).unwrap();
        }
        out
    }

    /// Expected areal density in cm⁻² for a layer of `area_nm2`.
    pub fn density_per_cm2(&self, area_nm2: f64) -> f64 {
        self.mean_n_tls / area_nm2 * 1e14
    }

    /// Distinct swept counts and lengths, ascending.
    pub fn axes(&self) -> (Vec<usize>, Vec<f64>) {
        let mut n: Vec<usize> = self.marginal.iter().map(|c| c.n_tls).collect();
        n.sort_unstable();
        n.dedup();
        let mut l: Vec<f64> = self.marginal.iter().map(|c| c.ell_nm).collect();
        l.sort_by(f64::total_cmp);
        l.dedup();
        (n, l)
    }
}

/// Posterior means, the (n_tls, ℓ) marginal and per-orientation conditionals.
pub fn expectations(table: &PosteriorTable) -> Expectations {
    let weighted = |f: &dyn Fn(&PosteriorEntry) -> f64| -> f64 {
        let v: Vec<f64> = table.entries.iter().map(|e| e.posterior * f(e)).collect();
        pairwise_sum(&v)
    };
    let mean_n_tls = weighted(&|e| e.hypothesis.n_tls as f64);
    let mean_ell_nm = weighted(&|e| e.hypothesis.dipole_length);

    let mut counts: Vec<usize> = table.entries.iter().map(|e| e.hypothesis.n_tls).collect();
    counts.sort_unstable();
    counts.dedup();
    let mut lengths: Vec<f64> = table.entries.iter().map(|e| e.hypothesis.dipole_length).collect();
    lengths.sort_by(f64::total_cmp);
    lengths.dedup();
    let mut grid = vec![Vec::new(); counts.len() * lengths.len()];
    for e in &table.entries {
        let i = counts.binary_search(&e.hypothesis.n_tls).unwrap();
        let j = lengths
            .binary_search_by(|l| l.total_cmp(&e.hypothesis.dipole_length))
            .unwrap();
        grid[i * lengths.len() + j].push(e.posterior);
    }
    let marginal = grid
        .iter()
        .enumerate()
        .map(|(idx, p)| MarginalCell {
            n_tls: counts[idx / lengths.len()],
            ell_nm: lengths[idx % lengths.len()],
            probability: pairwise_sum(p),
        })
        .collect();

    let mut classes: Vec<OrientationClass> = Vec::new();
    for e in &table.entries {
        if !classes.contains(&e.hypothesis.orientation) {
            classes.push(e.hypothesis.orientation);
        }
    }
    let conditionals = classes
        .into_iter()
        .map(|o| {
            let within: Vec<&PosteriorEntry> = table
                .entries
                .iter()
                .filter(|e| e.hypothesis.orientation == o)
                .collect();
            let p: Vec<f64> = within.iter().map(|e| e.posterior).collect();
            let probability = pairwise_sum(&p);
            let mean = |f: &dyn Fn(&ModelHypothesis) -> f64| {
                (probability > 0.0).then(|| {
                    let v: Vec<f64> = within.iter().map(|e| e.posterior * f(&e.hypothesis)).collect();
                    pairwise_sum(&v) / probability
                })
            };
            ConditionalExpectation {
                orientation: o,
                probability,
                mean_n_tls: mean(&|h| h.n_tls as f64),
                mean_ell_nm: mean(&|h| h.dipole_length),
            }
        })
        .collect();
    Expectations {
        mean_n_tls,
        mean_ell_nm,
        marginal,
        conditionals,
    }
}

/// `Σ_j (P_j − δ_j)²` with `truth` the index of the true hypothesis.
pub fn brier(table: &PosteriorTable, truth: usize) -> Result<f64> {
    if truth >= table.entries.len() {
        return Err(Error::invalid(format!(
            "truth index {truth} out of range for {} hypotheses",
            table.entries.len()
        )));
    }
    let terms: Vec<f64> = table
        .entries
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let d = if j == truth { 1.0 } else { 0.0 };
            (e.posterior - d).powi(2)
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{LayerBox, LayerRegion};

    fn hyps(counts: &[usize]) -> Vec<ModelHypothesis> {
        counts
            .iter()
            .map(|&n| ModelHypothesis {
                n_tls: n,
                dipole_length: 1.0,
                orientation: OrientationClass::VerticalZ,
                layer: LayerRegion::Box(LayerBox::sheet(100.0, 60.0).unwrap()),
                rate_interval: (1e-5, 1.0),
                prior_weight: 1.0 / counts.len() as f64,
                epsilon_r: 11.0,
            })
            .collect()
    }

    #[test]
    fn bayes_examples() {
        let h = hyps(&[1, 10]);
        let t = bayes_update(&h, &[0.2, 0.6], 10, 0).unwrap();
        assert!((t.entries[0].posterior - 0.25).abs() < 1e-15);
        assert!((t.entries[1].posterior - 0.75).abs() < 1e-15);
        let t = bayes_update(&h, &[0.3, 0.3], 10, 0).unwrap();
        assert_eq!(t.posteriors(), vec![0.5, 0.5]);
        let t = bayes_update(&h, &[0.0, 0.01], 10, 0).unwrap();
        assert_eq!(t.posteriors(), vec![0.0, 1.0]);
        assert_eq!(bayes_update(&h, &[0.0, 0.0], 10, 0), Err(Error::AllRejected));
        assert!(bayes_update(&h, &[0.1], 10, 0).is_err());
    }

    #[test]
    fn sequential_matches_single_and_commutes() {
        let h = hyps(&[1, 2, 3]);
        let a = vec![0.1, 0.5, 0.2];
        let b = vec![0.7, 0.1, 0.3];
        let one = sequential_update(&h, &[a.clone()], 1, 0).unwrap();
        assert_eq!(one, bayes_update(&h, &a, 1, 0).unwrap());
        let ab = sequential_update(&h, &[a.clone(), b.clone()], 1, 0).unwrap();
        let ba = sequential_update(&h, &[b, a], 1, 0).unwrap();
        for (x, y) in ab.entries.iter().zip(&ba.entries) {
            assert!((x.posterior - y.posterior).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_examples() {
        let h = hyps(&[1, 10]);
        let t = bayes_update(&h, &[1.0, 1.0], 1, 0).unwrap();
        let e = expectations(&t);
        assert_eq!(e.mean_n_tls, 5.5);
        assert_eq!(e.marginal.len(), 2);
        let t = bayes_update(&h, &[0.0, 1.0], 1, 0).unwrap();
        let e = expectations(&t);
        assert_eq!((e.mean_n_tls, e.mean_ell_nm), (10.0, 1.0));
        assert!(e.marginal_csv().starts_with("n_tls,ell_nm,probability\n"));
    }

    #[test]
    fn brier_examples() {
        let h = hyps(&[1, 2, 3, 4, 5, 6]);
        let uniform = bayes_update(&h, &[1.0; 6], 1, 0).unwrap();
        assert!((brier(&uniform, 0).unwrap() - 30.0 / 36.0).abs() < 1e-15);
        let point = bayes_update(&h, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0], 1, 0).unwrap();
        assert_eq!(brier(&point, 2).unwrap(), 0.0);
        assert_eq!(brier(&point, 0).unwrap(), 2.0);
        assert!(brier(&point, 6).is_err());
    }
}
