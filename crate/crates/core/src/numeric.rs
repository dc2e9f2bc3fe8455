//! Small numerical helpers shared across modules.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Pairwise (cascade) summation with a fixed tree shape.
///
/// The tree depends only on the slice length, so the result is bit-stable
/// no matter how the summands were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a path of indices into a single 64-bit stream identifier.
pub fn stream_id(path: &[u64]) -> u64 {
    path.iter()
        .fold(0x5851_f42d_4c95_7f2d, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Counter-based RNG stream: the master seed keys the generator and `path`
/// (e.g. `[hypothesis, draw]` or `[tls, realization]`) selects the stream.
pub fn stream_rng(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(path));
    rng
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Integrates `values` against `d(ln f)` over `[lo, hi]` with the trapezoid
/// rule, the integrand being linear in `ln f` between grid points. Partial
/// intervals at the ends are clipped by interpolation.
pub fn log_trapezoid(freqs: &[f64], values: &[f64], lo: f64, hi: f64) -> Result<f64> {
    if freqs.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: freqs.len(),
            found: values.len(),
        });
    }
    if !(lo < hi) || freqs.len() < 2 || lo < freqs[0] || hi > freqs[freqs.len() - 1] {
        return Err(Error::EmptyRange { lo, hi });
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut total = 0.0;
    for i in 0..freqs.len() - 1 {
        let (x0, x1) = (freqs[i].ln(), freqs[i + 1].ln());
        let a = x0.max(llo);
        let b = x1.min(lhi);
        if b <= a {
            continue;
        }
        let interp = |x: f64| {
            let t = (x - x0) / (x1 - x0);
            values[i] + (values[i + 1] - values[i]) * t
        };
        total += 0.5 * (interp(a) + interp(b)) * (b - a);
    }
    Ok(total)
}

/// Linear-interpolation quantile of already sorted data (`q` in [0, 1]).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + (sorted[i + 1] - sorted[i]) * frac
    } else {
        sorted[i]
    }
}

/// Median and interquartile range (q75 − q25).
pub fn median_iqr(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let med = quantile_sorted(&v, 0.5);
    (med, quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25))
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    (mean, (pairwise_sum(&sq) / (n - 1.0)).sqrt())
}
