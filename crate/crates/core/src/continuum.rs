//! Continuum (layer) limit of the geometric correlation factor.
//!
//! Dipoles fill a disc of radius `R` at height `h` above two qubits at
//! `(±d/2, 0, 0)`. For fixed dipole orientation the cross-correlation
//! geometry reduces to area integrals over the disc:
//!
//! ```text
//! A_x = ∫ (x² − d²/4) / D      A_y = ∫ y² / D      A_z = ∫ h² / D
//! D   = [(x + d/2)² + y² + h²]^{3/2} [(x − d/2)² + y² + h²]^{3/2}
//! ```
//!
//! and random orientation gives `A_r = (A_x + A_y + A_z) / 3`.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform disc of dipoles at height `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscLayer {
    pub radius: f64,
    pub height: f64,
}

impl DiscLayer {
    pub fn new(radius: f64, height: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite() && height > 0.0 && height.is_finite()) {
            return Err(Error::InvalidRange(format!(
                "disc needs R > 0 and h > 0, got R = {radius}, h = {height}"
            )));
        }
        Ok(DiscLayer { radius, height })
    }

    /// Areal density (nm⁻²) of `n` dipoles spread over the disc; multiplies
    /// the area integrals to give the configuration average.
    pub fn density(&self, n: f64) -> f64 {
        n / (PI * self.radius * self.radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerOrientation {
    X,
    Y,
    Z,
    Random,
}

impl LayerOrientation {
    pub const ALL: [LayerOrientation; 4] = [
        LayerOrientation::X,
        LayerOrientation::Y,
        LayerOrientation::Z,
        LayerOrientation::Random,
    ];
}

/// Relative tolerance promised by [`layer_integral`].
pub const LAYER_REL_TOL: f64 = 1e-8;
const INNER_REL_TOL: f64 = 1e-11;
const OUTER_REL_TOL: f64 = 1e-10;
const MAX_SUBINTERVALS: usize = 400;

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut impl FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok((kron * h, ((kron - gauss) * h).abs()))
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on `[a, b]`: the
/// segment with the largest error estimate is bisected until the summed
/// error is below `max(abs_tol, rel_tol · |I|)`.
pub fn adaptive_gk15(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    let (v, e) = gk15(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let (mut total, mut err) = (v, e);
    let mut count = 1;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if count >= MAX_SUBINTERVALS {
            return Err(Error::QuadratureFailure {
                tolerance: rel_tol,
                estimate: err / total.abs().max(f64::MIN_POSITIVE),
            });
        }
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.a + seg.b);
        let (v1, e1) = gk15(&mut f, seg.a, mid)?;
        let (v2, e2) = gk15(&mut f, mid, seg.b)?;
        total += v1 + v2 - seg.value;
        err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
        count += 1;
    }
    // re-sum to shed accumulated cancellation from the running updates
    Ok(heap.iter().map(|s| s.value).sum())
}

/// Integrand numerators: all are even in x and in y.
#[derive(Clone, Copy)]
enum Numerator {
    XSquared,
    YSquared,
    One,
}

/// `∫_disc g(x, y) / D(d, x, y) dx dy` for a non-negative numerator `g`,
/// in polar coordinates over one quadrant (times four).
fn disc_integral(layer: &DiscLayer, d: f64, g: Numerator) -> Result<f64> {
    let h2 = layer.height * layer.height;
    let half = 0.5 * d;
    let integrand = |rho: f64, theta: f64| {
        let (x, y) = (rho * theta.cos(), rho * theta.sin());
        let p = (x + half).powi(2) + y * y + h2;
        let m = (x - half).powi(2) + y * y + h2;
        let den = (p * m).powf(1.5);
        let num = match g {
            Numerator::XSquared => x * x,
            Numerator::YSquared => y * y,
            Numerator::One => 1.0,
        };
        num / den * rho
    };
    let r = layer.radius;
    let inner = |theta: f64| {
        adaptive_gk15(|rho| Ok(integrand(rho, theta)), 0.0, r, INNER_REL_TOL, 0.0)
    };
    let quarter = adaptive_gk15(inner, 0.0, 0.5 * PI, OUTER_REL_TOL, 0.0)?;
    Ok(4.0 * quarter)
}

/// Area integral `A_o(d)` (nm⁻²) for dipoles of orientation `o` on `layer`.
///
/// `X` is assembled from two positive integrals, so its absolute error is
/// bounded by the tolerance times `∫ (x² + d²/4) / D`; near its zero the
/// relative error is not controlled.
pub fn layer_integral(layer: &DiscLayer, d: f64, orientation: LayerOrientation) -> Result<f64> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::InvalidRange(format!("separation d = {d}")));
    }
    DiscLayer::new(layer.radius, layer.height)?;
    let h2 = layer.height * layer.height;
    let ax = || -> Result<f64> {
        let xx = disc_integral(layer, d, Numerator::XSquared)?;
        let one = if d > 0.0 { disc_integral(layer, d, Numerator::One)? } else { 0.0 };
        Ok(xx - 0.25 * d * d * one)
    };
    let ay = || disc_integral(layer, d, Numerator::YSquared);
    let az = || Ok::<_, Error>(h2 * disc_integral(layer, d, Numerator::One)?);
    match orientation {
        LayerOrientation::X => ax(),
        LayerOrientation::Y => ay(),
        LayerOrientation::Z => az(),
        LayerOrientation::Random => Ok((ax()? + ay()? + az()?) / 3.0),
    }
}

/// Closed forms of the layer integrals at `d = 0`.
pub fn layer_integral_d0(layer: &DiscLayer, orientation: LayerOrientation) -> f64 {
    let (r, h) = (layer.radius, layer.height);
    let (r2, h2) = (r * r, h * h);
    let s = (h2 + r2) * (h2 + r2);
    match orientation {
        LayerOrientation::X | LayerOrientation::Y => PI / (4.0 * h2) * r2 * r2 / s,
        LayerOrientation::Z => PI / (2.0 * h2) * (r2 * r2 + 2.0 * h2 * r2) / s,
        LayerOrientation::Random => PI / (3.0 * h2) * (r2 * r2 + h2 * r2) / s,
    }
}

/// Separation at which `A_x` changes sign, by bisection to
/// [`CRITICAL_SEPARATION_TOL`].
pub fn critical_separation(layer: &DiscLayer, (d_min, d_max): (f64, f64)) -> Result<f64> {
    if !(0.0 <= d_min && d_min < d_max) {
        return Err(Error::InvalidRange(format!("bracket [{d_min}, {d_max}]")));
    }
    let ax = |d| layer_integral(layer, d, LayerOrientation::X);
    let (mut lo, mut hi) = (d_min, d_max);
    let f_lo = ax(lo)?;
    let f_hi = ax(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    let lo_sign = f_lo.signum();
    while hi - lo > CRITICAL_SEPARATION_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = ax(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Absolute tolerance (nm) of [`critical_separation`].
pub const CRITICAL_SEPARATION_TOL: f64 = 0.01;

/// `∫_{r_c}^{r_max} r⁻² dr = 1/r_c − 1/r_max`; `r_max` may be infinite.
///
/// The integral is dominated by its lower limit: the few dipoles closest to
/// a qubit set the noise level.
pub fn short_range_divergence_demo(r_c: f64, r_max: f64) -> Result<f64> {
    if !(r_c > 0.0 && r_c.is_finite() && r_max >= r_c) {
        return Err(Error::InvalidRange(format!("cutoffs r_c = {r_c}, r_max = {r_max}")));
    }
    Ok(1.0 / r_c - 1.0 / r_max)
}

/// One row of a separation sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: f64,
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
    pub ar: f64,
}

/// Evaluates all four integrals at each separation.
pub fn separation_sweep(layer: &DiscLayer, ds: &[f64]) -> Result<Vec<SweepRow>> {
    ds.iter()
        .map(|&d| {
            let ax = layer_integral(layer, d, LayerOrientation::X)?;
            let ay = layer_integral(layer, d, LayerOrientation::Y)?;
            let az = layer_integral(layer, d, LayerOrientation::Z)?;
            Ok(SweepRow { d, ax, ay, az, ar: (ax + ay + az) / 3.0 })
        })
        .collect()
}

/// CSV with header `d_nm,a_x,a_y,a_z,a_r`.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("d_nm,a_x,a_y,a_z,a_r\n");
    for r in rows {
        out.push_str(&format!("{:e},{:e},{:e},{:e},{:e}\n", r.d, r.ax, r.ay, r.az, r.ar));
    }
    out
}
