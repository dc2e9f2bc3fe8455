//! Physical types and geometric kernels mapping dipoles to qubit sites.
//!
//! A TLS at `r` with unit orientation `p̂` and moment `p` contributes
//!
//! ```text
//! V(R) = -p · p̂·(r − R) / (4π ε |r − R|³) · s(t)
//! ```
//!
//! to the potential at a qubit site `R`, with `s(t) = ±1` its telegraph state.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::ModelHypothesis;
use crate::numeric::stream_rng;

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Distances below this (nm) are treated as coincident points.
pub const ZERO_DISTANCE_NM: f64 = 1e-9;
/// Tolerance on the norm of an orientation supplied by a caller.
const UNIT_NORM_TOL: f64 = 1e-9;

/// `e / (4π ε₀)` expressed in V·nm: with a moment in e·nm and distances in
/// nm, `coulomb / ε_r · p (p̂·Δ) / |Δ|³` is a potential in volts.
pub fn coulomb_volt_nm() -> f64 {
    ELEMENTARY_CHARGE / (4.0 * PI * VACUUM_PERMITTIVITY) * 1e9
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Unit vector along `self`.
    pub fn normalized(self) -> Vec3 {
        self * (1.0 / self.norm())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn component(self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("axis {axis} out of range"),
        }
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(v: [f64; 3]) -> Self {
        Vec3::new(v[0], v[1], v[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// One fluctuating dipole.
///
/// `switch_rate` is the Poisson flip rate γ in each direction, so the
/// telegraph autocorrelation is `exp(-2γ|t|)` and the relaxation time is
/// `τ = 1 / (2γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TlsRecord", into = "TlsRecord")]
pub struct Tls {
    position: Vec3,
    orientation: Vec3,
    moment: f64,
    switch_rate: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TlsRecord {
    pos: Vec3,
    orient: Vec3,
    moment_e_nm: f64,
    switch_rate_hz: f64,
}

impl TryFrom<TlsRecord> for Tls {
    type Error = Error;
    fn try_from(r: TlsRecord) -> Result<Self> {
        Tls::new(r.pos, r.orient, r.moment_e_nm, r.switch_rate_hz)
    }
}

impl From<Tls> for TlsRecord {
    fn from(t: Tls) -> Self {
        TlsRecord {
            pos: t.position,
            orient: t.orientation,
            moment_e_nm: t.moment,
            switch_rate_hz: t.switch_rate,
        }
    }
}

impl Tls {
    /// Builds a TLS; the orientation must be unit length to 1e-9 and is
    /// renormalized exactly.
    pub fn new(position: Vec3, orientation: Vec3, moment: f64, switch_rate: f64) -> Result<Self> {
        if !position.is_finite() || !orientation.is_finite() {
            return Err(Error::invalid("non-finite TLS position or orientation"));
        }
        let n = orientation.norm();
        if (n - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::invalid(format!("orientation norm {n} is not 1")));
        }
        if !(moment > 0.0 && moment.is_finite()) {
            return Err(Error::invalid(format!("moment must be positive, got {moment}")));
        }
        if !(switch_rate > 0.0 && switch_rate.is_finite()) {
            return Err(Error::invalid(format!(
                "switch rate must be positive, got {switch_rate}"
            )));
        }
        Ok(Tls {
            position,
            orientation: orientation * (1.0 / n),
            moment,
            switch_rate,
        })
    }

    pub fn position(&self) -> Vec3 {
        self.position
    }

    pub fn orientation(&self) -> Vec3 {
        self.orientation
    }

    pub fn moment(&self) -> f64 {
        self.moment
    }

    pub fn switch_rate(&self) -> f64 {
        self.switch_rate
    }

    /// Relaxation time of the telegraph autocorrelation, `1 / (2γ)`.
    pub fn tau(&self) -> f64 {
        0.5 / self.switch_rate
    }

    pub fn with_moment(mut self, moment: f64) -> Result<Self> {
        if !(moment > 0.0 && moment.is_finite()) {
            return Err(Error::invalid(format!("moment must be positive, got {moment}")));
        }
        self.moment = moment;
        Ok(self)
    }

    pub fn with_position(mut self, position: Vec3) -> Self {
        self.position = position;
        self
    }
}

/// A set of independent dipoles in a uniform dielectric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigRecord", into = "ConfigRecord")]
pub struct TlsConfiguration {
    tls: Vec<Tls>,
    epsilon_r: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigRecord {
    epsilon_r: f64,
    tls: Vec<Tls>,
}

impl TryFrom<ConfigRecord> for TlsConfiguration {
    type Error = Error;
    fn try_from(r: ConfigRecord) -> Result<Self> {
        TlsConfiguration::new(r.tls, r.epsilon_r)
    }
}

impl From<TlsConfiguration> for ConfigRecord {
    fn from(c: TlsConfiguration) -> Self {
        ConfigRecord {
            epsilon_r: c.epsilon_r,
            tls: c.tls,
        }
    }
}

impl TlsConfiguration {
    pub fn new(tls: Vec<Tls>, epsilon_r: f64) -> Result<Self> {
        if !(epsilon_r > 0.0 && epsilon_r.is_finite()) {
            return Err(Error::invalid(format!("epsilon_r must be positive, got {epsilon_r}")));
        }
        Ok(TlsConfiguration { tls, epsilon_r })
    }

    pub fn tls(&self) -> &[Tls] {
        &self.tls
    }

    pub fn epsilon_r(&self) -> f64 {
        self.epsilon_r
    }

    pub fn len(&self) -> usize {
        self.tls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tls.is_empty()
    }

    /// Union of two configurations sharing a dielectric constant.
    pub fn union(&self, other: &TlsConfiguration) -> Result<Self> {
        if self.epsilon_r != other.epsilon_r {
            return Err(Error::invalid("cannot merge configurations with different epsilon_r"));
        }
        let mut tls = self.tls.clone();
        tls.extend_from_slice(&other.tls);
        TlsConfiguration::new(tls, self.epsilon_r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(e.to_string()))
    }
}

/// Qubit sites in the z = 0 plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec3>", into = "Vec<Vec3>")]
pub struct QubitLayout {
    sites: Vec<Vec3>,
}

impl TryFrom<Vec<Vec3>> for QubitLayout {
    type Error = Error;
    fn try_from(sites: Vec<Vec3>) -> Result<Self> {
        QubitLayout::new(sites)
    }
}

impl From<QubitLayout> for Vec<Vec3> {
    fn from(l: QubitLayout) -> Self {
        l.sites
    }
}

impl QubitLayout {
    pub fn new(sites: Vec<Vec3>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::invalid("layout needs at least one site"));
        }
        for (i, s) in sites.iter().enumerate() {
            if !s.is_finite() || s.z != 0.0 {
                return Err(Error::invalid(format!("site {i} must be finite with z = 0")));
            }
            if sites[..i].iter().any(|t| t == s) {
                return Err(Error::invalid(format!("site {i} duplicates an earlier site")));
            }
        }
        Ok(QubitLayout { sites })
    }

    /// Two sites at `(±d/2, 0, 0)`.
    pub fn pair_on_x(separation_nm: f64) -> Result<Self> {
        let h = separation_nm / 2.0;
        QubitLayout::new(vec![Vec3::new(-h, 0.0, 0.0), Vec3::new(h, 0.0, 0.0)])
    }

    /// Test-only escape hatch: allows repeated coordinates so the d → 0 limit
    /// of a cross spectrum can be taken between distinct indices.
    #[doc(hidden)]
    pub fn with_coincident_sites(sites: Vec<Vec3>) -> Self {
        QubitLayout { sites }
    }

    pub fn sites(&self) -> &[Vec3] {
        &self.sites
    }

    pub fn site(&self, index: usize) -> Result<Vec3> {
        self.sites
            .get(index)
            .copied()
            .ok_or_else(|| Error::invalid(format!("site index {index} out of range")))
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Orientation prior of the dipoles in a hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationClass {
    /// Uniform on the unit sphere.
    FullyRandom,
    /// Uniform azimuth in the xy plane.
    #[serde(rename = "hor-random")]
    HorizontalRandom,
    #[serde(rename = "hor-x")]
    HorizontalX,
    #[serde(rename = "hor-y")]
    HorizontalY,
    #[serde(rename = "ver-z")]
    VerticalZ,
}

impl OrientationClass {
    pub const ALL: [OrientationClass; 5] = [
        OrientationClass::FullyRandom,
        OrientationClass::HorizontalRandom,
        OrientationClass::HorizontalX,
        OrientationClass::HorizontalY,
        OrientationClass::VerticalZ,
    ];

    pub fn label(self) -> &'static str {
        match self {
            OrientationClass::FullyRandom => "fully-random",
            OrientationClass::HorizontalRandom => "hor-random",
            OrientationClass::HorizontalX => "hor-x",
            OrientationClass::HorizontalY => "hor-y",
            OrientationClass::VerticalZ => "ver-z",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        OrientationClass::ALL
            .into_iter()
            .find(|o| o.label() == s)
            .ok_or_else(|| Error::invalid(format!("unknown orientation class '{s}'")))
    }

    /// Draws a unit orientation. Axis-aligned classes consume no randomness.
    pub fn sample(self, rng: &mut impl Rng) -> Vec3 {
        match self {
            OrientationClass::FullyRandom => {
                let cos_theta: f64 = rng.random_range(-1.0..=1.0);
                let phi = rng.random_range(0.0..2.0 * PI);
                let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
                Vec3::new(sin_theta * phi.cos(), sin_theta * phi.sin(), cos_theta)
            }
            OrientationClass::HorizontalRandom => {
                let phi = rng.random_range(0.0..2.0 * PI);
                Vec3::new(phi.cos(), phi.sin(), 0.0)
            }
            OrientationClass::HorizontalX => Vec3::X,
            OrientationClass::HorizontalY => Vec3::Y,
            OrientationClass::VerticalZ => Vec3::Z,
        }
    }
}

impl std::fmt::Display for OrientationClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

fn separation(tls: &Tls, site: Vec3) -> Result<(Vec3, f64)> {
    let delta = tls.position - site;
    let dist = delta.norm();
    if dist < ZERO_DISTANCE_NM {
        return Err(Error::ZeroDistance {
            threshold_nm: ZERO_DISTANCE_NM,
        });
    }
    Ok((delta, dist))
}

/// Potential (V) at `site` per unit telegraph state.
pub fn voltage_kernel(tls: &Tls, site: Vec3, epsilon_r: f64) -> Result<f64> {
    let (delta, dist) = separation(tls, site)?;
    let pref = coulomb_volt_nm() / epsilon_r * tls.moment;
    Ok(-pref * tls.orientation.dot(delta) / (dist * dist * dist))
}

/// Gradient of [`voltage_kernel`] with respect to the site coordinate
/// (V/nm per unit telegraph state).
///
/// This is the dipole field up to an overall sign, which cancels in every
/// correlation built from it.
pub fn field_kernel(tls: &Tls, site: Vec3, epsilon_r: f64) -> Result<Vec3> {
    let (delta, dist) = separation(tls, site)?;
    let pref = coulomb_volt_nm() / epsilon_r * tls.moment;
    let r3 = dist * dist * dist;
    let r5 = r3 * dist * dist;
    let pd = tls.orientation.dot(delta);
    Ok((tls.orientation * (1.0 / r3) - delta * (3.0 * pd / r5)) * pref)
}

/// Geometric factor `A_mn` (nm⁻⁴) linking TLS `m` seen at `site1` with TLS
/// `n` seen at `site2`.
pub fn geometry_matrix_element(m: &Tls, n: &Tls, site1: Vec3, site2: Vec3) -> Result<f64> {
    let (d1, r1) = separation(m, site1)?;
    let (d2, r2) = separation(n, site2)?;
    Ok(m.orientation.dot(d1) * n.orientation.dot(d2) / (r1.powi(3) * r2.powi(3)))
}

/// Axis-aligned region in which dipole positions are uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerBox {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub z: (f64, f64),
}

impl LayerBox {
    pub fn new(x: (f64, f64), y: (f64, f64), z: (f64, f64)) -> Result<Self> {
        for (name, (lo, hi)) in [("x", x), ("y", y), ("z", z)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidRange(format!("{name} range [{lo}, {hi}]")));
            }
        }
        Ok(LayerBox { x, y, z })
    }

    /// Thin sheet at height `z` spanning `±half_width` in x and y.
    pub fn sheet(half_width: f64, z: f64) -> Result<Self> {
        LayerBox::new((-half_width, half_width), (-half_width, half_width), (z, z))
    }

    pub fn area_xy(&self) -> f64 {
        (self.x.1 - self.x.0) * (self.y.1 - self.y.0)
    }
}

/// Where the dipoles of a hypothesis may sit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerRegion {
    /// Uniform in a box; x and y extents must be non-zero, z may be a sheet.
    Box(LayerBox),
    /// Each dipole independently takes one of a finite set of positions with
    /// equal probability (discrete toy spaces).
    Points(Vec<Vec3>),
}

impl LayerRegion {
    pub fn validate(&self) -> Result<()> {
        match self {
            LayerRegion::Box(b) => {
                if b.x.1 <= b.x.0 || b.y.1 <= b.y.0 {
                    Err(Error::DegenerateLayer)
                } else {
                    Ok(())
                }
            }
            LayerRegion::Points(p) => {
                if p.is_empty() {
                    Err(Error::invalid("point layer needs at least one position"))
                } else if p.iter().any(|v| !v.is_finite()) {
                    Err(Error::invalid("non-finite layer point"))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec3 {
        fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
            if hi > lo {
                rng.random_range(lo..hi)
            } else {
                lo
            }
        }
        match self {
            LayerRegion::Box(b) => {
                let x = uniform(rng, b.x);
                let y = uniform(rng, b.y);
                let z = uniform(rng, b.z);
                Vec3::new(x, y, z)
            }
            LayerRegion::Points(p) => p[rng.random_range(0..p.len())],
        }
    }
}

/// Log-uniform draw on `[lo, hi]` (returns `lo` when the interval is a point).
pub fn sample_log_uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo.ln()..hi.ln()).exp()
    } else {
        lo
    }
}

/// Draws one configuration from the hypothesis prior using `rng`.
///
/// Per dipole the draw order is position, orientation, switching rate.
pub fn sample_configuration_with(
    hypothesis: &ModelHypothesis,
    rng: &mut ChaCha8Rng,
) -> Result<TlsConfiguration> {
    hypothesis.validate()?;
    let moment = hypothesis.moment_e_nm();
    let tls = (0..hypothesis.n_tls)
        .map(|_| {
            let pos = hypothesis.layer.sample(rng);
            let orient = hypothesis.orientation.sample(rng);
            let rate = sample_log_uniform(rng, hypothesis.rate_interval);
            Tls::new(pos, orient, moment, rate)
        })
        .collect::<Result<Vec<_>>>()?;
    TlsConfiguration::new(tls, hypothesis.epsilon_r)
}

/// Draws one configuration, deterministic in `rng_seed`.
pub fn sample_configuration(hypothesis: &ModelHypothesis, rng_seed: u64) -> Result<TlsConfiguration> {
    sample_configuration_with(hypothesis, &mut stream_rng(rng_seed, &[]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tls_at(pos: Vec3, orient: Vec3) -> Tls {
        Tls::new(pos, orient, 1.0, 0.1).unwrap()
    }

    #[test]
    fn on_axis_vertical_dipole_voltage() {
        let h = 50.0;
        let t = tls_at(Vec3::new(0.0, 0.0, h), Vec3::Z);
        let v = voltage_kernel(&t, Vec3::default(), 11.0).unwrap();
        let expected = -coulomb_volt_nm() / 11.0 / (h * h);
        assert!((v - expected).abs() <= 1e-15 * expected.abs());
        assert!(v < 0.0);
    }

    #[test]
    fn voltage_matches_si_hand_evaluation() {
        // −e·(1 nm)/(4π ε₀ · 11 · (50 nm)²) evaluated at 40 digits.
        let expected = -5.236_234_719_427_517e-5;
        let t = tls_at(Vec3::new(0.0, 0.0, 50.0), Vec3::Z);
        let v = voltage_kernel(&t, Vec3::default(), 11.0).unwrap();
        assert!(((v - expected) / expected).abs() < 1e-12, "{v}");
    }

    #[test]
    fn perpendicular_dipole_gives_zero_voltage() {
        let t = tls_at(Vec3::new(0.0, 0.0, 50.0), Vec3::X);
        assert_eq!(voltage_kernel(&t, Vec3::default(), 11.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_distance_is_an_error() {
        let t = tls_at(Vec3::new(1.0, 2.0, 0.0), Vec3::Z);
        let site = Vec3::new(1.0, 2.0, 0.0);
        assert!(matches!(voltage_kernel(&t, site, 11.0), Err(Error::ZeroDistance { .. })));
        assert!(field_kernel(&t, site, 11.0).is_err());
        assert!(geometry_matrix_element(&t, &t, site, Vec3::default()).is_err());
    }

    #[test]
    fn field_symmetry_cases() {
        let above = Vec3::new(0.0, 0.0, 40.0);
        let e = field_kernel(&tls_at(above, Vec3::Z), Vec3::default(), 11.0).unwrap();
        assert_eq!((e.x, e.y), (0.0, 0.0));
        assert!(e.z != 0.0);
        let e = field_kernel(&tls_at(above, Vec3::X), Vec3::default(), 11.0).unwrap();
        assert!(e.x != 0.0);
        assert_eq!(e.y, 0.0);
    }

    #[test]
    fn diagonal_element_is_nonnegative_and_slab_sign() {
        let t = tls_at(Vec3::new(13.0, -7.0, 30.0), Vec3::new(0.6, 0.0, 0.8));
        let s = Vec3::new(5.0, 5.0, 0.0);
        assert!(geometry_matrix_element(&t, &t, s, s).unwrap() >= 0.0);
        let d = 100.0;
        let mid = tls_at(Vec3::new(0.0, 0.0, 20.0), Vec3::X);
        let a = geometry_matrix_element(
            &mid,
            &mid,
            Vec3::new(-d / 2.0, 0.0, 0.0),
            Vec3::new(d / 2.0, 0.0, 0.0),
        )
        .unwrap();
        assert!(a < 0.0);
    }

    #[test]
    fn orientation_must_be_unit() {
        assert!(Tls::new(Vec3::default(), Vec3::new(1.0, 1.0, 0.0), 1.0, 1.0).is_err());
        assert!(Tls::new(Vec3::default(), Vec3::Z, 0.0, 1.0).is_err());
        assert!(Tls::new(Vec3::default(), Vec3::Z, 1.0, -1.0).is_err());
    }

    #[test]
    fn layout_rules() {
        assert!(QubitLayout::new(vec![]).is_err());
        assert!(QubitLayout::new(vec![Vec3::new(0.0, 0.0, 1.0)]).is_err());
        assert!(QubitLayout::new(vec![Vec3::default(), Vec3::default()]).is_err());
        assert_eq!(QubitLayout::pair_on_x(100.0).unwrap().site(1).unwrap().x, 50.0);
    }

    #[test]
    fn json_schema_round_trip_and_rejects_extra_fields() {
        let json = r#"{"epsilon_r": 11.0, "tls": [{"pos": [1.0, 2.0, 72.0], "orient": [0.0, 0.0, 1.0], "moment_e_nm": 1.0, "switch_rate_hz": 0.01}]}"#;
        let c = TlsConfiguration::from_json(json).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.tls()[0].position(), Vec3::new(1.0, 2.0, 72.0));
        let back = TlsConfiguration::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.starts_with(r#"{"epsilon_r":11.0,"tls":[{"pos":[1.0,2.0,72.0],"orient""#), "{s}");

        let extra = r#"{"epsilon_r": 11.0, "tls": [], "note": 1}"#;
        assert!(TlsConfiguration::from_json(extra).is_err());
        let extra_tls = r#"{"epsilon_r": 11.0, "tls": [{"pos": [1,2,3], "orient": [0,0,1], "moment_e_nm": 1, "switch_rate_hz": 1, "x": 0}]}"#;
        assert!(TlsConfiguration::from_json(extra_tls).is_err());
        let bad_eps = r#"{"epsilon_r": -1.0, "tls": []}"#;
        assert!(TlsConfiguration::from_json(bad_eps).is_err());
    }

    #[test]
    fn degenerate_box_is_rejected() {
        let region = LayerRegion::Box(LayerBox::new((0.0, 0.0), (0.0, 1.0), (1.0, 1.0)).unwrap());
        assert_eq!(region.validate(), Err(Error::DegenerateLayer));
    }
}
