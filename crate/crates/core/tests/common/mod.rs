//! Discrete toy space shared by the likelihood oracle tests.

#![allow(dead_code)]

use tls_noise::geometry::{LayerRegion, OrientationClass};
use tls_noise::inference::{
    band_accept, phase_accept, BinnedSpectrum, MeasurementSet, ModelHypothesis, PhaseObservation, SiteSpectrum,
    SpectrumBin,
};
use tls_noise::spectra::{analytic_apsd, analytic_cpsd, FrequencyGrid, Observable};
use tls_noise::{QubitLayout, Tls, TlsConfiguration, Vec3};

pub const TOY_RATE: f64 = 0.01;
pub const TOY_FREQS: [f64; 3] = [1e-3, 1e-2, 1e-1];

pub fn toy_positions() -> Vec<Vec3> {
    vec![
        Vec3::new(-60.0, 20.0, 72.0),
        Vec3::new(0.0, -40.0, 60.0),
        Vec3::new(45.0, 10.0, 80.0),
        Vec3::new(110.0, 30.0, 72.0),
    ]
}

pub fn toy_hypotheses() -> Vec<ModelHypothesis> {
    let mut out = Vec::new();
    for n_tls in 1..=3 {
        for dipole_length in [0.5, 1.0, 2.0] {
            for orientation in [OrientationClass::VerticalZ, OrientationClass::HorizontalX] {
                out.push(ModelHypothesis {
                    n_tls,
                    dipole_length,
                    orientation,
                    layer: LayerRegion::Points(toy_positions()),
                    rate_interval: (TOY_RATE, TOY_RATE),
                    prior_weight: 1.0 / 18.0,
                    epsilon_r: 11.0,
                });
            }
        }
    }
    out
}

fn axis(o: OrientationClass) -> Vec3 {
    match o {
        OrientationClass::VerticalZ => Vec3::Z,
        OrientationClass::HorizontalX => Vec3::X,
        OrientationClass::HorizontalY => Vec3::Y,
        _ => panic!("toy space needs a fixed orientation"),
    }
}

fn config(picks: &[usize], length: f64, o: OrientationClass) -> TlsConfiguration {
    let pos = toy_positions();
    let tls = picks
        .iter()
        .map(|&i| Tls::new(pos[i], axis(o), length, TOY_RATE).unwrap())
        .collect();
    TlsConfiguration::new(tls, 11.0).unwrap()
}

/// Measurement generated from dipoles at toy positions 0 and 2, unit length,
/// vertical, with `sigma = rel · mean`.
pub fn toy_measurement(rel: f64) -> MeasurementSet {
    let truth = config(&[0, 2], 1.0, OrientationClass::VerticalZ);
    let layout = QubitLayout::pair_on_x(100.0).unwrap();
    let grid = FrequencyGrid::new(TOY_FREQS.to_vec()).unwrap();
    let apsd = (0..2)
        .map(|site| {
            let s = analytic_apsd(&truth, &layout, site, Observable::Voltage, &grid).unwrap();
            let bins = s
                .values
                .iter()
                .zip(&TOY_FREQS)
                .map(|(&mean, &f_center)| SpectrumBin { f_center, mean, sigma: rel * mean })
                .collect();
            SiteSpectrum { site, spectrum: BinnedSpectrum::new(bins, 3.0).unwrap() }
        })
        .collect();
    let c = analytic_cpsd(&truth, &layout, 0, 1, Observable::Voltage, &grid).unwrap();
    let phases = TOY_FREQS
        .iter()
        .zip(&c.phase)
        .map(|(&f_center, &phase)| PhaseObservation { f_center, phase })
        .collect();
    MeasurementSet::new(layout, Observable::Voltage, apsd, (0, 1), phases).unwrap()
}

/// Exact acceptance probability by enumerating all `K^n` equally likely
/// position assignments.
pub fn enumerate_likelihood(h: &ModelHypothesis, m: &MeasurementSet) -> f64 {
    let k = toy_positions().len();
    let total = k.pow(h.n_tls as u32);
    let grid = FrequencyGrid::new(TOY_FREQS.to_vec()).unwrap();
    let mut accepted = 0;
    for code in 0..total {
        let picks: Vec<usize> = (0..h.n_tls).map(|j| code / k.pow(j as u32) % k).collect();
        let c = config(&picks, h.dipole_length, h.orientation);
        let bands_ok = m.apsd.iter().all(|s| {
            let a = analytic_apsd(&c, &m.layout, s.site, m.observable, &grid).unwrap();
            band_accept(&a, &s.spectrum).unwrap()
        });
        if !bands_ok {
            continue;
        }
        let x = analytic_cpsd(&c, &m.layout, m.phase_sites.0, m.phase_sites.1, m.observable, &grid).unwrap();
        if phase_accept(&x, &m.phases).unwrap() {
            accepted += 1;
        }
    }
    accepted as f64 / total as f64
}
