//! Charge noise from two-level-system (TLS) electric dipoles near quantum-dot qubits.
//!
//! The crate covers the forward problem (dipole configuration to auto and
//! cross power spectral densities, either analytically or through simulated
//! random telegraph records) and the inverse problem (Monte-Carlo likelihoods
//! over a swept hypothesis space, Bayes updates and Brier scoring).
//!
//! Units: lengths in nm, dipole moments in e·nm, frequencies in Hz. Voltage
//! spectra are in V²/Hz and field spectra in (V/nm)²/Hz. All spectra are
//! one-sided: they are defined on f > 0 and integrate to the signal variance.

pub mod continuum;
pub mod error;
pub mod geometry;
pub mod inference;
pub mod numeric;
pub mod spectra;
pub mod telegraph;

pub use error::{Error, Result};
pub use geometry::{
    OrientationClass, QubitLayout, Tls, TlsConfiguration, Vec3,
};
pub use spectra::{CrossSpectrum, FrequencyGrid, Observable, SpectrumSeries};
