//! Cooperative radiative dynamics of subwavelength molecular emitter arrays.
//!
//! The crate combines a Lindblad master-equation engine with an analytic rate
//! layer for rings and dimers of vibronically coupled two-level molecules:
//!
//! * [`geometry`] and [`coupling`] build emitter layouts and the
//!   vacuum-mediated pair rates `Ω_ij`, `Γ_ij`;
//! * [`vibronic`] holds the Huang–Rhys / Franck–Condon / thermal analytics and
//!   the renormalized collective rates;
//! * [`quantum_core`] and [`dynamics`] provide sparse operators, density
//!   matrices, Liouvillian assembly, time propagation and steady states;
//! * [`collective`], [`band_structure`], [`transfer`], [`laser`] and
//!   [`observables`] implement the collective-basis physics;
//! * [`scenarios`] drives named end-to-end experiments and persists results.
//!
//! Units: lengths in the transition wavelength `λ0` (so `k0 = 2π`), rates and
//! energies in the single-emitter decay rate `Γ0 = 1`, times in `1/Γ0`.

pub mod band_structure;
pub mod collective;
pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod laser;
pub mod linalg;
pub mod observables;
pub mod quantum_core;
pub mod scenarios;
pub mod transfer;
pub mod vibronic;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Free-space wavenumber in units of `1/λ0`.
pub const K0: f64 = 2.0 * std::f64::consts::PI;
