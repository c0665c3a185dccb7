//! Simulation of a minimal quantum refrigerator: a two-level system whose
//! phase is flipped periodically while it couples to a cold and a hot
//! bosonic bath.
//!
//! The pipeline runs bottom-up:
//!
//! * [`floquet`] turns a modulation scheme into sideband weights `P_m`.
//! * [`baths`] describes power-law baths: `G_T(ω)`, occupancies, `c_V`.
//! * [`rates`] builds period-averaged (and time-resolved) transition rates.
//! * [`steady`] solves for the steady polarization and the heat currents,
//!   with a Lindblad cross-check.
//! * [`cooling`] integrates the slow cooling of a finite cold bath and fits
//!   the exponent of `dT_C/dt ∝ −T_C^γ`.
//! * [`scenario`] loads JSON scenarios and writes CSV/JSON results.
//!
//! ```
//! use qrsim::baths::{BathPreset, BathSpec, CutoffShape};
//! use qrsim::floquet::{harmonic_spectrum, ModulationScheme};
//! use qrsim::rates::RateOptions;
//! use qrsim::steady::solve_steady_state;
//!
//! let scheme = ModulationScheme::pi_flip_with_shift(10.0, 8.0);
//! let spectrum = harmonic_spectrum(&scheme).unwrap();
//! let cold = BathSpec::cold(BathPreset::Magnon)
//!     .with_cutoff(5.0, CutoffShape::Hard)
//!     .with_temperature(1.0);
//! let hot = BathSpec::hot(BathPreset::HotCubic).with_temperature(5.0);
//! let report = solve_steady_state(&spectrum, 10.0, &[cold, hot], RateOptions::default()).unwrap();
//! assert!(report.cooling);
//! ```

pub mod baths;
pub mod cooling;
pub mod error;
pub mod floquet;
pub mod numerics;
pub mod rates;
pub mod scenario;
pub mod steady;

pub use error::{Error, Result};
