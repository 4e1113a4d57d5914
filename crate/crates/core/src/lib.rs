//! Coherent control of magneto-optical rotation (MOR) in a Doppler-broadened
//! `j=0 <-> j=1 <-> j=0` ladder.
//!
//! All frequencies are dimensionless, measured in units of the lower-level
//! half decay rate `gamma`. The crate is organised bottom-up:
//!
//! * [`params`] and [`units`]: parameter bundles, validation, lab-unit conversion.
//! * [`susceptibility`]: single-velocity normalized susceptibilities `s+`/`s-`
//!   and a brute-force steady-state density-matrix solver used as an oracle.
//! * [`faddeeva`]: the scaled complex error function `W(z)` in the upper half-plane.
//! * [`doppler`]: Maxwell-Boltzmann averages, closed form and quadrature.
//! * [`rotation`]: crossed-polarizer transmission, rotation angle, enhancement,
//!   regime labels and the maximal-rotation root solver.
//! * [`scan`]: parameter sweeps, peak finding and figure presets.
//! * [`config`]: the `key = value` text configuration used by the CLI.

pub mod config;
pub mod doppler;
pub mod error;
pub mod faddeeva;
pub mod params;
pub mod quadrature;
pub mod rotation;
pub mod scan;
pub mod susceptibility;
pub mod units;

pub use error::{Error, Result};
pub use params::{AtomParams, ControlParams, EnvParams, ParamBundle, ProbePoint};
pub use susceptibility::SusceptibilityPair;

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
