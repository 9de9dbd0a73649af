//! Reconstruction of complex-valued Sturm-Liouville problems
//!
//! This crate recovers a potential `q(x)` on `(0, b)` together with the
//! Robin boundary constants `h`, `H` of
//!
//! ```text
//! -y'' + q(x) y = λ y,   y'(0) - h y(0) = 0,   y'(b) + H y(b) = 0
//! ```
//!
//! from four kinds of spectral data:
//!
//! * two spectra (the Robin problem and its Dirichlet-at-0 companion),
//! * samples of the Weyl function `M(ρ)`,
//! * one spectrum plus multiplier constants `β_k`,
//! * one spectrum plus norming constants `α_k`.
//!
//! The reconstruction expands the solutions in Neumann series of spherical
//! Bessel functions (NSBF), fits truncated series coefficients by complex
//! least squares, and reads `q`, `h`, `H` off the very first coefficients.
//! A forward-problem engine ([`oracle`]) independent of that machinery
//! integrates the differential equation directly and generates every data
//! flavor, so reconstructions can be validated end to end.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the companion
//! `nsbf-cli` crate adds file formats and a command-line front end.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod charstep;
pub mod lstsq;
pub mod oracle;
pub mod pipeline;
pub mod profilestep;
pub mod recovery;
pub mod specfun;
pub mod spline;

pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
