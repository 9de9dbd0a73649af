//! Forward-problem engine and data generation.
//!
//! Integrates the differential equation directly for given `q`, `h`, `H`,
//! evaluates the characteristic functions, finds (possibly complex)
//! eigenvalues, and produces every dataset flavor consumed by the inverse
//! pipelines. None of this touches the NSBF fitting machinery, so it can
//! serve as an independent oracle for validating reconstructions.

use alloc::string::String;
use core::fmt;

use num_complex::Complex64;

use crate::specfun::SpecFunError;

mod charfun;
mod dataset;
mod eigen;
mod integrate;
mod potential;
pub mod presets;

pub use charfun::{
    char_delta, char_delta0, char_delta0_checked, char_delta_checked, char_delta_derivative,
    integrate_solution, multiplier_constant, norming_constant, weyl_value, CharValue,
    MultiplierConstant, SolutionKind, SolutionSample,
};
pub use dataset::{generate_dataset, sqrt_upper, ProblemKind, SpectralDataset, WeylSampling};
pub use eigen::{find_eigenvalues_complex, find_eigenvalues_selfadjoint, Rect};
pub use integrate::Tolerances;
pub use potential::{BoundaryConstants, BuiltinPotential, PotentialSpec};

/// A Sturm-Liouville problem: potential on `[0, b]` plus boundary constants.
#[derive(Debug, Clone)]
pub struct ProblemSetup {
    pub potential: PotentialSpec,
    pub constants: BoundaryConstants,
}

impl ProblemSetup {
    pub fn new(potential: PotentialSpec, constants: BoundaryConstants) -> Self {
        Self {
            potential,
            constants,
        }
    }

    pub fn b(&self) -> f64 {
        self.potential.b()
    }

    /// Real potential and real constants: the spectrum is real.
    pub fn is_selfadjoint(&self) -> bool {
        self.potential.is_real() && self.constants.is_real()
    }
}

/// Failures of the forward engine.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    SpecFun(SpecFunError),
    /// The adaptive integrator could not proceed; carries the location.
    StepSizeUnderflow { x: f64 },
    /// `|Δ(ρ)|` too small for a Weyl-function evaluation.
    PoleProximity { rho: Complex64 },
    /// Winding number did not stabilize to an integer.
    WindingUnstable { winding: f64 },
    /// Gap in a computed spectrum looks wrong; a root was probably skipped.
    MissedRootSuspicion {
        index: usize,
        expected_gap: f64,
        actual_gap: f64,
    },
    /// Fewer zeros in the search region than requested.
    InsufficientZeros { found: usize, requested: usize },
    /// Two zeros could not be separated (simple spectra are assumed).
    MultipleEigenvalue { near: Complex64 },
    /// Derivative of the characteristic function vanished at an eigenvalue.
    DegenerateEigenvalue { rho: Complex64 },
    InvalidPotential(String),
    InvalidData(String),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::SpecFun(e) => write!(f, "special function failure: {e}"),
            OracleError::StepSizeUnderflow { x } => {
                write!(f, "integrator step size underflow near x = {x}")
            }
            OracleError::PoleProximity { rho } => {
                write!(f, "Weyl function pole too close to rho = {rho}")
            }
            OracleError::WindingUnstable { winding } => {
                write!(f, "non-integer winding number {winding} after refinement")
            }
            OracleError::MissedRootSuspicion {
                index,
                expected_gap,
                actual_gap,
            } => write!(
                f,
                "suspicious eigenvalue gap after index {index}: {actual_gap} vs expected {expected_gap}"
            ),
            OracleError::InsufficientZeros { found, requested } => {
                write!(f, "found {found} zeros, requested {requested}")
            }
            OracleError::MultipleEigenvalue { near } => {
                write!(f, "unresolvable eigenvalue cluster near {near}")
            }
            OracleError::DegenerateEigenvalue { rho } => {
                write!(f, "characteristic derivative vanishes at rho = {rho}")
            }
            OracleError::InvalidPotential(msg) => write!(f, "invalid potential: {msg}"),
            OracleError::InvalidData(msg) => write!(f, "invalid data: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OracleError {}

impl From<SpecFunError> for OracleError {
    fn from(e: SpecFunError) -> Self {
        OracleError::SpecFun(e)
    }
}
