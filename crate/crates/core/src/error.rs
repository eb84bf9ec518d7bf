use num_complex::Complex64;
use thiserror::Error;

use crate::poly::Var;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimfError {
    #[error("value mode does not match polynomial coefficient mode")]
    ModeMismatch,
    #[error("polynomial does not contain the eliminated variable {var}")]
    DegreeZero { var: Var },
    #[error("variables differ: expected {expected}, found {found}")]
    VariableMismatch { expected: Var, found: Var },
    #[error("degree {degree} too low (need at least {min})")]
    DegreeTooLow { degree: usize, min: usize },
    #[error("root finder did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    NoConvergence { iterations: usize, worst_residual: f64 },
    #[error("leading coefficient vanished at z = {z}")]
    DegreeDrop { z: Complex64 },
    #[error("two root assignments tie at z = {z}")]
    AssignmentAmbiguous { z: Complex64 },
    #[error("seed has {found} roots, family degree is {expected}")]
    SeedMismatch { expected: usize, found: usize },
    #[error("pole hit: |denominator| = {magnitude:e}")]
    PoleHit { magnitude: f64 },
    #[error("denominator vanishes")]
    DenominatorVanishes,
    #[error("coefficient of the amplitude vanishes")]
    LinearCoefficientZero,
    #[error("bound-state equation has complex roots")]
    ComplexRoots,
    #[error("evaluation at the bound-state pole (|1 - lambda I1| = {magnitude:e})")]
    BoundStatePole { magnitude: f64 },
    #[error("|z - threshold| = {distance} outside the expansion window {window}")]
    OutsideWindow { distance: f64, window: f64 },
    #[error("no sign change in Im z on (0, {cap}] at Re z = {re_z}")]
    BracketFailure { re_z: f64, cap: f64 },
    #[error("quadrature failed: error estimate {estimate:e} above tolerance {tolerance:e}")]
    QuadratureFailure { estimate: f64, tolerance: f64 },
    #[error("energy lies on a cut; supply a nonzero imaginary part")]
    BranchAmbiguity,
    #[error("contour pinched near a threshold (distance {distance:e})")]
    ContourPinch { distance: f64 },
    #[error("fixed point not reached after {iterations} iterations (last step {last_step:e})")]
    MaxIterations { iterations: usize, last_step: f64, trace: Vec<(Complex64, Complex64)> },
    #[error("iterate landed on a one-body singularity")]
    SpectrumHit,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("exact arithmetic failure: {0}")]
    Exact(String),
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, TimfError>;
