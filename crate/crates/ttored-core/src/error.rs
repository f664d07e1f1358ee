//! Error type shared by all modules.

use crate::Complex64;
use core::fmt;

/// Errors produced by construction and by the numerical operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A Blaschke product or inner function failed a structural invariant
    /// (non-unimodular constant, zero too close to the unit circle, NaN).
    InvalidInput(&'static str),
    /// Evaluation point within 1e-12 of a pole `1/conj(zero)`.
    PoleProximity { z: Complex64 },
    /// The polynomial root solver did not converge.
    RootSolveFailure,
    /// `|h1|` and `|h2|` differ on the circle beyond tolerance.
    ModulusMismatch { max_deviation: f64 },
    /// A root survived common-root cancellation but lies on the circle.
    RootOnCircle { root: Complex64 },
    /// Model space of a degree-zero Blaschke product.
    DegenerateSpace,
    /// Sampled function lengths do not match the quadrature grid.
    GridMismatch,
    /// `deg theta < deg B`, so `ker T_{theta * conj(B)}` is nontrivial.
    KernelConditionViolated { deg_theta: usize, deg_b: usize },
    /// `|lambda|` too close to the unit circle for the quadrature method.
    BoundaryProximity { modulus: f64 },
    /// Two fiber values are too close to cluster unambiguously.
    ClusterAmbiguity { beta1: Complex64, beta2: Complex64 },
    /// The combinatorial layer said "reducible" but the analytic identity
    /// check failed; surfaced, never downgraded.
    WitnessVerificationFailed { residual: f64 },
    /// Matrix samples of different dimensions.
    DimensionMismatch,
    /// A witness violates its degree bounds.
    DegreeViolation(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::PoleProximity { z } => {
                write!(f, "evaluation point {z} within 1e-12 of a pole")
            }
            Error::RootSolveFailure => write!(f, "polynomial root solver failed to converge"),
            Error::ModulusMismatch { max_deviation } => write!(
                f,
                "|h1| and |h2| differ on the circle (max deviation {max_deviation:.3e})"
            ),
            Error::RootOnCircle { root } => {
                write!(f, "root {root} lies on the unit circle after cancellation")
            }
            Error::DegenerateSpace => write!(f, "model space of a constant inner function"),
            Error::GridMismatch => write!(f, "sample length does not match quadrature grid"),
            Error::KernelConditionViolated { deg_theta, deg_b } => write!(
                f,
                "kernel condition violated: deg theta = {deg_theta} < deg B = {deg_b}"
            ),
            Error::BoundaryProximity { modulus } => write!(
                f,
                "|lambda| = {modulus} too close to the boundary for quadrature"
            ),
            Error::ClusterAmbiguity { beta1, beta2 } => write!(
                f,
                "fiber values {beta1} and {beta2} too close to cluster unambiguously"
            ),
            Error::WitnessVerificationFailed { residual } => write!(
                f,
                "witness verification failed with residual {residual:.3e}"
            ),
            Error::DimensionMismatch => write!(f, "matrix dimensions do not match"),
            Error::DegreeViolation(msg) => write!(f, "degree violation: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
