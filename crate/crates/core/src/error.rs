use thiserror::Error;

use crate::quench::HighSymmetry;

/// Errors raised by the physics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),

    #[error("no dissipation: all Lindblad amplitudes are zero")]
    NoDissipation,

    #[error("Bloch transform requires periodic boundary")]
    NotPeriodic,

    #[error("matrix is not translation invariant (residual {residual:.3e})")]
    NotTranslationInvariant { residual: f64 },

    #[error("not a high-symmetry block: imaginary residual {residual:.3e}")]
    NotHighSymmetry { residual: f64 },

    #[error("Y block not proportional to sigma_y (residual {residual:.3e})")]
    NotProportionalToSigmaY { residual: f64 },

    #[error("Pfaffian requires an even dimension, got {0}")]
    OddDimension(usize),

    #[error("matrix is not antisymmetric (residual {residual:.3e})")]
    NotAntisymmetric { residual: f64 },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("Pfaffian at topological boundary: sign undefined (|Pf| = {magnitude:.3e})")]
    TopologicalBoundary { magnitude: f64 },

    #[error("dissipator sits on a phase boundary: y = 0 at k = {0}")]
    BoundaryMomentum(HighSymmetry),

    #[error("no unique steady state: undamped mode at this momentum")]
    NoUniqueSteadyState,

    #[error("spectral formula degenerate; use direct solve")]
    SpectralDegenerate,

    #[error("undamped high-symmetry mode (h0 = 0)")]
    UndampedHighSymmetry,

    #[error("undamped mode under {boundary}: {count} Majorana mode(s) decouple from the bath")]
    UndampedModes { count: usize, boundary: String },

    #[error("step size {dt} too large for a generator of spectral radius {radius:.3e}; use dt <= {suggested:.3e}")]
    StepTooLarge { dt: f64, radius: f64, suggested: f64 },

    #[error("integration became unstable at t = {t}; reduce dt")]
    Unstable { t: f64 },

    #[error("correlation-matrix invariant violated at t = {t}: {what}")]
    InvariantViolation { t: f64, what: String },

    #[error("unphysical spectrum: |epsilon| = {0} exceeds 1")]
    Unphysical(f64),

    #[error("modular Hamiltonian divergent (pure mode, |epsilon| = {0})")]
    ModularDivergent(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("iterative solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
