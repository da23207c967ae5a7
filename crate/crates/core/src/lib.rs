//! Quadratic Lindblad dynamics of one-dimensional Gaussian fermionic states.
//!
//! A Kitaev chain coupled to a translation-invariant family of two-site jump
//! operators `L_n = u1 c_n + u2 c_{n+1} + v1 c_n† + v2 c_{n+1}†` is described
//! entirely by its Majorana correlation matrix `Δ`. The crate computes steady
//! states, the Pfaffian `Z2` invariant `ν = M0 Mπ`, quench trajectories of the
//! Pfaffians at `k = 0, π` with their critical times, and real-space
//! entanglement spectra.

pub mod cli;
pub mod error;
pub mod lyapunov;
pub mod model;
pub mod pauli;
pub mod pfaffian;
pub mod quench;
pub mod realspace;
pub mod steady;

pub use error::{Error, Result};
pub use model::{BlochBlock, Boundary, DissipatorSpec, HamiltonianSpec};
pub use pfaffian::{pfaffian, PfaffianSignPair, Sign};
pub use quench::{critical_times, HighSymmetry, QuenchPlan, TransitionReport};
pub use realspace::{CorrelationMatrix, Generator};
pub use steady::UndampedPolicy;
