//! Qubit open-system dynamics and their classical reductions.
//!
//! The crate is organised bottom-up:
//!
//! * [`states`]: density matrices, Bloch vectors, projective bases, Helstrom
//!   matrices, trace norm, coherence and the decohering map.
//! * [`channels`]: static qubit maps in the Pauli (affine Bloch) representation,
//!   Choi matrices, positivity tests, duals and classical reduction matrices.
//! * [`generators`]: time-local GKSL generators, instantaneous P/CP-divisibility
//!   certificates and propagation of the dynamical map.
//! * [`classical`]: stochastic processes obtained by reducing either the
//!   generator or the dynamical map onto a projective basis.
//! * [`covariant`]: the orthogonally covariant map class `Φ(A, λ, μ)`, its
//!   generators and closed-form divisibility conditions.
//! * [`infoflow`]: quantum/classical/coherent internal information and
//!   backflow detection.

pub mod channels;
pub mod classical;
pub mod covariant;
mod error;
pub mod generators;
pub mod infoflow;
pub mod sphere;
pub mod states;

pub use channels::{ChoiMatrix, ClassicalReduction, QubitChannel, Verdict};
pub use classical::{ClassicalGenerator, FCriterion, StochasticProcess};
pub use covariant::{BuiltSelfDualFamily, CovariantFamily, CovariantGenerator, CovariantTriple, Example4, SelfDualFamily};
pub use error::{Error, Result};
pub use generators::{DivisibilityScan, GeneratorSpec, GkslParams, Propagator, SplittingRule, TimeGrid};
pub use infoflow::{InfoTrajectory, RevivalInterval, WitnessRow};
pub use states::{BlochVector, DensityMatrix, HelstromMatrix, ProjectorBasis};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// 2×2 complex matrix (qubit operators).
pub type Mat2 = nalgebra::Matrix2<C64>;

/// Default tolerance for Hermiticity, positivity and unit-trace checks.
pub const STATE_TOL: f64 = 1e-12;
