//! Relaxation and stimulated-transition operators for degenerate V-type atoms.
//!
//! Levels `b` and `c` decay to the ground level `d` through dipole channels.
//! The photon environment enters through the `K(σ, σ')` matrices; from those
//! the operators module assembles every rate coefficient and the matching
//! superoperators, and the dynamics module integrates the master equation.

pub mod angular;
pub mod dynamics;
pub mod environment;
pub mod error;
pub mod operators;

pub use angular::{HalfInt, Sigma};
pub use dynamics::{AtomicHamiltonian, DensityMatrix, Trajectory};
pub use environment::{
    AngularDistribution, KMatrix, ModeDensityModifier, PhotonEnvironment, StimulatingField,
};
pub use error::{AngularError, DynamicsError, EnvironmentError, OperatorError, SchemeError};
pub use operators::{
    Basis, BasisState, DipoleScale, HyperfineScheme, InterferenceReport, Level, LevelScheme,
    RateSet, Scheme, Superoperator, TransitionK,
};
