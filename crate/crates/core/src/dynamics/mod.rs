//! Density-matrix propagation under `dρ/dt = -i[H, ρ] + Σ L[ρ]` and steady states.

mod propagate;
mod state;

pub use propagate::{
    generator, null_space_dimension, propagate, steady_state, Trajectory, NEGATIVITY_ABORT,
    TRACE_ABORT,
};
pub use state::{
    hermiticity_defect, min_eigenvalue, trace, AtomicHamiltonian, DensityMatrix, HERMITICITY_TOL,
    POSITIVITY_TOL, TRACE_TOL,
};
