use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::DynamicsError;
use crate::operators::{Basis, Level, Scheme};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Atomic density matrix over a sublevel basis at time `time` (s).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    basis: Basis,
    rho: DMatrix<Complex64>,
    time: f64,
}

/// Largest `|ρ_ij - conj(ρ_ji)|`.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut d = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            d = d.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    d
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn trace(m: &DMatrix<Complex64>) -> Complex64 {
    m.diagonal().iter().sum()
}

impl DensityMatrix {
    /// Checks Hermiticity (1e-12), unit trace (1e-9) and positivity (-1e-9).
    pub fn new(basis: Basis, rho: DMatrix<Complex64>) -> Result<Self, DynamicsError> {
        let n = basis.len();
        if rho.nrows() != n || rho.ncols() != n {
            return Err(DynamicsError::Dimension(format!(
                "density matrix is {}x{}, basis has {n} states",
                rho.nrows(),
                rho.ncols()
            )));
        }
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(DynamicsError::InvalidState("non-finite entry".into()));
        }
        let h = hermiticity_defect(&rho);
        if h > HERMITICITY_TOL {
            return Err(DynamicsError::InvalidState(format!(
                "not Hermitian (defect {h:e})"
            )));
        }
        let t = trace(&rho);
        if (t - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(DynamicsError::InvalidState(format!(
                "trace is {t}, expected 1"
            )));
        }
        let e = min_eigenvalue(&rho);
        if e < -POSITIVITY_TOL {
            return Err(DynamicsError::InvalidState(format!(
                "negative eigenvalue {e:e}"
            )));
        }
        Ok(DensityMatrix {
            basis,
            rho,
            time: 0.0,
        })
    }

    pub(crate) fn from_parts_unchecked(basis: Basis, rho: DMatrix<Complex64>, time: f64) -> Self {
        DensityMatrix { basis, rho, time }
    }

    /// All population in basis state `index`.
    pub fn single_sublevel(basis: Basis, index: usize) -> Result<Self, DynamicsError> {
        let n = basis.len();
        if index >= n {
            return Err(DynamicsError::Dimension(format!(
                "state index {index} out of range 0..{n}"
            )));
        }
        let mut rho = DMatrix::zeros(n, n);
        rho[(index, index)] = Complex64::new(1.0, 0.0);
        Self::new(basis, rho)
    }

    /// Equal populations over every sublevel of `level`, no coherence.
    pub fn level_uniform(basis: Basis, level: Level) -> Result<Self, DynamicsError> {
        let idx = basis.indices_of(level);
        if idx.is_empty() {
            return Err(DynamicsError::InvalidState(format!(
                "level {level} has no sublevels"
            )));
        }
        let n = basis.len();
        let w = Complex64::new(1.0 / idx.len() as f64, 0.0);
        let mut rho = DMatrix::zeros(n, n);
        for i in idx {
            rho[(i, i)] = w;
        }
        Self::new(basis, rho)
    }

    /// Ground level with equal sublevel populations (the zero-temperature limit
    /// without Zeeman splitting).
    pub fn thermal_ground(basis: Basis) -> Result<Self, DynamicsError> {
        Self::level_uniform(basis, Level::D)
    }

    pub fn maximally_mixed(basis: Basis) -> Self {
        let n = basis.len();
        let rho = DMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0);
        DensityMatrix {
            basis,
            rho,
            time: 0.0,
        }
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn populations(&self) -> Vec<f64> {
        self.rho.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        trace(&self.rho)
    }

    /// Total population of one level.
    pub fn level_population(&self, level: Level) -> f64 {
        self.basis
            .indices_of(level)
            .iter()
            .map(|&i| self.rho[(i, i)].re)
            .sum()
    }
}

/// Diagonal atomic Hamiltonian over a basis, rad/s.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicHamiltonian {
    basis: Basis,
    energies: Vec<f64>,
}

impl AtomicHamiltonian {
    /// Upper sublevels at `ω_{jd}` (or `ω_j(F)` in hyperfine schemes), ground at 0.
    pub fn from_scheme(scheme: &Scheme) -> Self {
        let basis = scheme.basis();
        let energies = basis.states().iter().map(|s| scheme.energy(s)).collect();
        AtomicHamiltonian { basis, energies }
    }

    /// Every energy zero.
    pub fn free(basis: Basis) -> Self {
        let energies = vec![0.0; basis.len()];
        AtomicHamiltonian { basis, energies }
    }

    pub fn from_energies(basis: Basis, energies: Vec<f64>) -> Result<Self, DynamicsError> {
        if energies.len() != basis.len() {
            return Err(DynamicsError::Dimension(format!(
                "{} energies for {} basis states",
                energies.len(),
                basis.len()
            )));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(DynamicsError::InvalidState("non-finite energy".into()));
        }
        Ok(AtomicHamiltonian { basis, energies })
    }

    /// Shifts every upper sublevel down by `omega`: the frame rotating at
    /// `omega` on all upper-ground coherences. Relaxation operators are
    /// unchanged by this shift.
    pub fn in_frame(&self, omega: f64) -> Self {
        let mut out = self.clone();
        for (e, s) in out.energies.iter_mut().zip(self.basis.states()) {
            if s.level.is_upper() {
                *e -= omega;
            }
        }
        out
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }
}
