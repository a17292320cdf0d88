use thiserror::Error;

use crate::angular::{HalfInt, Sigma};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AngularError {
    #[error("angular momentum {0} is negative")]
    NegativeMomentum(HalfInt),
    #[error("projection {m} is not a valid projection of j = {j}")]
    InvalidProjection { j: HalfInt, m: HalfInt },
    #[error("factorial {needed}! exceeds the configured table cap {cap}")]
    FactorialCap { needed: usize, cap: usize },
    #[error("factorial table already initialised with cap {0}")]
    AlreadyInitialised(usize),
    #[error("cannot parse {0:?} as a half-integer")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvironmentError {
    #[error("negative photon number {value} at theta = {theta}, phi = {phi}, lambda = {lambda}")]
    NegativeSample {
        theta: f64,
        phi: f64,
        lambda: Sigma,
        value: f64,
    },
    #[error("quadrature order {0} is below the minimum of 4")]
    QuadratureOrder(usize),
    #[error("frequency must be positive and finite, got {0}")]
    Frequency(f64),
    #[error("reflectivity must lie in [0, 1), got {0}")]
    Reflectivity(f64),
    #[error("invalid photonic-crystal parameter: {0}")]
    PhotonicCrystal(String),
    #[error("tabulated distribution: {0}")]
    Table(String),
    #[error("K matrix is not Hermitian: K({s1},{s2}) = {a} but conj(K({s2},{s1})) = {b}")]
    NotHermitian {
        s1: Sigma,
        s2: Sigma,
        a: String,
        b: String,
    },
    #[error("K matrix diagonal entry K({0},{0}) is negative or complex")]
    BadDiagonal(Sigma),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("transition frequency {name} must be positive and finite, got {value}")]
    Frequency { name: &'static str, value: f64 },
    #[error("transition {upper} -> d is not dipole allowed (J_{upper} = {j_upper}, J_d = {j_d})")]
    NotDipoleAllowed {
        upper: char,
        j_upper: HalfInt,
        j_d: HalfInt,
    },
    #[error("dipole scale: {0}")]
    DipoleScale(String),
    #[error("alkali proportionality violated: |mu_bd|/sqrt(2J_b+1) = {b} but |mu_cd|/sqrt(2J_c+1) = {c}")]
    Alkali { b: f64, c: f64 },
    #[error("hyperfine level {level}: F = {f} is not in |J - I| ..= J + I")]
    InvalidF { level: char, f: HalfInt },
    #[error("hyperfine level {level}: duplicate or missing F manifold {f}")]
    FManifold { level: char, f: HalfInt },
    #[error(transparent)]
    Angular(#[from] AngularError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Environment(#[from] EnvironmentError),
    #[error(transparent)]
    Angular(#[from] AngularError),
    #[error("rate set violates the feeding/upper trace identity at upper states ({i1}, {i2}): sum over lower = {feed}, upper = {upper}")]
    InconsistentRates {
        i1: String,
        i2: String,
        feed: String,
        upper: String,
    },
    #[error("basis mismatch: {0}")]
    Basis(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("time step must be positive and finite, got {0}")]
    TimeStep(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("trace drifted to {trace} at t = {t} (limit 1e-6)")]
    TraceDrift { t: f64, trace: f64 },
    #[error("negative eigenvalue {eigenvalue} at t = {t} (limit -1e-6)")]
    Negativity { t: f64, eigenvalue: f64 },
    #[error("non-finite entry at t = {0}")]
    NonFinite(f64),
    #[error("density matrix invalid: {0}")]
    InvalidState(String),
    #[error("generator null space is {0}-dimensional and long-time relaxation did not converge")]
    Degenerate(usize),
    #[error("linear solve for the steady state failed")]
    Singular,
}
