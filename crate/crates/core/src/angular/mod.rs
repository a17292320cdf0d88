//! Angular-momentum algebra: exact half-integers, Clebsch–Gordan
//! coefficients, 6j/Racah W symbols and the rank-1 rotation functions.
//!
//! Every function here is pure. The factorial table behind the Racah sums is
//! built once on first use and never mutated.

mod coupling;
mod factorial;
mod halfint;
mod rotation;

pub use coupling::{clebsch_gordan, racah_w, six_j, triangle};
pub use factorial::{init_factorial_cap, FactorialTable, DEFAULT_CAP};
pub use halfint::{HalfInt, Sigma};
pub use rotation::{wigner_D1, wigner_d1};
