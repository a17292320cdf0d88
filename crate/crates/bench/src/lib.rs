//! Fixtures shared by the benchmarks.

use vrelax_core::angular::HalfInt;
use vrelax_core::dynamics::{AtomicHamiltonian, DensityMatrix};
use vrelax_core::operators::{
    build_relaxation_superop, rates_spontaneous, DipoleScale, HyperfineScheme, Level, LevelScheme,
    Scheme, Superoperator,
};
use vrelax_core::ModeDensityModifier;

pub fn d_line() -> Scheme {
    Scheme::Fine(LevelScheme::d_line(1.0, 1.0, 1.0).expect("valid D line"))
}

/// The sodium D line with nuclear spin 3/2: 32 basis states.
pub fn sodium_hyperfine() -> Scheme {
    Scheme::Hyperfine(
        HyperfineScheme::new(
            LevelScheme::d_line(1.0, 1.0, 1.0).unwrap(),
            HalfInt::from_twice(3),
        )
        .unwrap(),
    )
}

/// A large fine-structure scheme, J_b = 9/2, J_c = 7/2, J_d = 7/2.
pub fn large_fine() -> Scheme {
    let h = HalfInt::from_twice;
    Scheme::Fine(
        LevelScheme::new(h(9), h(7), h(7), 1.0, 1.0, DipoleScale::Uniform { s: 1.0 }).unwrap(),
    )
}

/// Relaxation superoperator, Hamiltonian and uniformly excited state for `scheme` in free space.
pub fn dynamics_fixture(scheme: &Scheme) -> (Superoperator, AtomicHamiltonian, DensityMatrix) {
    let basis = scheme.basis();
    let rates = rates_spontaneous(scheme, &ModeDensityModifier::Vacuum).unwrap();
    let l = build_relaxation_superop(&rates, &basis).unwrap();
    let h = AtomicHamiltonian::from_scheme(scheme).in_frame(1.0);
    let rho = DensityMatrix::level_uniform(basis, Level::B).unwrap();
    (l, h, rho)
}
