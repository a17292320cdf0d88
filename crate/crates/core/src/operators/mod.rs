//! Rate coefficients, relaxation and stimulated superoperators, and
//! interference diagnostics for fine-structure and hyperfine V-type schemes.

mod basis;
mod interference;
mod rates;
mod scheme;
mod superop;

pub use basis::{Basis, BasisState};
pub use interference::{interference_report, InterferencePair, InterferenceReport, OffDiagonal};
pub use rates::{
    assemble_rates, rates_fine, rates_hyperfine, rates_spontaneous, rates_stimulated,
    rates_stimulated_from_k, rates_stimulated_with, FeedingRate, RateKind, RateSet, TransitionK,
    RATE_CSV_HEADER,
};
pub use scheme::{DipoleScale, HyperfineScheme, Level, LevelScheme, Scheme};
pub use superop::{build_relaxation_superop, build_stimulated_superop, vectorize, Superoperator};
