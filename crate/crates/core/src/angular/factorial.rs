use num_bigint::BigUint;
use std::sync::OnceLock;

use crate::error::AngularError;

/// Largest `n` for which `n!` is stored by default.
///
/// Clebsch–Gordan sums need up to `(j1 + j2 + J + 1)!` and 6j sums up to
/// `(j1 + j2 + j4 + j5 + 1)!`; 52 covers every coupling with all momenta
/// at or below 25/2.
pub const DEFAULT_CAP: usize = 52;

/// Exact factorials `0! ..= cap!`.
#[derive(Debug, Clone)]
pub struct FactorialTable {
    values: Vec<BigUint>,
}

impl FactorialTable {
    pub fn with_cap(cap: usize) -> Self {
        let mut values = Vec::with_capacity(cap + 1);
        let mut acc = BigUint::from(1u32);
        values.push(acc.clone());
        for n in 1..=cap {
            acc *= n as u64;
            values.push(acc.clone());
        }
        FactorialTable { values }
    }

    pub fn cap(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> Result<&BigUint, AngularError> {
        self.values.get(n).ok_or(AngularError::FactorialCap {
            needed: n,
            cap: self.cap(),
        })
    }
}

static TABLE: OnceLock<FactorialTable> = OnceLock::new();

/// Fixes the factorial cap before first use. Fails once the table exists.
pub fn init_factorial_cap(cap: usize) -> Result<(), AngularError> {
    let mut fresh = false;
    TABLE.get_or_init(|| {
        fresh = true;
        FactorialTable::with_cap(cap)
    });
    if fresh {
        Ok(())
    } else {
        Err(AngularError::AlreadyInitialised(table().cap()))
    }
}

pub fn table() -> &'static FactorialTable {
    TABLE.get_or_init(|| FactorialTable::with_cap(DEFAULT_CAP))
}

/// `(lo+1)(lo+2)···hi`, i.e. `hi!/lo!` for `lo <= hi`.
pub(crate) fn falling_ratio(hi: usize, lo: usize) -> BigUint {
    debug_assert!(lo <= hi);
    let mut acc = BigUint::from(1u32);
    for t in lo + 1..=hi {
        acc *= t as u64;
    }
    acc
}
