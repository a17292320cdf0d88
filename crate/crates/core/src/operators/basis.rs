use std::fmt;

use super::scheme::{HyperfineScheme, Level, LevelScheme};
use crate::angular::HalfInt;

/// One magnetic sublevel: level, optional hyperfine `F`, and projection `M`
/// (`M_F` when `f` is set).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub level: Level,
    pub f: Option<HalfInt>,
    pub m: HalfInt,
}

impl BasisState {
    pub fn fine(level: Level, m: HalfInt) -> Self {
        BasisState { level, f: None, m }
    }

    pub fn hyperfine(level: Level, f: HalfInt, m: HalfInt) -> Self {
        BasisState {
            level,
            f: Some(f),
            m,
        }
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.f {
            Some(ff) => write!(f, "{} F={} M={}", self.level, ff, self.m),
            None => write!(f, "{} M={}", self.level, self.m),
        }
    }
}

/// Ordered sublevel enumeration: levels `d, c, b`; within a level `M`
/// ascending, or `F` ascending then `M_F` ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    states: Vec<BasisState>,
}

impl Basis {
    pub fn fine(scheme: &LevelScheme) -> Self {
        let mut states = Vec::new();
        for level in [Level::D, Level::C, Level::B] {
            for m in scheme.j(level).projections() {
                states.push(BasisState::fine(level, m));
            }
        }
        Basis { states }
    }

    pub fn hyperfine(scheme: &HyperfineScheme) -> Self {
        let mut states = Vec::new();
        let i = scheme.nuclear_spin();
        for level in [Level::D, Level::C, Level::B] {
            for f in HyperfineScheme::f_values(scheme.fine().j(level), i) {
                for m in f.projections() {
                    states.push(BasisState::hyperfine(level, f, m));
                }
            }
        }
        Basis { states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_hyperfine(&self) -> bool {
        self.states.first().is_some_and(|s| s.f.is_some())
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &BasisState {
        &self.states[i]
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    /// Indices of the states belonging to `level`, in basis order.
    pub fn indices_of(&self, level: Level) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.states[i].level == level)
            .collect()
    }

    pub fn upper_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.states[i].level.is_upper())
            .collect()
    }

    pub fn lower_indices(&self) -> Vec<usize> {
        self.indices_of(Level::D)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_line_order() {
        let s = LevelScheme::d_line(1.0, 1.0, 1.0).unwrap();
        let b = s.basis();
        assert_eq!(b.len(), 8);
        let labels: Vec<String> = b.states().iter().map(|s| s.to_string()).collect();
        assert_eq!(
            labels,
            [
                "d M=-1/2", "d M=1/2", "c M=-1/2", "c M=1/2", "b M=-3/2", "b M=-1/2", "b M=1/2",
                "b M=3/2"
            ]
        );
        assert_eq!(b.upper_indices(), vec![2, 3, 4, 5, 6, 7]);
        assert!(!b.is_hyperfine());
    }

    #[test]
    fn hyperfine_size() {
        let s = LevelScheme::d_line(1.0, 1.0, 1.0).unwrap();
        let h = HyperfineScheme::new(s, HalfInt::from_twice(3)).unwrap();
        let b = h.basis();
        // d, c: 2 x 4 = 8 each; b: 4 x 4 = 16
        assert_eq!(b.len(), 32);
        assert!(b.is_hyperfine());
        assert_eq!(
            b.state(0),
            &BasisState::hyperfine(Level::D, HalfInt::ONE, HalfInt::integer(-1))
        );
    }
}
