use std::fmt;

use num_complex::Complex64;

use super::basis::BasisState;
use super::rates::RateSet;

/// Interference degree for one pair of upper states with a shared projection.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferencePair {
    pub first: BasisState,
    pub second: BasisState,
    /// `Re Γ(first, second) / sqrt(Γ(first, first) Γ(second, second))`;
    /// `None` when either diagonal rate vanishes.
    pub p: Option<f64>,
    /// Same ratio built from `|Γ(first, second)|`.
    pub magnitude: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OffDiagonal {
    pub first: BasisState,
    pub second: BasisState,
    pub value: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceReport {
    pub pairs: Vec<InterferencePair>,
    /// Every off-diagonal upper coefficient above `1e-14` of the largest rate.
    pub off_diagonal: Vec<OffDiagonal>,
}

impl InterferenceReport {
    /// `p` for an ordered pair of upper states, if it was reported.
    pub fn p_for(&self, first: &BasisState, second: &BasisState) -> Option<f64> {
        self.pairs
            .iter()
            .find(|p| &p.first == first && &p.second == second)
            .and_then(|p| p.p)
    }
}

impl fmt::Display for InterferenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = |v: Option<f64>| {
            v.map(|x| if x.abs() < 5e-5 { 0.0 } else { x })
                .map(|x| format!("{x:.4}"))
                .unwrap_or_else(|| "undefined".into())
        };
        for p in &self.pairs {
            writeln!(
                f,
                "p({}; {}) = {}  |p| = {}",
                p.first,
                p.second,
                cell(p.p),
                cell(p.magnitude)
            )?;
        }
        Ok(())
    }
}

/// Pairs are taken between upper states with equal projection: `b` against
/// `c`, and in hyperfine sets also different `F` within one level (lower `F`
/// first).
pub fn interference_report(rates: &RateSet) -> InterferenceReport {
    let basis = rates.basis();
    let mut ups = basis.upper_indices();
    // b before c, then F and M ascending
    ups.sort_by_key(|&i| {
        let s = basis.state(i);
        (std::cmp::Reverse(s.level), s.f, s.m)
    });
    let scale = rates.scale();
    let mut pairs = Vec::new();
    let mut off_diagonal = Vec::new();
    for (a, &i) in ups.iter().enumerate() {
        for &j in &ups[a + 1..] {
            let (si, sj) = (*basis.state(i), *basis.state(j));
            let g = rates.upper(i, j);
            if si.m != sj.m || (si.level == sj.level && si.f == sj.f) {
                continue;
            }
            let d = rates.upper(i, i).re * rates.upper(j, j).re;
            let (p, magnitude) = if d > 0.0 {
                let r = d.sqrt();
                (Some(g.re / r), Some(g.norm() / r))
            } else {
                (None, None)
            };
            pairs.push(InterferencePair {
                first: si,
                second: sj,
                p,
                magnitude,
            });
        }
    }
    for &i in &ups {
        for &j in &ups {
            let g = rates.upper(i, j);
            if i != j && g.norm() > 1e-14 * scale {
                off_diagonal.push(OffDiagonal {
                    first: *basis.state(i),
                    second: *basis.state(j),
                    value: g,
                });
            }
        }
    }
    InterferenceReport {
        pairs,
        off_diagonal,
    }
}
