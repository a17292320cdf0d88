use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::{Basis, BasisState};
use super::scheme::{HyperfineScheme, Level, LevelScheme, Scheme};
use crate::angular::Sigma;
use crate::environment::{
    k_spontaneous, k_stimulated_with, AngularDistribution, KMatrix, ModeDensityModifier,
    QuadratureRule, DEFAULT_QUAD_ORDER,
};
use crate::error::OperatorError;

pub const RATE_CSV_HEADER: [&str; 11] = [
    "kind", "j1", "F1", "M1", "j2", "F2", "M2", "Md1", "Md2", "re", "im",
];

/// K matrices evaluated at the two transition frequencies `ω_bd` and `ω_cd`.
///
/// A coefficient with upper levels `(j1, j2)` uses the matrix of `j2`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionK {
    pub at_b: KMatrix,
    pub at_c: KMatrix,
}

impl TransitionK {
    /// Same matrix for both transitions (frequency-flat environment).
    pub fn uniform(k: KMatrix) -> Self {
        TransitionK {
            at_b: k.clone(),
            at_c: k,
        }
    }

    pub fn for_level(&self, level: Level) -> &KMatrix {
        match level {
            Level::B => &self.at_b,
            _ => &self.at_c,
        }
    }

    pub fn spontaneous(
        scheme: &LevelScheme,
        modifier: &ModeDensityModifier,
    ) -> Result<Self, OperatorError> {
        Ok(TransitionK {
            at_b: k_spontaneous(modifier, scheme.omega(Level::B))?,
            at_c: k_spontaneous(modifier, scheme.omega(Level::C))?,
        })
    }

    pub fn stimulated(
        scheme: &LevelScheme,
        dist: &AngularDistribution,
        modifier: &ModeDensityModifier,
        rule: &QuadratureRule,
    ) -> Result<Self, OperatorError> {
        Ok(TransitionK {
            at_b: k_stimulated_with(dist, modifier, scheme.omega(Level::B), rule)?,
            at_c: k_stimulated_with(dist, modifier, scheme.omega(Level::C), rule)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateKind {
    /// Spontaneous relaxation: upper and feeding blocks.
    Spontaneous,
    /// Stimulated transitions: emission blocks plus the ground-level absorption block.
    Stimulated,
}

/// Four-index coefficient `Γ_{j1 j2}(M1 Md1, M2 Md2)`, indices into the basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeedingRate {
    pub u1: usize,
    pub l1: usize,
    pub u2: usize,
    pub l2: usize,
    pub value: Complex64,
}

/// All rate coefficients of one scheme in one environment, in 1/s.
#[derive(Clone, Debug, PartialEq)]
pub struct RateSet {
    kind: RateKind,
    basis: Basis,
    upper: DMatrix<Complex64>,
    // sorted by (u1, u2, l1, l2)
    feeding: Vec<FeedingRate>,
    lower: Option<DMatrix<Complex64>>,
}

const CONSISTENCY_TOL: f64 = 1e-12;

impl RateSet {
    pub fn kind(&self) -> RateKind {
        self.kind
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Two-index coefficient `Γ(u1, u2)` by basis index (zero outside the upper block).
    pub fn upper(&self, u1: usize, u2: usize) -> Complex64 {
        self.upper[(u1, u2)]
    }

    pub fn upper_matrix(&self) -> &DMatrix<Complex64> {
        &self.upper
    }

    /// Two-index coefficient by state; `None` if either state is not an upper basis state.
    pub fn upper_rate(&self, s1: &BasisState, s2: &BasisState) -> Option<Complex64> {
        let i = self.basis.index_of(s1)?;
        let j = self.basis.index_of(s2)?;
        (s1.level.is_upper() && s2.level.is_upper()).then(|| self.upper[(i, j)])
    }

    pub fn feeding(&self) -> &[FeedingRate] {
        &self.feeding
    }

    /// Four-index coefficient; zero when it was not stored.
    pub fn feeding_rate(&self, u1: usize, l1: usize, u2: usize, l2: usize) -> Complex64 {
        let key = (u1, u2, l1, l2);
        self.feeding
            .binary_search_by(|f| (f.u1, f.u2, f.l1, f.l2).cmp(&key))
            .map(|i| self.feeding[i].value)
            .unwrap_or_default()
    }

    /// Ground-level absorption block `Γ_dd(Md1, Md2)` of a stimulated set.
    pub fn lower(&self) -> Option<&DMatrix<Complex64>> {
        self.lower.as_ref()
    }

    /// Largest absolute coefficient, used as the scale for tolerances.
    pub fn scale(&self) -> f64 {
        let m = self.upper.iter().map(|z| z.norm()).fold(0.0, f64::max);
        self.feeding
            .iter()
            .map(|f| f.value.norm())
            .fold(m, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.upper *= Complex64::new(c, 0.0);
        for f in &mut out.feeding {
            f.value *= c;
        }
        if let Some(l) = &mut out.lower {
            *l *= Complex64::new(c, 0.0);
        }
        out
    }

    /// The same set with every coefficient linking `b` to `c` set to zero.
    pub fn with_cross_terms_removed(&self) -> Self {
        let level = |i: usize| self.basis.state(i).level;
        let mut out = self.clone();
        for u1 in self.basis.upper_indices() {
            for u2 in self.basis.upper_indices() {
                if level(u1) != level(u2) {
                    out.upper[(u1, u2)] = Complex64::default();
                }
            }
        }
        out.feeding.retain(|f| level(f.u1) == level(f.u2));
        out
    }

    /// `Σ_{Md} Γ(u1 Md, u2 Md) = Γ(u1, u2)` and, for stimulated sets,
    /// `Σ_u Γ(u Md2, u Md1) = Γ_dd(Md1, Md2)`.
    pub fn check_consistency(&self) -> Result<(), OperatorError> {
        let n = self.basis.len();
        let tol = CONSISTENCY_TOL * self.scale().max(f64::MIN_POSITIVE);
        let mut sums = DMatrix::<Complex64>::zeros(n, n);
        let mut lower = DMatrix::<Complex64>::zeros(n, n);
        for f in &self.feeding {
            if f.l1 == f.l2 {
                sums[(f.u1, f.u2)] += f.value;
            }
            if f.u1 == f.u2 {
                lower[(f.l2, f.l1)] += f.value;
            }
        }
        let label = |i: usize| self.basis.state(i).to_string();
        for i in 0..n {
            for j in 0..n {
                if (sums[(i, j)] - self.upper[(i, j)]).norm() > tol {
                    return Err(OperatorError::InconsistentRates {
                        i1: label(i),
                        i2: label(j),
                        feed: sums[(i, j)].to_string(),
                        upper: self.upper[(i, j)].to_string(),
                    });
                }
                if let Some(l) = &self.lower {
                    if (lower[(i, j)] - l[(i, j)]).norm() > tol {
                        return Err(OperatorError::InconsistentRates {
                            i1: label(i),
                            i2: label(j),
                            feed: lower[(i, j)].to_string(),
                            upper: l[(i, j)].to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// True when every stored nonzero four-index coefficient has
    /// `M1 - Md1 = M2 - Md2`.
    pub fn selection_rule_holds(&self) -> bool {
        let m = |i: usize| self.basis.state(i).m;
        self.feeding
            .iter()
            .filter(|f| f.value != Complex64::default())
            .all(|f| m(f.u1) - m(f.l1) == m(f.u2) - m(f.l2))
    }

    /// Writes the set as CSV with columns
    /// `kind, j1, F1, M1, j2, F2, M2, Md1, Md2, re, im`.
    ///
    /// In hyperfine sets the lower-state cells read `Fd:Md`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(RATE_CSV_HEADER)?;
        self.write_csv_records(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Rows of [`RateSet::write_csv`] without the header, so several sets can
    /// share one table.
    pub fn write_csv_records<W: Write>(&self, w: &mut csv::Writer<W>) -> csv::Result<()> {
        let (upper_kind, feed_kind) = match self.kind {
            RateKind::Spontaneous => ("relax_upper", "relax_feed"),
            RateKind::Stimulated => ("stim_upper", "stim_feed"),
        };
        let f_cell = |s: &BasisState| s.f.map(|f| f.to_string()).unwrap_or_default();
        let lower_cell = |s: &BasisState| match s.f {
            Some(f) => format!("{f}:{}", s.m),
            None => s.m.to_string(),
        };
        let num = |x: f64| format!("{:e}", x + 0.0);
        let ups = self.basis.upper_indices();
        for &u1 in &ups {
            for &u2 in &ups {
                let (a, b) = (self.basis.state(u1), self.basis.state(u2));
                let v = self.upper[(u1, u2)];
                w.write_record([
                    upper_kind.to_string(),
                    a.level.to_string(),
                    f_cell(a),
                    a.m.to_string(),
                    b.level.to_string(),
                    f_cell(b),
                    b.m.to_string(),
                    String::new(),
                    String::new(),
                    num(v.re),
                    num(v.im),
                ])?;
            }
        }
        for f in &self.feeding {
            let (a, b) = (self.basis.state(f.u1), self.basis.state(f.u2));
            let (la, lb) = (self.basis.state(f.l1), self.basis.state(f.l2));
            w.write_record([
                feed_kind.to_string(),
                a.level.to_string(),
                f_cell(a),
                a.m.to_string(),
                b.level.to_string(),
                f_cell(b),
                b.m.to_string(),
                lower_cell(la),
                lower_cell(lb),
                num(f.value.re),
                num(f.value.im),
            ])?;
        }
        if let Some(l) = &self.lower {
            let downs = self.basis.lower_indices();
            for &l1 in &downs {
                for &l2 in &downs {
                    let (a, b) = (self.basis.state(l1), self.basis.state(l2));
                    let v = l[(l1, l2)];
                    w.write_record([
                        "stim_lower".to_string(),
                        a.level.to_string(),
                        f_cell(a),
                        a.m.to_string(),
                        b.level.to_string(),
                        f_cell(b),
                        b.m.to_string(),
                        String::new(),
                        String::new(),
                        num(v.re),
                        num(v.im),
                    ])?;
                }
            }
        }
        Ok(())
    }
}

type Amplitudes = Vec<Vec<(usize, Sigma, f64)>>;

fn amplitudes(scheme: &Scheme, basis: &Basis) -> Result<Amplitudes, OperatorError> {
    let lows = basis.lower_indices();
    let mut out = vec![Vec::new(); basis.len()];
    for u in basis.upper_indices() {
        for &l in &lows {
            if let Some((sigma, a)) = scheme.amplitude(basis.state(u), basis.state(l))? {
                out[u].push((l, sigma, a));
            }
        }
    }
    Ok(out)
}

/// Assembles every coefficient
/// `Γ(u1 l1, u2 l2) = S_{j1 j2} A(u1, l1) A(u2, l2) K_{j2}(σ1, σ2)` and the sums
/// `Γ(u1, u2) = Σ_l Γ(u1 l, u2 l)`; stimulated sets also get
/// `Γ_dd(l1, l2) = Σ_u Γ(u l2, u l1)`.
pub fn assemble_rates(
    scheme: &Scheme,
    k: &TransitionK,
    kind: RateKind,
) -> Result<RateSet, OperatorError> {
    let basis = scheme.basis();
    let n = basis.len();
    let amps = amplitudes(scheme, &basis)?;
    let ups = basis.upper_indices();
    let fine = scheme.fine();
    let rows: Vec<Vec<FeedingRate>> = ups
        .par_iter()
        .map(|&u1| {
            let j1 = basis.state(u1).level;
            let mut row = Vec::new();
            for &u2 in &ups {
                let j2 = basis.state(u2).level;
                let s = fine.s_factor(j1, j2);
                let km = k.for_level(j2);
                let mut block = Vec::new();
                for &(l1, s1, a1) in &amps[u1] {
                    for &(l2, s2, a2) in &amps[u2] {
                        let v = km.get(s1, s2) * (s * a1 * a2);
                        if v != Complex64::default() {
                            block.push(FeedingRate {
                                u1,
                                l1,
                                u2,
                                l2,
                                value: v,
                            });
                        }
                    }
                }
                block.sort_by_key(|f| (f.l1, f.l2));
                row.extend(block);
            }
            row
        })
        .collect();
    let feeding: Vec<FeedingRate> = rows.into_iter().flatten().collect();
    let mut upper = DMatrix::<Complex64>::zeros(n, n);
    let mut lower = DMatrix::<Complex64>::zeros(n, n);
    for f in &feeding {
        if f.l1 == f.l2 {
            upper[(f.u1, f.u2)] += f.value;
        }
        if f.u1 == f.u2 {
            lower[(f.l2, f.l1)] += f.value;
        }
    }
    Ok(RateSet {
        kind,
        basis,
        upper,
        feeding,
        lower: (kind == RateKind::Stimulated).then_some(lower),
    })
}

/// Spontaneous coefficients of a fine-structure scheme for the given K matrices.
pub fn rates_fine(scheme: &LevelScheme, k: &TransitionK) -> Result<RateSet, OperatorError> {
    assemble_rates(&Scheme::Fine(scheme.clone()), k, RateKind::Spontaneous)
}

/// Spontaneous coefficients of a hyperfine scheme for the given K matrices.
pub fn rates_hyperfine(
    scheme: &HyperfineScheme,
    k: &TransitionK,
) -> Result<RateSet, OperatorError> {
    assemble_rates(&Scheme::Hyperfine(scheme.clone()), k, RateKind::Spontaneous)
}

/// Spontaneous coefficients with `K^R` taken from a mode-density modifier.
pub fn rates_spontaneous(
    scheme: &Scheme,
    modifier: &ModeDensityModifier,
) -> Result<RateSet, OperatorError> {
    let k = TransitionK::spontaneous(scheme.fine(), modifier)?;
    assemble_rates(scheme, &k, RateKind::Spontaneous)
}

/// Stimulated coefficients with `K^S` from quadrature at the default order.
pub fn rates_stimulated(
    scheme: &LevelScheme,
    dist: &AngularDistribution,
    modifier: &ModeDensityModifier,
) -> Result<RateSet, OperatorError> {
    let rule = QuadratureRule::new(DEFAULT_QUAD_ORDER)?;
    rates_stimulated_with(&Scheme::Fine(scheme.clone()), dist, modifier, &rule)
}

pub fn rates_stimulated_with(
    scheme: &Scheme,
    dist: &AngularDistribution,
    modifier: &ModeDensityModifier,
    rule: &QuadratureRule,
) -> Result<RateSet, OperatorError> {
    let k = TransitionK::stimulated(scheme.fine(), dist, modifier, rule)?;
    assemble_rates(scheme, &k, RateKind::Stimulated)
}

/// Stimulated coefficients for literal `K^S` matrices.
pub fn rates_stimulated_from_k(scheme: &Scheme, k: &TransitionK) -> Result<RateSet, OperatorError> {
    assemble_rates(scheme, k, RateKind::Stimulated)
}
