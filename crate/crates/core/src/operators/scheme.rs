use std::fmt;

use super::basis::{Basis, BasisState};
use crate::angular::{clebsch_gordan, racah_w, triangle, HalfInt, Sigma};
use crate::error::SchemeError;

/// One of the three levels of a V-type system: upper `b`, `c`, ground `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    D,
    C,
    B,
}

impl Level {
    pub const UPPER: [Level; 2] = [Level::B, Level::C];

    pub fn as_char(self) -> char {
        match self {
            Level::B => 'b',
            Level::C => 'c',
            Level::D => 'd',
        }
    }

    pub fn is_upper(self) -> bool {
        self != Level::D
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// How the reduced dipole moments enter the rate scale `S_{j1 j2}`.
#[derive(Clone, Debug, PartialEq)]
pub enum DipoleScale {
    /// Every `S_{j1 j2}` equals `s` (1/s).
    Uniform { s: f64 },
    /// `S_{j1 j2} = prefactor · |μ_{j1 d}| |μ_{j2 d}| ω³_{j2 d} / sqrt((2J1+1)(2J2+1))`.
    ///
    /// With `enforce_alkali` set, `|μ_{bd}|/sqrt(2J_b+1) = |μ_{cd}|/sqrt(2J_c+1)`
    /// is checked to relative precision 1e-9.
    Explicit {
        mu_b: f64,
        mu_c: f64,
        prefactor: f64,
        enforce_alkali: bool,
    },
}

/// Fine-structure V-type scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelScheme {
    j_b: HalfInt,
    j_c: HalfInt,
    j_d: HalfInt,
    omega_bd: f64,
    omega_cd: f64,
    dipole: DipoleScale,
}

fn dipole_allowed(j: HalfInt, jd: HalfInt) -> bool {
    j.twice() >= 0
        && jd.twice() >= 0
        && j.same_class(jd)
        && (j - jd).abs() <= HalfInt::ONE
        && !(j == HalfInt::ZERO && jd == HalfInt::ZERO)
}

impl LevelScheme {
    pub fn new(
        j_b: HalfInt,
        j_c: HalfInt,
        j_d: HalfInt,
        omega_bd: f64,
        omega_cd: f64,
        dipole: DipoleScale,
    ) -> Result<Self, SchemeError> {
        for (name, value) in [("omega_bd", omega_bd), ("omega_cd", omega_cd)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(SchemeError::Frequency { name, value });
            }
        }
        for (upper, j) in [('b', j_b), ('c', j_c)] {
            if !dipole_allowed(j, j_d) {
                return Err(SchemeError::NotDipoleAllowed {
                    upper,
                    j_upper: j,
                    j_d,
                });
            }
        }
        match &dipole {
            DipoleScale::Uniform { s } => {
                if !(*s >= 0.0) || !s.is_finite() {
                    return Err(SchemeError::DipoleScale(format!(
                        "rate scale must be finite and >= 0, got {s}"
                    )));
                }
            }
            DipoleScale::Explicit {
                mu_b,
                mu_c,
                prefactor,
                enforce_alkali,
            } => {
                for (name, v) in [("mu_b", mu_b), ("mu_c", mu_c), ("prefactor", prefactor)] {
                    if !(*v >= 0.0) || !v.is_finite() {
                        return Err(SchemeError::DipoleScale(format!(
                            "{name} must be finite and >= 0, got {v}"
                        )));
                    }
                }
                if *enforce_alkali {
                    let b = mu_b / (j_b.multiplicity() as f64).sqrt();
                    let c = mu_c / (j_c.multiplicity() as f64).sqrt();
                    if (b - c).abs() > 1e-9 * b.abs().max(c.abs()) {
                        return Err(SchemeError::Alkali { b, c });
                    }
                }
            }
        }
        Ok(LevelScheme {
            j_b,
            j_c,
            j_d,
            omega_bd,
            omega_cd,
            dipole,
        })
    }

    /// Alkali D-line: `J_b = 3/2`, `J_c = 1/2`, `J_d = 1/2`, uniform scale `s`.
    pub fn d_line(omega_bd: f64, omega_cd: f64, s: f64) -> Result<Self, SchemeError> {
        Self::new(
            HalfInt::from_twice(3),
            HalfInt::HALF,
            HalfInt::HALF,
            omega_bd,
            omega_cd,
            DipoleScale::Uniform { s },
        )
    }

    pub fn j(&self, level: Level) -> HalfInt {
        match level {
            Level::B => self.j_b,
            Level::C => self.j_c,
            Level::D => self.j_d,
        }
    }

    /// Transition frequency `ω_{jd}`; zero for `d` itself.
    pub fn omega(&self, level: Level) -> f64 {
        match level {
            Level::B => self.omega_bd,
            Level::C => self.omega_cd,
            Level::D => 0.0,
        }
    }

    pub fn dipole(&self) -> &DipoleScale {
        &self.dipole
    }

    pub fn with_dipole(&self, dipole: DipoleScale) -> Result<Self, SchemeError> {
        Self::new(
            self.j_b,
            self.j_c,
            self.j_d,
            self.omega_bd,
            self.omega_cd,
            dipole,
        )
    }

    /// `S_{j1 j2}` for upper levels `j1`, `j2`.
    pub fn s_factor(&self, j1: Level, j2: Level) -> f64 {
        match &self.dipole {
            DipoleScale::Uniform { s } => *s,
            DipoleScale::Explicit {
                mu_b,
                mu_c,
                prefactor,
                ..
            } => {
                let mu = |l: Level| if l == Level::B { *mu_b } else { *mu_c };
                let g = |l: Level| self.j(l).multiplicity() as f64;
                prefactor * mu(j1) * mu(j2) * self.omega(j2).powi(3) / (g(j1) * g(j2)).sqrt()
            }
        }
    }

    pub fn basis(&self) -> Basis {
        Basis::fine(self)
    }
}

/// Hyperfine V-type scheme: the fine scheme plus nuclear spin `I`, with every
/// level split into `F = |J - I| ..= J + I`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperfineScheme {
    fine: LevelScheme,
    nuclear_spin: HalfInt,
    // (level, F, energy) in basis order
    energies: Vec<(Level, HalfInt, f64)>,
}

impl HyperfineScheme {
    /// All `F` manifolds of an upper level sit at `ω_{jd}`, those of `d` at 0.
    pub fn new(fine: LevelScheme, nuclear_spin: HalfInt) -> Result<Self, SchemeError> {
        if nuclear_spin.twice() < 0 {
            return Err(SchemeError::Angular(
                crate::error::AngularError::NegativeMomentum(nuclear_spin),
            ));
        }
        let mut energies = Vec::new();
        for level in [Level::D, Level::C, Level::B] {
            for f in Self::f_values(fine.j(level), nuclear_spin) {
                energies.push((level, f, fine.omega(level)));
            }
        }
        Ok(HyperfineScheme {
            fine,
            nuclear_spin,
            energies,
        })
    }

    /// Overrides the energy `ω_j(F)` of one manifold.
    pub fn with_energy(
        mut self,
        level: Level,
        f: HalfInt,
        omega: f64,
    ) -> Result<Self, SchemeError> {
        if !omega.is_finite() {
            return Err(SchemeError::Frequency {
                name: "hyperfine energy",
                value: omega,
            });
        }
        let slot = self
            .energies
            .iter_mut()
            .find(|(l, ff, _)| *l == level && *ff == f)
            .ok_or(SchemeError::InvalidF {
                level: level.as_char(),
                f,
            })?;
        slot.2 = omega;
        Ok(self)
    }

    pub fn f_values(j: HalfInt, i: HalfInt) -> impl Iterator<Item = HalfInt> + Clone {
        HalfInt::range_inclusive((j - i).abs(), j + i)
    }

    pub fn fine(&self) -> &LevelScheme {
        &self.fine
    }

    pub fn nuclear_spin(&self) -> HalfInt {
        self.nuclear_spin
    }

    pub fn energy(&self, level: Level, f: HalfInt) -> Option<f64> {
        self.energies
            .iter()
            .find(|(l, ff, _)| *l == level && *ff == f)
            .map(|e| e.2)
    }

    pub fn energies(&self) -> &[(Level, HalfInt, f64)] {
        &self.energies
    }

    pub fn basis(&self) -> Basis {
        Basis::hyperfine(self)
    }
}

/// Either kind of scheme; everything downstream works on this.
#[derive(Clone, Debug, PartialEq)]
pub enum Scheme {
    Fine(LevelScheme),
    Hyperfine(HyperfineScheme),
}

impl Scheme {
    pub fn fine(&self) -> &LevelScheme {
        match self {
            Scheme::Fine(s) => s,
            Scheme::Hyperfine(h) => h.fine(),
        }
    }

    pub fn basis(&self) -> Basis {
        match self {
            Scheme::Fine(s) => s.basis(),
            Scheme::Hyperfine(h) => h.basis(),
        }
    }

    /// Energy of a basis state in rad/s.
    pub fn energy(&self, state: &BasisState) -> f64 {
        match (self, state.f) {
            (Scheme::Hyperfine(h), Some(f)) => h.energy(state.level, f).unwrap_or(0.0),
            _ => self.fine().omega(state.level),
        }
    }

    /// Dipole amplitude between an upper and a lower basis state, together with
    /// its polarization `σ = M_upper - M_lower`; `None` when the selection
    /// rules forbid the pair.
    ///
    /// Fine structure: `C^{J M}_{J_d M_d 1 σ}`. Hyperfine:
    /// `(-1)^{2J+2F_d+I+F+J_d+1} sqrt((2F_d+1)(2J+1)) W(J F J_d F_d; I 1) C^{F M}_{F_d M_d 1 σ}`,
    /// which reduces to the fine amplitude for `I = 0`.
    pub fn amplitude(
        &self,
        upper: &BasisState,
        lower: &BasisState,
    ) -> Result<Option<(Sigma, f64)>, SchemeError> {
        let Some(sigma) = Sigma::from_delta(upper.m, lower.m) else {
            return Ok(None);
        };
        let fine = self.fine();
        let j = fine.j(upper.level);
        let jd = fine.j(Level::D);
        let one = HalfInt::ONE;
        let a = match (self, upper.f, lower.f) {
            (Scheme::Hyperfine(h), Some(f), Some(fd)) => {
                if !triangle(fd, one, f) {
                    return Ok(None);
                }
                let i = h.nuclear_spin();
                let w = racah_w(j, f, jd, fd, i, one)?;
                if w == 0.0 {
                    return Ok(None);
                }
                let c = clebsch_gordan(fd, lower.m, one, sigma.as_halfint(), f, upper.m)?;
                let phase_twice =
                    2 * j.twice() + 2 * fd.twice() + i.twice() + f.twice() + jd.twice() + 2;
                let sign = if (phase_twice / 2) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                let g = (fd.multiplicity() * j.multiplicity()) as f64;
                sign * g.sqrt() * w * c
            }
            _ => clebsch_gordan(jd, lower.m, one, sigma.as_halfint(), j, upper.m)?,
        };
        if a == 0.0 {
            Ok(None)
        } else {
            Ok(Some((sigma, a)))
        }
    }
}

impl From<LevelScheme> for Scheme {
    fn from(s: LevelScheme) -> Self {
        Scheme::Fine(s)
    }
}

impl From<HyperfineScheme> for Scheme {
    fn from(s: HyperfineScheme) -> Self {
        Scheme::Hyperfine(s)
    }
}
