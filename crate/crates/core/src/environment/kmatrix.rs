use num_complex::Complex64;
use std::fmt;

use crate::angular::Sigma;
use crate::error::EnvironmentError;

/// How a [`KMatrix`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KProvenance {
    ClosedForm,
    Quadrature { order: usize, phi_nodes: usize },
    Injected,
}

impl fmt::Display for KProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KProvenance::ClosedForm => f.write_str("closed-form"),
            KProvenance::Quadrature { order, phi_nodes } => {
                write!(
                    f,
                    "quadrature (Gauss-Legendre order {order} x {phi_nodes} phi nodes)"
                )
            }
            KProvenance::Injected => f.write_str("injected"),
        }
    }
}

/// Angular/polarization weight `K(σ, σ')` of the photon environment.
///
/// Normalized against the `dΩ/4π` measure: free space gives `(2/3)·δ_{σσ'}`
/// and an isotropic field of `N` photons per mode gives `(2N/3)·δ_{σσ'}`.
/// Entries are indexed by [`Sigma::index`] (`-1, 0, +1`).
#[derive(Clone, Debug, PartialEq)]
pub struct KMatrix {
    entries: [[Complex64; 3]; 3],
    evaluated_at: Option<f64>,
    provenance: KProvenance,
}

const HERMITIAN_TOL: f64 = 1e-12;

impl KMatrix {
    pub fn zero() -> Self {
        KMatrix {
            entries: [[Complex64::new(0.0, 0.0); 3]; 3],
            evaluated_at: None,
            provenance: KProvenance::ClosedForm,
        }
    }

    /// Free-space value `(2/3)·I`.
    pub fn vacuum() -> Self {
        Self::diagonal(2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0).expect("positive diagonal")
    }

    /// Diagonal matrix with entries for `σ = -1, 0, +1`.
    pub fn diagonal(minus: f64, zero: f64, plus: f64) -> Result<Self, EnvironmentError> {
        let mut k = Self::zero();
        for (s, v) in Sigma::ALL.into_iter().zip([minus, zero, plus]) {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(EnvironmentError::BadDiagonal(s));
            }
            k.entries[s.index()][s.index()] = Complex64::new(v, 0.0);
        }
        Ok(k)
    }

    /// Literal diagonal values supplied by the user.
    pub fn injected(minus: f64, zero: f64, plus: f64) -> Result<Self, EnvironmentError> {
        Ok(Self::diagonal(minus, zero, plus)?.with_provenance(KProvenance::Injected))
    }

    /// Validates Hermiticity and a real nonnegative diagonal.
    pub fn from_entries(entries: [[Complex64; 3]; 3]) -> Result<Self, EnvironmentError> {
        let scale = entries
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(1.0f64, f64::max);
        for s1 in Sigma::ALL {
            let d = entries[s1.index()][s1.index()];
            if !(d.re >= 0.0) || d.im.abs() > HERMITIAN_TOL * scale {
                return Err(EnvironmentError::BadDiagonal(s1));
            }
            for s2 in Sigma::ALL {
                let a = entries[s1.index()][s2.index()];
                let b = entries[s2.index()][s1.index()].conj();
                if (a - b).norm() > HERMITIAN_TOL * scale {
                    return Err(EnvironmentError::NotHermitian {
                        s1,
                        s2,
                        a: a.to_string(),
                        b: b.to_string(),
                    });
                }
            }
        }
        Ok(KMatrix {
            entries,
            evaluated_at: None,
            provenance: KProvenance::ClosedForm,
        })
    }

    pub(crate) fn from_entries_unchecked(
        entries: [[Complex64; 3]; 3],
        provenance: KProvenance,
    ) -> Self {
        KMatrix {
            entries,
            evaluated_at: None,
            provenance,
        }
    }

    pub fn with_provenance(mut self, provenance: KProvenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn at_frequency(mut self, omega: f64) -> Self {
        self.evaluated_at = Some(omega);
        self
    }

    pub fn get(&self, s1: Sigma, s2: Sigma) -> Complex64 {
        self.entries[s1.index()][s2.index()]
    }

    pub fn entries(&self) -> &[[Complex64; 3]; 3] {
        &self.entries
    }

    pub fn evaluated_at(&self) -> Option<f64> {
        self.evaluated_at
    }

    pub fn provenance(&self) -> KProvenance {
        self.provenance
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for z in out.entries.iter_mut().flatten() {
            *z *= c;
        }
        out
    }

    /// `K'(σ,σ') = sqrt(m_σ m_σ') K(σ,σ')`, which keeps the matrix Hermitian
    /// and positive semidefinite for nonnegative channel weights.
    pub fn with_channel_weights(&self, weights: [f64; 3]) -> Self {
        let mut out = self.clone();
        for s1 in Sigma::ALL {
            for s2 in Sigma::ALL {
                let w = if s1 == s2 {
                    weights[s1.index()]
                } else {
                    (weights[s1.index()] * weights[s2.index()]).sqrt()
                };
                out.entries[s1.index()][s2.index()] *= w;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &KMatrix) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut m = 0.0f64;
        for s1 in Sigma::ALL {
            for s2 in Sigma::ALL {
                if s1 != s2 {
                    m = m.max(self.get(s1, s2).norm());
                }
            }
        }
        m
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut m = 0.0f64;
        for s1 in Sigma::ALL {
            for s2 in Sigma::ALL {
                m = m.max((self.get(s1, s2) - self.get(s2, s1).conj()).norm());
            }
        }
        m
    }
}

impl fmt::Display for KMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s1 in Sigma::ALL {
            let row: Vec<String> = Sigma::ALL
                .iter()
                .map(|&s2| {
                    let z = self.get(s1, s2);
                    format!("{:e}{:+e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "{}", row.join("  "))?;
        }
        Ok(())
    }
}
