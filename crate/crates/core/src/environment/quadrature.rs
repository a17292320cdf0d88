use std::f64::consts::TAU;
use std::fmt;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{AngularDistribution, KMatrix, KProvenance, ModeDensityModifier};
use crate::angular::{wigner_d1, Sigma};
use crate::error::EnvironmentError;

pub const DEFAULT_QUAD_ORDER: usize = 16;
pub const DEFAULT_PHI_NODES: usize = 64;
pub const MIN_QUAD_ORDER: usize = 4;

/// Tensor-product rule on the sphere: Gauss–Legendre in `cos θ` times a
/// uniform trapezoid in `φ`, with weights normalized to `dΩ/4π`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    order: usize,
    phi_nodes: usize,
    // (theta, weight) with weights summing to 1 over the theta axis
    theta: Vec<(f64, f64)>,
}

impl QuadratureRule {
    pub fn new(order: usize) -> Result<Self, EnvironmentError> {
        Self::with_phi_nodes(order, DEFAULT_PHI_NODES)
    }

    pub fn with_phi_nodes(order: usize, phi_nodes: usize) -> Result<Self, EnvironmentError> {
        if order < MIN_QUAD_ORDER {
            return Err(EnvironmentError::QuadratureOrder(order));
        }
        if phi_nodes == 0 {
            return Err(EnvironmentError::QuadratureOrder(0));
        }
        let gl = GaussLegendre::new(NonZeroUsize::new(order).expect("order >= 4"));
        let mut theta: Vec<(f64, f64)> = gl
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (x.clamp(-1.0, 1.0).acos(), 0.5 * w))
            .collect();
        theta.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(QuadratureRule {
            order,
            phi_nodes,
            theta,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn phi_nodes(&self) -> usize {
        self.phi_nodes
    }

    pub fn provenance(&self) -> KProvenance {
        KProvenance::Quadrature {
            order: self.order,
            phi_nodes: self.phi_nodes,
        }
    }

    fn phi(&self, k: usize) -> f64 {
        TAU * k as f64 / self.phi_nodes as f64
    }

    /// `Σ_{λ∈lams} ∫ f(θ,φ,λ) e^{i(σ-σ')φ} s_{λσ'}(θ) s_{λσ}(θ) dΩ/4π` for every `(σ, σ')`.
    ///
    /// Rows over `θ` are evaluated in parallel and summed in a fixed order, so
    /// the result does not depend on the number of worker threads.
    pub fn integrate<F>(
        &self,
        lams: &[Sigma],
        f: F,
    ) -> Result<[[Complex64; 3]; 3], EnvironmentError>
    where
        F: Fn(f64, f64, Sigma) -> f64 + Sync,
    {
        let rows: Vec<Result<[[Complex64; 3]; 3], EnvironmentError>> = self
            .theta
            .par_iter()
            .map(|&(theta, wt)| {
                let mut acc = [[Complex64::new(0.0, 0.0); 3]; 3];
                let wp = wt / self.phi_nodes as f64;
                for k in 0..self.phi_nodes {
                    let phi = self.phi(k);
                    for &lam in lams {
                        let n = f(theta, phi, lam);
                        if !(n >= 0.0) || !n.is_finite() {
                            return Err(EnvironmentError::NegativeSample {
                                theta,
                                phi,
                                lambda: lam,
                                value: n,
                            });
                        }
                        if n == 0.0 {
                            continue;
                        }
                        let s = Sigma::ALL.map(|sg| wigner_d1(lam, sg, theta));
                        for s1 in Sigma::ALL {
                            for s2 in Sigma::ALL {
                                if s2 < s1 {
                                    continue;
                                }
                                let amp = wp * n * s[s1.index()] * s[s2.index()];
                                let dm = f64::from(s1.value() - s2.value());
                                acc[s1.index()][s2.index()] += Complex64::from_polar(amp, dm * phi);
                            }
                        }
                    }
                }
                Ok(acc)
            })
            .collect();
        let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
        for row in rows {
            let row = row?;
            for i in 0..3 {
                for j in i..3 {
                    out[i][j] += row[i][j];
                }
            }
        }
        for i in 0..3 {
            out[i][i].im = 0.0;
            for j in 0..i {
                out[i][j] = out[j][i].conj();
            }
        }
        Ok(out)
    }
}

/// Spontaneous `K^R` at `omega`, normalized so free space gives `(2/3)·I`.
pub fn k_spontaneous(
    modifier: &ModeDensityModifier,
    omega: f64,
) -> Result<KMatrix, EnvironmentError> {
    check_frequency(omega)?;
    modifier.validate()?;
    Ok(KMatrix::vacuum()
        .with_channel_weights(modifier.channel_weights(omega))
        .at_frequency(omega))
}

/// Stimulated `K^S` at `omega` by quadrature of order `quad_order`.
pub fn k_stimulated(
    dist: &AngularDistribution,
    modifier: &ModeDensityModifier,
    omega: f64,
    quad_order: usize,
) -> Result<KMatrix, EnvironmentError> {
    let rule = QuadratureRule::new(quad_order)?;
    k_stimulated_with(dist, modifier, omega, &rule)
}

pub fn k_stimulated_with(
    dist: &AngularDistribution,
    modifier: &ModeDensityModifier,
    omega: f64,
    rule: &QuadratureRule,
) -> Result<KMatrix, EnvironmentError> {
    check_frequency(omega)?;
    modifier.validate()?;
    let entries = rule.integrate(&[Sigma::Minus, Sigma::Plus], |t, p, l| {
        dist.evaluate(t, p, l)
    })?;
    Ok(KMatrix::from_entries_unchecked(entries, rule.provenance())
        .with_channel_weights(modifier.channel_weights(omega))
        .at_frequency(omega))
}

fn check_frequency(omega: f64) -> Result<(), EnvironmentError> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(EnvironmentError::Frequency(omega))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfCheckEntry {
    pub name: String,
    pub deviation: f64,
}

/// Deviations of the quadrature from closed-form angular integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSelfCheck {
    pub order: usize,
    pub phi_nodes: usize,
    pub entries: Vec<SelfCheckEntry>,
}

impl QuadratureSelfCheck {
    pub fn max_deviation(&self) -> f64 {
        self.entries.iter().map(|e| e.deviation).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.entries.iter().all(|e| e.deviation < tol)
    }
}

impl fmt::Display for QuadratureSelfCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "quadrature order {} x {} phi nodes",
            self.order, self.phi_nodes
        )?;
        for e in &self.entries {
            writeln!(f, "  {:<24} {:e}", e.name, e.deviation)?;
        }
        Ok(())
    }
}

/// Compares the quadrature against the orthogonality of the rank-1 Wigner
/// functions (per helicity, including `λ = 0`), the isotropic value `2N/3`
/// and the `cos²θ` values `4N/15, 2N/15, 4N/15`.
pub fn quadrature_selfcheck(quad_order: usize) -> Result<QuadratureSelfCheck, EnvironmentError> {
    let rule = QuadratureRule::new(quad_order)?;
    let mut entries = Vec::new();
    for lam in Sigma::ALL {
        let m = rule.integrate(&[lam], |_, _, _| 1.0)?;
        let target = KMatrix::diagonal(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)?;
        let got = KMatrix::from_entries_unchecked(m, rule.provenance());
        entries.push(SelfCheckEntry {
            name: format!("orthogonality lambda={lam}"),
            deviation: got.max_abs_diff(&target),
        });
    }
    let vac = ModeDensityModifier::Vacuum;
    let n = 1.0;
    let iso = k_stimulated_with(&AngularDistribution::isotropic(n), &vac, 1.0, &rule)?;
    entries.push(SelfCheckEntry {
        name: "isotropic".into(),
        deviation: iso.max_abs_diff(&KMatrix::diagonal(
            2.0 * n / 3.0,
            2.0 * n / 3.0,
            2.0 * n / 3.0,
        )?),
    });
    let c2 = k_stimulated_with(&AngularDistribution::cos2(n), &vac, 1.0, &rule)?;
    entries.push(SelfCheckEntry {
        name: "cos2".into(),
        deviation: c2.max_abs_diff(&KMatrix::diagonal(
            4.0 * n / 15.0,
            2.0 * n / 15.0,
            4.0 * n / 15.0,
        )?),
    });
    Ok(QuadratureSelfCheck {
        order: rule.order(),
        phi_nodes: rule.phi_nodes(),
        entries,
    })
}
