//! Photon environments and the `K(σ, σ')` matrices they induce.
//!
//! A [`PhotonEnvironment`] pairs a mode-density modifier (vacuum, planar
//! cavity, photonic crystal) with an optional stimulating field, given either
//! as an angular distribution of photon numbers or as literal `K` values.

mod distribution;
mod kmatrix;
mod modifier;
mod quadrature;

pub use distribution::{AngularDistribution, DistributionKind, TabulatedDistribution};
pub use kmatrix::{KMatrix, KProvenance};
pub use modifier::{ModeDensityModifier, PhotonicCrystal, SPEED_OF_LIGHT};
pub use quadrature::{
    k_spontaneous, k_stimulated, k_stimulated_with, quadrature_selfcheck, QuadratureRule,
    QuadratureSelfCheck, SelfCheckEntry, DEFAULT_PHI_NODES, DEFAULT_QUAD_ORDER, MIN_QUAD_ORDER,
};

use crate::error::EnvironmentError;

/// The stimulating field, if any.
#[derive(Clone, Debug, PartialEq)]
pub enum StimulatingField {
    None,
    Distribution(AngularDistribution),
    /// Literal frequency-flat `K^S`, bypassing quadrature.
    Injected(KMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhotonEnvironment {
    pub modifier: ModeDensityModifier,
    pub field: StimulatingField,
}

impl PhotonEnvironment {
    pub fn vacuum() -> Self {
        PhotonEnvironment {
            modifier: ModeDensityModifier::Vacuum,
            field: StimulatingField::None,
        }
    }

    pub fn new(modifier: ModeDensityModifier, field: StimulatingField) -> Self {
        PhotonEnvironment { modifier, field }
    }

    pub fn k_spontaneous(&self, omega: f64) -> Result<KMatrix, EnvironmentError> {
        k_spontaneous(&self.modifier, omega)
    }

    /// `K^S` at `omega`; `None` when there is no stimulating field.
    pub fn k_stimulated(
        &self,
        omega: f64,
        rule: &QuadratureRule,
    ) -> Result<Option<KMatrix>, EnvironmentError> {
        match &self.field {
            StimulatingField::None => Ok(None),
            StimulatingField::Distribution(d) => {
                k_stimulated_with(d, &self.modifier, omega, rule).map(Some)
            }
            StimulatingField::Injected(k) => Ok(Some(k.clone().at_frequency(omega))),
        }
    }
}
