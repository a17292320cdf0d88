use crate::angular::Sigma;
use crate::error::EnvironmentError;

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Per-frequency, per-channel change of the electromagnetic mode density
/// relative to free space.
#[derive(Clone, Debug, PartialEq)]
pub enum ModeDensityModifier {
    Vacuum,
    /// Two thin plates normal to the quantization axis, `kd << 1`.
    PlanarCavity {
        reflectivity: f64,
    },
    PhotonicCrystal(PhotonicCrystal),
}

/// Isotropic photonic crystal near the upper edge `ω_e` of a gap, with
/// dispersion `ω = ω_e + A (k - k0)²`.
///
/// Channels listed in `gapped` see the band-edge density
/// `sqrt((ω - ω_e)/A³)` (zero inside the gap), expressed relative to the
/// free-space density `2ω²/c³`. Other channels keep the free-space density.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonicCrystal {
    /// Band edge `ω_e`, rad/s.
    pub band_edge: f64,
    /// Dispersion curvature `A`, (rad/s)·m².
    pub curvature: f64,
    pub gapped: Vec<Sigma>,
}

impl PhotonicCrystal {
    pub fn new(
        band_edge: f64,
        curvature: f64,
        gapped: Vec<Sigma>,
    ) -> Result<Self, EnvironmentError> {
        if !(band_edge > 0.0) || !band_edge.is_finite() {
            return Err(EnvironmentError::PhotonicCrystal(format!(
                "band edge must be positive, got {band_edge}"
            )));
        }
        if !(curvature > 0.0) || !curvature.is_finite() {
            return Err(EnvironmentError::PhotonicCrystal(format!(
                "curvature must be positive, got {curvature}"
            )));
        }
        let mut gapped = gapped;
        gapped.sort();
        gapped.dedup();
        Ok(PhotonicCrystal {
            band_edge,
            curvature,
            gapped,
        })
    }

    fn band_density(&self, omega: f64) -> f64 {
        if omega <= self.band_edge {
            return 0.0;
        }
        let pc = ((omega - self.band_edge) / self.curvature.powi(3)).sqrt();
        let vac = 2.0 * omega * omega / SPEED_OF_LIGHT.powi(3);
        pc / vac
    }
}

impl ModeDensityModifier {
    pub fn planar_cavity(reflectivity: f64) -> Result<Self, EnvironmentError> {
        let m = ModeDensityModifier::PlanarCavity { reflectivity };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), EnvironmentError> {
        match self {
            ModeDensityModifier::Vacuum => Ok(()),
            ModeDensityModifier::PlanarCavity { reflectivity } => {
                if (0.0..1.0).contains(&reflectivity.abs()) && reflectivity.is_finite() {
                    Ok(())
                } else {
                    Err(EnvironmentError::Reflectivity(*reflectivity))
                }
            }
            ModeDensityModifier::PhotonicCrystal(pc) => {
                PhotonicCrystal::new(pc.band_edge, pc.curvature, pc.gapped.clone()).map(|_| ())
            }
        }
    }

    /// Mode density of channel `sigma` at `omega`, relative to free space.
    pub fn relative_density(&self, omega: f64, sigma: Sigma) -> f64 {
        match self {
            ModeDensityModifier::Vacuum => 1.0,
            ModeDensityModifier::PlanarCavity { reflectivity } => {
                let r = reflectivity.abs();
                let ratio = (1.0 - r) / (1.0 + r);
                match sigma {
                    Sigma::Zero => 1.0 / ratio,
                    _ => ratio,
                }
            }
            ModeDensityModifier::PhotonicCrystal(pc) => {
                if pc.gapped.contains(&sigma) {
                    pc.band_density(omega)
                } else {
                    1.0
                }
            }
        }
    }

    /// Relative densities for `σ = -1, 0, +1`.
    pub fn channel_weights(&self, omega: f64) -> [f64; 3] {
        Sigma::ALL.map(|s| self.relative_density(omega, s))
    }
}
