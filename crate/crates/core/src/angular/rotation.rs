use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use super::Sigma;

/// Rank-1 small rotation function `s¹_{λσ}(β)`.
///
/// Sign layout follows the atomic-physics table used throughout this crate:
/// `s_{10} = s_{0,-1} = -s_{01} = -s_{-1,0} = sin β / √2`,
/// `s_{11} = s_{-1,-1} = (1 + cos β)/2`, `s_{1,-1} = s_{-1,1} = (1 - cos β)/2`,
/// completed by `s_{00} = cos β` so the 3×3 matrix is orthogonal.
pub fn wigner_d1(lam: Sigma, sig: Sigma, beta: f64) -> f64 {
    use Sigma::*;
    let (s, c) = beta.sin_cos();
    match (lam, sig) {
        (Plus, Plus) | (Minus, Minus) => 0.5 * (1.0 + c),
        (Plus, Minus) | (Minus, Plus) => 0.5 * (1.0 - c),
        (Plus, Zero) | (Zero, Minus) => s * FRAC_1_SQRT_2,
        (Zero, Plus) | (Minus, Zero) => -s * FRAC_1_SQRT_2,
        (Zero, Zero) => c,
    }
}

/// Phase-carrying rank-1 Wigner function `D¹_{λσ}(φ, θ) = e^{iσφ} s¹_{λσ}(θ)`.
///
/// The phase sits on `σ`, so `conj(D_{λσ'}) D_{λσ} = e^{i(σ-σ')φ} s_{λσ'} s_{λσ}`.
#[allow(non_snake_case)]
pub fn wigner_D1(lam: Sigma, sig: Sigma, phi: f64, theta: f64) -> Complex64 {
    let amp = wigner_d1(lam, sig, theta);
    Complex64::from_polar(1.0, f64::from(sig.value()) * phi) * amp
}
