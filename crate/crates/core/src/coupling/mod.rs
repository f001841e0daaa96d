//! Optoacoustic coupling between a cavity LG intensity profile and a
//! surface acoustic mode.
//!
//! The raw overlap is
//!
//! ```text
//! χ_{l l' p p'} = w_a ∫₀^∞ ∫₀^{2π} |u_lp(r, θ; w_c)|² u_{l'p'}(r, θ; w_a) dθ r dr
//!              = ξ_{l p p'} · δ_{|l'|, 2|l|}
//! ```
//!
//! [`xi_analytic`] evaluates ξ in closed form, [`chi_quadrature`] integrates
//! χ numerically and is kept independent of the analytic path.

mod analytic;
mod laguerre_rule;
mod overlap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::kronecker_zero;
use crate::specfun::ln_factorial;

pub use analytic::{xi_analytic, xi_analytic_with_error, xi_hypergeometric_series, XiEvaluation};
pub use overlap::chi_quadrature;

/// γ = (w_c / w_a)².
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct WaistRatio(f64);

impl WaistRatio {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::domain("WaistRatio", format!("gamma = {gamma} must be positive")));
        }
        Ok(Self(gamma))
    }

    pub fn from_waists(w_c: f64, w_a: f64) -> Result<Self> {
        if !(w_c > 0.0 && w_a > 0.0) {
            return Err(Error::domain("WaistRatio", "waists must be positive"));
        }
        Self::new((w_c / w_a).powi(2))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Zero-point motion, cavity frequency and cavity length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Zero-point motion amplitude of the acoustic mode (m).
    pub x0: f64,
    /// Angular frequency of the free cavity field (rad/s).
    pub omega_c: f64,
    /// Cavity length (m).
    pub length: f64,
}

impl CavityParams {
    pub fn new(x0: f64, omega_c: f64, length: f64) -> Result<Self> {
        for (name, v) in [("x0", x0), ("omega_c", omega_c), ("length", length)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain("CavityParams", format!("{name} = {v} must be positive")));
            }
        }
        Ok(Self { x0, omega_c, length })
    }
}

/// Single-photon coupling g = x0 ω_c / L in rad/s.
pub fn single_photon_coupling(params: &CavityParams) -> f64 {
    params.x0 * params.omega_c / params.length
}

/// Angular momentum selection rule for ξ: |l'| = 2|l|.
///
/// The raw overlap also picks up the constant half of cos²(lθ), so for l ≠ 0
/// it is nonzero at l' = 0 as well; ξ describes the |l'| = 2|l| channel only.
pub fn selection_allowed(l_optical: i32, l_acoustic: i32) -> bool {
    u64::from(l_acoustic.unsigned_abs()) == 2 * u64::from(l_optical.unsigned_abs())
}

/// The l = 0 angular weight (1 + δ_{0,l}) / sqrt(1 + δ_{0,2l}).
///
/// ∫cos²(lθ)cos(2lθ)dθ is 2π at l = 0 and π/2 otherwise; together with the
/// (1 + δ_0l) factors in the two mode normalizations this leaves √2 at
/// l = 0 and 1 elsewhere.
pub(crate) fn ln_zero_l_weight(l: i32) -> f64 {
    let l = i64::from(l);
    (1.0 + kronecker_zero(l)).ln() - 0.5 * (1.0 + kronecker_zero(2 * l)).ln()
}

/// ξ_{l00} = (1+δ_0l)/sqrt(1+δ_{0,2l}) · γ^|l| / |l|! · sqrt((2|l|)!/π) · (1 + γ/2)^{−(2|l|+1)}.
pub fn xi_p0_closed_form(l: i32, gamma: WaistRatio) -> f64 {
    ln_xi_p0_closed_form(l, gamma).exp()
}

/// Natural log of [`xi_p0_closed_form`]; finite where the value itself underflows.
pub fn ln_xi_p0_closed_form(l: i32, gamma: WaistRatio) -> f64 {
    let big_l = l.unsigned_abs();
    let lf = f64::from(big_l);
    let g = gamma.get();
    ln_zero_l_weight(l) + lf * g.ln() - ln_factorial(big_l)
        + 0.5 * (ln_factorial(2 * big_l) - std::f64::consts::PI.ln())
        - (2.0 * lf + 1.0) * (0.5 * g).ln_1p()
}

/// Waist ratio maximizing ξ_{l00}: γ_max = 2|l| / (|l| + 1), defined for |l| ≥ 1.
pub fn gamma_opt(l: i32) -> Result<f64> {
    if l == 0 {
        return Err(Error::domain("gamma_opt", "defined only for |l| >= 1"));
    }
    let lf = f64::from(l.unsigned_abs());
    Ok(2.0 * lf / (lf + 1.0))
}
