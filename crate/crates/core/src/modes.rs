//! Normalized Laguerre-Gaussian-type mode functions
//!
//! ```text
//! u_lp(r, θ) = sqrt(4 p! / ((1 + δ_0l) π (|l| + p)!)) · (1/w) · (√2 r / w)^|l|
//!              · L_p^|l|(2r²/w²) · exp(−r²/w²) · cos(lθ)
//! ```
//!
//! The same profile describes the acoustic displacement (waist `w_a`) and,
//! squared, the optical intensity of the counter-rotating `|+l⟩ + |−l⟩`
//! superposition (waist `w_c`). Amplitudes carry units of 1/length.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_converged, QuadEstimate, QuadratureConfig};
use crate::specfun::{assoc_laguerre, ln_factorial};

/// Azimuthal index `l` (any sign) and radial index `p ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub l: i32,
    pub p: u32,
}

impl ModeIndex {
    pub const fn new(l: i32, p: u32) -> Self {
        Self { l, p }
    }

    pub fn abs_l(&self) -> u32 {
        self.l.unsigned_abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeRole {
    Optical,
    Acoustic,
}

/// Beam waist of a mode, tagged with what the mode describes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeGeometry {
    waist: f64,
    role: ModeRole,
}

impl ModeGeometry {
    pub fn new(waist: f64, role: ModeRole) -> Result<Self> {
        if !(waist > 0.0 && waist.is_finite()) {
            return Err(Error::domain("ModeGeometry", format!("waist {waist} must be positive")));
        }
        Ok(Self { waist, role })
    }

    pub fn optical(waist: f64) -> Result<Self> {
        Self::new(waist, ModeRole::Optical)
    }

    pub fn acoustic(waist: f64) -> Result<Self> {
        Self::new(waist, ModeRole::Acoustic)
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    pub fn role(&self) -> ModeRole {
        self.role
    }
}

/// 1 when `l = 0`, else 0.
pub fn kronecker_zero(l: i64) -> f64 {
    if l == 0 {
        1.0
    } else {
        0.0
    }
}

fn ln_normalization(idx: ModeIndex) -> f64 {
    let l = idx.abs_l();
    0.5 * (4f64.ln() + ln_factorial(idx.p)
        - (1.0 + kronecker_zero(i64::from(idx.l))).ln()
        - PI.ln()
        - ln_factorial(l + idx.p))
}

/// Radial factor of `u_lp` (everything except `cos(lθ)`), in 1/length.
pub fn radial_profile(idx: ModeIndex, waist: f64, r: f64) -> f64 {
    let l = idx.abs_l();
    let rho2 = (r / waist).powi(2);
    let lag = assoc_laguerre(idx.p, l, 2.0 * rho2);
    if l > 0 && r == 0.0 {
        return 0.0;
    }
    // (√2 r/w)^|l| e^{−r²/w²} in log space so large |l| neither overflows nor underflows early.
    let ln_pow = if l == 0 {
        0.0
    } else {
        f64::from(l) * (SQRT_2 * r / waist).ln()
    };
    (ln_normalization(idx) + ln_pow - rho2).exp() * lag / waist
}

/// Angular factor `cos(lθ)`.
pub fn angular_factor(l: i32, theta: f64) -> f64 {
    (f64::from(l) * theta).cos()
}

/// Value of the normalized mode function at (r, θ).
pub fn lg_mode_amplitude(idx: ModeIndex, geom: &ModeGeometry, r: f64, theta: f64) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::domain("lg_mode_amplitude", format!("r = {r} must be >= 0")));
    }
    Ok(radial_profile(idx, geom.waist, r) * angular_factor(idx.l, theta))
}

/// Radius beyond which the mode (and products with it) is negligible.
pub(crate) fn radial_cutoff(idx: ModeIndex, waist: f64, quad: &QuadratureConfig) -> f64 {
    quad.r_max_waists * waist * (1.0 + f64::from(idx.p) + 0.5 * f64::from(idx.abs_l())).sqrt()
}

/// ∫∫ |u_lp|² r dr dθ by tensor-product quadrature; equals 1 for a normalized mode.
pub fn mode_norm(idx: ModeIndex, geom: &ModeGeometry, quad: &QuadratureConfig) -> Result<QuadEstimate> {
    quad.validate()?;
    let w = geom.waist;
    let r_max = radial_cutoff(idx, w, quad);
    let radial = integrate_converged(
        |r| radial_profile(idx, w, r).powi(2) * r,
        0.0,
        r_max,
        quad.radial_panels,
        quad.target_rel_error,
        quad.max_doublings,
    )?;
    let angular = integrate_converged(
        |t| angular_factor(idx.l, t).powi(2),
        0.0,
        2.0 * PI,
        quad.angular_panels,
        quad.target_rel_error,
        quad.max_doublings,
    )?;
    Ok(QuadEstimate {
        value: radial.value * angular.value,
        error_estimate: radial.value.abs() * angular.error_estimate
            + angular.value.abs() * radial.error_estimate,
        abs_scale: radial.abs_scale * angular.abs_scale,
        panels: radial.panels.max(angular.panels),
    })
}
