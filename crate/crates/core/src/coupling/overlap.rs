//! Numerical overlap integral, the independent check on the analytic ξ.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::modes::{angular_factor, radial_cutoff, radial_profile, ModeIndex};
use crate::quadrature::{integrate_converged, QuadEstimate, QuadratureConfig};

/// χ_{l l' p p'} = w_a ∫∫ |u_lp(r,θ; w_c)|² u_{l'p'}(r,θ; w_a) dθ r dr.
///
/// Tensor-product Gauss-Legendre over radial panels on [0, r_max] and
/// angular panels on [0, 2π]. The integrand is a product of a radial and an
/// angular factor, so the double sum is accumulated as the product of the
/// two one-dimensional sums. Each factor is refined by panel doubling.
pub fn chi_quadrature(
    optical: ModeIndex,
    acoustic: ModeIndex,
    w_c: f64,
    w_a: f64,
    quad: &QuadratureConfig,
) -> Result<QuadEstimate> {
    if !(w_c > 0.0 && w_a > 0.0 && w_c.is_finite() && w_a.is_finite()) {
        return Err(Error::domain("chi_quadrature", "waists must be positive"));
    }
    quad.validate()?;
    let r_max = radial_cutoff(optical, w_c, quad).max(radial_cutoff(acoustic, w_a, quad));
    let radial = integrate_converged(
        |r| radial_profile(optical, w_c, r).powi(2) * radial_profile(acoustic, w_a, r) * r,
        0.0,
        r_max,
        quad.radial_panels,
        quad.target_rel_error,
        quad.max_doublings,
    )?;
    let angular = integrate_converged(
        |t| angular_factor(optical.l, t).powi(2) * angular_factor(acoustic.l, t),
        0.0,
        2.0 * PI,
        quad.angular_panels,
        quad.target_rel_error,
        quad.max_doublings,
    )?;
    Ok(QuadEstimate {
        value: w_a * radial.value * angular.value,
        error_estimate: w_a
            * (radial.value.abs() * angular.error_estimate + angular.value.abs() * radial.error_estimate),
        abs_scale: w_a * radial.abs_scale * angular.abs_scale,
        panels: radial.panels.max(angular.panels),
    })
}
