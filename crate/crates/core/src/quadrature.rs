//! Composite Gauss-Legendre integration with panel doubling.
//!
//! Used by the mode normalization check and by the overlap-integral oracle.
//! The analytic coupling path never touches this module.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss-Legendre nodes per panel.
pub const NODES_PER_PANEL: usize = 16;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NonZeroUsize::new(NODES_PER_PANEL).expect("non-zero");
        GaussLegendre::new(n).as_node_weight_pairs().to_vec()
    })
}

/// Settings for the tensor-product quadrature over (r, θ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Initial number of radial panels on [0, r_max].
    pub radial_panels: usize,
    /// Initial number of angular panels on [0, 2π].
    pub angular_panels: usize,
    /// Radial cutoff in waists. The cutoff used for a mode of order (l, p) is
    /// `r_max_waists · w · sqrt(1 + p + |l|/2)`, which is `r_max_waists · w`
    /// for the fundamental mode and follows the outermost lobe for higher orders.
    pub r_max_waists: f64,
    /// Stop doubling once successive estimates agree to this relative error.
    pub target_rel_error: f64,
    /// Maximum number of panel doublings before reporting non-convergence.
    pub max_doublings: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            radial_panels: 16,
            angular_panels: 8,
            r_max_waists: 8.0,
            target_rel_error: 1e-10,
            max_doublings: 8,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::domain("QuadratureConfig", why));
        if self.radial_panels == 0 || self.angular_panels == 0 {
            return bad("panel counts must be positive");
        }
        if !(self.r_max_waists.is_finite() && self.r_max_waists >= 6.0) {
            return bad("r_max_waists must be finite and at least 6");
        }
        if !(self.target_rel_error > 0.0 && self.target_rel_error.is_finite()) {
            return bad("target_rel_error must be positive");
        }
        Ok(())
    }
}

/// A converged quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadEstimate {
    pub value: f64,
    /// |I(2n) − I(n)| at the final doubling.
    pub error_estimate: f64,
    /// Integral of |f|, the scale against which the error is judged.
    pub abs_scale: f64,
    pub panels: usize,
}

/// Composite rule with `panels` equal panels on [a, b]. Returns (∫f, ∫|f|).
pub fn composite<F>(f: &F, a: f64, b: f64, panels: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for i in 0..panels {
        let lo = a + h * i as f64;
        let mid = lo + 0.5 * h;
        for &(x, w) in rule() {
            let v = f(mid + 0.5 * h * x) * w;
            sum += v;
            abs_sum += v.abs();
        }
    }
    (0.5 * h * sum, 0.5 * h * abs_sum)
}

/// Doubles the panel count until successive estimates agree to
/// `target · max(|I|, ∫|f|)`.
pub fn integrate_converged<F>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    target: f64,
    max_doublings: u32,
) -> Result<QuadEstimate>
where
    F: Fn(f64) -> f64,
{
    let mut n = panels.max(1);
    let (mut prev, _) = composite(&f, a, b, n);
    let mut last_err = f64::INFINITY;
    for _ in 0..max_doublings {
        n *= 2;
        let (cur, abs_scale) = composite(&f, a, b, n);
        let err = (cur - prev).abs();
        if err <= target * cur.abs().max(abs_scale) {
            return Ok(QuadEstimate {
                value: cur,
                error_estimate: err,
                abs_scale,
                panels: n,
            });
        }
        last_err = err / cur.abs().max(abs_scale).max(f64::MIN_POSITIVE);
        prev = cur;
    }
    Err(Error::Convergence {
        achieved: last_err,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact_on_one_panel() {
        // degree 2n − 1 = 31 is integrated exactly by a 16-point rule
        let (v, _) = composite(&|x: f64| x.powi(31) + x.powi(2), -1.0, 1.0, 1);
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_moment() {
        let est = integrate_converged(|r| r * (-r * r).exp(), 0.0, 8.0, 4, 1e-12, 10).unwrap();
        assert!((est.value - 0.5).abs() < 1e-14);
    }

    #[test]
    fn trig_product_on_circle() {
        let est = integrate_converged(|t| (3.0 * t).cos().powi(2), 0.0, 2.0 * PI, 2, 1e-12, 10).unwrap();
        assert!((est.value - PI).abs() < 1e-13);
    }

    #[test]
    fn reports_non_convergence() {
        let err = integrate_converged(|x| (1.0 / (x + 1e-9)).sin(), 0.0, 1.0, 1, 1e-14, 2).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }

    #[test]
    fn default_config_is_valid() {
        QuadratureConfig::default().validate().unwrap();
        let bad = QuadratureConfig {
            r_max_waists: 3.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
