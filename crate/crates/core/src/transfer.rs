//! Coherent-state transfer fidelity.
//!
//! ```text
//! n = (γ_m N_m / 2) · π / (2 g √n_c ξ)
//! λ = α (κ + γ_m) / 4 · π / (2 g √n_c ξ)
//! F = exp(−λ² / (1 + n)) / (1 + n)
//! ```
//!
//! All rates are angular frequencies in rad/s.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant (J s), CODATA 2018 exact-derived value.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K), exact in the 2019 SI.
pub const K_B: f64 = 1.380_649e-23;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferParams {
    /// Single-photon coupling (rad/s).
    pub g: f64,
    /// Intracavity photon number.
    pub n_c: f64,
    /// Optical decay rate (rad/s).
    pub kappa: f64,
    /// Acoustic decay rate (rad/s).
    pub gamma_m: f64,
    /// Environmental phonon occupation.
    pub n_m: f64,
    /// Magnitude of the coherent amplitude.
    pub alpha: f64,
}

impl TransferParams {
    pub fn new(g: f64, n_c: f64, kappa: f64, gamma_m: f64, n_m: f64, alpha: f64) -> Result<Self> {
        let p = Self {
            g,
            n_c,
            kappa,
            gamma_m,
            n_m,
            alpha,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g", self.g), ("n_c", self.n_c), ("kappa", self.kappa), ("gamma_m", self.gamma_m)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain("TransferParams", format!("{name} = {v} must be positive")));
            }
        }
        for (name, v) in [("n_m", self.n_m), ("alpha", self.alpha)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain("TransferParams", format!("{name} = {v} must be non-negative")));
            }
        }
        Ok(())
    }

    /// π / (2 g √n_c ξ), the time scale shared by both loss channels.
    fn inverse_rate(&self, op: &'static str, xi: f64) -> Result<f64> {
        self.validate()?;
        if xi.is_nan() || xi <= 0.0 {
            return Err(Error::domain(op, format!("xi = {xi} must be positive")));
        }
        Ok(PI / (2.0 * self.g * self.n_c.sqrt() * xi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityBreakdown {
    pub n: f64,
    pub lambda: f64,
    pub fidelity: f64,
}

impl FidelityBreakdown {
    fn from_parts(n: f64, lambda: f64) -> Self {
        let fidelity = (-lambda * lambda / (1.0 + n)).exp() / (1.0 + n);
        Self { n, lambda, fidelity }
    }
}

/// Effective thermal quanta absorbed during the transfer.
pub fn heating_quanta(params: &TransferParams, xi: f64) -> Result<f64> {
    let t = params.inverse_rate("heating_quanta", xi)?;
    Ok(0.5 * params.gamma_m * params.n_m * t)
}

/// Damping parameter of the transferred amplitude.
pub fn damping_parameter(params: &TransferParams, xi: f64) -> Result<f64> {
    let t = params.inverse_rate("damping_parameter", xi)?;
    Ok(params.alpha * 0.25 * (params.kappa + params.gamma_m) * t)
}

pub fn transfer_fidelity(params: &TransferParams, xi: f64) -> Result<FidelityBreakdown> {
    let n = heating_quanta(params, xi)?;
    let lambda = damping_parameter(params, xi)?;
    Ok(FidelityBreakdown::from_parts(n, lambda))
}

/// Bose-Einstein occupation 1/(exp(ħω/k_B T) − 1); zero at T = 0.
pub fn bose_occupation(omega_m: f64, temperature: f64) -> Result<f64> {
    if !(omega_m > 0.0 && omega_m.is_finite()) {
        return Err(Error::domain("bose_occupation", format!("omega_m = {omega_m} must be positive")));
    }
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::domain("bose_occupation", format!("T = {temperature} must be non-negative")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (HBAR * omega_m / (K_B * temperature)).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TWO_PI: f64 = 2.0 * PI;

    fn caption(n_m: f64, alpha: f64) -> TransferParams {
        TransferParams::new(TWO_PI * 0.2, 2e18, TWO_PI * 50e3, TWO_PI * 50e3, n_m, alpha).unwrap()
    }

    #[test]
    fn heating_examples() {
        assert_eq!(heating_quanta(&caption(0.0, 1.0), 0.19).unwrap(), 0.0);
        let n = heating_quanta(&caption(2e4, 1.0), 0.19).unwrap();
        let want = TWO_PI * 50e3 * 2e4 / 2.0 * PI / (2.0 * TWO_PI * 0.2 * 2e18f64.sqrt() * 0.19);
        assert!((n - want).abs() < 1e-14 * want);
        assert!((n - 14.6).abs() < 0.05, "{n}");
        let half = heating_quanta(&caption(2e4, 1.0), 0.38).unwrap();
        assert!((half - n / 2.0).abs() < 1e-14 * n);
    }

    #[test]
    fn damping_examples() {
        assert_eq!(damping_parameter(&caption(0.0, 0.0), 0.19).unwrap(), 0.0);
        let l = damping_parameter(&caption(0.0, 1.0), 0.19).unwrap();
        assert!((l - 7.3e-4).abs() < 0.05e-4, "{l}");
        let l3 = damping_parameter(&caption(0.0, 3.0), 0.19).unwrap();
        assert!((l3 - 3.0 * l).abs() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let perfect = transfer_fidelity(&caption(0.0, 0.0), 0.19).unwrap();
        assert_eq!(perfect.fidelity, 1.0);
        let f = transfer_fidelity(&caption(0.0, 1.0), 0.19).unwrap();
        let lam = damping_parameter(&caption(0.0, 1.0), 0.19).unwrap();
        assert!((1.0 - f.fidelity - lam * lam).abs() < 1e-12);
        assert!((1.0 - f.fidelity - 5.3e-7).abs() < 0.05e-7, "{}", 1.0 - f.fidelity);
        let far = transfer_fidelity(&caption(2e4, 1.0), 1e12).unwrap();
        assert!(far.fidelity > 1.0 - 1e-9);
        let big = transfer_fidelity(&caption(0.0, 1e4), 0.19).unwrap();
        assert!(big.fidelity > 0.0 && big.fidelity < 1e-20);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(heating_quanta(&caption(1.0, 1.0), 0.0).is_err());
        assert!(damping_parameter(&caption(1.0, 1.0), -0.1).is_err());
        assert!(transfer_fidelity(&caption(1.0, 1.0), f64::NAN).is_err());
        assert!(TransferParams::new(1.0, 1.0, -1.0, 1.0, 0.0, 0.0).is_err());
        assert!(TransferParams::new(1.0, 1.0, 1.0, 1.0, -1.0, 0.0).is_err());
        assert!(TransferParams::new(0.0, 1.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(bose_occupation(0.0, 1.0).is_err());
        assert!(bose_occupation(1.0, -1.0).is_err());
    }

    #[test]
    fn bose_examples() {
        assert_eq!(bose_occupation(TWO_PI * 1e6, 0.0).unwrap(), 0.0);
        let t = HBAR * 1e9 / (K_B * 2f64.ln());
        assert!((bose_occupation(1e9, t).unwrap() - 1.0).abs() < 1e-14);
        let n = bose_occupation(TWO_PI * 1e6, 1.0).unwrap();
        assert!((n - 2.08e4).abs() < 0.01e4, "{n}");
    }

    fn params() -> impl Strategy<Value = TransferParams> {
        (1e-2f64..1e3, 1e10f64..1e20, 1e2f64..1e7, 1e2f64..1e7, 0.0f64..1e5, 0.0f64..10.0)
            .prop_map(|(g, n_c, k, gm, nm, a)| TransferParams::new(g, n_c, k, gm, nm, a).unwrap())
    }

    proptest! {
        #[test]
        fn fidelity_bounded_and_consistent(p in params(), xi in 1e-4f64..10.0) {
            let b = transfer_fidelity(&p, xi).unwrap();
            prop_assert!(b.fidelity > 0.0 || b.n + b.lambda * b.lambda > 700.0);
            prop_assert!(b.fidelity <= 1.0);
            let again = (-b.lambda * b.lambda / (1.0 + b.n)).exp() / (1.0 + b.n);
            prop_assert_eq!(b.fidelity, again);
        }

        #[test]
        fn fidelity_monotone(p in params(), xi in 1e-4f64..10.0) {
            prop_assume!(p.n_m > 0.0 || p.alpha > 0.0);
            let b = transfer_fidelity(&p, xi).unwrap();
            let base = b.fidelity;
            prop_assume!(base > 1e-300 && base < 1.0 - 1e-10);
            prop_assert!(transfer_fidelity(&p, xi * 1.01).unwrap().fidelity > base);
            let hot = TransferParams { n_m: p.n_m * 1.1 + 1.0, ..p };
            prop_assert!(transfer_fidelity(&hot, xi).unwrap().fidelity < base);
            // Below this the damping term is lost in the rounding of F.
            if b.lambda * b.lambda / (1.0 + b.n) > 1e-12 {
                let bright = TransferParams { alpha: p.alpha * 1.1 + 0.1, ..p };
                prop_assert!(transfer_fidelity(&bright, xi).unwrap().fidelity < base);
            }
        }
    }
}
