//! Closed-form ξ_{l p p'}.
//!
//! With L = |l|, a = 1 − γ/2, b = 1 + γ/2 the overlap is a k-sum over
//! terminating ₂F₁[−p', −2k; −p'−2k−2L; (b/a)²]. Applying the linear
//! transformation of a terminating ₂F₁ to the argument 1 − (b/a)² = −2γ/a²
//! and absorbing a^{2k+p'} into every term gives
//!
//! ```text
//! ξ = (1+δ_0l)/sqrt(1+δ_{0,2l}) · sqrt((2L+p')!/(π p'!)) / (2L)! · 4^{−p} · γ^L · b^{−(2L+1)}
//!     · Σ_{k=0}^{p} Σ_{n=0}^{min(p',2k)} K_{kn} (−2γ)^n a^{2k+p'−2n} b^{−(2k+p')}
//!
//! K_{kn} = C(2p−2k, p−k) (2k+2L)! / (k! (L+k)!) · C(p', n) (2k)! / ((2k−n)! (2L+1)_n)
//! ```
//!
//! a polynomial in a and b that stays finite at γ = 2. The terms alternate in
//! sign and cancel heavily for small γ and large p, p', so they are generated
//! by exact rational ratio recurrences and summed in double-double with a
//! separate binary exponent.

use std::f64::consts::{LN_2, PI};

use twofloat::TwoFloat;

use super::laguerre_rule::xi_by_rule;
use super::{ln_zero_l_weight, WaistRatio};
use crate::error::{Error, Result};
use crate::specfun::{binomial, hyp2f1_terminating, ln_factorial, TerminatingHypArgs};

/// ξ together with a bound on its rounding error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiEvaluation {
    pub value: f64,
    pub abs_error: f64,
}

/// Double-double mantissa with an extra power-of-two exponent.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    m: TwoFloat,
    e: i32,
}

fn pow2(e: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((1023 + e) as u64) << 52)
}

impl Scaled {
    const ONE: Scaled = Scaled {
        m: TwoFloat::from_f64(1.0),
        e: 0,
    };

    fn new(m: TwoFloat) -> Self {
        Scaled { m, e: 0 }.normalized()
    }

    fn normalized(self) -> Self {
        let hi = self.m.hi();
        if hi == 0.0 || !hi.is_finite() {
            return self;
        }
        let ex = ((hi.to_bits() >> 52) & 0x7ff) as i32 - 1023;
        if ex == 0 {
            return self;
        }
        Scaled {
            m: self.m * pow2(-ex),
            e: self.e + ex,
        }
    }

    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled {
            m: self.m * rhs.m,
            e: self.e + rhs.e,
        }
        .normalized()
    }

    fn mul_dd(self, rhs: TwoFloat) -> Scaled {
        Scaled {
            m: self.m * rhs,
            e: self.e,
        }
        .normalized()
    }

    fn is_zero(&self) -> bool {
        self.m.hi() == 0.0
    }
}

fn powers(base: Scaled, count: usize) -> Vec<Scaled> {
    let mut out = Vec::with_capacity(count + 1);
    let mut cur = Scaled::ONE;
    out.push(cur);
    for _ in 0..count {
        cur = cur.mul(base);
        out.push(cur);
    }
    out
}

fn ratio(num: f64, den: f64) -> TwoFloat {
    TwoFloat::new_div(num, den)
}

/// log of the common prefactor with K_{00} = C(2p, p)(2L)!/L! folded in,
/// and the sum of the magnitudes of its parts (for the rounding bound).
fn ln_prefactor(l: i32, p: u32, pp: u32, gamma: f64) -> (f64, f64) {
    let big_l = l.unsigned_abs();
    let lf = f64::from(big_l);
    let parts = [
        ln_zero_l_weight(l),
        0.5 * ln_factorial(2 * big_l + pp),
        -0.5 * PI.ln(),
        -0.5 * ln_factorial(pp),
        -f64::from(p) * 4f64.ln(),
        lf * gamma.ln(),
        -(2.0 * lf + 1.0) * (0.5 * gamma).ln_1p(),
        ln_factorial(2 * p),
        -2.0 * ln_factorial(p),
        -ln_factorial(big_l),
    ];
    (parts.iter().sum(), parts.iter().map(|x| x.abs()).sum())
}

/// Evaluates ξ_{l p p'}(γ) and bounds its rounding error.
///
/// Low orders use the double-double series, high orders the exact
/// Gauss-Laguerre sum, whose bound does not grow with the cancellation in the
/// series. A low-order series result with a bound above 1e-12 relative is
/// compared against the Gauss-Laguerre sum and the tighter one returned.
pub fn xi_analytic_with_error(l: i32, p: u32, p_prime: u32, gamma: WaistRatio) -> XiEvaluation {
    let g = gamma.get();
    if 2 * p + p_prime > SERIES_MAX_DEGREE {
        return xi_by_rule(l, p, p_prime, g);
    }
    let series = xi_series(l, p, p_prime, g);
    if series.abs_error <= 1e-12 * series.value.abs() {
        return series;
    }
    let by_rule = xi_by_rule(l, p, p_prime, g);
    if by_rule.abs_error < series.abs_error {
        by_rule
    } else {
        series
    }
}

/// Largest 2p + p' for which the series is tried first.
const SERIES_MAX_DEGREE: u32 = 24;

fn xi_series(l: i32, p: u32, p_prime: u32, g: f64) -> XiEvaluation {
    let big_l = f64::from(l.unsigned_abs());
    let (pf, ppf) = (f64::from(p), f64::from(p_prime));

    let a = TwoFloat::new_sub(1.0, 0.5 * g);
    let inv_b = TwoFloat::from(1.0) / TwoFloat::new_add(1.0, 0.5 * g);
    let max_pow = (2 * p + p_prime) as usize;
    let a_pow = powers(Scaled::new(a), max_pow);
    let inv_b_pow = powers(Scaled::new(inv_b), max_pow);
    let g_pow = powers(Scaled::new(TwoFloat::from(-2.0 * g)), p_prime.min(2 * p) as usize);

    let mut terms: Vec<Scaled> = Vec::new();
    let mut outer = Scaled::ONE;
    for k in 0..=p {
        let kf = f64::from(k);
        if k > 0 {
            // K_{k,0}/K_{k−1,0}, all factors exact integers in f64
            let km = kf - 1.0;
            let num = (pf - km) * (2.0 * km + 2.0 * big_l + 1.0) * (2.0 * km + 2.0 * big_l + 2.0);
            let den = 2.0 * (2.0 * pf - 2.0 * km - 1.0) * kf * (big_l + kf);
            outer = outer.mul_dd(ratio(num, den));
        }
        let b_part = inv_b_pow[(2 * k + p_prime) as usize];
        let mut inner = outer;
        for n in 0..=p_prime.min(2 * k) {
            let nf = f64::from(n);
            if n > 0 {
                let num = (ppf - nf + 1.0) * (2.0 * kf - nf + 1.0);
                let den = nf * (2.0 * big_l + nf);
                inner = inner.mul_dd(ratio(num, den));
            }
            let a_exp = (2 * k + p_prime - 2 * n) as usize;
            let term = inner.mul(g_pow[n as usize]).mul(a_pow[a_exp]).mul(b_part);
            if !term.is_zero() {
                terms.push(term);
            }
        }
    }

    let Some(max_e) = terms.iter().map(|t| t.e).max() else {
        return XiEvaluation {
            value: 0.0,
            abs_error: 0.0,
        };
    };
    let mut sum = TwoFloat::from(0.0);
    let mut abs_sum = 0.0;
    for t in &terms {
        let shift = t.e - max_e;
        if shift < -1000 {
            continue;
        }
        let v = t.m * pow2(shift);
        abs_sum += v.hi().abs();
        sum += v;
    }

    let (ln_pre, ln_pre_mag) = ln_prefactor(l, p, p_prime, g);
    let ln_scale = ln_pre + f64::from(max_e) * LN_2;
    let scale = ln_scale.exp();
    let value = scale * (sum.hi() + sum.lo());
    // Each term passes through at most ~4(p + p') + 16 double-double roundings.
    let ops = 4.0 * (pf + ppf) + 16.0;
    let dd_eps = 2f64.powi(-104);
    let abs_error = scale * abs_sum * ops * dd_eps
        + value.abs() * (ln_pre_mag + f64::from(max_e.abs()) + 8.0) * f64::EPSILON;
    XiEvaluation { value, abs_error }
}

/// Analytic ξ_{l p p'}(γ); depends on l only through |l|.
pub fn xi_analytic(l: i32, p: u32, p_prime: u32, gamma: WaistRatio) -> f64 {
    xi_analytic_with_error(l, p, p_prime, gamma).value
}

/// ξ from the untransformed k-sum with ₂F₁[−p', −2k; −p'−2k−2L; ((1+γ/2)/(1−γ/2))²],
/// evaluated term by term in f64 log space with sign tracking.
///
/// Loses accuracy quickly once p' grows at small γ (the ₂F₁ terms cancel);
/// kept as a cross-check of [`xi_analytic`] for small indices. Undefined at γ = 2.
pub fn xi_hypergeometric_series(l: i32, p: u32, p_prime: u32, gamma: WaistRatio) -> Result<f64> {
    let g = gamma.get();
    let a = 1.0 - 0.5 * g;
    let b = 1.0 + 0.5 * g;
    if a == 0.0 {
        return Err(Error::domain("xi_hypergeometric_series", "hypergeometric argument diverges at gamma = 2"));
    }
    let big_l = l.unsigned_abs();
    let lf = f64::from(big_l);
    let z = (b / a).powi(2);
    let ln_pre = ln_factorial(p) - ln_factorial(big_l + p)
        + 0.5 * (ln_factorial(p_prime) - PI.ln() - ln_factorial(2 * big_l + p_prime))
        + ln_factorial(p + big_l)
        - 2.0 * f64::from(p) * LN_2
        - ln_factorial(p)
        + ln_zero_l_weight(l)
        + lf * g.ln();
    let mut sum = 0.0;
    for k in 0..=p {
        let power = 2 * k + p_prime;
        let ln_term = binomial(u64::from(2 * p - 2 * k), u64::from(p - k))?.ln()
            + ln_factorial(p_prime + 2 * k + 2 * big_l)
            - ln_factorial(k)
            - ln_factorial(p_prime)
            - ln_factorial(big_l + k)
            + f64::from(power) * a.abs().ln()
            - (f64::from(power) + 2.0 * lf + 1.0) * b.ln();
        let sign = if a < 0.0 && power % 2 == 1 { -1.0 } else { 1.0 };
        // A zero numerator parameter leaves only the leading term.
        let hyp = if p_prime == 0 || k == 0 {
            1.0
        } else {
            hyp2f1_terminating(&TerminatingHypArgs::new(
                p_prime,
                2 * k,
                p_prime + 2 * k + 2 * big_l,
                z,
            )?)
        };
        sum += sign * (ln_term + ln_pre).exp() * hyp;
    }
    Ok(sum)
}
