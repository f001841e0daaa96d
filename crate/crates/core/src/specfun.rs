//! Special-function kernel used by the mode and coupling formulas.
//!
//! Everything here is real-valued and restricted to the arguments the
//! overlap formulas actually need: positive arguments for `ln Γ`,
//! integer binomials, associated Laguerre polynomials with integer order
//! and terminating Gauss hypergeometric sums whose three parameters are
//! non-positive integers.

use twofloat::TwoFloat;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_8;

/// ζ(k) for k = 2..=30.
const ZETA: [f64; 29] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_370_0,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307_0,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265_0,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_925_97,
    1.000_000_059_608_189_05,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
    1.000_000_003_725_334_0,
    1.000_000_001_862_659_7,
    1.000_000_000_931_327_4,
];

/// B_{2k} / (2k (2k - 1)) for k = 1..=8, the Stirling correction coefficients.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// ln Γ(1 + ε) = −γε + Σ_{k≥2} ζ(k)(−ε)^k / k, for |ε| ≤ 1/4.
fn ln_gamma_1p_series(eps: f64) -> f64 {
    let mut sum = -EULER_GAMMA * eps;
    let mut pow = -eps;
    for (i, zeta) in ZETA.iter().enumerate() {
        let k = (i + 2) as f64;
        pow *= -eps;
        sum += zeta * pow / k;
    }
    sum
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    for c in STIRLING.iter().rev() {
        corr = corr * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr * inv
}

/// Natural log of the Gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::domain("ln_gamma", format!("x = {x} must be finite and > 0")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    if (x - 1.0).abs() <= 0.25 {
        return ln_gamma_1p_series(x - 1.0);
    }
    if (x - 2.0).abs() <= 0.25 {
        let eps = x - 2.0;
        return eps.ln_1p() + ln_gamma_1p_series(eps);
    }
    if x >= 10.0 {
        return ln_gamma_stirling(x);
    }
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < 10.0 {
        prod *= shifted;
        shifted += 1.0;
    }
    ln_gamma_stirling(shifted) - prod.ln()
}

/// ln(n!) for a non-negative integer.
pub fn ln_factorial(n: u32) -> f64 {
    ln_gamma_pos(f64::from(n) + 1.0)
}

/// Binomial coefficient C(n, k) as a float.
///
/// Exact for `n ≤ 60` (integer arithmetic); a running product of the
/// ratios (n − i)/(i + 1) beyond that, which is monotone so it overflows
/// only when the result itself does.
pub fn binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::domain("binomial", format!("k = {k} exceeds n = {n}")));
    }
    let k = k.min(n - k);
    if n <= 60 {
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * u128::from(n - i) / u128::from(i + 1);
        }
        return Ok(acc as f64);
    }
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc *= (n - i) as f64 / (i + 1) as f64;
    }
    Ok(acc)
}

/// Associated Laguerre polynomial L_p^a(x) by upward recurrence in `p`.
pub fn assoc_laguerre(p: u32, a: u32, x: f64) -> f64 {
    let a = f64::from(a);
    let mut prev = 1.0;
    if p == 0 {
        return prev;
    }
    let mut cur = a + 1.0 - x;
    for n in 1..p {
        let n = f64::from(n);
        let next = ((2.0 * n + a + 1.0 - x) * cur - (n + a) * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Arguments of a terminating ₂F₁(−a, −b; −c; z) with non-negative integers
/// `a`, `b` and a positive integer `c`.
///
/// The series has `min(a, b) + 1` terms; `c ≥ max(a, b)` keeps every
/// denominator Pochhammer symbol in that range non-zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminatingHypArgs {
    a_neg: u32,
    b_neg: u32,
    c_neg: u32,
    z: f64,
}

impl TerminatingHypArgs {
    pub fn new(a_neg: u32, b_neg: u32, c_neg: u32, z: f64) -> Result<Self> {
        if c_neg == 0 || c_neg < a_neg || c_neg < b_neg {
            return Err(Error::domain(
                "hyp2f1_terminating",
                format!("c = -{c_neg} must satisfy c_neg >= max(a_neg = {a_neg}, b_neg = {b_neg}) and c_neg > 0"),
            ));
        }
        if !z.is_finite() {
            return Err(Error::domain("hyp2f1_terminating", "z must be finite"));
        }
        Ok(Self {
            a_neg,
            b_neg,
            c_neg,
            z,
        })
    }

    pub fn a_neg(&self) -> u32 {
        self.a_neg
    }

    pub fn b_neg(&self) -> u32 {
        self.b_neg
    }

    pub fn c_neg(&self) -> u32 {
        self.c_neg
    }

    pub fn z(&self) -> f64 {
        self.z
    }
}

/// Terminating Gauss hypergeometric sum, term by term with the ratio
/// t_{n+1}/t_n = (n − a)(n − b) / ((n − c)(n + 1)) · z.
///
/// Terms and partial sums are carried in double-double so that alternating
/// series keep full f64 accuracy in the result.
pub fn hyp2f1_terminating(args: &TerminatingHypArgs) -> f64 {
    let (a, b, c) = (
        i64::from(args.a_neg),
        i64::from(args.b_neg),
        i64::from(args.c_neg),
    );
    let last = i64::from(args.a_neg.min(args.b_neg));
    let mut term = TwoFloat::from(1.0);
    let mut sum = term;
    for n in 0..last {
        // Both integer products are exact in f64 for the orders used here.
        let num = ((n - a) * (n - b)) as f64;
        let den = ((n - c) * (n + 1)) as f64;
        term = term * num / den * args.z;
        sum += term;
    }
    sum.hi() + sum.lo()
}
