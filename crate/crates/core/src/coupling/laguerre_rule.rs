//! ξ as an exact generalized Gauss-Laguerre sum.
//!
//! In x = 2r²/w_c² the radial overlap is
//!
//! ```text
//! ∫₀^∞ x^{2L} L_p^L(x)² L_{p'}^{2L}(γx) e^{−(1+γ/2)x} dx
//! ```
//!
//! a polynomial of degree 2p + p' against x^{2L} e^{−bx}. After y = bx an
//! N-node rule for the weight y^{2L} e^{−y} with 2N − 1 ≥ 2p + p' integrates it
//! exactly. The terms are products of bounded mode values with positive
//! weights, so the sum does not suffer the cancellation of the explicit series
//! at large p, p'.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::laguerre::GaussLaguerre;
use twofloat::TwoFloat;

use super::{ln_zero_l_weight, XiEvaluation};
use crate::specfun::ln_factorial;

const RESCALE: f64 = 1e200;

/// L_n^α(x) divided by e^{ln_scale}.
#[derive(Debug, Clone, Copy)]
struct ScaledValue {
    value: f64,
    ln_scale: f64,
}

fn laguerre_scaled(n: u32, alpha: f64, x: f64) -> ScaledValue {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut ln_scale = 0.0;
    for k in 0..n {
        let kf = f64::from(k);
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            ln_scale += RESCALE.ln();
        }
    }
    ScaledValue { value: cur, ln_scale }
}

/// Double-double L_n^α and L_{n−1}^α, in the spirit of [`laguerre_scaled`], used to place nodes; the weight
/// formula amplifies node errors by roughly the node count.
fn laguerre_pair_dd(n: u32, alpha: f64, x: TwoFloat) -> (TwoFloat, TwoFloat, f64) {
    let mut prev = TwoFloat::from(0.0);
    let mut cur = TwoFloat::from(1.0);
    let mut ln_scale = 0.0;
    for k in 0..n {
        let kf = f64::from(k);
        let next = ((-x + (2.0 * kf + 1.0 + alpha)) * cur - prev * (kf + alpha)) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.hi().abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            ln_scale += RESCALE.ln();
        }
    }
    (cur, prev, ln_scale)
}

/// Nodes and log-weights for ∫ y^α e^{−y} f(y) dy.
#[derive(Debug)]
struct Rule {
    nodes: Vec<f64>,
    ln_weights: Vec<f64>,
}

impl Rule {
    /// Golub-Welsch nodes polished by Newton steps; weights recomputed as
    /// Γ(N+α) x / (N! (N+α) L_{N−1}^α(x)²), which keeps relative accuracy in the tail.
    fn build(n: u32, alpha: u32) -> Rule {
        let af = f64::from(alpha);
        let nf = f64::from(n);
        let seed = GaussLaguerre::new(
            NonZeroUsize::new(n as usize).expect("rule size is positive"),
            af.try_into().expect("alpha is finite and non-negative"),
        );
        let ln_const = ln_factorial(n + alpha - 1) - ln_factorial(n) - (nf + af).ln();
        let mut nodes = Vec::with_capacity(n as usize);
        let mut ln_weights = Vec::with_capacity(n as usize);
        for &(x0, _) in seed.as_node_weight_pairs() {
            let mut x = TwoFloat::from(x0);
            for _ in 0..20 {
                let (cur, prev, _) = laguerre_pair_dd(n, af, x);
                let deriv = (cur * nf - prev * (nf + af)) / x;
                let dx = cur / deriv;
                x -= dx;
                if dx.hi().abs() <= 1e-20 * x.hi().abs() {
                    break;
                }
            }
            let (_, prev, ln_scale) = laguerre_pair_dd(n, af, x);
            let ln_prev = prev.hi().abs().ln() + (prev.lo() / prev.hi()).ln_1p() + ln_scale;
            nodes.push(x.hi());
            ln_weights.push(ln_const + x.hi().ln() + (x.lo() / x.hi()).ln_1p() - 2.0 * ln_prev);
        }
        Rule { nodes, ln_weights }
    }
}

type RuleCache = Mutex<HashMap<(u32, u32), Arc<Rule>>>;

fn rule(n: u32, alpha: u32) -> Arc<Rule> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache poisoned").get(&(n, alpha)) {
        return Arc::clone(r);
    }
    let built = Arc::new(Rule::build(n, alpha));
    let mut guard = cache.lock().expect("rule cache poisoned");
    Arc::clone(guard.entry((n, alpha)).or_insert(built))
}

/// ξ_{l p p'}(γ) from the exact Gauss-Laguerre sum, with a rounding bound.
pub(crate) fn xi_by_rule(l: i32, p: u32, pp: u32, gamma: f64) -> XiEvaluation {
    xi_by_rule_n(l, p, pp, gamma, p + pp / 2 + 1)
}

fn xi_by_rule_n(l: i32, p: u32, pp: u32, gamma: f64, n: u32) -> XiEvaluation {
    let big_l = l.unsigned_abs();
    let lf = f64::from(big_l);
    let b = 1.0 + 0.5 * gamma;
    let r = rule(n, 2 * big_l);

    // angular integral, the two normalizations, γ^L from the acoustic power
    // and the Jacobians of r → x → y; ln_zero_l_weight carries the l = 0 cases.
    let parts = [
        ln_zero_l_weight(l),
        (PI / 2.0).ln(),
        4f64.ln() + ln_factorial(p) - PI.ln() - ln_factorial(big_l + p),
        0.5 * (4f64.ln() + ln_factorial(pp) - PI.ln() - ln_factorial(2 * big_l + pp)),
        lf * gamma.ln(),
        -4f64.ln(),
        -(2.0 * lf + 1.0) * b.ln(),
    ];
    let ln_pre: f64 = parts.iter().sum();
    let ln_pre_mag: f64 = parts.iter().map(|x| x.abs()).sum();

    let mut sum = TwoFloat::from(0.0);
    let mut abs_sum = 0.0;
    let mut log_mag = 0.0f64;
    for (&y, &ln_w) in r.nodes.iter().zip(&r.ln_weights) {
        let opt = laguerre_scaled(p, lf, y / b);
        let ac = laguerre_scaled(pp, 2.0 * lf, gamma * y / b);
        if opt.value == 0.0 || ac.value == 0.0 {
            continue;
        }
        let ln_t = ln_w + 2.0 * (opt.value.abs().ln() + opt.ln_scale) + ac.value.abs().ln() + ac.ln_scale + ln_pre;
        let t = ln_t.exp().copysign(ac.value);
        sum += t;
        abs_sum += t.abs();
        log_mag = log_mag.max(ln_t.abs() + ln_w.abs());
    }
    let value = sum.hi() + sum.lo();
    let ops = 4.0 * f64::from(2 * p + pp + n) + 16.0;
    let abs_error = abs_sum * (ops + ln_pre_mag + log_mag) * f64::EPSILON;
    XiEvaluation { value, abs_error }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_moments() {
        // ∫ y^{α+k} e^{−y} dy = (α+k)!
        for (n, alpha) in [(1, 0), (5, 2), (30, 12), (90, 0), (90, 40), (226, 0)] {
            let r = rule(n, alpha);
            for k in [0, 1, 2 * n - 1] {
                let ln_exact = ln_factorial(alpha + k);
                let got: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.ln_weights)
                    .map(|(&y, &lw)| (lw + f64::from(k) * y.ln() - ln_exact).exp())
                    .sum();
                assert!((got - 1.0).abs() < 1e-12, "n={n} alpha={alpha} k={k}: {got}");
            }
        }
    }

    #[test]
    fn fundamental_mode_matches_closed_form() {
        // single node at y = 2L + 1 with weight (2L)!
        let want = (2.0 / PI).sqrt() / 3.375;
        let got = xi_by_rule(1, 0, 0, 1.0);
        assert!((got.value - want).abs() < 1e-15, "{got:?}");
    }

    #[test]
    fn rescaled_laguerre_keeps_its_value() {
        // ln|L_150^20(1500)| from a 50-digit reference
        let s = laguerre_scaled(150, 20.0, 1500.0);
        let got = s.value.abs().ln() + s.ln_scale;
        assert!((got - 472.739_178_509_349_92).abs() < 1e-12, "{got}");
        let (dd, _, ln_scale) = laguerre_pair_dd(150, 20.0, TwoFloat::from(1500.0));
        assert!((dd.hi().abs().ln() + ln_scale - got).abs() < 1e-12);
    }
}
