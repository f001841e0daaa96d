//! Maximization of the coupling and the transfer fidelity.
//!
//! The (p, p') search is exhaustive. Grid values are computed in parallel,
//! collected in row-major order and reduced sequentially, so the result does
//! not depend on the number of threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{ln_xi_p0_closed_form, xi_analytic, WaistRatio};
use crate::error::{Error, Result};
use crate::transfer::{transfer_fidelity, TransferParams};

/// Grid limits for (p, p') and the γ bracket for the waist-ratio maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub p_max: u32,
    pub p_prime_max: u32,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
}

impl Default for SearchBounds {
    /// At γ = 0.1 the best p grows by about 5.5 per unit of |l| (p = 56 at
    /// l = 10), so 80 keeps every l ≤ 10 optimum off the grid edge.
    fn default() -> Self {
        Self {
            p_max: 80,
            p_prime_max: 80,
            gamma_lo: 0.01,
            gamma_hi: 10.0,
        }
    }
}

impl SearchBounds {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_lo > 0.0 && self.gamma_lo < self.gamma_hi && self.gamma_hi.is_finite()) {
            return Err(Error::domain(
                "SearchBounds",
                format!("need 0 < gamma_lo < gamma_hi, got [{}, {}]", self.gamma_lo, self.gamma_hi),
            ));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<(u32, u32)> {
        (0..=self.p_max)
            .flat_map(|p| (0..=self.p_prime_max).map(move |pp| (p, pp)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Coupling,
    Fidelity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub l: i32,
    pub best_p: u32,
    pub best_p_prime: u32,
    pub best_gamma: f64,
    /// |ξ| for a coupling search, F for a fidelity search.
    pub objective: f64,
    pub objective_kind: ObjectiveKind,
    /// ξ at the argmax, with its sign.
    pub signed_xi: f64,
    /// The argmax sits on p = p_max or p' = p_prime_max, so the grid may be too small.
    pub boundary_flag: bool,
}

fn xi_grid(l: i32, gamma: WaistRatio, bounds: &SearchBounds) -> (Vec<(u32, u32)>, Vec<f64>) {
    let grid = bounds.grid();
    let values = grid.par_iter().map(|&(p, pp)| xi_analytic(l, p, pp, gamma)).collect();
    (grid, values)
}

/// Index of the first maximum under `better`; earlier entries win ties.
fn first_max<T: Copy>(items: &[T], better: impl Fn(&T, &T) -> bool) -> usize {
    let mut best = 0;
    for (i, v) in items.iter().enumerate().skip(1) {
        if better(v, &items[best]) {
            best = i;
        }
    }
    best
}

fn on_boundary(p: u32, pp: u32, bounds: &SearchBounds) -> bool {
    p == bounds.p_max || pp == bounds.p_prime_max
}

/// Maximum of |ξ_{l p p'}(γ)| over the grid; ties go to the smallest p, then p'.
pub fn max_coupling_over_pp(l: i32, gamma: WaistRatio, bounds: &SearchBounds) -> SearchResult {
    let (grid, xi) = xi_grid(l, gamma, bounds);
    let i = first_max(&xi, |a, b| a.abs() > b.abs());
    let (p, pp) = grid[i];
    SearchResult {
        l,
        best_p: p,
        best_p_prime: pp,
        best_gamma: gamma.get(),
        objective: xi[i].abs(),
        objective_kind: ObjectiveKind::Coupling,
        signed_xi: xi[i],
        boundary_flag: on_boundary(p, pp, bounds),
    }
}

/// Fidelity for a coupling of either sign; a vanishing overlap transfers nothing.
pub fn fidelity_of_xi(params: &TransferParams, xi: f64) -> Result<f64> {
    if xi == 0.0 {
        return Ok(0.0);
    }
    Ok(transfer_fidelity(params, xi.abs())?.fidelity)
}

/// Maximum transfer fidelity over the grid.
///
/// F is increasing in |ξ|, so the argmax is that of [`max_coupling_over_pp`];
/// F ties (e.g. F = 1 for a noiseless transfer) are broken by |ξ| so the two
/// searches agree exactly.
pub fn max_fidelity_over_pp(
    l: i32,
    gamma: WaistRatio,
    params: &TransferParams,
    bounds: &SearchBounds,
) -> Result<SearchResult> {
    params.validate()?;
    let (grid, xi) = xi_grid(l, gamma, bounds);
    let scored = xi
        .iter()
        .map(|&x| fidelity_of_xi(params, x).map(|f| (f, x.abs())))
        .collect::<Result<Vec<_>>>()?;
    let i = first_max(&scored, |a, b| a.0 > b.0 || (a.0 == b.0 && a.1 > b.1));
    let (p, pp) = grid[i];
    Ok(SearchResult {
        l,
        best_p: p,
        best_p_prime: pp,
        best_gamma: gamma.get(),
        objective: scored[i].0,
        objective_kind: ObjectiveKind::Fidelity,
        signed_xi: xi[i],
        boundary_flag: on_boundary(p, pp, bounds),
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of ξ_{l00}(γ) on [gamma_lo, gamma_hi].
///
/// Fails with a bracket error when the maximizer ends within `tol` of an
/// endpoint, i.e. the objective is monotone on the bracket.
pub fn argmax_gamma_numeric(l: i32, bounds: &SearchBounds, tol: f64) -> Result<f64> {
    if l == 0 {
        return Err(Error::domain("argmax_gamma_numeric", "needs |l| >= 1; xi_l00 decreases in gamma for l = 0"));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::domain("argmax_gamma_numeric", format!("tol = {tol} must be positive")));
    }
    bounds.validate()?;
    let f = |g: f64| ln_xi_p0_closed_form(l, WaistRatio::new(g).expect("bracket is positive"));
    let (lo, hi) = (bounds.gamma_lo, bounds.gamma_hi);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    if x - lo <= tol || hi - x <= tol {
        return Err(Error::Bracket { lo, hi });
    }
    Ok(x)
}
