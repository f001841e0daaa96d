//! Plot-ready datasets for the coupling and fidelity figures.
//!
//! | figure | rows |
//! |--------|------|
//! | fig2   | ξ_{l00}(γ) for each l |
//! | fig3   | ξ_{lpp'}(γ) on the full (p, p') grid for each l |
//! | fig4a  | max over (p, p') of \|ξ\| for each l |
//! | fig4b  | max over (p, p') of F for each l |
//! | fig5   | F at (0, 0) and at the best (p, p') for each l, labelled by a `curve=` flag |
//!
//! Rows come out ordered by (l, p, p').

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{xi_analytic, WaistRatio};
use crate::error::{Error, Result};
use crate::search::{max_coupling_over_pp, max_fidelity_over_pp, SearchBounds, SearchResult};
use crate::transfer::{transfer_fidelity, TransferParams};

pub const FLAG_BOUNDARY: &str = "boundary-argmax";
pub const FLAG_CURVE_FUNDAMENTAL: &str = "curve=fundamental";
pub const FLAG_CURVE_BEST: &str = "curve=max-over-pp";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 5] = [Figure::Fig2, Figure::Fig3, Figure::Fig4a, Figure::Fig4b, Figure::Fig5];

    pub fn needs_transfer(self) -> bool {
        matches!(self, Figure::Fig4b | Figure::Fig5)
    }

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig5 => "fig5",
        }
    }

    /// l values used when the caller gives none: 0..=9, or {0, 1, 3, 6} for fig3.
    pub fn default_l_values(self) -> Vec<i32> {
        match self {
            Figure::Fig3 => vec![0, 1, 3, 6],
            _ => (0..=9).collect(),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown figure `{s}` (expected fig2, fig3, fig4a, fig4b or fig5)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub figure: Figure,
    pub l_values: Vec<i32>,
    pub gamma: WaistRatio,
    pub bounds: SearchBounds,
    pub transfer: Option<TransferParams>,
    pub output_format: OutputFormat,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        match (self.figure.needs_transfer(), &self.transfer) {
            (true, None) => return Err(Error::Sweep(format!("{} needs transfer parameters", self.figure))),
            (false, Some(_)) => {
                return Err(Error::Sweep(format!("{} takes no transfer parameters", self.figure)))
            }
            (true, Some(t)) => t.validate()?,
            (false, None) => {}
        }
        if self.l_values.is_empty() {
            return Err(Error::Sweep("no l values requested".into()));
        }
        self.bounds.validate()
    }

    fn sorted_l(&self) -> Vec<i32> {
        let mut ls = self.l_values.clone();
        ls.sort_unstable();
        ls.dedup();
        ls
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub l: i32,
    pub p: u32,
    pub p_prime: u32,
    pub gamma: f64,
    pub xi: f64,
    pub n: Option<f64>,
    pub lambda: Option<f64>,
    pub fidelity: Option<f64>,
    pub flags: Vec<String>,
}

impl DatasetRow {
    fn coupling(l: i32, p: u32, p_prime: u32, gamma: WaistRatio, xi: f64) -> Self {
        DatasetRow {
            l,
            p,
            p_prime,
            gamma: gamma.get(),
            xi,
            n: None,
            lambda: None,
            fidelity: None,
            flags: Vec::new(),
        }
    }

    fn with_fidelity(mut self, params: &TransferParams) -> Result<Self> {
        let b = transfer_fidelity(params, self.xi.abs())?;
        self.n = Some(b.n);
        self.lambda = Some(b.lambda);
        self.fidelity = Some(b.fidelity);
        Ok(self)
    }

    fn from_search(r: &SearchResult) -> Self {
        let mut row = DatasetRow::coupling(r.l, r.best_p, r.best_p_prime, WaistRatio::new(r.best_gamma).expect("search gamma is valid"), r.signed_xi);
        if r.boundary_flag {
            row.flags.push(FLAG_BOUNDARY.to_string());
        }
        row
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<DatasetRow>> {
    spec.validate()?;
    let ls = spec.sorted_l();
    let g = spec.gamma;
    let b = &spec.bounds;
    let transfer = spec.transfer.as_ref();
    match spec.figure {
        Figure::Fig2 => Ok(ls
            .iter()
            .map(|&l| DatasetRow::coupling(l, 0, 0, g, xi_analytic(l, 0, 0, g)))
            .collect()),
        Figure::Fig3 => {
            let points: Vec<(i32, u32, u32)> = ls
                .iter()
                .flat_map(|&l| (0..=b.p_max).flat_map(move |p| (0..=b.p_prime_max).map(move |pp| (l, p, pp))))
                .collect();
            Ok(points
                .par_iter()
                .map(|&(l, p, pp)| DatasetRow::coupling(l, p, pp, g, xi_analytic(l, p, pp, g)))
                .collect())
        }
        Figure::Fig4a => Ok(ls
            .iter()
            .map(|&l| DatasetRow::from_search(&max_coupling_over_pp(l, g, b)))
            .collect()),
        Figure::Fig4b => {
            let t = transfer.expect("validated");
            ls.iter()
                .map(|&l| DatasetRow::from_search(&max_fidelity_over_pp(l, g, t, b)?).with_fidelity(t))
                .collect()
        }
        Figure::Fig5 => {
            let t = transfer.expect("validated");
            let mut rows = Vec::with_capacity(2 * ls.len());
            for &l in &ls {
                let mut base = DatasetRow::coupling(l, 0, 0, g, xi_analytic(l, 0, 0, g)).with_fidelity(t)?;
                base.flags.push(FLAG_CURVE_FUNDAMENTAL.to_string());
                let mut best = DatasetRow::from_search(&max_fidelity_over_pp(l, g, t, b)?).with_fidelity(t)?;
                best.flags.insert(0, FLAG_CURVE_BEST.to_string());
                rows.push(base);
                rows.push(best);
            }
            Ok(rows)
        }
    }
}
