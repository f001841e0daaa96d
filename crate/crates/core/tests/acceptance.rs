//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::f64::consts::PI;
use std::time::Instant;

use oam_memory::coupling::{chi_quadrature, gamma_opt, xi_analytic, xi_p0_closed_form, WaistRatio};
use oam_memory::modes::{mode_norm, ModeGeometry, ModeIndex};
use oam_memory::output::{to_csv, to_json, Dataset, Metadata};
use oam_memory::quadrature::QuadratureConfig;
use oam_memory::search::{argmax_gamma_numeric, max_coupling_over_pp, max_fidelity_over_pp, SearchBounds};
use oam_memory::sweep::{run_sweep, Figure, OutputFormat, SweepSpec};
use oam_memory::transfer::{transfer_fidelity, TransferParams};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// ξ_000(0.1) from the quadrature overlap, frozen.
const XI_000_AT_0_1: f64 = 0.759_890_057_907_490_9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn wr(g: f64) -> WaistRatio {
    WaistRatio::new(g).unwrap()
}

fn caption_params(n_m: f64) -> TransferParams {
    let two_pi = 2.0 * PI;
    TransferParams::new(two_pi * 0.2, 2e18, two_pi * 50e3, two_pi * 50e3, n_m, 1.0).unwrap()
}

fn ac1() -> Outcome {
    let peak = xi_p0_closed_form(1, wr(gamma_opt(1).unwrap()));
    outcome((peak - 0.2364).abs() <= 5e-4, format!("peak xi_100 = {peak:.6}"))
}

fn ac2() -> Outcome {
    let bounds = SearchBounds::default();
    let mut worst = 0.0f64;
    for l in 1..=10 {
        let g = argmax_gamma_numeric(l, &bounds, 1e-9).unwrap();
        worst = worst.max((g - gamma_opt(l).unwrap()).abs());
    }
    outcome(worst <= 1e-4, format!("max |argmax - 2l/(l+1)| = {worst:.2e} over l = 1..10"))
}

fn oracle_gap(l: i32, p: u32, pp: u32, gamma: f64, quad: &QuadratureConfig) -> (f64, f64) {
    let chi = chi_quadrature(ModeIndex::new(l, p), ModeIndex::new(2 * l, pp), gamma.sqrt(), 1.0, quad)
        .unwrap()
        .value;
    let xi = xi_analytic(l, p, pp, wr(gamma));
    ((xi - chi).abs(), 1e-10f64.max(1e-8 * chi.abs()))
}

fn ac3() -> Outcome {
    let quad = QuadratureConfig::default();
    let mut failures = 0;
    let mut worst_ratio = 0.0f64;
    let mut points = 0;
    for gamma in [0.1, 0.5, 1.0, 2.5, 2.0] {
        for l in 0..=6 {
            for p in 0..=5 {
                for pp in 0..=5 {
                    let (gap, tol) = oracle_gap(l, p, pp, gamma, &quad);
                    worst_ratio = worst_ratio.max(gap / tol);
                    failures += usize::from(gap > tol);
                    points += 1;
                }
            }
        }
    }
    // Spread of ξ over γ ∈ {1.999, 2, 2.001} on the same index grid.
    let mut spread = 0.0f64;
    let mut finite = true;
    let mut worst_at = (0, 0, 0);
    for l in 0..=6 {
        for p in 0..=5 {
            for pp in 0..=5 {
                let v: Vec<f64> = [1.999, 2.0, 2.001].iter().map(|&g| xi_analytic(l, p, pp, wr(g))).collect();
                finite &= v.iter().all(|x| x.is_finite());
                let s = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min);
                if s > spread {
                    spread = s;
                    worst_at = (l, p, pp);
                }
            }
        }
    }
    let smooth = finite && spread <= 1e-6;
    outcome(
        failures == 0 && smooth,
        format!(
            "oracle: {failures}/{points} outside tolerance (worst gap/tol {worst_ratio:.2e}); \
             gamma=2 neighbourhood: finite={finite}, max spread {spread:.2e} at (l,p,p')={worst_at:?} (limit 1e-6)"
        ),
    )
}

fn ac4() -> Outcome {
    let quad = QuadratureConfig::default();
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut offenders = std::collections::BTreeSet::new();
    for l in 0..=4i32 {
        for lp in -8..=8i32 {
            if lp.unsigned_abs() == 2 * l.unsigned_abs() {
                continue;
            }
            for (p, pp, wc) in [(0, 0, 1.0), (1, 2, 0.3), (3, 1, 2.0)] {
                let chi = chi_quadrature(ModeIndex::new(l, p), ModeIndex::new(lp, pp), wc, 1.0, &quad).unwrap();
                if chi.value.abs() > 1e-12 {
                    offenders.insert((l, lp));
                }
                worst = worst.max(chi.value.abs());
                count += 1;
            }
        }
    }
    outcome(
        offenders.is_empty(),
        format!("max |chi| = {worst:.2e} over {count} forbidden pairs; nonzero at (l,l') = {offenders:?}"),
    )
}

fn ac5() -> Outcome {
    let quad = QuadratureConfig::default();
    let geoms = [ModeGeometry::optical(3e-5).unwrap(), ModeGeometry::acoustic(1.0).unwrap()];
    let mut worst = 0.0f64;
    for l in -6..=6 {
        for p in 0..=5 {
            for g in &geoms {
                let n = mode_norm(ModeIndex::new(l, p), g, &quad).unwrap().value;
                worst = worst.max((n - 1.0).abs());
            }
        }
    }
    outcome(worst <= 1e-10, format!("max |norm - 1| = {worst:.2e}"))
}

fn spec(figure: Figure, l_values: Vec<i32>, bounds: SearchBounds, transfer: Option<TransferParams>) -> SweepSpec {
    SweepSpec {
        figure,
        l_values,
        gamma: wr(0.1),
        bounds,
        transfer,
        output_format: OutputFormat::Csv,
    }
}

fn ac6() -> Outcome {
    let rows = run_sweep(&spec(Figure::Fig2, (0..=9).collect(), SearchBounds::default(), None)).unwrap();
    let decreasing = rows.windows(2).all(|w| w[1].xi < w[0].xi);
    let xi0 = rows[0].xi;
    let ratio = rows[6].xi / xi0;
    let anchored = (xi0 - XI_000_AT_0_1).abs() <= 1e-10;
    outcome(
        decreasing && anchored && ratio < 1e-4,
        format!("strictly decreasing={decreasing}, xi(l=0)={xi0:.10}, xi(6)/xi(0)={ratio:.3e}"),
    )
}

fn ac7() -> Outcome {
    let r = max_coupling_over_pp(6, wr(0.1), &SearchBounds::default());
    let threshold = 0.1 * XI_000_AT_0_1;
    outcome(
        r.objective >= threshold && !r.boundary_flag,
        format!(
            "l=6 best (p,p')=({},{}) |xi|={:.6} vs threshold {threshold:.6}, boundary flag={}",
            r.best_p, r.best_p_prime, r.objective, r.boundary_flag
        ),
    )
}

fn random_params(rng: &mut StdRng) -> TransferParams {
    let two_pi = 2.0 * PI;
    let log_uniform = |rng: &mut StdRng, lo: f64, hi: f64| (rng.gen_range(lo.ln()..hi.ln())).exp();
    TransferParams::new(
        two_pi * log_uniform(rng, 0.1, 1.0),
        log_uniform(rng, 1e17, 1e19),
        two_pi * log_uniform(rng, 1e3, 1e5),
        two_pi * log_uniform(rng, 1e3, 1e5),
        rng.gen_range(0.0..1e4),
        rng.gen_range(0.1..3.0),
    )
    .unwrap()
}

fn ac8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut out_of_range = 0;
    for _ in 0..10_000 {
        let params = random_params(&mut rng);
        let xi = (rng.gen_range(1e-2f64.ln()..0f64)).exp();
        let f = transfer_fidelity(&params, xi).unwrap().fidelity;
        out_of_range += usize::from(!(f > 0.0 && f <= 1.0));
    }
    let mut not_increasing = 0;
    for _ in 0..1_000 {
        let params = random_params(&mut rng);
        let xi = (rng.gen_range(1e-2f64.ln()..0f64)).exp();
        let lo = transfer_fidelity(&params, xi).unwrap().fidelity;
        let hi = transfer_fidelity(&params, xi * 1.01).unwrap().fidelity;
        not_increasing += usize::from(hi <= lo);
    }
    let infidelity = 1.0 - transfer_fidelity(&caption_params(0.0), 0.19).unwrap().fidelity;
    let caption_ok = infidelity > 0.0 && infidelity < 1e-5;

    let bounds = SearchBounds {
        p_max: 40,
        p_prime_max: 40,
        ..Default::default()
    };
    let params = caption_params(100.0);
    let mut mismatches = 0;
    for l in 0..=6 {
        let c = max_coupling_over_pp(l, wr(0.1), &bounds);
        let f = max_fidelity_over_pp(l, wr(0.1), &params, &bounds).unwrap();
        mismatches += usize::from((c.best_p, c.best_p_prime) != (f.best_p, f.best_p_prime));
    }
    outcome(
        out_of_range == 0 && not_increasing == 0 && caption_ok && mismatches == 0,
        format!(
            "F outside (0,1]: {out_of_range}/10000; non-increasing: {not_increasing}/1000; \
             1-F(xi=0.19, N_m=0) = {infidelity:.2e}; argmax mismatches: {mismatches}/7"
        ),
    )
}

fn render(s: &SweepSpec) -> (String, String) {
    let rows = run_sweep(s).unwrap();
    let ds = Dataset {
        metadata: Metadata::new(s, "acceptance".into()),
        rows: rows.clone(),
    };
    (to_csv(&rows).unwrap(), to_json(&ds).unwrap())
}

fn ac9() -> Outcome {
    let bounds = SearchBounds {
        p_max: 12,
        p_prime_max: 12,
        ..Default::default()
    };
    let mut differing = Vec::new();
    for figure in Figure::ALL {
        let transfer = figure.needs_transfer().then(|| caption_params(100.0));
        let s = spec(figure, figure.default_l_values(), bounds, transfer);
        if render(&s) != render(&s) {
            differing.push(figure.name());
        }
    }
    outcome(differing.is_empty(), format!("figures with differing output: {differing:?}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{name} {verdict} {} ({:.2} s)", o.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
}
