use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use oam_memory::config::{load_config_with_preset, Config, ConfigError, Preset, CONFIG_ENV};
use oam_memory::coupling::{chi_quadrature, gamma_opt, xi_analytic_with_error, xi_p0_closed_form, WaistRatio};
use oam_memory::error::Error;
use oam_memory::modes::ModeIndex;
use oam_memory::output::{format_float, to_csv, to_json, Dataset, Metadata};
use oam_memory::search::{argmax_gamma_numeric, max_coupling_over_pp, max_fidelity_over_pp, SearchBounds, SearchResult};
use oam_memory::sweep::{run_sweep, Figure, OutputFormat, SweepSpec};
use oam_memory::transfer::{bose_occupation, transfer_fidelity, TransferParams};

const EXIT_OTHER: u8 = 1;
const EXIT_ARGUMENT: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_CONVERGENCE: u8 = 4;

#[derive(Debug)]
enum Failure {
    Argument(String),
    Config(String),
    Convergence(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Argument(_) => EXIT_ARGUMENT,
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Convergence(_) => EXIT_CONVERGENCE,
            Failure::Io(_) => EXIT_OTHER,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Argument(m) | Failure::Config(m) | Failure::Convergence(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Convergence { .. } => Failure::Convergence(e.to_string()),
            _ => Failure::Argument(e.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(name = "oam-memory", version, about = "Optoacoustic coupling of LG cavity modes to mirror surface acoustic modes")]
struct Cli {
    /// Flat key = value config file.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    /// Parameter preset, applied before the config file's own keys.
    #[arg(long, global = true, value_enum)]
    preset: Option<PresetArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PresetArg {
    Fig5Caption,
    BodyText,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic coupling ξ for optical (l, p) and acoustic (2l, p').
    Xi {
        #[arg(long, allow_negative_numbers = true)]
        l: i32,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        pp: u32,
        /// Waist ratio (w_c/w_a)^2; the config value when omitted.
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        /// Also integrate the overlap numerically and report the difference.
        #[arg(long)]
        verify: bool,
    },
    /// Overlap integral χ by quadrature for arbitrary optical and acoustic modes.
    ChiOracle {
        #[arg(long, allow_negative_numbers = true)]
        l: i32,
        #[arg(long)]
        p: u32,
        #[arg(long, allow_negative_numbers = true)]
        l_prime: i32,
        #[arg(long)]
        p_prime: u32,
        /// Optical waist.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        w_c: f64,
        /// Acoustic waist.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        w_a: f64,
    },
    /// Transfer fidelity breakdown (n, λ, F) for one mode pair.
    Fidelity {
        #[arg(long, allow_negative_numbers = true)]
        l: i32,
        #[arg(long, default_value_t = 0)]
        p: u32,
        #[arg(long, default_value_t = 0)]
        pp: u32,
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        #[command(flatten)]
        transfer: TransferArgs,
    },
    /// Waist ratio maximizing ξ_l00, closed form and numerical.
    GammaOpt {
        #[arg(long, allow_negative_numbers = true)]
        l: i32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        gamma_lo: Option<f64>,
        #[arg(long)]
        gamma_hi: Option<f64>,
    },
    /// Best (p, p') for one l by exhaustive search.
    Optimize {
        #[arg(long, allow_negative_numbers = true)]
        l: i32,
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        #[arg(long, value_enum, default_value_t = Objective::Coupling)]
        objective: Objective,
        #[arg(long)]
        p_max: Option<u32>,
        #[arg(long)]
        pp_max: Option<u32>,
        #[command(flatten)]
        transfer: TransferArgs,
    },
    /// Figure dataset as CSV or JSON.
    Sweep {
        #[arg(long)]
        figure: Figure,
        /// Comma-separated l values; defaults to l_min..=l_max (fig3: 0,1,3,6).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        l: Option<Vec<i32>>,
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        #[arg(long)]
        p_max: Option<u32>,
        #[arg(long)]
        pp_max: Option<u32>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        transfer: TransferArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Objective {
    Coupling,
    Fidelity,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Transfer-model overrides. Rates are in Hz unless --rad-per-sec is given.
#[derive(Args, Debug, Default)]
struct TransferArgs {
    /// Single-photon coupling g.
    #[arg(long)]
    g: Option<f64>,
    /// Intracavity photon number.
    #[arg(long)]
    n_c: Option<f64>,
    /// Optical decay rate.
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Acoustic decay rate.
    #[arg(long, allow_negative_numbers = true)]
    gamma_m: Option<f64>,
    /// Environmental phonon occupation.
    #[arg(long, allow_negative_numbers = true)]
    n_m: Option<f64>,
    /// Mechanical frequency; with --temperature gives N_m by Bose-Einstein statistics.
    #[arg(long)]
    omega_m: Option<f64>,
    /// Environment temperature in K.
    #[arg(long)]
    temperature: Option<f64>,
    /// Coherent amplitude magnitude.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Take rates as angular frequencies in rad/s instead of Hz.
    #[arg(long)]
    rad_per_sec: bool,
}

impl TransferArgs {
    fn rate(&self, cli: Option<f64>, config_hz: f64) -> f64 {
        match cli {
            Some(v) if self.rad_per_sec => v,
            Some(v) => 2.0 * PI * v,
            None => 2.0 * PI * config_hz,
        }
    }

    fn occupation(&self, cfg: &Config) -> CliResult<f64> {
        if let Some(n) = self.n_m {
            return Ok(n);
        }
        if let Some(w) = self.omega_m {
            let omega = if self.rad_per_sec { w } else { 2.0 * PI * w };
            let t = self.temperature.or(cfg.temperature_k).ok_or_else(|| {
                Failure::Argument("--omega-m needs --temperature (or temperature_k in the config)".into())
            })?;
            return Ok(bose_occupation(omega, t)?);
        }
        if self.temperature.is_some() {
            let cfg = Config {
                temperature_k: self.temperature,
                ..cfg.clone()
            };
            return Ok(cfg.environment_occupation()?);
        }
        Ok(cfg.environment_occupation()?)
    }

    fn resolve(&self, cfg: &Config) -> CliResult<TransferParams> {
        let params = TransferParams {
            g: self.rate(self.g, cfg.g_hz),
            n_c: self.n_c.unwrap_or(cfg.n_c),
            kappa: self.rate(self.kappa, cfg.kappa_hz),
            gamma_m: self.rate(self.gamma_m, cfg.gamma_m_hz),
            n_m: self.occupation(cfg)?,
            alpha: self.alpha.unwrap_or(cfg.alpha),
        };
        params.validate()?;
        Ok(params)
    }
}

fn load(cli: &Cli) -> CliResult<Config> {
    let preset = cli.preset.map(|p| match p {
        PresetArg::Fig5Caption => Preset::Fig5Caption,
        PresetArg::BodyText => Preset::BodyText,
    });
    match &cli.config {
        Some(path) => {
            let loaded = load_config_with_preset(path, preset)?;
            for w in &loaded.warnings {
                eprintln!("warning: {w}");
            }
            Ok(loaded.config)
        }
        None => Ok(preset.map(Config::from_preset).unwrap_or_default()),
    }
}

fn waist_ratio(cli: Option<f64>, cfg: &Config) -> CliResult<WaistRatio> {
    Ok(WaistRatio::new(cli.unwrap_or(cfg.gamma))?)
}

fn bounds(cfg: &Config, p_max: Option<u32>, pp_max: Option<u32>) -> SearchBounds {
    SearchBounds {
        p_max: p_max.unwrap_or(cfg.bounds.p_max),
        p_prime_max: pp_max.unwrap_or(cfg.bounds.p_prime_max),
        ..cfg.bounds
    }
}

fn report(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    pairs.iter().map(|(k, v)| format!("{k:<width$} = {v}\n")).collect()
}

fn search_report(r: &SearchResult) -> String {
    report(&[
        ("l", r.l.to_string()),
        ("best_p", r.best_p.to_string()),
        ("best_p_prime", r.best_p_prime.to_string()),
        ("gamma", format_float(r.best_gamma)),
        ("objective_kind", format!("{:?}", r.objective_kind).to_lowercase()),
        ("objective", format_float(r.objective)),
        ("signed_xi", format_float(r.signed_xi)),
        ("boundary_flag", r.boundary_flag.to_string()),
    ])
}

fn run(cli: Cli) -> CliResult<String> {
    let cfg = load(&cli)?;
    match &cli.command {
        Command::Xi { l, p, pp, gamma, verify } => {
            let g = waist_ratio(*gamma, &cfg)?;
            let xi = xi_analytic_with_error(*l, *p, *pp, g);
            let mut lines = vec![("xi", format_float(xi.value)), ("abs_error_bound", format_float(xi.abs_error))];
            if *verify {
                let w_a = 1.0;
                let w_c = g.get().sqrt() * w_a;
                let q = chi_quadrature(ModeIndex::new(*l, *p), ModeIndex::new(2 * l, *pp), w_c, w_a, &cfg.quadrature)?;
                lines.push(("chi_quadrature", format_float(q.value)));
                lines.push(("quadrature_error_estimate", format_float(q.error_estimate)));
                lines.push(("difference", format_float(xi.value - q.value)));
            }
            Ok(report(&lines))
        }
        Command::ChiOracle { l, p, l_prime, p_prime, w_c, w_a } => {
            let q = chi_quadrature(ModeIndex::new(*l, *p), ModeIndex::new(*l_prime, *p_prime), *w_c, *w_a, &cfg.quadrature)?;
            Ok(report(&[
                ("chi", format_float(q.value)),
                ("error_estimate", format_float(q.error_estimate)),
                ("abs_scale", format_float(q.abs_scale)),
                ("panels", q.panels.to_string()),
            ]))
        }
        Command::Fidelity { l, p, pp, gamma, transfer } => {
            let g = waist_ratio(*gamma, &cfg)?;
            let params = transfer.resolve(&cfg)?;
            let xi = xi_analytic_with_error(*l, *p, *pp, g).value;
            let b = transfer_fidelity(&params, xi.abs())?;
            Ok(report(&[
                ("xi", format_float(xi)),
                ("n", format_float(b.n)),
                ("lambda", format_float(b.lambda)),
                ("fidelity", format_float(b.fidelity)),
            ]))
        }
        Command::GammaOpt { l, tol, gamma_lo, gamma_hi } => {
            let closed = gamma_opt(*l)?;
            let b = SearchBounds {
                gamma_lo: gamma_lo.unwrap_or(cfg.bounds.gamma_lo),
                gamma_hi: gamma_hi.unwrap_or(cfg.bounds.gamma_hi),
                ..cfg.bounds
            };
            let numeric = argmax_gamma_numeric(*l, &b, *tol)?;
            Ok(report(&[
                ("gamma_opt", format_float(closed)),
                ("gamma_numeric", format_float(numeric)),
                ("xi_l00_at_opt", format_float(xi_p0_closed_form(*l, WaistRatio::new(closed)?))),
            ]))
        }
        Command::Optimize { l, gamma, objective, p_max, pp_max, transfer } => {
            let g = waist_ratio(*gamma, &cfg)?;
            let b = bounds(&cfg, *p_max, *pp_max);
            b.validate()?;
            let r = match objective {
                Objective::Coupling => max_coupling_over_pp(*l, g, &b),
                Objective::Fidelity => max_fidelity_over_pp(*l, g, &transfer.resolve(&cfg)?, &b)?,
            };
            if r.boundary_flag {
                eprintln!("warning: best (p, p') lies on the search boundary; raise --p-max/--pp-max");
            }
            Ok(search_report(&r))
        }
        Command::Sweep { figure, l, gamma, p_max, pp_max, format, out, transfer } => {
            let l_values = match l {
                Some(ls) => ls.clone(),
                None if *figure == Figure::Fig3 => figure.default_l_values(),
                None => (cfg.l_min..=cfg.l_max).collect(),
            };
            let spec = SweepSpec {
                figure: *figure,
                l_values,
                gamma: waist_ratio(*gamma, &cfg)?,
                bounds: bounds(&cfg, *p_max, *pp_max),
                transfer: if figure.needs_transfer() {
                    Some(transfer.resolve(&cfg)?)
                } else {
                    None
                },
                output_format: match format {
                    FormatArg::Csv => OutputFormat::Csv,
                    FormatArg::Json => OutputFormat::Json,
                },
            };
            let rows = run_sweep(&spec)?;
            let text = match spec.output_format {
                OutputFormat::Csv => to_csv(&rows),
                OutputFormat::Json => to_json(&Dataset {
                    metadata: Metadata::new(&spec, cfg.hash_with(&spec)),
                    rows,
                }),
            }
            .map_err(|e| Failure::Io(e.to_string()))?;
            match out {
                Some(path) => {
                    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
