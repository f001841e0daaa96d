//! Flat `key = value` run configuration.
//!
//! ```text
//! # comment
//! preset = fig5-caption
//! gamma = 0.1
//! n_m = 2e4
//! ```
//!
//! Keys and their meaning are listed in [`KEYS`]. A `preset` line is applied
//! before every other key regardless of where it appears. Frequencies carry an
//! `_hz` suffix and are converted to rad/s by [`Config::transfer_params`].

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::quadrature::QuadratureConfig;
use crate::search::SearchBounds;
use crate::transfer::{bose_occupation, TransferParams};

/// Environment variable holding the default config path.
pub const CONFIG_ENV: &str = "OAM_MEMORY_CONFIG";

/// Accepted keys with a one-line description each.
pub const KEYS: &[(&str, &str)] = &[
    ("preset", "fig5-caption | body-text"),
    ("gamma", "waist ratio (w_c/w_a)^2"),
    ("l_min", "first azimuthal index of a sweep"),
    ("l_max", "last azimuthal index of a sweep"),
    ("p_max", "largest optical radial index searched"),
    ("p_prime_max", "largest acoustic radial index searched"),
    ("gamma_lo", "lower end of the waist-ratio bracket"),
    ("gamma_hi", "upper end of the waist-ratio bracket"),
    ("g_hz", "single-photon coupling g/2pi in Hz"),
    ("n_c", "intracavity photon number"),
    ("kappa_hz", "optical decay rate kappa/2pi in Hz"),
    ("gamma_m_hz", "acoustic decay rate gamma_m/2pi in Hz"),
    ("alpha", "coherent amplitude magnitude"),
    ("n_m", "environmental phonon occupation"),
    ("omega_m_hz", "mechanical frequency omega_m/2pi in Hz, used with temperature_k"),
    ("temperature_k", "environment temperature in K"),
    ("radial_panels", "initial radial quadrature panels"),
    ("angular_panels", "initial angular quadrature panels"),
    ("r_max_waists", "radial cutoff in waists"),
    ("target_rel_error", "quadrature convergence target"),
    ("max_doublings", "quadrature panel doublings before giving up"),
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("config field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("config: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// n_c = 2e18, T = 1 K.
    Fig5Caption,
    /// n_c = 1e18, T = 20 mK.
    BodyText,
}

impl Preset {
    pub fn parse(s: &str) -> Option<Preset> {
        match s {
            "fig5-caption" => Some(Preset::Fig5Caption),
            "body-text" => Some(Preset::BodyText),
            _ => None,
        }
    }
}

/// Resolved configuration. Rates are stored as entered, in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub preset: Option<Preset>,
    pub gamma: f64,
    pub l_min: i32,
    pub l_max: i32,
    pub bounds: SearchBounds,
    pub g_hz: f64,
    pub n_c: f64,
    pub kappa_hz: f64,
    pub gamma_m_hz: f64,
    pub alpha: f64,
    pub n_m: Option<f64>,
    pub omega_m_hz: Option<f64>,
    pub temperature_k: Option<f64>,
    pub quadrature: QuadratureConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            preset: None,
            gamma: 0.1,
            l_min: 0,
            l_max: 9,
            bounds: SearchBounds::default(),
            g_hz: 0.2,
            n_c: 2e18,
            kappa_hz: 50e3,
            gamma_m_hz: 50e3,
            alpha: 1.0,
            n_m: None,
            omega_m_hz: None,
            temperature_k: Some(1.0),
            quadrature: QuadratureConfig::default(),
        }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

impl Config {
    pub fn from_preset(preset: Preset) -> Self {
        let base = Config {
            preset: Some(preset),
            ..Config::default()
        };
        match preset {
            Preset::Fig5Caption => base,
            Preset::BodyText => Config {
                n_c: 1e18,
                temperature_k: Some(0.02),
                ..base
            },
        }
    }

    /// Parses config text on top of the defaults.
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        Config::parse_with_preset(text, None)
    }

    /// Like [`Config::parse`], with a preset that applies unless the text names
    /// a different one (which is an error).
    pub fn parse_with_preset(text: &str, outer: Option<Preset>) -> Result<Config, ConfigError> {
        let mut entries = Vec::new();
        let mut preset = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Parse {
                    line: line_no,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.iter().any(|(name, _)| *name == k) {
                return Err(ConfigError::Parse {
                    line: line_no,
                    message: format!("unknown key `{k}`"),
                });
            }
            if entries.iter().any(|(_, key, _): &(usize, &str, &str)| *key == k) || (k == "preset" && preset.is_some()) {
                return Err(ConfigError::Parse {
                    line: line_no,
                    message: format!("duplicate key `{k}`"),
                });
            }
            if k == "preset" {
                preset = Some(Preset::parse(v).ok_or_else(|| ConfigError::Parse {
                    line: line_no,
                    message: format!("unknown preset `{v}` (expected fig5-caption or body-text)"),
                })?);
            } else {
                entries.push((line_no, k, v));
            }
        }
        if let (Some(a), Some(b)) = (preset, outer) {
            if a != b {
                return Err(invalid("preset", format!("file selects {a:?} but {b:?} was requested")));
            }
        }
        let mut cfg = preset.or(outer).map(Config::from_preset).unwrap_or_default();
        for (line, k, v) in entries {
            cfg.set(k, v).map_err(|message| ConfigError::Parse { line, message })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let real = || value.parse::<f64>().map_err(|_| format!("`{key}` expects a number, got `{value}`"));
        let int = || value.parse::<i64>().map_err(|_| format!("`{key}` expects an integer, got `{value}`"));
        let count = |v: i64| u32::try_from(v).map_err(|_| format!("`{key}` must be a non-negative integer"));
        match key {
            "gamma" => self.gamma = real()?,
            "l_min" => self.l_min = i32::try_from(int()?).map_err(|e| e.to_string())?,
            "l_max" => self.l_max = i32::try_from(int()?).map_err(|e| e.to_string())?,
            "p_max" => self.bounds.p_max = count(int()?)?,
            "p_prime_max" => self.bounds.p_prime_max = count(int()?)?,
            "gamma_lo" => self.bounds.gamma_lo = real()?,
            "gamma_hi" => self.bounds.gamma_hi = real()?,
            "g_hz" => self.g_hz = real()?,
            "n_c" => self.n_c = real()?,
            "kappa_hz" => self.kappa_hz = real()?,
            "gamma_m_hz" => self.gamma_m_hz = real()?,
            "alpha" => self.alpha = real()?,
            "n_m" => self.n_m = Some(real()?),
            "omega_m_hz" => self.omega_m_hz = Some(real()?),
            "temperature_k" => self.temperature_k = Some(real()?),
            "radial_panels" => self.quadrature.radial_panels = count(int()?)? as usize,
            "angular_panels" => self.quadrature.angular_panels = count(int()?)? as usize,
            "r_max_waists" => self.quadrature.r_max_waists = real()?,
            "target_rel_error" => self.quadrature.target_rel_error = real()?,
            "max_doublings" => self.quadrature.max_doublings = count(int()?)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("gamma", self.gamma),
            ("g_hz", self.g_hz),
            ("n_c", self.n_c),
            ("kappa_hz", self.kappa_hz),
            ("gamma_m_hz", self.gamma_m_hz),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", format!("must be non-negative, got {}", self.alpha)));
        }
        if let Some(n) = self.n_m {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(invalid("n_m", format!("must be non-negative, got {n}")));
            }
        }
        if let Some(w) = self.omega_m_hz {
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid("omega_m_hz", format!("must be positive, got {w}")));
            }
        }
        if let Some(t) = self.temperature_k {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(invalid("temperature_k", format!("must be non-negative, got {t}")));
            }
        }
        if self.l_min > self.l_max {
            return Err(invalid("l_min", format!("l_min = {} exceeds l_max = {}", self.l_min, self.l_max)));
        }
        self.bounds
            .validate()
            .map_err(|e| invalid("gamma_lo", e.to_string()))?;
        self.quadrature
            .validate()
            .map_err(|e| invalid("quadrature", e.to_string()))?;
        Ok(())
    }

    /// N_m from `n_m`, or from (ω_m, T) when both are present. `n_m` wins if
    /// all three are set.
    pub fn environment_occupation(&self) -> Result<f64, ConfigError> {
        if let Some(n) = self.n_m {
            return Ok(n);
        }
        match (self.omega_m_hz, self.temperature_k) {
            (Some(f), Some(t)) => {
                bose_occupation(2.0 * PI * f, t).map_err(|e| invalid("omega_m_hz", e.to_string()))
            }
            _ => Err(invalid(
                "n_m",
                "phonon occupation is required: set n_m, or omega_m_hz together with temperature_k",
            )),
        }
    }

    /// Transfer parameters in rad/s.
    pub fn transfer_params(&self) -> Result<TransferParams, ConfigError> {
        let two_pi = 2.0 * PI;
        TransferParams::new(
            two_pi * self.g_hz,
            self.n_c,
            two_pi * self.kappa_hz,
            two_pi * self.gamma_m_hz,
            self.environment_occupation()?,
            self.alpha,
        )
        .map_err(|e| invalid("transfer", e.to_string()))
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        self.hash_with(&())
    }

    /// SHA-256 over the config followed by `extra` (e.g. the resolved run
    /// request, so command-line overrides change the hash too).
    pub fn hash_with<T: Serialize>(&self, extra: &T) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_string(self).expect("config serializes"));
        h.update(serde_json::to_string(extra).expect("request serializes"));
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Outcome of [`load_config`], with any warnings to show the user.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub config: Config,
    pub warnings: Vec<String>,
}

/// Reads `path` over the defaults. A missing file yields the defaults and a warning.
pub fn load_config(path: &Path) -> Result<Loaded, ConfigError> {
    load_config_with_preset(path, None)
}

/// [`load_config`] with a preset applied beneath the file's keys.
pub fn load_config_with_preset(path: &Path, preset: Option<Preset>) -> Result<Loaded, ConfigError> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(Loaded {
            config: Config::parse_with_preset(&text, preset)?,
            warnings: Vec::new(),
        }),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Loaded {
            config: preset.map(Config::from_preset).unwrap_or_default(),
            warnings: vec![format!("config file {} not found, using defaults", path.display())],
        }),
        Err(e) => Err(ConfigError::Io(format!("{}: {e}", path.display()))),
    }
}
