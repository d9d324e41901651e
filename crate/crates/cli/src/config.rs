//! Run configuration: built-in defaults, then a `key = value` file, then flags.

use std::path::Path;

use clap::Args;
use oulink::{db_to_linear, ChannelParams, MobilityParams, PathLossParams, SnrThreshold};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Every recognised key, all optional until resolution.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// Relaxation time of node motion [s].
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Diffusion coefficient per coordinate.
    #[arg(long, global = true)]
    pub diffusion: Option<f64>,
    /// Mean position of every coordinate.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Path-loss exponent, as `p/q` or a decimal.
    #[arg(long, global = true)]
    pub eta: Option<String>,
    /// Transmit gain constant.
    #[arg(long, global = true)]
    pub psi: Option<f64>,
    /// Maximum Doppler shift [Hz].
    #[arg(long, global = true)]
    pub nu_max: Option<f64>,
    /// SNR threshold in dB.
    #[arg(long, global = true, allow_hyphen_values = true, conflicts_with = "rho_th")]
    pub rho_th_db: Option<f64>,
    /// SNR threshold, linear.
    #[arg(long, global = true)]
    pub rho_th: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Simulation step [s].
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Simulated time [s].
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Ensemble size.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
}

impl RawConfig {
    /// Fields of `over` replace those of `self`. A threshold in either unit replaces both.
    pub fn overlay(mut self, over: RawConfig) -> RawConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        if over.rho_th.is_some() || over.rho_th_db.is_some() {
            self.rho_th = None;
            self.rho_th_db = None;
        }
        take!(tau, diffusion, mu, eta, psi, nu_max, rho_th_db, rho_th, seed, dt, horizon, samples);
        self
    }

    /// Parses a `key = value` file with `#` comments. A file whose first line is a
    /// `#`-prefixed JSON header written by this tool is read from that header instead.
    pub fn parse(text: &str) -> CliResult<RawConfig> {
        if let Some(first) = text.lines().next() {
            let rest = first.trim_start_matches('#').trim();
            if first.starts_with('#') && rest.starts_with('{') {
                return from_header(rest);
            }
        }
        let mut map = serde_json::Map::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected `key = value`", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let json = if key == "eta" {
                serde_json::Value::String(value.to_string())
            } else {
                serde_json::from_str(value)
                    .map_err(|_| CliError::usage(format!("config line {}: `{value}` is not a number", i + 1)))?
            };
            if map.insert(key.to_string(), json).is_some() {
                return Err(CliError::usage(format!("config line {}: duplicate key `{key}`", i + 1)));
            }
        }
        serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| CliError::usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<RawConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn resolve(&self) -> CliResult<RunConfig> {
        let d = RunConfig::DEFAULTS;
        let tau = self.tau.unwrap_or(d.0);
        let diffusion = self.diffusion.unwrap_or(d.1);
        let mu = self.mu.unwrap_or(0.0);
        let psi = self.psi.unwrap_or(1.0);
        let path_loss = PathLossParams::parse(self.eta.as_deref().unwrap_or("2"), psi)?;
        let rho_th = match (self.rho_th, self.rho_th_db) {
            (Some(r), _) => r,
            (None, Some(db)) => db_to_linear(db),
            (None, None) => 1.0,
        };
        let cfg = RunConfig {
            tau,
            diffusion,
            mu,
            eta: path_loss.eta_label(),
            psi,
            nu_max: self.nu_max.unwrap_or(d.2),
            rho_th,
            seed: self.seed.unwrap_or(oulink::verify::SuiteConfig::default().seed),
            dt: self.dt.unwrap_or(d.3),
            horizon: self.horizon.unwrap_or(d.4),
            samples: self.samples.unwrap_or(d.5),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Deserialize)]
struct Header {
    config: RunConfig,
}

fn from_header(json: &str) -> CliResult<RawConfig> {
    let h: Header = serde_json::from_str(json).map_err(|e| CliError::usage(format!("metadata header: {e}")))?;
    Ok(h.config.into())
}

/// Fully resolved and validated parameters, echoed into every output header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tau: f64,
    pub diffusion: f64,
    pub mu: f64,
    pub eta: String,
    pub psi: f64,
    pub nu_max: f64,
    /// Linear SNR threshold.
    pub rho_th: f64,
    pub seed: u64,
    pub dt: f64,
    pub horizon: f64,
    pub samples: usize,
}

impl From<RunConfig> for RawConfig {
    fn from(c: RunConfig) -> Self {
        RawConfig {
            tau: Some(c.tau),
            diffusion: Some(c.diffusion),
            mu: Some(c.mu),
            eta: Some(c.eta),
            psi: Some(c.psi),
            nu_max: Some(c.nu_max),
            rho_th_db: None,
            rho_th: Some(c.rho_th),
            seed: Some(c.seed),
            dt: Some(c.dt),
            horizon: Some(c.horizon),
            samples: Some(c.samples),
        }
    }
}

impl RunConfig {
    /// `(tau, diffusion, nu_max, dt, horizon, samples)`.
    const DEFAULTS: (f64, f64, f64, f64, f64, usize) = (1.0, 100.0, 100.0, 1e-3, 1.0, 100_000);

    fn validate(&self) -> CliResult<()> {
        self.mobility()?;
        self.threshold()?;
        ChannelParams::new(self.nu_max)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(CliError::usage(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(CliError::usage(format!("horizon must be > 0, got {}", self.horizon)));
        }
        if self.samples == 0 {
            return Err(CliError::usage("samples must be >= 1"));
        }
        Ok(())
    }

    pub fn mobility(&self) -> oulink::Result<MobilityParams> {
        MobilityParams::new(self.tau, self.diffusion, self.mu)
    }

    pub fn path_loss(&self) -> oulink::Result<PathLossParams> {
        PathLossParams::parse(&self.eta, self.psi)
    }

    pub fn threshold(&self) -> oulink::Result<SnrThreshold> {
        SnrThreshold::new(self.rho_th, &self.path_loss()?)
    }

    /// Steps covering the horizon, at least one.
    pub fn steps(&self) -> usize {
        ((self.horizon / self.dt).round() as usize).max(1)
    }
}
