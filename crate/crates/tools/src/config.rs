//! TOML run configuration.
//!
//! ```toml
//! [solver]
//! segments = 16
//! endpoint_tol = 1e-6
//! gap_tol = 1e-3
//! multistarts = 8
//! seed = 0
//!
//! [sharpness]
//! band_fraction = 0.4
//! l2_schedule = [[0.2, 1.0, 1e-2, 1.0], [0.001, 8.0, 1e-30, 1.0]]
//! ```
//!
//! Every key is optional; missing keys take the library defaults.

use std::path::Path;

use heisenberg_hardy::metrics::SolverConfig;
use heisenberg_hardy::sharpness::{
    default_l2_schedule, default_lp_schedule, AnsatzFamily, AnsatzKind, SharpnessOptions,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    pub fn invalid(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub sharpness: SharpnessSection,
}

/// Schedules and knobs for the `sharpness` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharpnessSection {
    pub band_fraction: f64,
    pub order: usize,
    pub jensen_weights: [f64; 3],
    /// `L²` entries `[ε, R, δ, T]`.
    pub l2_schedule: Vec<[f64; 4]>,
    /// `Lᵖ` entries `[ε, λ]`.
    pub lp_schedule: Vec<[f64; 2]>,
    /// Spread of the `y` profile in `Lᵖ` runs.
    pub lp_spread: f64,
    /// Window `[δ, T]` of the `x` profile in `Lᵖ` runs.
    pub lp_window: [f64; 2],
    pub probe_budget: usize,
}

impl Default for SharpnessSection {
    fn default() -> Self {
        let opts = SharpnessOptions::default();
        let lp = default_lp_schedule(2.0);
        SharpnessSection {
            band_fraction: opts.band_fraction,
            order: opts.order,
            jensen_weights: opts.jensen_weights,
            l2_schedule: default_l2_schedule()
                .iter()
                .map(|a| [a.epsilon, a.spread, a.delta, a.t_max])
                .collect(),
            lp_schedule: lp.iter().map(|a| [a.epsilon, a.lambda]).collect(),
            lp_spread: lp[0].spread,
            lp_window: [lp[0].delta, lp[0].t_max],
            probe_budget: 200,
        }
    }
}

impl SharpnessSection {
    pub fn options(&self) -> SharpnessOptions {
        SharpnessOptions {
            band_fraction: self.band_fraction,
            order: self.order,
            jensen_weights: self.jensen_weights,
        }
    }

    pub fn l2(&self) -> Vec<AnsatzFamily> {
        self.l2_schedule
            .iter()
            .map(|&[epsilon, spread, delta, t_max]| AnsatzFamily {
                kind: AnsatzKind::L2Halfspace,
                p: 2.0,
                epsilon,
                spread,
                lambda: 1.0,
                delta,
                t_max,
            })
            .collect()
    }

    pub fn lp(&self, p: f64) -> Vec<AnsatzFamily> {
        self.lp_schedule
            .iter()
            .map(|&[epsilon, lambda]| AnsatzFamily {
                kind: AnsatzKind::LpHalfspace,
                p,
                epsilon,
                spread: self.lp_spread,
                lambda,
                delta: self.lp_window[0],
                t_max: self.lp_window[1],
            })
            .collect()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.band_fraction > 0.0 && self.band_fraction <= 0.5) {
            return Err(ConfigError::invalid("sharpness.band_fraction", "must lie in (0, 0.5]"));
        }
        if self.order < 2 {
            return Err(ConfigError::invalid("sharpness.order", "must be at least 2"));
        }
        if self.jensen_weights.iter().any(|a| !(*a > 0.0)) {
            return Err(ConfigError::invalid("sharpness.jensen_weights", "must be positive"));
        }
        if self.l2_schedule.is_empty() {
            return Err(ConfigError::invalid("sharpness.l2_schedule", "must not be empty"));
        }
        if self.lp_schedule.is_empty() {
            return Err(ConfigError::invalid("sharpness.lp_schedule", "must not be empty"));
        }
        for a in self.l2() {
            a.validate()
                .map_err(|e| ConfigError::invalid("sharpness.l2_schedule", e.to_string()))?;
        }
        for a in self.lp(2.0) {
            a.validate()
                .map_err(|e| ConfigError::invalid("sharpness.lp_schedule", e.to_string()))?;
        }
        if self.probe_budget < 11 {
            return Err(ConfigError::invalid("sharpness.probe_budget", "must be at least 11"));
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.solver
            .validate()
            .map_err(|m| ConfigError::invalid("solver", m))?;
        self.sharpness.validate()
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}
