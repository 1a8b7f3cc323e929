//! Flat `key=value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! horizon=600
//! cost.h=1/9
//! demand.family=weibull
//! policies=ts,ucb,oco
//! checkpoints=every:10
//! ```
//!
//! Numeric values accept a plain decimal or a fraction `a/b`. Overrides given
//! on the command line are applied after the file, with the same syntax.

use std::path::Path;

use crate::bounds::theoretical_alpha0;
use crate::demand::GammaParams;
use crate::error::{Error, Result};
use crate::newsvendor::CostParams;
use crate::policies::PolicyKind;
use crate::sim::{checkpoints_every, DemandSpec, ExperimentConfig, RegretMode};

/// Every key the parser understands.
pub const KNOWN_KEYS: &[&str] = &[
    "horizon",
    "trials",
    "seed",
    "cost.h",
    "cost.p",
    "demand.family",
    "demand.theta",
    "demand.k",
    "demand.mu",
    "demand.sigma",
    "prior.alpha",
    "prior.beta",
    "prior.init",
    "delta",
    "policies",
    "regret_mode",
    "checkpoints",
    "ucb.width_scale",
];

const PRESETS: &[(&str, &str)] = &[
    ("figure1-50pct", include_str!("../presets/figure1-50pct.conf")),
    ("figure1-90pct", include_str!("../presets/figure1-90pct.conf")),
    ("figure1-98pct", include_str!("../presets/figure1-98pct.conf")),
    ("figure2-50pct", include_str!("../presets/figure2-50pct.conf")),
    ("figure2-90pct", include_str!("../presets/figure2-90pct.conf")),
    ("figure2-98pct", include_str!("../presets/figure2-98pct.conf")),
    ("figure3-normal", include_str!("../presets/figure3-normal.conf")),
    ("figure4-normal-myopic", include_str!("../presets/figure4-normal-myopic.conf")),
];

/// Names of the bundled presets.
pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

/// Text of a bundled preset.
pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Parsed but not yet validated settings.
#[derive(Debug, Clone)]
struct RawConfig {
    horizon: u64,
    trials: u64,
    seed: u64,
    h: f64,
    p: f64,
    family: String,
    theta: f64,
    k: f64,
    mu: f64,
    sigma: f64,
    alpha: f64,
    beta: f64,
    prior_init: String,
    delta: f64,
    policies: Vec<PolicyKind>,
    regret_mode: RegretMode,
    checkpoints: String,
    ucb_width_scale: f64,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            horizon: 600,
            trials: 100,
            seed: 20_240_601,
            h: 1.0,
            p: 1.0,
            family: "weibull".into(),
            theta: 1.0,
            k: 1.0,
            mu: 10.0,
            sigma: 2.0,
            alpha: 4.0,
            beta: 4.0,
            prior_init: "experiment".into(),
            delta: 0.1,
            policies: vec![PolicyKind::Thompson],
            regret_mode: RegretMode::Frequentist,
            checkpoints: "every:10".into(),
            ucb_width_scale: 1.0,
        }
    }
}

fn parse_number(key: &str, value: &str) -> Result<f64> {
    let bad = || Error::config(key, format!("expected a number, got `{value}`"));
    let v = match value.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            a / b
        }
        None => value.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn parse_int(key: &str, value: &str) -> Result<u64> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("expected a nonnegative integer, got `{value}`")))
}

impl RawConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "horizon" => self.horizon = parse_int(key, value)?,
            "trials" => self.trials = parse_int(key, value)?,
            "seed" => self.seed = parse_int(key, value)?,
            "cost.h" => self.h = parse_number(key, value)?,
            "cost.p" => self.p = parse_number(key, value)?,
            "demand.family" => match value {
                "weibull" | "normal" => self.family = value.into(),
                _ => return Err(Error::config(key, format!("expected weibull or normal, got `{value}`"))),
            },
            "demand.theta" => self.theta = parse_number(key, value)?,
            "demand.k" => self.k = parse_number(key, value)?,
            "demand.mu" => self.mu = parse_number(key, value)?,
            "demand.sigma" => self.sigma = parse_number(key, value)?,
            "prior.alpha" => self.alpha = parse_number(key, value)?,
            "prior.beta" => self.beta = parse_number(key, value)?,
            "prior.init" => match value {
                "experiment" | "theoretical" => self.prior_init = value.into(),
                _ => {
                    return Err(Error::config(
                        key,
                        format!("expected experiment or theoretical, got `{value}`"),
                    ))
                }
            },
            "delta" => self.delta = parse_number(key, value)?,
            "policies" => {
                self.policies = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.parse::<PolicyKind>().map_err(|e| Error::config(key, e.to_string())))
                    .collect::<Result<_>>()?;
            }
            "regret_mode" => {
                self.regret_mode = match value {
                    "frequentist" => RegretMode::Frequentist,
                    "bayesian" => RegretMode::Bayesian,
                    _ => {
                        return Err(Error::config(
                            key,
                            format!("expected frequentist or bayesian, got `{value}`"),
                        ))
                    }
                }
            }
            "checkpoints" => self.checkpoints = value.into(),
            "ucb.width_scale" => self.ucb_width_scale = parse_number(key, value)?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    fn apply_line(&mut self, line: &str, origin: &str) -> Result<()> {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return Ok(());
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(line, format!("{origin}: expected key=value")))?;
        self.set(key.trim(), value)
    }

    fn resolve_checkpoints(&self) -> Result<Vec<u64>> {
        let text = self.checkpoints.trim();
        if let Some(step) = text.strip_prefix("every:") {
            let step = parse_int("checkpoints", step.trim())?;
            if step == 0 {
                return Err(Error::config("checkpoints", "step must be positive"));
            }
            return Ok(checkpoints_every(step, self.horizon));
        }
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_int("checkpoints", s.trim()))
            .collect()
    }

    fn build(self) -> Result<ExperimentConfig> {
        let cost = CostParams::new(self.h, self.p).map_err(|e| Error::config("cost.h", e.to_string()))?;
        let demand = match self.family.as_str() {
            "weibull" => DemandSpec::Weibull {
                theta: self.theta,
                k: self.k,
            },
            _ => DemandSpec::Normal {
                mu: self.mu,
                sigma: self.sigma,
                model_k: self.k,
            },
        };
        let base = GammaParams::new(self.alpha, self.beta).map_err(|e| Error::config("prior.alpha", e.to_string()))?;
        let prior = if self.prior_init == "theoretical" {
            if !(self.delta > 0.0 && self.delta < 1.0) {
                return Err(Error::config("delta", "must lie in (0, 1)"));
            }
            // Keep the prior mean rate, raise the shape to the theoretical level.
            let alpha = theoretical_alpha0(self.horizon, self.delta);
            GammaParams::new(alpha, alpha / base.mean()).map_err(|e| Error::config("prior.init", e.to_string()))?
        } else {
            base
        };
        let config = ExperimentConfig {
            horizon: self.horizon,
            trials: self.trials,
            seed: self.seed,
            cost,
            demand,
            prior,
            policies: self.policies.clone(),
            regret_mode: self.regret_mode,
            checkpoints: self.resolve_checkpoints()?,
            delta: self.delta,
            ucb_width_scale: self.ucb_width_scale,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Parse config text, then apply `key=value` overrides in order.
pub fn parse_config_str(text: &str, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut raw = RawConfig::default();
    for (i, line) in text.lines().enumerate() {
        raw.apply_line(line, &format!("line {}", i + 1))?;
    }
    for ov in overrides {
        let (key, value) = ov
            .split_once('=')
            .ok_or_else(|| Error::config(ov.as_str(), "override must be key=value"))?;
        raw.set(key.trim(), value)?;
    }
    raw.build()
}

/// Read and parse a config file.
pub fn parse_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text, overrides)
}

/// Parse a bundled preset by name.
pub fn parse_preset(name: &str, overrides: &[String]) -> Result<ExperimentConfig> {
    let text = preset_text(name).ok_or_else(|| Error::config("preset", format!("unknown preset `{name}`")))?;
    parse_config_str(text, overrides)
}
