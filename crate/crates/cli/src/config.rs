//! Layered settings: flags, then `DERHAM_*` environment variables, then a
//! `key = value` file, then defaults.

use std::collections::BTreeMap;

use derham_core::{HarnessConfig, StabilizationConfig};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("config file line {line}: {message}")]
    BadLine { line: usize, message: String },
    #[error("bad value for {key} ({source_name}): '{value}'")]
    BadValue { key: String, value: String, source_name: String },
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("cannot read config file {path}: {message}")]
    Unreadable { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// Keys accepted in config files; env vars are `DERHAM_` plus the upper-cased key.
pub const KEYS: [&str; 6] = ["k_cap", "degree_span", "stab_window", "widen_budget", "seed", "retries"];

/// Values given on the command line; `None` means not given.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub k_cap: Option<String>,
    pub degree_span: Option<String>,
    pub stab_window: Option<String>,
    pub widen_budget: Option<String>,
    pub seed: Option<String>,
    pub retries: Option<String>,
}

impl Overrides {
    fn get(&self, key: &str) -> Option<&String> {
        match key {
            "k_cap" => self.k_cap.as_ref(),
            "degree_span" => self.degree_span.as_ref(),
            "stab_window" => self.stab_window.as_ref(),
            "widen_budget" => self.widen_budget.as_ref(),
            "seed" => self.seed.as_ref(),
            "retries" => self.retries.as_ref(),
            _ => None,
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::BadLine { line: i + 1, message: "expected key = value".into() });
        };
        let key = k.trim().to_ascii_lowercase().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

/// A cap list `4,6,8`, or a single top cap `N` meaning `4,6,..,N`.
pub fn parse_schedule(s: &str) -> Option<Vec<u32>> {
    let parts: Vec<u32> = s.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
    match parts.as_slice() {
        [] => None,
        [top] if *top >= 4 => Some((4..=*top).step_by(2).chain((top % 2 == 1).then_some(*top)).collect()),
        _ => Some(parts),
    }
}

/// Resolves the effective configuration. `env` is the process environment
/// (passed in so callers and tests control it).
pub fn resolve(
    flags: &Overrides,
    env: &BTreeMap<String, String>,
    file: &BTreeMap<String, String>,
) -> Result<HarnessConfig, ConfigError> {
    let pick = |key: &str| -> Option<(String, String)> {
        if let Some(v) = flags.get(key) {
            return Some((v.clone(), "flag".into()));
        }
        let env_key = format!("DERHAM_{}", key.to_ascii_uppercase());
        if let Some(v) = env.get(&env_key) {
            return Some((v.clone(), env_key));
        }
        file.get(key).map(|v| (v.clone(), "config file".into()))
    };
    let bad = |key: &str, (value, source_name): (String, String)| ConfigError::BadValue {
        key: key.into(),
        value,
        source_name,
    };
    fn num<T: std::str::FromStr>(v: &(String, String)) -> Option<T> {
        v.0.trim().parse().ok()
    }

    let mut cfg = HarnessConfig::default();
    let mut stab = StabilizationConfig::default();
    if let Some(v) = pick("k_cap") {
        stab.schedule = parse_schedule(&v.0).ok_or_else(|| bad("k_cap", v))?;
    }
    if let Some(v) = pick("degree_span") {
        stab.span = num(&v).ok_or_else(|| bad("degree_span", v))?;
    }
    if let Some(v) = pick("stab_window") {
        stab.window = num(&v).ok_or_else(|| bad("stab_window", v))?;
    }
    if let Some(v) = pick("widen_budget") {
        stab.widen_budget = num(&v).ok_or_else(|| bad("widen_budget", v))?;
    }
    if let Some(v) = pick("seed") {
        cfg.seed = num(&v).ok_or_else(|| bad("seed", v))?;
    }
    if let Some(v) = pick("retries") {
        cfg.retries = num(&v).ok_or_else(|| bad("retries", v))?;
    }
    stab.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    cfg.stabilization = stab;
    Ok(cfg)
}
