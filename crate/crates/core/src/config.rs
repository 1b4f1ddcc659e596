//! Run configuration and the key-value config file.
//!
//! The file is line-oriented `key = value`, one setting per line, `#` starts
//! a comment. Seeds are always strings so no value ever passes through a
//! float:
//!
//! ```text
//! prime = 13
//! seeds = [ "sqrt(3)@4", "sqrt(10)@6" ]
//! levels = 2
//! ```
//!
//! Recognised keys: `prime`, `seeds` (required), `levels`, `terms`,
//! `precision`, `cap`, `jobs`, `digits`, `format` (`"table"` or
//! `"machine"`), `out`, `force_lambda`, `test_seed`.

use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::padic::Prime;
use crate::seed::{Seed, SeedSpec};
use crate::tower::{
    default_levels, TowerConfig, DEFAULT_PRECISION, DEFAULT_PREVIEW_DIGITS, DEFAULT_TERMS,
};
use crate::trees::{ProfileOptions, DEFAULT_VERTEX_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Semantic(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Machine,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "machine" | "json" => Ok(OutputFormat::Machine),
            other => Err(ConfigError::Semantic(format!(
                "unknown format {other:?}; expected \"table\" or \"machine\""
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub terms: usize,
    pub precision: u32,
    pub levels: u32,
    pub vertex_cap: usize,
    pub jobs: usize,
    pub digits: u32,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub force_lambda: Option<u32>,
    pub test_seed: u64,
}

pub const DEFAULT_TEST_SEED: u64 = 0x5eed_2024;

impl RunConfig {
    pub fn defaults_for(prime: Prime) -> Self {
        RunConfig {
            terms: DEFAULT_TERMS,
            precision: DEFAULT_PRECISION,
            levels: default_levels(prime, DEFAULT_VERTEX_CAP),
            vertex_cap: DEFAULT_VERTEX_CAP,
            jobs: 0,
            digits: DEFAULT_PREVIEW_DIGITS,
            format: OutputFormat::Table,
            out: None,
            force_lambda: None,
            test_seed: DEFAULT_TEST_SEED,
        }
    }

    pub fn tower_config(&self) -> TowerConfig {
        TowerConfig {
            levels: self.levels,
            terms: self.terms,
            precision: self.precision,
            preview_digits: self.digits,
            profile: ProfileOptions {
                vertex_cap: self.vertex_cap,
                jobs: self.jobs,
            },
            lambda_override: self.force_lambda,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    prime: Option<i64>,
    seeds: Option<Vec<String>>,
    levels: Option<i64>,
    terms: Option<i64>,
    precision: Option<i64>,
    cap: Option<i64>,
    jobs: Option<i64>,
    digits: Option<i64>,
    format: Option<String>,
    out: Option<String>,
    force_lambda: Option<i64>,
    test_seed: Option<i64>,
}

/// Builds a validated spec from a prime and seed strings.
pub fn build_spec(prime: i64, seeds: &[String]) -> Result<SeedSpec, ConfigError> {
    let prime = u64::try_from(prime)
        .ok()
        .and_then(|p| Prime::new(p).ok())
        .ok_or_else(|| ConfigError::Semantic(format!("{prime} is not a prime")))?;
    let parsed = seeds
        .iter()
        .map(|s| {
            s.parse::<Seed>()
                .map_err(|e| ConfigError::Semantic(format!("seed {s:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    SeedSpec::new(prime, parsed).map_err(|e| ConfigError::Semantic(e.to_string()))
}

/// Checks a numeric setting against its minimum and converts it.
pub fn at_least<T: TryFrom<i64>>(key: &str, value: i64, min: i64) -> Result<T, ConfigError> {
    if value < min {
        return Err(ConfigError::Semantic(format!(
            "{key} must be at least {min}, got {value}"
        )));
    }
    T::try_from(value)
        .map_err(|_| ConfigError::Semantic(format!("{key} = {value} is out of range")))
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses a config file into a spec and a run configuration with every
/// unset parameter at its default.
pub fn parse_config(text: &str) -> Result<(SeedSpec, RunConfig), ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let prime = raw
        .prime
        .ok_or_else(|| ConfigError::Semantic("missing key `prime`".into()))?;
    let seeds = raw
        .seeds
        .ok_or_else(|| ConfigError::Semantic("missing key `seeds`".into()))?;
    let spec = build_spec(prime, &seeds)?;

    let mut cfg = RunConfig::defaults_for(spec.prime());
    if let Some(v) = raw.levels {
        cfg.levels = at_least("levels", v, 1)?;
    }
    if let Some(v) = raw.terms {
        cfg.terms = at_least("terms", v, 1)?;
    }
    if let Some(v) = raw.precision {
        cfg.precision = at_least("precision", v, 1)?;
    }
    if let Some(v) = raw.cap {
        cfg.vertex_cap = at_least("cap", v, 1)?;
        if raw.levels.is_none() {
            cfg.levels = default_levels(spec.prime(), cfg.vertex_cap);
        }
    }
    if let Some(v) = raw.jobs {
        cfg.jobs = at_least("jobs", v, 1)?;
    }
    if let Some(v) = raw.digits {
        cfg.digits = at_least("digits", v, 1)?;
    }
    if let Some(f) = raw.format {
        cfg.format = f.parse()?;
    }
    cfg.out = raw.out.map(PathBuf::from);
    if let Some(v) = raw.force_lambda {
        cfg.force_lambda = Some(at_least("force_lambda", v, 1)?);
    }
    if let Some(v) = raw.test_seed {
        cfg.test_seed = at_least("test_seed", v, 0)?;
    }
    Ok((spec, cfg))
}
