//! Flat `key = value` config files and their merge with command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use dnfrule::colgen::Mode;
use serde::Serialize;

/// Parses `key = value` lines. Blank lines and `#` comments are skipped, and
/// dashes in keys are read as underscores.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| anyhow!("line {}: expected `key = value`", i + 1))?;
        let key = key.trim().replace('-', "_");
        if key.is_empty() {
            bail!("line {}: empty key", i + 1);
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in config {}", path.display()))
}

/// Settings shared by the subcommands, after config and flag overrides.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Settings {
    pub complexity: Option<usize>,
    pub cu: Option<f64>,
    pub cp: Option<f64>,
    pub max_degree: Option<usize>,
    pub max_iterations: Option<usize>,
    pub mode: Option<Mode>,
    pub bins: Option<usize>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub fractions: Option<Vec<f64>>,
    pub rule_counts: Option<Vec<usize>>,
    pub timing: Option<bool>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| anyhow!("invalid value `{value}` for `{key}`: {e}"))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value.split(',').map(|v| parse_value(key, v.trim())).collect()
}

impl Settings {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut s = Settings::default();
        for (key, value) in map {
            match key.as_str() {
                "complexity" => s.complexity = Some(parse_value(key, value)?),
                "cu" | "c_u" => s.cu = Some(parse_value(key, value)?),
                "cp" | "c_p" => s.cp = Some(parse_value(key, value)?),
                "max_degree" => s.max_degree = Some(parse_value(key, value)?),
                "max_iterations" => s.max_iterations = Some(parse_value(key, value)?),
                "mode" => s.mode = Some(parse_value(key, value)?),
                "bins" => s.bins = Some(parse_value(key, value)?),
                "folds" => s.folds = Some(parse_value(key, value)?),
                "seed" => s.seed = Some(parse_value(key, value)?),
                "jobs" => s.jobs = Some(parse_value(key, value)?),
                "fractions" => s.fractions = Some(parse_list(key, value)?),
                "rule_counts" => s.rule_counts = Some(parse_list(key, value)?),
                "timing" => s.timing = Some(parse_value(key, value)?),
                _ => bail!("unknown config key `{key}`"),
            }
        }
        Ok(s)
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: Settings) -> Settings {
        Settings {
            complexity: other.complexity.or(self.complexity),
            cu: other.cu.or(self.cu),
            cp: other.cp.or(self.cp),
            max_degree: other.max_degree.or(self.max_degree),
            max_iterations: other.max_iterations.or(self.max_iterations),
            mode: other.mode.or(self.mode),
            bins: other.bins.or(self.bins),
            folds: other.folds.or(self.folds),
            seed: other.seed.or(self.seed),
            jobs: other.jobs.or(self.jobs),
            fractions: other.fractions.or(self.fractions),
            rule_counts: other.rule_counts.or(self.rule_counts),
            timing: other.timing.or(self.timing),
        }
    }
}
