//! Configuration file handling: TOML with a fixed key set, `--set` overrides
//! layered on top, and an echo of the fully resolved document.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use twosided::sim::ChangeTime;

/// A numeric setting that may be left to the tool to derive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutoOr {
    Value(f64),
    Keyword(String),
}

impl AutoOr {
    pub fn value(&self) -> Option<f64> {
        match self {
            AutoOr::Value(v) => Some(*v),
            AutoOr::Keyword(_) => None,
        }
    }

    fn validate(&self, key: &str) -> Result<(), String> {
        match self {
            AutoOr::Value(v) if v.is_finite() => Ok(()),
            AutoOr::Value(v) => Err(format!("key `{key}`: value {v} is not finite")),
            AutoOr::Keyword(word) if word == "auto" => Ok(()),
            AutoOr::Keyword(word) => {
                Err(format!("key `{key}`: expected a number or \"auto\", got \"{word}\""))
            }
        }
    }
}

impl fmt::Display for AutoOr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutoOr::Value(v) => write!(f, "{v}"),
            AutoOr::Keyword(w) => write!(f, "{w}"),
        }
    }
}

/// Change time: a sample index or the keyword "never".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChangeTimeCfg {
    At(u64),
    Keyword(String),
}

impl ChangeTimeCfg {
    pub fn to_change_time(&self) -> ChangeTime {
        match self {
            ChangeTimeCfg::At(m) => ChangeTime::At(*m),
            ChangeTimeCfg::Keyword(_) => ChangeTime::Never,
        }
    }

    fn validate(&self) -> Result<(), String> {
        match self {
            ChangeTimeCfg::At(m) if *m >= 1 => Ok(()),
            ChangeTimeCfg::At(m) => Err(format!("key `m`: change time must be >= 1, got {m}")),
            ChangeTimeCfg::Keyword(word) if word == "never" => Ok(()),
            ChangeTimeCfg::Keyword(word) => {
                Err(format!("key `m`: expected a sample index or \"never\", got \"{word}\""))
            }
        }
    }
}

fn default_distribution() -> String {
    "gaussian".into()
}
fn default_snr_db() -> Vec<f64> {
    vec![3.0]
}
fn default_m() -> ChangeTimeCfg {
    ChangeTimeCfg::At(100)
}
fn default_n_max() -> u64 {
    400
}
fn default_runs() -> u64 {
    2000
}
fn default_auto() -> AutoOr {
    AutoOr::Keyword("auto".into())
}
fn default_b() -> AutoOr {
    AutoOr::Value(10_000.0)
}
fn default_target_pfa() -> f64 {
    0.05
}
fn default_master_seed() -> u64 {
    20260810
}

/// The resolved run configuration. Unknown keys are rejected by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_distribution")]
    pub distribution: String,
    #[serde(default = "default_snr_db")]
    pub snr_db: Vec<f64>,
    #[serde(default = "default_m")]
    pub m: ChangeTimeCfg,
    #[serde(default = "default_n_max")]
    pub n_max: u64,
    #[serde(default = "default_runs")]
    pub runs: u64,
    /// Runs used by calibration; defaults to `runs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration_runs: Option<u64>,
    #[serde(default = "default_auto")]
    pub a: AutoOr,
    #[serde(default = "default_auto")]
    pub c: AutoOr,
    #[serde(default = "default_b")]
    pub b: AutoOr,
    #[serde(default = "default_target_pfa")]
    pub target_pfa: f64,
    #[serde(default = "default_master_seed")]
    pub master_seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        toml::Table::new()
            .try_into()
            .expect("defaults deserialize")
    }
}

impl Config {
    /// Loads the file (when given), applies `--set key=value` overrides in
    /// order (last one wins), then the seed override.
    pub fn load(
        path: Option<&Path>,
        overrides: &[String],
        seed: Option<u64>,
    ) -> Result<Config, String> {
        let mut table: toml::Table = match path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
                text.parse()
                    .map_err(|e| format!("cannot parse config {}: {e}", path.display()))?
            }
            None => toml::Table::new(),
        };
        for entry in overrides {
            let (key, raw_value) = entry
                .split_once('=')
                .ok_or_else(|| format!("override `{entry}` is not of the form key=value"))?;
            let key = key.trim();
            let raw_value = raw_value.trim();
            let value = parse_override_value(raw_value)
                .ok_or_else(|| format!("cannot parse override value for key `{key}`: {raw_value}"))?;
            table.insert(key.to_string(), value);
        }
        if let Some(seed) = seed {
            table.insert("master_seed".into(), toml::Value::Integer(seed as i64));
        }
        let config: Config = table
            .try_into()
            .map_err(|e| format!("invalid config: {e}"))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), String> {
        if self.distribution != "gaussian" {
            return Err(format!(
                "key `distribution`: only \"gaussian\" is supported, got \"{}\"",
                self.distribution
            ));
        }
        if self.snr_db.is_empty() {
            return Err("key `snr_db`: list must not be empty".into());
        }
        if !self.snr_db.iter().all(|v| v.is_finite()) {
            return Err("key `snr_db`: values must be finite".into());
        }
        self.m.validate()?;
        if self.n_max == 0 {
            return Err("key `n_max`: must be >= 1".into());
        }
        if let ChangeTimeCfg::At(m) = self.m {
            if m > self.n_max {
                return Err(format!(
                    "key `m`: change time {m} exceeds n_max {}",
                    self.n_max
                ));
            }
        }
        self.a.validate("a")?;
        self.c.validate("c")?;
        self.b.validate("b")?;
        if !(self.target_pfa > 0.0 && self.target_pfa < 1.0) {
            return Err(format!(
                "key `target_pfa`: must lie in (0, 1), got {}",
                self.target_pfa
            ));
        }
        Ok(())
    }

    /// Serializes the resolved configuration for the echo file.
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// `--set` values are parsed as TOML fragments; bare words fall back to
/// strings so `--set b=auto` works without extra quoting.
fn parse_override_value(raw: &str) -> Option<toml::Value> {
    let doc = format!("value = {raw}");
    if let Ok(table) = doc.parse::<toml::Table>() {
        return table.get("value").cloned();
    }
    let quoted = format!("value = \"{raw}\"");
    quoted
        .parse::<toml::Table>()
        .ok()
        .and_then(|t| t.get("value").cloned())
}
