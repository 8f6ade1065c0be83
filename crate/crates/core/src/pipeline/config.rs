//! Run configuration.
//!
//! The file format is one `key = value` assignment per line with dotted
//! section names, e.g.
//!
//! ```text
//! master_seed = 7
//! designer.n_pulses = 6
//! ga.m = 1
//! grid.ratio = 5000.0
//! trap_laser.omega_min = 490088.45396000776
//! sweep.ratios = [50.0, 500.0, 5000.0]
//! ```
//!
//! Values use TOML syntax (numbers, quoted strings, booleans, arrays) and `#`
//! starts a comment. Omitted keys take their defaults, unknown keys are
//! rejected. Overrides given as `key=value` accept bare strings as well.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::budget::BudgetConfig;
use crate::constants::TARGET_OMEGA;
use crate::designer::DesignerConfig;
use crate::error::{Error, Result};
use crate::ga::{GaConfig, GridSpec};
use crate::kinematics::TrapLaserSpec;

/// Environment variable that overrides `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "KICKGATE_OUTPUT_DIR";

/// Parameter lists for the sweep verbs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Kick counts of the scaling sweep.
    pub scaling_n: Vec<usize>,
    /// Grid ratios `R/ω` of the error sweep.
    pub ratios: Vec<f64>,
    /// Independent seeds per ratio.
    pub seeds: usize,
    /// Batch sizes of the batching sweep.
    pub batch_m: Vec<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            scaling_n: vec![4, 6, 8, 10, 12, 16, 20, 25, 30],
            ratios: vec![50.0, 500.0, 5000.0],
            seeds: 10,
            batch_m: vec![1, 2, 3],
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scaling_n.iter().any(|&n| n < 3) {
            return Err(Error::config("sweep.scaling_n", "every kick count must be at least 3"));
        }
        if self.ratios.iter().any(|&r| !(r.is_finite() && r > 0.0)) {
            return Err(Error::config("sweep.ratios", "ratios must be positive"));
        }
        if self.seeds == 0 {
            return Err(Error::config("sweep.seeds", "must be at least 1"));
        }
        if self.batch_m.contains(&0) {
            return Err(Error::config("sweep.batch_m", "batch sizes must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub master_seed: u64,
    /// Trap frequency the tuning aims for, rad/s.
    pub target_omega: f64,
    pub output_dir: PathBuf,
    /// Largest `ε_dimless` a finished design may have.
    pub closure_tolerance: f64,
    /// Largest relative miss of the phase-frequency relation.
    pub phase_tolerance: f64,
    pub trap_laser: TrapLaserSpec,
    pub designer: DesignerConfig,
    pub ga: GaConfig,
    pub grid: GridSpec,
    pub budget: BudgetConfig,
    pub sweep: SweepConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            target_omega: TARGET_OMEGA,
            output_dir: PathBuf::from("out"),
            closure_tolerance: 1e-6,
            phase_tolerance: 1e-12,
            trap_laser: TrapLaserSpec::default(),
            designer: DesignerConfig::default(),
            ga: GaConfig::default(),
            grid: GridSpec::default(),
            budget: BudgetConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.master_seed > i64::MAX as u64 {
            return Err(Error::config("master_seed", format!("must be at most {}", i64::MAX)));
        }
        if !(self.target_omega.is_finite() && self.target_omega > 0.0) {
            return Err(Error::config("target_omega", format!("must be positive, got {}", self.target_omega)));
        }
        if self.closure_tolerance.is_nan() || self.closure_tolerance <= 0.0 {
            return Err(Error::config("closure_tolerance", "must be positive"));
        }
        if self.phase_tolerance.is_nan() || self.phase_tolerance <= 0.0 {
            return Err(Error::config("phase_tolerance", "must be positive"));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(Error::config("output_dir", "must not be empty"));
        }
        self.trap_laser.validate()?;
        for w in self.trap_laser.warnings() {
            log::warn!("{w}");
        }
        self.designer.validate()?;
        self.ga.validate()?;
        self.grid.validate()?;
        self.budget.validate()?;
        self.sweep.validate()
    }

    /// Flat `key = value` text that [`parse_config`] reads back to `self`.
    pub fn to_text(&self) -> String {
        let table = Value::try_from(self).expect("configuration serializes to a table");
        let mut lines = Vec::new();
        flatten(&table, "", &mut |key, v| lines.push(format!("{key} = {}", format_value(v))));
        lines.push(String::new());
        lines.join("\n")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// SHA-256 of the canonical text form, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

/// Split `key=value` into its parts.
pub fn parse_override(arg: &str) -> Result<(String, String)> {
    match arg.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(Error::ConfigParse(format!("override `{arg}` is not of the form key=value"))),
    }
}

/// Parse configuration text and apply `overrides` on top, in order.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<PipelineConfig> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| Error::ConfigParse(e.to_string()))?;
    for (key, raw) in overrides {
        set_dotted(&mut table, key, override_value(raw))?;
    }
    let known = known_keys();
    let mut unknown = None;
    flatten(&Value::Table(table.clone()), "", &mut |key, _| {
        if unknown.is_none() && !known.contains(key) {
            unknown = Some(key.to_string());
        }
    });
    if let Some(key) = unknown {
        return Err(Error::config(key, "unknown key"));
    }
    let cfg: PipelineConfig = Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::ConfigParse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Read a config file, or start from defaults without one.
/// `KICKGATE_OUTPUT_DIR` overrides the file and `overrides` override both.
pub fn load_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<PipelineConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)?,
        None => String::new(),
    };
    let mut all = Vec::new();
    if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
        all.push(("output_dir".to_string(), Value::String(dir).to_string()));
    }
    all.extend_from_slice(overrides);
    parse_config(&text, &all)
}

fn override_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn set_dotted(table: &mut Table, key: &str, value: Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("split yields at least one part");
    let mut at = table;
    for (depth, part) in parts.iter().enumerate() {
        let entry = at.entry(part.to_string()).or_insert_with(|| Value::Table(Table::new()));
        at = match entry {
            Value::Table(t) => t,
            _ => return Err(Error::config(parts[..=depth].join("."), "is a value, not a section")),
        };
    }
    at.insert(last.to_string(), value);
    Ok(())
}

fn known_keys() -> BTreeSet<String> {
    // Populate the optional fields so that they serialize too.
    let mut full = PipelineConfig::default();
    full.ga.m_max = Some(0);
    full.designer.min_separation = Some(0.0);
    full.budget.excited_time = Some(0.0);
    let mut keys = BTreeSet::new();
    flatten(&Value::try_from(&full).expect("configuration serializes"), "", &mut |k, _| {
        keys.insert(k.to_string());
    });
    keys
}

fn flatten(value: &Value, prefix: &str, visit: &mut dyn FnMut(&str, &Value)) {
    match value {
        Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(v, &key, visit);
            }
        }
        leaf => visit(prefix, leaf),
    }
}

fn format_value(v: &Value) -> String {
    match v {
        // Debug output is the shortest string that parses back to the same f64.
        Value::Float(f) => format!("{f:?}"),
        Value::Array(items) => format!("[{}]", items.iter().map(format_value).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}
