//! Experiment configuration.
//!
//! A run is configured by layering, in order: the built-in defaults, an
//! optional TOML file, and `--set key=value` overrides. The merged document is
//! deserialised strictly (unknown keys are errors) and re-serialised into a
//! canonical snapshot whose SHA-256 identifies the run in every output file.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::assembly::{ModelSpec, NetSpec};
use crate::encoders::{EncodingSpec, ScenarioSpec};
use crate::train::TrainHyper;
use crate::{Error, Result};

/// The cosine toy experiment: one small abstraction net per (psi, seed).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosineConfig {
    pub psi: Vec<f64>,
    pub seeds: usize,
    pub weight_range: f64,
    pub net: NetSpec,
}

impl Default for CosineConfig {
    fn default() -> Self {
        CosineConfig {
            psi: vec![0.0, 1e-5, 5e-5, 2e-4],
            seeds: 20,
            weight_range: 0.025,
            net: NetSpec {
                io: 2,
                cf: 10,
                cs: 4,
                csc: 2,
                tau_io: 2.0,
                tau_cf: 5.0,
                tau_cs: 30.0,
                csc_init_range: 1.0,
                hyper: TrainHyper { max_epochs: 20_000, ..TrainHyper::default() },
            },
        }
    }
}

/// A one-parameter sweep over the multi-modal model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// An alias from [`ALIASES`] or a dotted config key.
    pub parameter: String,
    pub grid: Vec<f64>,
    pub seeds: usize,
    pub folds: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            parameter: "psi_s".into(),
            grid: vec![1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2],
            seeds: 10,
            folds: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub model: ModelSpec,
    pub scenario: ScenarioSpec,
    pub encoding: EncodingSpec,
    pub cosine: CosineConfig,
    pub sweep: SweepConfig,
}

/// Short names for the parameters that are swept most often.
pub const ALIASES: &[(&str, &str)] = &[
    ("psi_s", "model.somatosensory.hyper.psi"),
    ("psi_v", "model.visual.hyper.psi"),
    ("alpha", "model.auditory.hyper.alpha"),
    ("tau_cs", "model.somatosensory.tau_cs"),
];

pub fn resolve_alias(key: &str) -> &str {
    ALIASES.iter().find(|(a, _)| *a == key).map_or(key, |(_, k)| k)
}

fn config_err(m: impl Into<String>) -> Error {
    Error::Config(m.into())
}

fn merge(base: &mut Table, over: Table, path: &str) -> Result<()> {
    for (k, v) in over {
        let here = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o, &here)?,
            (Some(Value::Table(_)), _) => return Err(config_err(format!("'{here}' must be a table"))),
            (Some(slot), v) => *slot = v,
            (None, _) => return Err(config_err(format!("unknown key '{here}'"))),
        }
    }
    Ok(())
}

/// Parses the right-hand side of `--set`: any TOML value, or a bare string.
fn parse_value(text: &str) -> Value {
    match format!("v = {text}").parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(text.into())),
        Err(_) => Value::String(text.into()),
    }
}

/// Sets a dotted key (aliases allowed) that must already exist.
pub fn set_path(doc: &mut Table, key: &str, value: Value) -> Result<()> {
    let full = resolve_alias(key.trim());
    let mut parts: Vec<&str> = full.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| config_err("empty --set key"))?;
    let mut table = doc;
    for p in parts {
        table = match table.get_mut(p) {
            Some(Value::Table(t)) => t,
            _ => return Err(config_err(format!("unknown key '{full}'"))),
        };
    }
    match table.get_mut(last) {
        Some(Value::Table(_)) => Err(config_err(format!("'{full}' is a table, set one of its keys"))),
        Some(slot) => {
            *slot = value;
            Ok(())
        }
        None => Err(config_err(format!("unknown key '{full}'"))),
    }
}

impl ExperimentConfig {
    /// Defaults, then `file_text`, then `overrides` of the form `key=value`.
    pub fn resolve(file_text: Option<&str>, overrides: &[String]) -> Result<Self> {
        let mut doc = ExperimentConfig::default().to_table()?;
        if let Some(text) = file_text {
            let user: Table = text.parse().map_err(|e| config_err(format!("config file: {e}")))?;
            merge(&mut doc, user, "")?;
        }
        for o in overrides {
            let (k, v) = o.split_once('=').ok_or_else(|| config_err(format!("--set expects KEY=VALUE, got '{o}'")))?;
            set_path(&mut doc, k, parse_value(v.trim()))?;
        }
        Self::from_table(doc)
    }

    pub fn from_table(doc: Table) -> Result<Self> {
        let cfg: ExperimentConfig = Value::Table(doc).try_into().map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_table(&self) -> Result<Table> {
        Table::try_from(self).map_err(|e| Error::Serde(e.to_string()))
    }

    /// The same config with one dotted key (or alias) replaced.
    pub fn with_value(&self, key: &str, value: f64) -> Result<Self> {
        let mut doc = self.to_table()?;
        // Integer-typed keys need an integer value.
        let v = if value.fract() == 0.0 && value.abs() < 1e15 && !key_is_float(&doc, key) {
            Value::Integer(value as i64)
        } else {
            Value::Float(value)
        };
        set_path(&mut doc, key, v)?;
        Self::from_table(doc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seed > i64::MAX as u64 {
            return Err(config_err("seed must fit in 63 bits"));
        }
        self.model.validate()?;
        self.scenario.validate().map_err(|e| config_err(format!("scenario: {e}")))?;
        self.encoding.validate().map_err(|e| config_err(format!("encoding: {e}")))?;
        if self.encoding.io_count != self.model.auditory.io {
            return Err(config_err(format!(
                "encoding.io_count {} differs from model.auditory.io {}",
                self.encoding.io_count, self.model.auditory.io
            )));
        }
        let c = &self.cosine;
        if c.psi.is_empty() || c.psi.iter().any(|p| !(0.0..1.0).contains(p)) {
            return Err(config_err("cosine.psi needs values in [0, 1)"));
        }
        if c.seeds == 0 || c.net.io != 2 {
            return Err(config_err("cosine needs seeds >= 1 and net.io = 2"));
        }
        if !(c.weight_range > 0.0 && c.weight_range.is_finite()) {
            return Err(config_err("cosine.weight_range must be positive"));
        }
        c.net.topology(crate::net::Direction::ContextAbstraction, crate::net::IoActivation::Sigmoid)?;
        c.net.hyper.validate()?;
        let s = &self.sweep;
        if s.grid.is_empty() || s.seeds == 0 || s.folds == 0 {
            return Err(config_err("sweep needs a non-empty grid, seeds >= 1 and folds >= 1"));
        }
        Ok(())
    }

    /// Canonical TOML text of the resolved config.
    pub fn snapshot(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }

    /// Hex SHA-256 of the snapshot.
    pub fn hash(&self) -> Result<String> {
        Ok(hex(&Sha256::digest(self.snapshot()?.as_bytes())))
    }
}

fn key_is_float(doc: &Table, key: &str) -> bool {
    let mut cur = doc;
    let full = resolve_alias(key);
    let mut parts = full.split('.').peekable();
    while let Some(p) = parts.next() {
        match (cur.get(p), parts.peek()) {
            (Some(Value::Table(t)), Some(_)) => cur = t,
            (Some(Value::Float(_)), None) => return true,
            _ => return false,
        }
    }
    false
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
