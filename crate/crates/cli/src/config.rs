//! Run configuration: a versioned JSON document with dotted-path overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Exact,
    Compare,
    NfSolve,
    Invariants,
    Check,
    Blowup,
    Constants,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Exact => "exact",
            Command::Compare => "compare",
            Command::NfSolve => "nf-solve",
            Command::Invariants => "invariants",
            Command::Check => "check",
            Command::Blowup => "blowup",
            Command::Constants => "constants",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        serde_json::from_value(Value::String(name.to_string())).ok()
    }
}

/// Initial data presets; every preset is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    /// `φ = a e^{ikx}`.
    SingleMode { mode: i64, re: f64, im: f64 },
    /// Modes `±1, ±2` of amplitude `ε/2`.
    TwoCosine { eps: f64 },
    /// ChaCha8 coefficients in `[-1, 1]²`, damped by `|k|^{-decay}` and
    /// scaled to `norm` in the configured `FL^{s,p}`.
    RandomSeeded { seed: u64, norm: f64, decay: f64 },
    /// A `SpectralState` JSON document.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlConfig {
    pub s: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Pairwise sup-t `L²` gap in `compare`.
    pub compare: f64,
    /// `Q_k` drift on exact-solver trajectories.
    pub drift_exact: f64,
    /// `Q_k` drift on RK4 trajectories.
    pub drift_rk4: f64,
    /// Relative finite-difference residual of simulated trajectories.
    pub residual: f64,
    pub picard: f64,
    pub blowup_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            compare: 1e-7,
            drift_exact: 1e-9,
            drift_rk4: 1e-6,
            residual: 1e-8,
            picard: 1e-13,
            blowup_residual: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PicardConfig {
    /// Quadrature nodes; `0` uses the RK4 sample count.
    pub quad_nodes: usize,
    pub max_iter: usize,
    /// Iterate beyond the certified smallness threshold, with a warning.
    pub allow_large_data: bool,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            quad_nodes: 0,
            max_iter: 100,
            allow_large_data: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectorySource {
    Exact,
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlowupConfig {
    pub eps_list: Vec<f64>,
    /// Finite exponents; `null` entries stand for `p = ∞`.
    pub p_list: Vec<Option<f64>>,
    pub times: Vec<f64>,
    pub grid: usize,
    pub residual_t: f64,
    pub residual_dt: f64,
}

impl Default for BlowupConfig {
    fn default() -> Self {
        Self {
            eps_list: vec![1e-1, 1e-2, 1e-3],
            p_list: vec![Some(1.0), Some(2.0), None],
            times: vec![0.0, 0.5, 1.0, 1.4],
            grid: 1024,
            residual_t: 0.1,
            residual_dt: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub command: Command,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    #[serde(rename = "N_max")]
    pub n_max: usize,
    pub fl: FlConfig,
    pub data: InitialData,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub picard: PicardConfig,
    #[serde(default = "default_source")]
    pub source: TrajectorySource,
    #[serde(default)]
    pub blowup: BlowupConfig,
    /// Project exact solutions onto `|k| <= K` when they spread past it.
    #[serde(default)]
    pub exact_truncation: bool,
    /// Samples kept from RK4 runs.
    #[serde(default = "default_max_samples")]
    pub max_samples: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_source() -> TrajectorySource {
    TrajectorySource::Exact
}

fn default_max_samples() -> usize {
    4096
}

impl RunConfig {
    /// The reference setting: two-cosine data, `ε = 0.05`, `K = 32`, `T = 1`,
    /// `dt = 1e-4`, `N_max = 10`.
    pub fn defaults(command: Command) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            k_max: 32,
            dt: 1e-4,
            t_final: 1.0,
            n_max: 10,
            fl: FlConfig { s: 0.0, p: 2.0 },
            data: InitialData::TwoCosine { eps: 0.05 },
            tolerances: Tolerances::default(),
            picard: PicardConfig::default(),
            source: TrajectorySource::Exact,
            blowup: BlowupConfig::default(),
            exact_truncation: false,
            max_samples: default_max_samples(),
            output_dir: None,
        }
    }

    pub fn from_value(value: Value) -> Result<Self, CliError> {
        let config: RunConfig = serde_json::from_value(value).map_err(|e| CliError::config("<document>", e))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Value, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config("--config", e))?;
        serde_json::from_str(&text).map_err(|e| CliError::config("--config", e))
    }

    /// Field-level checks beyond the schema.
    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(CliError::field(name, format!("must be positive and finite, got {x}")))
            }
        };
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::field(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        if self.k_max == 0 {
            return Err(CliError::field("K", "must be at least 1"));
        }
        if self.n_max < 2 {
            return Err(CliError::field("N_max", "must be at least 2"));
        }
        if self.max_samples < 2 {
            return Err(CliError::field("max_samples", "must be at least 2"));
        }
        positive("dt", self.dt)?;
        positive("T", self.t_final)?;
        if !(self.fl.p >= 1.0) || self.fl.s.is_nan() {
            return Err(CliError::field("fl.p", format!("need p >= 1, got {}", self.fl.p)));
        }
        let tol = &self.tolerances;
        for (name, x) in [
            ("tolerances.compare", tol.compare),
            ("tolerances.drift_exact", tol.drift_exact),
            ("tolerances.drift_rk4", tol.drift_rk4),
            ("tolerances.residual", tol.residual),
            ("tolerances.picard", tol.picard),
            ("tolerances.blowup_residual", tol.blowup_residual),
        ] {
            positive(name, x)?;
        }
        match &self.data {
            InitialData::SingleMode { mode, re, im } => {
                if *mode == 0 || mode.unsigned_abs() as usize > self.k_max {
                    return Err(CliError::field(
                        "data.mode",
                        format!("need 1 <= |mode| <= K, got {mode}"),
                    ));
                }
                if !(re.is_finite() && im.is_finite()) {
                    return Err(CliError::field("data.re", "amplitude must be finite"));
                }
            }
            InitialData::TwoCosine { eps } => {
                if !eps.is_finite() {
                    return Err(CliError::field("data.eps", "must be finite"));
                }
                if self.k_max < 2 {
                    return Err(CliError::field("K", "two-cosine data needs K >= 2"));
                }
            }
            InitialData::RandomSeeded { norm, decay, .. } => {
                if !(*norm >= 0.0 && norm.is_finite()) {
                    return Err(CliError::field("data.norm", "must be nonnegative and finite"));
                }
                if !decay.is_finite() {
                    return Err(CliError::field("data.decay", "must be finite"));
                }
            }
            InitialData::File { .. } => {}
        }
        let b = &self.blowup;
        if b.eps_list.iter().any(|e| !(*e > 0.0 && *e <= 0.5)) {
            return Err(CliError::field("blowup.eps_list", "entries must lie in (0, 0.5]"));
        }
        if b.p_list.iter().flatten().any(|p| !(*p >= 1.0)) {
            return Err(CliError::field("blowup.p_list", "entries must be >= 1 or null"));
        }
        if !b.grid.is_power_of_two() || b.grid < 16 {
            return Err(CliError::field("blowup.grid", "must be a power of two >= 16"));
        }
        positive("blowup.residual_dt", b.residual_dt)?;
        Ok(())
    }
}

/// Parses `--key.path=value`. The value is read as JSON when possible and
/// as a string otherwise.
pub fn parse_override(arg: &str) -> Result<(String, Value), CliError> {
    let body = arg
        .strip_prefix("--")
        .ok_or_else(|| CliError::field(arg, "overrides look like --key.path=value"))?;
    let (key, raw) = body
        .split_once('=')
        .ok_or_else(|| CliError::field(body, "override needs '=value'"))?;
    if key.is_empty() {
        return Err(CliError::field(arg, "empty key"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.to_string(), value))
}

/// Sets `path` (dot-separated, numeric segments index arrays) inside `doc`,
/// creating objects as needed. Setting `data.preset` starts a fresh data
/// object so the previous preset's fields do not linger.
pub fn apply_override(doc: &mut Value, path: &str, value: Value) -> Result<(), CliError> {
    if path == "data.preset" {
        doc["data"] = serde_json::json!({ "preset": value });
        return Ok(());
    }
    let mut node = doc;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        if let Value::Array(items) = node {
            let idx: usize = seg
                .parse()
                .map_err(|_| CliError::field(path, format!("'{seg}' is not an array index")))?;
            let len = items.len();
            let slot = items
                .get_mut(idx)
                .ok_or_else(|| CliError::field(path, format!("index {idx} out of range ({len})")))?;
            if last {
                *slot = value;
                return Ok(());
            }
            node = slot;
            continue;
        }
        if !node.is_object() {
            *node = Value::Object(Default::default());
        }
        let map = node.as_object_mut().expect("object");
        if last {
            map.insert(seg.to_string(), value);
            return Ok(());
        }
        node = map
            .entry(seg.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

/// RFC 7386 merge of `patch` into `doc`.
pub fn merge(doc: &mut Value, patch: &Value) {
    match (doc, patch) {
        (Value::Object(target), Value::Object(source)) => {
            for (k, v) in source {
                if v.is_null() {
                    target.remove(k);
                } else {
                    merge(target.entry(k.clone()).or_insert(Value::Null), v);
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}
