//! Experiment configuration: the stream grid, the detector roster and
//! output settings, read from JSON.

use std::collections::HashSet;
use std::path::PathBuf;

use padd_core::baselines::{Adwin, Cddd, DdmParams, EddmParams, ProtocolOptions};
use padd_core::stream::DEFAULT_MEAN_RANGE;
use padd_core::{Dynamics, PaddParams, StreamSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{BenchError, Result};

pub const REGISTERED_DETECTORS: [&str; 5] = ["padd", "ddm", "eddm", "adwin", "cddd"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StreamGrid {
    pub dynamics: Vec<Dynamics>,
    pub n_drifts: Vec<usize>,
    pub n_features: Vec<usize>,
    pub replications: usize,
    pub n_chunks: usize,
    pub chunk_size: usize,
    pub concept_mean_range: f64,
}

impl Default for StreamGrid {
    fn default() -> Self {
        Self {
            dynamics: vec![Dynamics::Sudden, Dynamics::Gradual],
            n_drifts: vec![3, 5, 10, 15],
            n_features: vec![30, 60, 90],
            replications: 10,
            n_chunks: 250,
            chunk_size: 200,
            concept_mean_range: DEFAULT_MEAN_RANGE,
        }
    }
}

/// One stream family of the grid; replications share it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamConfig {
    pub dynamics: Dynamics,
    pub n_drifts: usize,
    pub n_features: usize,
}

impl StreamConfig {
    /// e.g. `sudden-d10-f30`
    pub fn stream_id(&self) -> String {
        format!("{}-d{}-f{}", self.dynamics, self.n_drifts, self.n_features)
    }

    pub fn parse_id(id: &str) -> Option<Self> {
        let mut parts = id.split('-');
        let dynamics = parts.next()?.parse().ok()?;
        let n_drifts = parts.next()?.strip_prefix('d')?.parse().ok()?;
        let n_features = parts.next()?.strip_prefix('f')?.parse().ok()?;
        if parts.next().is_some() {
            return None;
        }
        Some(Self {
            dynamics,
            n_drifts,
            n_features,
        })
    }
}

impl StreamGrid {
    /// All families, dynamics outermost, then drift count, then features.
    pub fn configs(&self) -> Vec<StreamConfig> {
        let mut out = Vec::new();
        for &dynamics in &self.dynamics {
            for &n_drifts in &self.n_drifts {
                for &n_features in &self.n_features {
                    out.push(StreamConfig {
                        dynamics,
                        n_drifts,
                        n_features,
                    });
                }
            }
        }
        out
    }

    pub fn spec(&self, config: &StreamConfig, seed: u64) -> StreamSpec {
        let mut spec = StreamSpec::new(config.dynamics, config.n_drifts, config.n_features, seed);
        spec.n_chunks = self.n_chunks;
        spec.chunk_size = self.chunk_size;
        spec.concept_mean_range = self.concept_mean_range;
        spec
    }

    fn validate(&self) -> Result<()> {
        for config in self.configs() {
            if config.n_drifts == 0 {
                return Err(BenchError::config(
                    "streams.n_drifts",
                    "drift counts must be >= 1 (metrics need ground truth)",
                ));
            }
            self.spec(&config, 0).validate().map_err(|e| {
                BenchError::config("streams", format!("{}: {e}", config.stream_id()))
            })?;
        }
        Ok(())
    }
}

/// PADD settings. `alpha` and `theta` default to the preset matching the
/// stream dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PaddOptions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub e: usize,
    pub r: usize,
    pub s: usize,
    pub n_hidden: usize,
}

impl Default for PaddOptions {
    fn default() -> Self {
        let p = PaddParams::sudden();
        Self {
            alpha: None,
            theta: None,
            e: p.e,
            r: p.r,
            s: p.s,
            n_hidden: p.n_hidden,
        }
    }
}

impl PaddOptions {
    pub fn params(&self, dynamics: Dynamics) -> PaddParams {
        let preset = match dynamics {
            Dynamics::Sudden => PaddParams::sudden(),
            Dynamics::Gradual => PaddParams::gradual(),
        };
        PaddParams {
            alpha: self.alpha.unwrap_or(preset.alpha),
            theta: self.theta.unwrap_or(preset.theta),
            e: self.e,
            r: self.r,
            s: self.s,
            n_hidden: self.n_hidden,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DdmOptions {
    pub min_samples: usize,
    pub warning_level: f64,
    pub drift_level: f64,
    pub reset_classifier_on_drift: bool,
}

impl Default for DdmOptions {
    fn default() -> Self {
        let p = DdmParams::default();
        Self {
            min_samples: p.min_samples,
            warning_level: p.warning_level,
            drift_level: p.drift_level,
            reset_classifier_on_drift: true,
        }
    }
}

impl DdmOptions {
    pub fn params(&self) -> DdmParams {
        DdmParams {
            min_samples: self.min_samples,
            warning_level: self.warning_level,
            drift_level: self.drift_level,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EddmOptions {
    pub beta: f64,
    pub warning: f64,
    pub min_errors: usize,
    pub reset_classifier_on_drift: bool,
}

impl Default for EddmOptions {
    fn default() -> Self {
        let p = EddmParams::default();
        Self {
            beta: p.beta,
            warning: p.warning,
            min_errors: p.min_errors,
            reset_classifier_on_drift: true,
        }
    }
}

impl EddmOptions {
    pub fn params(&self) -> EddmParams {
        EddmParams {
            beta: self.beta,
            warning: self.warning,
            min_errors: self.min_errors,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdwinOptions {
    pub delta: f64,
    pub reset_classifier_on_drift: bool,
}

impl Default for AdwinOptions {
    fn default() -> Self {
        Self {
            delta: padd_core::baselines::adwin::DEFAULT_DELTA,
            reset_classifier_on_drift: true,
        }
    }
}

/// CDDD settings; `sensitivity` defaults to the drift-density preset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CdddOptions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<f64>,
}

impl CdddOptions {
    pub fn sensitivity(&self, n_drifts: usize) -> f64 {
        self.sensitivity
            .unwrap_or_else(|| Cddd::sensitivity_for(n_drifts))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DetectorKind {
    Padd(PaddOptions),
    Ddm(DdmOptions),
    Eddm(EddmOptions),
    Adwin(AdwinOptions),
    Cddd(CdddOptions),
}

impl DetectorKind {
    pub fn name(&self) -> &'static str {
        match self {
            DetectorKind::Padd(_) => "padd",
            DetectorKind::Ddm(_) => "ddm",
            DetectorKind::Eddm(_) => "eddm",
            DetectorKind::Adwin(_) => "adwin",
            DetectorKind::Cddd(_) => "cddd",
        }
    }

    pub fn default_for(name: &str) -> Option<Self> {
        Some(match name {
            "padd" => DetectorKind::Padd(PaddOptions::default()),
            "ddm" => DetectorKind::Ddm(DdmOptions::default()),
            "eddm" => DetectorKind::Eddm(EddmOptions::default()),
            "adwin" => DetectorKind::Adwin(AdwinOptions::default()),
            "cddd" => DetectorKind::Cddd(CdddOptions::default()),
            _ => return None,
        })
    }

    pub fn protocol_options(&self) -> ProtocolOptions {
        let reset = match self {
            DetectorKind::Ddm(o) => o.reset_classifier_on_drift,
            DetectorKind::Eddm(o) => o.reset_classifier_on_drift,
            DetectorKind::Adwin(o) => o.reset_classifier_on_drift,
            _ => true,
        };
        ProtocolOptions {
            reset_classifier_on_drift: reset,
        }
    }

    fn options_value(&self) -> Value {
        let value = match self {
            DetectorKind::Padd(o) => serde_json::to_value(o),
            DetectorKind::Ddm(o) => serde_json::to_value(o),
            DetectorKind::Eddm(o) => serde_json::to_value(o),
            DetectorKind::Adwin(o) => serde_json::to_value(o),
            DetectorKind::Cddd(o) => serde_json::to_value(o),
        };
        value.expect("options serialize to JSON")
    }

    fn validate(&self, path: &str) -> Result<()> {
        let fail = |msg: String| Err(BenchError::config(path, msg));
        match self {
            DetectorKind::Padd(o) => {
                for dynamics in [Dynamics::Sudden, Dynamics::Gradual] {
                    if let Err(e) = o.params(dynamics).validate() {
                        return fail(e.to_string());
                    }
                }
            }
            DetectorKind::Ddm(o) => {
                if !(o.warning_level > 0.0 && o.warning_level <= o.drift_level) {
                    return fail("ddm needs 0 < warning_level <= drift_level".into());
                }
            }
            DetectorKind::Eddm(o) => {
                if !(o.beta > 0.0 && o.beta <= o.warning && o.warning <= 1.0) {
                    return fail("eddm needs 0 < beta <= warning <= 1".into());
                }
            }
            DetectorKind::Adwin(o) => {
                if let Err(e) = Adwin::new(o.delta) {
                    return fail(e.to_string());
                }
            }
            DetectorKind::Cddd(o) => {
                if let Some(s) = o.sensitivity {
                    if let Err(e) = Cddd::new(s) {
                        return fail(e.to_string());
                    }
                }
            }
        }
        Ok(())
    }
}

/// A roster entry; `label` names the detector in every output file.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorEntry {
    pub label: String,
    pub kind: DetectorKind,
}

impl DetectorEntry {
    pub fn named(name: &str) -> Option<Self> {
        DetectorKind::default_for(name).map(|kind| Self {
            label: name.to_string(),
            kind,
        })
    }

    fn to_value(&self) -> Value {
        let mut map = Map::new();
        map.insert("name".into(), Value::from(self.kind.name()));
        map.insert("label".into(), Value::from(self.label.clone()));
        if let Value::Object(options) = self.kind.options_value() {
            map.extend(options);
        }
        Value::Object(map)
    }
}

pub fn default_roster() -> Vec<DetectorEntry> {
    REGISTERED_DETECTORS
        .iter()
        .map(|name| DetectorEntry::named(name).expect("registered"))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub base_seed: u64,
    pub streams: StreamGrid,
    pub detectors: Vec<DetectorEntry>,
    pub output_dir: PathBuf,
    /// Worker threads; `None` uses all cores.
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    /// Default grid and roster.
    pub fn new(base_seed: u64) -> Self {
        Self {
            base_seed,
            streams: StreamGrid::default(),
            detectors: default_roster(),
            output_dir: PathBuf::from("results"),
            jobs: None,
        }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "base_seed": self.base_seed,
            "streams": self.streams,
            "detectors": self.detectors.iter().map(DetectorEntry::to_value).collect::<Vec<_>>(),
            "output_dir": self.output_dir,
            "jobs": self.jobs,
        })
    }

    /// Fully expanded document; parsing it yields `self` again.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.streams.validate()?;
        let mut labels = HashSet::new();
        for (i, entry) in self.detectors.iter().enumerate() {
            if entry.label.is_empty() || entry.label.contains([',', '"', '\n']) {
                return Err(BenchError::config(
                    format!("detectors[{i}].label"),
                    "labels must be non-empty and free of commas, quotes and newlines",
                ));
            }
            if !labels.insert(entry.label.as_str()) {
                return Err(BenchError::config(
                    format!("detectors[{i}].label"),
                    format!("duplicate detector label `{}`", entry.label),
                ));
            }
            entry.kind.validate(&format!("detectors[{i}]"))?;
        }
        if self.jobs == Some(0) {
            return Err(BenchError::config("jobs", "jobs must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    base_seed: u64,
    #[serde(default)]
    streams: StreamGrid,
    #[serde(default)]
    detectors: Option<Vec<Value>>,
    #[serde(default)]
    output_dir: Option<PathBuf>,
    #[serde(default)]
    jobs: Option<usize>,
}

fn options<T: DeserializeOwned>(map: Map<String, Value>, path: &str) -> Result<T> {
    serde_path_to_error::deserialize(Value::Object(map)).map_err(|e| {
        let inner = e.path().to_string();
        let full = if inner == "." {
            path.to_string()
        } else {
            format!("{path}.{inner}")
        };
        BenchError::config(full, e.into_inner().to_string())
    })
}

fn parse_entry(index: usize, value: Value) -> Result<DetectorEntry> {
    let path = format!("detectors[{index}]");
    let (name, label, map) = match value {
        Value::String(name) => (name, None, Map::new()),
        Value::Object(mut map) => {
            let name = match map.remove("name") {
                Some(Value::String(name)) => name,
                _ => {
                    return Err(BenchError::config(
                        format!("{path}.name"),
                        "expected a detector name string",
                    ))
                }
            };
            let label = match map.remove("label") {
                None => None,
                Some(Value::String(label)) => Some(label),
                Some(_) => {
                    return Err(BenchError::config(
                        format!("{path}.label"),
                        "expected a string",
                    ))
                }
            };
            (name, label, map)
        }
        _ => {
            return Err(BenchError::config(
                path,
                "expected a detector name or an object with a `name` field",
            ))
        }
    };
    let kind = match name.as_str() {
        "padd" => DetectorKind::Padd(options(map, &path)?),
        "ddm" => DetectorKind::Ddm(options(map, &path)?),
        "eddm" => DetectorKind::Eddm(options(map, &path)?),
        "adwin" => DetectorKind::Adwin(options(map, &path)?),
        "cddd" => DetectorKind::Cddd(options(map, &path)?),
        _ => return Err(BenchError::Roster { name, index }),
    };
    Ok(DetectorEntry {
        label: label.unwrap_or(name),
        kind,
    })
}

/// Parse and validate a JSON experiment document, filling defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| BenchError::config(e.path().to_string(), e.into_inner().to_string()))?;
    de.end()
        .map_err(|e| BenchError::config(".", e.to_string()))?;
    let detectors = match raw.detectors {
        None => default_roster(),
        Some(values) => values
            .into_iter()
            .enumerate()
            .map(|(i, v)| parse_entry(i, v))
            .collect::<Result<_>>()?,
    };
    let config = ExperimentConfig {
        base_seed: raw.base_seed,
        streams: raw.streams,
        detectors,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("results")),
        jobs: raw.jobs,
    };
    config.validate()?;
    Ok(config)
}
