//! Experiment configuration files.
//!
//! A configuration is a JSON document:
//!
//! ```json
//! {
//!   "name": "cat-map",
//!   "system": { "kind": "toral_linear", "matrix": [[3, 1], [1, 1]] },
//!   "measure": "haar",
//!   "estimator": { "radii": [0.2, 0.1, 0.05], "seed": 7 },
//!   "tasks": ["exact", "inverse"],
//!   "output_dir": "out/cat-map"
//! }
//! ```
//!
//! Missing estimator fields take their defaults. See the README for every
//! system kind and its parameters.

use std::fmt;
use std::path::{Path, PathBuf};

use iel_core::estimators::EstimatorConfig;
use iel_core::systems::{Metric, SystemKind, SystemSpec, TrigPolynomial};
use iel_core::{with_system, Endomorphism, ReferenceMeasure, SquareMatrix, System};
use serde::{Deserialize, Serialize};

/// One of the five system families and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    ToralLinear {
        matrix: Vec<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metric: Option<Metric>,
    },
    ExpandingCircle {
        degree: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metric: Option<Metric>,
    },
    FullShift {
        probabilities: Vec<f64>,
        /// Number of stored symbols per point.
        #[serde(default = "default_word_depth")]
        depth: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metric: Option<Metric>,
    },
    FatBaker {
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metric: Option<Metric>,
    },
    Tsujii {
        l: u32,
        lambda: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metric: Option<Metric>,
    },
}

fn default_word_depth() -> usize {
    48
}

impl SystemConfig {
    pub fn to_spec(&self) -> iel_core::Result<SystemSpec> {
        let (kind, metric) = match self {
            SystemConfig::ToralLinear { matrix, metric } => {
                (SystemKind::ToralLinear { matrix: SquareMatrix::from_int_rows(matrix)? }, *metric)
            }
            SystemConfig::ExpandingCircle { degree, metric } => (SystemKind::ExpandingCircle { degree: *degree }, *metric),
            SystemConfig::FullShift { probabilities, depth, metric } => {
                (SystemKind::FullShift { probabilities: probabilities.clone(), depth: *depth }, *metric)
            }
            SystemConfig::FatBaker { beta, metric } => (SystemKind::FatBaker { beta: *beta }, *metric),
            SystemConfig::Tsujii { l, lambda, cos, sin, metric } => {
                (SystemKind::Tsujii { l: *l, lambda: *lambda, f: TrigPolynomial::new(cos, sin)? }, *metric)
            }
        };
        Ok(SystemSpec { kind, metric })
    }
}

/// A pipeline the runner can execute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Exact,
    Forward,
    Inverse,
    Folding,
    Lyapunov,
    Identity,
    Dimension,
    RigidityPair,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Exact => "exact",
            Task::Forward => "forward",
            Task::Inverse => "inverse",
            Task::Folding => "folding",
            Task::Lyapunov => "lyapunov",
            Task::Identity => "identity",
            Task::Dimension => "dimension",
            Task::RigidityPair => "rigidity_pair",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub system: SystemConfig,
    /// Defaults to the system's own reference measure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<ReferenceMeasure>,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    pub tasks: Vec<Task>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("iel-out")
}

/// A configuration problem, with the line it was found on when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub source_name: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{}: {}", self.source_name, l, self.message),
            None => write!(f, "{}: {}", self.source_name, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// 1-based line of the first occurrence of `"key"` in `text`.
fn locate(text: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&quoted)).map(|i| i + 1)
}

/// A validated configuration together with its constructed system.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub spec: SystemSpec,
    pub system: System,
    pub measure: ReferenceMeasure,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { source_name: name.clone(), line: None, message: e.to_string() })?;
        Self::from_str_named(&text, &name)
    }

    /// Parses without validating.
    pub fn from_str_named(text: &str, source_name: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError {
            source_name: source_name.into(),
            line: Some(e.line()).filter(|&l| l > 0),
            message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
        })
    }

    /// Checks every parameter and builds the system; `text` (the source
    /// document, if any) is used to point diagnostics at a line.
    pub fn validate(&self, text: Option<&str>, source_name: &str) -> Result<Experiment, ConfigError> {
        let fail = |key: &str, message: String| ConfigError {
            source_name: source_name.into(),
            line: text.and_then(|t| locate(t, key)),
            message,
        };
        let core_fail = |fallback: &str, e: iel_core::Error| {
            let key = match &e {
                iel_core::Error::InvalidParameter { name, .. } => name.split('/').next().unwrap_or(fallback).to_string(),
                _ => fallback.to_string(),
            };
            fail(&key, e.to_string())
        };
        if self.tasks.is_empty() {
            return Err(fail("tasks", "`tasks` must list at least one task".into()));
        }
        self.estimator.validate().map_err(|e| core_fail("estimator", e))?;
        let spec = self.system.to_spec().map_err(|e| core_fail("system", e))?;
        let system = spec.build().map_err(|e| core_fail("system", e))?;
        let measure = self.measure.unwrap_or_else(|| system.reference_measure());
        if measure != system.reference_measure() {
            return Err(fail(
                "measure",
                format!("measure `{}` is not available for {}", measure.name(), system.kind_name()),
            ));
        }
        for &task in &self.tasks {
            check_task(task, &system, &self.estimator).map_err(|m| fail("tasks", m))?;
        }
        Ok(Experiment { config: self.clone(), spec, system, measure })
    }
}

fn check_task(task: Task, system: &System, cfg: &EstimatorConfig) -> Result<(), String> {
    let kind = system.kind_name();
    let unsupported = |why: &str| Err(format!("task `{}` is not available for {kind}: {why}", task.name()));
    match (task, system) {
        (Task::Exact, System::Baker(_)) => unsupported("no closed form without the dimension of the convolution"),
        (Task::Folding | Task::Identity, System::Baker(_)) => {
            unsupported("folding estimator requires closed-form measure Jacobian")
        }
        (Task::Lyapunov, System::Shift(_)) => unsupported("the shift is not smooth"),
        (Task::Dimension, s) if !matches!(s, System::Baker(_)) => unsupported("dimension applies to fat_baker"),
        (Task::RigidityPair, System::Toral(t)) if t.matrix().dim() != 2 => unsupported("needs a 2x2 matrix"),
        (Task::RigidityPair, s) if !matches!(s, System::Toral(_) | System::Tsujii(_)) => {
            unsupported("defined for 2x2 toral and tsujii systems")
        }
        (Task::Forward | Task::Inverse | Task::Identity, s) => {
            let half = with_system!(s, x => x.diameter()) / 2.0;
            if cfg.radii[0] >= half {
                Err(format!("invalid parameter `radii`: radii must stay below {half} for {kind}"))
            } else {
                Ok(())
            }
        }
        (Task::Dimension, _) if cfg.radii[0] >= 1.0 => {
            Err("invalid parameter `radii`: radii must stay below 1 for fat_baker".into())
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAT: &str = r#"{
  "name": "cat",
  "system": { "kind": "toral_linear", "matrix": [[3, 1], [1, 1]] },
  "tasks": ["exact", "inverse"]
}"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_str_named(CAT, "cat.json").unwrap();
        assert_eq!(c.estimator, EstimatorConfig::default());
        assert_eq!(c.tasks, vec![Task::Exact, Task::Inverse]);
        let e = c.validate(Some(CAT), "cat.json").unwrap();
        assert_eq!(e.measure, ReferenceMeasure::Haar);
    }

    #[test]
    fn syntax_error_has_a_line() {
        let bad = "{\n  \"name\": \"x\",\n  \"system\": {\n  ]\n}";
        let e = ExperimentConfig::from_str_named(bad, "bad.json").unwrap_err();
        assert_eq!(e.line, Some(4));
        assert!(e.to_string().starts_with("bad.json:4:"));
    }

    #[test]
    fn ascending_radii_name_the_field() {
        let text = CAT.replace("\"tasks\"", "\"estimator\": {\n    \"radii\": [0.05, 0.1]\n  },\n  \"tasks\"");
        let c = ExperimentConfig::from_str_named(&text, "c.json").unwrap();
        let e = c.validate(Some(&text), "c.json").unwrap_err();
        assert!(e.message.contains("radii"), "{e}");
        assert_eq!(e.line, Some(5));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = CAT.replace("\"tasks\"", "\"bogus\": 1, \"tasks\"");
        assert!(ExperimentConfig::from_str_named(&text, "c.json").is_err());
        let text = CAT.replace("\"matrix\"", "\"beta\": 1, \"matrix\"");
        assert!(ExperimentConfig::from_str_named(&text, "c.json").is_err());
    }

    #[test]
    fn task_compatibility() {
        let text = r#"{"name": "b", "system": {"kind": "fat_baker", "beta": 0.75}, "tasks": ["folding"]}"#;
        let c = ExperimentConfig::from_str_named(text, "b.json").unwrap();
        assert!(c.validate(Some(text), "b.json").unwrap_err().message.contains("Jacobian"));
        let text = r#"{"name": "s", "system": {"kind": "full_shift", "probabilities": [0.5, 0.5]}, "measure": "haar", "tasks": ["inverse"]}"#;
        let c = ExperimentConfig::from_str_named(text, "s.json").unwrap();
        assert!(c.validate(Some(text), "s.json").is_err());
    }

    #[test]
    fn round_trip() {
        let text = r#"{"name": "t", "system": {"kind": "tsujii", "l": 2, "lambda": 0.7, "cos": [1.0], "sin": [0.2]},
                      "measure": "srb", "tasks": ["exact", "rigidity_pair"], "output_dir": "o"}"#;
        let c = ExperimentConfig::from_str_named(text, "t.json").unwrap();
        let echoed = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(ExperimentConfig::from_str_named(&echoed, "echo").unwrap(), c);
    }
}
