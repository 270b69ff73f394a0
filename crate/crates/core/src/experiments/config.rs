use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::bounds::IgniteLevel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    StarPersistence,
    Ignite,
    Transfer,
    GwLocal,
    ConfigPersistence,
    LambdaC,
    StarWalk,
    Curve,
    Exponents,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 9] = [
        ExperimentId::StarPersistence,
        ExperimentId::Ignite,
        ExperimentId::Transfer,
        ExperimentId::GwLocal,
        ExperimentId::ConfigPersistence,
        ExperimentId::LambdaC,
        ExperimentId::StarWalk,
        ExperimentId::Curve,
        ExperimentId::Exponents,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::StarPersistence => "star-persistence",
            ExperimentId::Ignite => "ignite",
            ExperimentId::Transfer => "transfer",
            ExperimentId::GwLocal => "gw-local",
            ExperimentId::ConfigPersistence => "config-persistence",
            ExperimentId::LambdaC => "lambda-c",
            ExperimentId::StarWalk => "star-walk",
            ExperimentId::Curve => "curve",
            ExperimentId::Exponents => "exponents",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|id| id.as_str()).collect();
                Error::Config(format!("unknown experiment {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("format must be csv or json, got {s:?}"))),
        }
    }
}

/// A scalar or a list; scalars are one-point grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> Grid<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            Grid::One(x) => vec![x.clone()],
            Grid::Many(v) => v.clone(),
        }
    }
}

impl<T> From<Vec<T>> for Grid<T> {
    fn from(v: Vec<T>) -> Self {
        Grid::Many(v)
    }
}

/// Flat experiment configuration. Keys that an experiment does not use are
/// ignored by it but still echoed; [`ExperimentConfig::resolve`] fills the
/// ones it does use, so the echoed config reruns the same experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Runs per probability estimate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<u64>,
    /// Runs per time estimate (per probe for `lambda-c`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_replicas: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Grid<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<Grid<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Grid<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling_lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling_k: Option<Grid<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<IgniteLevel>,
    /// Path length(s) for `transfer`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Grid<usize>>,
    /// `path` or `star_chain` for `transfer`; `config` or `star` for `lambda-c`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<Grid<usize>>,
    /// Degree laws such as `plaw:a=2.5`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<Grid<String>>,
    /// Rate schedule such as `powerlaw:a=2.5,eta=0.2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// Multipliers applied to the schedule rate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_factor: Option<Grid<f64>>,
    /// Graph instances per `n` for the star-count check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graphs: Option<u64>,
    /// Walk sizes for `star-walk`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<Grid<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_up: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offspring: Option<String>,
    /// Vertex budget for tree sampling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    /// Sampling times per run near the horizon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bisection_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_hi: Option<f64>,
    /// Offspring success probabilities for `curve`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Grid<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Grid<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId) -> Self {
        Self {
            experiment,
            seed: None,
            replicas: None,
            time_replicas: None,
            lambda: None,
            k: None,
            epsilon: None,
            horizon: None,
            scaling_lambda: None,
            scaling_k: None,
            time_horizon: None,
            level: None,
            r: None,
            graph: None,
            n: None,
            dist: None,
            family: None,
            lambda_factor: None,
            graphs: None,
            m: None,
            p_up: None,
            offspring: None,
            budget: None,
            probes: None,
            bisection_steps: None,
            lambda_lo: None,
            lambda_hi: None,
            p: None,
            alpha: None,
            tol: None,
            format: None,
            out: None,
        }
    }

    /// Parses a flat JSON object, naming the offending key on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed JSON: {e}")))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        if !value.is_object() {
            return Err(Error::Config("config must be a JSON object".into()));
        }
        serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                Error::Config(inner.to_string())
            } else {
                Error::Config(format!("key `{path}`: {inner}"))
            }
        })
    }

    /// Canonical single-line JSON of the config.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Draws a seed if absent, fills the defaults this experiment uses and
    /// validates every value.
    pub fn resolve(mut self) -> Result<Self> {
        if self.seed.is_none() {
            self.seed = Some(rand::random());
        }
        super::fill_defaults(&mut self)?;
        self.validate()?;
        Ok(self)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("key `{key}`: {msg}")));
        for (key, v) in [("replicas", self.replicas), ("time_replicas", self.time_replicas), ("graphs", self.graphs)] {
            if v == Some(0) {
                return bad(key, "must be >= 1".into());
            }
        }
        for (key, v) in [("horizon", self.horizon), ("time_horizon", self.time_horizon)] {
            if let Some(h) = v {
                if !(h > 0.0) {
                    return bad(key, format!("must be > 0, got {h}"));
                }
            }
        }
        let grids: [(&str, &Option<Grid<f64>>); 3] =
            [("lambda", &self.lambda), ("lambda_factor", &self.lambda_factor), ("epsilon", &self.epsilon)];
        for (key, g) in grids {
            if let Some(g) = g {
                if g.values().is_empty() {
                    return bad(key, "grid is empty".into());
                }
                if let Some(x) = g.values().into_iter().find(|x| !(x.is_finite() && *x >= 0.0)) {
                    return bad(key, format!("must be finite and >= 0, got {x}"));
                }
            }
        }
        if let Some(x) = self.scaling_lambda {
            if !(x.is_finite() && x > 0.0) {
                return bad("scaling_lambda", format!("must be finite and > 0, got {x}"));
            }
        }
        if let Some(e) = &self.epsilon {
            if let Some(x) = e.values().into_iter().find(|x| !(*x >= 0.0 && *x < 0.5)) {
                return bad("epsilon", format!("must lie in [0, 0.5), got {x}"));
            }
        }
        let int_grids: [(&str, &Option<Grid<usize>>); 5] =
            [("k", &self.k), ("scaling_k", &self.scaling_k), ("r", &self.r), ("n", &self.n), ("m", &self.m)];
        for (key, g) in int_grids {
            if let Some(g) = g {
                if g.values().is_empty() {
                    return bad(key, "grid is empty".into());
                }
                if g.values().contains(&0) {
                    return bad(key, "must be >= 1".into());
                }
            }
        }
        for (key, v) in [("budget", self.budget), ("probes", self.probes)] {
            if v == Some(0) {
                return bad(key, "must be >= 1".into());
            }
        }
        if let (Some(lo), Some(hi)) = (self.lambda_lo, self.lambda_hi) {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return bad("lambda_lo", format!("need 0 < lambda_lo < lambda_hi, got {lo}, {hi}"));
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return bad("tol", format!("must be > 0, got {t}"));
            }
        }
        Ok(())
    }
}

/// Turns a command-line value into JSON: numbers, booleans and JSON
/// literals as such, `1,2,3` as a list of numbers, anything else a string.
pub fn override_value(raw: &str) -> Value {
    if let Ok(v) = serde_json::from_str::<Value>(raw) {
        if !v.is_string() {
            return v;
        }
    }
    if raw.contains(',') {
        let parts: Option<Vec<Value>> = raw
            .split(',')
            .map(|p| serde_json::from_str::<Value>(p.trim()).ok().filter(Value::is_number))
            .collect();
        if let Some(parts) = parts {
            return Value::Array(parts);
        }
    }
    Value::String(raw.to_string())
}

/// Reads the file (when given), applies `overrides` on top and resolves.
/// Override keys accept dashes for underscores.
pub fn load_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut map = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read config {}: {e}", p.display())))?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(Error::Config("config must be a JSON object".into())),
                Err(e) => return Err(Error::Config(format!("malformed JSON in {}: {e}", p.display()))),
            }
        }
        None => Map::new(),
    };
    for (key, raw) in overrides {
        let key = key.trim_start_matches("--").replace('-', "_");
        let value = if key == "experiment" || key == "graph" || key == "family" || key == "offspring" || key == "out" {
            Value::String(raw.clone())
        } else {
            override_value(raw)
        };
        map.insert(key, value);
    }
    ExperimentConfig::from_value(Value::Object(map))?.resolve()
}
