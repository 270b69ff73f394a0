//! Named, reproducible experiments.
//!
//! Every experiment maps a resolved [`ExperimentConfig`] to a list of
//! [`ResultRow`]s. Cell `c` of an experiment draws from the master seed
//! through `derive_seed(seed, c)` and replica `r` of the cell from stream
//! `r` of that, so output depends only on the config, never on threads.

mod config;
mod figures;
mod graphs;
mod star;
mod transfer;
mod walk;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use config::{load_config, override_value, ExperimentConfig, ExperimentId, Grid, OutputFormat};
pub use graphs::{estimate_lambda_c, wang_comparison, LambdaCEstimate, LambdaCSearch};
pub use walk::ruin_probability_exact;

use crate::error::Result;
use crate::rng::{replica_rng, SimRng};
use crate::stats::{MeanVar, ProportionEstimate};

/// Which way a bound points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    /// The estimate should not exceed the bound.
    Upper,
    /// The estimate should not fall below the bound.
    Lower,
}

/// One estimated quantity for one parameter cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub params: BTreeMap<String, Value>,
    pub quantity: String,
    pub estimate: f64,
    /// Wilson half-width for proportions, Student t half-width for means.
    pub ci_halfwidth: Option<f64>,
    pub std_error: Option<f64>,
    pub bound: Option<f64>,
    pub bound_side: Option<BoundSide>,
    pub vacuous: Option<bool>,
    pub censored_fraction: Option<f64>,
    pub replicas: u64,
    /// Exact or closed-form value the estimate should match.
    pub reference: Option<f64>,
    pub note: Option<String>,
}

impl ResultRow {
    pub fn new(quantity: &str, estimate: f64) -> Self {
        Self {
            params: BTreeMap::new(),
            quantity: quantity.to_string(),
            estimate,
            ci_halfwidth: None,
            std_error: None,
            bound: None,
            bound_side: None,
            vacuous: None,
            censored_fraction: None,
            replicas: 0,
            reference: None,
            note: None,
        }
    }

    pub fn proportion(quantity: &str, p: &ProportionEstimate) -> Self {
        let mut row = Self::new(quantity, p.estimate);
        row.ci_halfwidth = Some(p.half_width());
        row.std_error = Some(p.std_error);
        row.replicas = p.trials;
        row
    }

    pub fn mean(quantity: &str, m: &MeanVar) -> Self {
        let mut row = Self::new(quantity, m.mean());
        row.ci_halfwidth = Some(m.t_half_width());
        row.std_error = Some(m.std_error());
        row.replicas = m.count();
        row
    }

    pub fn param(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.params.insert(name.to_string(), value.into());
        self
    }

    pub fn upper(mut self, bound: f64, vacuous: bool) -> Self {
        self.bound = Some(bound);
        self.bound_side = Some(BoundSide::Upper);
        self.vacuous = Some(vacuous);
        self
    }

    pub fn lower(mut self, bound: f64, vacuous: bool) -> Self {
        self.bound = Some(bound);
        self.bound_side = Some(BoundSide::Lower);
        self.vacuous = Some(vacuous);
        self
    }

    pub fn censored(mut self, fraction: f64) -> Self {
        self.censored_fraction = Some(fraction);
        self
    }

    pub fn reference(mut self, value: f64) -> Self {
        self.reference = Some(value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn replicas(mut self, n: u64) -> Self {
        self.replicas = n;
        self
    }

    /// Whether the estimate respects a non-vacuous bound within three
    /// standard errors; `None` when there is nothing to check.
    pub fn dominated(&self) -> Option<bool> {
        let bound = self.bound?;
        if self.vacuous == Some(true) || !self.estimate.is_finite() {
            return None;
        }
        let slack = 3.0 * self.std_error.filter(|s| s.is_finite()).unwrap_or(0.0);
        Some(match self.bound_side? {
            BoundSide::Upper => self.estimate <= bound + slack,
            BoundSide::Lower => self.estimate >= bound - slack,
        })
    }

    pub fn param_f64(&self, name: &str) -> Option<f64> {
        self.params.get(name).and_then(Value::as_f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub rows: Vec<ResultRow>,
}

const FIXED_COLUMNS: [&str; 11] = [
    "quantity",
    "estimate",
    "ci_halfwidth",
    "std_error",
    "bound",
    "bound_side",
    "vacuous",
    "censored_fraction",
    "replicas",
    "reference",
    "note",
];

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl ExperimentOutput {
    /// Rows matching `quantity`.
    pub fn rows_for<'a>(&'a self, quantity: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.quantity == quantity)
    }

    /// Rows whose estimate breaks their non-vacuous bound.
    pub fn violations(&self) -> Vec<&ResultRow> {
        self.rows.iter().filter(|r| r.dominated() == Some(false)).collect()
    }

    /// CSV with a `# config: <json>` first line; parameter columns (union
    /// over rows, sorted) come before the fixed columns.
    pub fn to_csv(&self) -> String {
        let params: BTreeSet<&str> = self.rows.iter().flat_map(|r| r.params.keys().map(String::as_str)).collect();
        let mut out = format!("# config: {}\n", self.config.to_canonical_json());
        let header: Vec<&str> = params.iter().copied().chain(FIXED_COLUMNS).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for r in &self.rows {
            let mut cells: Vec<String> = params
                .iter()
                .map(|p| match r.params.get(*p) {
                    None | Some(Value::Null) => String::new(),
                    Some(Value::String(s)) => csv_field(s),
                    Some(v) => csv_field(&v.to_string()),
                })
                .collect();
            cells.push(csv_field(&r.quantity));
            cells.push(r.estimate.to_string());
            cells.push(opt(r.ci_halfwidth));
            cells.push(opt(r.std_error));
            cells.push(opt(r.bound));
            cells.push(match r.bound_side {
                Some(BoundSide::Upper) => "upper".into(),
                Some(BoundSide::Lower) => "lower".into(),
                None => String::new(),
            });
            cells.push(opt(r.vacuous));
            cells.push(opt(r.censored_fraction));
            cells.push(r.replicas.to_string());
            cells.push(opt(r.reference));
            cells.push(r.note.as_deref().map(csv_field).unwrap_or_default());
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("output serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Resolves `config` (drawing a seed if needed) and runs it.
pub fn run_experiment(config: ExperimentConfig) -> Result<ExperimentOutput> {
    let config = config.resolve()?;
    let rows = match config.experiment {
        ExperimentId::StarPersistence => star::star_persistence(&config)?,
        ExperimentId::Ignite => star::ignite(&config)?,
        ExperimentId::Transfer => transfer::transfer(&config)?,
        ExperimentId::GwLocal => graphs::gw_local(&config)?,
        ExperimentId::ConfigPersistence => graphs::config_persistence(&config)?,
        ExperimentId::LambdaC => graphs::lambda_c(&config)?,
        ExperimentId::StarWalk => walk::star_walk(&config)?,
        ExperimentId::Curve => figures::curve(&config)?,
        ExperimentId::Exponents => figures::exponents(&config)?,
    };
    Ok(ExperimentOutput { config, rows })
}

fn fill_defaults(c: &mut ExperimentConfig) -> Result<()> {
    match c.experiment {
        ExperimentId::StarPersistence => star::persistence_defaults(c),
        ExperimentId::Ignite => star::ignite_defaults(c),
        ExperimentId::Transfer => transfer::defaults(c),
        ExperimentId::GwLocal => graphs::gw_defaults(c),
        ExperimentId::ConfigPersistence => graphs::persistence_defaults(c),
        ExperimentId::LambdaC => graphs::lambda_c_defaults(c),
        ExperimentId::StarWalk => walk::defaults(c),
        ExperimentId::Curve => figures::curve_defaults(c),
        ExperimentId::Exponents => figures::exponents_defaults(c),
    }
    Ok(())
}

fn set<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

/// Runs `f` once per replica stream of `seed`, in parallel, keeping replica order.
fn replicate<T, F>(seed: u64, replicas: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut SimRng) -> Result<T> + Sync,
{
    (0..replicas).into_par_iter().map(|r| f(&mut replica_rng(seed, r))).collect()
}

fn grid<T: Clone>(g: &Option<Grid<T>>) -> Vec<T> {
    g.as_ref().map(Grid::values).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domination_uses_three_standard_errors() {
        let mut row = ResultRow::new("x", 0.13).upper(0.1, false);
        row.std_error = Some(0.01);
        assert_eq!(row.dominated(), Some(true));
        row.estimate = 0.131;
        assert_eq!(row.dominated(), Some(false));
        row.vacuous = Some(true);
        assert_eq!(row.dominated(), None);
        let low = ResultRow::new("y", 0.1).lower(0.125, false);
        assert_eq!(low.dominated(), Some(false));
    }

    #[test]
    fn csv_layout() {
        let out = ExperimentOutput {
            config: ExperimentConfig::new(ExperimentId::Curve),
            rows: vec![
                ResultRow::new("a", 1.5).param("p", 0.5),
                ResultRow::new("b", 2.0).param("k", 3).note("x, y"),
            ],
        };
        let csv = out.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], r#"# config: {"experiment":"curve"}"#);
        assert!(lines[1].starts_with("k,p,quantity,estimate,"));
        assert!(lines[2].starts_with(",0.5,a,1.5,"));
        assert!(lines[3].ends_with(",0,,\"x, y\""));
    }
}
