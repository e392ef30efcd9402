//! Report assembly and serialization.
//!
//! Every experiment produces an [`Outcome`]: a grid column, named series
//! over that grid, and named scalars. The same outcome feeds the JSON
//! report, the CSV table, and the SVG plot, so the three artifacts always
//! agree on names and values. Numbers are printed with the shortest
//! representation that round-trips, which makes byte-level determinism a
//! consequence of value-level determinism.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use realclock::Result;
use serde_json::{Map, Value};

use crate::config::{ExperimentKind, Loaded, Units, config_err};

pub const REPORT_SCHEMA: &str = "realclock-report/1";

/// The tabular result of one experiment run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub experiment: ExperimentKind,
    /// Name of the independent variable (the first CSV column).
    pub grid_label: String,
    pub grid: Vec<f64>,
    /// Dependent columns, in output order; each must match the grid length.
    pub series: Vec<(String, Vec<f64>)>,
    /// Run-level summary values, in output order.
    pub scalars: Vec<(String, f64)>,
}

impl Outcome {
    pub fn validate(&self) -> Result<()> {
        for (name, values) in &self.series {
            if values.len() != self.grid.len() {
                return Err(config_err(format!(
                    "series {name} has {} values for {} grid points",
                    values.len(),
                    self.grid.len()
                )));
            }
        }
        Ok(())
    }
}

/// A JSON value for `v` that survives non-finite inputs: JSON has no NaN
/// or infinity, so those become null.
fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn json_series(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|&v| json_number(v)).collect())
}

/// The full JSON report. `meta` carries wall-clock data and is the only
/// part that varies between identical runs.
pub fn report_json(outcome: &Outcome, loaded: &Loaded, wall_clock_ms: u128) -> Value {
    let mut root = Map::new();
    root.insert("schema".into(), Value::from(REPORT_SCHEMA));
    root.insert("experiment".into(), Value::from(outcome.experiment.name()));
    root.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    let units = match loaded.raw.units {
        Units::Natural => "natural",
        Units::Si => "SI",
    };
    root.insert("units".into(), Value::from(units));
    if loaded.raw.units == Units::Si {
        let c = loaded.raw.constants.unwrap_or_default();
        root.insert(
            "constants".into(),
            serde_json::json!({
                "hbar": c.hbar,
                "planck_length": c.planck_length,
                "planck_time": c.planck_time,
            }),
        );
    }
    root.insert("config".into(), loaded.document.clone());
    let scalars: BTreeMap<&str, Value> = outcome
        .scalars
        .iter()
        .map(|(k, v)| (k.as_str(), json_number(*v)))
        .collect();
    root.insert("scalars".into(), serde_json::to_value(scalars).unwrap());
    let mut series: BTreeMap<&str, Value> = outcome
        .series
        .iter()
        .map(|(k, v)| (k.as_str(), json_series(v)))
        .collect();
    series.insert(outcome.grid_label.as_str(), json_series(&outcome.grid));
    root.insert("series".into(), serde_json::to_value(series).unwrap());
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis().saturating_sub(wall_clock_ms))
        .unwrap_or(0);
    root.insert(
        "meta".into(),
        serde_json::json!({
            "started_unix_ms": started as u64,
            "wall_clock_ms": wall_clock_ms as u64,
        }),
    );
    Value::Object(root)
}

/// `v` in the shortest form that parses back to the same f64.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

/// The CSV table: `#` metadata lines, a header naming the grid column and
/// every series, then one row per grid point.
pub fn render_csv(outcome: &Outcome, loaded: &Loaded) -> String {
    let mut out = String::new();
    out.push_str(&format!("# schema: {REPORT_SCHEMA}\n"));
    out.push_str(&format!("# experiment: {}\n", outcome.experiment));
    out.push_str(&format!("# version: {}\n", env!("CARGO_PKG_VERSION")));
    if let Some(seed) = loaded.raw.seed {
        out.push_str(&format!("# seed: {seed}\n"));
    }
    out.push_str(&outcome.grid_label);
    for (name, _) in &outcome.series {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, &x) in outcome.grid.iter().enumerate() {
        out.push_str(&format_number(x));
        for (_, values) in &outcome.series {
            out.push(',');
            out.push_str(&format_number(values[i]));
        }
        out.push('\n');
    }
    out
}
