//! Parameter sweeps: one experiment run per value of a dotted config path.
//!
//! The sweep rewrites the original JSON document for each value (dropping
//! its own section and retargeting the experiment), validates the result
//! like any other config, and runs the target experiment. Runs execute on
//! a worker pool; results are collected in sweep order, so output is
//! independent of scheduling.

use rayon::prelude::*;
use realclock::{Error, Result};
use serde_json::Value;

use crate::config::{config_err, value_as_f64, ExperimentKind, Loaded, RawConfig};
use crate::output::Outcome;
use crate::runner;

/// Replaces the value at a dotted `path` (object keys and array indices)
/// inside `doc`. The path must already exist; sweeps change parameters,
/// they do not invent them.
fn patch(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cursor = doc;
    let mut remaining = path;
    loop {
        let (head, rest) = match remaining.split_once('.') {
            Some((h, r)) => (h, Some(r)),
            None => (remaining, None),
        };
        if head.is_empty() {
            return Err(config_err(format!("sweep parameter path {path} has an empty segment")));
        }
        let next = match cursor {
            Value::Object(map) => map.get_mut(head),
            Value::Array(items) => head
                .parse::<usize>()
                .ok()
                .and_then(|i| items.get_mut(i)),
            _ => None,
        };
        let next = next.ok_or_else(|| {
            config_err(format!(
                "sweep parameter {path} does not exist in the config (failed at segment {head})"
            ))
        })?;
        match rest {
            Some(r) => {
                cursor = next;
                remaining = r;
            }
            None => {
                *next = value;
                return Ok(());
            }
        }
    }
}

/// The same error variant with run context prepended, so exit-code
/// classification survives the annotation.
fn annotate(err: Error, run: usize, parameter: &str, value: &Value) -> Error {
    let note = format!("sweep run {run} ({parameter} = {value}): ");
    match err {
        Error::Invalid(m) => Error::Invalid(format!("{note}{m}")),
        Error::Numerical(m) => Error::Numerical(format!("{note}{m}")),
        Error::Capacity(m) => Error::Capacity(format!("{note}{m}")),
    }
}

pub fn run_sweep(loaded: &Loaded) -> Result<Outcome> {
    let section = loaded
        .raw
        .sweep
        .as_ref()
        .ok_or_else(|| config_err("missing sweep section"))?;
    let parameter = section.parameter.trim();
    if parameter.is_empty() {
        return Err(config_err("sweep.parameter must not be empty"));
    }
    if parameter == "experiment" || parameter == "sweep" || parameter.starts_with("sweep.") {
        return Err(config_err(format!(
            "sweep.parameter cannot touch the sweep driver itself, got {parameter}"
        )));
    }
    let values = section.materialize_values()?;

    let mut base = loaded.document.clone();
    {
        let map = base
            .as_object_mut()
            .ok_or_else(|| config_err("the config document must be a JSON object"))?;
        map.remove("sweep");
        map.insert("experiment".into(), Value::from(section.target.name()));
    }
    // Surface a bad path once, before spawning any runs.
    patch(&mut base.clone(), parameter, values[0].clone())?;

    let outcomes: Vec<Outcome> = values
        .par_iter()
        .enumerate()
        .map(|(i, value)| {
            let mut doc = base.clone();
            patch(&mut doc, parameter, value.clone())?;
            let raw: RawConfig = serde_json::from_value(doc)
                .map_err(|e| config_err(format!("patched config does not parse: {e}")))?;
            raw.validate()?;
            runner::run_single(&raw).map_err(|e| annotate(e, i, parameter, value))
        })
        .collect::<Result<Vec<_>>>()?;

    let grid: Vec<f64> = values
        .iter()
        .map(|v| value_as_f64(v).expect("values were validated as finite numbers"))
        .collect();

    let names: Vec<String> = outcomes[0].scalars.iter().map(|(k, _)| k.clone()).collect();
    for (i, outcome) in outcomes.iter().enumerate() {
        let got: Vec<&String> = outcome.scalars.iter().map(|(k, _)| k).collect();
        if got.len() != names.len() || got.iter().zip(&names).any(|(a, b)| *a != b) {
            return Err(config_err(format!(
                "sweep run {i} produced scalar columns {got:?}, expected {names:?}"
            )));
        }
    }
    let series = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            (
                name.clone(),
                outcomes.iter().map(|o| o.scalars[j].1).collect::<Vec<f64>>(),
            )
        })
        .collect();

    Ok(Outcome {
        experiment: ExperimentKind::Sweep,
        grid_label: parameter.to_string(),
        grid,
        series,
        scalars: vec![("runs".into(), values.len() as f64)],
    })
}
