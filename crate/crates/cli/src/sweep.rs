//! Parameter sweeps over a spec-file template.
//!
//! A parameter is a dotted path into the template (`levels.B`,
//! `dipoles.overrides.3`, `dipoles.2` for an explicit array) followed by a
//! comma-separated value list. Several parameters span a Cartesian grid whose
//! first parameter varies slowest.

use ctrlcheck_core::criteria::{full_verdict_with, VerdictOptions};
use ctrlcheck_core::VerdictReport;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use toml::{Table, Value};

use crate::specfile::{resolve, SpecError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid parameter {0:?}: expected name=v1,v2,...")]
    Syntax(String),
    #[error("invalid parameter {name:?}: empty value at position {position}")]
    EmptyValue { name: String, position: usize },
    #[error("{0}")]
    Path(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub values: Vec<Value>,
}

fn parse_value(token: &str) -> Value {
    if let Ok(i) = token.parse::<i64>() {
        Value::Integer(i)
    } else if let Ok(x) = token.parse::<f64>() {
        Value::Float(x)
    } else {
        Value::String(token.to_string())
    }
}

pub fn parse_param(s: &str) -> Result<Param, SweepError> {
    let (name, list) = s
        .split_once('=')
        .ok_or_else(|| SweepError::Syntax(s.into()))?;
    let name = name.trim();
    if name.is_empty() || name.split('.').any(|seg| seg.is_empty()) {
        return Err(SweepError::Syntax(s.into()));
    }
    let list = list.trim();
    let values = if list.is_empty() {
        Vec::new()
    } else {
        list.split(',')
            .enumerate()
            .map(|(i, tok)| {
                let tok = tok.trim();
                if tok.is_empty() {
                    Err(SweepError::EmptyValue {
                        name: name.into(),
                        position: i + 1,
                    })
                } else {
                    Ok(parse_value(tok))
                }
            })
            .collect::<Result<_, _>>()?
    };
    Ok(Param {
        name: name.into(),
        values,
    })
}

pub type Point = Vec<(String, Value)>;

pub fn grid(params: &[Param]) -> Vec<Point> {
    let mut points: Vec<Point> = vec![Vec::new()];
    for p in params {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                p.values.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push((p.name.clone(), v.clone()));
                    next
                })
            })
            .collect();
    }
    if params.is_empty() {
        Vec::new()
    } else {
        points
    }
}

fn set_path(table: &mut Table, name: &str, value: Value) -> Result<(), SweepError> {
    let segments: Vec<&str> = name.split('.').collect();
    let (last, parents) = segments.split_last().expect("non-empty path");
    let mut cur: &mut Value = table
        .entry(segments[0])
        .or_insert_with(|| Value::Table(Table::new()));
    if parents.is_empty() {
        *cur = value;
        return Ok(());
    }
    for seg in parents[1..].iter().chain(std::iter::once(last)) {
        cur = match cur {
            Value::Table(t) => t.entry(*seg).or_insert_with(|| Value::Table(Table::new())),
            Value::Array(items) => {
                let idx = seg
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1 && i <= items.len())
                    .ok_or_else(|| {
                        SweepError::Path(format!(
                            "{name}: array index {seg:?} out of range 1..={}",
                            items.len()
                        ))
                    })?;
                &mut items[idx - 1]
            }
            _ => {
                return Err(SweepError::Path(format!(
                    "{name}: {seg:?} is not inside a table or array"
                )))
            }
        };
    }
    *cur = value;
    Ok(())
}

/// Template with one grid point's values substituted.
pub fn apply(template: &Table, point: &Point) -> Result<Table, SweepError> {
    let mut t = template.clone();
    for (name, value) in point {
        set_path(&mut t, name, value.clone())?;
    }
    Ok(t)
}

#[derive(Clone, Debug, Serialize)]
pub struct PointOutcome {
    pub point: Vec<(String, Value)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<VerdictReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Runs every grid point concurrently; results come back in grid order.
pub fn run(
    template: &Table,
    points: &[Point],
    opts: VerdictOptions,
    tol_override: Option<f64>,
) -> Vec<PointOutcome> {
    points
        .par_iter()
        .map(|point| {
            let result = apply(template, point)
                .map_err(|e| e.to_string())
                .and_then(|t| resolve(&t).map_err(|e: SpecError| e.to_string()))
                .and_then(|mut spec| {
                    if tol_override.is_some() {
                        spec.tolerance = tol_override;
                    }
                    full_verdict_with(&spec, opts).map_err(|e| e.to_string())
                });
            let (report, error) = match result {
                Ok(mut r) => {
                    r.numeric.wall_time_ms = None;
                    (Some(r), None)
                }
                Err(e) => (None, Some(e)),
            };
            PointOutcome {
                point: point.clone(),
                report,
                error,
            }
        })
        .collect()
}

pub fn point_label(point: &Point) -> String {
    point
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}
