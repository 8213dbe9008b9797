//! TOML system description files.
//!
//! ```toml
//! label = "harmonic, uniform dipoles"
//! tolerance = 1e-10            # optional closure tolerance
//!
//! [levels]                     # or: levels = [0.5, 1.5, 2.5]
//! model = "harmonic"           # harmonic | morse | degenerate
//! N = 4
//! # B = 0.0419                 # morse only, defaults to 0.0419
//! # E1 = 0.0, E2 = 1.0, mode = "first-distinct"   # degenerate only
//!
//! [dipoles]                    # or: dipoles = [1.0, 1.0, 2.0]
//! model = "uniform"            # sqrt_n | uniform | custom
//! # value = 1.0                # uniform only
//! # values = [..]              # custom only
//! [dipoles.overrides]          # optional, 1-based index or "last"
//! last = 2.0
//! ```

use ctrlcheck_core::model::{
    degenerate_levels, harmonic_levels, morse_levels, sqrt_n_dipoles, uniform_dipoles,
    DegenerateMode, MORSE_B_HF,
};
use ctrlcheck_core::SystemSpec;
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("{0}")]
    Invalid(#[from] ctrlcheck_core::Error),
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Field {
        field: field.into(),
        message: message.into(),
    }
}

pub fn parse_table(src: &str) -> Result<Table, SpecError> {
    src.parse::<Table>()
        .map_err(|e| SpecError::Parse(format!("parse error: {e}")))
}

/// Parses and resolves a spec file's contents.
pub fn parse_spec(src: &str) -> Result<SystemSpec, SpecError> {
    resolve(&parse_table(src)?)
}

pub fn resolve(table: &Table) -> Result<SystemSpec, SpecError> {
    check_keys(table, "", &["label", "tolerance", "levels", "dipoles"])?;
    let label = match table.get("label") {
        None => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(field_err("label", "expected a string")),
    };
    let tolerance = table
        .get("tolerance")
        .map(|v| number(v, "tolerance"))
        .transpose()?;
    if let Some(t) = tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(field_err("tolerance", "must be a positive number"));
        }
    }
    let levels = resolve_levels(
        table
            .get("levels")
            .ok_or_else(|| field_err("levels", "missing"))?,
    )?;
    let n = levels.len();
    let dipoles = resolve_dipoles(
        table
            .get("dipoles")
            .ok_or_else(|| field_err("dipoles", "missing"))?,
        n,
    )?;
    Ok(SystemSpec::new(levels, dipoles, label)?.with_tolerance(tolerance))
}

fn check_keys(table: &Table, prefix: &str, allowed: &[&str]) -> Result<(), SpecError> {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(field_err(
                format!("{prefix}{key}"),
                format!("unknown field (expected one of: {})", allowed.join(", ")),
            ));
        }
    }
    Ok(())
}

fn number(v: &Value, field: &str) -> Result<f64, SpecError> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(field_err(field, "expected a number")),
    }
}

fn number_array(v: &Value, field: &str) -> Result<Vec<f64>, SpecError> {
    let Value::Array(items) = v else {
        return Err(field_err(field, "expected an array of numbers"));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{field}[{}]", i + 1)))
        .collect()
}

fn string<'a>(t: &'a Table, key: &str, field: &str) -> Result<&'a str, SpecError> {
    match t.get(key) {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(field_err(field, "expected a string")),
        None => Err(field_err(field, "missing")),
    }
}

fn resolve_levels(v: &Value) -> Result<Vec<f64>, SpecError> {
    let t = match v {
        Value::Array(_) => return number_array(v, "levels"),
        Value::Table(t) => t,
        _ => return Err(field_err("levels", "expected an array or a model table")),
    };
    let model = string(t, "model", "levels.model")?;
    let n = match t.get("N") {
        Some(Value::Integer(n)) if *n >= 2 => *n as usize,
        Some(_) => return Err(field_err("levels.N", "expected an integer >= 2")),
        None => return Err(field_err("levels.N", "missing")),
    };
    let core = |e: ctrlcheck_core::Error, field: &str| field_err(field, e.to_string());
    match model {
        "harmonic" => {
            check_keys(t, "levels.", &["model", "N"])?;
            harmonic_levels(n).map_err(|e| core(e, "levels"))
        }
        "morse" => {
            check_keys(t, "levels.", &["model", "N", "B"])?;
            let b = t
                .get("B")
                .map(|b| number(b, "levels.B"))
                .transpose()?
                .unwrap_or(MORSE_B_HF);
            morse_levels(n, b).map_err(|e| core(e, "levels.B"))
        }
        "degenerate" => {
            check_keys(t, "levels.", &["model", "N", "E1", "E2", "mode"])?;
            let e1 = number(
                t.get("E1")
                    .ok_or_else(|| field_err("levels.E1", "missing"))?,
                "levels.E1",
            )?;
            let e2 = number(
                t.get("E2")
                    .ok_or_else(|| field_err("levels.E2", "missing"))?,
                "levels.E2",
            )?;
            let mode = match t.get("mode") {
                None => DegenerateMode::FirstDistinct,
                Some(Value::String(s)) if s == "first-distinct" => DegenerateMode::FirstDistinct,
                Some(Value::String(s)) if s == "last-distinct" => DegenerateMode::LastDistinct,
                Some(_) => {
                    return Err(field_err(
                        "levels.mode",
                        "expected \"first-distinct\" or \"last-distinct\"",
                    ))
                }
            };
            degenerate_levels(n, e1, e2, mode).map_err(|e| core(e, "levels"))
        }
        other => Err(field_err(
            "levels.model",
            format!("unknown model {other:?} (expected harmonic, morse or degenerate)"),
        )),
    }
}

fn resolve_dipoles(v: &Value, n: usize) -> Result<Vec<f64>, SpecError> {
    let d = match v {
        Value::Array(_) => number_array(v, "dipoles")?,
        Value::Table(t) => {
            let model = string(t, "model", "dipoles.model")?;
            let mut d = match model {
                "sqrt_n" => {
                    check_keys(t, "dipoles.", &["model", "overrides"])?;
                    sqrt_n_dipoles(n)
                }
                "uniform" => {
                    check_keys(t, "dipoles.", &["model", "value", "overrides"])?;
                    let value = t
                        .get("value")
                        .map(|x| number(x, "dipoles.value"))
                        .transpose()?
                        .unwrap_or(1.0);
                    uniform_dipoles(n, value)
                }
                "custom" => {
                    check_keys(t, "dipoles.", &["model", "values", "overrides"])?;
                    number_array(
                        t.get("values")
                            .ok_or_else(|| field_err("dipoles.values", "missing"))?,
                        "dipoles.values",
                    )?
                }
                other => {
                    return Err(field_err(
                        "dipoles.model",
                        format!("unknown model {other:?} (expected sqrt_n, uniform or custom)"),
                    ))
                }
            };
            if let Some(o) = t.get("overrides") {
                apply_overrides(&mut d, o)?;
            }
            d
        }
        _ => return Err(field_err("dipoles", "expected an array or a model table")),
    };
    if d.len() != n - 1 {
        return Err(field_err(
            "dipoles",
            format!("expected {} moments for N = {n}, got {}", n - 1, d.len()),
        ));
    }
    Ok(d)
}

fn apply_overrides(d: &mut [f64], v: &Value) -> Result<(), SpecError> {
    let Value::Table(t) = v else {
        return Err(field_err(
            "dipoles.overrides",
            "expected a table of index = value",
        ));
    };
    for (key, value) in t {
        let field = format!("dipoles.overrides.{key}");
        let idx = if key == "last" {
            d.len()
        } else {
            key.parse::<usize>()
                .map_err(|_| field_err(&field, "key must be a 1-based index or \"last\""))?
        };
        if idx == 0 || idx > d.len() {
            return Err(field_err(
                &field,
                format!("index out of range 1..={}", d.len()),
            ));
        }
        d[idx - 1] = number(value, &field)?;
    }
    Ok(())
}
