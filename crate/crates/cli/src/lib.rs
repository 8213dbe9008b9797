//! Command implementations behind the `ctrlcheck` binary.

pub mod report;
pub mod specfile;
pub mod sweep;
pub mod table2;

use std::path::Path;

use ctrlcheck_core::criteria::{full_verdict_with, VerdictOptions};
use ctrlcheck_core::DEFAULT_TOL;

pub const TOL_ENV: &str = "CTRLCHECK_TOL";

pub mod exit {
    pub const OK: u8 = 0;
    pub const INPUT: u8 = 2;
    pub const INCONSISTENT: u8 = 3;
    pub const GOLDEN_MISMATCH: u8 = 4;
}

/// What a command printed and how it should exit.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    fn input_error(msg: impl std::fmt::Display) -> Self {
        Self {
            stderr: format!("error: {msg}\n"),
            code: exit::INPUT,
            ..Self::default()
        }
    }
}

/// Default closure tolerance, honouring `CTRLCHECK_TOL`.
pub fn default_tolerance(env: Option<&str>) -> Result<f64, String> {
    match env {
        None => Ok(DEFAULT_TOL),
        Some(raw) => match raw.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(format!(
                "{TOL_ENV}: expected a positive number, got {raw:?}"
            )),
        },
    }
}

fn check_tol(tol: Option<f64>) -> Result<(), String> {
    match tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => {
            Err(format!("--tol: expected a positive number, got {t}"))
        }
        _ => Ok(()),
    }
}

#[derive(Clone, Debug, Default)]
pub struct AnalyzeArgs {
    pub tol: Option<f64>,
    pub json: bool,
    pub no_witness: bool,
    pub timing: bool,
    pub env_tol: Option<String>,
}

pub fn analyze(path: &Path, args: &AnalyzeArgs) -> Outcome {
    let src = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => return Outcome::input_error(format!("{}: {e}", path.display())),
    };
    analyze_source(&src, args)
}

pub fn analyze_source(src: &str, args: &AnalyzeArgs) -> Outcome {
    let default_tol = match default_tolerance(args.env_tol.as_deref()) {
        Ok(t) => t,
        Err(e) => return Outcome::input_error(e),
    };
    if let Err(e) = check_tol(args.tol) {
        return Outcome::input_error(e);
    }
    let mut spec = match specfile::parse_spec(src) {
        Ok(s) => s,
        Err(e) => return Outcome::input_error(e),
    };
    if args.tol.is_some() {
        spec.tolerance = args.tol;
    }
    let opts = VerdictOptions {
        closure_tol: default_tol,
        witnesses: !args.no_witness,
        ..VerdictOptions::default()
    };
    let mut report = match full_verdict_with(&spec, opts) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                stderr: format!("error: {e}\n"),
                code: exit::INCONSISTENT,
                ..Outcome::default()
            }
        }
    };
    if !args.timing {
        report.numeric.wall_time_ms = None;
    }
    let mut stdout = if args.json {
        report::to_json(&report)
    } else {
        report::to_text(&report)
    };
    if !stdout.ends_with('\n') {
        stdout.push('\n');
    }
    let mut stderr = String::new();
    let code = if report.is_consistent() {
        exit::OK
    } else {
        for msg in &report.inconsistencies {
            stderr.push_str(&format!("internal inconsistency: {msg}\n"));
        }
        exit::INCONSISTENT
    };
    Outcome {
        stdout,
        stderr,
        code,
    }
}

pub fn table2(max_n: usize, json: bool, env_tol: Option<&str>) -> Outcome {
    if !(table2::MIN_N..=table2::MAX_N).contains(&max_n) {
        return Outcome::input_error(format!(
            "--max-n must be within {}..={} (the reference grid)",
            table2::MIN_N,
            table2::MAX_N
        ));
    }
    let tol = match default_tolerance(env_tol) {
        Ok(t) => t,
        Err(e) => return Outcome::input_error(e),
    };
    let table = match table2::compute(max_n, tol) {
        Ok(t) => t,
        Err(e) => {
            return Outcome {
                stderr: format!("error: {e}\n"),
                code: exit::INCONSISTENT,
                ..Outcome::default()
            }
        }
    };
    let mismatches = table2::compare(&table);
    let stdout = if json {
        let value = serde_json::json!({ "table": table, "mismatches": mismatches });
        format!(
            "{}\n",
            serde_json::to_string_pretty(&value).expect("serializes")
        )
    } else {
        let cells = table.rows.len() * (max_n + 1 - table2::MIN_N);
        format!(
            "{}{} of {cells} entries match the reference\n",
            table2::render(&table),
            cells - mismatches.len()
        )
    };
    let mut stderr = String::new();
    for m in &mismatches {
        stderr.push_str(&format!(
            "mismatch: row {} N={}: expected {}, got {}\n",
            m.row, m.n, m.expected, m.got
        ));
    }
    Outcome {
        stdout,
        stderr,
        code: if mismatches.is_empty() {
            exit::OK
        } else {
            exit::GOLDEN_MISMATCH
        },
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepArgs {
    pub params: Vec<String>,
    pub tol: Option<f64>,
    pub json: bool,
    pub no_witness: bool,
    pub env_tol: Option<String>,
}

pub fn sweep(path: &Path, args: &SweepArgs) -> Outcome {
    let src = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => return Outcome::input_error(format!("{}: {e}", path.display())),
    };
    sweep_source(&src, args)
}

pub fn sweep_source(src: &str, args: &SweepArgs) -> Outcome {
    let default_tol = match default_tolerance(args.env_tol.as_deref()) {
        Ok(t) => t,
        Err(e) => return Outcome::input_error(e),
    };
    if let Err(e) = check_tol(args.tol) {
        return Outcome::input_error(e);
    }
    let template = match specfile::parse_table(src) {
        Ok(t) => t,
        Err(e) => return Outcome::input_error(e),
    };
    let params = match args
        .params
        .iter()
        .map(|p| sweep::parse_param(p))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(p) => p,
        Err(e) => return Outcome::input_error(e),
    };
    let points = sweep::grid(&params);
    let opts = VerdictOptions {
        closure_tol: default_tol,
        witnesses: !args.no_witness,
        ..VerdictOptions::default()
    };
    let results = sweep::run(&template, &points, opts, args.tol);

    let mut out = Outcome::default();
    for r in &results {
        if args.json {
            out.stdout.push_str(&report::to_json_line(r));
        } else {
            out.stdout.push_str(&sweep::point_label(&r.point));
            match (&r.report, &r.error) {
                (Some(rep), _) => out.stdout.push_str(&format!(
                    "  dimension={}/{} classification={}{}",
                    rep.numeric.dimension,
                    rep.numeric.full_dimension,
                    rep.numeric.classification,
                    if rep.is_consistent() {
                        ""
                    } else {
                        " INCONSISTENT"
                    }
                )),
                (None, Some(e)) => out.stdout.push_str(&format!("  error: {e}")),
                (None, None) => unreachable!("point without report or error"),
            }
        }
        out.stdout.push('\n');
        if let Some(e) = &r.error {
            out.stderr
                .push_str(&format!("error at {}: {e}\n", sweep::point_label(&r.point)));
            out.code = out.code.max(exit::INPUT);
        }
        if r.report.as_ref().is_some_and(|rep| !rep.is_consistent()) {
            out.code = out.code.max(exit::INCONSISTENT);
        }
    }
    out
}
