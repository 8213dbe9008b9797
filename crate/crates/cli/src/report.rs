//! Rendering of verdict reports.

use std::fmt::Write;

use ctrlcheck_core::VerdictReport;

/// Pretty JSON with the struct field order as key order.
pub fn to_json(report: &VerdictReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn to_json_line(value: &impl serde::Serialize) -> String {
    serde_json::to_string(value).expect("value serializes")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", items.join(", "))
}

pub fn to_text(report: &VerdictReport) -> String {
    let mut out = String::new();
    let spec = &report.spec;
    let num = &report.numeric;
    let label = if spec.label.is_empty() {
        "(unnamed)"
    } else {
        &spec.label
    };
    let _ = writeln!(out, "system:   {label}");
    let _ = writeln!(out, "levels:   {}", list(&spec.levels));
    let _ = writeln!(out, "dipoles:  {}", list(&spec.dipoles));
    if let Some(tol) = spec.tolerance {
        let _ = writeln!(out, "tolerance: {tol:e}");
    }
    let _ = writeln!(
        out,
        "numeric:  dimension {} of {} ({}), Tr(H0) nonzero: {}",
        num.dimension,
        num.full_dimension,
        num.classification,
        yes_no(num.trace_nonzero)
    );
    let _ = write!(
        out,
        "          passes {}, commutators {}",
        num.passes, num.commutators_evaluated
    );
    if let Some(ms) = num.wall_time_ms {
        let _ = write!(out, ", {ms:.3} ms");
    }
    out.push('\n');

    out.push_str("analytic:\n");
    for v in &report.analytic {
        let _ = write!(
            out,
            "  {:<17} hypothesis {:<3}  conclusion {}",
            v.theorem_id.as_str(),
            yes_no(v.hypothesis_holds),
            v.conclusion.as_str()
        );
        if !v.failing_indices.is_empty() {
            let idx: Vec<String> = v.failing_indices.iter().map(|i| i.to_string()).collect();
            let _ = write!(out, "  (fails at n = {})", idx.join(", "));
        }
        out.push('\n');
    }

    if !report.witnesses.is_empty() {
        out.push_str("witnesses:\n");
        for w in &report.witnesses {
            let _ = writeln!(
                out,
                "  {:<17} {:<12} coefficient {:+.6e}  residual {:.3e}",
                w.theorem_id.as_str(),
                w.target,
                w.coefficient,
                w.relative_residual
            );
        }
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning:  {w}");
    }
    for msg in &report.inconsistencies {
        let _ = writeln!(out, "INCONSISTENT: {msg}");
    }
    let _ = writeln!(
        out,
        "verdict:  {}",
        if num.dimension == num.full_dimension {
            "completely controllable"
        } else {
            "not completely controllable"
        }
    );
    out
}
