//! Reproduction of the reference grid of Lie algebra dimensions for Morse and
//! harmonic oscillators under three dipole families, N = 2..8.

use std::fmt::Write;

use ctrlcheck_core::model::{harmonic_levels, morse_levels, sqrt_n_dipoles, MORSE_B_HF};
use ctrlcheck_core::{generate_lie_algebra, Result, SystemSpec};
use serde::Serialize;

pub const MIN_N: usize = 2;
pub const MAX_N: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Oscillator {
    Morse,
    Harmonic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DipoleFamily {
    SqrtN,
    Uniform,
    UniformLastTwo,
}

impl DipoleFamily {
    pub fn label(&self) -> &'static str {
        match self {
            DipoleFamily::SqrtN => "d_n=sqrt(n)",
            DipoleFamily::Uniform => "d_n=1",
            DipoleFamily::UniformLastTwo => "d_n=1, d_{N-1}=2",
        }
    }

    pub fn dipoles(&self, n: usize) -> Vec<f64> {
        match self {
            DipoleFamily::SqrtN => sqrt_n_dipoles(n),
            DipoleFamily::Uniform => vec![1.0; n - 1],
            DipoleFamily::UniformLastTwo => {
                let mut d = vec![1.0; n - 1];
                d[n - 2] = 2.0;
                d
            }
        }
    }
}

pub const ROWS: [(Oscillator, DipoleFamily); 6] = [
    (Oscillator::Morse, DipoleFamily::SqrtN),
    (Oscillator::Morse, DipoleFamily::Uniform),
    (Oscillator::Morse, DipoleFamily::UniformLastTwo),
    (Oscillator::Harmonic, DipoleFamily::SqrtN),
    (Oscillator::Harmonic, DipoleFamily::Uniform),
    (Oscillator::Harmonic, DipoleFamily::UniformLastTwo),
];

/// Expected dimensions, rows as in [`ROWS`], columns N = 2..=8.
pub const GOLDEN: [[usize; 7]; 6] = [
    [4, 9, 16, 25, 36, 49, 64],
    [4, 9, 16, 25, 36, 49, 64],
    [4, 9, 16, 25, 36, 49, 64],
    [4, 9, 16, 25, 36, 49, 64],
    [4, 4, 11, 11, 22, 22, 37],
    [4, 9, 16, 25, 36, 49, 64],
];

pub fn system(osc: Oscillator, family: DipoleFamily, n: usize) -> Result<SystemSpec> {
    let levels = match osc {
        Oscillator::Morse => morse_levels(n, MORSE_B_HF)?,
        Oscillator::Harmonic => harmonic_levels(n)?,
    };
    let label = format!(
        "{} N={n} {}",
        match osc {
            Oscillator::Morse => "Morse",
            Oscillator::Harmonic => "harmonic",
        },
        family.label()
    );
    SystemSpec::new(levels, family.dipoles(n), label)
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub oscillator: Oscillator,
    pub dipoles: DipoleFamily,
    pub dimensions: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub max_n: usize,
    pub rows: Vec<Row>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    /// 1-based row in [`ROWS`] order.
    pub row: usize,
    pub n: usize,
    pub expected: usize,
    pub got: usize,
}

pub fn compute(max_n: usize, tol: f64) -> Result<Table> {
    let mut rows = Vec::with_capacity(ROWS.len());
    for (osc, family) in ROWS {
        let dimensions = (MIN_N..=max_n)
            .map(|n| {
                let spec = system(osc, family, n)?;
                Ok(generate_lie_algebra(&spec.generators(), tol)?.dimension)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(Row {
            oscillator: osc,
            dipoles: family,
            dimensions,
        });
    }
    Ok(Table { max_n, rows })
}

pub fn compare(table: &Table) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for (r, (row, golden)) in table.rows.iter().zip(GOLDEN.iter()).enumerate() {
        for (k, &got) in row.dimensions.iter().enumerate() {
            let expected = golden[k];
            if got != expected {
                out.push(Mismatch {
                    row: r + 1,
                    n: k + MIN_N,
                    expected,
                    got,
                });
            }
        }
    }
    out
}

pub fn render(table: &Table) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<9}{:<19}|", "", "N");
    for n in MIN_N..=table.max_n {
        let _ = write!(out, "{n:>4}");
    }
    out.push('\n');
    let width = 28 + 4 * (table.max_n + 1 - MIN_N);
    out.push_str(&"-".repeat(width));
    out.push('\n');
    for row in &table.rows {
        let name = match (row.oscillator, row.dipoles) {
            (Oscillator::Morse, DipoleFamily::SqrtN) => "Morse",
            (Oscillator::Harmonic, DipoleFamily::SqrtN) => "Harmonic",
            _ => "",
        };
        let _ = write!(out, "{name:<9}{:<19}|", row.dipoles.label());
        for d in &row.dimensions {
            let _ = write!(out, "{d:>4}");
        }
        out.push('\n');
    }
    out
}
