//! Model Hamiltonians: drift spectra, dipole couplings and the su(N) generators.
//!
//! Indices in the public API are 1-based to match the usual physics labelling
//! of levels `|1>, ..., |N>` and transitions `d_1, ..., d_{N-1}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, I};

/// Morse anharmonicity used for the hydrogen fluoride bond model.
pub const MORSE_B_HF: f64 = 0.0419;

/// One drift-plus-dipole control system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub levels: Vec<f64>,
    pub dipoles: Vec<f64>,
    #[serde(default)]
    pub label: String,
    /// Closure tolerance override; `None` uses the engine default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl SystemSpec {
    pub fn new(levels: Vec<f64>, dipoles: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let spec = Self {
            levels,
            dipoles,
            label: label.into(),
            tolerance: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_tolerance(mut self, tol: Option<f64>) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.levels.len();
        if n < 2 {
            return Err(Error::TooFewLevels(n));
        }
        if self.dipoles.len() != n - 1 {
            return Err(Error::DipoleCount {
                expected: n - 1,
                got: self.dipoles.len(),
            });
        }
        if let Some(i) = self.levels.iter().position(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "E_{} is not finite",
                i + 1
            )));
        }
        check_dipoles(&self.dipoles)?;
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "tolerance must be positive, got {tol}"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn h0(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.levels)
    }

    pub fn h1(&self) -> ComplexMatrix {
        dipole_matrix(&self.dipoles)
    }

    /// Skew-Hermitian generators `{iH_0, iH_1}` of the dynamical Lie algebra.
    pub fn generators(&self) -> Vec<ComplexMatrix> {
        vec![self.h0().scale_complex(I), self.h1().scale_complex(I)]
    }

    /// Relabels states `n -> N + 1 - n`.
    pub fn reversed(&self) -> Self {
        Self {
            levels: self.levels.iter().rev().copied().collect(),
            dipoles: self.dipoles.iter().rev().copied().collect(),
            label: format!("{} (reversed)", self.label),
            tolerance: self.tolerance,
        }
    }

    /// Same system with every level shifted so that `Tr(H_0) = 0`.
    pub fn traceless(&self) -> Self {
        let mean = self.levels.iter().sum::<f64>() / self.dim() as f64;
        Self {
            levels: self.levels.iter().map(|e| e - mean).collect(),
            dipoles: self.dipoles.clone(),
            label: format!("{} (traceless)", self.label),
            tolerance: self.tolerance,
        }
    }
}

fn check_dipoles(dipoles: &[f64]) -> Result<()> {
    for (i, &d) in dipoles.iter().enumerate() {
        if d == 0.0 {
            return Err(Error::Decomposable { index: i + 1 });
        }
        if !d.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "d_{} is not finite",
                i + 1
            )));
        }
    }
    Ok(())
}

fn dipole_matrix(dipoles: &[f64]) -> ComplexMatrix {
    let n = dipoles.len() + 1;
    ComplexMatrix::from_fn(n, |r, c| {
        if c == r + 1 {
            Complex64::new(dipoles[r], 0.0)
        } else if r == c + 1 {
            Complex64::new(dipoles[c], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Diagonal drift Hamiltonian `diag(E_1, ..., E_N)`.
pub fn build_h0(levels: &[f64]) -> Result<ComplexMatrix> {
    if levels.len() < 2 {
        return Err(Error::TooFewLevels(levels.len()));
    }
    Ok(ComplexMatrix::from_real_diagonal(levels))
}

/// Nearest-neighbour dipole coupling with zero diagonal.
pub fn build_h1(dipoles: &[f64]) -> Result<ComplexMatrix> {
    if dipoles.is_empty() {
        return Err(Error::TooFewLevels(1));
    }
    check_dipoles(dipoles)?;
    Ok(dipole_matrix(dipoles))
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewLevels(n));
    }
    Ok(())
}

/// `E_n = n - 1/2`.
pub fn harmonic_levels(n: usize) -> Result<Vec<f64>> {
    check_n(n)?;
    Ok((1..=n).map(|k| k as f64 - 0.5).collect())
}

fn morse_energy(level: usize, b: f64) -> f64 {
    let x = level as f64 - 0.5;
    x * (1.0 - 0.5 * b * x)
}

/// `E_n = (n - 1/2) [1 - B (n - 1/2) / 2]`.
pub fn morse_levels(n: usize, b: f64) -> Result<Vec<f64>> {
    check_n(n)?;
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Morse parameter B must be positive, got {b}"
        )));
    }
    Ok((1..=n).map(|k| morse_energy(k, b)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegenerateMode {
    /// `(E1, E2, ..., E2)`
    FirstDistinct,
    /// `(E1, ..., E1, E2)`
    LastDistinct,
}

pub fn degenerate_levels(n: usize, e1: f64, e2: f64, mode: DegenerateMode) -> Result<Vec<f64>> {
    check_n(n)?;
    if e1 == e2 {
        return Err(Error::InvalidParameter(
            "degenerate spectrum needs E1 != E2".into(),
        ));
    }
    Ok(match mode {
        DegenerateMode::FirstDistinct => std::iter::once(e1)
            .chain(std::iter::repeat_n(e2, n - 1))
            .collect(),
        DegenerateMode::LastDistinct => std::iter::repeat_n(e1, n - 1)
            .chain(std::iter::once(e2))
            .collect(),
    })
}

/// `d_n = sqrt(n)`, the harmonic-oscillator position matrix elements up to scale.
pub fn sqrt_n_dipoles(n: usize) -> Vec<f64> {
    (1..n).map(|k| (k as f64).sqrt()).collect()
}

pub fn uniform_dipoles(n: usize, value: f64) -> Vec<f64> {
    vec![value; n.saturating_sub(1)]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// `e_{n,n'} - e_{n',n}`
    ER,
    /// `i (e_{n,n'} + e_{n',n})`
    EI,
    /// `i (e_{n,n} - e_{n+1,n+1})`; the second index is ignored.
    H,
}

/// One of the su(N) basis generators.
///
/// For `ER` and `EI` any pair of distinct levels is accepted, so that
/// `e^R_{n',n} = -e^R_{n,n'}` and `e^I_{n',n} = e^I_{n,n'}` come out of the
/// same formula. `H` needs `1 <= n <= N - 1`.
pub fn generator(kind: GeneratorKind, n: usize, n2: usize, dim: usize) -> Result<ComplexMatrix> {
    let in_range = |k: usize| (1..=dim).contains(&k);
    let zero = Complex64::new(0.0, 0.0);
    match kind {
        GeneratorKind::ER | GeneratorKind::EI => {
            if !in_range(n) || !in_range(n2) || n == n2 {
                return Err(Error::IndexOutOfRange(format!("({n}, {n2}) for N = {dim}")));
            }
            let (a, b) = (n - 1, n2 - 1);
            let (upper, lower) = match kind {
                GeneratorKind::ER => (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)),
                _ => (I, I),
            };
            Ok(ComplexMatrix::from_fn(dim, |r, c| {
                if (r, c) == (a, b) {
                    upper
                } else if (r, c) == (b, a) {
                    lower
                } else {
                    zero
                }
            }))
        }
        GeneratorKind::H => {
            if n == 0 || n >= dim {
                return Err(Error::IndexOutOfRange(format!("h_{n} for N = {dim}")));
            }
            Ok(ComplexMatrix::from_fn(dim, |r, c| {
                if r == c && r == n - 1 {
                    I
                } else if r == c && r == n {
                    -I
                } else {
                    zero
                }
            }))
        }
    }
}

/// `e^+_{n,n+1} = e^I_{n,n+1} + e^R_{n,n+1}`.
pub fn e_plus(n: usize, dim: usize) -> Result<ComplexMatrix> {
    Ok(&generator(GeneratorKind::EI, n, n + 1, dim)?
        + &generator(GeneratorKind::ER, n, n + 1, dim)?)
}

/// `e^-_{n,n+1} = e^I_{n,n+1} - e^R_{n,n+1}`.
pub fn e_minus(n: usize, dim: usize) -> Result<ComplexMatrix> {
    Ok(&generator(GeneratorKind::EI, n, n + 1, dim)?
        - &generator(GeneratorKind::ER, n, n + 1, dim)?)
}

/// All `N² - 1` basis generators of su(N): the `e^R`, then the `e^I` for
/// `n < n'`, then `h_1 ... h_{N-1}`.
pub fn su_basis(dim: usize) -> Result<Vec<ComplexMatrix>> {
    check_n(dim)?;
    let pairs: Vec<(usize, usize)> = (1..dim)
        .flat_map(|n| (n + 1..=dim).map(move |m| (n, m)))
        .collect();
    let mut out = Vec::with_capacity(dim * dim - 1);
    for kind in [GeneratorKind::ER, GeneratorKind::EI] {
        for &(n, m) in &pairs {
            out.push(generator(kind, n, m, dim)?);
        }
    }
    for n in 1..dim {
        out.push(generator(GeneratorKind::H, n, 0, dim)?);
    }
    Ok(out)
}

/// Scalars derived from a spec that the analytic criteria are phrased in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// `μ_n = E_n - E_{n+1}`, n = 1..N-1.
    pub mu: Vec<f64>,
    /// `v_n = 2 d_n² - d_{n-1}² - d_{n+1}²` with `d_0 = d_N = 0`.
    pub v: Vec<f64>,
    pub trace_h0: f64,
}

pub fn derived_params(spec: &SystemSpec) -> DerivedParams {
    let mu = spec.levels.windows(2).map(|w| w[0] - w[1]).collect();
    let d2: Vec<f64> = spec.dipoles.iter().map(|d| d * d).collect();
    let m = d2.len();
    let v = (0..m)
        .map(|k| {
            let prev = if k > 0 { d2[k - 1] } else { 0.0 };
            let next = if k + 1 < m { d2[k + 1] } else { 0.0 };
            2.0 * d2[k] - prev - next
        })
        .collect();
    DerivedParams {
        mu,
        v,
        trace_h0: spec.levels.iter().sum(),
    }
}
