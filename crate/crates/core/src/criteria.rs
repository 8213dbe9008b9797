//! Analytic sufficient conditions for complete controllability, their
//! constructive proofs replayed as numerical witnesses, and the global-phase
//! equivalence between U(N) and SU(N) evolutions.
//!
//! The analytic checks are sufficient only. [`full_verdict`] runs them next to
//! the numeric closure, which decides the question, and flags any analytic
//! conclusion the closure contradicts.

use std::time::Instant;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{self, Classification, DEFAULT_TOL};
use crate::linalg::{commutator, ComplexMatrix, I};
use crate::model::{derived_params, e_minus, e_plus, generator, GeneratorKind, SystemSpec};

/// Relative tolerance for the `!=` hypotheses.
pub const DEFAULT_CRITERIA_TOL: f64 = 1e-9;

/// Witness residuals above this are reported.
pub const WITNESS_TOL: f64 = 1e-8;

const BORDERLINE_FACTOR: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// `μ_1 != 0` and `μ_n² != μ_1²` for n > 1.
    AnharmonicFirst,
    /// `μ_{N-1} != 0` and `μ_n² != μ_{N-1}²` for n < N-1.
    AnharmonicLast,
    /// Equispaced levels, `v_n != v_1` for n >= 2.
    HarmonicV1,
    /// Equispaced levels, `v_n != v_{N-1}` for n <= N-2.
    HarmonicVlast,
}

impl TheoremId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::AnharmonicFirst => "anharmonic-first",
            TheoremId::AnharmonicLast => "anharmonic-last",
            TheoremId::HarmonicV1 => "harmonic-v1",
            TheoremId::HarmonicVlast => "harmonic-vlast",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Conclusion {
    #[serde(rename = "at-least-SU(N)")]
    AtLeastSuN,
    #[serde(rename = "U(N)")]
    UN,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Conclusion {
    fn from_flags(hypothesis_holds: bool, trace_nonzero: bool) -> Self {
        match (hypothesis_holds, trace_nonzero) {
            (true, true) => Conclusion::UN,
            (true, false) => Conclusion::AtLeastSuN,
            _ => Conclusion::Inconclusive,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Conclusion::AtLeastSuN => "at-least-SU(N)",
            Conclusion::UN => "U(N)",
            Conclusion::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub theorem_id: TheoremId,
    pub hypothesis_holds: bool,
    pub trace_nonzero: bool,
    pub conclusion: Conclusion,
    /// 1-based indices `n` at which the hypothesis failed.
    pub failing_indices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Evaluates `a != b` relative to `scale`.
struct Gap<'a> {
    tol: f64,
    scale: f64,
    warnings: &'a mut Vec<String>,
}

impl Gap<'_> {
    fn distinct(&mut self, a: f64, b: f64, what: impl FnOnce() -> String) -> bool {
        let gap = (a - b).abs();
        let threshold = self.tol * self.scale;
        let holds = self.scale > 0.0 && gap > threshold;
        if holds && gap <= BORDERLINE_FACTOR * threshold {
            self.warnings.push(format!(
                "borderline gap {gap:.3e} for {} (threshold {threshold:.3e})",
                what()
            ));
        }
        holds
    }
}

fn trace_nonzero(spec: &SystemSpec, tol: f64) -> bool {
    let scale: f64 = spec.levels.iter().map(|e| e.abs()).sum();
    let trace: f64 = spec.levels.iter().sum();
    scale > 0.0 && trace.abs() > tol * scale
}

fn verdict(
    theorem_id: TheoremId,
    hypothesis_holds: bool,
    trace_nonzero: bool,
    failing_indices: Vec<usize>,
    warnings: Vec<String>,
) -> TheoremVerdict {
    TheoremVerdict {
        theorem_id,
        hypothesis_holds,
        trace_nonzero,
        conclusion: Conclusion::from_flags(hypothesis_holds, trace_nonzero),
        failing_indices,
        warnings,
    }
}

/// `pivot` is the 0-based transition whose frequency must be nonzero and
/// distinct in square from all others.
fn check_anharmonic_at(spec: &SystemSpec, pivot: usize, id: TheoremId, tol: f64) -> TheoremVerdict {
    let mu = derived_params(spec).mu;
    let mut warnings = Vec::new();
    let mut failing = Vec::new();

    let mu_scale = mu.iter().map(|m| m.abs()).fold(0.0, f64::max);
    let sq_scale = mu_scale * mu_scale;
    let mut gap = Gap {
        tol,
        scale: mu_scale,
        warnings: &mut warnings,
    };
    if !gap.distinct(mu[pivot], 0.0, || format!("mu_{} != 0", pivot + 1)) {
        failing.push(pivot + 1);
    }
    gap.scale = sq_scale;
    let pivot_sq = mu[pivot] * mu[pivot];
    for (k, m) in mu.iter().enumerate().filter(|&(k, _)| k != pivot) {
        if !gap.distinct(m * m, pivot_sq, || {
            format!("mu_{}^2 != mu_{}^2", k + 1, pivot + 1)
        }) {
            failing.push(k + 1);
        }
    }
    verdict(
        id,
        failing.is_empty(),
        trace_nonzero(spec, tol),
        failing,
        warnings,
    )
}

pub fn check_anharmonic_first(spec: &SystemSpec) -> TheoremVerdict {
    check_anharmonic_first_tol(spec, DEFAULT_CRITERIA_TOL)
}

pub fn check_anharmonic_first_tol(spec: &SystemSpec, tol: f64) -> TheoremVerdict {
    check_anharmonic_at(spec, 0, TheoremId::AnharmonicFirst, tol)
}

pub fn check_anharmonic_last(spec: &SystemSpec) -> TheoremVerdict {
    check_anharmonic_last_tol(spec, DEFAULT_CRITERIA_TOL)
}

pub fn check_anharmonic_last_tol(spec: &SystemSpec, tol: f64) -> TheoremVerdict {
    check_anharmonic_at(spec, spec.dim() - 2, TheoremId::AnharmonicLast, tol)
}

/// Returns the common level spacing, or an error if the levels are not
/// equally spaced.
pub fn equal_spacing(spec: &SystemSpec, tol: f64) -> Result<f64> {
    let mu = derived_params(spec).mu;
    let mean = mu.iter().sum::<f64>() / mu.len() as f64;
    let deviation = mu.iter().map(|m| (m - mean).abs()).fold(0.0, f64::max);
    if mean == 0.0 {
        return Err(Error::InvalidParameter(
            "all levels are degenerate; equal spacing needs a nonzero gap".into(),
        ));
    }
    if deviation > tol * mean.abs() {
        return Err(Error::NotEquispaced { deviation });
    }
    Ok(mean)
}

/// Both alternative conditions for equally spaced spectra, in the order
/// `[harmonic-vlast, harmonic-v1]`.
pub fn check_harmonic_conditions(spec: &SystemSpec, tol: f64) -> Result<[TheoremVerdict; 2]> {
    equal_spacing(spec, tol)?;
    let v = derived_params(spec).v;
    let scale = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let tr = trace_nonzero(spec, tol);
    let last = v.len() - 1;

    let run = |id: TheoremId, pivot: usize| {
        let mut warnings = Vec::new();
        let mut gap = Gap {
            tol,
            scale,
            warnings: &mut warnings,
        };
        let failing: Vec<usize> = (0..v.len())
            .filter(|&k| k != pivot)
            .filter(|&k| {
                !gap.distinct(v[k], v[pivot], || format!("v_{} != v_{}", k + 1, pivot + 1))
            })
            .map(|k| k + 1)
            .collect();
        verdict(id, failing.is_empty(), tr, failing, warnings)
    };
    Ok([
        run(TheoremId::HarmonicVlast, last),
        run(TheoremId::HarmonicV1, 0),
    ])
}

pub fn check_harmonic(spec: &SystemSpec) -> Result<TheoremVerdict> {
    check_harmonic_tol(spec, DEFAULT_CRITERIA_TOL)
}

/// Condition `v_n != v_{N-1}` is preferred when both hold; if neither does,
/// the returned verdict carries the failures of that first condition.
pub fn check_harmonic_tol(spec: &SystemSpec, tol: f64) -> Result<TheoremVerdict> {
    let [vlast, v1] = check_harmonic_conditions(spec, tol)?;
    Ok(if vlast.hypothesis_holds || !v1.hypothesis_holds {
        vlast
    } else {
        v1
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub target: String,
    pub relative_residual: f64,
}

/// Numerical replay of a constructive proof.
#[derive(Clone, Debug)]
pub struct Witness {
    pub theorem_id: TheoremId,
    pub target: String,
    /// Element obtained by the recurrence, before division by `coefficient`.
    pub produced: ComplexMatrix,
    pub coefficient: f64,
    /// Worst residual over `checks`.
    pub relative_residual: f64,
    pub checks: Vec<WitnessCheck>,
}

fn relative_residual(produced: &ComplexMatrix, coefficient: f64, target: &ComplexMatrix) -> f64 {
    (&produced.scale(1.0 / coefficient) - target).frobenius_norm() / target.frobenius_norm()
}

fn anharmonic_witness(spec: &SystemSpec, id: TheoremId, tol: f64) -> Result<Witness> {
    let n = spec.dim();
    let (check, pivot, order): (TheoremVerdict, usize, Vec<usize>) = match id {
        TheoremId::AnharmonicFirst => (
            check_anharmonic_first_tol(spec, tol),
            0,
            (1..n - 1).rev().collect(),
        ),
        TheoremId::AnharmonicLast => (
            check_anharmonic_last_tol(spec, tol),
            n - 2,
            (0..n - 2).collect(),
        ),
        _ => unreachable!("not an anharmonic theorem"),
    };
    if !check.hypothesis_holds {
        return Err(Error::HypothesisViolated(format!(
            "{} fails at n = {:?}",
            id.as_str(),
            check.failing_indices
        )));
    }
    let mu = derived_params(spec).mu;
    let [ih0, mut v]: [ComplexMatrix; 2] = spec.generators().try_into().expect("two generators");

    // -[iH0, [iH0, .]] multiplies the n-th transition by μ_n²; subtracting
    // μ_k² V removes transition k.
    let mut coefficient = spec.dipoles[pivot];
    for &k in &order {
        let inner = commutator(&ih0, &v)?;
        let mut next = -commutator(&ih0, &inner)?;
        next.axpy(-mu[k] * mu[k], &v);
        v = next;
        coefficient *= mu[pivot] * mu[pivot] - mu[k] * mu[k];
    }

    let (a, b) = (pivot + 1, pivot + 2);
    let target_i = generator(GeneratorKind::EI, a, b, n)?;
    let target_r = generator(GeneratorKind::ER, a, b, n)?;
    let res_i = relative_residual(&v, coefficient, &target_i);
    let real_part = commutator(&ih0, &v.scale(1.0 / coefficient))?;
    let res_r = relative_residual(&real_part, -mu[pivot], &target_r);

    let checks = vec![
        WitnessCheck {
            target: format!("e^I_{{{a},{b}}}"),
            relative_residual: res_i,
        },
        WitnessCheck {
            target: format!("e^R_{{{a},{b}}}"),
            relative_residual: res_r,
        },
    ];
    Ok(Witness {
        theorem_id: id,
        target: checks[0].target.clone(),
        produced: v,
        coefficient,
        relative_residual: res_i.max(res_r),
        checks,
    })
}

/// Eliminates transitions `2..N-1` from `iH_1` by repeated double commutators
/// with `iH_0`, isolating `e^I_{12}`, then rotates it into `e^R_{12}`.
pub fn witness_anharmonic(spec: &SystemSpec) -> Result<Witness> {
    anharmonic_witness(spec, TheoremId::AnharmonicFirst, DEFAULT_CRITERIA_TOL)
}

/// Mirror of [`witness_anharmonic`] isolating the top transition.
pub fn witness_anharmonic_last(spec: &SystemSpec) -> Result<Witness> {
    anharmonic_witness(spec, TheoremId::AnharmonicLast, DEFAULT_CRITERIA_TOL)
}

/// Witness for equally spaced spectra.
///
/// From `V = iH_1` and `Ṽ = -[iH_0, V] / μ_1` the recurrence builds
/// `V± = V ± Ṽ = Σ d_n e±_n` and the diagonal `V⁰ = [V+, V-] / 4`. Taking the
/// commutator with `V⁰` swaps the two families, `[V⁰, e+_n] = v_n e-_n` and
/// `[V⁰, e-_n] = -v_n e+_n`, so the elimination advances both families
/// together:
///
/// ```text
/// P' = -[V⁰, M] - v_k P        M' = [V⁰, P] - v_k M
/// ```
///
/// Each step removes transition `k` from both sums while keeping their
/// coefficients equal, leaving `e±_{N-1,N}` (condition on `v_{N-1}`) or
/// `e±_{1,2}` (condition on `v_1`).
pub fn witness_harmonic(spec: &SystemSpec) -> Result<Witness> {
    let [vlast, v1] = check_harmonic_conditions(spec, DEFAULT_CRITERIA_TOL)?;
    let id = if vlast.hypothesis_holds {
        TheoremId::HarmonicVlast
    } else if v1.hypothesis_holds {
        TheoremId::HarmonicV1
    } else {
        return Err(Error::HypothesisViolated(format!(
            "neither v-condition holds (v_n = v_(N-1) at {:?}; v_n = v_1 at {:?})",
            vlast.failing_indices, v1.failing_indices
        )));
    };
    harmonic_witness(spec, id, DEFAULT_CRITERIA_TOL)
}

pub fn witness_harmonic_condition(spec: &SystemSpec, id: TheoremId) -> Result<Witness> {
    harmonic_witness(spec, id, DEFAULT_CRITERIA_TOL)
}

fn harmonic_witness(spec: &SystemSpec, id: TheoremId, tol: f64) -> Result<Witness> {
    let n = spec.dim();
    let [vlast, v1] = check_harmonic_conditions(spec, tol)?;
    let (check, pivot, order): (TheoremVerdict, usize, Vec<usize>) = match id {
        TheoremId::HarmonicVlast => (vlast, n - 2, (0..n - 2).collect()),
        TheoremId::HarmonicV1 => (v1, 0, (1..n - 1).rev().collect()),
        _ => unreachable!("not a harmonic theorem"),
    };
    if !check.hypothesis_holds {
        return Err(Error::HypothesisViolated(format!(
            "{} fails at n = {:?}",
            id.as_str(),
            check.failing_indices
        )));
    }
    let params = derived_params(spec);
    let (mu1, v) = (params.mu[0], params.v);
    let [ih0, ih1]: [ComplexMatrix; 2] = spec.generators().try_into().expect("two generators");

    let tilde = commutator(&ih0, &ih1)?.scale(-1.0 / mu1);
    let mut plus = &ih1 + &tilde;
    let mut minus = &ih1 - &tilde;
    let diag = commutator(&plus, &minus)?.scale(0.25);

    let d2: Vec<f64> = spec.dipoles.iter().map(|d| d * d).collect();
    let expected_diag = ComplexMatrix::from_fn(n, |r, c| {
        if r != c {
            return Complex64::new(0.0, 0.0);
        }
        let above = if r < n - 1 { d2[r] } else { 0.0 };
        let below = if r > 0 { d2[r - 1] } else { 0.0 };
        I * (above - below)
    });
    let res_diag = relative_residual(&diag, 1.0, &expected_diag);

    let mut coefficient = spec.dipoles[pivot];
    for &k in &order {
        let mut next_plus = -commutator(&diag, &minus)?;
        next_plus.axpy(-v[k], &plus);
        let mut next_minus = commutator(&diag, &plus)?;
        next_minus.axpy(-v[k], &minus);
        plus = next_plus;
        minus = next_minus;
        coefficient *= v[pivot] - v[k];
    }

    let t = pivot + 1;
    let res_plus = relative_residual(&plus, coefficient, &e_plus(t, n)?);
    let res_minus = relative_residual(&minus, coefficient, &e_minus(t, n)?);
    let checks = vec![
        WitnessCheck {
            target: "V^0 diagonal".into(),
            relative_residual: res_diag,
        },
        WitnessCheck {
            target: format!("e^+_{{{t},{}}}", t + 1),
            relative_residual: res_plus,
        },
        WitnessCheck {
            target: format!("e^-_{{{t},{}}}", t + 1),
            relative_residual: res_minus,
        },
    ];
    Ok(Witness {
        theorem_id: id,
        target: checks[1].target.clone(),
        produced: plus,
        coefficient,
        relative_residual: res_diag.max(res_plus).max(res_minus),
        checks,
    })
}

/// Unit-determinant representative of a unitary, up to a global phase.
#[derive(Clone, Debug)]
pub struct SuRepresentative {
    pub v: ComplexMatrix,
    /// `det(u) = e^{i phase}`, phase in (-π, π].
    pub phase: f64,
}

pub const UNITARY_TOL: f64 = 1e-10;

fn check_unitary(u: &ComplexMatrix) -> Result<()> {
    let defect = (&u.adjoint() * u).max_deviation(&ComplexMatrix::identity(u.dim()));
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { defect });
    }
    Ok(())
}

pub fn su_representative(u: &ComplexMatrix) -> Result<SuRepresentative> {
    check_unitary(u)?;
    let mut phase = u.determinant().arg();
    if phase <= -std::f64::consts::PI {
        phase += 2.0 * std::f64::consts::PI;
    }
    let v = u.scale_complex(Complex64::from_polar(1.0, -phase / u.dim() as f64));
    Ok(SuRepresentative { v, phase })
}

/// `||u ρ u† - v ρ v†||_F` with `v` the SU(N) representative of `u`.
pub fn density_evolution_equivalence(u: &ComplexMatrix, rho0: &ComplexMatrix) -> Result<f64> {
    if u.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: rho0.dim(),
        });
    }
    check_density(rho0)?;
    let v = su_representative(u)?.v;
    let a = &(u * rho0) * &u.adjoint();
    let b = &(&v * rho0) * &v.adjoint();
    Ok((&a - &b).frobenius_norm())
}

const DENSITY_TOL: f64 = 1e-10;

fn check_density(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_hermitian(DENSITY_TOL) {
        return Err(Error::InvalidDensity("not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr - 1.0).norm() > DENSITY_TOL {
        return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
    }
    let h = rho.as_nalgebra();
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let min = SymmetricEigen::new(sym).eigenvalues.min();
    if min < -DENSITY_TOL {
        return Err(Error::InvalidDensity(format!(
            "negative eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerdictOptions {
    pub closure_tol: f64,
    pub criteria_tol: f64,
    pub witnesses: bool,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            closure_tol: DEFAULT_TOL,
            criteria_tol: DEFAULT_CRITERIA_TOL,
            witnesses: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericSummary {
    pub dimension: usize,
    pub full_dimension: usize,
    pub classification: Classification,
    pub trace_nonzero: bool,
    pub passes: usize,
    pub commutators_evaluated: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub theorem_id: TheoremId,
    pub target: String,
    pub coefficient: f64,
    pub relative_residual: f64,
    pub checks: Vec<WitnessCheck>,
}

impl From<&Witness> for WitnessSummary {
    fn from(w: &Witness) -> Self {
        Self {
            theorem_id: w.theorem_id,
            target: w.target.clone(),
            coefficient: w.coefficient,
            relative_residual: w.relative_residual,
            checks: w.checks.clone(),
        }
    }
}

/// Aggregate of the numeric closure and every applicable analytic check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub spec: SystemSpec,
    pub numeric: NumericSummary,
    pub analytic: Vec<TheoremVerdict>,
    pub witnesses: Vec<WitnessSummary>,
    pub warnings: Vec<String>,
    /// Analytic conclusions contradicted by the closure. Empty on a sound run.
    pub inconsistencies: Vec<String>,
}

impl VerdictReport {
    pub fn is_consistent(&self) -> bool {
        self.inconsistencies.is_empty()
    }
}

pub fn full_verdict(spec: &SystemSpec) -> Result<VerdictReport> {
    full_verdict_with(spec, VerdictOptions::default())
}

pub fn full_verdict_with(spec: &SystemSpec, opts: VerdictOptions) -> Result<VerdictReport> {
    spec.validate()?;
    let n = spec.dim();
    let closure_tol = spec.tolerance.unwrap_or(opts.closure_tol);

    let start = Instant::now();
    let closure = lie::generate_lie_algebra(&spec.generators(), closure_tol)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let class = lie::classify(&closure, &spec.h0())?;

    let mut analytic = vec![
        check_anharmonic_first_tol(spec, opts.criteria_tol),
        check_anharmonic_last_tol(spec, opts.criteria_tol),
    ];
    if let Ok(harmonic) = check_harmonic_conditions(spec, opts.criteria_tol) {
        analytic.extend(harmonic);
    }

    let mut warnings = closure.warnings.clone();
    for v in &analytic {
        warnings.extend(
            v.warnings
                .iter()
                .map(|w| format!("{}: {w}", v.theorem_id.as_str())),
        );
    }

    let mut witnesses = Vec::new();
    if opts.witnesses {
        for v in analytic.iter().filter(|v| v.hypothesis_holds) {
            let w = match v.theorem_id {
                TheoremId::AnharmonicFirst | TheoremId::AnharmonicLast => {
                    anharmonic_witness(spec, v.theorem_id, opts.criteria_tol)
                }
                TheoremId::HarmonicV1 | TheoremId::HarmonicVlast => {
                    harmonic_witness(spec, v.theorem_id, opts.criteria_tol)
                }
            };
            match w {
                Ok(w) => {
                    if w.relative_residual.is_nan() || w.relative_residual >= WITNESS_TOL {
                        warnings.push(format!(
                            "{} witness residual {:.3e} exceeds {WITNESS_TOL:.0e}",
                            v.theorem_id.as_str(),
                            w.relative_residual
                        ));
                    }
                    witnesses.push(WitnessSummary::from(&w));
                }
                Err(e) => warnings.push(format!("{} witness failed: {e}", v.theorem_id.as_str())),
            }
        }
    }

    let full = n * n;
    let mut inconsistencies = Vec::new();
    for v in &analytic {
        let ok = match v.conclusion {
            Conclusion::UN => closure.dimension == full,
            Conclusion::AtLeastSuN => closure.dimension + 1 >= full,
            Conclusion::Inconclusive => true,
        };
        if !ok {
            inconsistencies.push(format!(
                "{} concludes {} but numeric dimension is {} of {}",
                v.theorem_id.as_str(),
                v.conclusion.as_str(),
                closure.dimension,
                full
            ));
        }
    }
    for msg in &inconsistencies {
        log::error!("internal inconsistency: {msg}");
    }

    Ok(VerdictReport {
        spec: spec.clone(),
        numeric: NumericSummary {
            dimension: closure.dimension,
            full_dimension: full,
            classification: class.classification,
            trace_nonzero: class.trace_nonzero,
            passes: closure.passes,
            commutators_evaluated: closure.commutators_evaluated,
            wall_time_ms: Some(elapsed),
        },
        analytic,
        witnesses,
        warnings,
        inconsistencies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::*;

    fn spec(levels: Vec<f64>, dipoles: Vec<f64>) -> SystemSpec {
        SystemSpec::new(levels, dipoles, "test").unwrap()
    }

    #[test]
    fn morse_satisfies_first_theorem() {
        let s = spec(
            morse_levels(6, MORSE_B_HF).unwrap(),
            vec![0.3, 1.0, -2.0, 0.7, 1.1],
        );
        let v = check_anharmonic_first(&s);
        assert!(v.hypothesis_holds);
        assert_eq!(v.conclusion, Conclusion::UN);
        assert!(v.failing_indices.is_empty());
    }

    #[test]
    fn harmonic_fails_anharmonic_theorems() {
        for n in 3..=6 {
            let s = spec(harmonic_levels(n).unwrap(), sqrt_n_dipoles(n));
            let v = check_anharmonic_first(&s);
            assert!(!v.hypothesis_holds);
            assert_eq!(v.conclusion, Conclusion::Inconclusive);
            assert_eq!(v.failing_indices, (2..n).collect::<Vec<_>>());
            assert!(!check_anharmonic_last(&s).hypothesis_holds);
        }
    }

    #[test]
    fn degenerate_spectra_pick_the_right_theorem() {
        let first = spec(
            degenerate_levels(5, 0.0, 1.0, DegenerateMode::FirstDistinct).unwrap(),
            uniform_dipoles(5, 1.0),
        );
        assert!(check_anharmonic_first(&first).hypothesis_holds);
        let last = check_anharmonic_last(&first);
        assert!(!last.hypothesis_holds);
        assert!(last.failing_indices.contains(&4));

        let last_distinct = spec(
            degenerate_levels(5, 0.0, 1.0, DegenerateMode::LastDistinct).unwrap(),
            uniform_dipoles(5, 1.0),
        );
        assert!(check_anharmonic_last(&last_distinct).hypothesis_holds);
        assert!(!check_anharmonic_first(&last_distinct).hypothesis_holds);
    }

    #[test]
    fn morse_satisfies_last_theorem() {
        let s = spec(
            morse_levels(5, MORSE_B_HF).unwrap(),
            uniform_dipoles(5, 1.0),
        );
        assert!(check_anharmonic_last(&s).hypothesis_holds);
    }

    #[test]
    fn traceless_drift_downgrades_conclusion() {
        let s = spec(
            morse_levels(4, MORSE_B_HF).unwrap(),
            uniform_dipoles(4, 1.0),
        )
        .traceless();
        let v = check_anharmonic_first(&s);
        assert!(v.hypothesis_holds);
        assert!(!v.trace_nonzero);
        assert_eq!(v.conclusion, Conclusion::AtLeastSuN);
    }

    #[test]
    fn harmonic_conditions() {
        let n = 6;
        let levels = harmonic_levels(n).unwrap();
        let v = check_harmonic(&spec(levels.clone(), sqrt_n_dipoles(n))).unwrap();
        assert_eq!(v.theorem_id, TheoremId::HarmonicVlast);
        assert!(v.hypothesis_holds);

        let v = check_harmonic(&spec(levels.clone(), uniform_dipoles(n, 1.0))).unwrap();
        assert!(!v.hypothesis_holds);
        assert_eq!(v.failing_indices, vec![1]);
        let [vl, v1] =
            check_harmonic_conditions(&spec(levels.clone(), uniform_dipoles(n, 1.0)), 1e-9)
                .unwrap();
        assert!(!vl.hypothesis_holds && !v1.hypothesis_holds);
        assert_eq!(v1.failing_indices, vec![5]);

        let mut d = uniform_dipoles(n, 1.0);
        d[n - 2] = 2.0;
        let [_, v1] = check_harmonic_conditions(&spec(levels.clone(), d), 1e-9).unwrap();
        assert!(v1.hypothesis_holds);

        let err = check_harmonic(&spec(
            morse_levels(4, MORSE_B_HF).unwrap(),
            uniform_dipoles(4, 1.0),
        ));
        assert!(matches!(err, Err(Error::NotEquispaced { .. })));
    }

    #[test]
    fn two_level_anharmonic_witness_is_exact() {
        let s = spec(vec![0.2, 1.7], vec![0.8]);
        let w = witness_anharmonic(&s).unwrap();
        assert_eq!(w.coefficient, 0.8);
        assert!(w.relative_residual < 1e-15);
    }

    #[test]
    fn morse_three_level_witness() {
        let s = spec(morse_levels(3, MORSE_B_HF).unwrap(), vec![1.0, 1.0]);
        let w = witness_anharmonic(&s).unwrap();
        let mu = derived_params(&s).mu;
        let want = mu[0] * mu[0] - mu[1] * mu[1];
        assert!((w.coefficient - want).abs() < 1e-15);
        assert!(w.relative_residual < 1e-10, "{}", w.relative_residual);
    }

    #[test]
    fn morse_six_level_witness() {
        let s = spec(morse_levels(6, MORSE_B_HF).unwrap(), sqrt_n_dipoles(6));
        let w = witness_anharmonic(&s).unwrap();
        assert!(w.relative_residual < 1e-8, "{}", w.relative_residual);
        let wl = witness_anharmonic_last(&s).unwrap();
        assert!(wl.relative_residual < 1e-8, "{}", wl.relative_residual);
    }

    #[test]
    fn witness_refuses_without_hypothesis() {
        let s = spec(harmonic_levels(4).unwrap(), uniform_dipoles(4, 1.0));
        assert!(matches!(
            witness_anharmonic(&s),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            witness_harmonic(&s),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn diagonal_swaps_plus_minus_families() {
        let n = 5;
        let d = [1.0, 1.3, 0.7, 2.0];
        let s = spec(harmonic_levels(n).unwrap(), d.to_vec());
        let v = derived_params(&s).v;
        let sum = |f: &dyn Fn(usize) -> ComplexMatrix, w: &dyn Fn(usize) -> f64| {
            let mut acc = ComplexMatrix::zeros(n);
            for k in 0..n - 1 {
                acc.axpy(w(k), &f(k + 1));
            }
            acc
        };
        let plus = sum(&|k| e_plus(k, n).unwrap(), &|k| d[k]);
        let minus = sum(&|k| e_minus(k, n).unwrap(), &|k| d[k]);
        let diag = commutator(&plus, &minus).unwrap().scale(0.25);
        let got = commutator(&diag, &plus).unwrap();
        let want = sum(&|k| e_minus(k, n).unwrap(), &|k| v[k] * d[k]);
        assert!(got.max_deviation(&want) < 1e-13);
        let got = commutator(&diag, &minus).unwrap();
        let want = sum(&|k| e_plus(k, n).unwrap(), &|k| -v[k] * d[k]);
        assert!(got.max_deviation(&want) < 1e-13);
    }

    #[test]
    fn harmonic_witnesses() {
        let s = spec(harmonic_levels(2).unwrap(), vec![1.0]);
        let w = witness_harmonic(&s).unwrap();
        assert_eq!(w.coefficient, 1.0);
        assert_eq!(w.relative_residual, 0.0);

        let s = spec(harmonic_levels(4).unwrap(), sqrt_n_dipoles(4));
        let w = witness_harmonic(&s).unwrap();
        assert_eq!(w.theorem_id, TheoremId::HarmonicVlast);
        assert!((w.coefficient - 3f64.sqrt() * 16.0).abs() < 1e-12);
        assert!(w.relative_residual < 1e-10);

        let s = spec(harmonic_levels(5).unwrap(), vec![1.0, 1.0, 1.0, 2.0]);
        let w = witness_harmonic_condition(&s, TheoremId::HarmonicV1).unwrap();
        assert!(w.relative_residual < 1e-10, "{}", w.relative_residual);
        // d_1 (v_1 - v_2)(v_1 - v_3)(v_1 - v_4) with v = (1, 0, -3, 7)
        assert!((w.coefficient - 1.0 * 1.0 * 4.0 * -6.0).abs() < 1e-12);
    }

    #[test]
    fn su_representative_examples() {
        let r = su_representative(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(r.phase, 0.0);
        assert!(r.v.max_deviation(&ComplexMatrix::identity(3)) < 1e-15);

        let u = ComplexMatrix::identity(2).scale_complex(Complex64::from_polar(1.0, 0.3));
        let r = su_representative(&u).unwrap();
        assert!((r.phase - 0.6).abs() < 1e-14);
        assert!(r.v.max_deviation(&ComplexMatrix::identity(2)) < 1e-14);

        let u = generator(GeneratorKind::EI, 1, 2, 4)
            .unwrap()
            .scale(1.1)
            .expm_skew(1e-12)
            .unwrap();
        let r = su_representative(&u).unwrap();
        assert!(r.phase.abs() < 1e-14);
        assert!(r.v.max_deviation(&u) < 1e-14);

        assert!(matches!(
            su_representative(&ComplexMatrix::identity(2).scale(2.0)),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn density_equivalence_examples() {
        let u = ComplexMatrix::identity(3).scale_complex(Complex64::from_polar(1.0, 0.4));
        let rho = ComplexMatrix::from_real_diagonal(&[0.2, 0.3, 0.5]);
        assert!(density_evolution_equivalence(&u, &rho).unwrap() < 1e-15);

        let u = generator(GeneratorKind::EI, 1, 2, 4)
            .unwrap()
            .scale(0.9)
            .expm_skew(1e-12)
            .unwrap();
        let rho = ComplexMatrix::identity(4).scale(0.25);
        assert!(density_evolution_equivalence(&u, &rho).unwrap() < 1e-15);

        let bad = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(matches!(
            density_evolution_equivalence(&ComplexMatrix::identity(2), &bad),
            Err(Error::InvalidDensity(_))
        ));
        let bad = ComplexMatrix::from_real_diagonal(&[0.5, 0.4]);
        assert!(density_evolution_equivalence(&ComplexMatrix::identity(2), &bad).is_err());
    }

    #[test]
    fn full_verdict_examples() {
        let r = full_verdict(&spec(
            morse_levels(4, MORSE_B_HF).unwrap(),
            sqrt_n_dipoles(4),
        ))
        .unwrap();
        assert_eq!(r.numeric.dimension, 16);
        assert!(r.analytic.iter().any(|v| v.conclusion == Conclusion::UN));
        assert!(r.is_consistent());
        assert_eq!(r.witnesses.len(), 2);

        let r = full_verdict(&spec(harmonic_levels(6).unwrap(), uniform_dipoles(6, 1.0))).unwrap();
        assert_eq!(r.numeric.dimension, 22);
        assert!(r
            .analytic
            .iter()
            .all(|v| v.conclusion == Conclusion::Inconclusive));
        assert!(r.witnesses.is_empty());
        assert!(r.is_consistent());

        let r = full_verdict(&spec(
            harmonic_levels(7).unwrap(),
            vec![1.0, 1.0, 1.0, 1.0, 1.0, 2.0],
        ))
        .unwrap();
        assert_eq!(r.numeric.dimension, 49);
        assert!(r.analytic.iter().any(|v| v.conclusion == Conclusion::UN));
        assert!(r.is_consistent());
        assert!(r
            .witnesses
            .iter()
            .all(|w| w.relative_residual < WITNESS_TOL));
    }
}
