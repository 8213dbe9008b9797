//! Dynamical Lie algebra closure by iterated commutators.
//!
//! The algebra is tracked as a real span inside u(N): each skew-Hermitian
//! matrix is mapped to its `2 N²` real coordinates and kept against an
//! explicitly orthonormalised basis, so an independence test is a single
//! projection rather than a fresh rank computation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{commutator, ComplexMatrix, RealVector, I};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Residuals within this factor above the tolerance are reported as borderline.
const BORDERLINE_FACTOR: f64 = 100.0;

/// Orthonormal basis of a real span of N×N complex matrices.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    dim: usize,
    tol: f64,
    vectors: Vec<RealVector>,
    /// Matrices as they were offered, parallel to `vectors`.
    originals: Vec<ComplexMatrix>,
    /// `vectors` mapped back to matrices.
    elements: Vec<ComplexMatrix>,
}

/// Outcome of offering a matrix to a [`SpanBasis`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpanAdd {
    pub added: bool,
    /// Norm of the component orthogonal to the span, relative to the input norm.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub residual: f64,
}

impl SpanBasis {
    pub fn new(dim: usize, tol: f64) -> Self {
        Self {
            dim,
            tol,
            vectors: Vec::new(),
            originals: Vec::new(),
            elements: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        2 * self.dim * self.dim
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[RealVector] {
        &self.vectors
    }

    pub fn originals(&self) -> &[ComplexMatrix] {
        &self.originals
    }

    /// Orthonormal basis elements as matrices.
    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Component of `v` orthogonal to the span: modified Gram-Schmidt followed
    /// by one full re-orthogonalisation sweep.
    fn orthogonal_residual(&self, mut v: RealVector) -> RealVector {
        for _ in 0..2 {
            for q in &self.vectors {
                let c = q.dot(&v);
                v.axpy(-c, q);
            }
        }
        v
    }

    fn check_dim(&self, m: &ComplexMatrix) -> Result<()> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: m.dim(),
                right: self.dim,
            });
        }
        Ok(())
    }

    /// Appends `m` if it is independent of the current span.
    pub fn add(&mut self, m: &ComplexMatrix) -> Result<SpanAdd> {
        self.check_dim(m)?;
        let v = m.vectorize();
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Ok(SpanAdd {
                added: false,
                residual: 0.0,
            });
        }
        let r = self.orthogonal_residual(v.scaled(1.0 / norm));
        let residual = r.norm();
        if residual > self.tol {
            let q = r.scaled(1.0 / residual);
            self.elements
                .push(ComplexMatrix::devectorize(self.dim, &q)?);
            self.vectors.push(q);
            self.originals.push(m.clone());
            Ok(SpanAdd {
                added: true,
                residual,
            })
        } else {
            Ok(SpanAdd {
                added: false,
                residual,
            })
        }
    }

    pub fn membership(&self, m: &ComplexMatrix) -> Result<Membership> {
        self.check_dim(m)?;
        let v = m.vectorize();
        let norm = v.norm();
        if norm == 0.0 {
            return Ok(Membership {
                member: true,
                residual: 0.0,
            });
        }
        let residual = self.orthogonal_residual(v.scaled(1.0 / norm)).norm();
        Ok(Membership {
            member: residual <= self.tol,
            residual,
        })
    }
}

/// Free-function form of [`SpanBasis::add`].
pub fn span_add(basis: &mut SpanBasis, m: &ComplexMatrix) -> Result<SpanAdd> {
    basis.add(m)
}

/// Free-function form of [`SpanBasis::membership`].
pub fn is_member(basis: &SpanBasis, m: &ComplexMatrix) -> Result<Membership> {
    basis.membership(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "full-u(N)")]
    FullUN,
    #[serde(rename = "su(N)")]
    SuN,
    #[serde(rename = "proper-subalgebra")]
    ProperSubalgebra,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::FullUN => "full-u(N)",
            Classification::SuN => "su(N)",
            Classification::ProperSubalgebra => "proper-subalgebra",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct ClosureResult {
    pub dimension: usize,
    pub basis: SpanBasis,
    pub classification: Classification,
    pub passes: usize,
    pub commutators_evaluated: usize,
    pub warnings: Vec<String>,
}

fn classify_basis(basis: &SpanBasis) -> Result<Classification> {
    let n = basis.dim();
    let rank = basis.rank();
    Ok(if rank == n * n {
        Classification::FullUN
    } else if rank == n * n - 1
        && !basis
            .membership(&ComplexMatrix::identity(n).scale_complex(I))?
            .member
    {
        Classification::SuN
    } else {
        Classification::ProperSubalgebra
    })
}

/// Computes the real Lie algebra generated by skew-Hermitian `generators`.
///
/// Generators are seeded first (dependent ones dropped); then each pass
/// commutes every basis element added in the previous pass against every
/// earlier element, until a pass adds nothing or the rank reaches `N²`.
pub fn generate_lie_algebra(generators: &[ComplexMatrix], tol: f64) -> Result<ClosureResult> {
    let first = generators.first().ok_or(Error::NoGenerators)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = first.dim();
    let full = n * n;
    let mut basis = SpanBasis::new(n, tol);
    let mut warnings = Vec::new();

    for g in generators {
        if g.dim() != n {
            return Err(Error::DimensionMismatch {
                left: g.dim(),
                right: n,
            });
        }
        let defect = g.max_deviation(&g.adjoint().scale(-1.0));
        if defect > tol * g.max_abs() {
            return Err(Error::NotSkewHermitian { defect });
        }
        let outcome = basis.add(g)?;
        note_borderline(&mut warnings, outcome, tol, "generator");
    }

    let mut passes = 0;
    let mut commutators_evaluated = 0;
    let mut old_rank = 0;
    let mut new_rank = basis.rank();
    while new_rank != old_rank && basis.rank() < full {
        passes += 1;
        if passes > full + 1 {
            return Err(Error::PassLimit(full + 1));
        }
        'pass: for l in old_rank..new_rank {
            for j in 0..l {
                // Commute the matrices as offered rather than their
                // orthonormalised images: Gram-Schmidt divides by the
                // residual, so a small residual would amplify rounding error
                // into spurious directions on every later pass.
                let a = &basis.originals()[l];
                let b = &basis.originals()[j];
                let h = commutator(a, b)?;
                commutators_evaluated += 1;
                let norm = h.frobenius_norm();
                if norm <= tol * a.frobenius_norm() * b.frobenius_norm() {
                    continue;
                }
                let outcome = basis.add(&h.scale(1.0 / norm))?;
                note_borderline(&mut warnings, outcome, tol, "commutator");
                if basis.rank() == full {
                    break 'pass;
                }
            }
        }
        old_rank = new_rank;
        new_rank = basis.rank();
    }

    let classification = classify_basis(&basis)?;
    Ok(ClosureResult {
        dimension: basis.rank(),
        basis,
        classification,
        passes,
        commutators_evaluated,
        warnings,
    })
}

fn note_borderline(warnings: &mut Vec<String>, outcome: SpanAdd, tol: f64, what: &str) {
    if outcome.added && outcome.residual < BORDERLINE_FACTOR * tol {
        let msg = format!(
            "borderline {what} residual {:.3e} (tolerance {tol:.1e}); rank decision may be ill-conditioned",
            outcome.residual
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
}

/// Classification together with the trace diagnostic for the drift term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub classification: Classification,
    pub trace_nonzero: bool,
}

pub fn classify(result: &ClosureResult, h0: &ComplexMatrix) -> Result<ClassReport> {
    let scale: f64 = (0..h0.dim()).map(|k| h0[(k, k)].norm()).sum();
    let trace = h0.trace().norm();
    Ok(ClassReport {
        classification: classify_basis(&result.basis)?,
        trace_nonzero: trace > result.basis.tol() * scale.max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        generator, harmonic_levels, morse_levels, sqrt_n_dipoles, uniform_dipoles, GeneratorKind,
        SystemSpec, MORSE_B_HF,
    };

    fn closure(levels: Vec<f64>, dipoles: Vec<f64>) -> ClosureResult {
        let spec = SystemSpec::new(levels, dipoles, "").unwrap();
        generate_lie_algebra(&spec.generators(), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn span_add_detects_dependence() {
        let er = generator(GeneratorKind::ER, 1, 2, 2).unwrap();
        let ei = generator(GeneratorKind::EI, 1, 2, 2).unwrap();
        let mut b = SpanBasis::new(2, DEFAULT_TOL);
        assert!(span_add(&mut b, &er).unwrap().added);
        assert!(!span_add(&mut b, &er.scale(2.0)).unwrap().added);
        assert!(span_add(&mut b, &ei).unwrap().added);
        assert_eq!(b.rank(), 2);
        assert!(!span_add(&mut b, &ComplexMatrix::zeros(2)).unwrap().added);
        assert!(span_add(&mut b, &ComplexMatrix::zeros(3)).is_err());
    }

    #[test]
    fn span_add_seeds_two_level_generators() {
        let spec = SystemSpec::new(vec![0.5, 1.5], vec![1.0], "").unwrap();
        let mut b = SpanBasis::new(2, DEFAULT_TOL);
        for g in spec.generators() {
            assert!(b.add(&g).unwrap().added);
        }
        assert_eq!(b.rank(), 2);
        for (i, p) in b.vectors().iter().enumerate() {
            for (j, q) in b.vectors().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((p.dot(q) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn table_dimensions_small() {
        assert_eq!(
            closure(harmonic_levels(3).unwrap(), uniform_dipoles(3, 1.0)).dimension,
            4
        );
        assert_eq!(
            closure(
                morse_levels(5, MORSE_B_HF).unwrap(),
                uniform_dipoles(5, 1.0)
            )
            .dimension,
            25
        );
        assert_eq!(
            closure(harmonic_levels(8).unwrap(), uniform_dipoles(8, 1.0)).dimension,
            37
        );
    }

    #[test]
    fn mirror_symmetric_dipoles_stay_collapsed() {
        // Widely spread moments make several genuine directions small; the
        // closure must not let rounding error leak in as extra rank.
        let d = vec![0.3604016562193102, 0.9539289187350863, 1.4781500788378592];
        let mirrored = [d.clone(), vec![d[1], d[0]]].concat();
        let r = closure(harmonic_levels(6).unwrap(), mirrored);
        assert_eq!(r.dimension, 22);
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    }

    #[test]
    fn single_generator_is_one_dimensional() {
        let h0 = ComplexMatrix::from_real_diagonal(&[0.3, 1.0, 4.0]).scale_complex(I);
        let r = generate_lie_algebra(&[h0], DEFAULT_TOL).unwrap();
        assert_eq!(r.dimension, 1);
        assert_eq!(r.classification, Classification::ProperSubalgebra);
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(matches!(
            generate_lie_algebra(&[], DEFAULT_TOL),
            Err(Error::NoGenerators)
        ));
        let h = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        assert!(matches!(
            generate_lie_algebra(&[h], DEFAULT_TOL),
            Err(Error::NotSkewHermitian { .. })
        ));
        let a = ComplexMatrix::zeros(2);
        let b = ComplexMatrix::zeros(3);
        assert!(matches!(
            generate_lie_algebra(&[a, b], DEFAULT_TOL),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn membership_of_rotation_generator() {
        let ei = generator(GeneratorKind::EI, 1, 2, 4).unwrap();
        let r = closure(harmonic_levels(4).unwrap(), uniform_dipoles(4, 1.0));
        assert_eq!(r.dimension, 11);
        let m = is_member(&r.basis, &ei).unwrap();
        assert!(!m.member);
        assert!(m.residual > 0.1);

        let r = closure(
            morse_levels(4, MORSE_B_HF).unwrap(),
            uniform_dipoles(4, 1.0),
        );
        assert!(is_member(&r.basis, &ei).unwrap().member);

        let first = r.basis.originals()[0].clone();
        let m = is_member(&r.basis, &first).unwrap();
        assert!(m.member && m.residual < 1e-12);
        let z = is_member(&r.basis, &ComplexMatrix::zeros(4)).unwrap();
        assert!(z.member && z.residual == 0.0);
    }

    #[test]
    fn classification_cases() {
        let h0 = |l: &[f64]| ComplexMatrix::from_real_diagonal(l);

        let levels = morse_levels(3, MORSE_B_HF).unwrap();
        let r = closure(levels.clone(), sqrt_n_dipoles(3));
        let c = classify(&r, &h0(&levels)).unwrap();
        assert_eq!(c.classification, Classification::FullUN);
        assert!(c.trace_nonzero);

        let levels = vec![-1.0, 0.0, 1.0];
        let r = closure(levels.clone(), sqrt_n_dipoles(3));
        assert_eq!(r.dimension, 8);
        let c = classify(&r, &h0(&levels)).unwrap();
        assert_eq!(c.classification, Classification::SuN);
        assert!(!c.trace_nonzero);

        let levels = harmonic_levels(4).unwrap();
        let r = closure(levels.clone(), uniform_dipoles(4, 1.0));
        assert_eq!(
            classify(&r, &h0(&levels)).unwrap().classification,
            Classification::ProperSubalgebra
        );
    }

    #[test]
    fn closure_is_idempotent() {
        let r = closure(harmonic_levels(5).unwrap(), uniform_dipoles(5, 1.0));
        let again = generate_lie_algebra(r.basis.originals(), DEFAULT_TOL).unwrap();
        assert_eq!(again.dimension, r.dimension);
        let mut seeded = r.basis.clone();
        for e in r.basis.elements() {
            assert!(!seeded.add(e).unwrap().added);
        }
    }

    #[test]
    fn multi_control_input() {
        let spec =
            SystemSpec::new(harmonic_levels(4).unwrap(), uniform_dipoles(4, 1.0), "").unwrap();
        let mut gens = spec.generators();
        let single = generate_lie_algebra(&gens, DEFAULT_TOL).unwrap().dimension;
        gens.push(generator(GeneratorKind::EI, 1, 2, 4).unwrap());
        let multi = generate_lie_algebra(&gens, DEFAULT_TOL).unwrap().dimension;
        assert!(multi >= single);
        assert_eq!(multi, 16);
    }
}
