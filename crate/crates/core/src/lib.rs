//! Controllability analysis for N-level quantum systems driven by a single
//! dipole-coupled control field.
//!
//! The numeric route computes the dynamical Lie algebra generated by
//! `{iH_0, iH_1}` and checks whether it is all of u(N). The analytic route
//! evaluates sufficient conditions on the level spacings and dipole moments
//! and replays their constructive proofs as numerical witnesses. The two are
//! cross-checked in [`criteria::full_verdict`].

pub mod criteria;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod model;

pub use criteria::{full_verdict, Conclusion, TheoremId, TheoremVerdict, VerdictReport, Witness};
pub use error::{Error, Result};
pub use lie::{generate_lie_algebra, Classification, ClosureResult, SpanBasis, DEFAULT_TOL};
pub use linalg::{commutator, ComplexMatrix, RealVector};
pub use model::{DerivedParams, GeneratorKind, SystemSpec};
