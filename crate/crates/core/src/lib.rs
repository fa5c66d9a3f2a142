//! Uniform integrability, numerically.
//!
//! The crate evaluates the classical and sublinear uniform-integrability
//! functionals on concrete discrete models:
//!
//! * [`prob`]: measures on finite or countable atom spaces, random
//!   variables and the truncated / excess / capped expectations, tail
//!   probabilities and tail sums.
//! * [`family`]: sup/inf profiles of a family of variables for UI, W-UI,
//!   W*-UI and their nonintegrability duals, with consistency diagnostics.
//! * [`sublinear`]: upper expectations over measure sets, axiom checks, the
//!   two-condition characterization and the built-in
//!   `remark-counterexample` model that is UI but not S-UI.
//! * [`poussin`]: the step function φ built from integer thresholds with
//!   `sup E[(|X| - n_k)⁺] < 2^-k`, and its verification.
//! * [`modelspec`]: the formula language and the JSON model file format.
//! * [`cli`]: the `uicrit` command-line front end.

// negated float comparisons are used on purpose so NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod family;
pub mod fmt;
pub mod modelspec;
pub mod poussin;
pub mod prob;
pub mod sublinear;
pub mod sum;

pub use error::{Error, Result};
pub use family::{Criterion, Direction, FamilyOfRVs, Horizons, MeasureContext, Profile};
pub use poussin::PhiFunction;
pub use prob::{AtomSpace, Certificate, EvalResult, Integrand, Measure, RandomVariable};
pub use sublinear::{MeasureSet, SublinearExpectation};
