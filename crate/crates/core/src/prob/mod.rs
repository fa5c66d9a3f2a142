//! Atom spaces, measures, random variables and the elementary functionals
//! every uniform-integrability criterion is built from.

pub mod eval;
pub mod functional;
pub mod integrand;
pub mod measure;
pub mod space;
pub mod variable;

pub use eval::{Certificate, EvalResult};
pub use functional::{
    at_least_prob, capped, check_levels, excess, expectation, integrate, tail_prob, tail_sum,
    truncated_above, truncated_below,
};
pub use integrand::Integrand;
pub use measure::{Measure, Weights, DEFAULT_NORMALIZATION_TOL};
pub use space::AtomSpace;
pub use variable::{RandomVariable, Values};
