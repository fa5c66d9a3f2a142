use thiserror::Error;

use crate::modelspec::expr::EvalError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("atom space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("missing tail bound: {0}")]
    MissingTailBound(String),

    #[error("invalid atom space: {0}")]
    InvalidSpace(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("weights sum to {total}, outside 1 ± {tol}")]
    Normalization { total: f64, tol: f64 },

    #[error(
        "tail bound contract fails at horizon {horizon}: partial mass {partial}, tail bound {tail}"
    )]
    TailBound {
        horizon: u64,
        partial: f64,
        tail: f64,
    },

    #[error("invalid random variable: {0}")]
    InvalidVariable(String),

    #[error("invalid level: {0}")]
    InvalidLevel(String),

    #[error("expression evaluation failed at atom {atom}: {source}")]
    Expr { atom: u64, source: EvalError },

    #[error("family is empty")]
    EmptyFamily,

    #[error("sandwich violated at m = {m}: excess(m) = {lo}, tail sum = {mid}, excess(m-1) = {hi}")]
    SandwichViolation { m: u64, lo: f64, mid: f64, hi: f64 },

    #[error("inconsistent profiles: {}", .0.join("; "))]
    InconsistentProfiles(Vec<String>),

    #[error("unsupported integrand: {0}")]
    UnsupportedIntegrand(String),

    #[error("axiom `{axiom}` violated by {violation:e}: {witness}")]
    AxiomViolation {
        axiom: &'static str,
        violation: f64,
        witness: String,
    },

    #[error("threshold search for k = {k} reached cap {cap}; last profile value {last_value}")]
    SearchCapExceeded { k: usize, cap: u64, last_value: f64 },

    #[error("budget violated: sup E[phi(|X|)] = {value} exceeds {budget}")]
    BudgetViolation { value: f64, budget: f64 },

    #[error("sufficiency witness violated at level {level}: ui = {ui} > bound {bound}")]
    WitnessViolation { level: f64, ui: f64, bound: f64 },

    #[error("invalid phi: {0}")]
    InvalidPhi(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn expr(atom: u64) -> impl FnOnce(EvalError) -> Error {
        move |source| Error::Expr { atom, source }
    }
}
