//! Functions of `|X|` whose expectations make up every criterion.

use std::fmt;

use crate::error::{Error, Result};
use crate::poussin::PhiFunction;

/// An integrand `g(|X|)`.
///
/// Events are fixed as in the criteria: truncation and excess use `{|X| >= a}`,
/// tail probabilities use `{|X| > n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrand<'a> {
    /// `|X|`
    Abs,
    /// `|X| · 1{|X| >= a}`
    TruncatedAbove(f64),
    /// `|X| · 1{|X| <= a}`
    TruncatedBelow(f64),
    /// `(|X| - a)⁺`
    Excess(f64),
    /// `|X| ∧ a`
    Capped(f64),
    /// `1{|X| > t}`
    Exceeds(f64),
    /// `1{|X| >= a}`
    AtLeast(f64),
    /// `#{n : start <= n <= end, n < |X|}`, i.e. `sum_{n=start}^{end} 1{|X| > n}`.
    TailCount { start: u64, end: u64 },
    /// `φ(|X|)`
    Phi(&'a PhiFunction),
}

impl Integrand<'_> {
    /// Evaluate at `t = |X(ω)| >= 0`.
    #[inline]
    pub fn apply(&self, t: f64) -> f64 {
        match *self {
            Integrand::Abs => t,
            Integrand::TruncatedAbove(a) => {
                if t >= a {
                    t
                } else {
                    0.0
                }
            }
            Integrand::TruncatedBelow(a) => {
                if t <= a {
                    t
                } else {
                    0.0
                }
            }
            Integrand::Excess(a) => (t - a).max(0.0),
            Integrand::Capped(a) => t.min(a),
            Integrand::Exceeds(s) => {
                if t > s {
                    1.0
                } else {
                    0.0
                }
            }
            Integrand::AtLeast(a) => {
                if t >= a {
                    1.0
                } else {
                    0.0
                }
            }
            Integrand::TailCount { start, end } => tail_count(t, start, end),
            Integrand::Phi(phi) => phi.eval(t),
        }
    }

    /// `sup_t g(t)` when finite.
    pub fn bound(&self) -> Option<f64> {
        match *self {
            Integrand::TruncatedBelow(a) | Integrand::Capped(a) => Some(a),
            Integrand::Exceeds(_) | Integrand::AtLeast(_) => Some(1.0),
            Integrand::TailCount { start, end } => Some(if end >= start {
                (end - start + 1) as f64
            } else {
                0.0
            }),
            Integrand::Abs | Integrand::TruncatedAbove(_) | Integrand::Excess(_) | Integrand::Phi(_) => {
                None
            }
        }
    }

    /// A constant `c` with `g(t) <= c · t` for all `t >= 0`, when one exists.
    pub fn linear_growth(&self) -> Option<f64> {
        match *self {
            Integrand::Abs
            | Integrand::TruncatedAbove(_)
            | Integrand::TruncatedBelow(_)
            | Integrand::Excess(_)
            | Integrand::Capped(_)
            | Integrand::TailCount { .. } => Some(1.0),
            Integrand::Exceeds(s) if s > 0.0 => Some(1.0 / s),
            Integrand::AtLeast(a) if a > 0.0 => Some(1.0 / a),
            Integrand::Exceeds(_) | Integrand::AtLeast(_) => None,
            Integrand::Phi(phi) => Some(phi.len() as f64),
        }
    }

    /// Rejects negative or non-finite levels.
    pub fn validate(&self) -> Result<()> {
        let level = match *self {
            Integrand::TruncatedAbove(a)
            | Integrand::TruncatedBelow(a)
            | Integrand::Excess(a)
            | Integrand::Capped(a)
            | Integrand::Exceeds(a)
            | Integrand::AtLeast(a) => a,
            Integrand::Abs | Integrand::TailCount { .. } | Integrand::Phi(_) => return Ok(()),
        };
        check_level(level)
    }
}

pub(crate) fn check_level(a: f64) -> Result<()> {
    if a.is_finite() && a >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidLevel(format!(
            "{a} (levels are finite and nonnegative)"
        )))
    }
}

/// Number of integers `n` in `[start, end]` with `n < t`.
pub(crate) fn tail_count(t: f64, start: u64, end: u64) -> f64 {
    if end < start || t <= start as f64 {
        return 0.0;
    }
    // largest integer strictly below t
    let top = (t.ceil() - 1.0).min(end as f64);
    if top < start as f64 {
        0.0
    } else {
        top - start as f64 + 1.0
    }
}

impl fmt::Display for Integrand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Integrand::Abs => write!(f, "|X|"),
            Integrand::TruncatedAbove(a) => write!(f, "|X|·1{{|X| >= {a}}}"),
            Integrand::TruncatedBelow(a) => write!(f, "|X|·1{{|X| <= {a}}}"),
            Integrand::Excess(a) => write!(f, "(|X| - {a})+"),
            Integrand::Capped(a) => write!(f, "|X| ∧ {a}"),
            Integrand::Exceeds(t) => write!(f, "1{{|X| > {t}}}"),
            Integrand::AtLeast(a) => write!(f, "1{{|X| >= {a}}}"),
            Integrand::TailCount { start, end } => write!(f, "sum_{{n={start}}}^{{{end}}} 1{{|X| > n}}"),
            Integrand::Phi(phi) => write!(f, "phi{:?}(|X|)", phi.thresholds()),
        }
    }
}
