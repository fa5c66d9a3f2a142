//! Values with truncation bookkeeping.

use std::fmt;

use serde::Serialize;

/// How much a reported value can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Exact,
    /// The true value is at least `value`.
    LowerBound,
    /// The true value is at most `value`.
    UpperBound,
    Bracket { lo: f64, hi: f64 },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Exact => f.write_str("exact"),
            Certificate::LowerBound => f.write_str("lower_bound"),
            Certificate::UpperBound => f.write_str("upper_bound"),
            Certificate::Bracket { lo, hi } => write!(
                f,
                "bracket({};{})",
                crate::fmt::shortest(*lo),
                crate::fmt::shortest(*hi)
            ),
        }
    }
}

/// A functional value together with its certificate.
///
/// For a bracket, `value` is the lower end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: f64,
    pub certificate: Certificate,
    pub horizon_used: Option<u64>,
}

impl EvalResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            certificate: Certificate::Exact,
            horizon_used: None,
        }
    }

    pub fn lower_bound(value: f64, horizon: Option<u64>) -> Self {
        Self {
            value,
            certificate: Certificate::LowerBound,
            horizon_used: horizon,
        }
    }

    pub fn upper_bound(value: f64, horizon: Option<u64>) -> Self {
        Self {
            value,
            certificate: Certificate::UpperBound,
            horizon_used: horizon,
        }
    }

    /// Bracket `[lo, hi]`; panics in debug builds if `lo > hi`.
    pub fn bracket(lo: f64, hi: f64, horizon: Option<u64>) -> Self {
        debug_assert!(lo <= hi, "bracket [{lo}, {hi}] is inverted");
        Self {
            value: lo,
            certificate: Certificate::Bracket { lo, hi },
            horizon_used: horizon,
        }
    }

    /// Rebuild a result from interval bounds. Infinite ends become one-sided
    /// certificates.
    pub fn from_bounds(lo: f64, hi: f64, horizon: Option<u64>) -> Self {
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => Self::bracket(lo, hi, horizon),
            (true, false) => Self::lower_bound(lo, horizon),
            (false, true) => Self::upper_bound(hi, horizon),
            (false, false) => Self::lower_bound(lo, horizon),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.certificate == Certificate::Exact
    }

    /// Lower end of the set of values consistent with the certificate.
    pub fn lo(&self) -> f64 {
        match self.certificate {
            Certificate::Exact | Certificate::LowerBound => self.value,
            Certificate::UpperBound => f64::NEG_INFINITY,
            Certificate::Bracket { lo, .. } => lo,
        }
    }

    /// Upper end of the set of values consistent with the certificate.
    pub fn hi(&self) -> f64 {
        match self.certificate {
            Certificate::Exact | Certificate::UpperBound => self.value,
            Certificate::LowerBound => f64::INFINITY,
            Certificate::Bracket { hi, .. } => hi,
        }
    }

    fn merge_horizon(a: Option<u64>, b: Option<u64>) -> Option<u64> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    fn combine(self, other: Self, lo: f64, hi: f64) -> Self {
        let horizon = Self::merge_horizon(self.horizon_used, other.horizon_used);
        if self.is_exact() && other.is_exact() {
            Self {
                value: lo,
                certificate: Certificate::Exact,
                horizon_used: horizon,
            }
        } else {
            Self::from_bounds(lo, hi, horizon)
        }
    }

    /// Supremum of two results, computed on their intervals.
    pub fn max(self, other: Self) -> Self {
        if self.is_exact() && other.is_exact() {
            let v = self.value.max(other.value);
            return self.combine(other, v, v);
        }
        self.combine(other, self.lo().max(other.lo()), self.hi().max(other.hi()))
    }

    /// Infimum of two results, computed on their intervals.
    pub fn min(self, other: Self) -> Self {
        if self.is_exact() && other.is_exact() {
            let v = self.value.min(other.value);
            return self.combine(other, v, v);
        }
        self.combine(other, self.lo().min(other.lo()), self.hi().min(other.hi()))
    }

    /// Upper end clipped to `hi` when that tightens the result.
    pub fn with_upper(self, hi: f64) -> Self {
        if hi >= self.hi() || self.is_exact() {
            return self;
        }
        let lo = self.lo();
        Self::from_bounds(lo, hi.max(lo), self.horizon_used)
    }
}

impl fmt::Display for EvalResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", crate::fmt::shortest(self.value), self.certificate)
    }
}
