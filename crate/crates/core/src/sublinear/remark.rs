//! The two-atom counterexample: `P_k(k) = 1/(k ln k)`, `P_k(0) = 1 - P_k(k)`
//! for `k >= 2`, with `X(n) = n`. `{X}` is UI under `sup_k E_k` but the
//! upper tail series diverges.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::family::{AnalyticLimit, Criterion, Horizons};
use crate::prob::{integrate, AtomSpace, EvalResult, Integrand, Measure, RandomVariable};
use crate::sublinear::{ClosedFormPlugin, MeasureSet, SublinearExpectation};

pub const REMARK_PLUGIN: &str = "remark-counterexample";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RemarkCounterexample {
    n_max: u64,
}

/// The counterexample model and its variable `X(n) = n`.
///
/// `n_max` bounds the per-index measures materialized for brute force.
pub fn build_counterexample(n_max: u64) -> Result<(SublinearExpectation, RandomVariable)> {
    let plugin = RemarkCounterexample::new(n_max)?;
    let e = SublinearExpectation::new(MeasureSet::ClosedForm(Arc::new(plugin)));
    Ok((e, RandomVariable::identity()))
}

/// `1/(k ln k)`
pub fn atom_mass(k: u64) -> f64 {
    let k = k as f64;
    1.0 / (k * k.ln())
}

impl RemarkCounterexample {
    pub const FIRST_INDEX: u64 = 2;

    pub fn new(n_max: u64) -> Result<Self> {
        if n_max < 3 {
            return Err(Error::InvalidArgument(format!("n_max = {n_max}, need at least 3")));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// `max_{first <= k <= last} E_k[g(|X|)]` over materialized measures.
    pub fn brute_force(&self, x: &RandomVariable, g: &Integrand<'_>, first: u64, last: u64) -> Result<EvalResult> {
        let mut best: Option<EvalResult> = None;
        for k in first.max(Self::FIRST_INDEX)..=last.min(self.n_max) {
            let r = integrate(x, &self.measure(k)?, g, Horizons::default().atoms)?;
            best = Some(best.map_or(r, |b| b.max(r)));
        }
        best.ok_or_else(|| Error::InvalidArgument(format!("empty index range {first}..={last}")))
    }

    /// Closed form and brute-force maximum over indices `2..=n_max`.
    pub fn cross_check(&self, x: &RandomVariable, g: &Integrand<'_>) -> Result<(f64, f64)> {
        let closed = self.sup_expectation(x, g)?;
        let brute = self.brute_force(x, g, Self::FIRST_INDEX, self.n_max)?;
        Ok((closed, brute.value))
    }
}

impl ClosedFormPlugin for RemarkCounterexample {
    fn name(&self) -> &str {
        REMARK_PLUGIN
    }

    fn space(&self) -> AtomSpace {
        AtomSpace::Countable
    }

    fn index_range(&self) -> (u64, u64) {
        (Self::FIRST_INDEX, self.n_max)
    }

    fn measure(&self, k: u64) -> Result<Measure> {
        if k < Self::FIRST_INDEX {
            return Err(Error::InvalidArgument(format!("index {k} below 2")));
        }
        let p = atom_mass(k);
        Measure::sparse(AtomSpace::Countable, vec![(0, 1.0 - p), (k, p)])
    }

    fn supports(&self, x: &RandomVariable) -> bool {
        x.is_identity()
    }

    fn sup_expectation(&self, x: &RandomVariable, g: &Integrand<'_>) -> Result<f64> {
        if !self.supports(x) {
            return Err(Error::UnsupportedIntegrand(format!(
                "`{REMARK_PLUGIN}` has closed forms for X(n) = n only"
            )));
        }
        g.validate()?;
        Ok(sup_closed_form(g))
    }

    fn limit(&self, x: &RandomVariable, criterion: Criterion) -> Option<AnalyticLimit> {
        if !self.supports(x) {
            return None;
        }
        match criterion {
            // the per-measure series is squeezed by the excess from m - 1
            Criterion::Ui | Criterion::WUi | Criterion::WStarUi => Some(AnalyticLimit::Vanishes),
            Criterion::SUi => Some(AnalyticLimit::Diverges),
            _ => None,
        }
    }
}

/// `sup_{k >= 2} E_k[g(|X|)]` where `E_k[g] = g(0)(1 - p_k) + g(k) p_k`.
///
/// Every integrand here has `g(0) = 0` except `AtLeast(0)`.
fn sup_closed_form(g: &Integrand<'_>) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    match *g {
        Integrand::Abs => 1.0 / ln2,
        // k p_k = 1/ln k, decreasing
        Integrand::TruncatedAbove(a) => 1.0 / (first_index_at_least(a) as f64).ln(),
        Integrand::TruncatedBelow(a) => {
            if a >= 2.0 {
                1.0 / ln2
            } else {
                0.0
            }
        }
        // min(k, a) p_k is largest at k = 2
        Integrand::Capped(a) => a.min(2.0) / (2.0 * ln2),
        Integrand::Excess(a) => ramp_max(a, 2, u64::MAX),
        Integrand::Exceeds(t) => atom_mass(first_index_above(t)),
        Integrand::AtLeast(a) => {
            if a <= 0.0 {
                1.0
            } else {
                atom_mass(first_index_at_least(a))
            }
        }
        Integrand::TailCount { start, end } => {
            if end < start {
                return 0.0;
            }
            // count(k) = (k - start)⁺ for k <= end + 1, then constant
            let ramp = ramp_max(start as f64, 2, end.saturating_add(1));
            let flat = (end - start + 1) as f64 * atom_mass(end.saturating_add(2));
            ramp.max(flat)
        }
        Integrand::Phi(phi) => {
            // on (n_j, n_{j+1}], φ(k) = j k - S_j
            let t = phi.thresholds();
            let mut best = 0.0f64;
            let mut s = 0u64;
            for (j, &nj) in t.iter().enumerate() {
                s += nj;
                let slope = (j + 1) as f64;
                let hi = t.get(j + 1).copied().unwrap_or(u64::MAX);
                best = best.max(slope * ramp_max(s as f64 / slope, nj + 1, hi));
            }
            best
        }
    }
}

/// Smallest index `k >= 2` with `k >= a`.
fn first_index_at_least(a: f64) -> u64 {
    (a.ceil() as u64).max(2)
}

/// Smallest index `k >= 2` with `k > t`.
fn first_index_above(t: f64) -> u64 {
    (t.floor() as u64 + 1).max(2)
}

/// `max (k - a) / (k ln k)` over integers `k` in `[lo, hi]` with `k >= 2`,
/// `k > a`; zero when no such `k` exists.
///
/// On `x > a` the derivative has the sign of `a (1 + ln x) - x`, so the
/// ratio decreases for `a <= 1` and is unimodal otherwise.
pub fn ramp_max(a: f64, lo: u64, hi: u64) -> f64 {
    let lo = lo.max(2).max(a.floor() as u64 + 1);
    if lo > hi {
        return 0.0;
    }
    let ratio = |k: u64| {
        let k = k as f64;
        (k - a) / (k * k.ln())
    };
    let mut candidates = vec![lo];
    if hi != u64::MAX {
        candidates.push(hi);
    }
    if a > 1.0 {
        let peak = ramp_peak(a);
        let base = peak.floor();
        for d in [-1.0, 0.0, 1.0, 2.0] {
            let k = base + d;
            if k >= lo as f64 && k <= hi as f64 {
                candidates.push(k as u64);
            }
        }
    }
    candidates.into_iter().map(ratio).fold(0.0, f64::max)
}

/// The root `x > a` of `x = a (1 + ln x)` for `a > 1`.
fn ramp_peak(a: f64) -> f64 {
    let h = |x: f64| a * (1.0 + x.ln()) - x;
    let mut lo = a;
    let mut hi = 2.0 * a;
    while h(hi) >= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
