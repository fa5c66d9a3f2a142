//! The step function `φ(t) = sum_k (⌊t⌋ - n_k)⁺` built from integer
//! thresholds with `sup_X 𝓔[(|X| - n_k)⁺] < 2^-k`, and its checks.

use crate::error::{Error, Result};
use crate::family::{FamilyOfRVs, Horizons, CROSS_CHECK_TOL};
use crate::prob::{EvalResult, Integrand};
use crate::sum::CompensatedSum;

pub const DEFAULT_K: usize = 20;
pub const DEFAULT_SEARCH_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiOrigin {
    /// Produced by [`find_thresholds`] for the family it is checked against.
    Searched,
    External,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiFunction {
    thresholds: Vec<u64>,
    origin: PhiOrigin,
}

impl PhiFunction {
    /// An externally supplied φ; thresholds must be positive and strictly
    /// increasing.
    pub fn new(thresholds: Vec<u64>) -> Result<Self> {
        Self::with_origin(thresholds, PhiOrigin::External)
    }

    fn with_origin(thresholds: Vec<u64>, origin: PhiOrigin) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::InvalidPhi("no thresholds".into()));
        }
        if thresholds[0] == 0 {
            return Err(Error::InvalidPhi("thresholds must be positive".into()));
        }
        if let Some(w) = thresholds.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPhi(format!(
                "thresholds must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { thresholds, origin })
    }

    pub fn thresholds(&self) -> &[u64] {
        &self.thresholds
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn origin(&self) -> PhiOrigin {
        self.origin
    }

    /// `sum_k (⌊t⌋ - n_k)⁺`, zero for `t < n_1 + 1`.
    pub fn eval(&self, t: f64) -> f64 {
        if !(t >= 0.0) {
            return 0.0;
        }
        let n = t.floor();
        let mut acc = 0.0;
        for &nk in &self.thresholds {
            let d = n - nk as f64;
            if d <= 0.0 {
                break;
            }
            acc += d;
        }
        acc
    }

    /// `φ(n) / n`
    pub fn ratio(&self, n: u64) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.eval(n as f64) / n as f64
        }
    }

    /// `sum_{k=1}^{K} 2^-k = 1 - 2^-K`
    pub fn budget(&self) -> f64 {
        1.0 - 0.5f64.powi(self.len() as i32)
    }
}

/// `sup_X 𝓔[(|X| - n)⁺]` over the family.
fn sup_excess(f: &FamilyOfRVs, n: u64, h: &Horizons) -> Result<EvalResult> {
    sup_integrand(f, &Integrand::Excess(n as f64), h)
}

fn sup_integrand(f: &FamilyOfRVs, g: &Integrand<'_>, h: &Horizons) -> Result<EvalResult> {
    let mut acc: Option<EvalResult> = None;
    for x in f.members() {
        let r = f.context().upper(x, g, h)?;
        acc = Some(acc.map_or(r, |a| a.max(r)));
    }
    Ok(acc.expect("family is nonempty"))
}

/// Smallest `n_1 < n_2 < … < n_K`, each minimal given the previous one,
/// with `sup_X 𝓔[(|X| - n_k)⁺] < 2^-k` certified by the upper end of the
/// evaluated interval.
pub fn find_thresholds(f: &FamilyOfRVs, k: usize, search_cap: u64, h: &Horizons) -> Result<PhiFunction> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    let mut thresholds = Vec::with_capacity(k);
    let mut start = 1u64;
    for idx in 1..=k {
        let target = 0.5f64.powi(idx as i32);
        let ok = |n: u64| -> Result<(bool, f64)> {
            let r = sup_excess(f, n, h)?;
            Ok((r.hi() < target, r.value))
        };
        if start > search_cap {
            let (_, v) = ok(search_cap)?;
            return Err(Error::SearchCapExceeded {
                k: idx,
                cap: search_cap,
                last_value: v,
            });
        }
        let nk = if ok(start)?.0 {
            start
        } else {
            // gallop to a passing level, then bisect
            let mut bad = start;
            let mut step = 1u64;
            let good = loop {
                let probe = bad.saturating_add(step).min(search_cap);
                let (pass, v) = ok(probe)?;
                if pass {
                    break probe;
                }
                if probe == search_cap {
                    return Err(Error::SearchCapExceeded {
                        k: idx,
                        cap: search_cap,
                        last_value: v,
                    });
                }
                bad = probe;
                step = step.saturating_mul(2);
            };
            let (mut lo, mut hi) = (bad, good);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if ok(mid)?.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        };
        thresholds.push(nk);
        start = nk + 1;
    }
    PhiFunction::with_origin(thresholds, PhiOrigin::Searched)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiReport {
    /// `sup_X 𝓔[φ(|X|)]`
    pub sup_value: EvalResult,
    /// `1 - 2^-K`, checked only for searched thresholds.
    pub budget: Option<f64>,
    /// `sup_X 𝓔[(|X| - n_k)⁺]` for each `k`.
    pub terms: Vec<EvalResult>,
    /// `(n, φ(n)/n)` for `n = 2^j`.
    pub growth: Vec<(u64, f64)>,
    pub growth_monotone: bool,
    /// Whether lowering any single threshold by one breaks its bound;
    /// `None` for external thresholds.
    pub minimal: Option<bool>,
}

/// The budget bound, the sub-additivity chain per member, the growth table
/// and minimality.
pub fn verify_phi(f: &FamilyOfRVs, phi: &PhiFunction, h: &Horizons) -> Result<PhiReport> {
    let terms = phi
        .thresholds()
        .iter()
        .map(|&n| sup_excess(f, n, h))
        .collect::<Result<Vec<_>>>()?;

    for x in f.members() {
        let lhs = f.context().upper(x, &Integrand::Phi(phi), h)?;
        let mut rhs = CompensatedSum::new();
        for &n in phi.thresholds() {
            rhs.add(f.context().upper(x, &Integrand::Excess(n as f64), h)?.hi());
        }
        if lhs.lo() > rhs.value() + CROSS_CHECK_TOL {
            return Err(Error::BudgetViolation {
                value: lhs.lo(),
                budget: rhs.value(),
            });
        }
    }

    let sup_value = sup_integrand(f, &Integrand::Phi(phi), h)?;
    let searched = phi.origin() == PhiOrigin::Searched;
    let budget = searched.then(|| phi.budget());
    if let Some(b) = budget {
        if sup_value.lo() > b {
            return Err(Error::BudgetViolation {
                value: sup_value.value,
                budget: b,
            });
        }
        for (j, t) in terms.iter().enumerate() {
            let target = 0.5f64.powi(j as i32 + 1);
            if !(t.hi() < target) {
                return Err(Error::BudgetViolation {
                    value: t.value,
                    budget: target,
                });
            }
        }
    }

    let last = *phi.thresholds().last().expect("nonempty");
    let top = (64 - last.leading_zeros()).max(16) + 4;
    let growth: Vec<(u64, f64)> = (0..=top.min(62)).map(|j| 1u64 << j).map(|n| (n, phi.ratio(n))).collect();
    let growth_monotone = growth.windows(2).all(|w| w[1].1 >= w[0].1);

    let minimal = if searched {
        let mut all = true;
        for (j, &n) in phi.thresholds().iter().enumerate() {
            let floor = if j == 0 { 1 } else { phi.thresholds()[j - 1] + 1 };
            if n > floor {
                let target = 0.5f64.powi(j as i32 + 1);
                if sup_excess(f, n - 1, h)?.hi() < target {
                    all = false;
                }
            }
        }
        Some(all)
    } else {
        None
    };

    Ok(PhiReport {
        sup_value,
        budget,
        terms,
        growth,
        growth_monotone,
        minimal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessRow {
    pub level: f64,
    pub ui: EvalResult,
    /// `None` when `φ` vanishes at the reference point.
    pub bound: Option<f64>,
}

/// `sup_X 𝓔[|X| 1{|X| >= a}] <= sup_X 𝓔[φ(|X|)] · r(a)` at each level.
///
/// For integer-valued families `r(a) = ⌈a⌉ / φ(⌈a⌉)`; otherwise
/// `r(a) = (⌊a⌋ + 1) / φ(⌊a⌋)`, which also covers the fractional part
/// discarded by the floor in `φ`.
pub fn check_sufficiency_witness(f: &FamilyOfRVs, phi: &PhiFunction, levels: &[f64], h: &Horizons) -> Result<Vec<WitnessRow>> {
    crate::prob::check_levels(levels)?;
    let sup_phi = sup_integrand(f, &Integrand::Phi(phi), h)?.hi();
    let integer_valued = f.members().iter().all(|x| x.is_integer_valued() == Some(true));
    let mut rows = Vec::with_capacity(levels.len());
    for &a in levels {
        let ui = sup_integrand(f, &Integrand::TruncatedAbove(a), h)?;
        let ratio = if integer_valued {
            let c = a.ceil();
            let p = phi.eval(c);
            (p > 0.0).then(|| c / p)
        } else {
            let fl = a.floor();
            let p = phi.eval(fl);
            (p > 0.0).then(|| (fl + 1.0) / p)
        };
        let bound = ratio.map(|r| sup_phi * r);
        if let Some(b) = bound {
            if ui.lo() > b + CROSS_CHECK_TOL {
                return Err(Error::WitnessViolation {
                    level: a,
                    ui: ui.value,
                    bound: b,
                });
            }
        }
        rows.push(WitnessRow { level: a, ui, bound });
    }
    Ok(rows)
}
