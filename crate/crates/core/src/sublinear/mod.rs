//! Sublinear expectations `𝓔[·] = sup_{P in set} E_P[·]` and the
//! uniform-integrability criteria evaluated under them.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::family::{AnalyticLimit, Criterion, Horizons};
use crate::prob::{integrate, tail_sum, AtomSpace, EvalResult, Integrand, Measure, RandomVariable};

pub mod axioms;
pub mod profiles;
pub mod remark;
pub mod characterization;

pub use axioms::{axiom_report, check_axioms, AxiomReport, AxiomStats};
pub use profiles::{sle_sui_profile, sle_ui_profile, sle_wui_profile};
pub use remark::{build_counterexample, RemarkCounterexample, REMARK_PLUGIN};
pub use characterization::{check_characterization, scaled_indicator_family, CharacterizationConfig, CharacterizationReport};

/// How the supremum over an indexed family is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupStrategy {
    /// Largest index evaluated.
    pub k_max: u64,
    /// Declares the per-index value nonincreasing beyond `k_max` for the
    /// integrands queried, which makes the truncated maximum exact.
    pub monotone_tail: bool,
}

pub type MeasureConstructor = Arc<dyn Fn(u64) -> Result<Measure> + Send + Sync>;

/// Measures `P_k` for `k = first, first + 1, …`, built on demand.
#[derive(Clone)]
pub struct IndexedFamily {
    space: AtomSpace,
    first: u64,
    constructor: MeasureConstructor,
    strategy: SupStrategy,
}

impl fmt::Debug for IndexedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IndexedFamily")
            .field("space", &self.space)
            .field("first", &self.first)
            .field("strategy", &self.strategy)
            .finish_non_exhaustive()
    }
}

impl IndexedFamily {
    pub fn new(
        space: AtomSpace,
        first: u64,
        strategy: SupStrategy,
        constructor: impl Fn(u64) -> Result<Measure> + Send + Sync + 'static,
    ) -> Result<Self> {
        if strategy.k_max < first {
            return Err(Error::InvalidArgument(format!(
                "k_max {} below first index {first}",
                strategy.k_max
            )));
        }
        Ok(Self {
            space,
            first,
            constructor: Arc::new(constructor),
            strategy,
        })
    }

    pub fn measure(&self, k: u64) -> Result<Measure> {
        let m = (self.constructor)(k)?;
        m.space().check_same(&self.space, "indexed measure")?;
        Ok(m)
    }

    pub fn strategy(&self) -> SupStrategy {
        self.strategy
    }
}

/// A measure family with exact suprema for a declared class of integrands.
///
/// Implementations must also materialize their per-index measures so the
/// closed forms can be cross-checked by brute force.
pub trait ClosedFormPlugin: fmt::Debug + Send + Sync {
    /// Stable name used by model files and the CLI.
    fn name(&self) -> &str;

    fn space(&self) -> AtomSpace;

    /// First and last index available for brute-force materialization.
    fn index_range(&self) -> (u64, u64);

    fn measure(&self, index: u64) -> Result<Measure>;

    /// Whether `x` is in the plugin's declared class.
    fn supports(&self, x: &RandomVariable) -> bool;

    /// Exact `sup_k E_k[g(|X|)]` over the whole (infinite) index set.
    fn sup_expectation(&self, x: &RandomVariable, g: &Integrand<'_>) -> Result<f64>;

    /// Analytic knowledge of a criterion's limit for `{x}`, if any.
    fn limit(&self, x: &RandomVariable, criterion: Criterion) -> Option<AnalyticLimit>;
}

#[derive(Debug, Clone)]
pub enum MeasureSet {
    /// Extreme points of a credal set; the supremum over the convex hull is
    /// the maximum over this list.
    Explicit(Vec<Measure>),
    Indexed(IndexedFamily),
    ClosedForm(Arc<dyn ClosedFormPlugin>),
}

impl MeasureSet {
    pub fn explicit(measures: Vec<Measure>) -> Result<Self> {
        let Some(first) = measures.first() else {
            return Err(Error::InvalidMeasure("measure set is empty".into()));
        };
        let space = first.space();
        for m in &measures[1..] {
            m.space().check_same(&space, "measure set")?;
        }
        Ok(MeasureSet::Explicit(measures))
    }

    pub fn space(&self) -> AtomSpace {
        match self {
            MeasureSet::Explicit(ms) => ms[0].space(),
            MeasureSet::Indexed(f) => f.space,
            MeasureSet::ClosedForm(p) => p.space(),
        }
    }

    pub fn len_hint(&self) -> Option<usize> {
        match self {
            MeasureSet::Explicit(ms) => Some(ms.len()),
            _ => None,
        }
    }

    /// The per-index measures available for brute-force evaluation.
    pub fn materialize(&self) -> Result<Vec<Measure>> {
        match self {
            MeasureSet::Explicit(ms) => Ok(ms.clone()),
            MeasureSet::Indexed(f) => (f.first..=f.strategy.k_max).map(|k| f.measure(k)).collect(),
            MeasureSet::ClosedForm(p) => {
                let (lo, hi) = p.index_range();
                (lo..=hi).map(|k| p.measure(k)).collect()
            }
        }
    }

    /// The first `max_measures` measures pushed forward under
    /// `ω ↦ min(ω, last_atom)`, as an explicit set on `Finite(last_atom + 1)`.
    /// Mass beyond the window lands on `last_atom`.
    pub fn finite_window(&self, last_atom: u64, max_measures: usize) -> Result<MeasureSet> {
        if let (MeasureSet::Explicit(_), AtomSpace::Finite(_)) = (self, self.space()) {
            return Ok(self.clone());
        }
        let measures: Vec<Measure> = match self {
            MeasureSet::Explicit(ms) => ms.iter().take(max_measures).cloned().collect(),
            MeasureSet::Indexed(f) => (f.first..=f.strategy.k_max)
                .take(max_measures)
                .map(|k| f.measure(k))
                .collect::<Result<_>>()?,
            MeasureSet::ClosedForm(p) => {
                let (lo, hi) = p.index_range();
                (lo..=hi).take(max_measures).map(|k| p.measure(k)).collect::<Result<_>>()?
            }
        };
        let mut out = Vec::with_capacity(measures.len());
        for m in measures {
            let mut w = vec![0.0; last_atom as usize + 1];
            match m.weights() {
                crate::prob::Weights::Dense(d) => {
                    for (i, &p) in d.iter().enumerate() {
                        w[(i as u64).min(last_atom) as usize] += p;
                    }
                }
                crate::prob::Weights::Sparse(pairs) => {
                    for &(i, p) in pairs {
                        w[i.min(last_atom) as usize] += p;
                    }
                }
                crate::prob::Weights::Formula { .. } => {
                    let mut head = crate::sum::CompensatedSum::new();
                    for i in 0..last_atom {
                        let p = m.mass(i)?;
                        w[i as usize] = p;
                        head.add(p);
                    }
                    w[last_atom as usize] = (1.0 - head.value()).max(0.0);
                }
            }
            out.push(Measure::finite_with_tolerance(w, m.tolerance())?);
        }
        MeasureSet::explicit(out)
    }
}

/// `𝓔[·] = sup_{P in measures} E_P[·]`.
#[derive(Debug, Clone)]
pub struct SublinearExpectation {
    measures: MeasureSet,
}

impl SublinearExpectation {
    pub fn new(measures: MeasureSet) -> Self {
        Self { measures }
    }

    pub fn singleton(p: Measure) -> Self {
        Self {
            measures: MeasureSet::Explicit(vec![p]),
        }
    }

    pub fn measures(&self) -> &MeasureSet {
        &self.measures
    }

    pub fn space(&self) -> AtomSpace {
        self.measures.space()
    }

    pub fn plugin(&self) -> Option<&Arc<dyn ClosedFormPlugin>> {
        match &self.measures {
            MeasureSet::ClosedForm(p) => Some(p),
            _ => None,
        }
    }

    /// `𝓔[g(|X|)]`.
    pub fn sup_expectation(&self, x: &RandomVariable, g: &Integrand<'_>, h: &Horizons) -> Result<EvalResult> {
        x.space().check_same(&self.space(), "variable vs measure set")?;
        g.validate()?;
        match &self.measures {
            MeasureSet::Explicit(ms) => sup_over(ms.iter().map(Ok), |p| integrate(x, p, g, h.atoms)),
            MeasureSet::Indexed(f) => {
                let r = sup_over(
                    (f.first..=f.strategy.k_max).map(|k| f.measure(k)),
                    |p| integrate(x, p, g, h.atoms),
                )?;
                Ok(indexed_certificate(r, f.strategy))
            }
            MeasureSet::ClosedForm(p) => {
                if !p.supports(x) {
                    return Err(Error::UnsupportedIntegrand(format!(
                        "plugin `{}` has no closed form for this variable",
                        p.name()
                    )));
                }
                Ok(EvalResult::exact(p.sup_expectation(x, g)?))
            }
        }
    }

    /// `sup_P sum_{n >= m} P(|X| > n)`, the per-measure tail series
    /// maximized over the set, bracketed by `𝓔[(|X| - (m-1))⁺]`.
    pub fn sup_tail_series(&self, x: &RandomVariable, m: u64, h: &Horizons) -> Result<EvalResult> {
        x.space().check_same(&self.space(), "variable vs measure set")?;
        match &self.measures {
            MeasureSet::Explicit(ms) => {
                sup_over(ms.iter().map(Ok), |p| tail_sum(x, p, m, h.series, h.atoms))
            }
            MeasureSet::Indexed(f) => {
                let r = sup_over(
                    (f.first..=f.strategy.k_max).map(|k| f.measure(k)),
                    |p| tail_sum(x, p, m, h.series, h.atoms),
                )?;
                Ok(indexed_certificate(r, f.strategy))
            }
            MeasureSet::ClosedForm(_) => {
                let partial = self.sup_expectation(
                    x,
                    &Integrand::TailCount {
                        start: m,
                        end: h.series,
                    },
                    h,
                )?;
                let ceiling = if m == 0 {
                    self.sup_expectation(x, &Integrand::Abs, h)?.hi() + 1.0
                } else {
                    self.sup_expectation(x, &Integrand::Excess((m - 1) as f64), h)?.hi()
                };
                Ok(EvalResult::lower_bound(partial.value, Some(h.series)).with_upper(ceiling))
            }
        }
    }

    /// `𝓔[Y]` for an arbitrary signed per-atom vector on a finite space.
    pub fn upper_vector(&self, values: &[f64]) -> Result<f64> {
        let measures = match &self.measures {
            MeasureSet::Explicit(ms) => std::borrow::Cow::Borrowed(ms),
            MeasureSet::Indexed(_) => std::borrow::Cow::Owned(self.measures.materialize()?),
            MeasureSet::ClosedForm(p) => {
                return Err(Error::UnsupportedIntegrand(format!(
                    "plugin `{}` evaluates only functions of |X|",
                    p.name()
                )))
            }
        };
        let mut best = f64::NEG_INFINITY;
        for p in measures.iter() {
            best = best.max(p.expect_vector(values)?);
        }
        Ok(best)
    }

    /// Upper probability `𝓔[1_A]` of an event given as a per-atom mask.
    pub fn upper_probability(&self, event: &[bool]) -> Result<f64> {
        let v: Vec<f64> = event.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        self.upper_vector(&v)
    }

    pub fn limit(&self, x: &RandomVariable, criterion: Criterion) -> Option<AnalyticLimit> {
        self.plugin()
            .filter(|p| p.supports(x))
            .and_then(|p| p.limit(x, criterion))
    }
}

fn sup_over<'m, M>(
    measures: impl Iterator<Item = Result<M>>,
    mut eval: impl FnMut(&M) -> Result<EvalResult>,
) -> Result<EvalResult>
where
    M: std::borrow::Borrow<Measure> + 'm,
{
    let mut best: Option<EvalResult> = None;
    for m in measures {
        let m = m?;
        let r = eval(&m)?;
        best = Some(match best {
            None => r,
            Some(b) => b.max(r),
        });
    }
    best.ok_or_else(|| Error::InvalidMeasure("measure set is empty".into()))
}

fn indexed_certificate(r: EvalResult, strategy: SupStrategy) -> EvalResult {
    if strategy.monotone_tail {
        r
    } else {
        EvalResult::lower_bound(r.lo(), Some(strategy.k_max))
    }
}
