//! Families of random variables and their sup/inf profiles: UI, W-UI,
//! W*-UI, S-UI and the nonintegrability duals UNI, W-UNI, W*-UNI.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::prob::{check_levels, tail_sum, AtomSpace, EvalResult, Integrand, Measure, RandomVariable};
use crate::sublinear::SublinearExpectation;
use crate::sum::CompensatedSum;

/// Tolerance for the inequality cross-checks between profiles.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

/// Truncation horizons for countable models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Horizons {
    /// Last atom summed for formula measures.
    pub atoms: u64,
    /// Last index `n` of tail series.
    pub series: u64,
}

impl Default for Horizons {
    fn default() -> Self {
        Self {
            atoms: 4096,
            series: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Criterion {
    Ui,
    WUi,
    WStarUi,
    Uni,
    WUni,
    WStarUni,
    SUi,
}

impl Criterion {
    pub const ALL: [Criterion; 7] = [
        Criterion::Ui,
        Criterion::WUi,
        Criterion::WStarUi,
        Criterion::Uni,
        Criterion::WUni,
        Criterion::WStarUni,
        Criterion::SUi,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Ui => "ui",
            Criterion::WUi => "wui",
            Criterion::WStarUi => "wsui",
            Criterion::Uni => "uni",
            Criterion::WUni => "wuni",
            Criterion::WStarUni => "wsuni",
            Criterion::SUi => "sui",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Criterion::Uni | Criterion::WUni | Criterion::WStarUni => Direction::Inf,
            _ => Direction::Sup,
        }
    }

    /// Tail-series criteria are indexed by integers.
    pub fn integer_levels(self) -> bool {
        matches!(self, Criterion::WStarUi | Criterion::WStarUni | Criterion::SUi)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown criterion `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Sup,
    Inf,
}

/// Known behaviour of a criterion's functional as the level grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticLimit {
    Vanishes,
    Diverges,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub level: f64,
    pub result: EvalResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub criterion: Criterion,
    pub direction: Direction,
    pub points: Vec<ProfilePoint>,
}

impl Profile {
    pub fn levels(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.level).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.result.value).collect()
    }

    pub fn last(&self) -> Option<&ProfilePoint> {
        self.points.last()
    }

    /// Nonincreasing for sup-profiles, nondecreasing for inf-profiles.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.points.windows(2).all(|w| {
            let (a, b) = (w[0].result.value, w[1].result.value);
            match self.direction {
                Direction::Sup => b <= a + tol,
                Direction::Inf => b >= a - tol,
            }
        })
    }
}

/// Where expectations are taken: one measure, or the supremum over a set.
#[derive(Debug, Clone)]
pub enum MeasureContext {
    Classical(Measure),
    Sublinear(SublinearExpectation),
}

impl MeasureContext {
    pub fn space(&self) -> AtomSpace {
        match self {
            MeasureContext::Classical(p) => p.space(),
            MeasureContext::Sublinear(e) => e.space(),
        }
    }

    pub fn is_sublinear(&self) -> bool {
        matches!(self, MeasureContext::Sublinear(_))
    }

    /// `E[g(|X|)]` or `𝓔[g(|X|)]`.
    pub fn upper(&self, x: &RandomVariable, g: &Integrand<'_>, h: &Horizons) -> Result<EvalResult> {
        match self {
            MeasureContext::Classical(p) => {
                g.validate()?;
                crate::prob::integrate(x, p, g, h.atoms)
            }
            MeasureContext::Sublinear(e) => e.sup_expectation(x, g, h),
        }
    }

    /// `sup_P sum_{n >= m} P(|X| > n)`, the sum taken inside the supremum.
    pub fn tail_series(&self, x: &RandomVariable, m: u64, h: &Horizons) -> Result<EvalResult> {
        match self {
            MeasureContext::Classical(p) => tail_sum(x, p, m, h.series, h.atoms),
            MeasureContext::Sublinear(e) => e.sup_tail_series(x, m, h),
        }
    }

    /// `sum_{n >= m} 𝓔[1{|X| > n}]`, the supremum taken inside the sum.
    pub fn upper_tail_series(&self, x: &RandomVariable, m: u64, h: &Horizons) -> Result<EvalResult> {
        let bound = if x.space().is_finite() { x.max_abs() } else { None };
        let last = match bound {
            Some(b) if b <= m as f64 => return Ok(EvalResult::exact(0.0)),
            Some(b) => ((b.ceil() - 1.0) as u64).min(h.series),
            None => h.series,
        };
        let complete = bound.is_some_and(|b| b <= h.series as f64 + 1.0);
        if last < m {
            return Ok(EvalResult::lower_bound(0.0, Some(h.series)));
        }
        let (lo, hi) = self.sum_exceedances(x, m, last, h)?;
        Ok(if complete {
            EvalResult::from_bounds(lo, hi, None)
        } else {
            EvalResult::lower_bound(lo, Some(h.series))
        })
    }

    /// `sum_{n=0}^{m} 𝓔[1{|X| > n}]` as an interval.
    pub fn partial_tail(&self, x: &RandomVariable, m: u64, h: &Horizons) -> Result<EvalResult> {
        let last = match x.space().is_finite().then(|| x.max_abs()).flatten() {
            Some(b) if b <= 0.0 => return Ok(EvalResult::exact(0.0)),
            Some(b) => ((b.ceil() - 1.0) as u64).min(m),
            None => m,
        };
        let (lo, hi) = self.sum_exceedances(x, 0, last, h)?;
        Ok(EvalResult::from_bounds(lo, hi, None))
    }

    fn sum_exceedances(&self, x: &RandomVariable, first: u64, last: u64, h: &Horizons) -> Result<(f64, f64)> {
        let mut lo = CompensatedSum::new();
        let mut hi = CompensatedSum::new();
        for n in first..=last {
            let r = self.upper(x, &Integrand::Exceeds(n as f64), h)?;
            lo.add(r.lo());
            hi.add(r.hi());
        }
        Ok((lo.value(), hi.value()))
    }

    pub fn limit(&self, x: &RandomVariable, criterion: Criterion) -> Option<AnalyticLimit> {
        match self {
            MeasureContext::Classical(_) => None,
            MeasureContext::Sublinear(e) => e.limit(x, criterion),
        }
    }
}

/// Analytic bounds for the members omitted from a finite prefix of an
/// infinite sequence.
pub trait Envelope: fmt::Debug + Send + Sync {
    /// Upper bound on `sup_{n > N}` of the criterion's functional at `level`.
    fn bound(&self, criterion: Criterion, level: f64) -> Option<f64>;

    fn limit(&self, _criterion: Criterion) -> Option<AnalyticLimit> {
        None
    }
}

#[derive(Debug, Clone)]
pub struct FamilyOfRVs {
    members: Vec<RandomVariable>,
    context: MeasureContext,
    envelope: Option<Arc<dyn Envelope>>,
}

impl FamilyOfRVs {
    pub fn new(members: Vec<RandomVariable>, context: MeasureContext) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let space = context.space();
        for x in &members {
            x.space().check_same(&space, "family member vs measure context")?;
        }
        Ok(Self {
            members,
            context,
            envelope: None,
        })
    }

    pub fn classical(members: Vec<RandomVariable>, p: Measure) -> Result<Self> {
        Self::new(members, MeasureContext::Classical(p))
    }

    pub fn sublinear(members: Vec<RandomVariable>, e: SublinearExpectation) -> Result<Self> {
        Self::new(members, MeasureContext::Sublinear(e))
    }

    pub fn with_envelope(mut self, envelope: Arc<dyn Envelope>) -> Self {
        self.envelope = Some(envelope);
        self
    }

    pub fn members(&self) -> &[RandomVariable] {
        &self.members
    }

    pub fn context(&self) -> &MeasureContext {
        &self.context
    }

    pub fn space(&self) -> AtomSpace {
        self.context.space()
    }

    /// Analytic limit of a sup-criterion over the whole family, if known.
    pub fn limit(&self, criterion: Criterion) -> Option<AnalyticLimit> {
        let mut limits = self.members.iter().map(|x| self.context.limit(x, criterion));
        let env = self.envelope.as_ref().map(|e| e.limit(criterion));
        if limits.clone().any(|l| l == Some(AnalyticLimit::Diverges))
            || env == Some(Some(AnalyticLimit::Diverges))
        {
            return Some(AnalyticLimit::Diverges);
        }
        let members_vanish = limits.all(|l| l == Some(AnalyticLimit::Vanishes));
        let env_vanishes = matches!(env, None | Some(Some(AnalyticLimit::Vanishes)));
        (members_vanish && env_vanishes).then_some(AnalyticLimit::Vanishes)
    }

    /// Value of one criterion's functional for one member at one level.
    pub fn member_value(&self, x: &RandomVariable, criterion: Criterion, level: f64, h: &Horizons) -> Result<EvalResult> {
        let ctx = &self.context;
        match criterion {
            Criterion::Ui => ctx.upper(x, &Integrand::TruncatedAbove(level), h),
            Criterion::WUi => ctx.upper(x, &Integrand::Excess(level), h),
            Criterion::Uni => ctx.upper(x, &Integrand::TruncatedBelow(level), h),
            Criterion::WUni => ctx.upper(x, &Integrand::Capped(level), h),
            Criterion::WStarUi => ctx.tail_series(x, integer_level(level)?, h),
            Criterion::SUi => ctx.upper_tail_series(x, integer_level(level)?, h),
            Criterion::WStarUni => ctx.partial_tail(x, integer_level(level)?, h),
        }
    }

    /// The criterion's profile over `levels`: sup over members for the
    /// integrability criteria, inf for the nonintegrability duals.
    pub fn profile(&self, criterion: Criterion, levels: &[f64], h: &Horizons) -> Result<Profile> {
        check_levels(levels)?;
        let direction = criterion.direction();
        let mut points = Vec::with_capacity(levels.len());
        for &level in levels {
            let mut acc: Option<EvalResult> = None;
            for x in &self.members {
                let r = self.member_value(x, criterion, level, h)?;
                acc = Some(match (acc, direction) {
                    (None, _) => r,
                    (Some(a), Direction::Sup) => a.max(r),
                    (Some(a), Direction::Inf) => a.min(r),
                });
            }
            let mut result = acc.expect("family is nonempty");
            if let (Some(env), Direction::Sup) = (&self.envelope, direction) {
                if let Some(b) = env.bound(criterion, level) {
                    result = result.max(EvalResult::bracket(0.0, b, None));
                }
            }
            points.push(ProfilePoint { level, result });
        }
        Ok(Profile {
            criterion,
            direction,
            points,
        })
    }
}

fn integer_level(level: f64) -> Result<u64> {
    if level >= 0.0 && level.fract() == 0.0 && level <= u64::MAX as f64 {
        Ok(level as u64)
    } else {
        Err(Error::InvalidLevel(format!(
            "{level} (tail-series criteria take integer levels)"
        )))
    }
}

fn as_levels(ms: &[u64]) -> Vec<f64> {
    ms.iter().map(|&m| m as f64).collect()
}

/// `a ↦ sup_X E[|X| 1{|X| >= a}]`
pub fn ui_profile(f: &FamilyOfRVs, levels: &[f64], h: &Horizons) -> Result<Profile> {
    f.profile(Criterion::Ui, levels, h)
}

/// `a ↦ sup_X E[(|X| - a)⁺]`
pub fn wui_profile(f: &FamilyOfRVs, levels: &[f64], h: &Horizons) -> Result<Profile> {
    f.profile(Criterion::WUi, levels, h)
}

/// `m ↦ sup_X sum_{n >= m} P(|X| > n)`; under a measure set the sum is
/// taken per measure.
pub fn wstar_ui_profile(f: &FamilyOfRVs, starts: &[u64], h: &Horizons) -> Result<Profile> {
    f.profile(Criterion::WStarUi, &as_levels(starts), h)
}

/// `m ↦ sup_X sum_{n >= m} 𝓔[1{|X| > n}]`
pub fn sui_profile(f: &FamilyOfRVs, starts: &[u64], h: &Horizons) -> Result<Profile> {
    f.profile(Criterion::SUi, &as_levels(starts), h)
}

/// UNI, W-UNI and W*-UNI inf-profiles. W*-UNI at level `a` is the partial
/// sum `sum_{n=0}^{⌊a⌋} P(|X| > n)`.
pub fn nonintegrability_profiles(f: &FamilyOfRVs, levels: &[f64], h: &Horizons) -> Result<(Profile, Profile, Profile)> {
    let uni = f.profile(Criterion::Uni, levels, h)?;
    let wuni = f.profile(Criterion::WUni, levels, h)?;
    let mut wstar = Profile {
        criterion: Criterion::WStarUni,
        direction: Direction::Inf,
        points: Vec::with_capacity(levels.len()),
    };
    for &a in levels {
        let m = a.floor();
        let mut acc: Option<EvalResult> = None;
        for x in f.members() {
            let r = f.member_value(x, Criterion::WStarUni, m, h)?;
            acc = Some(acc.map_or(r, |b| b.min(r)));
        }
        wstar.points.push(ProfilePoint {
            level: a,
            result: acc.expect("family is nonempty"),
        });
    }
    Ok((uni, wuni, wstar))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    pub m: u64,
    /// `excess(m)`
    pub lo: EvalResult,
    /// tail series from `m`
    pub mid: EvalResult,
    /// `excess(m - 1)`
    pub hi: EvalResult,
}

/// `excess(m) <= sum_{n >= m} P(|X| > n) <= excess(m - 1)`, evaluated and
/// asserted. Under a measure set the middle term is the per-measure series
/// maximized over the set.
pub fn sandwich_bounds(x: &RandomVariable, ctx: &MeasureContext, m: u64, h: &Horizons) -> Result<Sandwich> {
    if m == 0 {
        return Err(Error::InvalidLevel("sandwich needs m >= 1".into()));
    }
    let lo = ctx.upper(x, &Integrand::Excess(m as f64), h)?;
    let mid = ctx.tail_series(x, m, h)?;
    let hi = ctx.upper(x, &Integrand::Excess((m - 1) as f64), h)?;
    if !(below(&lo, &mid) && below(&mid, &hi)) {
        return Err(Error::SandwichViolation {
            m,
            lo: lo.value,
            mid: mid.value,
            hi: hi.value,
        });
    }
    Ok(Sandwich { m, lo, mid, hi })
}

/// `a <= b` is not refuted by the intervals.
fn below(a: &EvalResult, b: &EvalResult) -> bool {
    a.lo() <= b.hi() + CROSS_CHECK_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CertifiedPass,
    EmpiricalPass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CertifiedPass => "certified_pass",
            Verdict::EmpiricalPass => "empirical_pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnoseConfig {
    pub levels: Vec<f64>,
    pub horizons: Horizons,
    pub eps_stop: f64,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        Self {
            levels: (0..=10).map(|j| f64::from(1u32 << j)).collect(),
            horizons: Horizons::default(),
            eps_stop: 1e-6,
        }
    }
}

/// Profile-level sandwich at one integer level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichCheck {
    pub m: u64,
    pub wui_m: EvalResult,
    pub series_m: EvalResult,
    pub wui_m_minus_1: EvalResult,
}

#[derive(Debug, Clone)]
pub struct DiagnosticsReport {
    pub config: DiagnoseConfig,
    pub profiles: Vec<Profile>,
    /// Verdicts for the integrability criteria; the duals are reported as
    /// profiles only.
    pub verdicts: Vec<(Criterion, Verdict)>,
    pub sandwich: Vec<SandwichCheck>,
}

impl DiagnosticsReport {
    pub fn verdict(&self, c: Criterion) -> Option<Verdict> {
        self.verdicts.iter().find(|(k, _)| *k == c).map(|&(_, v)| v)
    }

    pub fn profile(&self, c: Criterion) -> Option<&Profile> {
        self.profiles.iter().find(|p| p.criterion == c)
    }

    /// 0 when every verdict passes, 1 on any fail, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        let vs = self.verdicts.iter().map(|&(_, v)| v);
        if vs.clone().any(|v| v == Verdict::Fail) {
            1
        } else if vs.clone().any(|v| v == Verdict::Inconclusive) {
            3
        } else {
            0
        }
    }
}

/// All profiles on the grid, verdicts for UI, W-UI and the tail-series
/// criteria, and the inequalities that must hold between them.
pub fn diagnose(f: &FamilyOfRVs, config: &DiagnoseConfig) -> Result<DiagnosticsReport> {
    check_levels(&config.levels)?;
    if !(config.eps_stop > 0.0) {
        return Err(Error::InvalidArgument(format!("eps_stop = {}", config.eps_stop)));
    }
    let h = &config.horizons;
    let levels = &config.levels;
    let starts: Vec<u64> = levels
        .iter()
        .filter(|&&a| a >= 1.0 && a.fract() == 0.0)
        .map(|&a| a as u64)
        .collect();

    let ui = ui_profile(f, levels, h)?;
    let wui = wui_profile(f, levels, h)?;
    let mut series_criteria = vec![Criterion::WStarUi];
    if f.context().is_sublinear() {
        series_criteria.push(Criterion::SUi);
    }
    let mut series = Vec::new();
    for &c in &series_criteria {
        series.push(if starts.is_empty() {
            Profile {
                criterion: c,
                direction: Direction::Sup,
                points: Vec::new(),
            }
        } else {
            f.profile(c, &as_levels(&starts), h)?
        });
    }
    let (uni, wuni, wsuni) = nonintegrability_profiles(f, levels, h)?;

    let mut problems = Vec::new();
    for (u, w) in ui.points.iter().zip(&wui.points) {
        if !below(&w.result, &u.result) {
            problems.push(format!(
                "wui({}) = {} exceeds ui = {}",
                u.level, w.result.value, u.result.value
            ));
        }
    }
    let mean = sup_members(f, &Integrand::Abs, h)?;
    for w in &wui.points {
        if w.level > 0.0 && mean.lo() > w.result.hi() + 2.0 * w.level + CROSS_CHECK_TOL {
            problems.push(format!(
                "sup E|X| = {} exceeds wui({}) + 2·{}",
                mean.value, w.level, w.level
            ));
        }
    }
    let mut sandwich = Vec::new();
    let primary_series = &series[series.len() - 1];
    for p in &primary_series.points {
        let m = p.level as u64;
        let wui_m = sup_members(f, &Integrand::Excess(m as f64), h)?;
        let wui_m_minus_1 = sup_members(f, &Integrand::Excess((m - 1) as f64), h)?;
        let lower_ok = below(&wui_m, &p.result);
        // under a measure set the S-UI series may exceed wui(m - 1)
        let upper_ok = primary_series.criterion == Criterion::SUi || below(&p.result, &wui_m_minus_1);
        if !(lower_ok && upper_ok) {
            problems.push(format!(
                "{} sandwich at m = {m}: {} / {} / {}",
                primary_series.criterion, wui_m.value, p.result.value, wui_m_minus_1.value
            ));
        }
        sandwich.push(SandwichCheck {
            m,
            wui_m,
            series_m: p.result,
            wui_m_minus_1,
        });
    }
    if !problems.is_empty() {
        return Err(Error::InconsistentProfiles(problems));
    }

    let mut verdicts = vec![
        (Criterion::Ui, verdict(f, &ui, config.eps_stop)),
        (Criterion::WUi, verdict(f, &wui, config.eps_stop)),
    ];
    for s in &series {
        verdicts.push((s.criterion, verdict(f, s, config.eps_stop)));
    }
    let mut profiles = vec![ui, wui];
    profiles.extend(series);
    profiles.extend([uni, wuni, wsuni]);
    Ok(DiagnosticsReport {
        config: config.clone(),
        profiles,
        verdicts,
        sandwich,
    })
}

fn sup_members(f: &FamilyOfRVs, g: &Integrand<'_>, h: &Horizons) -> Result<EvalResult> {
    let mut acc: Option<EvalResult> = None;
    for x in f.members() {
        let r = f.context().upper(x, g, h)?;
        acc = Some(acc.map_or(r, |a| a.max(r)));
    }
    Ok(acc.expect("family is nonempty"))
}

fn verdict(f: &FamilyOfRVs, profile: &Profile, eps_stop: f64) -> Verdict {
    match f.limit(profile.criterion) {
        Some(AnalyticLimit::Vanishes) => return Verdict::CertifiedPass,
        Some(AnalyticLimit::Diverges) => return Verdict::Fail,
        None => {}
    }
    match profile.last() {
        Some(p) if p.result.hi() < eps_stop && profile.is_monotone(CROSS_CHECK_TOL) => Verdict::EmpiricalPass,
        _ => Verdict::Inconclusive,
    }
}
