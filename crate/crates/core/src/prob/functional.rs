//! Elementary functionals of one variable under one measure.
//!
//! Finite supports are enumerated exactly. Formula measures are summed over
//! atoms `0..=horizon` and bracketed with the declared tail bounds:
//! bounded integrands use the measure's tail mass, unbounded ones the
//! variable's moment tail bound.

use crate::error::{Error, Result};
use crate::prob::eval::EvalResult;
use crate::prob::integrand::{check_level, Integrand};
use crate::prob::measure::Measure;
use crate::prob::variable::RandomVariable;
use crate::sum::CompensatedSum;

/// `E_P[g(|X|)]`.
pub fn integrate(x: &RandomVariable, p: &Measure, g: &Integrand<'_>, horizon: u64) -> Result<EvalResult> {
    x.space().check_same(&p.space(), "variable vs measure")?;
    g.validate()?;
    let support = p.support(horizon)?;
    let mut acc = CompensatedSum::new();
    match support.horizon {
        None => support.for_each(|atom, w| {
            if w != 0.0 {
                acc.add(w * g.apply(x.value(atom)?.abs()));
            }
            Ok(())
        })?,
        Some(h) => {
            let abs = x.abs_prefix(h as usize + 1)?;
            support.for_each(|atom, w| {
                acc.add(w * g.apply(abs[atom as usize]));
                Ok(())
            })?
        }
    }
    let partial = acc.value();
    let Some(tail_mass) = support.tail_mass else {
        return Ok(EvalResult::exact(partial));
    };
    let mut width = g.bound().map(|b| b * tail_mass);
    if let (Some(c), Some(r)) = (g.linear_growth(), x.moment_tail(horizon)?) {
        let w = c * r;
        width = Some(width.map_or(w, |v: f64| v.min(w)));
    }
    match width {
        Some(w) => Ok(EvalResult::bracket(partial, partial + w, support.horizon)),
        None => Err(Error::MissingTailBound(format!(
            "E[{g}] on a countable measure needs a moment tail bound for the variable"
        ))),
    }
}

/// `E|X|`.
pub fn expectation(x: &RandomVariable, p: &Measure, horizon: u64) -> Result<EvalResult> {
    integrate(x, p, &Integrand::Abs, horizon)
}

/// `E[|X| : |X| >= a]`.
pub fn truncated_above(x: &RandomVariable, p: &Measure, a: f64, horizon: u64) -> Result<EvalResult> {
    integrate(x, p, &Integrand::TruncatedAbove(a), horizon)
}

/// `E[|X| : |X| <= a]`.
pub fn truncated_below(x: &RandomVariable, p: &Measure, a: f64, horizon: u64) -> Result<EvalResult> {
    integrate(x, p, &Integrand::TruncatedBelow(a), horizon)
}

/// `E[(|X| - a)⁺]`, equal to `E[|X| - a : |X| >= a]`.
pub fn excess(x: &RandomVariable, p: &Measure, a: f64, horizon: u64) -> Result<EvalResult> {
    integrate(x, p, &Integrand::Excess(a), horizon)
}

/// `E[|X| ∧ a]`.
pub fn capped(x: &RandomVariable, p: &Measure, a: f64, horizon: u64) -> Result<EvalResult> {
    integrate(x, p, &Integrand::Capped(a), horizon)
}

/// `P(|X| > n)`.
pub fn tail_prob(x: &RandomVariable, p: &Measure, n: u64, horizon: u64) -> Result<EvalResult> {
    integrate(x, p, &Integrand::Exceeds(n as f64), horizon)
}

/// `P(|X| >= a)`.
pub fn at_least_prob(x: &RandomVariable, p: &Measure, a: f64, horizon: u64) -> Result<EvalResult> {
    integrate(x, p, &Integrand::AtLeast(a), horizon)
}

/// Upper end for the full series `sum_{n >= m} P(|X| > n)`: `E[(|X| - (m-1))⁺]`
/// for `m >= 1`, and `E|X| + 1` for `m = 0`.
pub(crate) fn series_ceiling(x: &RandomVariable, p: &Measure, m: u64, horizon: u64) -> Result<Option<f64>> {
    let r = if m == 0 {
        expectation(x, p, horizon).map(|e| e.hi() + 1.0)
    } else {
        excess(x, p, (m - 1) as f64, horizon).map(|e| e.hi())
    };
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::MissingTailBound(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `sum_{n=m}^{series_horizon} P(|X| > n)`.
///
/// Exact when the support is finite and every omitted term vanishes;
/// otherwise a lower bound, tightened to a bracket by the ceiling
/// `E[(|X| - (m-1))⁺]` when that expectation is available.
pub fn tail_sum(
    x: &RandomVariable,
    p: &Measure,
    m: u64,
    series_horizon: u64,
    atom_horizon: u64,
) -> Result<EvalResult> {
    x.space().check_same(&p.space(), "variable vs measure")?;
    if series_horizon < m {
        let ceiling = series_ceiling(x, p, m, atom_horizon)?.unwrap_or(f64::INFINITY);
        return Ok(EvalResult::lower_bound(0.0, Some(series_horizon)).with_upper(ceiling));
    }
    let support = p.support(atom_horizon)?;
    if support.is_complete() {
        // literal series over the finite support
        let mut atoms = Vec::new();
        support.for_each(|atom, w| {
            if w != 0.0 {
                atoms.push((w, x.value(atom)?.abs()));
            }
            Ok(())
        })?;
        let max_abs = atoms.iter().fold(0.0f64, |m, &(_, v)| m.max(v));
        // P(|X| > n) = 0 for every n >= max|X|
        let last_live = if max_abs <= m as f64 {
            None
        } else {
            Some(((max_abs.ceil() - 1.0) as u64).min(series_horizon))
        };
        let mut total = CompensatedSum::new();
        if let Some(last) = last_live {
            for n in m..=last {
                let threshold = n as f64;
                let term: CompensatedSum = atoms
                    .iter()
                    .filter(|&&(_, v)| v > threshold)
                    .map(|&(w, _)| w)
                    .collect();
                total.add(term.value());
            }
        }
        let value = total.value();
        if max_abs <= series_horizon as f64 + 1.0 {
            return Ok(EvalResult::exact(value));
        }
        let ceiling = series_ceiling(x, p, m, atom_horizon)?.unwrap_or(f64::INFINITY);
        return Ok(EvalResult::lower_bound(value, Some(series_horizon)).with_upper(ceiling));
    }
    // formula measure: exchange the two sums, atom by atom
    let partial = integrate_truncated(
        x,
        &support,
        &Integrand::TailCount {
            start: m,
            end: series_horizon,
        },
    )?;
    let ceiling = series_ceiling(x, p, m, atom_horizon)?.unwrap_or(f64::INFINITY);
    Ok(EvalResult::lower_bound(partial, support.horizon.max(Some(series_horizon))).with_upper(ceiling))
}

fn integrate_truncated(
    x: &RandomVariable,
    support: &crate::prob::measure::Support<'_>,
    g: &Integrand<'_>,
) -> Result<f64> {
    let h = support.horizon.unwrap_or(0);
    let abs = x.abs_prefix(h as usize + 1)?;
    let mut acc = CompensatedSum::new();
    support.for_each(|atom, w| {
        acc.add(w * g.apply(abs[atom as usize]));
        Ok(())
    })?;
    Ok(acc.value())
}

/// Levels used by profiles: finite, nonnegative, strictly increasing.
pub fn check_levels(levels: &[f64]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::InvalidLevel("level grid is empty".into()));
    }
    for &a in levels {
        check_level(a)?;
    }
    if let Some(w) = levels.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidLevel(format!(
            "levels must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelspec::expr::ModelExpr;
    use crate::prob::eval::Certificate;
    use crate::prob::space::AtomSpace;

    const H: u64 = 64;

    fn uniform3() -> (RandomVariable, Measure) {
        (
            RandomVariable::finite(vec![1.0, 2.0, 3.0]).unwrap(),
            Measure::uniform(3).unwrap(),
        )
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn expectation_uniform3() {
        let (x, p) = uniform3();
        let r = expectation(&x, &p, H).unwrap();
        assert!(close(r.value, 2.0));
        assert!(r.is_exact());
    }

    #[test]
    fn expectation_of_constant() {
        let x = RandomVariable::constant(AtomSpace::Finite(4), 2.5).unwrap();
        let p = Measure::finite(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(close(expectation(&x, &p, H).unwrap().value, 2.5));
    }

    #[test]
    fn remark_measure_five() {
        let p5 = 1.0 / (5.0 * 5f64.ln());
        let p = Measure::sparse(AtomSpace::Countable, vec![(0, 1.0 - p5), (5, p5)]).unwrap();
        let x = RandomVariable::identity();
        let r = expectation(&x, &p, H).unwrap();
        assert!(r.is_exact());
        assert!(close(r.value, 1.0 / 5f64.ln()));
        assert!((r.value - 0.62133).abs() < 1e-5);
    }

    #[test]
    fn truncated_above_cases() {
        let (x, p) = uniform3();
        assert!(close(truncated_above(&x, &p, 2.0, H).unwrap().value, 5.0 / 3.0));
        assert!(close(truncated_above(&x, &p, 0.0, H).unwrap().value, 2.0));
        assert_eq!(truncated_above(&x, &p, 3.5, H).unwrap().value, 0.0);
    }

    #[test]
    fn excess_cases() {
        let (x, p) = uniform3();
        assert!(close(excess(&x, &p, 1.0, H).unwrap().value, 1.0));
        assert!(close(excess(&x, &p, 0.0, H).unwrap().value, 2.0));
        let two = RandomVariable::constant(AtomSpace::Finite(2), 2.0).unwrap();
        let q = Measure::uniform(2).unwrap();
        assert_eq!(excess(&two, &q, 2.0, H).unwrap().value, 0.0);
    }

    #[test]
    fn capped_cases() {
        let (x, p) = uniform3();
        assert!(close(capped(&x, &p, 2.0, H).unwrap().value, 5.0 / 3.0));
        assert_eq!(capped(&x, &p, 0.0, H).unwrap().value, 0.0);
        assert!(close(capped(&x, &p, 3.0, H).unwrap().value, 2.0));
    }

    #[test]
    fn tail_prob_cases() {
        let (x, p) = uniform3();
        assert!(close(tail_prob(&x, &p, 1, H).unwrap().value, 2.0 / 3.0));
        assert_eq!(tail_prob(&x, &p, 3, H).unwrap().value, 0.0);
        let zero = RandomVariable::constant(AtomSpace::Finite(3), 0.0).unwrap();
        assert_eq!(tail_prob(&zero, &p, 0, H).unwrap().value, 0.0);
    }

    #[test]
    fn tail_sum_cases() {
        let (x, p) = uniform3();
        let r = tail_sum(&x, &p, 1, 100, H).unwrap();
        assert!(close(r.value, 1.0));
        assert!(r.is_exact());
        assert!(excess(&x, &p, 1.0, H).unwrap().value <= r.value + 1e-12);
        assert!(r.value <= excess(&x, &p, 0.0, H).unwrap().value + 1e-12);

        let half = RandomVariable::constant(AtomSpace::Finite(3), 0.5).unwrap();
        assert_eq!(tail_sum(&half, &p, 1, 100, H).unwrap(), EvalResult::exact(0.0));
    }

    #[test]
    fn tail_sum_from_zero() {
        let (x, p) = uniform3();
        let r = tail_sum(&x, &p, 0, 100, H).unwrap();
        assert!(close(r.value, 2.0));
    }

    #[test]
    fn short_series_is_bracketed_by_excess() {
        let (x, p) = uniform3();
        // terms n = 1 only; n = 2 is cut off
        let r = tail_sum(&x, &p, 1, 1, H).unwrap();
        assert!(close(r.value, 2.0 / 3.0));
        assert_eq!(
            r.certificate,
            Certificate::Bracket {
                lo: r.value,
                hi: excess(&x, &p, 0.0, H).unwrap().value
            }
        );
    }

    #[test]
    fn infinite_level_is_an_error() {
        let (x, p) = uniform3();
        assert!(matches!(
            truncated_above(&x, &p, f64::INFINITY, H),
            Err(Error::InvalidLevel(_))
        ));
    }

    #[test]
    fn space_mismatch() {
        let x = RandomVariable::finite(vec![1.0, 2.0]).unwrap();
        let p = Measure::uniform(3).unwrap();
        assert!(matches!(expectation(&x, &p, H), Err(Error::SpaceMismatch(_))));
    }

    fn geometric() -> Measure {
        Measure::countable(
            ModelExpr::parse("0.5^(n+1)").unwrap(),
            ModelExpr::parse("0.5^(n+1)").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn countable_without_moment_bound_is_missing_tail_bound() {
        let p = geometric();
        let x = RandomVariable::formula(AtomSpace::Countable, ModelExpr::index(), None, None);
        assert!(matches!(expectation(&x, &p, 30), Err(Error::MissingTailBound(_))));
        // bounded integrands only need the measure's tail mass
        let r = capped(&x, &p, 3.0, 30).unwrap();
        assert!(matches!(r.certificate, Certificate::Bracket { .. }));
        let r = tail_prob(&x, &p, 2, 30).unwrap();
        assert!(r.hi() - r.lo() <= 0.5f64.powi(31) * 1.0000001);
    }

    #[test]
    fn countable_brackets_contain_closed_form() {
        // X(n) = n under geometric(1/2) on {0,1,...}: E X = 1.
        let p = geometric();
        let x = RandomVariable::formula(
            AtomSpace::Countable,
            ModelExpr::index(),
            Some(ModelExpr::index()),
            Some(ModelExpr::parse("(n+2)*0.5^(n+1)").unwrap()),
        );
        for h in [5u64, 10, 40] {
            let r = expectation(&x, &p, h).unwrap();
            assert!(r.lo() <= 1.0 + 1e-15 && 1.0 <= r.hi() + 1e-15, "h={h} {r:?}");
            assert_eq!(r.horizon_used, Some(h));
        }
        // E[(X-1)+] = sum_{n>=2} (n-1) 2^{-(n+1)} = 1/2
        let r = excess(&x, &p, 1.0, 60).unwrap();
        assert!(r.lo() <= 0.5 + 1e-15 && 0.5 <= r.hi() + 1e-15);
        // sum_{n>=1} P(X > n) = sum_{n>=1} 2^{-(n+1)} = 1/2
        let r = tail_sum(&x, &p, 1, 200, 60).unwrap();
        assert!(r.lo() <= 0.5 + 1e-12 && 0.5 <= r.hi() + 1e-12, "{r:?}");
    }

    #[test]
    fn level_grid_validation() {
        assert!(check_levels(&[0.0, 1.0, 2.0]).is_ok());
        assert!(check_levels(&[]).is_err());
        assert!(check_levels(&[1.0, 1.0]).is_err());
        assert!(check_levels(&[2.0, 1.0]).is_err());
        assert!(check_levels(&[-1.0]).is_err());
    }
}
