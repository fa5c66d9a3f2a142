//! The two-condition characterization on finite spaces: bounded upper means,
//! and for every `ε > 0` a `δ > 0` with `sup_X 𝓔[|X| 1_A] < ε` whenever
//! `𝓔[1_A] <= δ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::prob::{AtomSpace, Measure, RandomVariable};
use crate::sublinear::SublinearExpectation;

/// Largest space searched over all `2^|Ω|` events.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationConfig {
    pub epsilons: Vec<f64>,
    /// `δ` ranges over `2^-j` for `j = 0..=dyadic_depth`.
    pub dyadic_depth: u32,
    /// Random events tried beyond the sorted prefixes on large spaces.
    pub subset_budget: usize,
    pub seed: u64,
}

impl Default for CharacterizationConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![0.5, 0.1, 0.01],
            dyadic_depth: 20,
            subset_budget: 4096,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonResult {
    pub epsilon: f64,
    /// Largest grid `δ` that works, if any.
    pub delta: Option<f64>,
    /// `max sup_X 𝓔[|X| 1_A]` over events with `𝓔[1_A]` at most the smallest
    /// grid `δ`.
    pub worst_at_finest: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationReport {
    /// `sup_X 𝓔[|X|]`
    pub sup_mean: f64,
    /// False when the event search was not exhaustive; `δ` is then an
    /// optimistic estimate.
    pub exhaustive: bool,
    pub events_checked: usize,
    pub results: Vec<EpsilonResult>,
}

impl CharacterizationReport {
    pub fn heuristic(&self) -> bool {
        !self.exhaustive
    }

    /// Both conditions hold on the grid.
    pub fn holds(&self) -> bool {
        self.sup_mean.is_finite() && self.results.iter().all(|r| r.delta.is_some())
    }
}

struct Dense {
    weights: Vec<Vec<f64>>,
    abs: Vec<Vec<f64>>,
}

impl Dense {
    /// `(𝓔[1_A], sup_X 𝓔[|X| 1_A])`
    fn event(&self, mask: &[bool]) -> (f64, f64) {
        let mut upper = 0.0f64;
        let mut worst = 0.0f64;
        for w in &self.weights {
            let mut p = 0.0;
            for (i, &wi) in w.iter().enumerate() {
                if mask[i] {
                    p += wi;
                }
            }
            upper = upper.max(p);
            for x in &self.abs {
                let mut v = 0.0;
                for (i, &wi) in w.iter().enumerate() {
                    if mask[i] {
                        v += wi * x[i];
                    }
                }
                worst = worst.max(v);
            }
        }
        (upper, worst)
    }
}

pub fn check_characterization(e: &SublinearExpectation, k: &[RandomVariable], config: &CharacterizationConfig) -> Result<CharacterizationReport> {
    let AtomSpace::Finite(n) = e.space() else {
        return Err(Error::SpaceMismatch("the event search needs a finite space".into()));
    };
    if k.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if let Some(&eps) = config.epsilons.iter().find(|&&eps| !(eps > 0.0 && eps.is_finite())) {
        return Err(Error::InvalidArgument(format!("epsilon {eps} must be positive")));
    }
    let weights = e
        .measures()
        .materialize()?
        .iter()
        .map(Measure::dense_weights)
        .collect::<Result<Vec<_>>>()?;
    let mut abs = Vec::with_capacity(k.len());
    for x in k {
        x.space().check_same(&e.space(), "family member vs measure set")?;
        abs.push(x.table()?.iter().map(|v| v.abs()).collect::<Vec<_>>());
    }
    let dense = Dense { weights, abs };

    let sup_mean = dense.event(&vec![true; n]).1;

    let deltas: Vec<f64> = (0..=config.dyadic_depth).map(|j| 0.5f64.powi(j as i32)).collect();
    // worst[j] = max over events with upper probability <= deltas[j]
    let mut worst = vec![0.0f64; deltas.len()];
    let mut consider = |mask: &[bool]| {
        let (u, v) = dense.event(mask);
        for (j, &d) in deltas.iter().enumerate() {
            if u <= d {
                // deltas decrease, so every later j also needs checking
                worst[j] = worst[j].max(v);
            }
        }
    };

    let exhaustive = n <= EXHAUSTIVE_LIMIT;
    let mut events_checked = 0usize;
    if exhaustive {
        let mut mask = vec![false; n];
        for bits in 0u64..(1u64 << n) {
            for (i, m) in mask.iter_mut().enumerate() {
                *m = bits >> i & 1 == 1;
            }
            consider(&mask);
            events_checked += 1;
        }
    } else {
        for x in &dense.abs {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
            let mut mask = vec![false; n];
            consider(&mask);
            events_checked += 1;
            for &i in &order {
                mask[i] = true;
                consider(&mask);
                events_checked += 1;
            }
        }
        for i in 0..n {
            let mut mask = vec![false; n];
            mask[i] = true;
            consider(&mask);
            events_checked += 1;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.subset_budget {
            let density: f64 = rng.gen_range(0.0..0.5);
            let mask: Vec<bool> = (0..n).map(|_| rng.gen_bool(density)).collect();
            consider(&mask);
            events_checked += 1;
        }
    }

    let results = config
        .epsilons
        .iter()
        .map(|&epsilon| EpsilonResult {
            epsilon,
            delta: deltas
                .iter()
                .zip(&worst)
                .find(|&(_, &w)| w < epsilon)
                .map(|(&d, _)| d),
            worst_at_finest: *worst.last().expect("grid is nonempty"),
        })
        .collect();
    Ok(CharacterizationReport {
        sup_mean,
        exhaustive,
        events_checked,
        results,
    })
}

/// `X_j = 2^j 1_{A_j}` for `j = 1..=depth` with `P(A_j) = 2^-j`, on
/// `depth + 1` atoms of mass `1/2, 1/4, …, 2^-depth, 2^-depth`.
///
/// Every `X_j` has `E[|X_j| 1_{A_j}] = 1`, so with grid depth `depth` no
/// grid `δ` meets `ε < 1`.
pub fn scaled_indicator_family(depth: u32) -> Result<(Measure, Vec<RandomVariable>)> {
    if depth == 0 || depth > 52 {
        return Err(Error::InvalidArgument(format!("depth {depth} outside 1..=52")));
    }
    let n = depth as usize + 1;
    let mut w: Vec<f64> = (0..depth).map(|i| 0.5f64.powi(i as i32 + 1)).collect();
    w.push(0.5f64.powi(depth as i32));
    let p = Measure::finite(w)?;
    let members = (1..=depth as usize)
        .map(|j| {
            let scale = 2f64.powi(j as i32);
            RandomVariable::finite((0..n).map(|i| if i >= j { scale } else { 0.0 }).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((p, members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sublinear::MeasureSet;

    #[test]
    fn bounded_family_finds_delta() {
        let p = Measure::uniform(8).unwrap();
        let q = Measure::finite(vec![0.3, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1]).unwrap();
        let e = SublinearExpectation::new(MeasureSet::explicit(vec![p, q]).unwrap());
        let x = RandomVariable::finite(vec![1.0, 2.0, 0.5, 3.0, 1.0, 0.0, 2.0, 1.5]).unwrap();
        let r = check_characterization(
            &e,
            &[x],
            &CharacterizationConfig {
                epsilons: vec![0.1],
                ..CharacterizationConfig::default()
            },
        )
        .unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.events_checked, 256);
        let d = r.results[0].delta.unwrap();
        assert!(d > 0.0);
        assert!(r.holds());
    }

    #[test]
    fn zero_variable_any_delta() {
        let e = SublinearExpectation::singleton(Measure::uniform(5).unwrap());
        let zero = RandomVariable::finite(vec![0.0; 5]).unwrap();
        let r = check_characterization(&e, &[zero], &CharacterizationConfig::default()).unwrap();
        for res in &r.results {
            assert_eq!(res.delta, Some(1.0));
        }
        assert_eq!(r.sup_mean, 0.0);
    }

    #[test]
    fn scaled_family_fails() {
        let depth = 10;
        let (p, k) = scaled_indicator_family(depth).unwrap();
        let e = SublinearExpectation::singleton(p);
        let cfg = CharacterizationConfig {
            epsilons: vec![0.5],
            dyadic_depth: depth,
            ..CharacterizationConfig::default()
        };
        let r = check_characterization(&e, &k, &cfg).unwrap();
        assert_eq!(r.results[0].delta, None);
        assert!(r.results[0].worst_at_finest >= 1.0);
        assert!(!r.holds());
    }

    #[test]
    fn epsilon_must_be_positive() {
        let e = SublinearExpectation::singleton(Measure::uniform(2).unwrap());
        let x = RandomVariable::finite(vec![1.0, 1.0]).unwrap();
        let cfg = CharacterizationConfig {
            epsilons: vec![-0.1],
            ..CharacterizationConfig::default()
        };
        assert!(check_characterization(&e, &[x], &cfg).is_err());
    }

    #[test]
    fn large_space_is_heuristic() {
        let n = 24;
        let e = SublinearExpectation::singleton(Measure::uniform(n).unwrap());
        let x = RandomVariable::finite((0..n).map(|i| i as f64).collect()).unwrap();
        let cfg = CharacterizationConfig {
            subset_budget: 100,
            ..CharacterizationConfig::default()
        };
        let r = check_characterization(&e, &[x], &cfg).unwrap();
        assert!(r.heuristic());
        assert_eq!(r.events_checked, 1 + n + n + 100);
    }
}
