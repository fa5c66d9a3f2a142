//! Randomized checks of monotonicity, constant preservation,
//! sub-additivity and positive homogeneity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::prob::AtomSpace;
use crate::sublinear::SublinearExpectation;

pub const AXIOMS: [&str; 4] = [
    "monotonicity",
    "constant_preserving",
    "sub_additivity",
    "positive_homogeneity",
];

/// Countable models are checked on atoms `0..=WINDOW` with at most `WINDOW`
/// measures; mass beyond the window is collapsed onto its last atom.
pub const WINDOW: u64 = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomStats {
    pub axiom: &'static str,
    pub trials: usize,
    /// Largest excess over the tolerance-free inequality, zero if none.
    pub max_violation: f64,
    /// Trials whose violation exceeded the tolerance.
    pub violations: usize,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub stats: Vec<AxiomStats>,
    pub tol: f64,
    pub seed: u64,
    /// Size of the atom window the checks ran on.
    pub atoms: usize,
}

impl AxiomReport {
    pub fn total_violations(&self) -> usize {
        self.stats.iter().map(|s| s.violations).sum()
    }

    pub fn ensure(self) -> Result<Self> {
        match self.stats.iter().find(|s| s.violations > 0) {
            None => Ok(self),
            Some(s) => Err(Error::AxiomViolation {
                axiom: s.axiom,
                violation: s.max_violation,
                witness: s.witness.clone().unwrap_or_default(),
            }),
        }
    }
}

struct Tracker {
    stats: AxiomStats,
}

impl Tracker {
    fn new(axiom: &'static str, trials: usize) -> Self {
        Self {
            stats: AxiomStats {
                axiom,
                trials,
                max_violation: 0.0,
                violations: 0,
                witness: None,
            },
        }
    }

    fn record(&mut self, excess: f64, allowed: f64, witness: impl FnOnce() -> String) {
        let excess = excess.max(0.0);
        if excess > self.stats.max_violation {
            self.stats.max_violation = excess;
        }
        if excess > allowed || excess.is_nan() {
            self.stats.violations += 1;
            if self.stats.witness.is_none() {
                self.stats.witness = Some(witness());
            }
        }
    }
}

/// Runs every axiom on `trials` random draws and reports the outcome
/// without failing on violations.
pub fn axiom_report(e: &SublinearExpectation, trials: usize, seed: u64, tol: f64) -> Result<AxiomReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let windowed;
    let e = match e.space() {
        AtomSpace::Finite(_) => e,
        AtomSpace::Countable => {
            windowed = SublinearExpectation::new(e.measures().finite_window(WINDOW, WINDOW as usize)?);
            &windowed
        }
    };
    let n = e.space().len().expect("finite after windowing");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mono = Tracker::new(AXIOMS[0], trials);
    let mut cons = Tracker::new(AXIOMS[1], trials);
    let mut sub = Tracker::new(AXIOMS[2], trials);
    let mut homo = Tracker::new(AXIOMS[3], trials);

    for t in 0..trials {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let ex = e.upper_vector(&x)?;
        let ey = e.upper_vector(&y)?;

        let bumped: Vec<f64> = x.iter().map(|v| v + rng.gen_range(0.0..5.0)).collect();
        let eb = e.upper_vector(&bumped)?;
        mono.record(ex - eb, tol, || format!("trial {t}: E[X] = {ex} > E[Y] = {eb} with X <= Y"));

        let c = match t {
            0 => -3.0,
            1 => 0.0,
            _ => rng.gen_range(-10.0..10.0),
        };
        let ec = e.upper_vector(&vec![c; n])?;
        cons.record((ec - c).abs(), tol, || format!("trial {t}: E[{c}] = {ec}"));

        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let es = e.upper_vector(&sum)?;
        sub.record(es - ex - ey, tol, || {
            format!("trial {t}: E[X+Y] = {es} > E[X] + E[Y] = {}", ex + ey)
        });

        let lambda = if t == 0 { 0.0 } else { rng.gen_range(0.0..5.0) };
        let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        let el = e.upper_vector(&scaled)?;
        homo.record((el - lambda * ex).abs(), tol * (1.0 + lambda), || {
            format!("trial {t}: E[{lambda} X] = {el} vs {lambda} E[X] = {}", lambda * ex)
        });
    }
    Ok(AxiomReport {
        stats: vec![mono.stats, cons.stats, sub.stats, homo.stats],
        tol,
        seed,
        atoms: n,
    })
}

/// [`axiom_report`] that fails with the first violated axiom's witness.
pub fn check_axioms(e: &SublinearExpectation, trials: usize, seed: u64, tol: f64) -> Result<AxiomReport> {
    axiom_report(e, trials, seed, tol)?.ensure()
}
