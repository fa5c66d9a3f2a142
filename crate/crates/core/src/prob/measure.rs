use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::modelspec::expr::ModelExpr;
use crate::prob::space::AtomSpace;
use crate::sum::CompensatedSum;

pub const DEFAULT_NORMALIZATION_TOL: f64 = 1e-12;

/// Horizons at which a countable measure's tail bound is spot-checked on
/// construction.
pub const TAIL_CHECK_GRID: [u64; 14] = [0, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096];

#[derive(Debug, Clone)]
pub enum Weights {
    /// One weight per atom of a finite space.
    Dense(Vec<f64>),
    /// Finitely supported: `(atom, weight)` pairs with strictly increasing atoms.
    Sparse(Vec<(u64, f64)>),
    /// Per-atom formula plus a bound `tail(M) >= sum_{i > M} weight(i)`.
    Formula { weight: ModelExpr, tail: ModelExpr },
}

/// Lazily extended table of `expr(0), expr(1), …`, shared between clones.
#[derive(Debug, Clone, Default)]
pub(crate) struct PrefixCache(Arc<RwLock<Vec<f64>>>);

impl PrefixCache {
    pub(crate) fn prefix(
        &self,
        expr: &ModelExpr,
        len: usize,
        check: impl Fn(u64, f64) -> Result<()>,
    ) -> Result<Vec<f64>> {
        {
            let cached = self.0.read().unwrap_or_else(|e| e.into_inner());
            if cached.len() >= len {
                return Ok(cached[..len].to_vec());
            }
        }
        let mut cached = self.0.write().unwrap_or_else(|e| e.into_inner());
        while cached.len() < len {
            let atom = cached.len() as u64;
            let v = expr.eval(atom).map_err(Error::expr(atom))?;
            check(atom, v)?;
            cached.push(v);
        }
        Ok(cached[..len].to_vec())
    }
}

/// A probability measure on an [`AtomSpace`].
#[derive(Debug, Clone)]
pub struct Measure {
    space: AtomSpace,
    weights: Weights,
    tol: f64,
    cache: PrefixCache,
}

/// Atoms visited by one evaluation, in ascending order.
pub(crate) struct Support<'a> {
    atoms: SupportAtoms<'a>,
    /// Bound on the mass of unvisited atoms; `None` when the support is complete.
    pub tail_mass: Option<f64>,
    pub horizon: Option<u64>,
}

enum SupportAtoms<'a> {
    Dense(&'a [f64]),
    Sparse(&'a [(u64, f64)]),
    Prefix(Vec<f64>),
}

impl Support<'_> {
    pub fn is_complete(&self) -> bool {
        self.tail_mass.is_none()
    }

    pub fn for_each(&self, mut f: impl FnMut(u64, f64) -> Result<()>) -> Result<()> {
        let dense: &[f64] = match &self.atoms {
            SupportAtoms::Dense(w) => w,
            SupportAtoms::Prefix(w) => w,
            SupportAtoms::Sparse(pairs) => {
                for &(i, p) in pairs.iter() {
                    f(i, p)?;
                }
                return Ok(());
            }
        };
        for (i, &p) in dense.iter().enumerate() {
            f(i as u64, p)?;
        }
        Ok(())
    }
}

fn check_weight(atom: u64, w: f64) -> Result<()> {
    if w.is_finite() && w >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidMeasure(format!("weight {w} at atom {atom}")))
    }
}

impl Measure {
    /// Measure on `Finite(weights.len())`.
    pub fn finite(weights: Vec<f64>) -> Result<Self> {
        Self::finite_with_tolerance(weights, DEFAULT_NORMALIZATION_TOL)
    }

    pub fn finite_with_tolerance(weights: Vec<f64>, tol: f64) -> Result<Self> {
        let space = AtomSpace::finite(weights.len())?;
        for (i, &w) in weights.iter().enumerate() {
            check_weight(i as u64, w)?;
        }
        check_total(crate::sum::sum(&weights), tol)?;
        Ok(Self {
            space,
            weights: Weights::Dense(weights),
            tol,
            cache: PrefixCache::default(),
        })
    }

    pub fn uniform(count: usize) -> Result<Self> {
        Self::finite(vec![1.0 / count.max(1) as f64; count])
    }

    /// Finitely supported measure. Atoms must be strictly increasing and
    /// belong to `space`.
    pub fn sparse(space: AtomSpace, atoms: Vec<(u64, f64)>) -> Result<Self> {
        Self::sparse_with_tolerance(space, atoms, DEFAULT_NORMALIZATION_TOL)
    }

    pub fn sparse_with_tolerance(space: AtomSpace, atoms: Vec<(u64, f64)>, tol: f64) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        for (k, &(i, w)) in atoms.iter().enumerate() {
            if !space.contains(i) {
                return Err(Error::InvalidMeasure(format!("atom {i} outside {space}")));
            }
            if k > 0 && atoms[k - 1].0 >= i {
                return Err(Error::InvalidMeasure(
                    "support atoms must be strictly increasing".into(),
                ));
            }
            check_weight(i, w)?;
        }
        let total = atoms.iter().map(|&(_, w)| w).collect::<CompensatedSum>().value();
        check_total(total, tol)?;
        Ok(Self {
            space,
            weights: Weights::Sparse(atoms),
            tol,
            cache: PrefixCache::default(),
        })
    }

    pub fn point_mass(space: AtomSpace, atom: u64) -> Result<Self> {
        Self::sparse(space, vec![(atom, 1.0)])
    }

    /// Countable measure from a weight formula and a tail-mass bound formula.
    /// The tail contract is spot-checked on [`TAIL_CHECK_GRID`].
    pub fn countable(weight: ModelExpr, tail: ModelExpr) -> Result<Self> {
        Self::countable_with_tolerance(weight, tail, DEFAULT_NORMALIZATION_TOL)
    }

    pub fn countable_with_tolerance(weight: ModelExpr, tail: ModelExpr, tol: f64) -> Result<Self> {
        let m = Self {
            space: AtomSpace::Countable,
            weights: Weights::Formula { weight, tail },
            tol,
            cache: PrefixCache::default(),
        };
        m.spot_check_tail()?;
        Ok(m)
    }

    fn spot_check_tail(&self) -> Result<()> {
        let Weights::Formula { tail, .. } = &self.weights else {
            return Ok(());
        };
        let mut previous = f64::INFINITY;
        for &h in TAIL_CHECK_GRID.iter() {
            let t = tail.eval(h).map_err(Error::expr(h))?;
            if t > previous * (1.0 + 1e-12) {
                return Err(Error::InvalidMeasure(format!(
                    "tail bound increases from {previous} to {t} at horizon {h}"
                )));
            }
            previous = t;
            self.support(h)?;
        }
        Ok(())
    }

    pub fn space(&self) -> AtomSpace {
        self.space
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Mass of a single atom.
    pub fn mass(&self, atom: u64) -> Result<f64> {
        if !self.space.contains(atom) {
            return Err(Error::InvalidMeasure(format!("atom {atom} outside {}", self.space)));
        }
        match &self.weights {
            Weights::Dense(w) => Ok(w[atom as usize]),
            Weights::Sparse(pairs) => Ok(pairs
                .binary_search_by_key(&atom, |&(i, _)| i)
                .map_or(0.0, |k| pairs[k].1)),
            Weights::Formula { weight, .. } => {
                let w = weight.eval(atom).map_err(Error::expr(atom))?;
                check_weight(atom, w)?;
                Ok(w)
            }
        }
    }

    /// Dense weight vector of a measure on a finite space.
    pub fn dense_weights(&self) -> Result<Vec<f64>> {
        let AtomSpace::Finite(n) = self.space else {
            return Err(Error::SpaceMismatch("dense weights need a finite space".into()));
        };
        match &self.weights {
            Weights::Dense(w) => Ok(w.clone()),
            Weights::Sparse(pairs) => {
                let mut w = vec![0.0; n];
                for &(i, p) in pairs {
                    w[i as usize] = p;
                }
                Ok(w)
            }
            Weights::Formula { .. } => unreachable!("formula measures live on countable spaces"),
        }
    }

    /// Linear expectation of an arbitrary (signed) per-atom vector on a finite space.
    pub fn expect_vector(&self, values: &[f64]) -> Result<f64> {
        let AtomSpace::Finite(n) = self.space else {
            return Err(Error::SpaceMismatch("vector expectations need a finite space".into()));
        };
        if values.len() != n {
            return Err(Error::SpaceMismatch(format!(
                "vector of length {} on {}",
                values.len(),
                self.space
            )));
        }
        let mut acc = CompensatedSum::new();
        match &self.weights {
            Weights::Dense(w) => acc.extend(w.iter().zip(values).map(|(p, v)| p * v)),
            Weights::Sparse(pairs) => acc.extend(pairs.iter().map(|&(i, p)| p * values[i as usize])),
            Weights::Formula { .. } => unreachable!("formula measures live on countable spaces"),
        }
        Ok(acc.value())
    }

    /// Atoms `0..=horizon` for formula measures, the full support otherwise.
    pub(crate) fn support(&self, horizon: u64) -> Result<Support<'_>> {
        match &self.weights {
            Weights::Dense(w) => Ok(Support {
                atoms: SupportAtoms::Dense(w),
                tail_mass: None,
                horizon: None,
            }),
            Weights::Sparse(pairs) => Ok(Support {
                atoms: SupportAtoms::Sparse(pairs),
                tail_mass: None,
                horizon: None,
            }),
            Weights::Formula { weight, tail } => {
                let len = usize::try_from(horizon)
                    .ok()
                    .and_then(|h| h.checked_add(1))
                    .ok_or_else(|| Error::InvalidArgument(format!("horizon {horizon} too large")))?;
                let w = self.cache.prefix(weight, len, check_weight)?;
                let t = tail.eval(horizon).map_err(Error::expr(horizon))?;
                if !(t.is_finite() && t >= 0.0) {
                    return Err(Error::InvalidMeasure(format!(
                        "tail bound {t} at horizon {horizon}"
                    )));
                }
                let partial = crate::sum::sum(&w);
                if partial > 1.0 + self.tol || partial + t < 1.0 - self.tol {
                    return Err(Error::TailBound {
                        horizon,
                        partial,
                        tail: t,
                    });
                }
                Ok(Support {
                    atoms: SupportAtoms::Prefix(w),
                    tail_mass: Some(t),
                    horizon: Some(horizon),
                })
            }
        }
    }
}

fn check_total(total: f64, tol: f64) -> Result<()> {
    if (total - 1.0).abs() <= tol {
        Ok(())
    } else {
        Err(Error::Normalization { total, tol })
    }
}
