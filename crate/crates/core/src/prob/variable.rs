use crate::error::{Error, Result};
use crate::modelspec::expr::ModelExpr;
use crate::prob::measure::PrefixCache;
use crate::prob::space::AtomSpace;

#[derive(Debug, Clone)]
pub enum Values {
    Table(Vec<f64>),
    Formula {
        value: ModelExpr,
        /// `G(i) >= |X(i)|`, checked at every evaluated atom.
        growth: Option<ModelExpr>,
        /// `R(M) >= sum_{i > M} G(i) p(i)` for every measure this variable is
        /// evaluated against.
        moment_tail: Option<ModelExpr>,
    },
}

/// A real-valued function of the atom index.
#[derive(Debug, Clone)]
pub struct RandomVariable {
    space: AtomSpace,
    values: Values,
    cache: PrefixCache,
}

impl RandomVariable {
    /// Variable on `Finite(values.len())`.
    pub fn finite(values: Vec<f64>) -> Result<Self> {
        let space = AtomSpace::finite(values.len())?;
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidVariable(format!("value {v} at atom {i}")));
        }
        Ok(Self {
            space,
            values: Values::Table(values),
            cache: PrefixCache::default(),
        })
    }

    pub fn constant(space: AtomSpace, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidVariable(format!("constant {c}")));
        }
        match space {
            AtomSpace::Finite(n) => Self::finite(vec![c; n]),
            AtomSpace::Countable => {
                let lit = ModelExpr::literal(c.abs());
                let value = if c < 0.0 {
                    ModelExpr::Neg(Box::new(lit.clone()))
                } else {
                    lit.clone()
                };
                Ok(Self::formula(space, value, Some(lit), None))
            }
        }
    }

    /// `X(n) = n` on the countable space.
    pub fn identity() -> Self {
        Self::formula(
            AtomSpace::Countable,
            ModelExpr::index(),
            Some(ModelExpr::index()),
            None,
        )
    }

    pub fn formula(
        space: AtomSpace,
        value: ModelExpr,
        growth: Option<ModelExpr>,
        moment_tail: Option<ModelExpr>,
    ) -> Self {
        Self {
            space,
            values: Values::Formula {
                value,
                growth,
                moment_tail,
            },
            cache: PrefixCache::default(),
        }
    }

    pub fn space(&self) -> AtomSpace {
        self.space
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    /// `X(n) = n` on the countable space.
    pub fn is_identity(&self) -> bool {
        self.space == AtomSpace::Countable
            && matches!(&self.values, Values::Formula { value, .. } if value.is_index())
    }

    pub fn value(&self, atom: u64) -> Result<f64> {
        if !self.space.contains(atom) {
            return Err(Error::InvalidVariable(format!("atom {atom} outside {}", self.space)));
        }
        match &self.values {
            Values::Table(v) => Ok(v[atom as usize]),
            Values::Formula { value, growth, .. } => {
                let x = value.eval(atom).map_err(Error::expr(atom))?;
                check_growth(growth.as_ref(), atom, x)?;
                Ok(x)
            }
        }
    }

    /// `|X|` on atoms `0..len`, cached for formula variables.
    pub(crate) fn abs_prefix(&self, len: usize) -> Result<Vec<f64>> {
        match &self.values {
            Values::Table(v) => Ok(v[..len.min(v.len())].iter().map(|x| x.abs()).collect()),
            Values::Formula { value, growth, .. } => {
                let v = self
                    .cache
                    .prefix(value, len, |atom, x| check_growth(growth.as_ref(), atom, x))?;
                Ok(v.into_iter().map(f64::abs).collect())
            }
        }
    }

    /// Evaluated moment tail bound `R(horizon)`, if declared.
    pub(crate) fn moment_tail(&self, horizon: u64) -> Result<Option<f64>> {
        match &self.values {
            Values::Formula {
                moment_tail: Some(r),
                ..
            } => {
                let v = r.eval(horizon).map_err(Error::expr(horizon))?;
                if v.is_finite() && v >= 0.0 {
                    Ok(Some(v))
                } else {
                    Err(Error::InvalidVariable(format!(
                        "moment tail bound {v} at horizon {horizon}"
                    )))
                }
            }
            _ => Ok(None),
        }
    }

    /// Per-atom values on a finite space.
    pub fn table(&self) -> Result<Vec<f64>> {
        let AtomSpace::Finite(n) = self.space else {
            return Err(Error::SpaceMismatch("value table needs a finite space".into()));
        };
        match &self.values {
            Values::Table(v) => Ok(v.clone()),
            Values::Formula { .. } => (0..n as u64).map(|i| self.value(i)).collect(),
        }
    }

    /// `max |X|` over a finite space.
    pub fn max_abs(&self) -> Option<f64> {
        match &self.values {
            Values::Table(v) => Some(v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))),
            Values::Formula { .. } => {
                let t = self.table().ok()?;
                Some(t.iter().fold(0.0, |m: f64, x| m.max(x.abs())))
            }
        }
    }

    /// `Some(true)` when every value is an integer, `None` when unknown.
    pub fn is_integer_valued(&self) -> Option<bool> {
        if self.is_identity() {
            return Some(true);
        }
        match self.space {
            AtomSpace::Finite(_) => {
                let t = self.table().ok()?;
                Some(t.iter().all(|x| x.fract() == 0.0))
            }
            AtomSpace::Countable => None,
        }
    }
}

fn check_growth(growth: Option<&ModelExpr>, atom: u64, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::InvalidVariable(format!("value {x} at atom {atom}")));
    }
    if let Some(g) = growth {
        let bound = g.eval(atom).map_err(Error::expr(atom))?;
        if x.abs() > bound * (1.0 + 1e-12) {
            return Err(Error::InvalidVariable(format!(
                "|X({atom})| = {} exceeds growth bound {bound}",
                x.abs()
            )));
        }
    }
    Ok(())
}
