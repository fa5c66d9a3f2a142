use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Atoms are the contiguous indices `0..count` (finite) or all of `0, 1, 2, …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomSpace {
    Finite(usize),
    Countable,
}

#[allow(clippy::len_without_is_empty)]
impl AtomSpace {
    pub fn finite(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidSpace("finite space needs at least one atom".into()));
        }
        Ok(AtomSpace::Finite(count))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, AtomSpace::Finite(_))
    }

    /// Number of atoms, `None` for a countable space.
    pub fn len(&self) -> Option<usize> {
        match self {
            AtomSpace::Finite(n) => Some(*n),
            AtomSpace::Countable => None,
        }
    }

    pub fn contains(&self, atom: u64) -> bool {
        match self {
            AtomSpace::Finite(n) => atom < *n as u64,
            AtomSpace::Countable => true,
        }
    }

    pub(crate) fn check_same(&self, other: &AtomSpace, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!("{what}: {self} vs {other}")))
        }
    }
}

impl fmt::Display for AtomSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomSpace::Finite(n) => write!(f, "finite({n})"),
            AtomSpace::Countable => f.write_str("countable"),
        }
    }
}
