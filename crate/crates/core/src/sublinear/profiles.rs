//! Criteria under a sublinear expectation, for a family given as a list.

use crate::error::Result;
use crate::family::{Criterion, FamilyOfRVs, Horizons, Profile};
use crate::prob::RandomVariable;
use crate::sublinear::SublinearExpectation;

fn family(e: &SublinearExpectation, k: &[RandomVariable]) -> Result<FamilyOfRVs> {
    FamilyOfRVs::sublinear(k.to_vec(), e.clone())
}

/// `c ↦ sup_{X in K} 𝓔[|X| 1{|X| >= c}]`
pub fn sle_ui_profile(e: &SublinearExpectation, k: &[RandomVariable], levels: &[f64], h: &Horizons) -> Result<Profile> {
    family(e, k)?.profile(Criterion::Ui, levels, h)
}

/// `a ↦ sup_{X in K} 𝓔[(|X| - a)⁺]`
pub fn sle_wui_profile(e: &SublinearExpectation, k: &[RandomVariable], levels: &[f64], h: &Horizons) -> Result<Profile> {
    family(e, k)?.profile(Criterion::WUi, levels, h)
}

/// `m ↦ sup_{X in K} sum_{n=m}^{series} 𝓔[1{|X| > n}]`
pub fn sle_sui_profile(e: &SublinearExpectation, k: &[RandomVariable], starts: &[u64], h: &Horizons) -> Result<Profile> {
    let levels: Vec<f64> = starts.iter().map(|&m| m as f64).collect();
    family(e, k)?.profile(Criterion::SUi, &levels, h)
}
