//! Randomized finite models shared by the property and acceptance suites.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use uicrit::{Measure, RandomVariable};

/// Normalized weights with roughly a fifth of the atoms left at zero.
pub fn random_weights(rng: &mut ChaCha8Rng, atoms: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..atoms)
        .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.01..1.0) })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[rng.gen_range(0..atoms)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Values in `[-max, max]`; integer-valued half of the time.
pub fn random_values(rng: &mut ChaCha8Rng, atoms: usize, max: f64) -> Vec<f64> {
    let integer = rng.gen_bool(0.5);
    (0..atoms)
        .map(|_| {
            let v: f64 = rng.gen_range(-max..=max);
            if integer {
                v.round()
            } else {
                v
            }
        })
        .collect()
}

pub struct FiniteModel {
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
    pub p: Measure,
    pub x: RandomVariable,
}

pub fn random_model(rng: &mut ChaCha8Rng, max_atoms: usize, max_value: f64) -> FiniteModel {
    let atoms = rng.gen_range(1..=max_atoms);
    let weights = random_weights(rng, atoms);
    let values = random_values(rng, atoms, max_value);
    FiniteModel {
        p: Measure::finite(weights.clone()).unwrap(),
        x: RandomVariable::finite(values.clone()).unwrap(),
        weights,
        values,
    }
}

/// `E[g(|X|)]` by direct enumeration.
pub fn brute<F: Fn(f64) -> f64>(weights: &[f64], values: &[f64], g: F) -> f64 {
    weights.iter().zip(values).map(|(w, v)| w * g(v.abs())).sum()
}

/// Members over a shared finite space.
pub fn random_members(rng: &mut ChaCha8Rng, atoms: usize, count: usize, max_value: f64) -> Vec<RandomVariable> {
    (0..count)
        .map(|_| RandomVariable::finite(random_values(rng, atoms, max_value)).unwrap())
        .collect()
}

pub fn random_measures(rng: &mut ChaCha8Rng, atoms: usize, count: usize) -> Vec<Measure> {
    (0..count)
        .map(|_| Measure::finite(random_weights(rng, atoms)).unwrap())
        .collect()
}
