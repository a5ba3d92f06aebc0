#![allow(dead_code)]

use pgg_core::payoffs::{PggParams, SimplexState};
use rand::Rng;

/// Uniform point on the simplex from sorted uniforms.
pub fn random_state<R: Rng>(rng: &mut R) -> SimplexState {
    let (a, b): (f64, f64) = (rng.random(), rng.random());
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    SimplexState::new(lo, hi - lo, 1.0 - hi).expect("valid simplex point")
}

pub fn random_params<R: Rng>(rng: &mut R) -> PggParams {
    let sample = rng.random_range(2..=20usize);
    let n = sample as f64;
    PggParams {
        population: sample + rng.random_range(0..200usize),
        sample,
        cost: rng.random_range(0.1..5.0),
        rate: 1.0 + (n - 1.0) * rng.random_range(0.01..0.99),
        participation_cost: rng.random_range(0.0..5.0),
        mutation: rng.random_range(0.0..1.0),
        ..PggParams::default()
    }
}
