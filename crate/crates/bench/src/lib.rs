//! Shared workloads for the criterion benches.

use infoflow_core::oracles::random_stable_model;
use infoflow_core::{TimeSeriesData, VarModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic random stable model with `channels` channels and lag `order`.
pub fn model(channels: usize, order: usize) -> VarModel {
    let mut rng = ChaCha8Rng::seed_from_u64((channels * 100 + order) as u64);
    random_stable_model(&mut rng, channels, order)
}

pub fn samples(model: &VarModel, n: usize) -> TimeSeriesData {
    model.simulate(n, 500, 1).expect("bench models are stable").0
}
