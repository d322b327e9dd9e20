//! Fixtures shared by the benchmarks.

use cjrank_core::rating::RatingConfig;
use cjrank_core::simulator::{simulate_experiment, LatentModel};
use cjrank_core::store::JudgementRecord;
use cjrank_core::ItemIndex;

/// A simulated log over `n_items` evenly spaced Bradley-Terry strengths.
pub fn simulated_log(n_items: usize, sessions: usize, seed: u64) -> (ItemIndex, Vec<JudgementRecord>) {
    let strengths: Vec<f64> = (1..=n_items).rev().map(|s| s as f64).collect();
    let model = LatentModel::bradley_terry(strengths).expect("positive strengths");
    let sim = simulate_experiment(&model, n_items, sessions, seed, RatingConfig::default())
        .expect("valid simulation parameters");
    let index = sim.manifest.index().expect("simulated manifest is valid");
    (index, sim.log)
}

/// A shuffled ranking of `n` positions, deterministic in `seed`.
pub fn scrambled_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut state = seed | 1;
    for i in (1..n).rev() {
        // xorshift is plenty for a benchmark input
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        order.swap(i, (state % (i as u64 + 1)) as usize);
    }
    order
}
