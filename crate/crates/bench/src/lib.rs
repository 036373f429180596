//! Fixtures shared by the benchmarks.

use wganlab_core::nn::{init_params, MlpParams, MlpSpec};
use wganlab_core::{Matrix, RngState};

/// Critic `[2, width, width, width, 1]` with default initialization.
pub fn critic(width: usize, seed: u64) -> MlpParams {
    let spec = MlpSpec::new(vec![2, width, width, width, 1], 0.2).expect("valid widths");
    init_params(&spec, &mut RngState::new(seed)).expect("initialization")
}

pub fn points(n: usize, seed: u64) -> Matrix {
    RngState::new(seed).normal_matrix(n, 2)
}
