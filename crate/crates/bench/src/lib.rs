//! Shared inputs for the benchmarks in `benches/`.

use hodge_gp::data::{synth_forex, NoiseLevel};
use hodge_gp::{KernelSpec, SimplicialComplex2};

/// Complete-pair exchange market on `n` currencies with every triangle
/// filled, `n(n-1)/2` edges.
pub fn market(n: usize) -> SimplicialComplex2 {
    synth_forex(n, 1.0, 1.0, NoiseLevel::Absolute(0.0), 1)
        .expect("at least three currencies")
        .complex
}

pub fn hc_matern() -> KernelSpec {
    KernelSpec::hc_matern(1.0, (1.0, 1.0, 1.5), (1.0, 1.0, 1.5))
}

/// Every fifth edge, as a training set.
pub fn train_indices(num_edges: usize) -> Vec<usize> {
    (0..num_edges).step_by(5).collect()
}
