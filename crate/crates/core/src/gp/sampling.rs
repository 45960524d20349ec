use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::kernels::{KernelContext, KernelSpec};

/// Draws `count` prior samples as the columns of a matrix.
///
/// Each additive block contributes `Φ diag(Ψ^½) v` with `v ~ N(0, I)`, so a
/// sample from a gradient-only kernel lies in `im(B1ᵀ)` by construction.
pub fn sample_prior(
    ctx: &KernelContext,
    spec: &KernelSpec,
    seed: u64,
    count: usize,
) -> Result<DMatrix<f64>> {
    let kernel = spec.assemble(ctx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(kernel.sample_with(count, || StandardNormal.sample(&mut rng)))
}
