//! Log marginal likelihood of GP regression and its hyperparameter gradient.

use std::f64::consts::PI;

use nalgebra::DVector;

use super::regression::{check_training, Covariance, NoisyFactor};
use crate::error::Result;
use crate::kernels::SpectralKernel;

/// `log N(y | 0, K_train + σ² I)`.
pub fn log_marginal_likelihood<K: Covariance + ?Sized>(
    kernel: &K,
    train: &[usize],
    y: &[f64],
    noise: f64,
) -> Result<f64> {
    check_training(kernel.size(), train, y)?;
    let factor = NoisyFactor::new(&kernel.block(train, train), noise)?;
    let y = DVector::from_column_slice(y);
    let alpha = factor.solve(&y);
    Ok(gaussian_log_density(&y, &alpha, factor.log_det()))
}

fn gaussian_log_density(y: &DVector<f64>, alpha: &DVector<f64>, log_det: f64) -> f64 {
    -0.5 * y.dot(alpha) - 0.5 * log_det - 0.5 * y.len() as f64 * (2.0 * PI).ln()
}

/// Log marginal likelihood with derivatives with respect to the kernel's
/// constrained hyperparameters and the noise variance.
#[derive(Clone, Debug, PartialEq)]
pub struct LmlGradient {
    pub value: f64,
    pub kernel: Vec<f64>,
    pub noise: f64,
}

/// Uses `∂ log p / ∂θ = ½ tr((α αᵀ - K_y⁻¹) ∂K_y/∂θ)` with `α = K_y⁻¹ y`.
pub fn lml_with_gradient(
    kernel: &SpectralKernel,
    train: &[usize],
    y: &[f64],
    noise: f64,
) -> Result<LmlGradient> {
    check_training(kernel.num_rows(), train, y)?;
    let factor = NoisyFactor::new(&kernel.submatrix(train, train), noise)?;
    let y = DVector::from_column_slice(y);
    let alpha = factor.solve(&y);
    let value = gaussian_log_density(&y, &alpha, factor.log_det());
    let w = &alpha * alpha.transpose() - factor.chol.inverse();
    let kernel_grad = kernel
        .trace_derivatives(train, &w)
        .into_iter()
        .map(|t| 0.5 * t)
        .collect();
    Ok(LmlGradient {
        value,
        kernel: kernel_grad,
        noise: 0.5 * w.trace(),
    })
}
