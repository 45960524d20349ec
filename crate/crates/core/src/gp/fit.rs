//! Marginal-likelihood hyperparameter learning.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::likelihood::{lml_with_gradient, LmlGradient};
use super::regression::{check_training, component_posterior, posterior, PosteriorResult};
use crate::error::{Error, Result};
use crate::kernels::{KernelContext, KernelSpec, SpectralKernel};

/// Relative diagonal jitter added when regressing on a truncated spectrum.
pub const TRUNCATION_JITTER: f64 = 1e-6;

/// `log(1 + e^x)`.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Inverse of [`softplus`] on `(0, ∞)`.
pub fn softplus_inv(y: f64) -> f64 {
    y + (-(-y).exp_m1()).ln()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// First-order adaptive-moment optimizer with bias correction.
#[derive(Clone, Debug)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(lr: f64, dim: usize) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
        }
    }

    /// One descent step on `params` along `grad`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

/// Optimizer settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub iters: usize,
    pub lr: f64,
    pub seed: u64,
    /// Draw unconstrained hyperparameters from `N(0, 1)`; otherwise start
    /// from the values in the kernel spec and the model's noise.
    pub random_init: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            iters: 1000,
            lr: 1e-3,
            seed: 0,
            random_init: true,
        }
    }
}

/// A GP regression model on the simplices of one degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpModel {
    pub kernel_spec: KernelSpec,
    pub noise_variance: f64,
    /// Lower bound on the noise variance, `1e-6 · var(y)`.
    pub noise_floor: f64,
    pub train_indices: Vec<usize>,
    pub train_values: Vec<f64>,
    pub fitted: bool,
    /// Softplus-space hyperparameters, kernel first and noise last.
    pub unconstrained: Vec<f64>,
    /// Negative log marginal likelihood per training point, one entry per
    /// iteration plus the final value.
    pub loss_trace: Vec<f64>,
}

impl GpModel {
    pub fn new(
        kernel_spec: KernelSpec,
        train_indices: Vec<usize>,
        train_values: Vec<f64>,
        noise_variance: f64,
        num_simplices: usize,
    ) -> Result<Self> {
        check_training(num_simplices, &train_indices, &train_values)?;
        kernel_spec.validate()?;
        let n = train_values.len().max(1) as f64;
        let mean = train_values.iter().sum::<f64>() / n;
        let var = train_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let noise_floor = (1e-6 * var).max(1e-12);
        let noise_variance = noise_variance.max(noise_floor);
        let mut unconstrained: Vec<f64> = kernel_spec
            .params()
            .into_iter()
            .map(|p| softplus_inv(p.max(1e-12)))
            .collect();
        unconstrained.push(softplus_inv((noise_variance - noise_floor).max(1e-12)));
        Ok(Self {
            kernel_spec,
            noise_variance,
            noise_floor,
            train_indices,
            train_values,
            fitted: false,
            unconstrained,
            loss_trace: Vec::new(),
        })
    }

    fn constrained(&self, theta: &[f64]) -> (Vec<f64>, f64) {
        let k = theta.len() - 1;
        (
            theta[..k].iter().map(|&t| softplus(t)).collect(),
            self.noise_floor + softplus(theta[k]),
        )
    }

    fn effective_noise(&self, kernel: &SpectralKernel, ctx: &KernelContext, noise: f64) -> f64 {
        if ctx.spectrum().is_truncated() && self.kernel_spec.is_edge_kernel() {
            let d = kernel.diagonal();
            let mean = self.train_indices.iter().map(|&i| d[i]).sum::<f64>()
                / self.train_indices.len().max(1) as f64;
            noise + TRUNCATION_JITTER * mean
        } else {
            noise
        }
    }

    /// Negative log marginal likelihood per point and its gradient with
    /// respect to the unconstrained parameters.
    pub fn objective(
        &self,
        kernel: &mut SpectralKernel,
        ctx: &KernelContext,
        theta: &[f64],
    ) -> Result<(f64, Vec<f64>)> {
        let (params, noise) = self.constrained(theta);
        kernel.set_params(&params)?;
        let noise_eff = self.effective_noise(kernel, ctx, noise);
        let LmlGradient {
            value,
            kernel: dk,
            noise: dn,
        } = lml_with_gradient(kernel, &self.train_indices, &self.train_values, noise_eff)?;
        let n = self.train_indices.len() as f64;
        let mut grad: Vec<f64> = dk
            .iter()
            .zip(theta)
            .map(|(d, &t)| -d * sigmoid(t) / n)
            .collect();
        grad.push(-dn * sigmoid(theta[theta.len() - 1]) / n);
        Ok((-value / n, grad))
    }

    /// Maximizes the marginal likelihood with Adam.
    pub fn fit(&mut self, ctx: &KernelContext, config: &FitConfig) -> Result<()> {
        if !(config.lr > 0.0) {
            return Err(Error::Usage(format!(
                "learning rate must be positive, got {}",
                config.lr
            )));
        }
        let mut kernel = self.kernel_spec.assemble(ctx)?;
        let mut theta = self.unconstrained.clone();
        if config.random_init {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            for t in theta.iter_mut() {
                *t = StandardNormal.sample(&mut rng);
            }
        }
        let mut adam = Adam::new(config.lr, theta.len());
        let mut trace = Vec::with_capacity(config.iters + 1);
        for it in 0..=config.iters {
            let (loss, grad) = self.objective(&mut kernel, ctx, &theta)?;
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                let (params, noise) = self.constrained(&theta);
                let names = self.kernel_spec.param_names();
                let snapshot: Vec<String> = names
                    .iter()
                    .zip(&params)
                    .map(|(n, v)| format!("{n}={v:.6e}"))
                    .collect();
                return Err(Error::Numerical(format!(
                    "non-finite loss at iteration {it}; parameters: {}, noise={noise:.6e}",
                    snapshot.join(", ")
                )));
            }
            trace.push(loss);
            if it < config.iters {
                adam.step(&mut theta, &grad);
            }
        }
        let (params, noise) = self.constrained(&theta);
        self.kernel_spec = self.kernel_spec.with_params(&params)?;
        self.noise_variance = noise;
        self.unconstrained = theta;
        self.loss_trace = trace;
        self.fitted = true;
        Ok(())
    }

    /// Predictive distribution at `test`, optionally with Hodge components.
    pub fn predict(
        &self,
        ctx: &KernelContext,
        test: &[usize],
        components: bool,
    ) -> Result<PosteriorResult> {
        let kernel = self.kernel_spec.assemble(ctx)?;
        let noise = self.effective_noise(&kernel, ctx, self.noise_variance);
        let mut result = if components {
            component_posterior(
                &kernel,
                &self.train_indices,
                &self.train_values,
                noise,
                test,
            )?
        } else {
            posterior(
                &kernel,
                &self.train_indices,
                &self.train_values,
                noise,
                test,
            )?
        };
        result.noise_variance = self.noise_variance;
        Ok(result)
    }
}
