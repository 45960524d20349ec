//! Exact conditioning of a zero-mean Gaussian prior on noisy observations.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{KernelMatrix, SpectralKernel};

/// Jitter multipliers of `trace/n` tried after a failed factorization.
pub const JITTER_LADDER: [f64; 3] = [1e-8, 1e-6, 1e-4];

/// Anything that can hand out covariance sub-blocks.
pub trait Covariance {
    fn size(&self) -> usize;
    fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64>;
}

impl Covariance for DMatrix<f64> {
    fn size(&self) -> usize {
        self.nrows()
    }

    fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        self.select_rows(rows).select_columns(cols)
    }
}

impl Covariance for KernelMatrix {
    fn size(&self) -> usize {
        self.matrix.nrows()
    }

    fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        Covariance::block(&self.matrix, rows, cols)
    }
}

impl Covariance for SpectralKernel {
    fn size(&self) -> usize {
        self.num_rows()
    }

    fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        self.submatrix(rows, cols)
    }
}

/// Posterior mean and variance of each Hodge component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentPosterior {
    pub mean_harmonic: Vec<f64>,
    pub mean_gradient: Vec<f64>,
    pub mean_curl: Vec<f64>,
    pub var_harmonic: Vec<f64>,
    pub var_gradient: Vec<f64>,
    pub var_curl: Vec<f64>,
}

/// Predictive distribution at a set of test simplices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorResult {
    pub test_indices: Vec<usize>,
    pub mean: Vec<f64>,
    /// Latent-function variance, without observation noise.
    pub variance: Vec<f64>,
    /// Observation noise used when conditioning.
    pub noise_variance: f64,
    pub components: Option<ComponentPosterior>,
}

/// Cholesky factor of `K_train + σ² I`, jittered if necessary.
pub(crate) struct NoisyFactor {
    pub chol: Cholesky<f64, Dyn>,
}

impl NoisyFactor {
    pub fn new(k_train: &DMatrix<f64>, noise: f64) -> Result<Self> {
        let n = k_train.nrows();
        let mut a = k_train.clone();
        for i in 0..n {
            a[(i, i)] += noise;
        }
        if let Some(chol) = Cholesky::new(a.clone()) {
            return Ok(Self { chol });
        }
        let scale = (a.trace() / n.max(1) as f64).abs().max(f64::MIN_POSITIVE);
        for rel in JITTER_LADDER {
            let jitter = rel * scale;
            let mut b = a.clone();
            for i in 0..n {
                b[(i, i)] += jitter;
            }
            if let Some(chol) = Cholesky::new(b) {
                log::warn!("covariance factorization needed jitter {jitter:.3e}");
                return Ok(Self { chol });
            }
        }
        Err(Error::Numerical(format!(
            "covariance of {n} training points is not positive definite even with jitter {:.3e}",
            JITTER_LADDER[JITTER_LADDER.len() - 1] * scale
        )))
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self
            .chol
            .l_dirty()
            .diagonal()
            .iter()
            .map(|d| d.ln())
            .sum::<f64>()
    }
}

fn check_indices(n: usize, idx: &[usize], what: &str) -> Result<()> {
    if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
        return Err(Error::Usage(format!(
            "{what} index {bad} out of range for {n} simplices"
        )));
    }
    Ok(())
}

pub(crate) fn check_training(n: usize, train: &[usize], y: &[f64]) -> Result<()> {
    check_indices(n, train, "training")?;
    if train.len() != y.len() {
        return Err(Error::Usage(format!(
            "{} training indices but {} observations",
            train.len(),
            y.len()
        )));
    }
    let mut sorted = train.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Usage("training indices must be unique".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Usage("observations must be finite".into()));
    }
    Ok(())
}

/// Posterior of `f[test]` given `y = f[train] + ε`, `ε ~ N(0, σ² I)`.
pub fn posterior<K: Covariance + ?Sized>(
    kernel: &K,
    train: &[usize],
    y: &[f64],
    noise: f64,
    test: &[usize],
) -> Result<PosteriorResult> {
    let n = kernel.size();
    check_training(n, train, y)?;
    check_indices(n, test, "test")?;
    if !(noise >= 0.0) {
        return Err(Error::Usage(format!(
            "noise variance must be >= 0, got {noise}"
        )));
    }
    let factor = NoisyFactor::new(&kernel.block(train, train), noise)?;
    let y = DVector::from_column_slice(y);
    let alpha = factor.solve(&y);
    let cross = kernel.block(train, test);
    let mean = cross.transpose() * &alpha;
    let variance = predictive_variance(kernel, &factor, &cross, test);
    Ok(PosteriorResult {
        test_indices: test.to_vec(),
        mean: mean.iter().copied().collect(),
        variance,
        noise_variance: noise,
        components: None,
    })
}

fn predictive_variance<K: Covariance + ?Sized>(
    kernel: &K,
    factor: &NoisyFactor,
    cross: &DMatrix<f64>,
    test: &[usize],
) -> Vec<f64> {
    let v = factor
        .chol
        .l_dirty()
        .solve_lower_triangular(cross)
        .expect("Cholesky factor has a positive diagonal");
    test.iter()
        .enumerate()
        .map(|(j, &t)| {
            let prior = kernel.block(&[t], &[t])[(0, 0)];
            (prior - v.column(j).norm_squared()).max(0.0)
        })
        .collect()
}

/// Posterior of the full flow and of its harmonic, gradient and curl parts
/// under a Hodge-compositional prior.
pub fn component_posterior(
    kernel: &SpectralKernel,
    train: &[usize],
    y: &[f64],
    noise: f64,
    test: &[usize],
) -> Result<PosteriorResult> {
    let labels = kernel.block_labels();
    for want in ["H", "G", "C"] {
        if !labels.contains(&want) {
            return Err(Error::Usage(
                "component posteriors need a kernel with harmonic, gradient and curl blocks".into(),
            ));
        }
    }
    let mut result = posterior(kernel, train, y, noise, test)?;
    let factor = NoisyFactor::new(&kernel.submatrix(train, train), noise)?;
    let alpha = factor.solve(&DVector::from_column_slice(y));
    let l = factor.chol.l_dirty();
    let part = |label: &str| -> (Vec<f64>, Vec<f64>) {
        let cross = kernel.block_submatrix(label, train, test);
        let mean = cross.transpose() * &alpha;
        let v = l
            .solve_lower_triangular(&cross)
            .expect("Cholesky factor has a positive diagonal");
        let var = test
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                let prior = kernel.block_submatrix(label, &[t], &[t])[(0, 0)];
                (prior - v.column(j).norm_squared()).max(0.0)
            })
            .collect();
        (mean.iter().copied().collect(), var)
    };
    let (mean_harmonic, var_harmonic) = part("H");
    let (mean_gradient, var_gradient) = part("G");
    let (mean_curl, var_curl) = part("C");
    result.components = Some(ComponentPosterior {
        mean_harmonic,
        mean_gradient,
        mean_curl,
        var_harmonic,
        var_gradient,
        var_curl,
    });
    Ok(result)
}
