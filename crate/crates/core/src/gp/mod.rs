//! Exact GP regression on simplices.

mod fit;
mod likelihood;
mod metrics;
mod regression;
mod sampling;

pub use fit::{softplus, softplus_inv, Adam, FitConfig, GpModel, TRUNCATION_JITTER};
pub use likelihood::{lml_with_gradient, log_marginal_likelihood, LmlGradient};
pub use metrics::{metrics, Metrics};
pub use regression::{
    component_posterior, posterior, ComponentPosterior, Covariance, PosteriorResult, JITTER_LADDER,
};
pub use sampling::sample_prior;
