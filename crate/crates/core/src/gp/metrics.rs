use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::regression::PosteriorResult;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    /// Mean over test points of `-log N(truth | mean, var + σ_ε²)`.
    pub nlpd: f64,
}

pub fn metrics(pred: &PosteriorResult, truth: &[f64]) -> Result<Metrics> {
    if truth.is_empty() {
        return Err(Error::Usage("metrics need at least one test point".into()));
    }
    if truth.len() != pred.mean.len() {
        return Err(Error::Usage(format!(
            "{} predictions but {} ground-truth values",
            pred.mean.len(),
            truth.len()
        )));
    }
    let n = truth.len() as f64;
    let mut sq = 0.0;
    let mut nlpd = 0.0;
    for ((m, v), t) in pred.mean.iter().zip(&pred.variance).zip(truth) {
        let r = t - m;
        let s2 = v + pred.noise_variance;
        sq += r * r;
        nlpd += 0.5 * (2.0 * PI * s2).ln() + 0.5 * r * r / s2;
    }
    Ok(Metrics {
        rmse: (sq / n).sqrt(),
        nlpd: nlpd / n,
    })
}
