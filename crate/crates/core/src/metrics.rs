//! Scalar evaluation criteria: squared-error measures against observed
//! responses and against the true regression function, plus empirical
//! coverage/length of interval methods.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::intervals::{IntervalMethod, IntervalResult};
use crate::simgen::SimModel;
use crate::Result;

/// Error criteria for one fitted estimator. Fields that need the true
/// regression function or a test set are `None` when those are unavailable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Mean squared error against observed responses on the training data.
    pub mse1: f64,
    /// Mean squared error against the true regression function.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mse2: Option<f64>,
    /// Test-set analogue of `mse1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mspe1: Option<f64>,
    /// Test-set analogue of `mse2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mspe2: Option<f64>,
    /// Sample variance of the observed training errors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2_hat: Option<f64>,
    /// Sample variance of the observed test errors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2_hat_test: Option<f64>,
}

/// `(mean (pred−y)², mean (pred−f)²)` over aligned slices.
pub fn mse_pair(preds: &[f64], ys: &[f64], true_fs: &[f64]) -> Result<(f64, f64)> {
    if preds.len() != ys.len() || preds.len() != true_fs.len() {
        return Err(Error::DimensionMismatch {
            expected: preds.len(),
            got: ys.len().min(true_fs.len()),
        });
    }
    if preds.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = preds.len() as f64;
    let mut sum1 = 0.0;
    let mut sum2 = 0.0;
    for i in 0..preds.len() {
        let e1 = preds[i] - ys[i];
        let e2 = preds[i] - true_fs[i];
        sum1 += e1 * e1;
        sum2 += e2 * e2;
    }
    Ok((sum1 / n, sum2 / n))
}

/// Mean squared error against observed responses only.
pub fn mse_observed(preds: &[f64], ys: &[f64]) -> Result<f64> {
    if preds.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: preds.len(),
            got: ys.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = preds.len() as f64;
    Ok(preds
        .iter()
        .zip(ys)
        .map(|(p, y)| (p - y) * (p - y))
        .sum::<f64>()
        / n)
}

/// Sample variance of observed error terms, `mean eps²`.
pub fn sigma2_hat(eps: &[f64]) -> Result<f64> {
    if eps.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(eps.iter().map(|e| e * e).sum::<f64>() / eps.len() as f64)
}

/// Empirical coverage rate and mean length of one interval method over a set
/// of (interval, target) pairs. Intervals are closed at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub ecr: f64,
    pub el: f64,
    pub method: IntervalMethod,
    pub delta: f64,
}

pub fn coverage(intervals: &[IntervalResult], targets: &[f64]) -> Result<CoverageReport> {
    if intervals.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: intervals.len(),
            got: targets.len(),
        });
    }
    if intervals.is_empty() {
        return Err(Error::EmptyInput);
    }
    let method = intervals[0].method;
    let delta = intervals[0].nominal_delta;
    if intervals
        .iter()
        .any(|iv| iv.method != method || iv.nominal_delta != delta)
    {
        return Err(Error::InvalidArgument(
            "coverage expects a homogeneous (method, delta) batch".into(),
        ));
    }
    let n = intervals.len() as f64;
    let covered = intervals
        .iter()
        .zip(targets)
        .filter(|(iv, t)| iv.covers(**t))
        .count();
    let el = intervals.iter().map(IntervalResult::length).sum::<f64>() / n;
    Ok(CoverageReport {
        ecr: covered as f64 / n,
        el,
        method,
        delta,
    })
}

/// Fraction of `draws` fresh responses `y = f(x_t) + eps` that fall inside
/// the interval, conditional on the test point.
pub fn conditional_pi_coverage(
    pi: &IntervalResult,
    model: &SimModel,
    x_t: &[f64],
    draws: usize,
    seed: u64,
) -> Result<f64> {
    if draws == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    let f = model.true_f(x_t)?;
    let sigma = model.noise_sigma();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut covered = 0usize;
    for _ in 0..draws {
        let e: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
        if pi.covers(f + e) {
            covered += 1;
        }
    }
    Ok(covered as f64 / draws as f64)
}
