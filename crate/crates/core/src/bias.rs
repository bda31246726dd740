//! Scaling-down estimation of the bias order of the network estimator.
//!
//! The estimator's bias at a point is modeled as `c_b · m^{−Λ/2}` in the
//! training-sample size `m`. Training extra models on two much smaller
//! subsample sizes `b₂ < b₁ ≪ b` gives two raw bias averages against the
//! ensemble mean; the two-point power law is solved in closed form and the
//! bias of the ensemble itself is extrapolated by scaling the first average
//! down by `(b/b₁)^{−Λ/2}`.

use serde::{Deserialize, Serialize};

use crate::dataset::DataView;
use crate::error::Error;
use crate::nn::{self, NetworkSpec, TrainConfig};
use crate::seeding::{self, stream};
use crate::subagging::{self, SubaggingEnsemble};
use crate::subsampling::BlockPlan;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasEstimate {
    /// Estimated decay exponent Λ.
    pub lambda_hat: f64,
    /// Estimated power-law constant.
    pub c_b_hat: f64,
    /// Raw bias average at the larger small-sample size `b₁`.
    pub b1_hat: f64,
    /// Raw bias average at `b₂`.
    pub b2_hat: f64,
    /// Extrapolated bias of the ensemble mean: `b1_hat · (b/b₁)^{−Λ/2}`.
    pub bias_at_b: f64,
}

/// Mean deviation of small-sample model predictions from the ensemble mean.
pub fn raw_bias_average(preds: &[f64], reference_mean: f64) -> Result<f64> {
    if preds.len() < 2 {
        return Err(Error::TooFewBlocks {
            got: preds.len(),
            min: 2,
        });
    }
    Ok(preds.iter().map(|p| p - reference_mean).sum::<f64>() / preds.len() as f64)
}

/// Solve the two-point system `B₁ = c_b·b₁^{−Λ/2}`, `B₂ = c_b·b₂^{−Λ/2}`
/// for `(Λ, c_b)`. The averages must be nonzero and share a sign; otherwise
/// the power-law model is falsified and the caller gets an error rather than
/// a silently patched estimate.
pub fn solve_power_law(b1_size: usize, b1: f64, b2_size: usize, b2: f64) -> Result<(f64, f64)> {
    if b1_size == b2_size {
        return Err(Error::InvalidArgument("b1 and b2 sizes must differ".into()));
    }
    if b1 == 0.0 || b2 == 0.0 || (b1 > 0.0) != (b2 > 0.0) {
        return Err(Error::NoPowerLawFit {
            b1_hat: b1,
            b2_hat: b2,
        });
    }
    let lambda = 2.0 * (b1 / b2).ln() / ((b2_size as f64) / (b1_size as f64)).ln();
    let c_b = b1 * (b1_size as f64).powf(lambda / 2.0);
    Ok((lambda, c_b))
}

/// Compose the closed-form steps from already-computed raw averages:
/// solve the power law, then extrapolate to block size `b`.
pub fn estimate_bias_from_averages(
    b: usize,
    b1_size: usize,
    b1_hat: f64,
    b2_size: usize,
    b2_hat: f64,
) -> Result<BiasEstimate> {
    let (lambda_hat, c_b_hat) = solve_power_law(b1_size, b1_hat, b2_size, b2_hat)?;
    let bias_at_b = b1_hat * ((b as f64) / (b1_size as f64)).powf(-lambda_hat / 2.0);
    Ok(BiasEstimate {
        lambda_hat,
        c_b_hat,
        b1_hat,
        b2_hat,
        bias_at_b,
    })
}

/// Predictions at `x` of single networks trained on the `q_i` disjoint
/// subsamples of size `size`. Architectures scale with the training size:
/// same depth as `spec`, width chosen so the parameter count stays within
/// `size`.
pub fn small_sample_predictions(
    data: DataView<'_>,
    size: usize,
    spec: &NetworkSpec,
    cfg: &TrainConfig,
    x: &[f64],
    level: u64,
) -> Result<Vec<f64>> {
    let plan = BlockPlan::new(data.len(), size, size)?;
    if plan.q < 2 {
        return Err(Error::TooFewBlocks {
            got: plan.q,
            min: 2,
        });
    }
    let small_spec =
        NetworkSpec::with_auto_width(spec.input_dim, spec.depth(), spec.output_dim, size)?;
    let mut preds = Vec::with_capacity(plan.q);
    for j in 1..=plan.q {
        let rows = plan.block_rows(j)?;
        let block = data.slice(rows.start, rows.end);
        let seed = seeding::mix_seed2(cfg.seed, stream::BIAS_BASE + level, (j - 1) as u64);
        let params = nn::train(&small_spec, block, &cfg.clone().with_seed(seed)).map_err(|e| {
            Error::BlockTraining {
                block: j,
                source: Box::new(e),
            }
        })?;
        preds.push(params.forward_scalar(x)?);
    }
    Ok(preds)
}

/// Full scaling-down procedure against a fitted ensemble:
/// reference mean at `x`, raw averages at `b₁` and `b₂`, power-law solve,
/// extrapolation to the ensemble's block size.
pub fn estimate_bias(
    data: DataView<'_>,
    ensemble: &SubaggingEnsemble,
    cfg: &TrainConfig,
    x: &[f64],
    b1_size: usize,
    b2_size: usize,
) -> Result<BiasEstimate> {
    let b = ensemble.plan.b;
    if !(b2_size < b1_size) {
        return Err(Error::InvalidArgument(format!(
            "need b2 < b1, got b1 = {b1_size}, b2 = {b2_size}"
        )));
    }
    if b1_size > b / 2 {
        return Err(Error::InvalidArgument(format!(
            "b1 must satisfy b1 <= b/2 (b1 = {b1_size}, b = {b})"
        )));
    }
    let reference_mean = ensemble.predict_mean(x)?;
    let preds1 = small_sample_predictions(data, b1_size, &ensemble.spec, cfg, x, 1)?;
    let preds2 = small_sample_predictions(data, b2_size, &ensemble.spec, cfg, x, 2)?;
    let b1_hat = raw_bias_average(&preds1, reference_mean)?;
    let b2_hat = raw_bias_average(&preds2, reference_mean)?;
    estimate_bias_from_averages(b, b1_size, b1_hat, b2_size, b2_hat)
}

/// Convenience wrapper that also fits the ensemble (Algorithm steps end to
/// end). `b1_size`/`b2_size` default to `b/2` and `b/4` when `None`.
pub fn estimate_bias_fitting(
    data: DataView<'_>,
    plan: &BlockPlan,
    spec: &NetworkSpec,
    cfg: &TrainConfig,
    x: &[f64],
    b1_size: Option<usize>,
    b2_size: Option<usize>,
) -> Result<(BiasEstimate, SubaggingEnsemble)> {
    let ensemble = subagging::fit_subagging(data, plan, spec, cfg)?;
    let b1 = b1_size.unwrap_or(plan.b / 2);
    let b2 = b2_size.unwrap_or(plan.b / 4);
    let estimate = estimate_bias(data, &ensemble, cfg, x, b1, b2)?;
    Ok((estimate, ensemble))
}
