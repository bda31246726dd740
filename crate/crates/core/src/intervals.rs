//! Confidence intervals for the regression function and prediction intervals
//! for a future response.
//!
//! Five constructions over a fitted subagging ensemble at a point `x`:
//!
//! - `QCI1`: equal-tail quantiles of the raw member predictions
//!   (conservative by design).
//! - `PCI1`: normal pivot `mean ± z·M_σ` with
//!   `M_σ = sqrt(q⁻¹ Σ (member_i − mean)²) / n^{(1−β)/2}`.
//! - `PCI2`/`PCI3`: same pivot with the margin enlarged by the observed
//!   squared error `(mean − y)²` scaled by `n^{1−β}` (most enlarged) or
//!   `n` (mildly enlarged).
//! - `QCI2`: quantiles of the normalized iterated-stage pivot roots
//!   `κ_b (block_mean_i − mean)`, mapped back through `κ_n`.
//! - `PI`: residual-quantile prediction interval for `Y₀`.
//!
//! Quantiles use the `⌈p·m⌉` order statistic throughout (1-based, clamped),
//! and intervals are closed at both ends.

use serde::{Deserialize, Serialize};

use crate::dataset::DataView;
use crate::error::Error;
use crate::subagging::SubaggingEnsemble;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalMethod {
    #[serde(rename = "QCI1")]
    Qci1,
    #[serde(rename = "QCI2")]
    Qci2,
    #[serde(rename = "PCI1")]
    Pci1,
    #[serde(rename = "PCI2")]
    Pci2,
    #[serde(rename = "PCI3")]
    Pci3,
    #[serde(rename = "PI")]
    Pi,
}

impl std::fmt::Display for IntervalMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IntervalMethod::Qci1 => "QCI1",
            IntervalMethod::Qci2 => "QCI2",
            IntervalMethod::Pci1 => "PCI1",
            IntervalMethod::Pci2 => "PCI2",
            IntervalMethod::Pci3 => "PCI3",
            IntervalMethod::Pi => "PI",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalResult {
    pub lower: f64,
    pub upper: f64,
    pub method: IntervalMethod,
    pub nominal_delta: f64,
}

impl IntervalResult {
    fn new(lower: f64, upper: f64, method: IntervalMethod, delta: f64) -> Self {
        debug_assert!(lower <= upper);
        Self {
            lower,
            upper,
            method,
            nominal_delta: delta,
        }
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    /// Closed-interval membership; the convention used by every coverage
    /// criterion in this crate.
    pub fn covers(&self, target: f64) -> bool {
        self.lower <= target && target <= self.upper
    }
}

/// Normalization rates for the iterated-stage pivot. The defaults bound the
/// unknown variance order: `κ_b = n^{β/2}` (its largest admissible value)
/// and `κ_n = n^{(1−β/2)/2}` (its smallest), which can only widen the
/// interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaPair {
    pub kappa_n: f64,
    pub kappa_b: f64,
    pub beta: f64,
}

impl KappaPair {
    /// Conservative bounds (α = 1/4 for `κ_n`, α = 1/2 for `κ_b`).
    pub fn from_bounds(n: usize, beta: f64) -> Self {
        let n = n as f64;
        Self {
            kappa_n: n.powf((1.0 - beta / 2.0) / 2.0),
            kappa_b: n.powf(beta / 2.0),
            beta,
        }
    }

    /// Exact rates `κ_n = n^{(1−β+2αβ)/2}`, `κ_b = n^{β(1−β+2αβ)/2}` for a
    /// known variance order α.
    pub fn from_alpha(n: usize, beta: f64, alpha: f64) -> Self {
        let n = n as f64;
        let rate = (1.0 - beta + 2.0 * alpha * beta) / 2.0;
        Self {
            kappa_n: n.powf(rate),
            kappa_b: n.powf(beta * rate),
            beta,
        }
    }
}

/// Order-statistic quantile: the value at 1-based index `⌈p·m⌉`, clamped to
/// `[1, m]`; `p = 0` yields the first element. Input must be sorted.
pub fn empirical_quantile(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput);
    }
    let m = sorted.len();
    let idx = ((p * m as f64).ceil() as usize).clamp(1, m);
    Ok(sorted[idx - 1])
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    v
}

fn check_delta(delta: f64) -> Result<()> {
    if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "nominal level delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

/// Equal-tail quantile interval of the raw member predictions.
pub fn qci1(member_preds: &[f64], delta: f64) -> Result<IntervalResult> {
    check_delta(delta)?;
    if member_preds.len() < 2 {
        return Err(Error::TooFewBlocks {
            got: member_preds.len(),
            min: 2,
        });
    }
    let sorted = sorted_copy(member_preds);
    let lo = empirical_quantile(&sorted, delta / 2.0)?;
    let hi = empirical_quantile(&sorted, 1.0 - delta / 2.0)?;
    Ok(IntervalResult::new(lo, hi, IntervalMethod::Qci1, delta))
}

fn member_spread(mean: f64, member_preds: &[f64]) -> f64 {
    let q = member_preds.len() as f64;
    member_preds
        .iter()
        .map(|m| (m - mean) * (m - mean))
        .sum::<f64>()
        / q
}

/// Normal pivot interval `mean ± z_{1−δ/2}·M_σ`.
pub fn pci1(
    mean: f64,
    member_preds: &[f64],
    n: usize,
    beta: f64,
    delta: f64,
) -> Result<IntervalResult> {
    check_delta(delta)?;
    if member_preds.len() < 2 {
        return Err(Error::TooFewBlocks {
            got: member_preds.len(),
            min: 2,
        });
    }
    let m_sigma = member_spread(mean, member_preds).sqrt() / (n as f64).powf((1.0 - beta) / 2.0);
    let z = standard_normal_quantile(1.0 - delta / 2.0);
    Ok(IntervalResult::new(
        mean - z * m_sigma,
        mean + z * m_sigma,
        IntervalMethod::Pci1,
        delta,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PciVariant {
    /// Margin enlarged with `(mean − y)²/n^{1−β}` (the `2α = 0` case).
    Pci2,
    /// Margin enlarged with `(mean − y)²/n` (the `2α = 1` case).
    Pci3,
}

/// Enlarged pivot interval using an observed response `y` at `x`.
pub fn pci_enlarged(
    mean: f64,
    member_preds: &[f64],
    y_at_x: f64,
    n: usize,
    beta: f64,
    delta: f64,
    variant: PciVariant,
) -> Result<IntervalResult> {
    check_delta(delta)?;
    if member_preds.len() < 2 {
        return Err(Error::TooFewBlocks {
            got: member_preds.len(),
            min: 2,
        });
    }
    let n = n as f64;
    let second_exponent = match variant {
        PciVariant::Pci2 => 1.0 - beta,
        PciVariant::Pci3 => 1.0,
    };
    let err = mean - y_at_x;
    let m_tilde = (member_spread(mean, member_preds) / n.powf(1.0 - beta)
        + err * err / n.powf(second_exponent))
    .sqrt();
    let z = standard_normal_quantile(1.0 - delta / 2.0);
    let method = match variant {
        PciVariant::Pci2 => IntervalMethod::Pci2,
        PciVariant::Pci3 => IntervalMethod::Pci3,
    };
    Ok(IntervalResult::new(
        mean - z * m_tilde,
        mean + z * m_tilde,
        method,
        delta,
    ))
}

/// Quantile-pivot interval from the iterated stage: roots
/// `z_i = κ_b (block_mean_i − mean)`, then
/// `[mean − Q(1−δ/2)/κ_n, mean − Q(δ/2)/κ_n]`.
pub fn qci2_iterated(
    mean: f64,
    iterated_means: &[f64],
    kappas: &KappaPair,
    delta: f64,
) -> Result<IntervalResult> {
    check_delta(delta)?;
    if iterated_means.len() < 2 {
        return Err(Error::TooFewBlocks {
            got: iterated_means.len(),
            min: 2,
        });
    }
    let roots: Vec<f64> = iterated_means
        .iter()
        .map(|m| kappas.kappa_b * (m - mean))
        .collect();
    let sorted = sorted_copy(&roots);
    let b_l = empirical_quantile(&sorted, delta / 2.0)?;
    let b_u = empirical_quantile(&sorted, 1.0 - delta / 2.0)?;
    Ok(IntervalResult::new(
        mean - b_u / kappas.kappa_n,
        mean - b_l / kappas.kappa_n,
        IntervalMethod::Qci2,
        delta,
    ))
}

/// Empirical distribution of the fitted residuals `y_i − mean(x_i)`.
/// Residuals are kept raw: they are not re-centered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualDistribution {
    sorted_residuals: Vec<f64>,
    mean: f64,
}

impl ResidualDistribution {
    pub fn from_residuals(mut residuals: Vec<f64>) -> Result<Self> {
        if residuals.is_empty() {
            return Err(Error::EmptyInput);
        }
        residuals.sort_by(|a, b| a.partial_cmp(b).expect("finite residuals"));
        let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
        Ok(Self {
            sorted_residuals: residuals,
            mean,
        })
    }

    pub fn len(&self) -> usize {
        self.sorted_residuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_residuals.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted_residuals
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        empirical_quantile(&self.sorted_residuals, p)
    }
}

/// Residuals of the ensemble over all rows of `data`.
pub fn fit_residuals(
    ensemble: &SubaggingEnsemble,
    data: DataView<'_>,
) -> Result<ResidualDistribution> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let preds = ensemble.predict_mean_rows(data.xs)?;
    let residuals = data.ys.iter().zip(&preds).map(|(y, p)| y - p).collect();
    ResidualDistribution::from_residuals(residuals)
}

/// Prediction interval for a future response at `x₀`:
/// `mean(x₀) + [Q(δ/2), Q(1−δ/2)]` of the residual distribution.
pub fn prediction_interval(
    mean_at_x0: f64,
    residuals: &ResidualDistribution,
    delta: f64,
) -> Result<IntervalResult> {
    check_delta(delta)?;
    let lo = residuals.quantile(delta / 2.0)?;
    let hi = residuals.quantile(1.0 - delta / 2.0)?;
    Ok(IntervalResult::new(
        mean_at_x0 + lo,
        mean_at_x0 + hi,
        IntervalMethod::Pi,
        delta,
    ))
}

/// Standard normal quantile function via Acklam's rational approximation
/// (relative error below 1.15e-9 everywhere).
pub fn standard_normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "p must lie strictly in (0, 1), got {p}");

    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    }
}
