//! The subagging estimator: train one network per plan block and average.
//!
//! Member `j` trains only on block `j`'s rows with a seed derived
//! deterministically from the master seed and the block index, so the result
//! is independent of whether members are trained in parallel (rayon) or
//! sequentially. The iterated variant applies the same construction again
//! inside every first-stage block, producing the per-block subagging means
//! that the quantile-pivot interval needs.

use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::DataView;
use crate::error::Error;
use crate::nn::{self, NetworkParams, NetworkSpec, TrainConfig};
use crate::seeding::{self, stream};
use crate::subsampling::BlockPlan;
use crate::Result;

/// `q` trained member networks plus their plan and training provenance.
///
/// Wall-clock fields are measurement artifacts and are excluded from
/// serialization; the on-disk artifact is a pure function of the inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubaggingEnsemble {
    pub plan: BlockPlan,
    pub spec: NetworkSpec,
    pub models: Vec<NetworkParams>,
    /// Seed each member was trained with, in block order.
    pub seeds: Vec<u64>,
    #[serde(skip)]
    pub member_seconds: Vec<f64>,
    #[serde(skip)]
    pub total_seconds: f64,
}

impl SubaggingEnsemble {
    /// Mean of the `q` member predictions at `x`.
    pub fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        let members = self.predict_members(x)?;
        Ok(members.iter().sum::<f64>() / members.len() as f64)
    }

    /// The `q` individual member predictions at `x`, in block order.
    pub fn predict_members(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.models.iter().map(|m| m.forward_scalar(x)).collect()
    }

    /// Ensemble-mean predictions for every row of `xs` (row-major).
    pub fn predict_mean_rows(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let mut sums = vec![0.0; xs.len() / self.spec.input_dim];
        for model in &self.models {
            for (s, p) in sums.iter_mut().zip(model.forward_scalar_rows(xs)?) {
                *s += p;
            }
        }
        let q = self.models.len() as f64;
        sums.iter_mut().for_each(|s| *s /= q);
        Ok(sums)
    }
}

/// Seed for first-stage member `j` (1-based).
pub fn member_seed(master: u64, j: usize) -> u64 {
    seeding::mix_seed(master, stream::MEMBER_BASE + (j - 1) as u64)
}

/// Seed for iterated-stage member `j` inside first-stage block `i` (1-based).
pub fn iterated_seed(master: u64, i: usize, j: usize) -> u64 {
    seeding::mix_seed2(
        master,
        stream::ITERATED_BASE + (i - 1) as u64,
        (j - 1) as u64,
    )
}

/// Train the `q` member networks of `plan` on `data`.
///
/// `cfg.seed` acts as the master seed; member `j` trains with
/// [`member_seed`]`(cfg.seed, j)`.
pub fn fit_subagging(
    data: DataView<'_>,
    plan: &BlockPlan,
    spec: &NetworkSpec,
    cfg: &TrainConfig,
) -> Result<SubaggingEnsemble> {
    if data.len() < plan.required_rows() {
        return Err(Error::InsufficientData {
            got: data.len(),
            required: plan.required_rows(),
        });
    }
    let start = Instant::now();
    let trained: Vec<(NetworkParams, u64, f64)> = (1..=plan.q)
        .into_par_iter()
        .map(|j| {
            let rows = plan.block_rows(j).expect("j in 1..=q");
            let block = data.slice(rows.start, rows.end);
            let seed = member_seed(cfg.seed, j);
            let member_cfg = cfg.clone().with_seed(seed);
            let t = Instant::now();
            let params = nn::train(spec, block, &member_cfg).map_err(|e| Error::BlockTraining {
                block: j,
                source: Box::new(e),
            })?;
            Ok((params, seed, t.elapsed().as_secs_f64()))
        })
        .collect::<Result<_>>()?;
    let total_seconds = start.elapsed().as_secs_f64();

    let mut models = Vec::with_capacity(plan.q);
    let mut seeds = Vec::with_capacity(plan.q);
    let mut member_seconds = Vec::with_capacity(plan.q);
    for (params, seed, secs) in trained {
        models.push(params);
        seeds.push(seed);
        member_seconds.push(secs);
    }
    Ok(SubaggingEnsemble {
        plan: *plan,
        spec: spec.clone(),
        models,
        seeds,
        member_seconds,
        total_seconds,
    })
}

/// Second-stage ensembles: for every first-stage block `i`, `q'` networks
/// trained on its sub-blocks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IteratedEnsemble {
    pub outer: BlockPlan,
    /// Plan over one outer block's `b` points.
    pub inner: BlockPlan,
    pub spec: NetworkSpec,
    /// `models[i][j]`: inner member `j` of outer block `i` (0-based here).
    pub models: Vec<Vec<NetworkParams>>,
    pub seeds: Vec<Vec<u64>>,
    #[serde(skip)]
    pub total_seconds: f64,
}

impl IteratedEnsemble {
    /// The `q` per-block subagging means at `x`: entry `i` averages the `q'`
    /// inner members of first-stage block `i`.
    pub fn block_means(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.models
            .iter()
            .map(|inner| {
                let mut sum = 0.0;
                for m in inner {
                    sum += m.forward_scalar(x)?;
                }
                Ok(sum / inner.len() as f64)
            })
            .collect()
    }
}

/// Train the iterated stage: apply the subagging construction again inside
/// every first-stage block, with sub-blocks of length `⌈b^beta⌉`.
pub fn fit_iterated(
    data: DataView<'_>,
    plan: &BlockPlan,
    inner_spec: &NetworkSpec,
    cfg: &TrainConfig,
    beta: f64,
) -> Result<IteratedEnsemble> {
    if data.len() < plan.required_rows() {
        return Err(Error::InsufficientData {
            got: data.len(),
            required: plan.required_rows(),
        });
    }
    let inner = plan.iterated(beta)?;
    let start = Instant::now();
    let per_block: Vec<(Vec<NetworkParams>, Vec<u64>)> = (1..=plan.q)
        .into_par_iter()
        .map(|i| {
            let outer_rows = plan.block_rows(i).expect("i in 1..=q");
            let block = data.slice(outer_rows.start, outer_rows.end);
            let mut models = Vec::with_capacity(inner.q);
            let mut seeds = Vec::with_capacity(inner.q);
            for j in 1..=inner.q {
                let rows = inner.block_rows(j).expect("j in 1..=q'");
                let sub = block.slice(rows.start, rows.end);
                let seed = iterated_seed(cfg.seed, i, j);
                let sub_cfg = cfg.clone().with_seed(seed);
                let params =
                    nn::train(inner_spec, sub, &sub_cfg).map_err(|e| Error::BlockTraining {
                        block: i,
                        source: Box::new(e),
                    })?;
                models.push(params);
                seeds.push(seed);
            }
            Ok((models, seeds))
        })
        .collect::<Result<_>>()?;
    let total_seconds = start.elapsed().as_secs_f64();

    let mut models = Vec::with_capacity(plan.q);
    let mut seeds = Vec::with_capacity(plan.q);
    for (m, s) in per_block {
        models.push(m);
        seeds.push(s);
    }
    Ok(IteratedEnsemble {
        outer: *plan,
        inner,
        spec: inner_spec.clone(),
        models,
        seeds,
        total_seconds,
    })
}

/// On-disk bundle: the fitted ensemble, optional iterated stage, and the
/// `beta` the plan was derived from (needed by interval normalization rates).
/// JSON keeps every `f64` bit-exact via shortest round-trip formatting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleArtifact {
    pub beta: f64,
    pub ensemble: SubaggingEnsemble,
    pub iterated: Option<IteratedEnsemble>,
}

impl EnsembleArtifact {
    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path.as_ref())?;
        serde_json::to_writer(BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Ok(serde_json::from_reader(BufReader::new(file))?)
    }
}
