//! Minimal fully-connected feed-forward ReLU network.
//!
//! Scope is deliberately small: dense layers, ReLU on hidden layers, affine
//! output, squared-error loss `(f(x) - y)^2 / 2`, exact reverse-mode
//! gradients, and mini-batch Adam. All arithmetic is `f64`.
//!
//! Training is deterministic: the parameter initialization and the per-epoch
//! shuffle both derive from `TrainConfig::seed`, so `(spec, data, config)`
//! fully determines the trained parameters.

use rand::distributions::Uniform;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::DataView;
use crate::error::Error;
use crate::seeding;
use crate::Result;

/// Architecture of one network: input dimension `d`, hidden widths
/// `H_1..H_L`, output dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub hidden_widths: Vec<usize>,
    pub output_dim: usize,
}

impl NetworkSpec {
    pub fn new(input_dim: usize, hidden_widths: Vec<usize>, output_dim: usize) -> Result<Self> {
        let spec = Self {
            input_dim,
            hidden_widths,
            output_dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::InvalidSpec("input_dim must be >= 1".into()));
        }
        if self.output_dim == 0 {
            return Err(Error::InvalidSpec("output_dim must be >= 1".into()));
        }
        if self.hidden_widths.is_empty() {
            return Err(Error::InvalidSpec(
                "at least one hidden layer is required".into(),
            ));
        }
        if self.hidden_widths.contains(&0) {
            return Err(Error::InvalidSpec("hidden widths must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of hidden layers `L`.
    pub fn depth(&self) -> usize {
        self.hidden_widths.len()
    }

    /// Layer sizes `H_0..H_{L+1}` with `H_0 = input_dim`,
    /// `H_{L+1} = output_dim`.
    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.depth() + 2);
        dims.push(self.input_dim);
        dims.extend_from_slice(&self.hidden_widths);
        dims.push(self.output_dim);
        dims
    }

    /// Total number of scalar parameters:
    /// `sum_{i=0}^{L} (H_i * H_{i+1} + H_{i+1})`.
    pub fn param_count(&self) -> usize {
        let dims = self.layer_dims();
        dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    /// Constant-width spec of the given depth with the largest width whose
    /// parameter count does not exceed `budget`. The width is at least 1 even
    /// when a width-1 network already exceeds the budget.
    pub fn with_auto_width(
        input_dim: usize,
        depth: usize,
        output_dim: usize,
        budget: usize,
    ) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidSpec("depth must be >= 1".into()));
        }
        let count = |w: usize| {
            let head = input_dim * w + w;
            let body = (depth - 1) * (w * w + w);
            let tail = w * output_dim + output_dim;
            head + body + tail
        };
        let mut width = 1;
        while count(width + 1) <= budget {
            width += 1;
        }
        Self::new(input_dim, vec![width; depth], output_dim)
    }
}

/// Weights and biases for one network. Weight matrix `l` has shape
/// `H_{l+1} x H_l` and is stored flat in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub spec: NetworkSpec,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl NetworkParams {
    pub fn zeros(spec: &NetworkSpec) -> Self {
        let dims = spec.layer_dims();
        let weights = dims.windows(2).map(|w| vec![0.0; w[0] * w[1]]).collect();
        let biases = dims.windows(2).map(|w| vec![0.0; w[1]]).collect();
        Self {
            spec: spec.clone(),
            weights,
            biases,
        }
    }

    /// Number of scalars actually stored; equals `spec.param_count()`.
    pub fn value_count(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_finite(&self) -> bool {
        self.weights
            .iter()
            .chain(self.biases.iter())
            .all(|v| v.iter().all(|x| x.is_finite()))
    }

    /// Evaluate the network at `x`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.spec.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.spec.input_dim,
                got: x.len(),
            });
        }
        let mut ws = Workspace::new(&self.spec);
        self.forward_into(x, &mut ws);
        Ok(ws.pre.last().unwrap().clone())
    }

    /// Scalar-output convenience for the regression setting.
    pub fn forward_scalar(&self, x: &[f64]) -> Result<f64> {
        if self.spec.output_dim != 1 {
            return Err(Error::InvalidSpec(format!(
                "forward_scalar requires output_dim == 1, got {}",
                self.spec.output_dim
            )));
        }
        Ok(self.forward(x)?[0])
    }

    /// Per-layer pre-activations at `x` (hidden layers and output). Useful
    /// for dead-unit diagnostics and for detecting ReLU-kink proximity.
    pub fn preactivations(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        if x.len() != self.spec.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.spec.input_dim,
                got: x.len(),
            });
        }
        let mut ws = Workspace::new(&self.spec);
        self.forward_into(x, &mut ws);
        Ok(ws.pre)
    }

    /// Scalar predictions for every row of `xs` (row-major, row length
    /// `input_dim`), reusing one set of activation buffers.
    pub fn forward_scalar_rows(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let d = self.spec.input_dim;
        if self.spec.output_dim != 1 {
            return Err(Error::InvalidSpec(format!(
                "forward_scalar_rows requires output_dim == 1, got {}",
                self.spec.output_dim
            )));
        }
        if !xs.len().is_multiple_of(d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: xs.len() % d,
            });
        }
        let mut ws = Workspace::new(&self.spec);
        let mut out = Vec::with_capacity(xs.len() / d);
        for row in xs.chunks_exact(d) {
            self.forward_into(row, &mut ws);
            out.push(ws.pre.last().unwrap()[0]);
        }
        Ok(out)
    }

    /// Hot-path forward pass; caller guarantees `x.len() == input_dim`.
    fn forward_into(&self, x: &[f64], ws: &mut Workspace) {
        ws.act[0].copy_from_slice(x);
        let layers = self.weights.len();
        for l in 0..layers {
            let (input, rest) = ws.act.split_at_mut(l + 1);
            let input = &input[l];
            matvec(&self.weights[l], input, &self.biases[l], &mut ws.pre[l]);
            if l + 1 < layers {
                for (a, &z) in rest[0].iter_mut().zip(ws.pre[l].iter()) {
                    *a = if z > 0.0 { z } else { 0.0 };
                }
            }
        }
    }
}

#[inline]
fn matvec(w: &[f64], x: &[f64], b: &[f64], out: &mut [f64]) {
    let cols = x.len();
    for (r, o) in out.iter_mut().enumerate() {
        let row = &w[r * cols..(r + 1) * cols];
        let mut acc = b[r];
        for (wi, xi) in row.iter().zip(x.iter()) {
            acc += wi * xi;
        }
        *o = acc;
    }
}

/// Gradient of the loss with respect to every weight and bias; shaped like
/// the owning [`NetworkParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradient {
    pub fn zeros(spec: &NetworkSpec) -> Self {
        let p = NetworkParams::zeros(spec);
        Self {
            weights: p.weights,
            biases: p.biases,
        }
    }

    fn reset(&mut self) {
        for v in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            v.iter_mut().for_each(|x| *x = 0.0);
        }
    }
}

/// Adam accumulators; `second_moment` entries stay nonnegative by
/// construction.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub first_moment: Gradient,
    pub second_moment: Gradient,
    pub step_count: u64,
}

impl AdamState {
    pub fn new(spec: &NetworkSpec) -> Self {
        Self {
            first_moment: Gradient::zeros(spec),
            second_moment: Gradient::zeros(spec),
            step_count: 0,
        }
    }
}

/// Optimizer and schedule settings for one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 10,
            learning_rate: 0.01,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch_size must be >= 1".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidArgument("learning_rate must be > 0".into()));
        }
        for (name, v) in [
            ("adam_beta1", self.adam_beta1),
            ("adam_beta2", self.adam_beta2),
        ] {
            if !v.is_finite() || v <= 0.0 || v >= 1.0 {
                return Err(Error::InvalidArgument(format!("{name} must lie in (0, 1)")));
            }
        }
        if !self.adam_epsilon.is_finite() || self.adam_epsilon <= 0.0 {
            return Err(Error::InvalidArgument("adam_epsilon must be > 0".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Per-layer activation scratch reused across samples.
struct Workspace {
    /// `act[l]` is the input to layer `l`; `act[0]` holds the sample.
    act: Vec<Vec<f64>>,
    /// `pre[l]` is the pre-activation output of layer `l`.
    pre: Vec<Vec<f64>>,
    delta: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(spec: &NetworkSpec) -> Self {
        let dims = spec.layer_dims();
        let act = dims[..dims.len() - 1]
            .iter()
            .map(|&d| vec![0.0; d])
            .collect();
        let pre = dims[1..].iter().map(|&d| vec![0.0; d]).collect();
        let delta = dims[1..].iter().map(|&d| vec![0.0; d]).collect();
        Self { act, pre, delta }
    }
}

/// Draw initial parameters: weights uniform on `[-1/sqrt(fan_in),
/// +1/sqrt(fan_in)]` per layer, biases zero. Deterministic in `seed`; the
/// draw order is layer by layer, row-major.
pub fn init_params(spec: &NetworkSpec, seed: u64) -> NetworkParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = NetworkParams::zeros(spec);
    let dims = spec.layer_dims();
    for (l, w) in params.weights.iter_mut().enumerate() {
        let bound = 1.0 / (dims[l] as f64).sqrt();
        let dist = Uniform::new_inclusive(-bound, bound);
        for v in w.iter_mut() {
            *v = rng.sample(dist);
        }
    }
    params
}

/// Mean of `(f(x_i) - y_i)^2 / 2` over the batch.
pub fn mse_loss(params: &NetworkParams, batch: DataView<'_>) -> Result<f64> {
    check_batch(params, batch)?;
    let mut ws = Workspace::new(&params.spec);
    let mut total = 0.0;
    for i in 0..batch.len() {
        params.forward_into(batch.x(i), &mut ws);
        let err = ws.pre.last().unwrap()[0] - batch.ys[i];
        total += err * err / 2.0;
    }
    Ok(total / batch.len() as f64)
}

/// Exact gradient of [`mse_loss`] with respect to every weight and bias.
/// The ReLU subgradient at 0 is taken to be 0.
pub fn backward(params: &NetworkParams, batch: DataView<'_>) -> Result<Gradient> {
    check_batch(params, batch)?;
    let mut grad = Gradient::zeros(&params.spec);
    let mut ws = Workspace::new(&params.spec);
    backward_into(params, batch, &mut grad, &mut ws);
    Ok(grad)
}

fn check_batch(params: &NetworkParams, batch: DataView<'_>) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if batch.input_dim != params.spec.input_dim {
        return Err(Error::DimensionMismatch {
            expected: params.spec.input_dim,
            got: batch.input_dim,
        });
    }
    if params.spec.output_dim != 1 {
        return Err(Error::InvalidSpec(format!(
            "training requires output_dim == 1, got {}",
            params.spec.output_dim
        )));
    }
    Ok(())
}

/// Accumulates the batch-mean gradient into `grad` (caller zeroes it).
fn backward_into(
    params: &NetworkParams,
    batch: DataView<'_>,
    grad: &mut Gradient,
    ws: &mut Workspace,
) {
    let layers = params.weights.len();
    let inv_m = 1.0 / batch.len() as f64;
    for i in 0..batch.len() {
        params.forward_into(batch.x(i), ws);
        ws.delta[layers - 1][0] = (ws.pre[layers - 1][0] - batch.ys[i]) * inv_m;
        for l in (0..layers).rev() {
            let cols = ws.act[l].len();
            // dL/dW_l = delta_l ⊗ act_l ; dL/db_l = delta_l
            for (r, &d) in ws.delta[l].iter().enumerate() {
                grad.biases[l][r] += d;
                if d != 0.0 {
                    let row = &mut grad.weights[l][r * cols..(r + 1) * cols];
                    for (g, a) in row.iter_mut().zip(ws.act[l].iter()) {
                        *g += d * a;
                    }
                }
            }
            if l > 0 {
                let (lower, upper) = ws.delta.split_at_mut(l);
                let prev = &mut lower[l - 1];
                let delta = &upper[0];
                let w = &params.weights[l];
                // delta_{l-1} = (W_l^T delta_l) gated by ReLU'(pre_{l-1})
                for (c, p) in prev.iter_mut().enumerate() {
                    *p = if ws.pre[l - 1][c] > 0.0 {
                        let mut acc = 0.0;
                        for (r, &d) in delta.iter().enumerate() {
                            acc += w[r * cols + c] * d;
                        }
                        acc
                    } else {
                        0.0
                    };
                }
            }
        }
    }
}

/// One Adam update with bias correction; increments `state.step_count`.
pub fn adam_step(
    params: &mut NetworkParams,
    state: &mut AdamState,
    grad: &Gradient,
    cfg: &TrainConfig,
) {
    state.step_count += 1;
    let t = state.step_count as i32;
    let m_corr = 1.0 - cfg.adam_beta1.powi(t);
    let v_corr = 1.0 - cfg.adam_beta2.powi(t);

    let update = |p: &mut [f64], m: &mut [f64], v: &mut [f64], g: &[f64]| {
        for i in 0..p.len() {
            m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * g[i];
            v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * g[i] * g[i];
            let m_hat = m[i] / m_corr;
            let v_hat = v[i] / v_corr;
            p[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.adam_epsilon);
        }
    };
    for l in 0..params.weights.len() {
        update(
            &mut params.weights[l],
            &mut state.first_moment.weights[l],
            &mut state.second_moment.weights[l],
            &grad.weights[l],
        );
        update(
            &mut params.biases[l],
            &mut state.first_moment.biases[l],
            &mut state.second_moment.biases[l],
            &grad.biases[l],
        );
    }
}

/// Stream id separating the shuffle generator from parameter initialization.
const TRAIN_SHUFFLE_STREAM: u64 = 0x7_3417;

/// Mini-batch Adam over `cfg.epochs` passes. Each epoch shuffles the sample
/// order with the seeded generator and walks batches of `cfg.batch_size`;
/// a short final batch is used, not dropped.
pub fn train(spec: &NetworkSpec, data: DataView<'_>, cfg: &TrainConfig) -> Result<NetworkParams> {
    spec.validate()?;
    cfg.validate()?;
    let mut params = init_params(spec, cfg.seed);
    check_batch(&params, data)?;
    if cfg.epochs == 0 {
        return Ok(params);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seeding::mix_seed(cfg.seed, TRAIN_SHUFFLE_STREAM));
    let mut state = AdamState::new(spec);
    let mut grad = Gradient::zeros(spec);
    let mut ws = Workspace::new(spec);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let d = data.input_dim;
    let mut batch_xs = vec![0.0; cfg.batch_size * d];
    let mut batch_ys = vec![0.0; cfg.batch_size];

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for (batch_idx, chunk) in order.chunks(cfg.batch_size).enumerate() {
            for (k, &i) in chunk.iter().enumerate() {
                batch_xs[k * d..(k + 1) * d].copy_from_slice(data.x(i));
                batch_ys[k] = data.ys[i];
            }
            let batch = DataView {
                input_dim: d,
                xs: &batch_xs[..chunk.len() * d],
                ys: &batch_ys[..chunk.len()],
            };
            grad.reset();
            backward_into(&params, batch, &mut grad, &mut ws);
            adam_step(&mut params, &mut state, &grad, cfg);
            if !params.is_finite() {
                return Err(Error::NonFiniteParams {
                    context: format!("epoch {epoch}, batch {batch_idx}"),
                });
            }
        }
    }
    Ok(params)
}
