//! Subcommand implementations.

mod bench;
mod bias;
mod fit;
mod interval_cmds;
mod predict;
mod simulate;

pub use bench::{cmd_bench, BenchArgs};
pub use bias::{cmd_bias, BiasArgs};
pub use fit::{cmd_fit, FitArgs};
pub use interval_cmds::{cmd_ci, cmd_pi, CiArgs, PiArgs};
pub use predict::{cmd_predict, PredictArgs};
pub use simulate::{cmd_simulate, SimulateArgs};

use std::path::PathBuf;

use ssdnn::nn::NetworkSpec;
use ssdnn::simgen::{ModelId, SimModel};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Configuration sources shared by every subcommand: an optional flat
/// `key = value` file plus flag overrides (flags win).
#[derive(Debug, Default, clap::Args)]
pub struct ConfigArgs {
    /// Flat key = value configuration file
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override one config key, e.g. --set epochs=100 (repeatable)
    #[arg(long = "set", short = 's', value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Simulation model (m1..m4)
    #[arg(long)]
    pub model: Option<String>,
    /// Sample size
    #[arg(long)]
    pub n: Option<usize>,
    /// Subsample exponent in (0,1)
    #[arg(long)]
    pub beta: Option<f64>,
    /// Master seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Training epochs
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Hidden-layer count
    #[arg(long)]
    pub depth: Option<usize>,
    /// Explicit hidden widths, comma separated (otherwise auto-sized)
    #[arg(long)]
    pub widths: Option<String>,
    /// Significance levels, comma separated
    #[arg(long)]
    pub deltas: Option<String>,
    /// Remove the error term when generating data
    #[arg(long)]
    pub noise_free: bool,
    /// Also fit the iterated (second) subsampling stage
    #[arg(long)]
    pub iterated: bool,
    /// Worker threads for member training
    #[arg(long)]
    pub parallelism: Option<usize>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for pair in &self.overrides {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{pair}`")))?;
            cfg.set(k.trim(), v.trim()).map_err(CliError::Usage)?;
        }
        let mut set = |k: &str, v: String| cfg.set(k, &v).map_err(CliError::Usage);
        if let Some(m) = &self.model {
            set("model", m.clone())?;
        }
        if let Some(n) = self.n {
            set("n", n.to_string())?;
        }
        if let Some(b) = self.beta {
            set("beta", b.to_string())?;
        }
        if let Some(s) = self.seed {
            set("seed", s.to_string())?;
        }
        if let Some(e) = self.epochs {
            set("epochs", e.to_string())?;
        }
        if let Some(d) = self.depth {
            set("depth", d.to_string())?;
        }
        if let Some(w) = &self.widths {
            set("widths", w.clone())?;
        }
        if let Some(d) = &self.deltas {
            set("deltas", d.clone())?;
        }
        if self.noise_free {
            set("noise_free", "true".into())?;
        }
        if self.iterated {
            set("iterated", "true".into())?;
        }
        if let Some(p) = self.parallelism {
            set("parallelism", p.to_string())?;
        }
        Ok(cfg)
    }
}

pub(crate) fn require_model(cfg: &ExperimentConfig) -> Result<SimModel, CliError> {
    let id: ModelId = cfg
        .model
        .ok_or_else(|| CliError::Usage("a simulation model is required (--model m1..m4)".into()))?;
    Ok(SimModel::new(id, !cfg.noise_free))
}

/// Member architecture: explicit widths if configured, otherwise the largest
/// constant width of the configured depth whose size stays within `budget`.
pub(crate) fn member_spec(
    cfg: &ExperimentConfig,
    input_dim: usize,
    budget: usize,
) -> Result<NetworkSpec, CliError> {
    let spec = if cfg.widths.is_empty() {
        NetworkSpec::with_auto_width(input_dim, cfg.depth, 1, budget)?
    } else {
        NetworkSpec::new(input_dim, cfg.widths.clone(), 1)?
    };
    Ok(spec)
}

/// Run `f` under an explicitly sized rayon pool, or on the global pool when
/// no parallelism degree was configured.
pub(crate) fn with_parallelism<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Targets for CI coverage: the true regression values, recovered from the
/// `eps` column when present, else from the model, else unknown.
pub(crate) fn true_values(
    data: &ssdnn::Dataset,
    model: Option<&SimModel>,
) -> Result<Option<Vec<f64>>, CliError> {
    if let Some(truth) = data.true_values() {
        return Ok(Some(truth));
    }
    match model {
        Some(m) => {
            let mut out = Vec::with_capacity(data.len());
            for i in 0..data.len() {
                out.push(m.true_f(data.x(i))?);
            }
            Ok(Some(out))
        }
        None => Ok(None),
    }
}
