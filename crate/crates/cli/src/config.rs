//! Experiment configuration: a flat `key = value` file merged with CLI flag
//! overrides.
//!
//! File format: one `key = value` pair per line, `#` starts a comment, blank
//! lines ignored. Unknown keys are errors (they are usually typos). Every key
//! is documented in the README; flags take precedence over file values.

use std::collections::BTreeSet;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use ssdnn::intervals::IntervalMethod;
use ssdnn::nn::TrainConfig;
use ssdnn::simgen::ModelId;

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub model: Option<ModelId>,
    pub noise_free: bool,
    pub n: usize,
    pub beta: f64,
    /// Stride factor `a` in `h = max(1, ⌊a·b⌋)`. The default 1 gives
    /// adjacent disjoint blocks; this is inferred from the reference
    /// experiments (q = 38 at n = 2·10^5), which never state `a` outright.
    pub overlap: f64,
    pub depth: usize,
    /// Explicit hidden widths; empty means auto-size (largest constant width
    /// with parameter count within the block length).
    pub widths: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub seed: u64,
    pub deltas: Vec<f64>,
    pub replications: usize,
    pub test_points: usize,
    pub mc_draws: usize,
    pub methods: Vec<IntervalMethod>,
    pub iterated: bool,
    /// Explicit second-stage widths; empty means auto-size to the iterated
    /// block length.
    pub iterated_widths: Vec<usize>,
    /// Iterated-stage epoch count; `None` inherits `epochs`.
    pub iterated_epochs: Option<usize>,
    /// Variance order for the interval normalization rates; `None` uses the
    /// conservative bounds.
    pub alpha: Option<f64>,
    /// Worker threads for member training; `None` uses all available cores.
    pub parallelism: Option<usize>,
    /// Small-sample sizes for bias estimation; `None` defaults to b/2, b/4.
    pub b1: Option<usize>,
    pub b2: Option<usize>,
    /// Test-set size for benchmark prediction errors.
    pub test_n: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: None,
            noise_free: false,
            n: 10_000,
            beta: 0.7,
            overlap: 1.0,
            depth: 2,
            widths: Vec::new(),
            epochs: 200,
            batch_size: 10,
            learning_rate: 0.01,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            seed: 0,
            deltas: vec![0.05, 0.1],
            replications: 20,
            test_points: 10,
            mc_draws: 3000,
            methods: vec![
                IntervalMethod::Qci1,
                IntervalMethod::Pci1,
                IntervalMethod::Pci2,
                IntervalMethod::Pci3,
            ],
            iterated: false,
            iterated_widths: Vec::new(),
            iterated_epochs: None,
            alpha: None,
            parallelism: None,
            b1: None,
            b2: None,
            test_n: 2000,
        }
    }
}

impl ExperimentConfig {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            adam_beta1: self.adam_beta1,
            adam_beta2: self.adam_beta2,
            adam_epsilon: self.adam_epsilon,
            seed: self.seed,
        }
    }

    pub fn iterated_train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.iterated_epochs.unwrap_or(self.epochs),
            ..self.train_config()
        }
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        cfg.apply_file(path)?;
        Ok(cfg)
    }

    pub fn apply_file<P: AsRef<Path>>(&mut self, path: P) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            CliError::Usage(format!(
                "cannot read config {}: {e}",
                path.as_ref().display()
            ))
        })?;
        let mut seen = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected `key = value`", idx + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(CliError::Usage(format!(
                    "config line {}: duplicate key `{key}`",
                    idx + 1
                )));
            }
            self.set(key, value)
                .map_err(|e| CliError::Usage(format!("config line {}: {e}", idx + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse::<T>()
                .map_err(|e| format!("invalid value for `{key}`: {e}"))
        }
        fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, String>
        where
            T::Err: std::fmt::Display,
        {
            if value.is_empty() {
                return Ok(Vec::new());
            }
            value
                .split(',')
                .map(|v| parse::<T>(key, v.trim()))
                .collect()
        }
        fn parse_opt<T: FromStr>(key: &str, value: &str) -> Result<Option<T>, String>
        where
            T::Err: std::fmt::Display,
        {
            if value.is_empty() {
                Ok(None)
            } else {
                parse::<T>(key, value).map(Some)
            }
        }

        match key {
            "model" => self.model = parse_opt(key, value)?,
            "noise_free" => self.noise_free = parse(key, value)?,
            "n" => self.n = parse(key, value)?,
            "beta" => self.beta = parse(key, value)?,
            "overlap" => self.overlap = parse(key, value)?,
            "depth" => self.depth = parse(key, value)?,
            "widths" => self.widths = parse_list(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "batch_size" => self.batch_size = parse(key, value)?,
            "learning_rate" => self.learning_rate = parse(key, value)?,
            "adam_beta1" => self.adam_beta1 = parse(key, value)?,
            "adam_beta2" => self.adam_beta2 = parse(key, value)?,
            "adam_epsilon" => self.adam_epsilon = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "deltas" => self.deltas = parse_list(key, value)?,
            "replications" => self.replications = parse(key, value)?,
            "test_points" => self.test_points = parse(key, value)?,
            "mc_draws" => self.mc_draws = parse(key, value)?,
            "methods" => self.methods = parse_methods(value)?,
            "iterated" => self.iterated = parse(key, value)?,
            "iterated_widths" => self.iterated_widths = parse_list(key, value)?,
            "iterated_epochs" => self.iterated_epochs = parse_opt(key, value)?,
            "alpha" => self.alpha = parse_opt(key, value)?,
            "parallelism" => self.parallelism = parse_opt(key, value)?,
            "b1" => self.b1 = parse_opt(key, value)?,
            "b2" => self.b2 = parse_opt(key, value)?,
            "test_n" => self.test_n = parse(key, value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }
}

pub fn parse_methods(value: &str) -> Result<Vec<IntervalMethod>, String> {
    value
        .split(',')
        .map(|m| match m.trim().to_ascii_lowercase().as_str() {
            "qci1" | "qci-1" => Ok(IntervalMethod::Qci1),
            "qci2" | "qci-2" => Ok(IntervalMethod::Qci2),
            "pci1" | "pci-1" => Ok(IntervalMethod::Pci1),
            "pci2" | "pci-2" => Ok(IntervalMethod::Pci2),
            "pci3" | "pci-3" => Ok(IntervalMethod::Pci3),
            other => Err(format!("unknown interval method `{other}`")),
        })
        .collect()
}
