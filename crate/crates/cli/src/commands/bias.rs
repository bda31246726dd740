use std::path::PathBuf;

use ssdnn::bias;
use ssdnn::subsampling::BlockPlan;
use ssdnn::Dataset;

use crate::records::write_json;
use crate::CliError;

use super::{member_spec, with_parallelism, ConfigArgs};

/// Scaling-down bias estimation at a point, or a synthetic round trip of the
/// power-law solver with `--synthetic c_b,lambda`.
#[derive(Debug, clap::Args)]
pub struct BiasArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Training data CSV (required unless --synthetic)
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// Evaluation point, comma separated
    #[arg(long, value_name = "X1,X2,..")]
    pub x: Option<String>,
    /// Bypass training: generate exact power-law averages from `c_b,lambda`
    #[arg(long, value_name = "C_B,LAMBDA")]
    pub synthetic: Option<String>,
    /// Output JSON (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

pub fn cmd_bias(args: &BiasArgs) -> Result<(), CliError> {
    let cfg = args.config.resolve()?;

    if let Some(synth) = &args.synthetic {
        let (c_b, lambda) = synth
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)))
            .ok_or_else(|| CliError::Usage("--synthetic expects `c_b,lambda`".into()))?;
        let plan = BlockPlan::from_beta(cfg.n, cfg.beta, cfg.overlap)?;
        let b1 = cfg.b1.unwrap_or(plan.b / 2);
        let b2 = cfg.b2.unwrap_or(plan.b / 4);
        let b1_hat = c_b * (b1 as f64).powf(-lambda / 2.0);
        let b2_hat = c_b * (b2 as f64).powf(-lambda / 2.0);
        let estimate = bias::estimate_bias_from_averages(plan.b, b1, b1_hat, b2, b2_hat)?;
        return write_json(&estimate, args.out.as_deref());
    }

    let data_path = args
        .data
        .as_ref()
        .ok_or_else(|| CliError::Usage("--data is required without --synthetic".into()))?;
    let x_raw = args
        .x
        .as_ref()
        .ok_or_else(|| CliError::Usage("--x is required without --synthetic".into()))?;
    let x: Vec<f64> = x_raw
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("invalid --x: {e}")))?;

    let data = Dataset::read_csv(data_path)?;
    let plan = BlockPlan::from_beta(data.len(), cfg.beta, cfg.overlap)?;
    let spec = member_spec(&cfg, data.input_dim, plan.b)?;
    let train_cfg = cfg.train_config();
    let (estimate, _ensemble) = with_parallelism(cfg.parallelism, || {
        bias::estimate_bias_fitting(data.view(), &plan, &spec, &train_cfg, &x, cfg.b1, cfg.b2)
    })??;
    write_json(&estimate, args.out.as_deref())
}
