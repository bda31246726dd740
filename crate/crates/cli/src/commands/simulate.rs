use std::path::PathBuf;

use crate::CliError;

use super::{require_model, ConfigArgs};

/// Generate a dataset CSV (`x1..xd,y,eps`) from one of the simulation
/// models, or the fixed held-out test points with `--test-points`.
#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Output CSV path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Emit this many fixed test points instead of a training sample
    #[arg(long, value_name = "COUNT")]
    pub test_points: Option<usize>,
    /// Seed for the fixed test-point stream
    #[arg(long, default_value_t = 0)]
    pub test_seed: u64,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let cfg = args.config.resolve()?;
    let model = require_model(&cfg)?;
    let data = match args.test_points {
        Some(count) => model.fixed_test_points(count, args.test_seed),
        None => model.generate(cfg.n, cfg.seed),
    };
    data.write_csv(&args.out)?;
    Ok(())
}
