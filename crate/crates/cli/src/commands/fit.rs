use std::path::PathBuf;

use ssdnn::metrics::{self, ErrorReport};
use ssdnn::nn::NetworkSpec;
use ssdnn::subagging::{self, EnsembleArtifact};
use ssdnn::subsampling::BlockPlan;
use ssdnn::Dataset;

use crate::records::{round_ms, write_json, PhaseTimings, RunRecord};
use crate::CliError;

use super::{member_spec, with_parallelism, ConfigArgs};

/// Fit the subagging ensemble on a dataset CSV and write the serialized
/// ensemble plus a run record.
#[derive(Debug, clap::Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Training data CSV
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,
    /// Where to write the serialized ensemble
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Where to write the run record (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub record: Option<PathBuf>,
}

pub fn cmd_fit(args: &FitArgs) -> Result<(), CliError> {
    let cfg = args.config.resolve()?;
    let data = Dataset::read_csv(&args.data)?;
    let plan = BlockPlan::from_beta(data.len(), cfg.beta, cfg.overlap)?;
    let spec = member_spec(&cfg, data.input_dim, plan.b)?;
    let train_cfg = cfg.train_config();

    let ensemble = with_parallelism(cfg.parallelism, || {
        subagging::fit_subagging(data.view(), &plan, &spec, &train_cfg)
    })??;

    let iterated = if cfg.iterated {
        let inner_plan = plan.iterated(cfg.beta)?;
        let inner_spec = if cfg.iterated_widths.is_empty() {
            NetworkSpec::with_auto_width(data.input_dim, cfg.depth, 1, inner_plan.b)?
        } else {
            NetworkSpec::new(data.input_dim, cfg.iterated_widths.clone(), 1)?
        };
        let inner_cfg = cfg.iterated_train_config();
        Some(with_parallelism(cfg.parallelism, || {
            subagging::fit_iterated(data.view(), &plan, &inner_spec, &inner_cfg, cfg.beta)
        })??)
    } else {
        None
    };

    let preds = ensemble.predict_mean_rows(&data.xs)?;
    let mse1 = metrics::mse_observed(&preds, &data.ys)?;
    let (mse2, sigma2) = match (data.true_values(), &data.eps) {
        (Some(truth), Some(eps)) => {
            let (_, m2) = metrics::mse_pair(&preds, &data.ys, &truth)?;
            (Some(m2), Some(metrics::sigma2_hat(eps)?))
        }
        _ => (None, None),
    };

    let record = RunRecord {
        n: data.len(),
        plan,
        widths: spec.hidden_widths.clone(),
        param_count: spec.param_count(),
        errors: ErrorReport {
            mse1,
            mse2,
            mspe1: None,
            mspe2: None,
            sigma2_hat: sigma2,
            sigma2_hat_test: None,
        },
        coverage: Vec::new(),
        wall_clock: PhaseTimings {
            first_stage_s: round_ms(ensemble.total_seconds),
            iterated_stage_s: iterated.as_ref().map(|it| round_ms(it.total_seconds)),
            intervals_s: None,
        },
        member_seeds: ensemble.seeds.clone(),
        config: cfg.clone(),
    };

    let artifact = EnsembleArtifact {
        beta: cfg.beta,
        ensemble,
        iterated,
    };
    artifact.save(&args.out)?;
    write_json(&record, args.record.as_deref())?;
    Ok(())
}
