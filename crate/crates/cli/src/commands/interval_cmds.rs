use std::path::PathBuf;

use ssdnn::intervals::{self, IntervalMethod, KappaPair, PciVariant};
use ssdnn::seeding::{self, stream};
use ssdnn::subagging::EnsembleArtifact;
use ssdnn::Dataset;

use crate::records::{write_jsonl, IntervalRecord};
use crate::CliError;

use super::{require_model, true_values, ConfigArgs};

/// Confidence intervals for the regression function at test points; one JSON
/// line per (point, method, delta).
#[derive(Debug, clap::Args)]
pub struct CiArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Serialized ensemble from `fit`
    #[arg(long, value_name = "FILE")]
    pub ensemble: PathBuf,
    /// Test points CSV
    #[arg(long, value_name = "FILE")]
    pub test: PathBuf,
    /// Interval methods, comma separated (qci1,qci2,pci1,pci2,pci3)
    #[arg(long)]
    pub methods: Option<String>,
    /// Output JSON-lines (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

pub fn cmd_ci(args: &CiArgs) -> Result<(), CliError> {
    let mut cfg = args.config.resolve()?;
    if let Some(m) = &args.methods {
        cfg.methods = crate::config::parse_methods(m).map_err(CliError::Usage)?;
    }
    let artifact = EnsembleArtifact::load(&args.ensemble)?;
    let ensemble = &artifact.ensemble;
    let test = Dataset::read_csv(&args.test)?;
    if test.input_dim != ensemble.spec.input_dim {
        return Err(CliError::Data(format!(
            "test data dimension {} does not match the ensemble's {}",
            test.input_dim, ensemble.spec.input_dim
        )));
    }

    let wants_qci2 = cfg.methods.contains(&IntervalMethod::Qci2);
    if wants_qci2 && artifact.iterated.is_none() {
        return Err(CliError::Usage(
            "QCI2 requires the iterated stage: refit with --iterated".into(),
        ));
    }
    let model = cfg
        .model
        .map(|id| ssdnn::simgen::SimModel::new(id, !cfg.noise_free));
    let targets = true_values(&test, model.as_ref())?;
    let n = ensemble.plan.n;
    let kappas = match cfg.alpha {
        Some(a) => KappaPair::from_alpha(n, artifact.beta, a),
        None => KappaPair::from_bounds(n, artifact.beta),
    };

    let mut records = Vec::new();
    for i in 0..test.len() {
        let x = test.x(i);
        let members = ensemble.predict_members(x)?;
        let mean = members.iter().sum::<f64>() / members.len() as f64;
        let block_means = match &artifact.iterated {
            Some(it) if wants_qci2 => Some(it.block_means(x)?),
            _ => None,
        };
        for &method in &cfg.methods {
            for &delta in &cfg.deltas {
                let interval = match method {
                    IntervalMethod::Qci1 => intervals::qci1(&members, delta)?,
                    IntervalMethod::Pci1 => {
                        intervals::pci1(mean, &members, n, artifact.beta, delta)?
                    }
                    IntervalMethod::Pci2 => intervals::pci_enlarged(
                        mean,
                        &members,
                        test.ys[i],
                        n,
                        artifact.beta,
                        delta,
                        PciVariant::Pci2,
                    )?,
                    IntervalMethod::Pci3 => intervals::pci_enlarged(
                        mean,
                        &members,
                        test.ys[i],
                        n,
                        artifact.beta,
                        delta,
                        PciVariant::Pci3,
                    )?,
                    IntervalMethod::Qci2 => intervals::qci2_iterated(
                        mean,
                        block_means.as_ref().expect("checked above"),
                        &kappas,
                        delta,
                    )?,
                    IntervalMethod::Pi => {
                        return Err(CliError::Usage(
                            "PI is produced by the `pi` subcommand, not `ci`".into(),
                        ))
                    }
                };
                records.push(IntervalRecord {
                    point_index: i,
                    method,
                    delta,
                    lower: interval.lower,
                    upper: interval.upper,
                    covered: targets.as_ref().map(|t| interval.covers(t[i])),
                    length: interval.length(),
                    ecr_mc: None,
                });
            }
        }
    }
    write_jsonl(&records, args.out.as_deref())
}

/// Prediction intervals for future responses at test points, from the
/// residuals of the training data.
#[derive(Debug, clap::Args)]
pub struct PiArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Serialized ensemble from `fit`
    #[arg(long, value_name = "FILE")]
    pub ensemble: PathBuf,
    /// The data the ensemble was trained on (residual source)
    #[arg(long, value_name = "FILE")]
    pub train: PathBuf,
    /// Test points CSV
    #[arg(long, value_name = "FILE")]
    pub test: PathBuf,
    /// Also estimate conditional coverage by Monte Carlo (needs --model)
    #[arg(long)]
    pub coverage: bool,
    /// Output JSON-lines (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

pub fn cmd_pi(args: &PiArgs) -> Result<(), CliError> {
    let cfg = args.config.resolve()?;
    let artifact = EnsembleArtifact::load(&args.ensemble)?;
    let ensemble = &artifact.ensemble;
    let train = Dataset::read_csv(&args.train)?;
    let test = Dataset::read_csv(&args.test)?;
    let residuals = intervals::fit_residuals(ensemble, train.view())?;
    let model = if args.coverage {
        Some(require_model(&cfg)?)
    } else {
        None
    };

    let mut records = Vec::new();
    for i in 0..test.len() {
        let x = test.x(i);
        let mean = ensemble.predict_mean(x)?;
        for &delta in &cfg.deltas {
            let interval = intervals::prediction_interval(mean, &residuals, delta)?;
            let ecr_mc = match &model {
                Some(m) => Some(ssdnn::metrics::conditional_pi_coverage(
                    &interval,
                    m,
                    x,
                    cfg.mc_draws,
                    seeding::mix_seed2(cfg.seed, stream::MC_COVERAGE, i as u64),
                )?),
                None => None,
            };
            records.push(IntervalRecord {
                point_index: i,
                method: IntervalMethod::Pi,
                delta,
                lower: interval.lower,
                upper: interval.upper,
                covered: Some(interval.covers(test.ys[i])),
                length: interval.length(),
                ecr_mc,
            });
        }
    }
    write_jsonl(&records, args.out.as_deref())
}
