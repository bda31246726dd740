use std::path::PathBuf;
use std::time::Instant;

use ssdnn::metrics;
use ssdnn::nn::{self, NetworkSpec};
use ssdnn::seeding::{self, stream};
use ssdnn::subagging;
use ssdnn::subsampling::BlockPlan;
use ssdnn::Dataset;

use crate::records::{render_bench_table, round_ms, write_jsonl, BenchRow};
use crate::CliError;

use super::{member_spec, require_model, with_parallelism, ConfigArgs};

/// Train the subagging estimator plus five whole-sample baselines and report
/// errors and training time side by side.
#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Benchmark on this dataset instead of generating per-replication data
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// Held-out test CSV (only with --data)
    #[arg(long, value_name = "FILE")]
    pub test: Option<PathBuf>,
    /// Replications (generated data only)
    #[arg(long)]
    pub reps: Option<usize>,
    /// Output JSON-lines (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also print an aligned comparison table to stderr
    #[arg(long)]
    pub table: bool,
}

/// The five whole-sample baselines: same architecture as a subsample member,
/// then deep/wide variants sized to the sample and half the sample.
fn baseline_specs(
    cfg: &crate::config::ExperimentConfig,
    input_dim: usize,
    member: &NetworkSpec,
    n: usize,
) -> Result<Vec<(&'static str, NetworkSpec)>, CliError> {
    Ok(vec![
        ("S-DNN", member.clone()),
        (
            "DNN-deep-1",
            NetworkSpec::with_auto_width(input_dim, cfg.depth, 1, n)?,
        ),
        (
            "DNN-deep-2",
            NetworkSpec::with_auto_width(input_dim, cfg.depth, 1, n / 2)?,
        ),
        (
            "DNN-wide-1",
            NetworkSpec::with_auto_width(input_dim, 1, 1, n)?,
        ),
        (
            "DNN-wide-2",
            NetworkSpec::with_auto_width(input_dim, 1, 1, n / 2)?,
        ),
    ])
}

/// Test-set bundle for one replication: data, optional truth, predictions.
type TestEval<'a> = (&'a Dataset, Option<&'a [f64]>, &'a [f64]);

#[derive(Default, Clone)]
struct Accum {
    mse1: f64,
    mse2: f64,
    mse2_known: bool,
    mspe1: f64,
    mspe2: f64,
    mspe_known: bool,
    seconds: f64,
    sigma2: f64,
    sigma2_known: bool,
    sigma2_test: f64,
    reps: usize,
}

impl Accum {
    fn push(
        &mut self,
        preds: &[f64],
        train: &Dataset,
        train_truth: Option<&[f64]>,
        test: Option<TestEval<'_>>,
        seconds: f64,
    ) -> Result<(), CliError> {
        self.mse1 += metrics::mse_observed(preds, &train.ys)?;
        if let Some(truth) = train_truth {
            let (_, m2) = metrics::mse_pair(preds, &train.ys, truth)?;
            self.mse2 += m2;
            self.mse2_known = true;
        }
        if let Some(eps) = &train.eps {
            self.sigma2 += metrics::sigma2_hat(eps)?;
            self.sigma2_known = true;
        }
        if let Some((test_data, test_truth, test_preds)) = test {
            self.mspe1 += metrics::mse_observed(test_preds, &test_data.ys)?;
            if let Some(truth) = test_truth {
                let (_, m2) = metrics::mse_pair(test_preds, &test_data.ys, truth)?;
                self.mspe2 += m2;
                self.mspe_known = true;
            }
            if let Some(eps) = &test_data.eps {
                self.sigma2_test += metrics::sigma2_hat(eps)?;
            }
        }
        self.seconds += seconds;
        self.reps += 1;
        Ok(())
    }

    fn into_row(self, estimator: &str, spec: &NetworkSpec, has_test: bool) -> BenchRow {
        let r = self.reps.max(1) as f64;
        BenchRow {
            estimator: estimator.to_string(),
            widths: spec.hidden_widths.clone(),
            param_count: spec.param_count(),
            replications: self.reps,
            mse1: self.mse1 / r,
            mse2: self.mse2_known.then_some(self.mse2 / r),
            mspe1: has_test.then_some(self.mspe1 / r),
            mspe2: (has_test && self.mspe_known).then_some(self.mspe2 / r),
            sigma2_hat: self.sigma2_known.then_some(self.sigma2 / r),
            sigma2_hat_test: (has_test && self.sigma2_known).then_some(self.sigma2_test / r),
            train_seconds: round_ms(self.seconds / r),
        }
    }
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let mut cfg = args.config.resolve()?;
    if let Some(reps) = args.reps {
        cfg.replications = reps;
    }

    // Resolve replication datasets: either one fixed CSV or model-generated
    // samples with a fresh seed per replication.
    enum Source {
        Fixed(Box<(Dataset, Option<Dataset>)>),
        Generated(ssdnn::simgen::SimModel),
    }
    let (source, reps) = match &args.data {
        Some(path) => {
            let train = Dataset::read_csv(path)?;
            let test = args.test.as_ref().map(Dataset::read_csv).transpose()?;
            (Source::Fixed(Box::new((train, test))), 1)
        }
        None => (
            Source::Generated(require_model(&cfg)?),
            cfg.replications.max(1),
        ),
    };

    let mut ss_accum = Accum::default();
    let mut base_accums: Vec<Accum> = Vec::new();
    let mut ss_spec_out: Option<NetworkSpec> = None;
    let mut base_specs_out: Vec<(&'static str, NetworkSpec)> = Vec::new();
    let mut has_test = false;

    for rep in 0..reps {
        let rep_seed = seeding::mix_seed(cfg.seed, stream::REPLICATION + rep as u64);
        let (train, test) = match &source {
            Source::Fixed(boxed) => (boxed.0.clone(), boxed.1.clone()),
            Source::Generated(model) => (
                model.generate(cfg.n, rep_seed),
                (cfg.test_n > 0).then(|| model.fixed_test_points(cfg.test_n, rep_seed)),
            ),
        };
        has_test = test.is_some();
        let train_truth = train.true_values();
        let test_truth = test.as_ref().and_then(Dataset::true_values);

        let plan = BlockPlan::from_beta(train.len(), cfg.beta, cfg.overlap)?;
        let member = member_spec(&cfg, train.input_dim, plan.b)?;
        let baselines = baseline_specs(&cfg, train.input_dim, &member, train.len())?;
        if base_accums.is_empty() {
            base_accums = vec![Accum::default(); baselines.len()];
        }

        // subagging estimator
        let train_cfg = cfg.train_config().with_seed(rep_seed);
        let ensemble = with_parallelism(cfg.parallelism, || {
            subagging::fit_subagging(train.view(), &plan, &member, &train_cfg)
        })??;
        let preds = ensemble.predict_mean_rows(&train.xs)?;
        let test_bundle = match &test {
            Some(t) => Some((t, test_truth.as_deref(), ensemble.predict_mean_rows(&t.xs)?)),
            None => None,
        };
        ss_accum.push(
            &preds,
            &train,
            train_truth.as_deref(),
            test_bundle
                .as_ref()
                .map(|(t, tt, p)| (*t, *tt, p.as_slice())),
            ensemble.total_seconds,
        )?;
        ss_spec_out = Some(member.clone());

        // whole-sample baselines
        for (idx, (name, spec)) in baselines.iter().enumerate() {
            let seed = seeding::mix_seed(rep_seed, stream::BASELINE + idx as u64);
            let bl_cfg = cfg.train_config().with_seed(seed);
            let t = Instant::now();
            let params = nn::train(spec, train.view(), &bl_cfg)?;
            let seconds = t.elapsed().as_secs_f64();
            let preds = params.forward_scalar_rows(&train.xs)?;
            let test_bundle = match &test {
                Some(td) => Some((
                    td,
                    test_truth.as_deref(),
                    params.forward_scalar_rows(&td.xs)?,
                )),
                None => None,
            };
            base_accums[idx].push(
                &preds,
                &train,
                train_truth.as_deref(),
                test_bundle
                    .as_ref()
                    .map(|(t, tt, p)| (*t, *tt, p.as_slice())),
                seconds,
            )?;
            if rep == 0 {
                base_specs_out.push((name, spec.clone()));
            }
        }
    }

    let ss_spec = ss_spec_out.expect("at least one replication");
    let mut rows = vec![ss_accum.into_row("SS-DNN", &ss_spec, has_test)];
    for (accum, (name, spec)) in base_accums.into_iter().zip(&base_specs_out) {
        rows.push(accum.into_row(name, spec, has_test));
    }

    if args.table {
        eprint!("{}", render_bench_table(&rows));
    }
    write_jsonl(&rows, args.out.as_deref())
}
