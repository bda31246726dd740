use std::path::PathBuf;

use ssdnn::subagging::EnsembleArtifact;
use ssdnn::Dataset;

use crate::records::{write_jsonl, PredictRecord};
use crate::CliError;

/// Evaluate a fitted ensemble on a dataset CSV; one JSON line per row.
#[derive(Debug, clap::Args)]
pub struct PredictArgs {
    /// Serialized ensemble from `fit`
    #[arg(long, value_name = "FILE")]
    pub ensemble: PathBuf,
    /// Points to evaluate (CSV with the training schema)
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,
    /// Output JSON-lines (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Include the individual member predictions
    #[arg(long)]
    pub members: bool,
}

pub fn cmd_predict(args: &PredictArgs) -> Result<(), CliError> {
    let artifact = EnsembleArtifact::load(&args.ensemble)?;
    let data = Dataset::read_csv(&args.data)?;
    let means = artifact.ensemble.predict_mean_rows(&data.xs)?;
    let mut records = Vec::with_capacity(data.len());
    for (index, mean) in means.into_iter().enumerate() {
        let members = if args.members {
            Some(artifact.ensemble.predict_members(data.x(index))?)
        } else {
            None
        };
        records.push(PredictRecord {
            index,
            mean,
            members,
        });
    }
    write_jsonl(&records, args.out.as_deref())
}
