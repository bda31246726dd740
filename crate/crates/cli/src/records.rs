//! Output records (JSON-lines) and the aligned-table renderer.

use std::io::Write;

use serde::Serialize;
use ssdnn::intervals::IntervalMethod;
use ssdnn::metrics::{CoverageReport, ErrorReport};

use crate::config::ExperimentConfig;
use crate::CliError;

/// One confidence- or prediction-interval evaluation at a test point.
#[derive(Debug, Clone, Serialize)]
pub struct IntervalRecord {
    pub point_index: usize,
    pub method: IntervalMethod,
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
    /// Whether the target (true regression value for CIs, observed response
    /// for PIs) falls inside; absent when no target is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covered: Option<bool>,
    pub length: f64,
    /// Monte Carlo conditional coverage (PI only, when requested).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ecr_mc: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictRecord {
    pub index: usize,
    pub mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<f64>>,
}

/// Wall-clock per phase, seconds at millisecond resolution.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PhaseTimings {
    pub first_stage_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterated_stage_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervals_s: Option<f64>,
}

pub fn round_ms(seconds: f64) -> f64 {
    (seconds * 1000.0).round() / 1000.0
}

/// Everything one run produced. Re-running with the same config reproduces
/// every field except the timings.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub n: usize,
    pub plan: ssdnn::BlockPlan,
    pub widths: Vec<usize>,
    pub param_count: usize,
    pub errors: ErrorReport,
    pub coverage: Vec<CoverageReport>,
    pub wall_clock: PhaseTimings,
    pub member_seeds: Vec<u64>,
}

/// One estimator's row in a benchmark comparison.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub estimator: String,
    pub widths: Vec<usize>,
    pub param_count: usize,
    pub replications: usize,
    pub mse1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mse2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mspe1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mspe2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2_hat_test: Option<f64>,
    pub train_seconds: f64,
}

/// Write records as JSON-lines to `path`, or stdout when `None`.
pub fn write_jsonl<T: Serialize>(
    records: &[T],
    path: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let mut buf = String::new();
    for r in records {
        buf.push_str(&serde_json::to_string(r).map_err(|e| CliError::Usage(e.to_string()))?);
        buf.push('\n');
    }
    write_out(&buf, path)
}

pub fn write_json<T: Serialize>(
    record: &T,
    path: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let mut buf =
        serde_json::to_string_pretty(record).map_err(|e| CliError::Usage(e.to_string()))?;
    buf.push('\n');
    write_out(&buf, path)
}

fn write_out(text: &str, path: Option<&std::path::Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Data(e.to_string())),
    }
}

/// Aligned text table with estimators as columns, one criterion per row.
pub fn render_bench_table(rows: &[BenchRow]) -> String {
    let fmt_widths = |w: &[usize]| {
        let inner = w.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        format!("[{inner}]")
    };
    let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());

    let mut lines: Vec<(String, Vec<String>)> = vec![
        (
            "Estimator".into(),
            rows.iter().map(|r| r.estimator.clone()).collect(),
        ),
        (
            "Width".into(),
            rows.iter().map(|r| fmt_widths(&r.widths)).collect(),
        ),
        (
            "Size".into(),
            rows.iter().map(|r| r.param_count.to_string()).collect(),
        ),
        (
            "MSE-1".into(),
            rows.iter().map(|r| format!("{:.4}", r.mse1)).collect(),
        ),
        (
            "MSE-2".into(),
            rows.iter().map(|r| fmt_opt(r.mse2)).collect(),
        ),
        (
            "MSPE-1".into(),
            rows.iter().map(|r| fmt_opt(r.mspe1)).collect(),
        ),
        (
            "MSPE-2".into(),
            rows.iter().map(|r| fmt_opt(r.mspe2)).collect(),
        ),
        (
            "Training Time".into(),
            rows.iter()
                .map(|r| format!("{:.3}s", r.train_seconds))
                .collect(),
        ),
    ];
    if let Some(s2) = rows.first().and_then(|r| r.sigma2_hat) {
        lines.insert(
            3,
            ("sigma2_hat".into(), vec![format!("{s2:.4}"); rows.len()]),
        );
    }

    let label_w = lines.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let col_w = lines
        .iter()
        .flat_map(|(_, cells)| cells.iter().map(String::len))
        .max()
        .unwrap_or(8)
        + 2;
    let mut out = String::new();
    for (label, cells) in lines {
        out.push_str(&format!("{label:<label_w$}"));
        for c in cells {
            out.push_str(&format!("{c:>col_w$}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timings_round_to_milliseconds() {
        assert_eq!(round_ms(1.23456), 1.235);
        assert_eq!(round_ms(0.0004), 0.0);
    }

    #[test]
    fn interval_record_schema_fields() {
        let r = IntervalRecord {
            point_index: 3,
            method: IntervalMethod::Qci1,
            delta: 0.1,
            lower: -1.0,
            upper: 2.0,
            covered: Some(true),
            length: 3.0,
            ecr_mc: None,
        };
        let json = serde_json::to_value(&r).unwrap();
        for key in [
            "point_index",
            "method",
            "delta",
            "lower",
            "upper",
            "covered",
            "length",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["method"], "QCI1");
        assert!(json.get("ecr_mc").is_none());
    }

    #[test]
    fn bench_table_is_aligned() {
        let row = |name: &str| BenchRow {
            estimator: name.into(),
            widths: vec![11, 11],
            param_count: 320,
            replications: 1,
            mse1: 1.0,
            mse2: Some(0.05),
            mspe1: None,
            mspe2: None,
            sigma2_hat: Some(1.0),
            sigma2_hat_test: None,
            train_seconds: 1.5,
        };
        let table = render_bench_table(&[row("SS-DNN"), row("S-DNN")]);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 9);
        assert!(lines.iter().all(|l| l.len() == lines[0].len()));
    }
}
