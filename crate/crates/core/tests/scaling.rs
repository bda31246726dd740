//! Compute-cost orderings of the two-stage construction, checked as trends
//! at two desk-scale sample sizes (they are cost claims, not exact numbers):
//!
//! - the iterated stage (many very small models) trains faster than the
//!   first stage (fewer, larger models), and
//! - the whole subagging fit trains faster than one whole-sample network
//!   sized to the full sample.

use std::time::Instant;

use ssdnn::nn::{self, NetworkSpec, TrainConfig};
use ssdnn::simgen::{ModelId, SimModel};
use ssdnn::subagging;
use ssdnn::subsampling::BlockPlan;

#[test]
fn iterated_stage_is_cheaper_and_subagging_beats_full_size_baseline() {
    let model = SimModel::new(ModelId::M3, true);
    let beta = 0.7;
    let cfg = TrainConfig {
        epochs: 10,
        seed: 8,
        ..TrainConfig::default()
    };
    let mut ratios = Vec::new();

    for (idx, n) in [2000usize, 8000].into_iter().enumerate() {
        let data = model.generate(n, 70 + idx as u64);
        let plan = BlockPlan::from_beta(n, beta, 1.0).unwrap();
        let spec = NetworkSpec::with_auto_width(model.input_dim(), 3, 1, plan.b).unwrap();
        let ensemble = subagging::fit_subagging(data.view(), &plan, &spec, &cfg).unwrap();

        let inner_plan = plan.iterated(beta).unwrap();
        let inner_spec =
            NetworkSpec::with_auto_width(model.input_dim(), 3, 1, inner_plan.b).unwrap();
        let iterated =
            subagging::fit_iterated(data.view(), &plan, &inner_spec, &cfg, beta).unwrap();

        assert!(
            iterated.total_seconds < ensemble.total_seconds,
            "n = {n}: iterated stage {:.3}s !< first stage {:.3}s",
            iterated.total_seconds,
            ensemble.total_seconds
        );
        ratios.push(iterated.total_seconds / ensemble.total_seconds);

        if n == 8000 {
            // baseline sized to the sample, trained on the whole sample
            let big = NetworkSpec::with_auto_width(model.input_dim(), 3, 1, n).unwrap();
            let t = Instant::now();
            nn::train(&big, data.view(), &cfg).unwrap();
            let baseline = t.elapsed().as_secs_f64();
            assert!(
                ensemble.total_seconds < baseline,
                "n = {n}: subagging {:.3}s !< full-size baseline {:.3}s",
                ensemble.total_seconds,
                baseline
            );
        }
    }
    println!("iterated/first-stage time ratios across n: {ratios:.3?}");
}
