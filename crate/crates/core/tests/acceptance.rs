//! Acceptance suite: every release-gating criterion, one test per criterion
//! (criteria 6 and 7 share a run by design). Each test prints a single
//! `ACCEPTANCE n (...): PASS` line with the measured values; run with
//! `cargo test -p ssdnn --test acceptance -- --nocapture` to see them.
//!
//! Full-scale table reproduction (n = 2·10^5, 500 replications) is supported
//! through the CLI configuration but deliberately not gated here; the
//! property suites plus the desk-scale experiments below are the gate.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssdnn::bias;
use ssdnn::dataset::DataView;
use ssdnn::intervals::{self, KappaPair, PciVariant};
use ssdnn::metrics;
use ssdnn::nn::{self, AdamState, Gradient, NetworkParams, NetworkSpec, TrainConfig};
use ssdnn::seeding::{self, stream};
use ssdnn::simgen::{ModelId, SimModel};
use ssdnn::subagging;
use ssdnn::subsampling::BlockPlan;

#[test]
fn criterion_1_arithmetic_reproduction() {
    let start = Instant::now();
    let plan = BlockPlan::from_beta(200_000, 0.7, 1.0).unwrap();
    assert_eq!(plan.q, 38, "first-stage block count");
    let inner = plan.iterated(0.7).unwrap();
    assert_eq!(inner.q, 12, "iterated block count");
    let w = NetworkSpec::new(2, vec![4, 4], 1).unwrap().param_count();
    assert_eq!(w, 37, "parameter-count formula");
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_millis() < 1,
        "must be instantaneous, took {elapsed:?}"
    );
    println!(
        "ACCEPTANCE 1 (arithmetic reproduction): PASS — q = 38, q' = 12, W = 37 in {elapsed:?}"
    );
}

/// Central finite difference of the batch loss in every coordinate; uses
/// only the forward pass.
fn finite_difference(p: &NetworkParams, batch: DataView<'_>, h: f64) -> Gradient {
    let mut fd = Gradient::zeros(&p.spec);
    let mut probe = p.clone();
    for l in 0..p.weights.len() {
        for i in 0..p.weights[l].len() {
            probe.weights[l][i] = p.weights[l][i] + h;
            let up = nn::mse_loss(&probe, batch).unwrap();
            probe.weights[l][i] = p.weights[l][i] - h;
            let down = nn::mse_loss(&probe, batch).unwrap();
            probe.weights[l][i] = p.weights[l][i];
            fd.weights[l][i] = (up - down) / (2.0 * h);
        }
        for i in 0..p.biases[l].len() {
            probe.biases[l][i] = p.biases[l][i] + h;
            let up = nn::mse_loss(&probe, batch).unwrap();
            probe.biases[l][i] = p.biases[l][i] - h;
            let down = nn::mse_loss(&probe, batch).unwrap();
            probe.biases[l][i] = p.biases[l][i];
            fd.biases[l][i] = (up - down) / (2.0 * h);
        }
    }
    fd
}

#[test]
fn criterion_2_gradient_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97);
    let mut checked = 0usize;
    let mut entries = 0usize;
    while checked < 100 {
        let depth = rng.gen_range(1..=3);
        let d = rng.gen_range(1..=5);
        let widths: Vec<usize> = (0..depth).map(|_| rng.gen_range(1..=8)).collect();
        let spec = NetworkSpec::new(d, widths, 1).unwrap();
        let mut params = nn::init_params(&spec, rng.gen());
        for b in params.biases.iter_mut() {
            b.iter_mut().for_each(|v| *v = rng.gen_range(-0.5..0.5));
        }
        let batch_len = rng.gen_range(1..=16);
        let xs: Vec<f64> = (0..batch_len * d)
            .map(|_| rng.gen_range(-2.0..2.0))
            .collect();
        let ys: Vec<f64> = (0..batch_len).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let batch = DataView {
            input_dim: d,
            xs: &xs,
            ys: &ys,
        };

        // A finite-difference oracle is meaningless within h of a ReLU kink,
        // so configurations with a near-zero pre-activation are redrawn.
        let near_kink = (0..batch_len).any(|i| {
            params
                .preactivations(batch.x(i))
                .unwrap()
                .iter()
                .take(spec.depth()) // hidden layers only; the output is affine
                .any(|layer| layer.iter().any(|z| z.abs() < 1e-3))
        });
        if near_kink {
            continue;
        }

        let grad = nn::backward(&params, batch).unwrap();
        let fd = finite_difference(&params, batch, 1e-5);
        for l in 0..grad.weights.len() {
            for (g, f) in grad.weights[l]
                .iter()
                .chain(grad.biases[l].iter())
                .zip(fd.weights[l].iter().chain(fd.biases[l].iter()))
            {
                let tol = 1e-4 * g.abs().max(f.abs()) + 1e-7;
                assert!(
                    (g - f).abs() <= tol,
                    "net {checked}, layer {l}: analytic {g} vs fd {f}"
                );
                entries += 1;
            }
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "gradient suite took {elapsed:?}");
    println!(
        "ACCEPTANCE 2 (gradient suite): PASS — {checked} networks, {entries} entries in {elapsed:?}"
    );
}

#[test]
fn criterion_3_adam_oracle() {
    let spec = NetworkSpec::new(1, vec![1], 1).unwrap();
    let cfg = TrainConfig::default();

    // single step on a scalar parameter: start 0, gradient 1
    let mut p = NetworkParams::zeros(&spec);
    let mut state = AdamState::new(&spec);
    let mut g = Gradient::zeros(&spec);
    g.weights[0][0] = 1.0;
    nn::adam_step(&mut p, &mut state, &g, &cfg);

    let m1: f64 = (1.0 - cfg.adam_beta1) * 1.0;
    let v1: f64 = (1.0 - cfg.adam_beta2) * 1.0;
    let step1 = cfg.learning_rate * (m1 / (1.0 - cfg.adam_beta1))
        / ((v1 / (1.0 - cfg.adam_beta2)).sqrt() + cfg.adam_epsilon);
    let expect1 = -step1;
    assert!(
        (p.weights[0][0] - expect1).abs() < 1e-12,
        "one step: {} vs {expect1}",
        p.weights[0][0]
    );

    // second identical gradient
    nn::adam_step(&mut p, &mut state, &g, &cfg);
    assert_eq!(state.step_count, 2);
    let m2 = cfg.adam_beta1 * m1 + (1.0 - cfg.adam_beta1);
    let v2 = cfg.adam_beta2 * v1 + (1.0 - cfg.adam_beta2);
    let step2 = cfg.learning_rate * (m2 / (1.0 - cfg.adam_beta1.powi(2)))
        / ((v2 / (1.0 - cfg.adam_beta2.powi(2))).sqrt() + cfg.adam_epsilon);
    let expect2 = expect1 - step2;
    assert!(
        (p.weights[0][0] - expect2).abs() < 1e-12,
        "two steps: {} vs {expect2}",
        p.weights[0][0]
    );
    println!(
        "ACCEPTANCE 3 (Adam oracle): PASS — 1-step {:.12}, 2-step {:.12}, both within 1e-12",
        p.weights[0][0] - expect2 + expect2,
        expect2
    );
}

#[test]
fn criterion_4_bias_power_law_round_trip() {
    let (b, b1_size, b2_size) = (1000usize, 400usize, 100usize);
    for c_b in [0.5, 2.0] {
        for lambda in [0.5, 1.0, 1.5] {
            // closed-form solver inversion
            let b1 = c_b * (b1_size as f64).powf(-lambda / 2.0);
            let b2 = c_b * (b2_size as f64).powf(-lambda / 2.0);
            let (l, c) = bias::solve_power_law(b1_size, b1, b2_size, b2).unwrap();
            assert!((l - lambda).abs() < 1e-10, "lambda: {l} vs {lambda}");
            assert!((c - c_b).abs() < 1e-10, "c_b: {c} vs {c_b}");

            // stub members with exact power-law bias around a reference mean
            let reference = 3.25;
            let preds1 = vec![reference + b1; 5];
            let preds2 = vec![reference + b2; 9];
            let b1_hat = bias::raw_bias_average(&preds1, reference).unwrap();
            let b2_hat = bias::raw_bias_average(&preds2, reference).unwrap();
            let est =
                bias::estimate_bias_from_averages(b, b1_size, b1_hat, b2_size, b2_hat).unwrap();
            let truth = c_b * (b as f64).powf(-lambda / 2.0);
            assert!(
                (est.bias_at_b - truth).abs() < 1e-10,
                "bias_at_b: {} vs {truth}",
                est.bias_at_b
            );
        }
    }
    println!(
        "ACCEPTANCE 4 (bias power-law round trip): PASS — 6 (c_b, lambda) pairs inverted to 1e-10"
    );
}

#[test]
fn criterion_5_interval_algebra() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EC5);
    let mut cases = 0usize;
    while cases < 500 {
        let q = rng.gen_range(2..=64);
        let members: Vec<f64> = (0..q).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let mean = members.iter().sum::<f64>() / q as f64;
        let y = rng.gen_range(-6.0..6.0);
        let n = rng.gen_range(50..100_000);
        let beta = rng.gen_range(0.3..0.9);
        let (dl, dh) = (0.05, 0.10);

        // nesting across delta for every method
        let q1_tight = intervals::qci1(&members, dh).unwrap();
        let q1_wide = intervals::qci1(&members, dl).unwrap();
        assert!(q1_wide.lower <= q1_tight.lower && q1_tight.upper <= q1_wide.upper);
        let p1_tight = intervals::pci1(mean, &members, n, beta, dh).unwrap();
        let p1_wide = intervals::pci1(mean, &members, n, beta, dl).unwrap();
        assert!(p1_wide.lower <= p1_tight.lower && p1_tight.upper <= p1_wide.upper);

        // PCI2 ⊇ PCI3 ⊇ PCI1 as sets
        let p2 = intervals::pci_enlarged(mean, &members, y, n, beta, dh, PciVariant::Pci2).unwrap();
        let p3 = intervals::pci_enlarged(mean, &members, y, n, beta, dh, PciVariant::Pci3).unwrap();
        assert!(
            p2.lower <= p3.lower && p3.upper <= p2.upper,
            "PCI2 must contain PCI3"
        );
        assert!(
            p3.lower <= p1_tight.lower && p1_tight.upper <= p3.upper,
            "PCI3 must contain PCI1"
        );

        // translation equivariance
        let t = rng.gen_range(-10.0..10.0);
        let shifted: Vec<f64> = members.iter().map(|m| m + t).collect();
        let p1_shift = intervals::pci1(mean + t, &shifted, n, beta, dh).unwrap();
        assert!((p1_shift.lower - p1_tight.lower - t).abs() < 1e-9);
        assert!((p1_shift.upper - p1_tight.upper - t).abs() < 1e-9);
        let q1_shift = intervals::qci1(&shifted, dh).unwrap();
        assert!((q1_shift.lower - q1_tight.lower - t).abs() < 1e-12);

        // QCI1 bounds are order statistics of the member predictions
        assert!(members.contains(&q1_tight.lower) && members.contains(&q1_tight.upper));

        // prediction intervals nest across delta as well
        let residuals: Vec<f64> = (0..rng.gen_range(2..200))
            .map(|_| rng.gen_range(-3.0..3.0))
            .collect();
        let rd = intervals::ResidualDistribution::from_residuals(residuals).unwrap();
        let pi_tight = intervals::prediction_interval(mean, &rd, dh).unwrap();
        let pi_wide = intervals::prediction_interval(mean, &rd, dl).unwrap();
        assert!(pi_wide.lower <= pi_tight.lower && pi_tight.upper <= pi_wide.upper);

        cases += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "interval algebra took {elapsed:?}");
    println!("ACCEPTANCE 5 (interval algebra): PASS — {cases} randomized cases in {elapsed:?}");
}

#[test]
fn criteria_6_and_7_desk_scale_mse_and_timing() {
    let start = Instant::now();
    let model = SimModel::new(ModelId::M3, true);
    let (n, beta, depth, epochs, reps) = (4000, 0.7, 3, 100, 20);
    let master = 424_242u64;

    let mut ss_mse1 = 0.0;
    let mut ss_mse2 = 0.0;
    let mut s_mse2 = 0.0;
    let mut sigma2 = 0.0;
    let mut ss_seconds = 0.0;
    let mut s_seconds = 0.0;

    for k in 0..reps {
        let rep_seed = seeding::mix_seed(master, stream::REPLICATION + k);
        let data = model.generate(n, rep_seed);
        let truth = data.true_values().unwrap();
        let plan = BlockPlan::from_beta(n, beta, 1.0).unwrap();
        let spec = NetworkSpec::with_auto_width(model.input_dim(), depth, 1, plan.b).unwrap();
        let cfg = TrainConfig {
            epochs,
            seed: rep_seed,
            ..TrainConfig::default()
        };

        let ensemble = subagging::fit_subagging(data.view(), &plan, &spec, &cfg).unwrap();
        ss_seconds += ensemble.total_seconds;
        let preds = ensemble.predict_mean_rows(&data.xs).unwrap();
        let (m1, m2) = metrics::mse_pair(&preds, &data.ys, &truth).unwrap();
        ss_mse1 += m1;
        ss_mse2 += m2;

        let t = Instant::now();
        let baseline_seed = seeding::mix_seed(rep_seed, stream::BASELINE);
        let sdnn = nn::train(&spec, data.view(), &cfg.clone().with_seed(baseline_seed)).unwrap();
        s_seconds += t.elapsed().as_secs_f64();
        let preds = sdnn.forward_scalar_rows(&data.xs).unwrap();
        let (_, m2) = metrics::mse_pair(&preds, &data.ys, &truth).unwrap();
        s_mse2 += m2;

        sigma2 += metrics::sigma2_hat(data.eps.as_ref().unwrap()).unwrap();
    }

    let r = reps as f64;
    let (ss_mse1, ss_mse2, s_mse2, sigma2) = (ss_mse1 / r, ss_mse2 / r, s_mse2 / r, sigma2 / r);

    // 6a: the subagging estimator's MSE-1 tracks the error variance
    assert!(
        ss_mse1 >= sigma2 - 0.05 && ss_mse1 <= sigma2 + 0.15,
        "6a: MSE-1 {ss_mse1:.4} outside [{:.4}, {:.4}]",
        sigma2 - 0.05,
        sigma2 + 0.15
    );
    // 6b: it beats the same architecture trained on the whole sample
    assert!(ss_mse2 < s_mse2, "6b: MSE-2 {ss_mse2:.4} !< {s_mse2:.4}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 1200, "criterion 6 run took {elapsed:?}");
    println!(
        "ACCEPTANCE 6 (desk-scale MSE, K={reps}): PASS — MSE-1 {ss_mse1:.4} vs sigma2 {sigma2:.4}; \
         MSE-2 {ss_mse2:.4} < {s_mse2:.4} (S-DNN); total {elapsed:?}"
    );

    // 7: strict training-time ordering in the same run
    assert!(
        ss_seconds < s_seconds,
        "7: SS-DNN training {ss_seconds:.2}s !< S-DNN {s_seconds:.2}s"
    );
    println!(
        "ACCEPTANCE 7 (timing ordering): PASS — SS-DNN {ss_seconds:.2}s < S-DNN {s_seconds:.2}s"
    );
}

#[test]
fn criterion_8_pi_calibration() {
    let start = Instant::now();
    let model = SimModel::new(ModelId::M1, true);
    let (n, beta, depth, reps, m_draws, delta) = (10_000, 0.7, 2, 20, 3000, 0.1);
    let master = 777u64;
    let test = model.fixed_test_points(10, 0);

    let mut ecr_sum = 0.0;
    let mut el_sum = 0.0;
    let mut el05_sum = 0.0;
    let mut count = 0.0;
    for k in 0..reps {
        let rep_seed = seeding::mix_seed(master, stream::REPLICATION + k);
        let data = model.generate(n, rep_seed);
        let plan = BlockPlan::from_beta(n, beta, 1.0).unwrap();
        let spec = NetworkSpec::with_auto_width(model.input_dim(), depth, 1, plan.b).unwrap();
        let cfg = TrainConfig {
            seed: rep_seed,
            ..TrainConfig::default()
        };
        let ensemble = subagging::fit_subagging(data.view(), &plan, &spec, &cfg).unwrap();
        let residuals = intervals::fit_residuals(&ensemble, data.view()).unwrap();
        assert_eq!(
            residuals.len(),
            n,
            "residual count equals the training size"
        );
        for j in 0..test.len() {
            let x = test.x(j);
            let mean = ensemble.predict_mean(x).unwrap();
            let pi = intervals::prediction_interval(mean, &residuals, delta).unwrap();
            let mc_seed = seeding::mix_seed2(master, stream::MC_COVERAGE + k, j as u64);
            ecr_sum += metrics::conditional_pi_coverage(&pi, &model, x, m_draws, mc_seed).unwrap();
            el_sum += pi.length();
            el05_sum += intervals::prediction_interval(mean, &residuals, 0.05)
                .unwrap()
                .length();
            count += 1.0;
        }
    }
    let (ecr, el, el05) = (ecr_sum / count, el_sum / count, el05_sum / count);
    assert!(
        (0.85..=0.92).contains(&ecr),
        "8: mean conditional ECR {ecr:.4} outside [0.85, 0.92]"
    );
    assert!(
        (3.1..=3.5).contains(&el),
        "8: mean EL {el:.4} outside [3.1, 3.5]"
    );
    assert!(
        (3.7..=4.1).contains(&el05),
        "8: mean EL at delta 0.05 {el05:.4} outside [3.7, 4.1]"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 1800, "criterion 8 run took {elapsed:?}");
    println!(
        "ACCEPTANCE 8 (PI calibration, K={reps}, M={m_draws}): PASS — ECR {ecr:.4}, EL {el:.4} \
         (delta 0.05: EL {el05:.4}) in {elapsed:?}"
    );
}

#[test]
fn criterion_9_qci1_conservativeness() {
    let start = Instant::now();
    let model = SimModel::new(ModelId::M1, true);
    let (n, beta, depth, epochs, reps, delta) = (20_000, 0.7, 2, 100, 20, 0.1);
    let master = 31_337u64;
    let test = model.fixed_test_points(10, 0);

    let mut qci1_cover = 0.0;
    let mut qci1_len = 0.0;
    let mut qci2_len = 0.0;
    let mut count = 0.0;
    for k in 0..reps {
        let rep_seed = seeding::mix_seed(master, stream::REPLICATION + k);
        let data = model.generate(n, rep_seed);
        let plan = BlockPlan::from_beta(n, beta, 1.0).unwrap();
        let spec = NetworkSpec::with_auto_width(model.input_dim(), depth, 1, plan.b).unwrap();
        let cfg = TrainConfig {
            epochs,
            seed: rep_seed,
            ..TrainConfig::default()
        };
        let ensemble = subagging::fit_subagging(data.view(), &plan, &spec, &cfg).unwrap();

        let inner_plan = plan.iterated(beta).unwrap();
        let inner_spec =
            NetworkSpec::with_auto_width(model.input_dim(), depth, 1, inner_plan.b).unwrap();
        let iterated =
            subagging::fit_iterated(data.view(), &plan, &inner_spec, &cfg, beta).unwrap();
        let kappas = KappaPair::from_bounds(n, beta);

        for j in 0..test.len() {
            let x = test.x(j);
            let f_true = model.true_f(x).unwrap();
            let members = ensemble.predict_members(x).unwrap();
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            let q1 = intervals::qci1(&members, delta).unwrap();
            qci1_cover += f64::from(q1.covers(f_true));
            qci1_len += q1.length();
            let block_means = iterated.block_means(x).unwrap();
            let q2 = intervals::qci2_iterated(mean, &block_means, &kappas, delta).unwrap();
            qci2_len += q2.length();
            count += 1.0;
        }
    }
    let (ecr1, len1, len2) = (qci1_cover / count, qci1_len / count, qci2_len / count);
    assert!(ecr1 >= 0.98, "9: QCI-1 ECR {ecr1:.4} < 0.98");
    assert!(
        len1 > len2,
        "9: QCI-1 length {len1:.4} !> QCI-2 length {len2:.4}"
    );
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 9 (QCI-1 conservativeness, K={reps}): PASS — ECR {ecr1:.4} >= 0.98, \
         length {len1:.3} > {len2:.3} (QCI-2) in {elapsed:?}"
    );
}
