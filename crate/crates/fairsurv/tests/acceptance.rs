//! Acceptance gate: one numbered check per release criterion, each printing a
//! PASS/FAIL line. Criterion 9 is advisory and depends on user-supplied data;
//! it prints SKIP when the file is absent and never fails the gate.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see every line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fairsurv::augment::{DeltaParams, DEFAULT_EPSILON_ACTIVE};
use fairsurv::commands::{
    run_benchmark, run_evaluate, run_landscape, run_synth, run_train, EvaluateArgs,
};
use fairsurv::dataset::{split, synthesize, Observation, SplitSpec, SurvivalDataset, SynthSpec};
use fairsurv::fairness::{cmi_approx, exact_cmi, NoiseConfig};
use fairsurv::metrics::{auc_at, brier_at, disparity, evaluate, GroupRates, TimePointMetrics};
use fairsurv::model::{AftScale, Model};
use fairsurv::survival::{aft_loss, breslow_baseline, cox_loss, survival_aft};
use fairsurv::train::{
    gd_regularizer, joint_loss, train, Method, Scenario, TrainConfig,
};

/// Print the criterion verdict line, then fail the test if it did not hold.
fn record(number: u32, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {number:2} ({name}): {verdict} — {detail}");
    println!("{line}");
    assert!(pass, "{line}");
}

/// Advisory criteria report a status but never fail the gate.
fn record_advisory(number: u32, name: &str, status: &str, detail: String) {
    println!("criterion {number:2} ({name}): {status} — {detail}");
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

fn max_rel_err(analytic: &[f64], fd: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(fd)
        .map(|(a, f)| (a - f).abs() / a.abs().max(f.abs()).max(1e-4))
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// criterion 1: analytic gradients vs central finite differences
// ---------------------------------------------------------------------------

fn random_survival_inputs(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>, Vec<u8>, Vec<usize>) {
    let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let times: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..5.0)).collect();
    let mut events: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.7))).collect();
    events[0] = 1; // at least one event so Cox is defined
    let z: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    (scores, times, events, z)
}

fn fd_over_scores<F: Fn(&[f64]) -> f64>(scores: &[f64], f: F, h: f64) -> Vec<f64> {
    let mut fd = Vec::with_capacity(scores.len());
    for k in 0..scores.len() {
        let mut plus = scores.to_vec();
        plus[k] += h;
        let mut minus = scores.to_vec();
        minus[k] -= h;
        fd.push((f(&plus) - f(&minus)) / (2.0 * h));
    }
    fd
}

#[test]
fn criterion_01_gradient_correctness() {
    let start = std::time::Instant::now();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut worst_delta: f64 = 0.0;

    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(15..=20);
        let (scores, times, events, z) = random_survival_inputs(&mut rng, n);

        let (_, cox_grad) = cox_loss(&scores, &times, &events).unwrap();
        let fd = fd_over_scores(&scores, |s| cox_loss(s, &times, &events).unwrap().0, h);
        worst = worst.max(max_rel_err(&cox_grad, &fd));

        let log_sigma = rng.gen_range(-0.4..0.4);
        let (_, aft_grad, aft_gls) = aft_loss(&scores, log_sigma, &times, &events).unwrap();
        let fd = fd_over_scores(&scores, |s| aft_loss(s, log_sigma, &times, &events).unwrap().0, h);
        worst = worst.max(max_rel_err(&aft_grad, &fd));
        let fd_gls = (aft_loss(&scores, log_sigma + h, &times, &events).unwrap().0
            - aft_loss(&scores, log_sigma - h, &times, &events).unwrap().0)
            / (2.0 * h);
        worst = worst.max(max_rel_err(&[aft_gls], &[fd_gls]));

        let y_t: Vec<u8> = times.iter().map(|t| u8::from(*t < 2.0)).collect();
        let noise = NoiseConfig::new(10, 1.0, seed).unwrap();
        let (_, cmi_grad) = cmi_approx(&scores, &y_t, &z, &noise).unwrap();
        let fd = fd_over_scores(&scores, |s| cmi_approx(s, &y_t, &z, &noise).unwrap().0, h);
        worst = worst.max(max_rel_err(&cmi_grad, &fd));

        let (_, gd_grad) = gd_regularizer(&scores, &z).unwrap();
        let fd = fd_over_scores(&scores, |s| gd_regularizer(s, &z).unwrap().0, h);
        worst = worst.max(max_rel_err(&gd_grad, &fd));

        // full joint objective: theta, log sigma, and interior-point deltas
        for scenario in [Scenario::LinearCOX, Scenario::LinearAFT] {
            let ds = joint_fixture(&mut rng, n);
            let mut config = TrainConfig::new(scenario, Method::CMIA);
            config.lambda1 = 0.7;
            config.lambda2 = 1e-3;
            config.noise = NoiseConfig::new(10, 1.0, seed).unwrap();
            let noise = config.noise.clone();
            let p = ds.n_features();
            let mut model = Model::linear(p);
            let theta: Vec<f64> = (0..=p).map(|_| rng.gen_range(-0.8..0.8)).collect();
            model.set_params_flat(&theta).unwrap();
            let scale = AftScale { log_sigma: rng.gen_range(-0.3..0.3) };
            let n_censored = ds.observations.iter().filter(|o| o.event == 0).count();
            let deltas = DeltaParams {
                values: (0..n_censored).map(|_| rng.gen_range(0.2..0.5)).collect(),
                epsilon_active: DEFAULT_EPSILON_ACTIVE,
            };

            let eval = joint_loss(&model, Some(&scale), Some(&deltas), &ds, &config, &noise).unwrap();

            let total_at = |th: &[f64], ls: f64, dv: &[f64]| {
                let mut m = model.clone();
                m.set_params_flat(th).unwrap();
                let s = AftScale { log_sigma: ls };
                let d = DeltaParams { values: dv.to_vec(), epsilon_active: DEFAULT_EPSILON_ACTIVE };
                joint_loss(&m, Some(&s), Some(&d), &ds, &config, &noise).unwrap().total
            };

            let mut fd_params = Vec::with_capacity(theta.len());
            for k in 0..theta.len() {
                let mut plus = theta.clone();
                plus[k] += h;
                let mut minus = theta.clone();
                minus[k] -= h;
                fd_params.push(
                    (total_at(&plus, scale.log_sigma, &deltas.values)
                        - total_at(&minus, scale.log_sigma, &deltas.values))
                        / (2.0 * h),
                );
            }
            worst = worst.max(max_rel_err(&eval.grad_params, &fd_params));

            if scenario.is_aft() {
                let fd_ls = (total_at(&theta, scale.log_sigma + h, &deltas.values)
                    - total_at(&theta, scale.log_sigma - h, &deltas.values))
                    / (2.0 * h);
                worst = worst.max(max_rel_err(&[eval.grad_log_sigma], &[fd_ls]));
            }

            let mut fd_deltas = Vec::with_capacity(deltas.values.len());
            for k in 0..deltas.values.len() {
                let mut plus = deltas.values.clone();
                plus[k] += h;
                let mut minus = deltas.values.clone();
                minus[k] -= h;
                fd_deltas.push(
                    (total_at(&theta, scale.log_sigma, &plus)
                        - total_at(&theta, scale.log_sigma, &minus))
                        / (2.0 * h),
                );
            }
            worst_delta = worst_delta.max(max_rel_err(&eval.grad_deltas, &fd_deltas));
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst < 1e-5 && worst_delta < 1e-4 && elapsed < 60.0;
    record(
        1,
        "gradient correctness",
        pass,
        format!("max rel err {worst:.2e}, delta max rel err {worst_delta:.2e}, {elapsed:.1}s"),
    );
}

fn joint_fixture(rng: &mut ChaCha8Rng, n: usize) -> SurvivalDataset {
    let p = 3;
    let observations: Vec<Observation> = (0..n)
        .map(|i| Observation {
            features: (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            time: rng.gen_range(0.5..5.0),
            event: if i < 2 { 1 } else { u8::from(rng.gen_bool(0.6)) },
            group: rng.gen_range(0..2),
        })
        .collect();
    SurvivalDataset::new(
        observations,
        (0..p).map(|j| format!("x{j}")).collect(),
        vec!["a".into(), "b".into()],
        vec![1.0, 2.5],
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// criterion 2: exact CMI non-negativity and conditional-independence zeros
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_exact_cmi_nonnegativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut min_random = f64::INFINITY;
    for _ in 0..1000 {
        let n = rng.gen_range(10..60);
        let yhat: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.5))).collect();
        let y: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.5))).collect();
        let z: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        min_random = min_random.min(exact_cmi(&yhat, &y, &z).unwrap());
    }

    // conditionally independent tables: counts n(yhat, y, z) = a(yhat, y) * b(z)
    let mut max_ci = f64::NEG_INFINITY;
    for _ in 0..100 {
        let a: Vec<Vec<usize>> = (0..2)
            .map(|_| (0..2).map(|_| rng.gen_range(1..5)).collect())
            .collect();
        let b: Vec<usize> = (0..2).map(|_| rng.gen_range(1..4)).collect();
        let mut yhat = Vec::new();
        let mut y = Vec::new();
        let mut z = Vec::new();
        for (p, row) in a.iter().enumerate() {
            for (q, &count_a) in row.iter().enumerate() {
                for (r, &count_b) in b.iter().enumerate() {
                    for _ in 0..count_a * count_b {
                        yhat.push(p as u8);
                        y.push(q as u8);
                        z.push(r);
                    }
                }
            }
        }
        max_ci = max_ci.max(exact_cmi(&yhat, &y, &z).unwrap());
    }

    let pass = min_random >= -1e-12 && max_ci < 1e-12;
    record(
        2,
        "exact CMI non-negativity",
        pass,
        format!("min over random triples {min_random:.2e}, max over independent tables {max_ci:.2e}"),
    );
}

// ---------------------------------------------------------------------------
// criterion 3: kernel CMI consistency against the Gaussian-mixture oracle
// ---------------------------------------------------------------------------

/// Differential entropy of the balanced mixture N(-2, 1) / N(+2, 1) by
/// Simpson integration of -f log f.
fn mixture_entropy() -> f64 {
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let f = |x: f64| 0.5 * (phi(x - 2.0) + phi(x + 2.0));
    let (lo, hi, steps) = (-14.0_f64, 14.0_f64, 14000usize); // even count
    let dx = (hi - lo) / steps as f64;
    let g = |x: f64| {
        let v = f(x);
        if v > 0.0 {
            -v * v.ln()
        } else {
            0.0
        }
    };
    let mut sum = g(lo) + g(hi);
    for k in 1..steps {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * g(lo + dx * k as f64);
    }
    sum * dx / 3.0
}

#[test]
fn criterion_03_kernel_cmi_consistency() {
    let start = std::time::Instant::now();
    // balanced construction: 50 records per (y, z) cell, score +2 for z=0
    // and -2 for z=1, so conditional on either y the noised score is the
    // same two-component mixture and CMI(score+eps, Z | Y) = MI(x, Z).
    let n = 200;
    let mut scores = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for i in 0..n {
        let zi = i % 2;
        y.push(u8::from((i / 2) % 2 == 0));
        z.push(zi);
        scores.push(if zi == 0 { 2.0 } else { -2.0 });
    }

    let gaussian_entropy = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    let oracle = mixture_entropy() - gaussian_entropy;

    let ms = [10usize, 100, 1000, 2000];
    let mut med_err = Vec::new();
    let mut max_err_at_2000: f64 = 0.0;
    for &m in &ms {
        let mut errs = Vec::new();
        for seed in 0..20u64 {
            let noise = NoiseConfig::new(m, 1.0, 100 + seed).unwrap();
            let (value, _) = cmi_approx(&scores, &y, &z, &noise).unwrap();
            errs.push((value - oracle).abs());
        }
        if m == 2000 {
            max_err_at_2000 = errs.iter().cloned().fold(0.0, f64::max);
        }
        med_err.push(median(&errs));
    }

    let elapsed = start.elapsed().as_secs_f64();
    let monotone = med_err.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let tight = *med_err.last().unwrap() < 0.02;
    let pass = monotone && tight && elapsed < 300.0;
    record(
        3,
        "kernel CMI consistency",
        pass,
        format!(
            "oracle {oracle:.4}, median errors {med_err:?} over m={ms:?}, max err at m=2000 {max_err_at_2000:.4}, {elapsed:.1}s"
        ),
    );
}

// ---------------------------------------------------------------------------
// criterion 4: hand-computed oracles to 1e-12
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_hand_computed_oracles() {
    let tol = 1e-12;
    let mut detail = String::new();
    let mut pass = true;
    let check = |name: &str, got: f64, want: f64, pass: &mut bool, detail: &mut String| {
        let ok = (got - want).abs() < tol;
        *pass &= ok;
        let _ = write!(detail, "{name} {}; ", if ok { "ok" } else { "MISMATCH" });
    };

    let (cox, _) = cox_loss(&[0.0, 0.0], &[1.0, 2.0], &[1, 1]).unwrap();
    check("cox=log2", cox, 2.0_f64.ln(), &mut pass, &mut detail);

    let base = breslow_baseline(&[0.0; 4], &[1.0, 1.0, 2.0, 2.0], &[1; 4]).unwrap();
    check("breslow(1)=0.5", base.eval(1.0), 0.5, &mut pass, &mut detail);
    check("breslow(2)=1.5", base.eval(2.0), 1.5, &mut pass, &mut detail);

    check("aft surv=1/e", survival_aft(0.0, 1.0, 1.0), (-1.0_f64).exp(), &mut pass, &mut detail);
    check(
        "aft surv shifted=1/e",
        survival_aft(2.0_f64.ln(), 1.0, 2.0),
        (-1.0_f64).exp(),
        &mut pass,
        &mut detail,
    );

    let auc = auc_at(&[0.9, 0.8, 0.7, 0.6], &[1, 0, 1, 0]).unwrap();
    check("auc=0.75", auc, 0.75, &mut pass, &mut detail);

    let ds = SurvivalDataset::new(
        vec![
            Observation { features: vec![0.0], time: 5.0, event: 1, group: 0 },
            Observation { features: vec![0.0], time: 1.0, event: 1, group: 0 },
        ],
        vec!["x0".into()],
        vec!["a".into()],
        vec![2.0],
    )
    .unwrap();
    check("brier=0.10", brier_at(&[0.6, 0.2], &ds, 2.0), 0.10, &mut pass, &mut detail);

    // within each outcome class the prediction equals the group, balanced
    let yhat = [0u8, 1, 0, 1, 0, 1, 0, 1];
    let y = [0u8, 0, 0, 0, 1, 1, 1, 1];
    let z = [0usize, 1, 0, 1, 0, 1, 0, 1];
    check("cmi=log2", exact_cmi(&yhat, &y, &z).unwrap(), 2.0_f64.ln(), &mut pass, &mut detail);

    let tp = |tprs: &[f64], fprs: &[f64], t: f64| TimePointMetrics {
        t,
        auc: None,
        brier: 0.0,
        group_rates: tprs
            .iter()
            .zip(fprs)
            .map(|(&a, &b)| GroupRates { tpr: Some(a), fpr: Some(b) })
            .collect(),
        dtpr: Some(tprs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - tprs.iter().cloned().fold(f64::INFINITY, f64::min)),
        dfpr: Some(fprs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - fprs.iter().cloned().fold(f64::INFINITY, f64::min)),
    };
    let per_time = vec![
        tp(&[0.9, 0.6, 0.7], &[0.2, 0.1, 0.25], 1.0),
        tp(&[0.4, 0.5, 0.6], &[0.3, 0.3, 0.3], 2.0),
    ];
    let (adtpr, adfpr) = disparity(&per_time).unwrap();
    check("adTPR=0.25", adtpr, 0.25, &mut pass, &mut detail);
    check("adFPR=0.075", adfpr, 0.075, &mut pass, &mut detail);

    record(4, "hand-computed oracles", pass, detail);
}

// ---------------------------------------------------------------------------
// criterion 5: equalized-odds bridge
// ---------------------------------------------------------------------------

fn eo_table(flip_one: bool) -> (Vec<u8>, Vec<u8>, Vec<usize>) {
    // per (y, z) cell: (records, flagged) chosen so groupwise TPR and FPR
    // are exactly equal: TPR 0.6 in both groups, FPR 0.2 in both groups.
    let cells: [(u8, usize, usize, usize); 4] = [
        (1, 0, 10, 6),
        (1, 1, 20, 12),
        (0, 0, 10, 2),
        (0, 1, 5, 1),
    ];
    let mut yhat = Vec::new();
    let mut y = Vec::new();
    let mut z = Vec::new();
    for &(yy, zz, total, flagged) in &cells {
        for k in 0..total {
            yhat.push(u8::from(k < flagged));
            y.push(yy);
            z.push(zz);
        }
    }
    if flip_one {
        yhat[0] = 0; // breaks the equal-TPR structure
    }
    (yhat, y, z)
}

#[test]
fn criterion_05_equalized_odds_bridge() {
    let (yhat, y, z) = eo_table(false);
    let equal = exact_cmi(&yhat, &y, &z).unwrap();
    let (yhat, y, z) = eo_table(true);
    let perturbed = exact_cmi(&yhat, &y, &z).unwrap();
    let pass = equal.abs() < 1e-12 && perturbed > 1e-12;
    record(
        5,
        "equalized-odds bridge",
        pass,
        format!("equal-rate table CMI {equal:.2e}, perturbed table CMI {perturbed:.2e}"),
    );
}

// ---------------------------------------------------------------------------
// criterion 6: command determinism (rerun => byte-identical outputs)
// ---------------------------------------------------------------------------

fn read_bytes(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn criterion_06_command_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();

    let synth_spec = serde_json::json!({
        "n": 200, "p": 3, "n_groups": 2,
        "beta": [0.8, -0.5, 0.4], "group_shift": [0.0, -0.4],
        "noise_scale": 0.5, "censor_rate_target": [0.3, 0.3],
        "bias_strength": 1.0, "seed": 9
    });
    let spec_path = root.join("synth.json");
    std::fs::write(&spec_path, serde_json::to_string(&synth_spec).unwrap()).unwrap();
    let csv_path = root.join("data.csv");

    run_synth(&spec_path, &csv_path).unwrap();
    let csv_first = read_bytes(&csv_path);
    run_synth(&spec_path, &csv_path).unwrap();
    let synth_same = csv_first == read_bytes(&csv_path);

    let run_dir = root.join("run");
    let run_config = serde_json::json!({
        "dataset": csv_path, "out_dir": run_dir,
        "split": { "ratios": [0.8, 0.1, 0.1], "seed": 9 },
        "train": {
            "scenario": "LinearAFT", "method": "CMIA", "epochs": 30,
            "lambda1": 5.0, "noise": { "m": 5, "tau": 0.5, "seed": 9 }, "seed": 9
        }
    });
    let run_path = root.join("run.json");
    std::fs::write(&run_path, serde_json::to_string(&run_config).unwrap()).unwrap();

    run_train(&run_path).unwrap();
    let ckpt = read_bytes(&run_dir.join("checkpoint.json"));
    let hist = read_bytes(&run_dir.join("history.jsonl"));
    let manifest = read_bytes(&run_dir.join("manifest.json"));
    run_train(&run_path).unwrap();
    let train_same = ckpt == read_bytes(&run_dir.join("checkpoint.json"))
        && hist == read_bytes(&run_dir.join("history.jsonl"))
        && manifest == read_bytes(&run_dir.join("manifest.json"));

    let eval_dir = root.join("eval");
    let eval_args = EvaluateArgs {
        checkpoint: run_dir.join("checkpoint.json"),
        dataset: csv_path.clone(),
        schema: None,
        out_dir: eval_dir.clone(),
        split: SplitSpec { ratios: [0.8, 0.1, 0.1], seed: 9 },
    };
    run_evaluate(&eval_args).unwrap();
    let report = read_bytes(&eval_dir.join("report.json"));
    let report_csv = read_bytes(&eval_dir.join("report.csv"));
    run_evaluate(&eval_args).unwrap();
    let eval_same = report == read_bytes(&eval_dir.join("report.json"))
        && report_csv == read_bytes(&eval_dir.join("report.csv"));

    let bench_dir = root.join("bench");
    let plan = serde_json::json!({
        "datasets": [{ "name": "tiny", "synth": synth_spec }],
        "scenarios": ["LinearCOX"], "methods": ["Vanilla", "GD"], "seeds": [1],
        "out_dir": bench_dir,
        "train": {
            "scenario": "LinearCOX", "method": "Vanilla", "epochs": 40,
            "noise": { "m": 5, "tau": 0.5, "seed": 1 }
        }
    });
    let plan_path = root.join("plan.json");
    std::fs::write(&plan_path, serde_json::to_string(&plan).unwrap()).unwrap();
    run_benchmark(&plan_path).unwrap();
    let results = read_bytes(&bench_dir.join("results.csv"));
    let radar = read_bytes(&bench_dir.join("radar.csv"));
    run_benchmark(&plan_path).unwrap();
    let bench_same = results == read_bytes(&bench_dir.join("results.csv"))
        && radar == read_bytes(&bench_dir.join("radar.csv"));

    let land_spec = serde_json::json!({
        "checkpoint": run_dir.join("checkpoint.json"),
        "dataset": csv_path,
        "split": { "ratios": [0.8, 0.1, 0.1], "seed": 9 },
        "coefficients": ["f0", "f1"],
        "axes": [
            { "min": -1.0, "max": 1.0, "steps": 5 },
            { "min": -1.0, "max": 1.0, "steps": 5 }
        ],
        "noise": { "m": 5, "tau": 0.5, "seed": 9 },
        "out": root.join("landscape.csv")
    });
    let land_path = root.join("landscape.json");
    std::fs::write(&land_path, serde_json::to_string(&land_spec).unwrap()).unwrap();
    run_landscape(&land_path).unwrap();
    let grid = read_bytes(&root.join("landscape.csv"));
    run_landscape(&land_path).unwrap();
    let land_same = grid == read_bytes(&root.join("landscape.csv"));

    let pass = synth_same && train_same && eval_same && bench_same && land_same;
    record(
        6,
        "command determinism",
        pass,
        format!(
            "synth {synth_same}, train {train_same}, evaluate {eval_same}, benchmark {bench_same}, landscape {land_same}"
        ),
    );
}

// ---------------------------------------------------------------------------
// criteria 7 + 8: desk-scale synthetic experiment and ablations
// ---------------------------------------------------------------------------

fn experiment_spec(seed: u64) -> SynthSpec {
    SynthSpec {
        n: 2000,
        p: 6,
        n_groups: 2,
        beta: vec![0.8, -0.5, 0.4, 0.3, -0.2, 0.1],
        group_shift: vec![0.0, -0.5],
        noise_scale: 0.4,
        censor_rate_target: vec![0.25, 0.35],
        bias_strength: 1.5,
        seed,
        eval_times: None,
    }
}

fn experiment_config(scenario: Scenario, method: Method) -> TrainConfig {
    let mut config = TrainConfig::new(scenario, method);
    config.epochs = 200;
    config.lambda1 = 6400.0;
    let mut noise = NoiseConfig::new(6, 0.5, 0).unwrap();
    noise.resample_per_epoch = true;
    config.noise = noise;
    config
}

struct CellStats {
    aauc: Vec<f64>,
    adtpr: Vec<f64>,
    adfpr: Vec<f64>,
}

fn run_cells(scenario: Scenario, method: Method, seeds: &[u64]) -> CellStats {
    let mut stats = CellStats { aauc: Vec::new(), adtpr: Vec::new(), adfpr: Vec::new() };
    for &seed in seeds {
        let ds = synthesize(&experiment_spec(seed)).unwrap();
        let (tr, va, te) =
            split(&ds, &SplitSpec { ratios: [0.6, 0.1, 0.3], seed }).unwrap();
        let config = experiment_config(scenario, method);
        let trained = train(&tr, &va, &config).unwrap();
        let report = evaluate(&trained, &te, "synthetic", seed).unwrap();
        stats.aauc.push(report.aauc);
        stats.adtpr.push(report.adtpr);
        stats.adfpr.push(report.adfpr);
    }
    stats
}

#[test]
fn criteria_07_08_synthetic_experiment_and_ablations() {
    let seeds: Vec<u64> = (1000..1005).collect();

    let mut pass7 = true;
    let mut detail7 = String::new();
    let mut aft_cmia_med: Option<(f64, f64, f64)> = None;
    for scenario in [Scenario::LinearCOX, Scenario::LinearAFT] {
        let start = std::time::Instant::now();
        let vanilla = run_cells(scenario, Method::Vanilla, &seeds);
        let cmia = run_cells(scenario, Method::CMIA, &seeds);
        let elapsed = start.elapsed().as_secs_f64();

        let (v_auc, v_tpr, v_fpr) =
            (median(&vanilla.aauc), median(&vanilla.adtpr), median(&vanilla.adfpr));
        let (c_auc, c_tpr, c_fpr) =
            (median(&cmia.aauc), median(&cmia.adtpr), median(&cmia.adfpr));
        if scenario.is_aft() {
            aft_cmia_med = Some((c_auc, c_tpr, c_fpr));
        }

        let biased_enough = v_tpr >= 0.05;
        let tpr_cut = c_tpr <= 0.6 * v_tpr;
        let fpr_cut = c_fpr <= 0.6 * v_fpr;
        let auc_ok = v_auc - c_auc <= 0.05;
        let in_budget = elapsed < 900.0;
        pass7 &= biased_enough && tpr_cut && fpr_cut && auc_ok && in_budget;
        let _ = write!(
            detail7,
            "{scenario:?}: vanilla (aAUC {v_auc:.3}, adTPR {v_tpr:.3}, adFPR {v_fpr:.3}) vs CMIA (aAUC {c_auc:.3}, adTPR {c_tpr:.3}, adFPR {c_fpr:.3}), {elapsed:.0}s; "
        );
    }
    record(7, "CMIA vs Vanilla on biased synthetic", pass7, detail7);

    let (cmia_auc, cmia_tpr, _) = aft_cmia_med.unwrap();
    let noaug = run_cells(Scenario::LinearAFT, Method::CMIA_NoAug, &seeds);
    let noreg = run_cells(Scenario::LinearAFT, Method::CMIA_NoReg, &seeds);
    let noaug_tpr = median(&noaug.adtpr);
    let noreg_tpr = median(&noreg.adtpr);
    let noreg_auc = median(&noreg.aauc);
    let pass8 = noaug_tpr > cmia_tpr && noreg_tpr > cmia_tpr && noreg_auc <= cmia_auc + 0.05;
    record(
        8,
        "ablations",
        pass8,
        format!(
            "CMIA (aAUC {cmia_auc:.3}, adTPR {cmia_tpr:.3}); NoAug adTPR {noaug_tpr:.3}; NoReg (aAUC {noreg_auc:.3}, adTPR {noreg_tpr:.3})"
        ),
    );
}

// ---------------------------------------------------------------------------
// criterion 9 (advisory): German Credit reproduction, if the data is present
// ---------------------------------------------------------------------------

fn german_credit_path() -> Option<PathBuf> {
    if let Ok(p) = std::env::var("FAIRSURV_GERMAN_CREDIT") {
        let p = PathBuf::from(p);
        if p.exists() {
            return Some(p);
        }
    }
    let fallback = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/german_credit.csv");
    fallback.exists().then_some(fallback)
}

#[test]
fn criterion_09_german_credit_advisory() {
    let Some(path) = german_credit_path() else {
        record_advisory(
            9,
            "German Credit (advisory)",
            "SKIP",
            "no CSV at $FAIRSURV_GERMAN_CREDIT or data/german_credit.csv".into(),
        );
        return;
    };

    let schema_path = path.with_extension("schema.json");
    let result = (|| -> fairsurv::Result<(f64, f64, f64)> {
        let schema = fairsurv::dataset::load_schema(&schema_path)?;
        let ds = fairsurv::dataset::load_dataset(&path, &schema)?;
        let seeds: Vec<u64> = (0..10).collect();
        let mut v_auc = Vec::new();
        let mut v_tpr = Vec::new();
        let mut c_tpr = Vec::new();
        for &seed in &seeds {
            let (tr, va, te) = split(&ds, &SplitSpec { ratios: [0.8, 0.1, 0.1], seed })?;
            let mut vanilla_cfg = TrainConfig::new(Scenario::LinearAFT, Method::Vanilla);
            vanilla_cfg.epochs = 300;
            vanilla_cfg.seed = seed;
            let vanilla = train(&tr, &va, &vanilla_cfg)?;
            let vr = evaluate(&vanilla, &te, "german-credit", seed)?;
            v_auc.push(vr.aauc);
            v_tpr.push(vr.adtpr);

            let mut cfg = experiment_config(Scenario::LinearAFT, Method::CMIA);
            cfg.lambda1 = 6400.0 * tr.len() as f64 / 1200.0;
            cfg.seed = seed;
            let cmia = train(&tr, &va, &cfg)?;
            let cr = evaluate(&cmia, &te, "german-credit", seed)?;
            c_tpr.push(cr.adtpr);
        }
        Ok((median(&v_auc), median(&v_tpr), median(&c_tpr)))
    })();

    match result {
        Ok((v_auc, v_tpr, c_tpr)) => {
            let ok = (v_auc - 0.8635).abs() <= 0.07 && c_tpr < v_tpr;
            let status = if ok { "PASS" } else { "ADVISORY-FAIL" };
            record_advisory(
                9,
                "German Credit (advisory)",
                status,
                format!("vanilla aAUC {v_auc:.4} (target 0.8635±0.07), vanilla adTPR {v_tpr:.4} vs CMIA {c_tpr:.4}"),
            );
        }
        Err(e) => record_advisory(
            9,
            "German Credit (advisory)",
            "ADVISORY-FAIL",
            format!("could not run: {e}"),
        ),
    }
}

// ---------------------------------------------------------------------------
// criterion 10: landscape argmin geometry
// ---------------------------------------------------------------------------

fn parse_argmins(csv: &str) -> std::collections::HashMap<String, (f64, f64)> {
    let mut out = std::collections::HashMap::new();
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[0].contains("argmin") {
            out.insert(
                fields[0].to_string(),
                (fields[1].parse().unwrap(), fields[2].parse().unwrap()),
            );
        }
    }
    out
}

#[test]
fn criterion_10_landscape_argmin_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();

    let synth_spec = serde_json::json!({
        "n": 600, "p": 2, "n_groups": 2,
        "beta": [0.9, -0.6], "group_shift": [0.0, -0.5],
        "noise_scale": 0.4, "censor_rate_target": [0.25, 0.35],
        "bias_strength": 1.5, "seed": 21
    });
    std::fs::write(root.join("synth.json"), serde_json::to_string(&synth_spec).unwrap()).unwrap();
    run_synth(&root.join("synth.json"), &root.join("data.csv")).unwrap();

    let run_config = serde_json::json!({
        "dataset": root.join("data.csv"), "out_dir": root.join("run"),
        "split": { "ratios": [0.8, 0.1, 0.1], "seed": 21 },
        "train": {
            "scenario": "LinearAFT", "method": "CMIA", "epochs": 200,
            "lambda1": 2000.0, "noise": { "m": 10, "tau": 0.5, "seed": 21, "resample_per_epoch": true },
            "seed": 21
        }
    });
    std::fs::write(root.join("run.json"), serde_json::to_string(&run_config).unwrap()).unwrap();
    run_train(&root.join("run.json")).unwrap();

    let land_spec = serde_json::json!({
        "checkpoint": root.join("run/checkpoint.json"),
        "dataset": root.join("data.csv"),
        "split": { "ratios": [0.8, 0.1, 0.1], "seed": 21 },
        "part": "train",
        "coefficients": ["f0", "f1"],
        "axes": [
            { "min": -0.5, "max": 2.0, "steps": 26 },
            { "min": -2.0, "max": 0.5, "steps": 26 }
        ],
        "noise": { "m": 50, "tau": 0.5, "seed": 21 },
        "out": root.join("landscape.csv")
    });
    std::fs::write(root.join("landscape.json"), serde_json::to_string(&land_spec).unwrap()).unwrap();
    run_landscape(&root.join("landscape.json")).unwrap();

    let csv = std::fs::read_to_string(root.join("landscape.csv")).unwrap();
    let argmins = parse_argmins(&csv);
    let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    let d_aug = dist(
        argmins["delta_checkpoint_argmin_sum"],
        argmins["delta_checkpoint_argmin_fairness"],
    );
    let d_raw = dist(argmins["delta_zero_argmin_sum"], argmins["delta_zero_argmin_fairness"]);
    let pass = d_aug <= d_raw + 1e-9;
    record(
        10,
        "landscape argmin geometry",
        pass,
        format!("min-sum to min-fairness distance: with checkpoint deltas {d_aug:.3}, with zero deltas {d_raw:.3}"),
    );
}

