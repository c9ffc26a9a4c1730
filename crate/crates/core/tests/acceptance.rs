//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (run with `--nocapture` to see them).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scbp_core::corpus::{scan_timit_dir, SyntheticCorpusConfig};
use scbp_core::experiment::{
    run_experiment, trial_seed, write_report, CorpusSource, ExperimentConfig, Method, MethodSet,
};
use scbp_core::recovery::{build_scbp_lp, scbp_recover};
use scbp_core::structure::{envelope_for_length, learn_envelope};
use scbp_core::transform::{dct_forward, dct_inverse, CoefficientVector};
use scbp_core::{
    bp_recover, build_bp_lp, compressive_sample, gen_sensing_matrix, nmse, oracle_solve_small,
    solve_lp, LinearProgram, LpStatus, SignalBlock, StructureEnvelope,
};

fn lcg_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(1);
    (0..n)
        .map(|_| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

/// Independent oracle: direct summation of the orthonormal DCT-II formula.
fn naive_dct(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let w = if k == 0 {
                (1.0 / n as f64).sqrt()
            } else {
                (2.0 / n as f64).sqrt()
            };
            w * x
                .iter()
                .enumerate()
                .map(|(j, &v)| v * (PI * (2 * j + 1) as f64 * k as f64 / (2.0 * n as f64)).cos())
                .sum::<f64>()
        })
        .collect()
}

#[test]
fn criterion_1_transform_correctness() {
    let mut worst_naive = 0.0f64;
    for n in 1..=64usize {
        let x = lcg_vec(n, 101 + n as u64);
        let s = dct_forward(&SignalBlock::new(x.clone())).unwrap();
        let oracle = naive_dct(&x);
        for (a, b) in s.values.iter().zip(&oracle) {
            worst_naive = worst_naive.max((a - b).abs());
        }
    }
    assert!(worst_naive <= 1e-9, "naive-oracle gap {worst_naive}");

    let mut worst_rt = 0.0f64;
    for &n in &[1usize, 2, 100, 1024] {
        for rep in 0..10 {
            let x = lcg_vec(n, 7 * n as u64 + rep);
            let s = dct_forward(&SignalBlock::new(x.clone())).unwrap();
            let back = dct_inverse(&s).unwrap();
            for (a, b) in back.samples.iter().zip(&x) {
                worst_rt = worst_rt.max((a - b).abs());
            }
        }
    }
    assert!(worst_rt <= 1e-10, "roundtrip gap {worst_rt}");
    println!(
        "ACCEPTANCE 1 transform: PASS (naive gap {worst_naive:.2e}, roundtrip gap {worst_rt:.2e})"
    );
}

#[test]
fn criterion_2_sensing_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_gram = 0.0f64;
    for trial in 0..100u64 {
        let n = rng.gen_range(2..=256usize);
        let m = rng.gen_range(1..=n);
        let phi = gen_sensing_matrix(n, m, trial).unwrap();
        let gram = phi.rows() * phi.rows().transpose();
        for i in 0..m {
            for j in 0..m {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst_gram = worst_gram.max((gram[(i, j)] - expect).abs());
            }
        }
        let again = gen_sensing_matrix(n, m, trial).unwrap();
        assert_eq!(
            phi.rows().as_slice(),
            again.rows().as_slice(),
            "seed reproducibility failed at trial {trial}"
        );
    }
    assert!(worst_gram <= 1e-10, "gram deviation {worst_gram}");
    println!(
        "ACCEPTANCE 2 sensing: PASS (worst gram deviation {worst_gram:.2e} over 100 matrices)"
    );
}

fn random_bounded_lp(k: usize, n_ub: usize, seed: u64) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x0: Vec<f64> = (0..k).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let a = DMatrix::from_fn(n_ub, k, |_, _| rng.gen_range(-1.0..1.0));
    let b = DVector::from_fn(n_ub, |i, _| {
        (0..k).map(|j| a[(i, j)] * x0[j]).sum::<f64>() + rng.gen_range(0.1..1.0)
    });
    let mut lp = LinearProgram::new(c).with_ub(a, b);
    for j in 0..k {
        lp = lp.with_lower_bound(j, -2.0).with_upper_bound(j, 2.0);
    }
    lp
}

#[test]
fn criterion_3_solver_oracle_equivalence() {
    let mut worst = 0.0f64;
    for seed in 0..200u64 {
        let k = 2 + (seed % 5) as usize;
        let rows = 2 + (seed % 7) as usize;
        let lp = random_bounded_lp(k, rows, 31_000 + seed);
        let reference = oracle_solve_small(&lp).unwrap();
        let ours = solve_lp(&lp).unwrap();
        assert_eq!(reference.status, LpStatus::Optimal, "seed {seed}");
        assert_eq!(ours.status, LpStatus::Optimal, "seed {seed}");
        worst = worst.max((ours.objective_value - reference.objective_value).abs());
    }
    assert!(worst <= 1e-6, "random LP gap {worst}");

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut tiny_worst = 0.0f64;
    let mut tiny_count = 0usize;
    // 28 BP + 28 SCBP reformulations over n in {2, 3}, m in {1, 2}.
    for rep in 0..28u64 {
        let n = 2 + (rep % 2) as usize;
        let m = 1 + ((rep / 2) % 2) as usize;
        let x = SignalBlock::new((0..n).map(|_| rng.gen_range(-0.5..0.5)).collect());
        let phi = gen_sensing_matrix(n, m, 500 + rep).unwrap();
        let b = compressive_sample(&phi, &x).unwrap();

        let bp = build_bp_lp(&phi, &b).unwrap();
        let ours = solve_lp(&bp).unwrap();
        let reference = oracle_solve_small(&bp).unwrap();
        assert_eq!(ours.status, LpStatus::Optimal);
        assert_eq!(reference.status, LpStatus::Optimal);
        tiny_worst = tiny_worst.max((ours.objective_value - reference.objective_value).abs());
        tiny_count += 1;

        let env = StructureEnvelope {
            beta_l: vec![-1.0; scbp_core::ENVELOPE_LENGTH],
            beta_u: vec![1.0; scbp_core::ENVELOPE_LENGTH],
            label: "acc".into(),
            training_count: 1,
            created_from: String::new(),
        };
        let scbp = build_scbp_lp(&phi, &b, &env, 0.01).unwrap();
        let ours = solve_lp(&scbp).unwrap();
        let reference = oracle_solve_small(&scbp).unwrap();
        assert_eq!(ours.status, LpStatus::Optimal, "scbp rep {rep}");
        assert_eq!(reference.status, LpStatus::Optimal, "scbp rep {rep}");
        tiny_worst = tiny_worst.max((ours.objective_value - reference.objective_value).abs());
        tiny_count += 1;
    }
    assert!(tiny_count >= 50);
    assert!(tiny_worst <= 1e-6, "tiny reformulation gap {tiny_worst}");
    println!(
        "ACCEPTANCE 3 solver-oracle: PASS (200 random LPs gap {worst:.2e}, {tiny_count} tiny reformulations gap {tiny_worst:.2e})"
    );
}

#[test]
fn criterion_4_classical_cs_sanity() {
    let (n, m, spikes) = (256usize, 128usize, 8usize);
    let mut exact = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    for trial in 0..100u64 {
        let mut coeffs = vec![0.0; n];
        let mut placed = 0;
        while placed < spikes {
            let pos = rng.gen_range(0..n);
            if coeffs[pos] == 0.0 {
                coeffs[pos] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                placed += 1;
            }
        }
        let x = dct_inverse(&CoefficientVector::new(coeffs)).unwrap();
        let phi = gen_sensing_matrix(n, m, 40_000 + trial).unwrap();
        let b = compressive_sample(&phi, &x).unwrap();
        let out = bp_recover(&phi, &b).unwrap();
        if out.status == LpStatus::Optimal && nmse(&x, &out.x_hat).unwrap() <= 1e-6 {
            exact += 1;
        }
    }
    assert!(exact >= 95, "exact recoveries {exact}/100");
    println!("ACCEPTANCE 4 classical CS: PASS ({exact}/100 trials at NMSE <= 1e-6)");
}

fn campaign_config() -> ExperimentConfig {
    ExperimentConfig {
        cr: 5.0,
        epsilon: 0.001,
        trials_per_vector: 10,
        base_seed: 42,
        methods: MethodSet::Both,
        corpus: CorpusSource::Synthetic(SyntheticCorpusConfig {
            n_train: 200,
            n_test: 50,
            block_length: 256,
            sparsity: 10,
            band_fraction: 0.25,
            noise_floor: 0.01,
            seed: 1,
        }),
        ..Default::default()
    }
}

#[test]
fn criterion_5_and_6_synthetic_campaign() {
    let cfg = campaign_config();
    let run = run_experiment(&cfg).unwrap();

    // Criterion 6: headline comparison at desk scale.
    let bp = run.report.stats_for(Method::Bp).unwrap();
    let scbp = run.report.stats_for(Method::Scbp).unwrap();
    let (bp_mean, scbp_mean) = (bp.nmse_mean.unwrap(), scbp.nmse_mean.unwrap());
    let (bp_var, scbp_var) = (bp.nmse_variance.unwrap(), scbp.nmse_variance.unwrap());
    assert!(scbp_mean < bp_mean, "scbp {scbp_mean} !< bp {bp_mean}");
    let improvement = run.report.improvement_mean_pct.unwrap();
    assert!(improvement >= 10.0, "improvement {improvement}% < 10%");
    assert!(scbp_var <= bp_var, "scbp var {scbp_var} > bp var {bp_var}");

    // Criterion 5: SCBP feasibility postconditions, rechecked from raw
    // outputs. The recovery layer rechecks every solve of the campaign and
    // downgrades violators to failures, so first confirm none were
    // downgraded, then verify the recheck machinery independently by
    // re-running a slice of the campaign's own trials.
    assert_eq!(
        scbp.failures, 0,
        "campaign produced SCBP results violating their postconditions"
    );
    let (train, test) = match &cfg.corpus {
        CorpusSource::Synthetic(s) => scbp_core::generate_synthetic_corpus(s).unwrap(),
        _ => unreachable!(),
    };
    let env = learn_envelope(&train, "synth").unwrap();
    let mut rechecked = 0usize;
    for (vi, block) in test.iter().enumerate().take(25) {
        let trial = (vi % cfg.trials_per_vector) as u64;
        let seed = trial_seed(&cfg, vi as u64, 0, trial, Method::Scbp);
        let n = block.len();
        let m = scbp_core::measurement_count(n, cfg.cr).unwrap();
        let phi = gen_sensing_matrix(n, m, seed).unwrap();
        let b = compressive_sample(&phi, block).unwrap();
        let out = scbp_recover(&phi, &b, &env, cfg.epsilon).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!(
            out.residual_l1 <= cfg.epsilon + 1e-6,
            "vector {vi}: residual {} > eps + 1e-6",
            out.residual_l1
        );
        let (beta_l, beta_u) = envelope_for_length(&env, n).unwrap();
        let alpha = out.alpha.unwrap();
        for (j, &s) in out.s_hat.values.iter().enumerate() {
            assert!(s >= alpha * beta_l[j] - 1e-6, "vector {vi} coeff {j}");
            assert!(s <= alpha * beta_u[j] + 1e-6, "vector {vi} coeff {j}");
        }
        rechecked += 1;
    }

    // Keep the campaign artifacts around as the regression baseline.
    let out_dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-campaign");
    write_report(&run.report, &run.records, &out_dir).unwrap();

    println!(
        "ACCEPTANCE 5 scbp feasibility: PASS (0 violations in {} campaign solves; {rechecked} re-solved and rechecked from raw outputs)",
        scbp.trials
    );
    println!(
        "ACCEPTANCE 6 headline: PASS (bp mean {bp_mean:.6e} var {bp_var:.6e}; scbp mean {scbp_mean:.6e} var {scbp_var:.6e}; improvement {improvement:.1}%; baseline written to {})",
        out_dir.display()
    );
}

#[test]
fn criterion_7_timit_replication_data_gated() {
    let Some(dir) = std::env::var_os("TIMIT_DIR") else {
        println!(
            "ACCEPTANCE 7 timit replication: SKIPPED (set TIMIT_DIR to a WAV-converted TIMIT root to run the scaled replication)"
        );
        return;
    };
    let root = std::path::PathBuf::from(dir);
    let train = scan_timit_dir(&root, "TRAIN").unwrap();
    let test = scan_timit_dir(&root, "TEST").unwrap();
    assert!(
        !train.is_empty() && !test.is_empty(),
        "TIMIT_DIR has no audio/transcript pairs; convert SPHERE to WAV first"
    );
    let tmp = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("timit-manifests");
    std::fs::create_dir_all(&tmp).unwrap();
    let write_manifest = |name: &str, entries: &[scbp_core::corpus::ManifestEntry]| {
        let lines: String = entries
            .iter()
            .map(|e| format!("{} {}\n", e.audio.display(), e.transcript.display()))
            .collect();
        let path = tmp.join(name);
        std::fs::write(&path, lines).unwrap();
        path
    };
    let cfg = ExperimentConfig {
        cr: 5.0,
        epsilon: 0.001,
        trials_per_vector: 10,
        base_seed: 42,
        methods: MethodSet::Both,
        corpus: CorpusSource::Manifest {
            train: write_manifest("train.txt", &train),
            test: write_manifest("test.txt", &test),
            label: "aa".into(),
        },
        max_test_vectors: 20,
        ..Default::default()
    };
    let run = run_experiment(&cfg).unwrap();
    let bp_mean = run.report.stats_for(Method::Bp).unwrap().nmse_mean.unwrap();
    let scbp_mean = run
        .report
        .stats_for(Method::Scbp)
        .unwrap()
        .nmse_mean
        .unwrap();
    assert!(
        scbp_mean <= 0.9 * bp_mean,
        "scbp mean {scbp_mean} not 10% below bp mean {bp_mean}"
    );
    println!(
        "ACCEPTANCE 7 timit replication: PASS (bp mean {bp_mean:.4}, scbp mean {scbp_mean:.4}, improvement {:.1}%)",
        run.report.improvement_mean_pct.unwrap()
    );
}

#[test]
fn criterion_8_scbp_homogeneity() {
    let mut worst = 0.0f64;
    for instance in 0..20u64 {
        let n = 16 + 8 * (instance % 3) as usize;
        let m = (n / 3).max(2);
        let train: Vec<SignalBlock> = (0..12)
            .map(|i| {
                SignalBlock::new(
                    (0..n)
                        .map(|t| {
                            ((t + i) as f64 * 0.21).sin()
                                * (1.0 + 0.2 * ((i * t) as f64 * 0.01).cos())
                        })
                        .collect(),
                )
            })
            .collect();
        let env = learn_envelope(&train, "hom").unwrap();
        let x = SignalBlock::new((0..n).map(|t| ((t as f64) * 0.21).sin()).collect());
        let phi = gen_sensing_matrix(n, m, 900 + instance).unwrap();
        let b = compressive_sample(&phi, &x).unwrap();
        let eps = 0.01;
        let base = solve_lp(&build_scbp_lp(&phi, &b, &env, eps).unwrap()).unwrap();
        assert_eq!(base.status, LpStatus::Optimal, "instance {instance}");
        for c in [0.1, 2.0, 10.0] {
            let scaled_b = scbp_core::MeasurementVector {
                values: &b.values * c,
                source_n: b.source_n,
                matrix_seed: b.matrix_seed,
            };
            let scaled = solve_lp(&build_scbp_lp(&phi, &scaled_b, &env, c * eps).unwrap()).unwrap();
            assert_eq!(
                scaled.status,
                LpStatus::Optimal,
                "instance {instance} c={c}"
            );
            let expect = c * base.objective_value;
            let rel = (scaled.objective_value - expect).abs() / expect.abs().max(1e-30);
            worst = worst.max(rel);
        }
    }
    assert!(worst <= 1e-6, "homogeneity relative gap {worst}");
    println!("ACCEPTANCE 8 homogeneity: PASS (worst relative gap {worst:.2e} over 20 instances x 3 scales)");
}

#[test]
fn criterion_9_determinism() {
    let cfg = ExperimentConfig {
        cr: 4.0,
        trials_per_vector: 2,
        base_seed: 7,
        corpus: CorpusSource::Synthetic(SyntheticCorpusConfig {
            n_train: 40,
            n_test: 5,
            block_length: 64,
            sparsity: 5,
            band_fraction: 0.25,
            noise_floor: 0.01,
            seed: 3,
        }),
        ..Default::default()
    };
    let tmp = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    let mut outputs = Vec::new();
    for (i, threads) in [1usize, 2, 4].iter().enumerate() {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(*threads)
            .build()
            .unwrap();
        let run = pool.install(|| run_experiment(&cfg)).unwrap();
        let dir = tmp.join(format!("determinism-{i}"));
        write_report(&run.report, &run.records, &dir).unwrap();
        outputs.push(std::fs::read(dir.join("trials.csv")).unwrap());
    }
    // Rerun on the same pool size to cover run-to-run determinism.
    let run = run_experiment(&cfg).unwrap();
    let dir = tmp.join("determinism-rerun");
    write_report(&run.report, &run.records, &dir).unwrap();
    outputs.push(std::fs::read(dir.join("trials.csv")).unwrap());

    for pair in outputs.windows(2) {
        assert_eq!(pair[0], pair[1], "trials.csv bytes differ");
    }
    println!(
        "ACCEPTANCE 9 determinism: PASS (trials.csv bit-identical across 1/2/4 threads and reruns, {} bytes)",
        outputs[0].len()
    );
}
