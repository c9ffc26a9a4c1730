//! End-to-end tests driving the `scbp` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use scbp_core::corpus::{generate_synthetic_corpus, read_wav, write_wav};
use scbp_core::{load_envelope, SyntheticCorpusConfig};

fn scbp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scbp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn learn_synthetic_writes_a_loadable_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("env.txt");
    let result = scbp(&[
        "learn",
        "--synthetic-seed",
        "7",
        "--n-train",
        "30",
        "--block-length",
        "64",
        "--sparsity",
        "5",
        "--label",
        "synth",
        "--out",
        &path_str(&out),
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert!(stdout(&result).contains("training_count = 30"));
    let env = load_envelope(&out).unwrap();
    assert_eq!(env.training_count, 30);
    assert_eq!(env.label, "synth");
}

#[test]
fn learn_without_out_is_a_usage_error() {
    let result = scbp(&["learn", "--synthetic-seed", "1", "--label", "x"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn learn_rejects_ambiguous_sources() {
    let result = scbp(&[
        "learn",
        "--synthetic-seed",
        "1",
        "--manifest",
        "m.txt",
        "--label",
        "x",
        "--out",
        "e.txt",
    ]);
    assert_eq!(result.status.code(), Some(2));
}

fn fixture_wav(dir: &Path, name: &str, len: usize) -> PathBuf {
    let cfg = SyntheticCorpusConfig {
        n_train: 1,
        n_test: 1,
        block_length: len,
        sparsity: 5,
        band_fraction: 0.25,
        noise_floor: 0.01,
        seed: 99,
    };
    let (_, test) = generate_synthetic_corpus(&cfg).unwrap();
    let path = dir.join(name);
    write_wav(&path, &test[0]).unwrap();
    path
}

#[test]
fn recover_at_cr_one_reproduces_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_wav(dir.path(), "in.wav", 64);
    let out = dir.path().join("out.wav");
    let result = scbp(&[
        "recover",
        "--input",
        &path_str(&input),
        "--cr",
        "1",
        "--out",
        &path_str(&out),
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let original = read_wav(&input).unwrap();
    let recovered = read_wav(&out).unwrap();
    assert_eq!(original.len(), recovered.len());
    for (a, b) in original.samples.iter().zip(&recovered.samples) {
        assert!((a - b).abs() <= 1.0 / 32768.0, "{a} vs {b}");
    }
}

#[test]
fn recover_scbp_without_envelope_is_a_usage_error() {
    let result = scbp(&["recover", "--input", "x.wav", "--method", "scbp"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn recover_nmse_matches_the_experiment_path() {
    // Cross-path consistency: a single-trial experiment over a manifest
    // pointing at the fixture must see the same sensing seed and hence
    // produce the identical NMSE the recover command prints.
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_wav(dir.path(), "fix.wav", 64);
    std::fs::write(dir.path().join("fix.phn"), "0 64 aa\n").unwrap();
    std::fs::write(dir.path().join("train.txt"), "").unwrap();
    std::fs::write(dir.path().join("test.txt"), "fix.wav fix.phn\n").unwrap();
    std::fs::write(
        dir.path().join("exp.cfg"),
        "corpus = manifest\ntrain_manifest = train.txt\ntest_manifest = test.txt\n\
         phoneme_label = aa\ncr = 4\ntrials_per_vector = 1\nbase_seed = 777\nmethods = bp\n",
    )
    .unwrap();
    let out_dir = dir.path().join("run");
    let result = scbp(&[
        "experiment",
        "--config",
        &path_str(&dir.path().join("exp.cfg")),
        "--out",
        &path_str(&out_dir),
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let trials = std::fs::read_to_string(out_dir.join("trials.csv")).unwrap();
    let row = trials.lines().nth(1).expect("one trial row");
    let experiment_nmse = row.split(',').nth(7).unwrap().to_string();

    let result = scbp(&[
        "recover",
        "--input",
        &path_str(&input),
        "--truth",
        &path_str(&input),
        "--cr",
        "4",
        "--seed",
        "777",
        "--method",
        "bp",
        "--out",
        &path_str(&dir.path().join("rec.wav")),
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let printed = stdout(&result);
    let line = printed
        .lines()
        .find(|l| l.starts_with("block 0:"))
        .expect("nmse line");
    let recover_nmse = line.split("nmse = ").nth(1).unwrap().trim();
    assert_eq!(recover_nmse, experiment_nmse, "paths disagree: {printed}");
}

#[test]
fn learn_errors_when_label_is_absent_from_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let wav = fixture_wav(dir.path(), "utt.wav", 64);
    std::fs::write(dir.path().join("utt.phn"), "0 64 iy\n").unwrap();
    let manifest = dir.path().join("m.txt");
    std::fs::write(&manifest, "utt.wav utt.phn\n").unwrap();
    let result = scbp(&[
        "learn",
        "--manifest",
        &path_str(&manifest),
        "--label",
        "aa",
        "--out",
        &path_str(&dir.path().join("e.txt")),
    ]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("aa"));
    let _ = wav;
}

#[test]
fn bundled_config_is_valid_and_matches_the_campaign() {
    let bundled =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/synthetic-default.cfg");
    let cfg = scbp_core::experiment::load_config(&bundled).unwrap();
    assert_eq!(cfg.cr, 5.0);
    assert_eq!(cfg.epsilon, 0.001);
    assert_eq!(cfg.trials_per_vector, 10);
    match cfg.corpus {
        scbp_core::CorpusSource::Synthetic(s) => {
            assert_eq!(s.n_train, 200);
            assert_eq!(s.n_test, 50);
            assert_eq!(s.block_length, 256);
            assert_eq!(s.sparsity, 10);
        }
        _ => panic!("bundled config should use the synthetic corpus"),
    }
}

#[test]
fn experiment_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "crr = 5\n").unwrap();
    let result = scbp(&[
        "experiment",
        "--config",
        &path_str(&cfg),
        "--out",
        &path_str(&dir.path().join("out")),
    ]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("crr"));
}

#[test]
fn experiment_is_deterministic_and_report_reaggregates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    std::fs::write(
        &cfg,
        "corpus = synthetic\nn_train = 30\nn_test = 4\nblock_length = 64\nsparsity = 5\n\
         cr = 4\ntrials_per_vector = 2\nbase_seed = 5\nmethods = both\n",
    )
    .unwrap();
    let run1 = dir.path().join("run1");
    let run2 = dir.path().join("run2");
    for out in [&run1, &run2] {
        let result = scbp(&[
            "experiment",
            "--config",
            &path_str(&cfg),
            "--out",
            &path_str(out),
            "--threads",
            "2",
        ]);
        assert!(
            result.status.success(),
            "{}",
            String::from_utf8_lossy(&result.stderr)
        );
    }
    let t1 = std::fs::read(run1.join("trials.csv")).unwrap();
    let t2 = std::fs::read(run2.join("trials.csv")).unwrap();
    assert_eq!(t1, t2);

    // summary shows scbp beating bp on this structured corpus
    let summary = std::fs::read_to_string(run1.join("summary.txt")).unwrap();
    assert!(summary.contains("improvement_mean_pct"), "{summary}");

    let rerun = dir.path().join("rerun");
    let result = scbp(&[
        "report",
        "--trials",
        &path_str(&run1.join("trials.csv")),
        "--out",
        &path_str(&rerun),
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let s1 = std::fs::read(run1.join("summary.txt")).unwrap();
    let s2 = std::fs::read(rerun.join("summary.txt")).unwrap();
    assert_eq!(s1, s2);
    let h1 = std::fs::read(run1.join("histogram.csv")).unwrap();
    let h2 = std::fs::read(rerun.join("histogram.csv")).unwrap();
    assert_eq!(h1, h2);
}
