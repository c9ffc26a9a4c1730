//! Batch BP-vs-SCBP comparison harness: randomized trials over a test
//! corpus, NMSE statistics, histogram, and failure accounting.
//!
//! Trials are paired by default: for a given (vector, block, trial) both
//! methods consume the bit-identical sensing matrix and measurement, so the
//! comparison is free of sensing variance. Trials are independent work
//! units executed in parallel; records are collected and sorted into a
//! canonical order before aggregation so output bits do not depend on the
//! degree of parallelism.

mod config;
mod report;

pub use config::{config_summary, load_config, parse_config};
pub use report::{read_trials_csv, render_summary, write_report};

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::block::SignalBlock;
use crate::corpus::{
    generate_synthetic_corpus, load_phoneme_corpus, read_manifest, SyntheticCorpusConfig,
};
use crate::error::{Error, Result};
use crate::lp::LpStatus;
use crate::recovery::{bp_recover, scbp_recover_weighted};
use crate::seed::derive_seed;
use crate::sensing::{compressive_sample, gen_sensing_matrix, measurement_count};
use crate::structure::{learn_envelope, load_envelope, StructureEnvelope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Bp,
    Scbp,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Bp => "bp",
            Method::Scbp => "scbp",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bp" => Ok(Method::Bp),
            "scbp" => Ok(Method::Scbp),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSet {
    Bp,
    Scbp,
    Both,
}

impl MethodSet {
    pub fn methods(&self) -> &'static [Method] {
        match self {
            MethodSet::Bp => &[Method::Bp],
            MethodSet::Scbp => &[Method::Scbp],
            MethodSet::Both => &[Method::Bp, Method::Scbp],
        }
    }

    pub fn contains(&self, m: Method) -> bool {
        self.methods().contains(&m)
    }
}

impl std::fmt::Display for MethodSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MethodSet::Bp => "bp",
            MethodSet::Scbp => "scbp",
            MethodSet::Both => "both",
        })
    }
}

impl std::str::FromStr for MethodSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bp" => Ok(MethodSet::Bp),
            "scbp" => Ok(MethodSet::Scbp),
            "both" => Ok(MethodSet::Both),
            other => Err(Error::InvalidConfig(format!(
                "unknown method set {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensingMode {
    /// A fresh sensing matrix per (vector, block, trial).
    FreshPerTrial,
    /// One sensing matrix per block length, reused across all trials.
    Fixed,
}

impl std::fmt::Display for SensingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SensingMode::FreshPerTrial => "fresh",
            SensingMode::Fixed => "fixed",
        })
    }
}

impl std::str::FromStr for SensingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fresh" => Ok(SensingMode::FreshPerTrial),
            "fixed" => Ok(SensingMode::Fixed),
            other => Err(Error::InvalidConfig(format!(
                "unknown sensing mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum CorpusSource {
    Synthetic(SyntheticCorpusConfig),
    Manifest {
        train: PathBuf,
        test: PathBuf,
        label: String,
    },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub cr: f64,
    pub epsilon: f64,
    pub trials_per_vector: usize,
    pub base_seed: u64,
    pub methods: MethodSet,
    /// Stored envelope to use; when absent the envelope is learned from the
    /// corpus's training partition.
    pub envelope_path: Option<PathBuf>,
    pub corpus: CorpusSource,
    pub sensing: SensingMode,
    pub histogram_bins: usize,
    /// Paired trials share the sensing matrix across methods; unpaired
    /// trials mix the method into the seed (the original campaigns ran the
    /// methods separately).
    pub paired: bool,
    pub alpha_weight: f64,
    /// Cap on test vectors consumed (0 = all), for scaled replications.
    pub max_test_vectors: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            cr: 5.0,
            epsilon: 0.001,
            trials_per_vector: 100,
            base_seed: 0,
            methods: MethodSet::Both,
            envelope_path: None,
            corpus: CorpusSource::Synthetic(SyntheticCorpusConfig::default()),
            sensing: SensingMode::FreshPerTrial,
            histogram_bins: 20,
            paired: true,
            alpha_weight: 1.0,
            max_test_vectors: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.cr.is_finite() || self.cr < 1.0 {
            return Err(Error::InvalidConfig(format!("cr {} must be >= 1", self.cr)));
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "epsilon {} must be positive",
                self.epsilon
            )));
        }
        if self.trials_per_vector == 0 {
            return Err(Error::InvalidConfig(
                "trials_per_vector must be >= 1".into(),
            ));
        }
        if self.histogram_bins == 0 {
            return Err(Error::InvalidConfig("histogram_bins must be >= 1".into()));
        }
        if !self.alpha_weight.is_finite() || self.alpha_weight < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "alpha_weight {} must be nonnegative",
                self.alpha_weight
            )));
        }
        if let CorpusSource::Synthetic(s) = &self.corpus {
            s.validate()?;
        }
        Ok(())
    }
}

/// Outcome of one (vector, block, trial, method) solve.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub vector_id: String,
    pub block_index: usize,
    pub n: usize,
    pub m: usize,
    pub method: Method,
    pub seed: u64,
    pub status: LpStatus,
    /// Present iff the solve was optimal.
    pub nmse: Option<f64>,
    /// Present iff the method was SCBP and the solve was optimal.
    pub alpha: Option<f64>,
    /// Wall-clock seconds; informational only and never serialized, so
    /// report files stay bit-reproducible.
    pub solve_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodStats {
    pub method: Method,
    pub trials: usize,
    pub optimal: usize,
    pub failures: usize,
    pub nmse_mean: Option<f64>,
    pub nmse_variance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBin {
    pub low: f64,
    /// Upper edge; infinite for the terminal overflow ("More") bin, which
    /// also absorbs failed trials.
    pub high: f64,
    pub count_bp: usize,
    pub count_scbp: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub stats: Vec<MethodStats>,
    pub improvement_mean_pct: Option<f64>,
    pub improvement_variance_pct: Option<f64>,
    pub histogram: Vec<HistogramBin>,
}

impl ExperimentReport {
    pub fn stats_for(&self, method: Method) -> Option<&MethodStats> {
        self.stats.iter().find(|s| s.method == method)
    }
}

#[derive(Debug)]
pub struct ExperimentRun {
    pub report: ExperimentReport,
    pub records: Vec<TrialRecord>,
}

/// Normalized mean squared error: sum((x - x_hat)^2) / sum(x^2).
pub fn nmse(x: &SignalBlock, x_hat: &SignalBlock) -> Result<f64> {
    if x.len() != x_hat.len() {
        return Err(Error::InvalidDimension(format!(
            "nmse arguments differ in length: {} vs {}",
            x.len(),
            x_hat.len()
        )));
    }
    let energy: f64 = x.samples.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(Error::UndefinedMetric(
            "nmse reference signal has zero energy".into(),
        ));
    }
    let err: f64 = x
        .samples
        .iter()
        .zip(&x_hat.samples)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(err / energy)
}

/// Population mean/variance over the optimal records of each method, the
/// improvement percentages when both methods are present, and the error
/// histogram (uniform bins over [0, 1) plus overflow).
pub fn aggregate(records: &[TrialRecord], bins: usize) -> Result<ExperimentReport> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no trial records to aggregate".into()));
    }
    if bins == 0 {
        return Err(Error::InvalidConfig(
            "histogram needs at least one bin".into(),
        ));
    }

    let mut stats = Vec::new();
    for method in [Method::Bp, Method::Scbp] {
        let all: Vec<&TrialRecord> = records.iter().filter(|r| r.method == method).collect();
        if all.is_empty() {
            continue;
        }
        let values: Vec<f64> = all.iter().filter_map(|r| r.nmse).collect();
        let optimal = values.len();
        let (mean, variance) = if optimal > 0 {
            let mean = values.iter().sum::<f64>() / optimal as f64;
            let variance =
                values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / optimal as f64;
            (Some(mean), Some(variance))
        } else {
            (None, None)
        };
        stats.push(MethodStats {
            method,
            trials: all.len(),
            optimal,
            failures: all.len() - optimal,
            nmse_mean: mean,
            nmse_variance: variance,
        });
    }

    let get = |m: Method| stats.iter().find(|s| s.method == m);
    let improvement = |f: fn(&MethodStats) -> Option<f64>| -> Option<f64> {
        let bp = get(Method::Bp).and_then(f)?;
        let scbp = get(Method::Scbp).and_then(f)?;
        if bp == 0.0 {
            return None;
        }
        Some((bp - scbp) / bp * 100.0)
    };
    let improvement_mean_pct = improvement(|s| s.nmse_mean);
    let improvement_variance_pct = improvement(|s| s.nmse_variance);

    let mut histogram: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            low: i as f64 / bins as f64,
            high: (i + 1) as f64 / bins as f64,
            count_bp: 0,
            count_scbp: 0,
        })
        .collect();
    histogram.push(HistogramBin {
        low: 1.0,
        high: f64::INFINITY,
        count_bp: 0,
        count_scbp: 0,
    });
    for record in records {
        let slot = match record.nmse {
            Some(v) if v < 1.0 => ((v * bins as f64).floor() as usize).min(bins - 1),
            // NMSE >= 1 and failed solves land in the overflow bin.
            _ => bins,
        };
        match record.method {
            Method::Bp => histogram[slot].count_bp += 1,
            Method::Scbp => histogram[slot].count_scbp += 1,
        }
    }

    Ok(ExperimentReport {
        stats,
        improvement_mean_pct,
        improvement_variance_pct,
        histogram,
    })
}

/// Seed for the sensing matrix of one trial. Paired mode keys on
/// (vector, block, trial) only, so both methods draw identical matrices.
pub fn trial_seed(
    cfg: &ExperimentConfig,
    vector: u64,
    block: u64,
    trial: u64,
    method: Method,
) -> u64 {
    match cfg.sensing {
        SensingMode::Fixed => derive_seed(cfg.base_seed, u64::MAX, 0, 0),
        SensingMode::FreshPerTrial => {
            let base = derive_seed(cfg.base_seed, vector, block, trial);
            if cfg.paired {
                base
            } else {
                derive_seed(base, 0x6d657468 + method as u64, 0, 0)
            }
        }
    }
}

struct Task {
    vector_index: usize,
    vector_id: String,
    block_index: usize,
    block: SignalBlock,
    trial: usize,
}

fn resolve_envelope(
    cfg: &ExperimentConfig,
    train: Option<&[SignalBlock]>,
    label: &str,
) -> Result<StructureEnvelope> {
    if let Some(path) = &cfg.envelope_path {
        return load_envelope(path);
    }
    match train {
        Some(blocks) if !blocks.is_empty() => learn_envelope(blocks, label),
        _ => Err(Error::InvalidConfig(
            "scbp requested but no envelope path and no training corpus to learn from".into(),
        )),
    }
}

/// Run the full campaign described by `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    cfg.validate()?;

    type TestVectors = Vec<(String, Vec<SignalBlock>)>;
    let (train_blocks, test_vectors, label): (Vec<SignalBlock>, TestVectors, String) =
        match &cfg.corpus {
            CorpusSource::Synthetic(synth) => {
                let (train, test) = generate_synthetic_corpus(synth)?;
                let vectors = test
                    .into_iter()
                    .map(|b| (b.source_id.clone(), vec![b]))
                    .collect();
                (train, vectors, "synth".to_string())
            }
            CorpusSource::Manifest { train, test, label } => {
                let train_entries = read_manifest(train)?;
                let train_blocks: Vec<SignalBlock> = load_phoneme_corpus(&train_entries, label)?
                    .into_iter()
                    .flat_map(|v| v.blocks)
                    .collect();
                let test_entries = read_manifest(test)?;
                let vectors = load_phoneme_corpus(&test_entries, label)?
                    .into_iter()
                    .map(|v| (v.id, v.blocks))
                    .collect();
                (train_blocks, vectors, label.clone())
            }
        };

    let mut test_vectors = test_vectors;
    if cfg.max_test_vectors > 0 && test_vectors.len() > cfg.max_test_vectors {
        test_vectors.truncate(cfg.max_test_vectors);
    }
    if test_vectors.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "test corpus contains no vectors labeled {label:?}"
        )));
    }

    let envelope = if cfg.methods.contains(Method::Scbp) {
        Some(resolve_envelope(cfg, Some(&train_blocks), &label)?)
    } else {
        None
    };

    let mut tasks = Vec::new();
    for (vi, (id, blocks)) in test_vectors.iter().enumerate() {
        for (bi, block) in blocks.iter().enumerate() {
            if block.samples.iter().all(|&v| v == 0.0) {
                log::warn!("skipping zero-energy block {id}#{bi}: NMSE is undefined for it");
                continue;
            }
            for trial in 0..cfg.trials_per_vector {
                tasks.push(Task {
                    vector_index: vi,
                    vector_id: id.clone(),
                    block_index: bi,
                    block: block.clone(),
                    trial,
                });
            }
        }
    }

    let records: Result<Vec<Vec<TrialRecord>>> = tasks
        .par_iter()
        .map(|task| run_trial(cfg, task, envelope.as_ref()))
        .collect();
    let mut records: Vec<TrialRecord> = records?.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        (&a.vector_id, a.block_index, a.seed, a.method).cmp(&(
            &b.vector_id,
            b.block_index,
            b.seed,
            b.method,
        ))
    });

    for method in cfg.methods.methods() {
        let times: Vec<f64> = records
            .iter()
            .filter(|r| r.method == *method)
            .map(|r| r.solve_time)
            .collect();
        if !times.is_empty() {
            log::info!(
                "{method}: {} solves, mean {:.3} s",
                times.len(),
                times.iter().sum::<f64>() / times.len() as f64
            );
        }
    }

    let report = aggregate(&records, cfg.histogram_bins)?;
    Ok(ExperimentRun { report, records })
}

fn run_trial(
    cfg: &ExperimentConfig,
    task: &Task,
    envelope: Option<&StructureEnvelope>,
) -> Result<Vec<TrialRecord>> {
    let n = task.block.len();
    let m = measurement_count(n, cfg.cr)?;
    let mut out = Vec::new();
    let mut sensing: Option<(
        u64,
        crate::sensing::SensingMatrix,
        crate::sensing::MeasurementVector,
    )> = None;
    for &method in cfg.methods.methods() {
        let seed = trial_seed(
            cfg,
            task.vector_index as u64,
            task.block_index as u64,
            task.trial as u64,
            method,
        );
        // Paired trials share the seed across methods, hence the matrix.
        if sensing.as_ref().map(|s| s.0) != Some(seed) {
            let phi = gen_sensing_matrix(n, m, seed)?;
            let b = compressive_sample(&phi, &task.block)?;
            sensing = Some((seed, phi, b));
        }
        let (_, phi, b) = sensing.as_ref().unwrap();
        let started = Instant::now();
        let result = match method {
            Method::Bp => bp_recover(phi, b)?,
            Method::Scbp => {
                let env = envelope
                    .ok_or_else(|| Error::InvalidConfig("scbp trial without an envelope".into()))?;
                scbp_recover_weighted(phi, b, env, cfg.epsilon, cfg.alpha_weight)?
            }
        };
        let solve_time = started.elapsed().as_secs_f64();
        let optimal = result.status == LpStatus::Optimal;
        out.push(TrialRecord {
            vector_id: task.vector_id.clone(),
            block_index: task.block_index,
            n,
            m,
            method,
            seed,
            status: result.status,
            nmse: if optimal {
                Some(nmse(&task.block, &result.x_hat)?)
            } else {
                None
            },
            alpha: if optimal { result.alpha } else { None },
            solve_time,
        });
    }
    Ok(out)
}
