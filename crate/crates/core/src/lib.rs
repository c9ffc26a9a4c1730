//! Sparse-recovery toolkit: compressive sampling, basis pursuit (BP), and
//! structure-constrained basis pursuit (SCBP) over the orthonormal DCT
//! basis, with an owned dense LP solver and a batch experiment harness.

pub mod block;
pub mod corpus;
pub mod error;
pub mod experiment;
pub mod lp;
pub mod recovery;
pub mod seed;
pub mod sensing;
pub mod structure;
pub mod transform;

pub use block::{SignalBlock, DEFAULT_SAMPLE_RATE};
pub use corpus::{generate_synthetic_corpus, split_blocks, PhonemeSegment, SyntheticCorpusConfig};
pub use error::{Error, Result};
pub use experiment::{
    aggregate, config_summary, load_config, nmse, parse_config, read_trials_csv, run_experiment,
    write_report, CorpusSource, ExperimentConfig, ExperimentReport, ExperimentRun, Method,
    MethodSet, SensingMode, TrialRecord,
};
pub use lp::{
    oracle_solve_small, solve_lp, solve_lp_with, LinearProgram, LpSolution, LpStatus, SolverOptions,
};
pub use recovery::{
    bp_recover, build_bp_lp, build_scbp_lp, scbp_recover, RecoveryResult, SolveStats,
};
pub use sensing::{
    compressive_sample, gen_sensing_matrix, measurement_count, MeasurementVector, SensingMatrix,
};
pub use structure::{
    envelope_for_length, learn_envelope, load_envelope, resample_to, save_envelope,
    StructureEnvelope, ENVELOPE_LENGTH,
};
pub use transform::{dct_forward, dct_inverse, CoefficientVector};
