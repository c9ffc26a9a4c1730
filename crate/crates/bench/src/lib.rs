//! Fixture builders shared by the benchmarks.

use scbp_core::corpus::{generate_synthetic_corpus, SyntheticCorpusConfig};
use scbp_core::{
    compressive_sample, gen_sensing_matrix, learn_envelope, measurement_count, MeasurementVector,
    SensingMatrix, SignalBlock, StructureEnvelope,
};

/// One campaign-shaped recovery problem: a structured test block, its
/// envelope learned from a training split, and a compressive measurement.
pub struct RecoveryFixture {
    pub block: SignalBlock,
    pub phi: SensingMatrix,
    pub b: MeasurementVector,
    pub envelope: StructureEnvelope,
    pub epsilon: f64,
}

pub fn recovery_fixture(block_length: usize, cr: f64, seed: u64) -> RecoveryFixture {
    let cfg = SyntheticCorpusConfig {
        n_train: 60,
        n_test: 1,
        block_length,
        sparsity: 10.min(block_length / 4).max(1),
        band_fraction: 0.25,
        noise_floor: 0.01,
        seed,
    };
    let (train, test) = generate_synthetic_corpus(&cfg).expect("valid fixture config");
    let envelope = learn_envelope(&train, "bench").expect("envelope");
    let block = test.into_iter().next().expect("one test block");
    let m = measurement_count(block_length, cr).expect("measurement count");
    let phi = gen_sensing_matrix(block_length, m, seed).expect("sensing matrix");
    let b = compressive_sample(&phi, &block).expect("measurement");
    RecoveryFixture {
        block,
        phi,
        b,
        envelope,
        epsilon: 0.001,
    }
}
