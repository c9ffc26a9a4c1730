//! Compressive sampling with orthonormal-row Gaussian sensing matrices.
//!
//! A sensing matrix is built by drawing an n-by-n matrix of i.i.d. standard
//! Gaussians from a seeded ChaCha8 stream, QR-factorizing it (Householder),
//! and keeping the first m rows of Q^T. Generation is deterministic per
//! (n, m, seed) within one build of this crate.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::block::SignalBlock;
use crate::error::{Error, Result};

/// An m-by-n matrix with orthonormal rows plus the seed that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    rows: DMatrix<f64>,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
}

impl SensingMatrix {
    pub fn rows(&self) -> &DMatrix<f64> {
        &self.rows
    }
}

/// A compressive measurement b = Phi x.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementVector {
    pub values: DVector<f64>,
    pub source_n: usize,
    pub matrix_seed: u64,
}

impl MeasurementVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.len() == 0
    }
}

/// Draw the sensing matrix for block length `n` with `m` measurements.
pub fn gen_sensing_matrix(n: usize, m: usize, seed: u64) -> Result<SensingMatrix> {
    if m == 0 || m > n {
        return Err(Error::InvalidDimension(format!(
            "measurement count m={m} must satisfy 1 <= m <= n={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Row-major draw so the sample order is explicit, not a storage detail.
    let draws: Vec<f64> = (0..n * n)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let gaussian = DMatrix::from_row_slice(n, n, &draws);
    let q = gaussian.qr().q();
    let rows = q.columns(0, m).transpose();
    Ok(SensingMatrix { rows, seed, n, m })
}

/// b = Phi x.
pub fn compressive_sample(phi: &SensingMatrix, block: &SignalBlock) -> Result<MeasurementVector> {
    block.validate()?;
    if block.len() != phi.n {
        return Err(Error::InvalidDimension(format!(
            "block length {} does not match sensing matrix n={}",
            block.len(),
            phi.n
        )));
    }
    let x = DVector::from_column_slice(&block.samples);
    Ok(MeasurementVector {
        values: &phi.rows * x,
        source_n: phi.n,
        matrix_seed: phi.seed,
    })
}

/// m = floor(n / cr), clamped to at least one measurement.
pub fn measurement_count(n: usize, cr: f64) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidConfig("block length must be positive".into()));
    }
    if !cr.is_finite() || cr < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "compression ratio {cr} must be >= 1"
        )));
    }
    Ok(((n as f64 / cr).floor() as usize).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram_oracle(phi: &SensingMatrix) -> DMatrix<f64> {
        // Independent dot-product routine over raw row slices.
        let m = phi.m;
        DMatrix::from_fn(m, m, |i, j| {
            (0..phi.n)
                .map(|k| phi.rows()[(i, k)] * phi.rows()[(j, k)])
                .sum()
        })
    }

    #[test]
    fn square_matrix_is_orthogonal() {
        let phi = gen_sensing_matrix(4, 4, 99).unwrap();
        let gram = phi.rows().transpose() * phi.rows();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - expect).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn generation_is_bitwise_deterministic() {
        let a = gen_sensing_matrix(64, 13, 7).unwrap();
        let b = gen_sensing_matrix(64, 13, 7).unwrap();
        assert_eq!(a.rows().as_slice(), b.rows().as_slice());
    }

    #[test]
    fn row_gram_matches_oracle() {
        let phi = gen_sensing_matrix(8, 3, 1).unwrap();
        let gram = gram_oracle(&phi);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - expect).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn invalid_dimensions_rejected() {
        assert!(gen_sensing_matrix(4, 5, 0).is_err());
        assert!(gen_sensing_matrix(4, 0, 0).is_err());
    }

    #[test]
    fn sampling_zero_gives_zero() {
        let phi = gen_sensing_matrix(16, 4, 3).unwrap();
        let b = compressive_sample(&phi, &SignalBlock::new(vec![0.0; 16])).unwrap();
        assert!(b.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_row_matches_dot_product() {
        let phi = gen_sensing_matrix(16, 1, 11).unwrap();
        let x: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).sin()).collect();
        let b = compressive_sample(&phi, &SignalBlock::new(x.clone())).unwrap();
        let dot: f64 = (0..16).map(|k| phi.rows()[(0, k)] * x[k]).sum();
        assert!((b.values[0] - dot).abs() <= 1e-12);
    }

    #[test]
    fn sampling_is_homogeneous() {
        let phi = gen_sensing_matrix(12, 5, 21).unwrap();
        let x: Vec<f64> = (0..12).map(|i| (i as f64 * 1.3).cos()).collect();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let b = compressive_sample(&phi, &SignalBlock::new(x)).unwrap();
        let b2 = compressive_sample(&phi, &SignalBlock::new(x2)).unwrap();
        for i in 0..5 {
            assert!((b2.values[i] - 2.0 * b.values[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn sampling_is_non_expansive() {
        for seed in 0..20 {
            let phi = gen_sensing_matrix(32, 7, seed).unwrap();
            let x: Vec<f64> = (0..32).map(|i| ((i as f64) + seed as f64).sin()).collect();
            let block = SignalBlock::new(x);
            let b = compressive_sample(&phi, &block).unwrap();
            assert!(b.values.norm() <= block.l2_norm() + 1e-10);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let phi = gen_sensing_matrix(8, 2, 0).unwrap();
        assert!(compressive_sample(&phi, &SignalBlock::new(vec![0.0; 9])).is_err());
    }

    #[test]
    fn measurement_count_rule() {
        assert_eq!(measurement_count(1024, 5.0).unwrap(), 204);
        assert_eq!(measurement_count(100, 1.0).unwrap(), 100);
        assert_eq!(measurement_count(3, 5.0).unwrap(), 1);
        assert!(measurement_count(10, 0.5).is_err());
    }
}
