//! Orthonormal DCT-II analysis/synthesis.
//!
//! The sparsifying basis is the type-II discrete cosine transform with
//! orthonormal scaling: row 0 of the basis is scaled by sqrt(1/n), all
//! other rows by sqrt(2/n). The basis matrix is orthogonal, so synthesis
//! is simply its transpose (DCT-III with the same scaling).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::block::SignalBlock;
use crate::error::{Error, Result};

/// DCT-II coefficients of one signal block.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub values: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Self {
        CoefficientVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidInput("empty coefficient vector".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "non-finite entry in coefficient vector".into(),
            ));
        }
        Ok(())
    }
}

fn basis_cache() -> &'static Mutex<HashMap<usize, Arc<DMatrix<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DMatrix<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Orthonormal DCT-II basis for length `n`; row k is the k-th basis function.
///
/// Built once per length and shared; block lengths in practice come from a
/// handful of sizes so the cache stays small.
pub(crate) fn dct_basis(n: usize) -> Arc<DMatrix<f64>> {
    if let Some(b) = basis_cache().lock().unwrap().get(&n) {
        return Arc::clone(b);
    }
    let scale0 = (1.0 / n as f64).sqrt();
    let scale = (2.0 / n as f64).sqrt();
    let basis = DMatrix::from_fn(n, n, |k, j| {
        let w = if k == 0 { scale0 } else { scale };
        w * (PI * (2 * j + 1) as f64 * k as f64 / (2.0 * n as f64)).cos()
    });
    let basis = Arc::new(basis);
    basis_cache().lock().unwrap().insert(n, Arc::clone(&basis));
    basis
}

/// Forward orthonormal DCT-II: s = Psi x.
pub fn dct_forward(block: &SignalBlock) -> Result<CoefficientVector> {
    block.validate()?;
    let n = block.len();
    let x = DVector::from_column_slice(&block.samples);
    let s = &*dct_basis(n) * x;
    Ok(CoefficientVector::new(s.data.into()))
}

/// Inverse transform (DCT-III): x = Psi^T s. Exact inverse of [`dct_forward`]
/// up to floating-point roundoff since the basis is orthonormal.
pub fn dct_inverse(coeffs: &CoefficientVector) -> Result<SignalBlock> {
    coeffs.validate()?;
    let n = coeffs.len();
    let s = DVector::from_column_slice(&coeffs.values);
    let x = dct_basis(n).transpose() * s;
    Ok(SignalBlock::new(x.data.into()))
}
