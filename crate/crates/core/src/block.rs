//! Time-domain signal blocks.

use crate::error::{Error, Result};

/// Sample rate assumed throughout when none is known (16 kHz speech).
pub const DEFAULT_SAMPLE_RATE: u32 = 16_000;

/// A finite real-valued time-domain sample vector with provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalBlock {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    pub source_id: String,
    pub phoneme_label: Option<String>,
}

impl SignalBlock {
    pub fn new(samples: Vec<f64>) -> Self {
        SignalBlock {
            samples,
            sample_rate: DEFAULT_SAMPLE_RATE,
            source_id: String::new(),
            phoneme_label: None,
        }
    }

    pub fn with_source(samples: Vec<f64>, sample_rate: u32, source_id: impl Into<String>) -> Self {
        SignalBlock {
            samples,
            sample_rate,
            source_id: source_id.into(),
            phoneme_label: None,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Nonempty with finite entries; all operations consuming blocks assume this.
    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::InvalidInput("empty signal block".into()));
        }
        if let Some(v) = self.samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite sample {v} in block {:?}",
                self.source_id
            )));
        }
        Ok(())
    }
}
