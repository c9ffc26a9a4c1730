//! Corpus ingestion: audio files, phoneme transcripts, block splitting, and
//! a license-free synthetic corpus whose energy concentrates in low DCT
//! frequencies the way voiced speech does.

pub mod phn;
pub mod wav;

pub use phn::{extract_phoneme, parse_transcript, PhonemeSegment};
pub use wav::{read_raw_pcm16, read_wav, write_wav};

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::block::SignalBlock;
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::transform::{dct_inverse, CoefficientVector};

/// Block size cap for the recovery problems.
pub const BLOCK_SIZE: usize = 1024;

/// Cut a long vector into consecutive 1024-sample blocks plus a remainder
/// block when the length is not a multiple; a 1025-sample vector becomes a
/// 1024-sample block and a 1-sample block.
pub fn split_blocks(vector: &SignalBlock) -> Result<Vec<SignalBlock>> {
    vector.validate()?;
    Ok(vector
        .samples
        .chunks(BLOCK_SIZE)
        .map(|chunk| {
            let mut b = SignalBlock::with_source(
                chunk.to_vec(),
                vector.sample_rate,
                vector.source_id.clone(),
            );
            b.phoneme_label = vector.phoneme_label.clone();
            b
        })
        .collect())
}

/// Configuration for the synthetic structured corpus.
///
/// Each generated block is built in the DCT domain: `sparsity` coefficients
/// are active at indices below `band_fraction * block_length` with
/// magnitudes following a decaying low-frequency profile, every other
/// coefficient sits at `noise_floor` relative scale, and the time signal is
/// the inverse transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticCorpusConfig {
    pub n_train: usize,
    pub n_test: usize,
    pub block_length: usize,
    pub sparsity: usize,
    pub band_fraction: f64,
    pub noise_floor: f64,
    pub seed: u64,
}

impl Default for SyntheticCorpusConfig {
    fn default() -> Self {
        SyntheticCorpusConfig {
            n_train: 200,
            n_test: 50,
            block_length: 256,
            sparsity: 10,
            band_fraction: 0.25,
            noise_floor: 0.01,
            seed: 1,
        }
    }
}

impl SyntheticCorpusConfig {
    pub fn band_width(&self) -> usize {
        ((self.band_fraction * self.block_length as f64).floor() as usize)
            .clamp(1, self.block_length)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_train == 0 || self.n_test == 0 {
            return Err(Error::InvalidConfig(
                "synthetic corpus needs at least one train and one test block".into(),
            ));
        }
        if self.block_length == 0 || self.block_length > BLOCK_SIZE {
            return Err(Error::InvalidConfig(format!(
                "block_length must be in 1..={BLOCK_SIZE}, got {}",
                self.block_length
            )));
        }
        if self.sparsity == 0 || self.sparsity > self.block_length {
            return Err(Error::InvalidConfig(format!(
                "sparsity must be in 1..=block_length, got {}",
                self.sparsity
            )));
        }
        if !(self.band_fraction > 0.0 && self.band_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "band_fraction must be in (0, 1], got {}",
                self.band_fraction
            )));
        }
        if self.sparsity > self.band_width() {
            return Err(Error::InvalidConfig(format!(
                "sparsity {} exceeds the {}-coefficient low-frequency band",
                self.sparsity,
                self.band_width()
            )));
        }
        if !self.noise_floor.is_finite() || self.noise_floor < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise_floor must be a nonnegative real, got {}",
                self.noise_floor
            )));
        }
        Ok(())
    }
}

/// Overall time-domain amplitude of generated blocks, kept small enough
/// that samples stay well inside [-1, 1].
const SYNTH_AMPLITUDE: f64 = 0.1;

fn synth_block(cfg: &SyntheticCorpusConfig, seed: u64, id: String) -> Result<SignalBlock> {
    let n = cfg.block_length;
    let band = cfg.band_width();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Formant-like spectral shape: the S lowest bins carry the energy with
    // a decaying profile and per-block gain variation, everything else sits
    // at the noise floor. The stable shape is what makes a train-set
    // envelope informative about unseen test blocks.
    let mut coeffs = vec![0.0; n];
    for (j, c) in coeffs.iter_mut().enumerate().take(cfg.sparsity) {
        let profile = (-2.0 * j as f64 / band as f64).exp();
        *c = profile * rng.gen_range(0.8..1.2);
    }
    for c in coeffs.iter_mut().skip(cfg.sparsity) {
        // Constant magnitude, random sign: keeps every out-of-band
        // coefficient exactly at the noise floor.
        *c = if rng.gen_bool(0.5) {
            cfg.noise_floor
        } else {
            -cfg.noise_floor
        };
    }
    for c in coeffs.iter_mut() {
        *c *= SYNTH_AMPLITUDE;
    }

    let mut block = dct_inverse(&CoefficientVector::new(coeffs))?;
    block.source_id = id;
    block.phoneme_label = Some("synth".into());
    Ok(block)
}

const TRAIN_TAG: u64 = 0;
const TEST_TAG: u64 = 1;

/// Deterministic (train, test) corpora drawn from the same distribution on
/// disjoint seed streams.
pub fn generate_synthetic_corpus(
    cfg: &SyntheticCorpusConfig,
) -> Result<(Vec<SignalBlock>, Vec<SignalBlock>)> {
    cfg.validate()?;
    let train = (0..cfg.n_train)
        .map(|i| {
            synth_block(
                cfg,
                derive_seed(cfg.seed, TRAIN_TAG, i as u64, 0),
                format!("synth-train-{i}"),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let test = (0..cfg.n_test)
        .map(|i| {
            synth_block(
                cfg,
                derive_seed(cfg.seed, TEST_TAG, i as u64, 0),
                format!("synth-test-{i}"),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((train, test))
}

/// One `<audio-path> <transcript-path>` pair from a corpus manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub audio: PathBuf,
    pub transcript: PathBuf,
}

/// Parse a manifest of audio/transcript pairs; relative paths resolve
/// against the manifest's directory. `#` starts a comment line.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    let source = path.display().to_string();
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (audio, transcript) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(t), None) => (a, t),
            _ => {
                return Err(Error::parse(
                    &source,
                    i + 1,
                    format!("expected `<audio-path> <transcript-path>`, found {line:?}"),
                ))
            }
        };
        let resolve = |p: &str| {
            let pb = PathBuf::from(p);
            if pb.is_absolute() {
                pb
            } else {
                base.join(pb)
            }
        };
        entries.push(ManifestEntry {
            audio: resolve(audio),
            transcript: resolve(transcript),
        });
    }
    Ok(entries)
}

/// Scan a TIMIT-style directory tree for audio/transcript pairs under the
/// given partition subdirectory ("TRAIN" or "TEST", case-insensitive).
/// Audio must already be converted from NIST SPHERE to plain WAV.
pub fn scan_timit_dir(root: &Path, partition: &str) -> Result<Vec<ManifestEntry>> {
    let part_dir = fs::read_dir(root)
        .map_err(|e| Error::io(root, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .find(|p| {
            p.is_dir()
                && p.file_name()
                    .map(|n| n.to_string_lossy().eq_ignore_ascii_case(partition))
                    .unwrap_or(false)
        })
        .ok_or_else(|| {
            Error::InvalidConfig(format!("no {partition} partition under {}", root.display()))
        })?;
    let mut entries = Vec::new();
    let mut stack = vec![part_dir];
    while let Some(dir) = stack.pop() {
        for item in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let path = item.map_err(|e| Error::io(&dir, e))?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path
                .extension()
                .map(|e| e.to_string_lossy().eq_ignore_ascii_case("wav"))
                .unwrap_or(false)
            {
                for ext in ["phn", "PHN"] {
                    let transcript = path.with_extension(ext);
                    if transcript.is_file() {
                        entries.push(ManifestEntry {
                            audio: path.clone(),
                            transcript,
                        });
                        break;
                    }
                }
            }
        }
    }
    entries.sort_by(|a, b| a.audio.cmp(&b.audio));
    Ok(entries)
}

/// A phoneme instance split into recovery-sized blocks.
#[derive(Debug, Clone)]
pub struct LabeledVector {
    pub id: String,
    pub blocks: Vec<SignalBlock>,
}

/// Ingest every instance of `label` across the manifest entries, splitting
/// each instance into 1024-sample blocks plus remainder. Block-length
/// statistics are logged since corpora differ in how many full-size blocks
/// they produce.
pub fn load_phoneme_corpus(entries: &[ManifestEntry], label: &str) -> Result<Vec<LabeledVector>> {
    let mut vectors = Vec::new();
    for entry in entries {
        let audio = read_wav(&entry.audio)?;
        let segments = parse_transcript(&entry.transcript)?;
        for instance in extract_phoneme(&audio, &segments, label)? {
            let id = instance.source_id.clone();
            let blocks = split_blocks(&instance)?;
            vectors.push(LabeledVector { id, blocks });
        }
    }
    let blocks: usize = vectors.iter().map(|v| v.blocks.len()).sum();
    if blocks > 0 {
        let full: usize = vectors
            .iter()
            .flat_map(|v| &v.blocks)
            .filter(|b| b.len() == BLOCK_SIZE)
            .count();
        log::info!(
            "ingested {} {label:?} vectors -> {blocks} blocks, {full} of length {BLOCK_SIZE} ({:.1}%)",
            vectors.len(),
            100.0 * full as f64 / blocks as f64
        );
    }
    Ok(vectors)
}
