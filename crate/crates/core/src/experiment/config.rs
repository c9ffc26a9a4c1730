//! Flat `key = value` experiment configuration files.
//!
//! Every field of [`ExperimentConfig`] (and of the synthetic corpus when
//! `corpus = synthetic`) has a key; unknown keys are rejected so typos
//! cannot silently fall back to defaults. `#` starts a comment.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use super::{CorpusSource, ExperimentConfig};
use crate::corpus::SyntheticCorpusConfig;
use crate::error::{Error, Result};

const KNOWN_KEYS: &[&str] = &[
    "corpus",
    "n_train",
    "n_test",
    "block_length",
    "sparsity",
    "band_fraction",
    "noise_floor",
    "corpus_seed",
    "train_manifest",
    "test_manifest",
    "phoneme_label",
    "cr",
    "epsilon",
    "trials_per_vector",
    "base_seed",
    "methods",
    "envelope",
    "sensing",
    "histogram_bins",
    "paired",
    "alpha_weight",
    "max_test_vectors",
];

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("")).to_path_buf();
    parse_config_impl(&text, &path.display().to_string(), &base)
}

/// Parse config text; relative paths resolve against the current directory.
pub fn parse_config(text: &str, source: &str) -> Result<ExperimentConfig> {
    parse_config_impl(text, source, Path::new(""))
}

fn parse_config_impl(text: &str, source: &str, base: &Path) -> Result<ExperimentConfig> {
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::parse(
                source,
                line_no,
                format!("expected `key = value`, found {raw:?}"),
            )
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::parse(
                source,
                line_no,
                format!("unknown config key {key:?}"),
            ));
        }
        if !seen.insert(key.clone()) {
            return Err(Error::parse(
                source,
                line_no,
                format!("duplicate config key {key:?}"),
            ));
        }
        pairs.push((line_no, key, value));
    }

    let mut cfg = ExperimentConfig::default();
    let mut synth = SyntheticCorpusConfig::default();
    let mut corpus_kind = "synthetic".to_string();
    let mut train_manifest: Option<PathBuf> = None;
    let mut test_manifest: Option<PathBuf> = None;
    let mut phoneme_label: Option<String> = None;

    let resolve = |p: &str| {
        let pb = PathBuf::from(p);
        if pb.is_absolute() || base.as_os_str().is_empty() {
            pb
        } else {
            base.join(pb)
        }
    };

    for (line_no, key, value) in pairs {
        let bad = |what: &str| Error::parse(source, line_no, format!("bad {what}: {value:?}"));
        match key.as_str() {
            "corpus" => {
                if value != "synthetic" && value != "manifest" {
                    return Err(Error::parse(
                        source,
                        line_no,
                        format!("corpus must be `synthetic` or `manifest`, found {value:?}"),
                    ));
                }
                corpus_kind = value;
            }
            "n_train" => synth.n_train = value.parse().map_err(|_| bad("n_train"))?,
            "n_test" => synth.n_test = value.parse().map_err(|_| bad("n_test"))?,
            "block_length" => {
                synth.block_length = value.parse().map_err(|_| bad("block_length"))?
            }
            "sparsity" => synth.sparsity = value.parse().map_err(|_| bad("sparsity"))?,
            "band_fraction" => {
                synth.band_fraction = value.parse().map_err(|_| bad("band_fraction"))?
            }
            "noise_floor" => synth.noise_floor = value.parse().map_err(|_| bad("noise_floor"))?,
            "corpus_seed" => synth.seed = value.parse().map_err(|_| bad("corpus_seed"))?,
            "train_manifest" => train_manifest = Some(resolve(&value)),
            "test_manifest" => test_manifest = Some(resolve(&value)),
            "phoneme_label" => phoneme_label = Some(value),
            "cr" => cfg.cr = value.parse().map_err(|_| bad("cr"))?,
            "epsilon" => cfg.epsilon = value.parse().map_err(|_| bad("epsilon"))?,
            "trials_per_vector" => {
                cfg.trials_per_vector = value.parse().map_err(|_| bad("trials_per_vector"))?
            }
            "base_seed" => cfg.base_seed = value.parse().map_err(|_| bad("base_seed"))?,
            "methods" => cfg.methods = value.parse()?,
            "envelope" => cfg.envelope_path = Some(resolve(&value)),
            "sensing" => cfg.sensing = value.parse()?,
            "histogram_bins" => {
                cfg.histogram_bins = value.parse().map_err(|_| bad("histogram_bins"))?
            }
            "paired" => {
                cfg.paired = match value.as_str() {
                    "true" => true,
                    "false" => false,
                    _ => return Err(bad("paired flag (true/false)")),
                }
            }
            "alpha_weight" => cfg.alpha_weight = value.parse().map_err(|_| bad("alpha_weight"))?,
            "max_test_vectors" => {
                cfg.max_test_vectors = value.parse().map_err(|_| bad("max_test_vectors"))?
            }
            _ => unreachable!("key validated above"),
        }
    }

    cfg.corpus = if corpus_kind == "synthetic" {
        CorpusSource::Synthetic(synth)
    } else {
        let train = train_manifest.ok_or_else(|| {
            Error::InvalidConfig("corpus = manifest requires train_manifest".into())
        })?;
        let test = test_manifest.ok_or_else(|| {
            Error::InvalidConfig("corpus = manifest requires test_manifest".into())
        })?;
        let label = phoneme_label.ok_or_else(|| {
            Error::InvalidConfig("corpus = manifest requires phoneme_label".into())
        })?;
        CorpusSource::Manifest { train, test, label }
    };

    cfg.validate()?;
    Ok(cfg)
}

/// Human-readable dump of every resolved field, printed before a run.
pub fn config_summary(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    match &cfg.corpus {
        CorpusSource::Synthetic(s) => {
            out.push_str("corpus = synthetic\n");
            out.push_str(&format!("n_train = {}\n", s.n_train));
            out.push_str(&format!("n_test = {}\n", s.n_test));
            out.push_str(&format!("block_length = {}\n", s.block_length));
            out.push_str(&format!("sparsity = {}\n", s.sparsity));
            out.push_str(&format!("band_fraction = {}\n", s.band_fraction));
            out.push_str(&format!("noise_floor = {}\n", s.noise_floor));
            out.push_str(&format!("corpus_seed = {}\n", s.seed));
        }
        CorpusSource::Manifest { train, test, label } => {
            out.push_str("corpus = manifest\n");
            out.push_str(&format!("train_manifest = {}\n", train.display()));
            out.push_str(&format!("test_manifest = {}\n", test.display()));
            out.push_str(&format!("phoneme_label = {label}\n"));
        }
    }
    out.push_str(&format!("cr = {}\n", cfg.cr));
    out.push_str(&format!("epsilon = {}\n", cfg.epsilon));
    out.push_str(&format!("trials_per_vector = {}\n", cfg.trials_per_vector));
    out.push_str(&format!("base_seed = {}\n", cfg.base_seed));
    out.push_str(&format!("methods = {}\n", cfg.methods));
    match &cfg.envelope_path {
        Some(p) => out.push_str(&format!("envelope = {}\n", p.display())),
        None => out.push_str("envelope = (learned from training corpus)\n"),
    }
    out.push_str(&format!("sensing = {}\n", cfg.sensing));
    out.push_str(&format!("histogram_bins = {}\n", cfg.histogram_bins));
    out.push_str(&format!("paired = {}\n", cfg.paired));
    out.push_str(&format!("alpha_weight = {}\n", cfg.alpha_weight));
    out.push_str(&format!("max_test_vectors = {}\n", cfg.max_test_vectors));
    out
}
