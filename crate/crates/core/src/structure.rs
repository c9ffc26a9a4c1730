//! Learned per-coefficient bound envelopes in the DCT domain.
//!
//! An envelope is built from training blocks by transforming each block,
//! interpolating the coefficients to a fixed length of 1024, normalizing by
//! the l2 norm, and taking the element-wise min/max over the processed rows.
//! The envelope is later resampled back down to the block length being
//! recovered ("bound decimation").
//!
//! Resampling is linear interpolation on the coefficient index grid with
//! endpoints aligned, not Fourier resampling: bounds are envelopes rather
//! than band-limited signals, and interpolation cannot introduce ringing
//! that would put the lower bound above the upper one. Any residual order
//! violations after independent resampling of the two bounds are repaired
//! by swapping the offending pair.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::block::SignalBlock;
use crate::error::{Error, Result};
use crate::transform::dct_forward;

pub const ENVELOPE_LENGTH: usize = 1024;

/// Paired lower/upper bound vectors over normalized DCT coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureEnvelope {
    pub beta_l: Vec<f64>,
    pub beta_u: Vec<f64>,
    pub label: String,
    pub training_count: usize,
    pub created_from: String,
}

impl StructureEnvelope {
    pub fn validate(&self) -> Result<()> {
        if self.beta_l.len() != ENVELOPE_LENGTH || self.beta_u.len() != ENVELOPE_LENGTH {
            return Err(Error::InvalidDimension(format!(
                "envelope bounds must have length {ENVELOPE_LENGTH}"
            )));
        }
        for (i, (l, u)) in self.beta_l.iter().zip(&self.beta_u).enumerate() {
            if !l.is_finite() || !u.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite envelope bound at index {i}"
                )));
            }
            if l > u {
                return Err(Error::InvalidInput(format!(
                    "beta_l > beta_u at index {i}: {l} > {u}"
                )));
            }
        }
        Ok(())
    }
}

/// Linear interpolation of `values` onto `target` points with endpoints
/// aligned; the identity when lengths already match.
pub fn resample_to(values: &[f64], target: usize) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidInput(
            "cannot resample an empty vector".into(),
        ));
    }
    if target == 0 {
        return Err(Error::InvalidInput(
            "resample target must be positive".into(),
        ));
    }
    let k = values.len();
    if k == target {
        return Ok(values.to_vec());
    }
    if k == 1 {
        return Ok(vec![values[0]; target]);
    }
    if target == 1 {
        return Ok(vec![values[0]]);
    }
    let scale = (k - 1) as f64 / (target - 1) as f64;
    Ok((0..target)
        .map(|j| {
            let pos = j as f64 * scale;
            let lo = pos.floor() as usize;
            if lo + 1 >= k {
                values[k - 1]
            } else {
                let frac = pos - lo as f64;
                values[lo] * (1.0 - frac) + values[lo + 1] * frac
            }
        })
        .collect())
}

/// Build the envelope from training blocks: DCT, interpolate to 1024,
/// l2-normalize, then column-wise min/max over the processed rows.
///
/// All-zero blocks are skipped with a warning (normalization is undefined
/// for them); at least one usable block is required.
pub fn learn_envelope(training_blocks: &[SignalBlock], label: &str) -> Result<StructureEnvelope> {
    if training_blocks.is_empty() {
        return Err(Error::InvalidInput("empty training set".into()));
    }
    let mut beta_l = vec![f64::INFINITY; ENVELOPE_LENGTH];
    let mut beta_u = vec![f64::NEG_INFINITY; ENVELOPE_LENGTH];
    let mut processed = 0usize;
    let mut sources: Vec<String> = Vec::new();
    for block in training_blocks {
        if block.samples.iter().all(|&v| v == 0.0) {
            log::warn!(
                "skipping all-zero training block {:?} (l2 normalization undefined)",
                block.source_id
            );
            continue;
        }
        let coeffs = dct_forward(block)?;
        let stretched = resample_to(&coeffs.values, ENVELOPE_LENGTH)?;
        let norm = stretched.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            log::warn!(
                "skipping training block {:?}: coefficients vanish after resampling",
                block.source_id
            );
            continue;
        }
        for (j, v) in stretched.iter().enumerate() {
            let g = v / norm;
            if g < beta_l[j] {
                beta_l[j] = g;
            }
            if g > beta_u[j] {
                beta_u[j] = g;
            }
        }
        processed += 1;
        if !sources.contains(&block.source_id) && sources.len() < 4 {
            sources.push(block.source_id.clone());
        }
    }
    if processed == 0 {
        return Err(Error::InvalidInput(
            "no nonzero training blocks to learn from".into(),
        ));
    }
    let env = StructureEnvelope {
        beta_l,
        beta_u,
        label: label.to_string(),
        training_count: processed,
        created_from: sources.join(","),
    };
    env.validate()?;
    Ok(env)
}

/// Resample the stored bounds down to block length `n`, repairing any
/// interpolation-induced order violations by swapping the pair.
pub fn envelope_for_length(env: &StructureEnvelope, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    env.validate()?;
    if n == 0 {
        return Err(Error::InvalidInput("block length must be positive".into()));
    }
    if n > ENVELOPE_LENGTH {
        return Err(Error::UnsupportedSize(format!(
            "envelope covers lengths up to {ENVELOPE_LENGTH}, requested {n}"
        )));
    }
    if n == ENVELOPE_LENGTH {
        return Ok((env.beta_l.clone(), env.beta_u.clone()));
    }
    let mut lo = resample_to(&env.beta_l, n)?;
    let mut hi = resample_to(&env.beta_u, n)?;
    for j in 0..n {
        if lo[j] > hi[j] {
            std::mem::swap(&mut lo[j], &mut hi[j]);
        }
    }
    Ok((lo, hi))
}

/// Plain-text envelope file: three header lines then one `<beta_l> <beta_u>`
/// pair per line, full f64 precision.
pub fn save_envelope(env: &StructureEnvelope, path: &Path) -> Result<()> {
    env.validate()?;
    let mut out = String::with_capacity(ENVELOPE_LENGTH * 48);
    out.push_str(&format!("label={}\n", env.label));
    out.push_str(&format!("training_count={}\n", env.training_count));
    out.push_str(&format!("length={ENVELOPE_LENGTH}\n"));
    for (l, u) in env.beta_l.iter().zip(&env.beta_u) {
        out.push_str(&format!("{l:.17e} {u:.17e}\n"));
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn load_envelope(path: &Path) -> Result<StructureEnvelope> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let pathstr = path.display().to_string();
    let mut lines = text.lines().enumerate();

    let mut header = |key: &str| -> Result<String> {
        match lines.next() {
            Some((i, line)) => match line.split_once('=') {
                Some((k, v)) if k == key => Ok(v.to_string()),
                _ => Err(Error::parse(
                    &pathstr,
                    i + 1,
                    format!("expected `{key}=<value>`, found {line:?}"),
                )),
            },
            None => Err(Error::parse(&pathstr, 0, format!("missing `{key}` header"))),
        }
    };
    let label = header("label")?;
    let count_text = header("training_count")?;
    let length_text = header("length")?;

    let training_count: usize = count_text
        .parse()
        .map_err(|_| Error::parse(&pathstr, 2, format!("bad training_count {count_text:?}")))?;
    let length: usize = length_text
        .parse()
        .map_err(|_| Error::parse(&pathstr, 3, format!("bad length {length_text:?}")))?;
    if length != ENVELOPE_LENGTH {
        return Err(Error::parse(
            &pathstr,
            3,
            format!("envelope length must be {ENVELOPE_LENGTH}, found {length}"),
        ));
    }

    let mut beta_l = Vec::with_capacity(ENVELOPE_LENGTH);
    let mut beta_u = Vec::with_capacity(ENVELOPE_LENGTH);
    for (i, line) in lines {
        let line_no = i + 1;
        if beta_l.len() == ENVELOPE_LENGTH {
            return Err(Error::parse(
                &pathstr,
                line_no,
                format!("expected exactly {ENVELOPE_LENGTH} data rows, found more"),
            ));
        }
        let mut fields = line.split_whitespace();
        let (l, u) = match (fields.next(), fields.next(), fields.next()) {
            (Some(l), Some(u), None) => (l, u),
            _ => {
                return Err(Error::parse(
                    &pathstr,
                    line_no,
                    format!("expected `<beta_l> <beta_u>`, found {line:?}"),
                ))
            }
        };
        let l: f64 = l
            .parse()
            .map_err(|_| Error::parse(&pathstr, line_no, format!("bad float {l:?}")))?;
        let u: f64 = u
            .parse()
            .map_err(|_| Error::parse(&pathstr, line_no, format!("bad float {u:?}")))?;
        if l > u {
            return Err(Error::parse(
                &pathstr,
                line_no,
                format!("beta_l {l} exceeds beta_u {u}"),
            ));
        }
        beta_l.push(l);
        beta_u.push(u);
    }
    if beta_l.len() != ENVELOPE_LENGTH {
        return Err(Error::parse(
            &pathstr,
            3 + beta_l.len(),
            format!(
                "expected exactly {ENVELOPE_LENGTH} data rows, found {}",
                beta_l.len()
            ),
        ));
    }
    let env = StructureEnvelope {
        beta_l,
        beta_u,
        label,
        training_count,
        created_from: pathstr,
    };
    env.validate()?;
    Ok(env)
}
