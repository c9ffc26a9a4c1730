//! Mono 16-bit PCM WAV reading and writing, plus raw headerless PCM.
//!
//! Only the format this pipeline consumes is supported; anything else is
//! rejected with an error naming the offending header field. Samples map
//! to [-1, 1] by division by 32768.

use std::fs;
use std::path::Path;

use crate::block::SignalBlock;
use crate::error::{Error, Result};

const SCALE: f64 = 32768.0;

fn u16_le(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn u32_le(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

fn decode_pcm16(payload: &[u8]) -> Vec<f64> {
    payload
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / SCALE)
        .collect()
}

/// Read a mono PCM16 WAV file into a signal block scaled to [-1, 1].
pub fn read_wav(path: &Path) -> Result<SignalBlock> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::Format(format!(
            "{}: missing RIFF/WAVE signature",
            path.display()
        )));
    }

    let mut sample_rate = None;
    let mut data: Option<Vec<f64>> = None;
    let mut at = 12usize;
    while at + 8 <= bytes.len() {
        let id = &bytes[at..at + 4];
        let size = u32_le(&bytes, at + 4) as usize;
        let body_start = at + 8;
        let body_end = (body_start + size).min(bytes.len());
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(Error::Format(format!(
                        "{}: fmt chunk too short ({size} bytes)",
                        path.display()
                    )));
                }
                let format_tag = u16_le(&bytes, body_start);
                if format_tag != 1 {
                    return Err(Error::Format(format!(
                        "{}: format tag {format_tag} is not PCM (1)",
                        path.display()
                    )));
                }
                let channels = u16_le(&bytes, body_start + 2);
                if channels != 1 {
                    return Err(Error::Format(format!(
                        "{}: channel count {channels} is not mono",
                        path.display()
                    )));
                }
                let bits = u16_le(&bytes, body_start + 14);
                if bits != 16 {
                    return Err(Error::Format(format!(
                        "{}: bit depth {bits} is not 16",
                        path.display()
                    )));
                }
                sample_rate = Some(u32_le(&bytes, body_start + 4));
            }
            b"data" => {
                data = Some(decode_pcm16(&bytes[body_start..body_end]));
            }
            _ => {}
        }
        // Chunks are word-aligned.
        at = body_start + size + (size & 1);
    }

    let sample_rate = sample_rate
        .ok_or_else(|| Error::Format(format!("{}: no fmt chunk found", path.display())))?;
    let samples =
        data.ok_or_else(|| Error::Format(format!("{}: no data chunk found", path.display())))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(SignalBlock::with_source(samples, sample_rate, stem))
}

/// Read raw headerless 16-bit signed little-endian PCM at a caller-supplied
/// sample rate.
pub fn read_raw_pcm16(path: &Path, sample_rate: u32) -> Result<SignalBlock> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() % 2 != 0 {
        return Err(Error::Format(format!(
            "{}: odd byte count {} for 16-bit samples",
            path.display(),
            bytes.len()
        )));
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(SignalBlock::with_source(
        decode_pcm16(&bytes),
        sample_rate,
        stem,
    ))
}

/// Write a block as mono PCM16 WAV, rounding and clamping each sample.
pub fn write_wav(path: &Path, block: &SignalBlock) -> Result<()> {
    let payload_len = block.samples.len() * 2;
    let mut out = Vec::with_capacity(44 + payload_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + payload_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&block.sample_rate.to_le_bytes());
    out.extend_from_slice(&(block.sample_rate * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(payload_len as u32).to_le_bytes());
    for &v in &block.samples {
        let q = (v * SCALE).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
