//! Phonetic transcript parsing (TIMIT .PHN convention) and segment
//! extraction.

use std::fs;
use std::path::Path;

use crate::block::SignalBlock;
use crate::error::{Error, Result};

/// One labeled span of samples, end exclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhonemeSegment {
    pub start_sample: usize,
    pub end_sample: usize,
    pub label: String,
}

/// Parse `<start> <end> <label>` lines.
pub fn parse_transcript(path: &Path) -> Result<Vec<PhonemeSegment>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_transcript_text(&text, &path.display().to_string())
}

pub fn parse_transcript_text(text: &str, source: &str) -> Result<Vec<PhonemeSegment>> {
    let mut segments = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (start, end, label) = match (fields.next(), fields.next(), fields.next(), fields.next())
        {
            (Some(s), Some(e), Some(l), None) => (s, e, l),
            _ => {
                return Err(Error::parse(
                    source,
                    line_no,
                    format!("expected `<start> <end> <label>`, found {line:?}"),
                ))
            }
        };
        let start: usize = start
            .parse()
            .map_err(|_| Error::parse(source, line_no, format!("bad start sample {start:?}")))?;
        let end: usize = end
            .parse()
            .map_err(|_| Error::parse(source, line_no, format!("bad end sample {end:?}")))?;
        if start >= end {
            return Err(Error::parse(
                source,
                line_no,
                format!("segment start {start} is not before end {end}"),
            ));
        }
        segments.push(PhonemeSegment {
            start_sample: start,
            end_sample: end,
            label: label.to_string(),
        });
    }
    Ok(segments)
}

/// Slice out every segment carrying `label`, one block per instance.
pub fn extract_phoneme(
    audio: &SignalBlock,
    segments: &[PhonemeSegment],
    label: &str,
) -> Result<Vec<SignalBlock>> {
    let mut out = Vec::new();
    for (i, seg) in segments.iter().enumerate() {
        if seg.label != label {
            continue;
        }
        if seg.end_sample > audio.len() {
            return Err(Error::Range(format!(
                "segment {i} ({}..{}) exceeds audio length {} in {:?}",
                seg.start_sample,
                seg.end_sample,
                audio.len(),
                audio.source_id
            )));
        }
        let mut block = SignalBlock::with_source(
            audio.samples[seg.start_sample..seg.end_sample].to_vec(),
            audio.sample_rate,
            format!("{}#{}", audio.source_id, i),
        );
        block.phoneme_label = Some(label.to_string());
        out.push(block);
    }
    Ok(out)
}
