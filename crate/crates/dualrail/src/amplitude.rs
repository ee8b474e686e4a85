//! Sampled spectral amplitudes as plain text: one `k re im` triple per line,
//! `#` starts a comment.

use std::path::Path;

use dualrail_core::wavepacket::SpectralAmplitude;
use dualrail_core::C64;

use crate::error::line_col;
use crate::{AppError, AppResult};

/// Default normalization tolerance for sampled amplitudes read from disk.
pub const SAMPLED_NORM_TOLERANCE: f64 = 1e-6;

pub fn parse_samples(text: &str, origin: &str) -> AppResult<Vec<(f64, C64)>> {
    let mut samples = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let content = line.split('#').next().unwrap_or("");
        let mut fields = Vec::with_capacity(3);
        let mut pos = 0;
        for token in content.split_whitespace() {
            let start = pos + content[pos..].find(token).unwrap_or(0);
            pos = start + token.len();
            fields.push((offset + start, token));
        }
        if !fields.is_empty() {
            if fields.len() != 3 {
                let (l, c) = line_col(text, fields[0].0);
                return Err(AppError::Parse {
                    origin: origin.to_owned(),
                    line: l,
                    column: c,
                    message: format!("expected `k re im`, found {} fields", fields.len()),
                });
            }
            let mut vals = [0.0; 3];
            for (v, &(at, token)) in vals.iter_mut().zip(&fields) {
                *v = token.parse().map_err(|_| {
                    let (l, c) = line_col(text, at);
                    AppError::Parse {
                        origin: origin.to_owned(),
                        line: l,
                        column: c,
                        message: format!("`{token}` is not a number"),
                    }
                })?;
            }
            samples.push((vals[0], C64::new(vals[1], vals[2])));
        }
        offset += line.len();
    }
    Ok(samples)
}

pub fn load_amplitude(path: &Path) -> AppResult<SpectralAmplitude> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let samples = parse_samples(&text, &path.display().to_string())?;
    Ok(SpectralAmplitude::sampled(samples, SAMPLED_NORM_TOLERANCE)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let s = parse_samples("# header\n\n1.0 0.5 -0.25 # tail\n  2 1e-3 0\n", "t").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0], (1.0, C64::new(0.5, -0.25)));
        assert_eq!(s[1].1.re, 1e-3);
    }

    #[test]
    fn bad_token_reports_position() {
        let err = parse_samples("1 2 3\n4 five 6\n", "amp.txt").unwrap_err();
        match err {
            AppError::Parse {
                line,
                column,
                message,
                ..
            } => {
                assert_eq!((line, column), (2, 3));
                assert!(message.contains("five"));
            }
            other => panic!("{other}"),
        }
    }
}
