//! The frame-file format: UTF-8 text, `#` comments, a `frame <n> <N>`
//! header, N rows of 2n decimals (re/im interleaved), and optional
//! `weights` / `probs` rows. Serialization uses 17 significant digits so a
//! save/load round trip is bit-exact.

use crate::CliError;
use optidual::erasure::{ProbabilitySequence, WeightSequence};
use optidual::frame::Frame;
use optidual::numerics::{Complex64, Vector};
use std::path::Path;

#[derive(Debug, Clone)]
pub struct FrameFile {
    pub frame: Frame,
    pub weights: Option<WeightSequence>,
    pub probabilities: Option<ProbabilitySequence>,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Tokens of one line with their 1-based column positions; text after `#`
/// is a comment.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = match line.find('#') {
        Some(idx) => &line[..idx],
        None => line,
    };
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &body[s..]));
    }
    out
}

fn parse_f64(lineno: usize, column: usize, token: &str) -> Result<f64, CliError> {
    let value: f64 = token
        .parse()
        .map_err(|_| parse_err(lineno, column, format!("expected a number, got {token:?}")))?;
    if !value.is_finite() {
        return Err(parse_err(lineno, column, "non-finite value"));
    }
    Ok(value)
}

fn parse_usize(lineno: usize, column: usize, token: &str) -> Result<usize, CliError> {
    token
        .parse()
        .map_err(|_| parse_err(lineno, column, format!("expected a count, got {token:?}")))
}

pub fn parse_frame_text(text: &str) -> Result<FrameFile, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, tokens(l)))
        .filter(|(_, t)| !t.is_empty());

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty file: expected `frame <n> <N>`"))?;
    if header[0].1 != "frame" {
        return Err(parse_err(
            header_line,
            header[0].0,
            "expected the `frame <n> <N>` header",
        ));
    }
    if header.len() != 3 {
        return Err(parse_err(
            header_line,
            header[0].0,
            "header must be `frame <n> <N>`",
        ));
    }
    let dim = parse_usize(header_line, header[1].0, header[1].1)?;
    let count = parse_usize(header_line, header[2].0, header[2].1)?;
    if dim == 0 || count == 0 {
        return Err(parse_err(header_line, header[1].0, "n and N must be >= 1"));
    }

    let mut vectors = Vec::with_capacity(count);
    for _ in 0..count {
        let (lineno, toks) = lines
            .next()
            .ok_or_else(|| parse_err(header_line, 1, format!("expected {count} vector rows")))?;
        if toks.len() != 2 * dim {
            return Err(parse_err(
                lineno,
                toks[0].0,
                format!(
                    "expected {} numbers (re im pairs), got {}",
                    2 * dim,
                    toks.len()
                ),
            ));
        }
        let mut entries = Vec::with_capacity(dim);
        for pair in toks.chunks(2) {
            let re = parse_f64(lineno, pair[0].0, pair[0].1)?;
            let im = parse_f64(lineno, pair[1].0, pair[1].1)?;
            entries.push(Complex64::new(re, im));
        }
        vectors.push(Vector::new(entries).map_err(CliError::Core)?);
    }

    let mut weights = None;
    let mut probabilities = None;
    for (lineno, toks) in lines {
        let key = toks[0].1;
        let values: Vec<f64> = toks[1..]
            .iter()
            .map(|(c, t)| parse_f64(lineno, *c, t))
            .collect::<Result<_, _>>()?;
        match key {
            "weights" => {
                if weights.is_some() {
                    return Err(parse_err(lineno, toks[0].0, "duplicate weights row"));
                }
                if values.len() != count {
                    return Err(parse_err(
                        lineno,
                        toks[0].0,
                        format!("weights row needs {count} values"),
                    ));
                }
                let parsed = WeightSequence::strict(values.clone(), dim)
                    .or_else(|_| WeightSequence::relaxed(values, dim))
                    .map_err(CliError::Core)?;
                weights = Some(parsed);
            }
            "probs" => {
                if probabilities.is_some() {
                    return Err(parse_err(lineno, toks[0].0, "duplicate probs row"));
                }
                if values.len() != count {
                    return Err(parse_err(
                        lineno,
                        toks[0].0,
                        format!("probs row needs {count} values"),
                    ));
                }
                probabilities = Some(ProbabilitySequence::new(values).map_err(CliError::Core)?);
            }
            other => {
                return Err(parse_err(
                    lineno,
                    toks[0].0,
                    format!("unexpected row {other:?} (wanted `weights` or `probs`)"),
                ));
            }
        }
    }

    let frame = Frame::new(vectors).map_err(CliError::Core)?;
    Ok(FrameFile {
        frame,
        weights,
        probabilities,
    })
}

pub fn load_frame_file(path: &Path) -> Result<FrameFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_frame_text(&text)
}

/// Full-precision decimal with a guaranteed bit-exact round trip.
pub fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render_frame_text(
    title: Option<&str>,
    frame: &Frame,
    weights: Option<&WeightSequence>,
    probabilities: Option<&ProbabilitySequence>,
) -> String {
    let mut out = String::new();
    if let Some(t) = title {
        out.push_str(&format!("# {t}\n"));
    }
    out.push_str(&format!("frame {} {}\n", frame.dim(), frame.len()));
    for v in frame.vectors() {
        let row: Vec<String> = v
            .entries()
            .iter()
            .flat_map(|z| [full_precision(z.re), full_precision(z.im)])
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    if let Some(q) = weights {
        let row: Vec<String> = q.values().iter().map(|&x| full_precision(x)).collect();
        out.push_str(&format!("weights {}\n", row.join(" ")));
    }
    if let Some(p) = probabilities {
        let row: Vec<String> = p.values().iter().map(|&x| full_precision(x)).collect();
        out.push_str(&format!("probs {}\n", row.join(" ")));
    }
    out
}
