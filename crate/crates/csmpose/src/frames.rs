//! Numbered frame paths and frame ranges.

use std::path::PathBuf;

use crate::error::{CliError, CliResult};

/// A printf-style path with one integer placeholder (`%d`, `%05d`, `%5d`);
/// `%%` is a literal percent sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramePattern {
    prefix: String,
    suffix: String,
    width: usize,
    zero_pad: bool,
}

impl FramePattern {
    pub fn parse(pattern: &str) -> CliResult<Self> {
        let bad = |m: &str| CliError::Usage(format!("frame pattern `{pattern}`: {m}"));
        let mut parts = (String::new(), String::new());
        let mut spec = None;
        let mut chars = pattern.chars().peekable();
        while let Some(c) = chars.next() {
            let out = if spec.is_some() { &mut parts.1 } else { &mut parts.0 };
            if c != '%' {
                out.push(c);
                continue;
            }
            if chars.peek() == Some(&'%') {
                chars.next();
                out.push('%');
                continue;
            }
            if spec.is_some() {
                return Err(bad("more than one placeholder"));
            }
            let mut digits = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(d);
                chars.next();
            }
            if chars.next() != Some('d') {
                return Err(bad("only %d placeholders are supported"));
            }
            let zero_pad = digits.starts_with('0');
            let width = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad("bad width"))? };
            spec = Some((width, zero_pad));
        }
        let (width, zero_pad) = spec.ok_or_else(|| bad("no %d placeholder"))?;
        Ok(FramePattern { prefix: parts.0, suffix: parts.1, width, zero_pad })
    }

    pub fn path(&self, index: usize) -> PathBuf {
        let n = if self.zero_pad {
            format!("{index:0w$}", w = self.width)
        } else {
            format!("{index:w$}", w = self.width)
        };
        PathBuf::from(format!("{}{n}{}", self.prefix, self.suffix))
    }
}

/// `A..B` (end exclusive) or `A..=B` (end inclusive), as a list of indices.
pub fn parse_range(text: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Usage(format!("range `{text}` must look like A..B or A..=B"));
    let (a, b, inclusive) = match text.split_once("..=") {
        Some((a, b)) => (a, b, true),
        None => {
            let (a, b) = text.split_once("..").ok_or_else(bad)?;
            (a, b, false)
        }
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    let end = if inclusive { b.checked_add(1).ok_or_else(bad)? } else { b };
    if end <= a {
        return Err(CliError::Usage(format!("range `{text}` is empty")));
    }
    Ok((a..end).collect())
}

/// Stem of per-frame output files.
pub fn frame_stem(index: usize) -> String {
    format!("frame_{index:05}")
}
