//! Plain-text sequence files: `#` header lines, then one `re,im` pair per
//! line. Values are written in shortest round-trip exponent form, so a
//! reload reproduces every bit.

use std::fmt::Write as _;
use std::path::Path;

use isacjam_core::{Complex64, ComplexSequence};

use crate::error::{WorkbenchError, WorkbenchResult};

const HASH_KEY: &str = "config-sha256:";

#[derive(Debug, Clone, PartialEq)]
pub struct SavedSequence {
    /// Hash recorded in the header, if any.
    pub config_hash: Option<String>,
    pub samples: ComplexSequence,
}

pub fn format_sequence(name: &str, config_hash: &str, x: &[Complex64]) -> String {
    let mut out = String::with_capacity(48 * x.len() + 128);
    let _ = writeln!(out, "# isacjam sequence: {name}");
    let _ = writeln!(out, "# {HASH_KEY} {config_hash}");
    let _ = writeln!(out, "# length: {}", x.len());
    for v in x {
        let _ = writeln!(out, "{:e},{:e}", v.re, v.im);
    }
    out
}

pub fn parse_sequence(text: &str, path: &Path) -> WorkbenchResult<SavedSequence> {
    let bad = |line: usize, message: String| WorkbenchError::Format {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut config_hash = None;
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(h) = comment.trim().strip_prefix(HASH_KEY) {
                config_hash = Some(h.trim().to_string());
            }
            continue;
        }
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| bad(i + 1, format!("expected `re,im`, found `{line}`")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| bad(i + 1, format!("`{}`: {e}", s.trim())))
        };
        let v = Complex64::new(parse(re)?, parse(im)?);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(bad(i + 1, "non-finite sample".into()));
        }
        samples.push(v);
    }
    let samples = ComplexSequence::new(samples).map_err(|e| bad(0, e.to_string()))?;
    Ok(SavedSequence { config_hash, samples })
}

pub fn save_sequence(path: &Path, name: &str, config_hash: &str, x: &[Complex64]) -> WorkbenchResult<()> {
    std::fs::write(path, format_sequence(name, config_hash, x)).map_err(|source| WorkbenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_sequence(path: &Path) -> WorkbenchResult<SavedSequence> {
    let text = std::fs::read_to_string(path).map_err(|source| WorkbenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_sequence(&text, path)
}
