//! Reading observations: one positive decimal per line, or a single-column
//! CSV with an optional header on the first line.

use std::path::Path;

use crate::error::{Error, Result};
use crate::vstat::Sample;

fn field(line: &str) -> &str {
    line.trim().trim_matches('"').trim()
}

/// Parses observations from text. Blank lines are skipped; a non-numeric
/// first line is taken as a header.
pub fn parse_observations(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        if line.contains(',') {
            let extra = line.split(',').skip(1).any(|f| !f.trim().is_empty());
            if extra {
                return Err(Error::Data {
                    line: line_no,
                    message: "expected a single column".to_string(),
                });
            }
        }
        let token = field(line.split(',').next().unwrap_or(""));
        match token.parse::<f64>() {
            Ok(v) if !v.is_finite() => {
                return Err(Error::Data {
                    line: line_no,
                    message: format!("non-finite value `{token}`"),
                })
            }
            Ok(v) if v <= 0.0 => {
                return Err(Error::Data {
                    line: line_no,
                    message: format!("non-positive value `{token}`"),
                })
            }
            Ok(v) => out.push(v),
            Err(_) if first => {}
            Err(_) => {
                return Err(Error::Data {
                    line: line_no,
                    message: format!("malformed number `{token}`"),
                })
            }
        }
    }
    Ok(out)
}

pub fn read_sample(path: &Path) -> Result<Sample> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Data {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    Sample::new(parse_observations(&text)?)
}
