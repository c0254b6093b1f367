use crate::error::{Error, Result};

/// Observations from text with one decimal number per line. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_observations(text: &str) -> Result<Vec<f64>> {
    let mut ys = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let s = line.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let y: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: `{s}` is not a number", k + 1)))?;
        if !y.is_finite() {
            return Err(Error::Parse(format!("line {}: observation must be finite, got {s}", k + 1)));
        }
        ys.push(y);
    }
    Ok(ys)
}

pub fn read_observations(path: &std::path::Path) -> Result<Vec<f64>> {
    parse_observations(&std::fs::read_to_string(path)?)
}
