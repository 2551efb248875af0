use std::path::Path;

use slicereg::{eval, QSeries, Quaternion};

use super::read_series;
use crate::config::RunConfig;
use crate::error::Result;
use crate::report::{emit, to_json};

pub fn cmd_star(config: &RunConfig, left: &Path, right: &Path) -> Result<QSeries> {
    let f = read_series(left)?;
    let g = read_series(right)?;
    let h = f.star(&g);
    emit(config, &to_json(&h))?;
    Ok(h)
}

pub fn cmd_recip(config: &RunConfig, input: &Path) -> Result<QSeries> {
    let f = read_series(input)?;
    let h = f.regular_reciprocal()?;
    emit(config, &to_json(&h))?;
    Ok(h)
}

pub fn cmd_eval(config: &RunConfig, input: &Path, q: Quaternion) -> Result<Quaternion> {
    let f = read_series(input)?;
    let v = eval(&f, q);
    emit(config, &to_json(&v))?;
    Ok(v)
}

/// Accepts `x0,x1,x2,x3` or a JSON array of four numbers.
pub fn parse_quaternion(text: &str) -> std::result::Result<Quaternion, String> {
    let trimmed = text.trim();
    let body = trimmed
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .unwrap_or(trimmed);
    let parts: Vec<f64> = body
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| format!("bad quaternion `{text}`: {e}"))?;
    match parts[..] {
        [a, b, c, d] if parts.iter().all(|x| x.is_finite()) => Ok(Quaternion::new(a, b, c, d)),
        _ => Err(format!("bad quaternion `{text}`: need four finite components")),
    }
}
