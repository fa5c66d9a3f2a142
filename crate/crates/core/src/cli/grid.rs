//! Level grid specifications: `start:stop:count[:log|lin]` or an explicit
//! comma-separated list.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridError(pub String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid level grid: {}", self.0)
    }
}

impl std::error::Error for GridError {}

fn err<T>(msg: impl Into<String>) -> Result<T, GridError> {
    Err(GridError(msg.into()))
}

fn number(s: &str) -> Result<f64, GridError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => err(format!("`{s}` is not a finite nonnegative number")),
    }
}

/// Rounds values within `1e-9` (relative) of an integer to that integer.
fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        v
    }
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, GridError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return err("empty specification");
    }
    let levels = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return err(format!("`{spec}`: expected start:stop:count[:log|lin]"));
        }
        let start = number(parts[0])?;
        let stop = number(parts[1])?;
        let count: usize = match parts[2].trim().parse() {
            Ok(c) if c >= 1 => c,
            _ => return err(format!("count `{}` must be a positive integer", parts[2])),
        };
        let log = match parts.get(3).map(|s| s.trim()) {
            None | Some("lin") => false,
            Some("log") => true,
            Some(other) => return err(format!("unknown spacing `{other}`")),
        };
        if count == 1 {
            if start != stop {
                return err("a single-point grid needs start == stop");
            }
            vec![start]
        } else {
            if log && start <= 0.0 {
                return err("log spacing needs start > 0");
            }
            let last = count - 1;
            (0..count)
                .map(|i| {
                    if i == 0 {
                        start
                    } else if i == last {
                        stop
                    } else {
                        let t = i as f64 / last as f64;
                        let v = if log {
                            (start.ln() + t * (stop.ln() - start.ln())).exp()
                        } else {
                            start + t * (stop - start)
                        };
                        snap(v)
                    }
                })
                .collect()
        }
    } else {
        spec.split(',').map(number).collect::<Result<Vec<_>, _>>()?
    };
    if let Some(w) = levels.windows(2).find(|w| w[0] >= w[1]) {
        return err(format!("levels must be strictly increasing ({} then {})", w[0], w[1]));
    }
    Ok(levels)
}

/// Integer levels for tail-series commands.
pub fn integer_levels(levels: &[f64]) -> Result<Vec<u64>, GridError> {
    levels
        .iter()
        .map(|&v| {
            if v.fract() == 0.0 && v <= u64::MAX as f64 {
                Ok(v as u64)
            } else {
                err(format!("{v} is not an integer level"))
            }
        })
        .collect()
}
