//! Sample grids.

use crate::{Error, Result};

/// `points` values from `start` to `stop`, equally spaced in log10.
pub fn log_space(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > start) || points < 2 {
        return Err(Error::InvalidInput(format!(
            "log grid needs 0 < start < stop and points >= 2 (got {start}, {stop}, {points})"
        )));
    }
    let (a, b) = (start.log10(), stop.log10());
    let step = (b - a) / (points - 1) as f64;
    let mut out: Vec<f64> = (0..points)
        .map(|i| 10f64.powf(a + step * i as f64))
        .collect();
    // pin the endpoints exactly
    out[0] = start;
    out[points - 1] = stop;
    Ok(out)
}

/// `points` values from `start` to `stop`, equally spaced.
pub fn lin_space(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !(stop > start) || points < 2 {
        return Err(Error::InvalidInput(format!(
            "linear grid needs start < stop and points >= 2 (got {start}, {stop}, {points})"
        )));
    }
    let step = (stop - start) / (points - 1) as f64;
    let mut out: Vec<f64> = (0..points).map(|i| start + step * i as f64).collect();
    out[points - 1] = stop;
    Ok(out)
}
