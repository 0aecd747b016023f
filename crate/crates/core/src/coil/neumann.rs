//! Mutual inductance of arbitrarily placed loops by Neumann's double integral.
//!
//! `M = mu0 / (4 pi) * N1 N2 * oint oint (dl1 . dl2) / |r1 - r2|`
//!
//! Both loops are parameterized exactly by angle, so the midpoint rule in
//! each angle is the periodic trapezoidal rule and converges geometrically.

use super::{CoilPair, Vec3};
use crate::special::pairwise_sum;
use crate::{Error, Result, MU_0};
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

pub const MIN_SEGMENTS: usize = 64;
pub const DEFAULT_SEGMENTS: usize = 256;

/// Relative change between `n` and `2n` segments above which a warning is logged.
const CONVERGENCE_WARN: f64 = 0.01;

/// Single midpoint-rule evaluation with `segments` points per loop.
pub fn neumann_quadrature(pair: &CoilPair, segments: usize) -> Result<f64> {
    if segments < MIN_SEGMENTS {
        return Err(Error::InvalidInput(format!(
            "Neumann quadrature needs at least {MIN_SEGMENTS} segments, got {segments}"
        )));
    }
    let h = TAU / segments as f64;
    let nodes = |l: &super::Loop| -> Vec<(Vec3, Vec3)> {
        (0..segments)
            .map(|i| {
                let t = h * (i as f64 + 0.5);
                (l.point(t), l.tangent(t))
            })
            .collect()
    };
    let a = nodes(&pair.tx);
    let b = nodes(&pair.rx);
    let min_gap = pair.tx.wire_radius() + pair.rx.wire_radius();

    let rows: Vec<Option<f64>> = a
        .par_iter()
        .map(|(p, t)| {
            let mut terms = Vec::with_capacity(b.len());
            for (q, s) in &b {
                let dist = (p - q).norm();
                if dist < min_gap {
                    return None;
                }
                terms.push(t.dot(s) / dist);
            }
            Some(pairwise_sum(&terms))
        })
        .collect();
    let rows = rows
        .into_iter()
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| Error::Geometry("loops intersect (filament gap below wire radii)".into()))?;

    let turns = f64::from(pair.tx.turns()) * f64::from(pair.rx.turns());
    Ok(MU_0 / (4.0 * PI) * turns * pairwise_sum(&rows) * h * h)
}

/// Mutual inductance with a convergence check against `2 * segments`.
///
/// Returns the `2 * segments` estimate. Logs a warning when the two
/// resolutions differ by more than 1 %.
pub fn mutual_neumann(pair: &CoilPair, segments: usize) -> Result<f64> {
    let coarse = neumann_quadrature(pair, segments)?;
    let fine = neumann_quadrature(pair, 2 * segments)?;
    let scale = fine.abs().max(coarse.abs());
    if scale > 0.0 && (fine - coarse).abs() > CONVERGENCE_WARN * scale {
        log::warn!(
            "Neumann quadrature not converged: {coarse:e} H ({segments} segments) vs {fine:e} H ({} segments)",
            2 * segments
        );
    }
    Ok(fine)
}
