//! Inductance of thin circular loops.
//!
//! Filament approximation throughout: the wire radius only enters the self
//! inductance. Mutual inductance scales with `turns_tx * turns_rx`, self
//! inductance with `turns^2`.

mod neumann;
mod rod;

pub use neumann::{mutual_neumann, neumann_quadrature, DEFAULT_SEGMENTS, MIN_SEGMENTS};
pub use rod::{demagnetizing_factor, rod_core_scaling};

use crate::special::ellip_k_e;
use crate::{Error, Result, MU_0};
use nalgebra::Vector3;

pub type Vec3 = Vector3<f64>;

/// Largest `a / R` for which the thin-wire self inductance is used.
pub const THIN_WIRE_LIMIT: f64 = 0.1;

/// 14 AWG conductor radius (m).
pub const AWG14_RADIUS: f64 = 0.8137e-3;

/// A circular wire loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    radius: f64,
    wire_radius: f64,
    turns: u32,
    center: Vec3,
    axis: Vec3,
}

impl Loop {
    pub fn new(radius: f64, wire_radius: f64, turns: u32, center: Vec3, axis: Vec3) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Geometry(format!("loop radius must be positive, got {radius}")));
        }
        if !(wire_radius > 0.0 && wire_radius < radius) {
            return Err(Error::Geometry(format!(
                "wire radius must satisfy 0 < a < R (a = {wire_radius}, R = {radius})"
            )));
        }
        if turns == 0 {
            return Err(Error::Geometry("a loop needs at least one turn".into()));
        }
        if ((axis.norm() - 1.0).abs()) > 1e-9 {
            return Err(Error::Geometry(format!("axis must be a unit vector (|axis| = {})", axis.norm())));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::Geometry("loop center must be finite".into()));
        }
        Ok(Self {
            radius,
            wire_radius,
            turns,
            center,
            axis,
        })
    }

    /// Single-turn loop in a plane `z = const`, axis along +z.
    pub fn coaxial(radius: f64, wire_radius: f64, z: f64) -> Result<Self> {
        Self::new(radius, wire_radius, 1, Vec3::new(0.0, 0.0, z), Vec3::z())
    }

    pub fn with_turns(mut self, turns: u32) -> Result<Self> {
        if turns == 0 {
            return Err(Error::Geometry("a loop needs at least one turn".into()));
        }
        self.turns = turns;
        Ok(self)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn wire_radius(&self) -> f64 {
        self.wire_radius
    }

    pub fn turns(&self) -> u32 {
        self.turns
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    /// Two unit vectors spanning the loop plane, right-handed about the axis.
    pub fn frame(&self) -> (Vec3, Vec3) {
        let a = self.axis;
        let helper = if a.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let u = a.cross(&helper).normalize();
        let v = a.cross(&u);
        (u, v)
    }

    /// Point on the filament at angle `theta`.
    pub fn point(&self, theta: f64) -> Vec3 {
        let (u, v) = self.frame();
        self.center + (u * theta.cos() + v * theta.sin()) * self.radius
    }

    /// `dl / dtheta` at angle `theta`.
    pub fn tangent(&self, theta: f64) -> Vec3 {
        let (u, v) = self.frame();
        (v * theta.cos() - u * theta.sin()) * self.radius
    }
}

/// Internal inductance factor `Y` of the thin-loop formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InternalInductance {
    /// `Y = 0`: current confined to the conductor surface (skin effect).
    #[default]
    SkinEffect,
    /// `Y = 1`: uniform current density.
    Dc,
}

impl InternalInductance {
    pub fn factor(self) -> f64 {
        match self {
            InternalInductance::SkinEffect => 0.0,
            InternalInductance::Dc => 1.0,
        }
    }
}

/// `mu0 N^2 R (ln(8R/a) - 2 + Y/4)` with `Y = 0`.
pub fn self_inductance(l: &Loop) -> Result<f64> {
    self_inductance_with(l, InternalInductance::SkinEffect)
}

pub fn self_inductance_with(l: &Loop, internal: InternalInductance) -> Result<f64> {
    let ratio = l.wire_radius / l.radius;
    if ratio >= THIN_WIRE_LIMIT {
        return Err(Error::ThinWire { ratio });
    }
    let n = f64::from(l.turns);
    Ok(MU_0 * n * n * l.radius * ((8.0 / ratio).ln() - 2.0 + internal.factor() / 4.0))
}

/// Mutual inductance of two coaxial circular filaments (Maxwell's formula).
///
/// `M = mu0 sqrt(R1 R2) ((2/k - k) K(k) - (2/k) E(k))`, `k^2 = 4 R1 R2 / ((R1 + R2)^2 + d^2)`.
/// The bracket is evaluated as `(2/k) (K - E - k^2 K / 2)` straight from the
/// AGM tail sum, so there is no cancellation at large separation.
pub fn mutual_coaxial(r1: f64, r2: f64, d: f64) -> Result<f64> {
    if !(r1 > 0.0 && r2 > 0.0) || !d.is_finite() {
        return Err(Error::InvalidInput(format!(
            "coaxial mutual inductance needs positive radii and finite distance (R1 = {r1}, R2 = {r2}, d = {d})"
        )));
    }
    if d == 0.0 && r1 == r2 {
        return Err(Error::CoincidentFilaments);
    }
    let m = 4.0 * r1 * r2 / ((r1 + r2).powi(2) + d * d);
    let k = m.sqrt();
    Ok(MU_0 * (r1 * r2).sqrt() * (2.0 / k) * ellip_k_e(m).gauss_tail)
}

/// A transmitter/receiver loop pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CoilPair {
    pub tx: Loop,
    pub rx: Loop,
}

/// Number of samples per loop in the minimum-gap check.
const GAP_SAMPLES: usize = 720;

impl CoilPair {
    /// Rejects loops whose filaments come closer than the sum of the wire radii.
    pub fn new(tx: Loop, rx: Loop) -> Result<Self> {
        let gap = min_filament_distance(&tx, &rx, GAP_SAMPLES);
        if gap < tx.wire_radius + rx.wire_radius {
            return Err(Error::Geometry(format!(
                "loops intersect: minimum filament gap {gap:.3e} m is below the wire radii sum"
            )));
        }
        Ok(Self { tx, rx })
    }

    /// Coaxial identical loops `separation` apart.
    pub fn coaxial(radius: f64, wire_radius: f64, separation: f64) -> Result<Self> {
        Self::new(
            Loop::coaxial(radius, wire_radius, 0.0)?,
            Loop::coaxial(radius, wire_radius, separation)?,
        )
    }

    /// Distance between centers measured along the transmitter axis.
    pub fn separation(&self) -> f64 {
        (self.rx.center - self.tx.center).dot(&self.tx.axis).abs()
    }

    /// Distance between centers perpendicular to the transmitter axis.
    pub fn lateral_offset(&self) -> f64 {
        let r = self.rx.center - self.tx.center;
        (r - self.tx.axis * r.dot(&self.tx.axis)).norm()
    }

    /// Same axis line (parallel or antiparallel axes, no lateral offset).
    pub fn is_coaxial(&self) -> bool {
        let scale = self.tx.radius.max(self.rx.radius);
        self.tx.axis.cross(&self.rx.axis).norm() < 1e-12 && self.lateral_offset() < 1e-12 * scale
    }

    pub fn swapped(&self) -> Self {
        Self {
            tx: self.rx.clone(),
            rx: self.tx.clone(),
        }
    }

    /// Closed form for coaxial pairs, Neumann quadrature otherwise.
    pub fn mutual_inductance(&self) -> Result<f64> {
        if self.is_coaxial() {
            let sign = self.tx.axis.dot(&self.rx.axis).signum();
            let turns = f64::from(self.tx.turns) * f64::from(self.rx.turns);
            Ok(sign * turns * mutual_coaxial(self.tx.radius, self.rx.radius, self.separation())?)
        } else {
            mutual_neumann(self, DEFAULT_SEGMENTS)
        }
    }
}

/// `k = M / sqrt(L_tx L_rx)`.
pub fn coupling_coefficient(pair: &CoilPair) -> Result<f64> {
    let m = pair.mutual_inductance()?;
    let l1 = self_inductance(&pair.tx)?;
    let l2 = self_inductance(&pair.rx)?;
    let k = m / (l1 * l2).sqrt();
    if k.abs() > 1.0 + 1e-6 {
        return Err(Error::CouplingExceedsUnity(k.abs()));
    }
    Ok(k)
}

fn min_filament_distance(a: &Loop, b: &Loop, samples: usize) -> f64 {
    let step = std::f64::consts::TAU / samples as f64;
    let pb: Vec<Vec3> = (0..samples).map(|j| b.point(step * j as f64)).collect();
    (0..samples)
        .map(|i| {
            let p = a.point(step * i as f64);
            pb.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
}
