//! Magnetic-core enhancement trend for a rod-shaped permeable body.
//!
//! A permeable rod threading both loops raises the coupled flux by its
//! effective permeability `mu_r / (1 + D (mu_r - 1))`, where `D` is the axial
//! demagnetizing factor of a spheroid with the rod's aspect ratio. This is an
//! approximate trend multiplier for `M`, not a field solution.

use crate::{Error, Result};

/// Axial demagnetizing factor of a spheroid with length/diameter ratio `m`.
pub fn demagnetizing_factor(length_to_diameter: f64) -> Result<f64> {
    let m = length_to_diameter;
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "length/diameter ratio must be positive, got {m}"
        )));
    }
    let eps = m - 1.0;
    Ok(if eps.abs() < 1e-6 {
        // sphere, first-order expansion
        1.0 / 3.0 - 4.0 / 15.0 * eps
    } else if m > 1.0 {
        let s2 = eps * (m + 1.0);
        let s = s2.sqrt();
        (m * s.asinh() / s - 1.0) / s2
    } else {
        let s2 = -eps * (m + 1.0);
        let s = s2.sqrt();
        (1.0 - m * s.atan2(m) / s) / s2
    })
}

/// Effective-permeability multiplier for the mutual inductance.
pub fn rod_core_scaling(mu_r: f64, length_to_diameter: f64) -> Result<f64> {
    if !(mu_r >= 1.0) {
        return Err(Error::InvalidInput(format!("mu_r must be >= 1, got {mu_r}")));
    }
    let d = demagnetizing_factor(length_to_diameter)?;
    Ok(mu_r / (1.0 + d * (mu_r - 1.0)))
}
