//! Quasistatic vs. electromagnetic regime from in-tissue wavelength.

use super::PropagationProperties;
use crate::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Wavelength much longer than the body: lumped circuit model holds.
    Mqs,
    Transitional,
    /// Wavelength at or below the body dimension: wave effects dominate.
    Em,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Mqs => "MQS",
            Regime::Transitional => "transitional",
            Regime::Em => "EM",
        })
    }
}

/// `Mqs` when `lambda >= mqs_factor * dimension`, `Em` when `lambda <= em_factor * dimension`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    pub mqs_factor: f64,
    pub em_factor: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            mqs_factor: 10.0,
            em_factor: 1.0,
        }
    }
}

impl RegimeThresholds {
    pub fn classify(&self, props: &PropagationProperties, body_dimension: f64) -> Result<Regime> {
        if !(body_dimension > 0.0) {
            return Err(Error::InvalidInput(format!(
                "body dimension must be positive, got {body_dimension}"
            )));
        }
        let lambda = props.wavelength_lossless;
        Ok(if lambda >= self.mqs_factor * body_dimension {
            Regime::Mqs
        } else if lambda <= self.em_factor * body_dimension {
            Regime::Em
        } else {
            Regime::Transitional
        })
    }
}

/// Classification with the default 10x / 1x thresholds.
pub fn classify_regime(props: &PropagationProperties, body_dimension: f64) -> Result<Regime> {
    RegimeThresholds::default().classify(props, body_dimension)
}
