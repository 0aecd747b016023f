//! Permittivity interpolated between two anchor frequencies.
//!
//! Replicates a tissue table that was only measured above some frequency and
//! filled in below it by straight-line interpolation from a very low anchor.
//! Because the low anchor permittivity is enormous, a line in linear
//! frequency stays far above the true dispersion curve until close to the
//! upper anchor.

use super::{check_frequency, ColeColeModel, PropagationProperties};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterpolationDomain {
    /// Straight line in `f`.
    #[default]
    LinearInFrequency,
    /// Straight line in `log10 f`.
    LinearInLogFrequency,
}

/// Where the loss comes from in interpolated mode.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaSource {
    /// `sigma_eff` fixed (S/m).
    Constant(f64),
    /// Loss of a companion Cole-Cole model at the same frequency.
    ColeCole(ColeColeModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolatedPermittivityModel {
    eps_low: f64,
    f_low: f64,
    eps_high: f64,
    f_high: f64,
    domain: InterpolationDomain,
    sigma: SigmaSource,
}

impl InterpolatedPermittivityModel {
    pub fn new(
        (f_low, eps_low): (f64, f64),
        (f_high, eps_high): (f64, f64),
        domain: InterpolationDomain,
        sigma: SigmaSource,
    ) -> Result<Self> {
        if !(f_low > 0.0 && f_low < f_high) {
            return Err(Error::InvalidInput(format!(
                "interpolation needs 0 < f_low < f_high (got {f_low}, {f_high})"
            )));
        }
        if !(eps_low >= 1.0 && eps_high >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "anchor permittivities must be >= 1 (got {eps_low}, {eps_high})"
            )));
        }
        if let SigmaSource::Constant(s) = sigma {
            if !(s >= 0.0) {
                return Err(Error::InvalidInput(format!("constant sigma must be >= 0, got {s}")));
            }
        }
        Ok(Self {
            eps_low,
            f_low,
            eps_high,
            f_high,
            domain,
            sigma,
        })
    }

    /// Anchors taken from the Cole-Cole model itself, loss from the same model.
    pub fn from_cole_cole(model: &ColeColeModel, f_low: f64, f_high: f64, domain: InterpolationDomain) -> Result<Self> {
        let lo = model.evaluate(f_low)?.eps_real;
        let hi = model.evaluate(f_high)?.eps_real;
        Self::new((f_low, lo), (f_high, hi), domain, SigmaSource::ColeCole(model.clone()))
    }

    pub fn f_low(&self) -> f64 {
        self.f_low
    }

    pub fn f_high(&self) -> f64 {
        self.f_high
    }

    pub fn domain(&self) -> InterpolationDomain {
        self.domain
    }

    pub fn contains(&self, frequency: f64) -> bool {
        (self.f_low..=self.f_high).contains(&frequency)
    }

    pub fn eps_real(&self, frequency: f64) -> Result<f64> {
        check_frequency(frequency)?;
        if !self.contains(frequency) {
            return Err(Error::OutOfRange {
                quantity: "frequency",
                value: frequency,
                min: self.f_low,
                max: self.f_high,
            });
        }
        if frequency == self.f_low {
            return Ok(self.eps_low);
        }
        if frequency == self.f_high {
            return Ok(self.eps_high);
        }
        let t = match self.domain {
            InterpolationDomain::LinearInFrequency => (frequency - self.f_low) / (self.f_high - self.f_low),
            InterpolationDomain::LinearInLogFrequency => {
                (frequency / self.f_low).ln() / (self.f_high / self.f_low).ln()
            }
        };
        Ok(self.eps_low + t * (self.eps_high - self.eps_low))
    }

    pub fn evaluate(&self, frequency: f64) -> Result<PropagationProperties> {
        let eps_real = self.eps_real(frequency)?;
        let (eps_imag, sigma_ionic, mu_r) = match &self.sigma {
            SigmaSource::Constant(s) => (0.0, *s, 1.0),
            SigmaSource::ColeCole(m) => {
                let p = m.evaluate(frequency)?;
                (p.eps_imag, m.sigma_ionic(), m.mu_r())
            }
        };
        Ok(PropagationProperties::from_parts(frequency, eps_real, eps_imag, sigma_ionic, mu_r))
    }
}
