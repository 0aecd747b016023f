//! Frequency-dependent dielectric properties of body tissues.
//!
//! Tissues follow a multi-term Cole-Cole dispersion
//!
//! ```text
//! eps(w) = eps_inf + sum_n d_eps_n / (1 + (j w tau_n)^(1 - alpha_n)) + sigma_i / (j w eps0)
//! ```
//!
//! All loss (ionic and dielectric) is reported as one effective conductivity
//! `sigma_eff = sigma_i + w eps0 eps''`; `eps_real` carries only the real part.

mod db;
mod interp;
mod regime;

pub use db::{default_tissue_db, load_tissue_db, parse_tissue_db, TissueDb, DEFAULT_TISSUE_DB};
pub use interp::{InterpolatedPermittivityModel, InterpolationDomain, SigmaSource};
pub use regime::{classify_regime, Regime, RegimeThresholds};

use crate::{Error, Result, BAND_MAX_HZ, BAND_MIN_HZ, C_0, EPS_0, MU_0};
use num_complex::Complex64;
use std::f64::consts::PI;

/// One Cole-Cole relaxation term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationTerm {
    pub delta_eps: f64,
    /// Relaxation time (s).
    pub tau: f64,
    /// Broadening exponent in `[0, 1)`.
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColeColeModel {
    name: String,
    eps_inf: f64,
    terms: Vec<RelaxationTerm>,
    sigma_ionic: f64,
    mu_r: f64,
}

impl ColeColeModel {
    /// Validates the parameter set. Invariant violations name the offending field
    /// (`eps_inf`, `sigma_ionic`, `term.N.delta_eps`, ...; terms are numbered from 1).
    pub fn new(
        name: impl Into<String>,
        eps_inf: f64,
        terms: Vec<RelaxationTerm>,
        sigma_ionic: f64,
    ) -> Result<Self> {
        let name = name.into();
        let bad = |field: String, reason: &str| Error::Invariant {
            tissue: name.clone(),
            field,
            reason: reason.to_string(),
        };
        if !(eps_inf >= 1.0) || !eps_inf.is_finite() {
            return Err(bad("eps_inf".into(), "must be >= 1"));
        }
        if !(sigma_ionic >= 0.0) || !sigma_ionic.is_finite() {
            return Err(bad("sigma_ionic".into(), "must be >= 0"));
        }
        for (i, t) in terms.iter().enumerate() {
            let n = i + 1;
            if !(t.delta_eps >= 0.0) || !t.delta_eps.is_finite() {
                return Err(bad(format!("term.{n}.delta_eps"), "must be >= 0"));
            }
            if !(t.tau > 0.0) || !t.tau.is_finite() {
                return Err(bad(format!("term.{n}.tau"), "must be > 0"));
            }
            if !(0.0..1.0).contains(&t.alpha) {
                return Err(bad(format!("term.{n}.alpha"), "must lie in [0, 1)"));
            }
        }
        Ok(Self {
            name,
            eps_inf,
            terms,
            sigma_ionic,
            mu_r: 1.0,
        })
    }

    /// A loss-free, dispersion-free medium of relative permittivity `eps`.
    pub fn dispersionless(name: impl Into<String>, eps: f64) -> Result<Self> {
        Self::new(name, eps, Vec::new(), 0.0)
    }

    /// Overrides the relative permeability (1 for all real tissues).
    pub fn with_mu_r(mut self, mu_r: f64) -> Result<Self> {
        if !(mu_r >= 1.0) {
            return Err(Error::Invariant {
                tissue: self.name,
                field: "mu_r".into(),
                reason: "must be >= 1".into(),
            });
        }
        self.mu_r = mu_r;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eps_inf(&self) -> f64 {
        self.eps_inf
    }

    pub fn terms(&self) -> &[RelaxationTerm] {
        &self.terms
    }

    pub fn sigma_ionic(&self) -> f64 {
        self.sigma_ionic
    }

    pub fn mu_r(&self) -> f64 {
        self.mu_r
    }

    /// Dielectric part `eps' - j eps''` without the ionic conductivity term.
    pub fn dielectric_permittivity(&self, frequency: f64) -> Complex64 {
        let jwt = |tau: f64| Complex64::new(0.0, 2.0 * PI * frequency * tau);
        self.terms
            .iter()
            .fold(Complex64::new(self.eps_inf, 0.0), |acc, t| {
                acc + t.delta_eps / (1.0 + jwt(t.tau).powf(1.0 - t.alpha))
            })
    }

    /// Full complex relative permittivity including `sigma_i / (j w eps0)`.
    pub fn complex_permittivity(&self, frequency: f64) -> Complex64 {
        let omega = 2.0 * PI * frequency;
        self.dielectric_permittivity(frequency)
            + Complex64::new(0.0, -self.sigma_ionic / (omega * EPS_0))
    }

    pub fn evaluate(&self, frequency: f64) -> Result<PropagationProperties> {
        check_frequency(frequency)?;
        if !(BAND_MIN_HZ..=BAND_MAX_HZ).contains(&frequency) {
            log::warn!(
                "{}: evaluating at {frequency} Hz, outside the {BAND_MIN_HZ}-{BAND_MAX_HZ} Hz band",
                self.name
            );
        }
        let eps = self.dielectric_permittivity(frequency);
        Ok(PropagationProperties::from_parts(
            frequency,
            eps.re,
            -eps.im,
            self.sigma_ionic,
            self.mu_r,
        ))
    }

    pub fn wavelength(&self, frequency: f64, variant: WavelengthVariant) -> Result<f64> {
        Ok(self.evaluate(frequency)?.wavelength(variant))
    }

    /// `1 / alpha` of the lossy propagation constant; `f64::INFINITY` in a lossless medium.
    pub fn skin_depth(&self, frequency: f64) -> Result<f64> {
        Ok(self.evaluate(frequency)?.skin_depth)
    }
}

pub(crate) fn check_frequency(frequency: f64) -> Result<()> {
    if frequency > 0.0 && frequency.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "frequency must be positive and finite, got {frequency}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavelengthVariant {
    /// `c / (f sqrt(eps' mu_r))`
    Lossless,
    /// `2 pi / beta` of the full lossy propagation constant.
    Lossy,
}

/// Propagation quantities of a medium at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationProperties {
    pub frequency: f64,
    pub eps_real: f64,
    /// Dielectric loss `eps''` (the ionic term is in `sigma_eff` only).
    pub eps_imag: f64,
    /// `sigma_i + w eps0 eps''` (S/m).
    pub sigma_eff: f64,
    pub wavelength_lossless: f64,
    pub wavelength_lossy: f64,
    pub skin_depth: f64,
    pub mu_r: f64,
}

impl PropagationProperties {
    /// Builds the derived fields from the permittivity pair.
    ///
    /// `gamma = alpha + j beta = j w sqrt(mu eps0 eps') sqrt(1 - j sigma_eff / (w eps0 eps'))`.
    pub fn from_parts(frequency: f64, eps_real: f64, eps_imag: f64, sigma_ionic: f64, mu_r: f64) -> Self {
        let omega = 2.0 * PI * frequency;
        let sigma_eff = sigma_ionic + omega * EPS_0 * eps_imag;
        let wavelength_lossless = C_0 / (frequency * (eps_real * mu_r).sqrt());

        let (wavelength_lossy, skin_depth) = if sigma_eff == 0.0 {
            (wavelength_lossless, f64::INFINITY)
        } else {
            let loss_tangent = sigma_eff / (omega * EPS_0 * eps_real);
            let k = omega * (MU_0 * mu_r * EPS_0 * eps_real).sqrt();
            let gamma = Complex64::new(0.0, k) * Complex64::new(1.0, -loss_tangent).sqrt();
            (2.0 * PI / gamma.im, 1.0 / gamma.re)
        };

        Self {
            frequency,
            eps_real,
            eps_imag,
            sigma_eff,
            wavelength_lossless,
            wavelength_lossy,
            skin_depth,
            mu_r,
        }
    }

    pub fn wavelength(&self, variant: WavelengthVariant) -> f64 {
        match variant {
            WavelengthVariant::Lossless => self.wavelength_lossless,
            WavelengthVariant::Lossy => self.wavelength_lossy,
        }
    }

    /// `sigma_eff / (w eps0 eps')`.
    pub fn loss_tangent(&self) -> f64 {
        self.sigma_eff / (2.0 * PI * self.frequency * EPS_0 * self.eps_real)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::log_space;
    use approx::assert_relative_eq;

    fn muscle() -> ColeColeModel {
        default_tissue_db().get("muscle").unwrap().clone()
    }

    // crates/core/tests/oracle/goldens.py: (eps', sigma_eff, lambda_lossless, lambda_lossy, skin depth)
    const MUSCLE_GOLDEN: &[(f64, [f64; 5])] = &[
        (1e6, [1.836423597384337e3, 5.026869863586313e-1, 6.995749830137262, 4.031967523289703, 7.852455136563342e-1]),
        (100e6, [6.597249165045450e1, 7.076053646160262e-1, 3.690959327450512e-1, 2.930866033012622e-1, 7.674198826306124e-2]),
        (447e6, [5.677476068008939e1, 8.084932605754108e-1, 8.900932829784797e-2, 8.580124547378519e-2, 5.132661367307523e-2]),
    ];

    #[test]
    fn muscle_spot_values_match_oracle() {
        let m = muscle();
        for (f, g) in MUSCLE_GOLDEN {
            let p = m.evaluate(*f).unwrap();
            assert_relative_eq!(p.eps_real, g[0], max_relative = 1e-10);
            assert_relative_eq!(p.sigma_eff, g[1], max_relative = 1e-10);
            assert_relative_eq!(p.wavelength_lossless, g[2], max_relative = 1e-10);
            assert_relative_eq!(p.wavelength_lossy, g[3], max_relative = 1e-10);
            assert_relative_eq!(p.skin_depth, g[4], max_relative = 1e-10);
        }
    }

    #[test]
    fn muscle_wavelength_at_447_mhz_is_arm_scale() {
        let lambda = muscle().wavelength(447e6, WavelengthVariant::Lossless).unwrap();
        assert!((lambda - 0.089).abs() <= 0.1 * 0.089, "lambda = {lambda}");
        let eps = muscle().evaluate(447e6).unwrap().eps_real;
        assert!((eps - 57.0).abs() < 1.0);
    }

    #[test]
    fn muscle_skin_depth_at_447_mhz() {
        // oracle value 5.1327 cm; a few mm above the rough 1-5 cm bracket
        let d = muscle().skin_depth(447e6).unwrap();
        assert_relative_eq!(d, 5.132661367307523e-2, max_relative = 1e-10);
        assert!(d > 0.01 && d < 0.06);
    }

    #[test]
    fn dispersion_free_medium() {
        let m = ColeColeModel::dispersionless("glass", 4.5).unwrap();
        let p = m.evaluate(123e6).unwrap();
        assert_eq!(p.eps_real, 4.5);
        assert_eq!(p.sigma_eff, 0.0);
        assert_eq!(p.skin_depth, f64::INFINITY);
        assert_eq!(p.wavelength_lossy, p.wavelength_lossless);
    }

    #[test]
    fn vacuum_wavelength() {
        let vac = ColeColeModel::dispersionless("vacuum", 1.0).unwrap();
        let l = vac.wavelength(300e6, WavelengthVariant::Lossless).unwrap();
        assert_relative_eq!(l, C_0 / 300e6, max_relative = 1e-15);
        assert!((l - 1.0).abs() < 1e-3);
    }

    #[test]
    fn good_conductor_skin_depth_limit() {
        // sigma / (w eps0 eps') = 1e4 at 1 MHz
        let m = ColeColeModel::new("saline", 1.0, vec![], 1e4 * 2.0 * PI * 1e6 * EPS_0).unwrap();
        let p = m.evaluate(1e6).unwrap();
        assert!(p.loss_tangent() > 100.0);
        let textbook = (2.0 / (2.0 * PI * 1e6 * MU_0 * p.sigma_eff)).sqrt();
        assert_relative_eq!(p.skin_depth, textbook, max_relative = 0.01);
    }

    #[test]
    fn rejects_non_positive_frequency() {
        assert!(matches!(muscle().evaluate(0.0), Err(Error::InvalidInput(_))));
        assert!(matches!(muscle().evaluate(-5.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn invariant_violations_name_the_field() {
        let t = |alpha| RelaxationTerm { delta_eps: 10.0, tau: 1e-9, alpha };
        let err = ColeColeModel::new("x", 4.0, vec![t(0.1), t(1.2)], 0.1).unwrap_err();
        assert!(err.to_string().contains("term.2.alpha"), "{err}");
        assert!(ColeColeModel::new("x", 0.5, vec![], 0.0).is_err());
        assert!(ColeColeModel::new("x", 2.0, vec![], -1.0).is_err());
    }

    #[test]
    fn mu_r_defaults_to_one_and_scales_wavelength() {
        let m = muscle();
        assert_eq!(m.evaluate(1e6).unwrap().mu_r, 1.0);
        let heavy = m.clone().with_mu_r(4.0).unwrap();
        let a = m.wavelength(1e6, WavelengthVariant::Lossless).unwrap();
        let b = heavy.wavelength(1e6, WavelengthVariant::Lossless).unwrap();
        assert_relative_eq!(a / b, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn shipped_tissues_follow_dispersion_trends() {
        let grid = log_space(1e3, 10e9, 200).unwrap();
        for tissue in default_tissue_db().iter() {
            let props: Vec<_> = grid.iter().map(|&f| tissue.evaluate(f).unwrap()).collect();
            for w in props.windows(2) {
                assert!(w[1].eps_real <= w[0].eps_real, "{} eps' rises at {} Hz", tissue.name(), w[1].frequency);
                assert!(w[1].sigma_eff >= w[0].sigma_eff, "{} sigma falls at {} Hz", tissue.name(), w[1].frequency);
            }
            for p in &props {
                assert!(p.eps_real >= 1.0 && p.sigma_eff > 0.0);
                assert!(p.wavelength_lossless > 0.0 && p.wavelength_lossy > 0.0 && p.skin_depth > 0.0);
                assert_relative_eq!(p.wavelength_lossless * p.frequency * p.eps_real.sqrt(), C_0, max_relative = 1e-9);
                assert!(p.wavelength_lossy <= p.wavelength_lossless);
                if p.loss_tangent() < 0.01 {
                    assert_relative_eq!(p.wavelength_lossy, p.wavelength_lossless, max_relative = 0.01);
                }
            }
        }
    }
}
