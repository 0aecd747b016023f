//! Axial AC field diffusing into a homogeneous conducting cylinder.
//!
//! An infinite cylinder of radius `b` sits in a uniform axial field `H0`.
//! Inside,
//!
//! ```text
//! H_z(r)   =  H0 I0(g r) / I0(g b)
//! J_phi(r) = -H0 g I1(g r) / I0(g b)
//! g^2      =  j w mu0 mu_r (sigma + j w eps0 eps')
//! ```
//!
//! where the displacement term is optional. Everything below is per unit
//! `H0` (A/m) and per metre of cylinder length.

use crate::special::{adaptive_simpson, bessel_i0_scaled, bessel_i1_scaled};
use crate::tissue::{check_frequency, ColeColeModel};
use crate::{Error, Result, EPS_0, MU_0};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Smallest number of radial samples in a profile.
pub const MIN_PROFILE_SAMPLES: usize = 16;

/// Relative tolerance of the dissipation integral.
pub const POWER_REL_TOL: f64 = 1e-10;

/// `|g b|` below which [`low_frequency_current`] is accepted.
pub const LOW_FREQUENCY_LIMIT: f64 = 0.3;

/// Band over which [`attenuation_sweep`] enforces monotone trends.
const MONOTONE_BAND: (f64, f64) = (1e4, 1e9);

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderModel {
    radius: f64,
    tissue: ColeColeModel,
    sigma_override: Option<f64>,
    displacement: bool,
}

impl CylinderModel {
    /// Pure-diffusion cylinder (displacement current off).
    pub fn new(radius: f64, tissue: ColeColeModel) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("cylinder radius must be > 0, got {radius}")));
        }
        Ok(Self {
            radius,
            tissue,
            sigma_override: None,
            displacement: false,
        })
    }

    /// Replaces the tissue conductivity `sigma_eff` by a fixed value at every frequency.
    pub fn with_sigma_override(mut self, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidInput(format!("sigma override must be >= 0, got {sigma}")));
        }
        self.sigma_override = Some(sigma);
        Ok(self)
    }

    pub fn with_displacement(mut self, on: bool) -> Self {
        self.displacement = on;
        self
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn tissue(&self) -> &ColeColeModel {
        &self.tissue
    }

    pub fn sigma_override(&self) -> Option<f64> {
        self.sigma_override
    }

    pub fn displacement(&self) -> bool {
        self.displacement
    }

    /// `(sigma, eps')` used at `frequency`.
    fn medium(&self, frequency: f64) -> Result<(f64, f64)> {
        let p = self.tissue.evaluate(frequency)?;
        Ok((self.sigma_override.unwrap_or(p.sigma_eff), p.eps_real))
    }

    /// Solves the diffusion problem at one frequency.
    pub fn solve(&self, frequency: f64) -> Result<EddySolution> {
        check_frequency(frequency)?;
        let (sigma, eps_real) = self.medium(frequency)?;
        let omega = 2.0 * PI * frequency;
        let admittivity = if self.displacement {
            Complex64::new(sigma, omega * EPS_0 * eps_real)
        } else {
            Complex64::new(sigma, 0.0)
        };
        // principal root: Re g >= 0
        let gamma = (Complex64::new(0.0, omega * MU_0 * self.tissue.mu_r()) * admittivity).sqrt();
        Ok(EddySolution {
            frequency,
            radius: self.radius,
            sigma,
            admittivity,
            gamma,
            i0_b: bessel_i0_scaled(gamma * self.radius),
        })
    }
}

/// Closed-form field inside the cylinder at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EddySolution {
    pub frequency: f64,
    pub radius: f64,
    /// Conductivity used (S/m).
    pub sigma: f64,
    /// `sigma + j w eps0 eps'` or just `sigma`.
    pub admittivity: Complex64,
    /// Propagation constant `g` (1/m).
    pub gamma: Complex64,
    i0_b: Complex64,
}

impl EddySolution {
    fn check_r(&self, r: f64) -> Result<()> {
        if (0.0..=self.radius).contains(&r) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                quantity: "radial position",
                value: r,
                min: 0.0,
                max: self.radius,
            })
        }
    }

    // exp(Re g (r - b)) restores the scaling removed from both Bessel factors
    fn rescale(&self, r: f64) -> f64 {
        (self.gamma.re * (r - self.radius)).exp()
    }

    /// `H_z(r) / H0`.
    pub fn h_z(&self, r: f64) -> Result<Complex64> {
        self.check_r(r)?;
        if self.gamma == Complex64::default() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(bessel_i0_scaled(self.gamma * r) / self.i0_b * self.rescale(r))
    }

    /// `J_phi(r) / H0` (A/m^2 per A/m).
    pub fn j_phi(&self, r: f64) -> Result<Complex64> {
        self.check_r(r)?;
        Ok(self.current(r))
    }

    fn current(&self, r: f64) -> Complex64 {
        if self.gamma == Complex64::default() {
            return Complex64::default();
        }
        -self.gamma * bessel_i1_scaled(self.gamma * r) / self.i0_b * self.rescale(r)
    }

    /// `|H_z(0) / H0|`.
    pub fn transmission(&self) -> f64 {
        if self.gamma == Complex64::default() {
            return 1.0;
        }
        (-self.gamma.re * self.radius).exp() / self.i0_b.norm()
    }

    /// Ohmic loss density `sigma |E|^2 / 2` at `r`, per unit `H0^2`.
    pub fn dissipation_density(&self, r: f64) -> Result<f64> {
        self.check_r(r)?;
        Ok(self.density(r))
    }

    fn density(&self, r: f64) -> f64 {
        if self.sigma == 0.0 {
            return 0.0;
        }
        // E = J / (sigma + j w eps); reduces to |J|^2 / (2 sigma) without displacement
        self.current(r).norm_sqr() * self.sigma / (2.0 * self.admittivity.norm_sqr())
    }

    /// Dissipated power per unit length over the shell `[r0, b]`.
    pub fn shell_power(&self, r0: f64) -> Result<f64> {
        self.check_r(r0)?;
        if self.sigma == 0.0 {
            return Ok(0.0);
        }
        let integrand = |r: f64| self.density(r) * 2.0 * PI * r;
        let scale = self.poynting_power().abs().max(f64::MIN_POSITIVE);
        Ok(adaptive_simpson(integrand, r0, self.radius, POWER_REL_TOL * scale))
    }

    /// Dissipated power per unit length, by quadrature over the cross-section.
    pub fn power_per_length(&self) -> f64 {
        self.shell_power(0.0).unwrap_or(0.0)
    }

    /// Real Poynting flux into the surface per unit length, `-pi b Re(E_phi(b))`.
    pub fn poynting_power(&self) -> f64 {
        if self.sigma == 0.0 {
            return 0.0;
        }
        let e_b = self.current(self.radius) / self.admittivity;
        -PI * self.radius * e_b.re
    }

    /// `1 / Re g`, the field's e-folding depth; infinite when lossless.
    pub fn skin_depth(&self) -> f64 {
        if self.gamma.re > 0.0 {
            1.0 / self.gamma.re
        } else {
            f64::INFINITY
        }
    }
}

/// Sampled result of [`field_profile`].
#[derive(Debug, Clone, PartialEq)]
pub struct EddyResult {
    pub frequency: f64,
    /// `|H_z(0) / H0|`.
    pub transmission_on_axis: f64,
    /// `(r, |J_phi|)` pairs from the axis to the surface.
    pub current_density_profile: Vec<(f64, f64)>,
    /// W/m per unit `H0^2`.
    pub power_per_length: f64,
}

/// Evaluates the solution at `frequency` and samples `|J_phi|` on `samples`
/// evenly spaced radii from 0 to `b`.
pub fn field_profile(cyl: &CylinderModel, frequency: f64, samples: usize) -> Result<EddyResult> {
    if samples < MIN_PROFILE_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "profile needs at least {MIN_PROFILE_SAMPLES} samples, got {samples}"
        )));
    }
    let sol = cyl.solve(frequency)?;
    let step = cyl.radius / (samples - 1) as f64;
    let current_density_profile = (0..samples)
        .map(|i| {
            let r = if i + 1 == samples { cyl.radius } else { i as f64 * step };
            (r, sol.current(r).norm())
        })
        .collect();
    let result = EddyResult {
        frequency,
        transmission_on_axis: sol.transmission(),
        current_density_profile,
        power_per_length: sol.power_per_length(),
    };
    if !result.transmission_on_axis.is_finite() || !result.power_per_length.is_finite() {
        return Err(Error::Numeric(format!("eddy solution not finite at {frequency} Hz")));
    }
    Ok(result)
}

/// Leading-order `|J_phi(r)| = sigma w mu0 mu_r r / 2` per unit `H0`.
pub fn low_frequency_current(cyl: &CylinderModel, frequency: f64, r: f64) -> Result<f64> {
    let sol = cyl.solve(frequency)?;
    sol.check_r(r)?;
    let gb = (sol.gamma * cyl.radius).norm();
    if gb >= LOW_FREQUENCY_LIMIT {
        return Err(Error::OutOfRange {
            quantity: "|gamma b| (use field_profile)",
            value: gb,
            min: 0.0,
            max: LOW_FREQUENCY_LIMIT,
        });
    }
    let omega = 2.0 * PI * frequency;
    Ok(sol.sigma * omega * MU_0 * cyl.tissue.mu_r() * r / 2.0)
}

/// [`field_profile`] over an increasing frequency grid, in parallel.
///
/// Without displacement current the on-axis transmission must not rise and
/// the dissipated power must not fall with frequency inside 10 kHz to 1 GHz;
/// a violation is reported as a numeric error.
pub fn attenuation_sweep(cyl: &CylinderModel, frequencies: &[f64], samples: usize) -> Result<Vec<EddyResult>> {
    if frequencies.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("frequency grid must be strictly increasing".into()));
    }
    let results: Vec<EddyResult> = frequencies
        .par_iter()
        .map(|&f| field_profile(cyl, f, samples))
        .collect::<Result<_>>()?;
    if !cyl.displacement {
        let in_band: Vec<&EddyResult> = results
            .iter()
            .filter(|r| (MONOTONE_BAND.0..=MONOTONE_BAND.1).contains(&r.frequency))
            .collect();
        for w in in_band.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b.transmission_on_axis > a.transmission_on_axis * (1.0 + 1e-12) {
                return Err(Error::Numeric(format!(
                    "transmission rises from {} at {} Hz to {} at {} Hz",
                    a.transmission_on_axis, a.frequency, b.transmission_on_axis, b.frequency
                )));
            }
            if b.power_per_length < a.power_per_length * (1.0 - 1e-9) {
                return Err(Error::Numeric(format!(
                    "dissipated power falls from {} at {} Hz to {} at {} Hz",
                    a.power_per_length, a.frequency, b.power_per_length, b.frequency
                )));
            }
        }
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::log_space;
    use crate::special::bisect;
    use crate::tissue::default_tissue_db;
    use approx::assert_relative_eq;

    const ARM: f64 = 0.04;

    fn arm() -> CylinderModel {
        CylinderModel::new(ARM, default_tissue_db().get("muscle").unwrap().clone()).unwrap()
    }

    #[test]
    fn transmission_goldens() {
        // goldens.py: 1 / |I0(g b)| at 30 digits
        assert_relative_eq!(arm().solve(1e6).unwrap().transmission(), 0.999999369863911, max_relative = 1e-12);
        assert_relative_eq!(arm().solve(447e6).unwrap().transmission(), 0.774020473340232, max_relative = 1e-12);
    }

    #[test]
    fn power_goldens() {
        for (f, p) in [(1e6, 1.57523902017741e-5), (100e6, 0.216780662431566), (447e6, 3.19863430970103)] {
            let sol = arm().solve(f).unwrap();
            assert_relative_eq!(sol.power_per_length(), p, max_relative = 1e-9);
            assert_relative_eq!(sol.poynting_power(), p, max_relative = 1e-9);
        }
    }

    #[test]
    fn crossover_below_ninety_percent() {
        let cyl = arm();
        let f = bisect(|lf| cyl.solve(10f64.powf(lf)).unwrap().transmission() - 0.9, 6.0, 9.0, 1e-14).unwrap();
        assert_relative_eq!(10f64.powf(f), 2.818448339e8, max_relative = 1e-8);
    }

    #[test]
    fn zero_conductivity_is_transparent() {
        let cyl = arm().with_sigma_override(0.0).unwrap();
        for f in log_space(1e3, 1e10, 15).unwrap() {
            let r = field_profile(&cyl, f, 16).unwrap();
            assert_eq!(r.transmission_on_axis, 1.0);
            assert_eq!(r.power_per_length, 0.0);
            assert!(r.current_density_profile.iter().all(|&(_, j)| j == 0.0));
        }
    }

    #[test]
    fn axis_current_vanishes() {
        for f in [1e4, 1e6, 447e6, 5e9] {
            let r = field_profile(&arm(), f, 32).unwrap();
            assert_eq!(r.current_density_profile[0], (0.0, 0.0));
            assert_eq!(r.current_density_profile.last().unwrap().0, ARM);
            assert!(r.transmission_on_axis <= 1.0 && r.transmission_on_axis >= 0.0);
        }
    }

    #[test]
    fn surface_field_is_applied_field() {
        for f in [1e5, 1e8, 3e9] {
            let h = arm().solve(f).unwrap().h_z(ARM).unwrap();
            assert!((h - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn ampere_law_by_finite_difference() {
        // J_phi = -dH_z/dr
        let sol = arm().solve(300e6).unwrap();
        let r = 0.025;
        let h = 1e-6;
        let dh = (sol.h_z(r + h).unwrap() - sol.h_z(r - h).unwrap()) / (2.0 * h);
        let j = sol.j_phi(r).unwrap();
        assert!((j + dh).norm() < 1e-6 * j.norm());
    }

    #[test]
    fn low_frequency_limit() {
        let cyl = arm();
        assert_eq!(low_frequency_current(&cyl, 1e5, 0.0).unwrap(), 0.0);
        // pick f with |g b| = 0.1
        let sigma = cyl.solve(1e6).unwrap().sigma;
        let f_target = 0.01 / (ARM * ARM * 2.0 * PI * MU_0 * sigma);
        let f = bisect(|lf| (cyl.solve(10f64.powf(lf)).unwrap().gamma * ARM).norm() - 0.1, 3.0, 7.0, 1e-14).unwrap();
        let f = 10f64.powf(f);
        assert!((f / f_target - 1.0).abs() < 0.2);
        let sol = cyl.solve(f).unwrap();
        for r in [0.01, 0.03, ARM] {
            let approx = low_frequency_current(&cyl, f, r).unwrap();
            assert!((approx / sol.j_phi(r).unwrap().norm() - 1.0).abs() < 0.02);
        }
        assert!(matches!(low_frequency_current(&cyl, 1e9, 0.01), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn low_frequency_current_is_linear_in_sigma() {
        let base = arm().with_sigma_override(0.3).unwrap();
        let double = arm().with_sigma_override(0.6).unwrap();
        let a = low_frequency_current(&base, 1e4, 0.02).unwrap();
        let b = low_frequency_current(&double, 1e4, 0.02).unwrap();
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-15);
        let fa = base.solve(1e4).unwrap().j_phi(0.02).unwrap().norm();
        let fb = double.solve(1e4).unwrap().j_phi(0.02).unwrap().norm();
        assert_relative_eq!(fb / fa, 2.0, max_relative = 1e-6);
    }

    #[test]
    fn profile_grows_outward_at_low_frequency() {
        let r = field_profile(&arm(), 1e5, 64).unwrap();
        assert!(r.current_density_profile.windows(2).all(|w| w[1].1 > w[0].1));
    }

    #[test]
    fn power_concentrates_near_surface() {
        let cyl = arm().with_sigma_override(50.0).unwrap();
        let sol = cyl.solve(1e9).unwrap();
        assert!((sol.gamma * ARM).norm() > 10.0);
        let shell = sol.shell_power(ARM - 3.0 * sol.skin_depth()).unwrap();
        assert!(shell >= 0.9 * sol.power_per_length(), "{shell} of {}", sol.power_per_length());
    }

    #[test]
    fn sigma_to_zero_convergence() {
        // 1 - T is O(sigma^2) here: check at least linear convergence
        let gaps: Vec<f64> = [1e-4, 1e-3, 1e-2]
            .iter()
            .map(|&s| 1.0 - arm().with_sigma_override(s).unwrap().solve(447e6).unwrap().transmission())
            .collect();
        assert!(gaps.iter().all(|&g| g >= 0.0));
        assert!(gaps[2] < 1e-3);
        assert!(gaps[1] <= gaps[2] / 10.0 + 1e-15 && gaps[0] <= gaps[1] / 10.0 + 1e-15, "{gaps:?}");
    }

    #[test]
    fn sweep_is_monotone() {
        let fs = log_space(1e3, 1e10, 60).unwrap();
        let res = attenuation_sweep(&arm(), &fs, 16).unwrap();
        assert!(res.windows(2).all(|w| w[1].transmission_on_axis <= w[0].transmission_on_axis));
        assert!(res.iter().all(|r| r.power_per_length > 0.0));
        assert!(attenuation_sweep(&arm(), &[2e6, 1e6], 16).is_err());
    }

    #[test]
    fn displacement_current_toggle() {
        let cyl = arm().with_displacement(true);
        // both stay within 1e-6 of unity at 10 kHz
        let low = cyl.solve(1e4).unwrap();
        assert!((low.transmission() - arm().solve(1e4).unwrap().transmission()).abs() < 1e-6);
        let high = cyl.solve(447e6).unwrap();
        assert_relative_eq!(high.power_per_length(), high.poynting_power(), max_relative = 1e-8);
    }

    #[test]
    fn bad_inputs() {
        let muscle = default_tissue_db().get("muscle").unwrap().clone();
        assert!(CylinderModel::new(0.0, muscle.clone()).is_err());
        assert!(CylinderModel::new(ARM, muscle).unwrap().with_sigma_override(-1.0).is_err());
        assert!(field_profile(&arm(), 1e6, 8).is_err());
        assert!(arm().solve(1e6).unwrap().h_z(0.05).is_err());
        assert!(arm().solve(-1.0).is_err());
    }
}
