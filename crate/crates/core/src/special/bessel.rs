//! Modified Bessel functions `I0`, `I1` of complex argument.
//!
//! Power series for `|z| < SERIES_SWITCHOVER`, the two-exponential
//! asymptotic expansion beyond it. The `_scaled` variants return
//! `I(z) * exp(-|Re z|)` so that ratios stay finite when `I` itself would
//! overflow.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `|z|` at which evaluation switches from the power series to the asymptotic form.
pub const SERIES_SWITCHOVER: f64 = 20.0;

const SERIES_TOL: f64 = 1e-17;
const MAX_SERIES_TERMS: usize = 400;

pub fn bessel_i0(z: Complex64) -> Complex64 {
    bessel_i0_scaled(z) * z.re.abs().exp()
}

pub fn bessel_i1(z: Complex64) -> Complex64 {
    bessel_i1_scaled(z) * z.re.abs().exp()
}

/// `I0(z) exp(-|Re z|)`.
pub fn bessel_i0_scaled(z: Complex64) -> Complex64 {
    // I0 is even
    let w = if z.re < 0.0 { -z } else { z };
    if w.norm() < SERIES_SWITCHOVER {
        series(w, 0) * (-w.re).exp()
    } else {
        asymptotic_scaled(w, 0)
    }
}

/// `I1(z) exp(-|Re z|)`.
pub fn bessel_i1_scaled(z: Complex64) -> Complex64 {
    // I1 is odd
    let (w, sign) = if z.re < 0.0 { (-z, -1.0) } else { (z, 1.0) };
    let v = if w.norm() < SERIES_SWITCHOVER {
        series(w, 1) * (-w.re).exp()
    } else {
        asymptotic_scaled(w, 1)
    };
    v * sign
}

fn series(z: Complex64, order: u32) -> Complex64 {
    let q = z * z * 0.25;
    // leading coefficient (z/2)^order / order!
    let mut term = if order == 0 { Complex64::new(1.0, 0.0) } else { z * 0.5 };
    let mut sum = term;
    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + order as f64));
        sum += term;
        if term.norm() <= SERIES_TOL * sum.norm() && kf * kf > q.norm() {
            break;
        }
    }
    sum
}

/// Asymptotic expansion for `Re z >= 0`, `|z| >= SERIES_SWITCHOVER`, returned
/// already multiplied by `exp(-Re z)`.
fn asymptotic_scaled(z: Complex64, order: u32) -> Complex64 {
    let nu = order as f64;
    let mu = 4.0 * nu * nu;
    let inv_z = z.inv();

    // sum (-1)^k a_k / z^k and sum a_k / z^k
    let mut alt = Complex64::new(1.0, 0.0);
    let mut plain = Complex64::new(1.0, 0.0);
    let mut coeff = 1.0;
    let mut pow = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        coeff *= (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf);
        pow *= inv_z;
        let t = pow * coeff;
        let size = t.norm();
        if size >= last {
            // the series is asymptotic: stop at the smallest term
            break;
        }
        last = size;
        plain += t;
        if k % 2 == 1 {
            alt -= t;
        } else {
            alt += t;
        }
        if size < 1e-17 {
            break;
        }
    }

    let root = (z * 2.0 * PI).sqrt();
    // exp(z) exp(-Re z) = exp(i Im z)
    let growing = Complex64::from_polar(1.0, z.im) * alt / root;
    // second exponential: +i e^{i nu pi} e^{-z} for Im z >= 0, -i e^{-i nu pi} e^{-z} otherwise
    let s = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let phase = Complex64::new(0.0, s) * Complex64::from_polar(1.0, s * nu * PI);
    let decaying = phase * Complex64::from_polar((-2.0 * z.re).exp(), -z.im) * plain / root;
    growing + decaying
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        let err = (a - b).norm() / b.norm().max(1e-300);
        assert!(err < tol, "{a} vs {b}: rel err {err:e}");
    }

    // mpmath.besseli at 40 digits
    const GOLDEN: &[(f64, f64, f64, f64, f64, f64)] = &[
        // re, im, I0.re, I0.im, I1.re, I1.im
        (1.0, 0.0, 1.266_065_877_752_008_3, 0.0, 0.565_159_103_992_485, 0.0),
        (0.771, 2.932, -0.347_954_193_906_990_66, 0.296_143_824_187_224_73, -0.302_514_432_512_366_16, 0.425_132_895_669_737_13),
        (15.0, 15.0, -127_711.894_557_877_45, 254_040.282_817_858_83, -129_891.580_516_247_05, 247_643.712_494_846_77),
        (25.0, 25.0, 4_183_632_290.639_980_1, -2_439_986_235.196_105_5, 4_166_453_606.419_650_1, -2_373_328_541.145_376_5),
        (0.0, 30.0, -0.086_367_983_581_040_211, 0.0, 0.0, -0.118_751_062_616_622_94),
        (3.0, -22.0, -1.288_329_922_486_788_8, -1.111_652_032_280_824_2, -1.304_035_811_672_074_2, -1.086_055_360_938_361_2),
    ];

    #[test]
    fn matches_high_precision_values() {
        for &(re, im, a, b, p, q) in GOLDEN {
            let z = c(re, im);
            assert_close(bessel_i0(z), c(a, b), 1e-12);
            assert_close(bessel_i1(z), c(p, q), 1e-12);
        }
    }

    #[test]
    fn continuous_across_switchover() {
        // the series loses about exp(|z| - Re z) ulps, so near the imaginary
        // axis agreement is only to ~1e-8
        for &(arg, tol) in &[(0.0, 1e-12), (0.3, 1e-12), (0.785, 1e-12), (1.2, 1e-10), (1.57, 1e-7)] {
            let below = Complex64::from_polar(SERIES_SWITCHOVER * (1.0 - 1e-15), arg);
            let above = Complex64::from_polar(SERIES_SWITCHOVER * (1.0 + 1e-15), arg);
            assert_close(bessel_i0_scaled(below), bessel_i0_scaled(above), tol);
            assert_close(bessel_i1_scaled(below), bessel_i1_scaled(above), tol);
        }
    }

    #[test]
    fn parity() {
        let z = c(-2.5, 1.5);
        assert_close(bessel_i0(z), bessel_i0(-z), 1e-15);
        assert_close(bessel_i1(z), -bessel_i1(-z), 1e-15);
    }

    #[test]
    fn scaled_survives_large_argument() {
        let z = c(800.0, 800.0);
        let v = bessel_i0_scaled(z);
        assert!(v.norm().is_finite() && v.norm() > 0.0);
        assert!(bessel_i0(z).re.is_infinite() || !bessel_i0(z).re.is_finite());
    }

    fn derivative(f: impl Fn(Complex64) -> Complex64, z: Complex64) -> Complex64 {
        // Richardson-extrapolated central difference along the real direction
        let d = |h: f64| (f(z + h) - f(z - h)) / (2.0 * h);
        let h = 1e-3;
        (d(h / 2.0) * 4.0 - d(h)) / 3.0
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn recurrence_derivative_identity(r in 0.05f64..35.0, theta in -1.55f64..1.55) {
            let z = Complex64::from_polar(r, theta);
            // I1'(z) = I0(z) - I1(z)/z, on the scaled functions to keep magnitudes O(1)
            let s = (-z.re).exp();
            let lhs = derivative(bessel_i1, z) * s;
            let rhs = (bessel_i0(z) - bessel_i1(z) / z) * s;
            let scale = bessel_i0_scaled(z).norm().max(bessel_i1_scaled(z).norm());
            // series rounding grows like exp(|z| - Re z) and the difference
            // quotient divides it by h
            let noise = 1e-13 * (z.norm() - z.re).exp();
            prop_assert!((lhs - rhs).norm() <= (1e-10 + noise) * scale.max(1e-3),
                "z = {z}: {lhs} vs {rhs}");
        }
    }
}
