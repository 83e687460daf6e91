//! Complex Gamma, log-Gamma and digamma.
//!
//! Right half-plane values come from the Stirling series after shifting the
//! argument to `Re z ≥ 16`; the left half-plane uses Euler reflection.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{HemError, Result};

const SHIFT_TARGET: f64 = 16.0;
/// Arguments this close to a non-positive integer are treated as poles.
const POLE_TOL: f64 = 1e-13;

/// `B_{2k} / (2k(2k−1))` for k = 1..10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// `B_{2k} / (2k)` for k = 1..10, the digamma asymptotic coefficients.
const DIGAMMA_ASYM: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43867.0 / 14364.0,
    -174611.0 / 6600.0,
];

/// If `z` is (numerically) a non-positive integer `−k`, returns `k`.
pub fn nonpositive_integer(z: Complex64) -> Option<u64> {
    if z.im.abs() > POLE_TOL * (1.0 + z.re.abs()) || z.re > 0.5 {
        return None;
    }
    let k = (-z.re).round();
    ((z.re + k).abs() <= POLE_TOL * (1.0 + k)).then_some(k as u64)
}

fn check_pole(z: Complex64) -> Result<()> {
    match nonpositive_integer(z) {
        Some(k) => Err(HemError::GammaPole(k)),
        None => Ok(()),
    }
}

fn stirling_ln(z: Complex64) -> Complex64 {
    let ln_z = z.ln();
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    (z - 0.5) * ln_z - z + 0.5 * (2.0 * PI).ln() + series
}

/// `ln Γ(z)`, continuous along the positive real axis (principal branch for
/// `Re z > 0`; reflection supplies a valid logarithm elsewhere).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z)?);
    }
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while w.re < SHIFT_TARGET {
        acc += w.ln();
        w += 1.0;
    }
    Ok(stirling_ln(w) - acc)
}

/// `Γ(z)`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.im == 0.0 && z.re.fract() == 0.0 && (1.0..=30.0).contains(&z.re) {
        return Ok(Complex64::new((2..z.re as u64).product::<u64>() as f64, 0.0));
    }
    if z.re < 0.5 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        return Ok(Complex64::new(PI, 0.0) / ((z * PI).sin() * gamma(one_minus)?));
    }
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    while w.re < SHIFT_TARGET {
        prod *= w;
        w += 1.0;
    }
    Ok(stirling_ln(w).exp() / prod)
}

/// `Γ(x)` for real `x`.
pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma(Complex64::new(x, 0.0))?.re)
}

/// Digamma `ψ(z) = Γ'(z)/Γ(z)`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < 0.5 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        let cot = (z * PI).cos() / (z * PI).sin();
        return Ok(digamma(one_minus)? - cot * PI);
    }
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while w.re < SHIFT_TARGET {
        acc += w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv2;
    for c in DIGAMMA_ASYM {
        series += p * c;
        p *= inv2;
    }
    Ok(w.ln() - inv * 0.5 - series - acc)
}

/// Euler Beta function `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    let (a, b) = (Complex64::new(a, 0.0), Complex64::new(b, 0.0));
    Ok((ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?).exp().re)
}

/// Exponential integral `E₁(x) = ∫₁^∞ e^{−xt}/t dt` for `x > 0`: power
/// series below 1, Lentz continued fraction above.
pub fn exp_integral_e1(x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return -EULER - x.ln() + sum;
    }
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..200 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn classical_values() {
        assert!(rel(gamma(c(1.0)).unwrap(), c(1.0)) < 1e-15);
        assert!(rel(gamma(c(0.5)).unwrap(), c(PI.sqrt())) < 1e-14);
        assert!(rel(gamma(c(0.25)).unwrap(), c(3.625_609_908_221_908)) < 1e-14);
        assert!(rel(gamma(c(-0.5)).unwrap(), c(-2.0 * PI.sqrt())) < 1e-14);
        assert!(rel(gamma(c(10.0)).unwrap(), c(362_880.0)) < 1e-14);
        let euler = 0.577_215_664_901_532_9;
        assert!(rel(digamma(c(1.0)).unwrap(), c(-euler)) < 1e-14);
        assert!(rel(digamma(c(0.5)).unwrap(), c(-euler - 2.0 * 2f64.ln())) < 1e-14);
    }

    #[test]
    fn poles_are_reported() {
        assert_eq!(gamma(c(0.0)), Err(HemError::GammaPole(0)));
        assert_eq!(gamma(c(-3.0)), Err(HemError::GammaPole(3)));
        assert_eq!(ln_gamma(c(-7.0)), Err(HemError::GammaPole(7)));
        assert!(gamma(c(-3.0 + 1e-8)).is_ok());
    }

    #[test]
    fn matches_independent_real_gamma() {
        for i in 1..400 {
            let x = -9.7 + 0.13 * i as f64;
            if nonpositive_integer(c(x)).is_some() {
                continue;
            }
            let want = statrs::function::gamma::gamma(x);
            let got = gamma_real(x).unwrap();
            assert!(((got - want) / want).abs() < 1e-12, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn large_arguments() {
        // ln Γ(50) = ln(49!)
        let want: f64 = (1..50).map(|k| (k as f64).ln()).sum();
        assert!((ln_gamma(c(50.0)).unwrap().re - want).abs() < 1e-12);
        let g = gamma(c(40.5)).unwrap();
        let w = statrs::function::gamma::gamma(40.5);
        assert!(((g.re - w) / w).abs() < 1e-13);
    }

    #[test]
    fn exponential_integral() {
        assert!((exp_integral_e1(1.0) - 0.219_383_934_395_520_27).abs() < 1e-15);
        assert!((exp_integral_e1(0.01) - 4.037_929_576_538_114).abs() < 1e-13);
        assert!((exp_integral_e1(5.0) - 1.148_295_591_275_325_8e-3).abs() < 1e-17);
        for x in [0.3, 0.9, 1.1, 2.5, 12.0] {
            // E₁(x) = ∫₀¹ e^{−x/u}/u du
            let q = crate::quadrature::tanh_sinh(|u, _| (-x / u).exp() / u, 1e-14).value;
            assert!(((exp_integral_e1(x) - q) / q).abs() < 1e-12, "x={x}");
        }
    }

    proptest! {
        #[test]
        fn recurrence_and_reflection(re in -8.0f64..8.0, im in -6.0f64..6.0) {
            let z = Complex64::new(re, im);
            prop_assume!(nonpositive_integer(z).is_none() && nonpositive_integer(z + 1.0).is_none());
            let g = gamma(z).unwrap();
            let g1 = gamma(z + 1.0).unwrap();
            prop_assert!(rel(g1, z * g) < 1e-12);
            let refl = g * gamma(Complex64::new(1.0, 0.0) - z).unwrap() * (z * PI).sin();
            prop_assert!(rel(refl, c(PI)) < 1e-11);
            prop_assert!(rel(ln_gamma(z).unwrap().exp(), g) < 1e-11);
            let d = digamma(z).unwrap();
            prop_assert!(rel(digamma(z + 1.0).unwrap(), d + z.inv()) < 1e-11 || (d + z.inv()).norm() < 1e-12);
        }

        #[test]
        fn digamma_is_log_derivative(x in 0.2f64..12.0) {
            let h = 1e-5;
            let fd = (ln_gamma(c(x + h)).unwrap() - ln_gamma(c(x - h)).unwrap()) / (2.0 * h);
            prop_assert!((digamma(c(x)).unwrap() - fd).norm() < 1e-8);
        }
    }
}
