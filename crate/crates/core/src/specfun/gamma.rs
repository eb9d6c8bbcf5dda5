use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest argument for which Γ(x) is representable in an f64.
pub const MAX_GAMMA_ARG: f64 = 171.624_376_956_302_7;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;

/// sin(πx) with exact argument reduction, so zeros at the integers are exact.
pub fn sinpi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    let (r, sign) = if r < 0.0 { (-r, -1.0) } else { (r, 1.0) };
    let v = if r > 0.5 { (PI * (1.0 - r)).sin() } else { (PI * r).sin() };
    sign * v
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn lanczos_sum(xm1: f64) -> f64 {
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (xm1 + i as f64);
    }
    acc
}

/// Γ(x) for x ≥ 0.5.
fn gamma_lanczos(x: f64) -> f64 {
    if x == x.floor() && x <= 23.0 {
        let mut p = 1.0;
        let mut k = 2.0;
        while k < x {
            p *= k;
            k += 1.0;
        }
        return p;
    }
    let xm1 = x - 1.0;
    let t = xm1 + LANCZOS_G + 0.5;
    // split the power so t^(x-1/2) cannot overflow before e^{-t} is applied
    let half = t.powf((xm1 + 0.5) / 2.0);
    SQRT_TWO_PI * half * (half * (-t).exp()) * lanczos_sum(xm1)
}

/// The Gamma function on the real line.
///
/// Negative non-integer arguments go through the reflection formula
/// Γ(x)Γ(1−x) = π / sin(πx).
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return Err(Error::Domain(format!("gamma undefined at {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x > MAX_GAMMA_ARG {
        return Err(Error::Overflow(format!("gamma({x}) exceeds f64 range")));
    }
    if x < 0.5 {
        let s = sinpi(x);
        let g = gamma_lanczos(1.0 - x);
        let v = PI / (s * g);
        if !v.is_finite() {
            return Err(Error::Overflow(format!("gamma({x}) exceeds f64 range")));
        }
        return Ok(v);
    }
    Ok(gamma_lanczos(x))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires a positive finite argument, got {x}")));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x
        return Ok(ln_gamma_lanczos(x + 1.0) - x.ln());
    }
    Ok(ln_gamma_lanczos(x))
}

fn ln_gamma_lanczos(x: f64) -> f64 {
    if x < 30.0 {
        return gamma_lanczos(x).ln();
    }
    let xm1 = x - 1.0;
    let t = xm1 + LANCZOS_G + 0.5;
    (xm1 + 0.5) * t.ln() - t + (SQRT_TWO_PI * lanczos_sum(xm1)).ln()
}

/// Reciprocal Gamma 1/Γ(x), an entire function: zero at the poles of Γ
/// and flushed to zero once Γ(x) overflows.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > MAX_GAMMA_ARG {
        return (-ln_gamma_lanczos(x)).exp();
    }
    if x < 0.5 {
        // 1/Γ(x) = sin(πx) Γ(1−x) / π
        let one_minus = 1.0 - x;
        if one_minus > MAX_GAMMA_ARG {
            let mag = (ln_gamma_lanczos(one_minus) - PI.ln()).exp();
            return sinpi(x) * mag;
        }
        return sinpi(x) * gamma_lanczos(one_minus) / PI;
    }
    1.0 / gamma_lanczos(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        let r = (gamma(0.5).unwrap() - PI.sqrt()).abs() / PI.sqrt();
        assert!(r < 1e-14, "{r}");
        assert!((gamma(0.5).unwrap() - 1.772_453_850_9).abs() < 1e-10);
    }

    #[test]
    fn poles_and_overflow() {
        assert!(matches!(gamma(0.0), Err(Error::Pole(_))));
        assert!(matches!(gamma(-3.0), Err(Error::Pole(_))));
        assert!(matches!(gamma(172.0), Err(Error::Overflow(_))));
        assert!(gamma(f64::NAN).is_err());
    }

    #[test]
    fn recurrence_holds_across_reflection_boundary() {
        for &x in &[-2.3, -0.7, 0.2, 0.45, 0.55, 1.3, 9.75, 31.5] {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!(((lhs - rhs) / lhs).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.01, 0.3, 1.7, 12.5, 29.9, 30.1, 150.0] {
            let a = ln_gamma(x).unwrap();
            let b = gamma(x).unwrap().ln();
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0), "x = {x}: {a} vs {b}");
        }
        assert!(ln_gamma(-1.0).is_err());
    }

    #[test]
    fn reciprocal_gamma() {
        assert_eq!(rgamma(-4.0), 0.0);
        assert_eq!(rgamma(0.0), 0.0);
        for &x in &[-3.5, -0.25, 0.7, 4.2] {
            let g = gamma(x).unwrap();
            assert!((rgamma(x) * g - 1.0).abs() < 1e-13);
        }
        assert!(rgamma(175.0) > 0.0 && rgamma(175.0) < 1e-300);
    }

    #[test]
    fn sinpi_exact_zeros() {
        assert_eq!(sinpi(3.0), 0.0);
        assert_eq!(sinpi(-7.0), 0.0);
        assert!((sinpi(0.5) - 1.0).abs() < 1e-16);
        assert!((sinpi(-1.5) - 1.0).abs() < 1e-15);
    }
}
