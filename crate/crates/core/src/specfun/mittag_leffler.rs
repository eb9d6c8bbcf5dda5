//! Two-parameter Mittag-Leffler function E_{α,β}(z) = Σ z^k / Γ(αk + β)
//! for real z, 0 < α ≤ 1, β > 0.
//!
//! Near the origin the power series is summed directly. Elsewhere, for
//! α < 1 and β < 1 + α, E_{α,β} is evaluated from the real-line integral
//! representation obtained by deforming the Hankel contour onto the
//! negative real axis:
//!
//! ```text
//! E_{α,β}(z) = ∫_0^∞ K(χ, z) dχ  [+ (1/α) z^{(1−β)/α} exp(z^{1/α})  if z > 0]
//! K(χ, z)   = χ^{(1−β)/α} e^{−χ^{1/α}} (χ sin(π(1−β)) − z sin(π(1−β+α)))
//!             / (απ (χ² − 2χz cos(απ) + z²))
//! ```
//!
//! Larger β is brought into range by E_{α,β}(z) = (E_{α,β−α}(z) − 1/Γ(β−α)) / z.

use std::f64::consts::PI;

use super::{gamma::ln_gamma, rgamma, sinpi, Alpha, CompensatedSum, SeriesPolicy};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Largest |z|^{1/α} for which the alternating series (z < 0) is summed:
/// its largest term is about e^{|z|^{1/α}}/α, so the cancellation loss stays
/// below ~1e-13 absolute.
const NEGATIVE_SERIES_PEAK: f64 = 6.0;
/// Same bound for z > 0, where there is no cancellation and only the number
/// of terms matters.
const POSITIVE_SERIES_PEAK: f64 = 300.0;
/// e^{−χ^{1/α}} is below e^{−60} beyond χ^{1/α} = 60.
const CHI_TAIL: f64 = 60.0;
const LN_MAX: f64 = 709.78;

/// E_α(z) = E_{α,1}(z).
pub fn mittag_leffler(alpha: Alpha, z: f64) -> Result<f64> {
    mittag_leffler_with(&SeriesPolicy::default(), alpha, 1.0, z)
}

/// E_{α,β}(z).
pub fn mittag_leffler_two(alpha: Alpha, beta: f64, z: f64) -> Result<f64> {
    mittag_leffler_with(&SeriesPolicy::default(), alpha, beta, z)
}

pub fn mittag_leffler_with(policy: &SeriesPolicy, alpha: Alpha, beta: f64, z: f64) -> Result<f64> {
    policy.validate()?;
    if !z.is_finite() {
        return Err(Error::Domain(format!("Mittag-Leffler argument must be finite, got {z}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    if z == 0.0 {
        return Ok(rgamma(beta));
    }
    let a = alpha.get();
    if a == 1.0 && beta == 1.0 {
        return exp_checked(z);
    }
    if a == 1.0 && beta == 2.0 {
        if z > LN_MAX {
            return Err(overflow(alpha, beta, z));
        }
        return Ok(z.exp_m1() / z);
    }

    let peak = z.abs().powf(1.0 / a);
    let series_ok = z.abs() <= policy.switch_radius
        && if z < 0.0 {
            peak <= NEGATIVE_SERIES_PEAK
        } else {
            peak <= POSITIVE_SERIES_PEAK
        };
    if series_ok {
        if let Some(v) = series(policy, a, beta, z)? {
            return Ok(v);
        }
    }
    if beta >= 1.0 + a {
        let lower = mittag_leffler_with(policy, alpha, beta - a, z)?;
        return Ok((lower - rgamma(beta - a)) / z);
    }
    if a == 1.0 {
        return Err(Error::Convergence(format!(
            "E_{{1,{beta}}}({z}) is outside the certified series range"
        )));
    }
    contour_integral(a, beta, z)
}

fn exp_checked(z: f64) -> Result<f64> {
    if z > LN_MAX {
        return Err(Error::Overflow(format!("exp({z}) exceeds f64 range")));
    }
    Ok(z.exp())
}

fn overflow(alpha: Alpha, beta: f64, z: f64) -> Error {
    Error::Overflow(format!(
        "E_{{{},{beta}}}({z}) exceeds f64 range",
        alpha.get()
    ))
}

/// Power series with a certified error bound; `None` when the bound is not met.
fn series(policy: &SeriesPolicy, a: f64, beta: f64, z: f64) -> Result<Option<f64>> {
    let mut acc = CompensatedSum::default();
    let ln_abs_z = z.abs().ln();
    let negative = z < 0.0;
    let mut prev_mag = f64::INFINITY;
    for k in 0..policy.max_terms {
        let arg = a * k as f64 + beta;
        let mag = if k == 0 {
            rgamma(beta).abs()
        } else {
            (k as f64 * ln_abs_z - ln_gamma(arg)?).exp()
        };
        let term = if negative && k % 2 == 1 { -mag } else { mag };
        acc.add(if k == 0 { rgamma(beta) } else { term });
        if !acc.value().is_finite() {
            return Err(Error::Overflow(format!("E_{{{a},{beta}}}({z}) exceeds f64 range")));
        }
        // past the peak the ratio of consecutive terms decays like |z| (αk)^{−α}
        let ratio = mag / prev_mag;
        prev_mag = mag;
        if k > 2 && ratio < 0.5 {
            let tail = mag;
            let scale = acc.value().abs();
            if tail <= f64::EPSILON * 1e-2 * scale.max(1e-300) || tail == 0.0 {
                let roundoff = 4.0 * f64::EPSILON * acc.abs_total();
                let bound = tail + roundoff;
                if bound <= policy.abs_tol.max(1e-12 * scale) {
                    return Ok(Some(acc.value()));
                }
                return Ok(None);
            }
        }
    }
    Ok(None)
}

fn contour_integral(a: f64, beta: f64, z: f64) -> Result<f64> {
    let mut exp_part = 0.0;
    if z > 0.0 {
        let ln_term = -a.ln() + ((1.0 - beta) / a) * z.ln() + z.powf(1.0 / a);
        if ln_term > LN_MAX {
            return Err(Error::Overflow(format!(
                "E_{{{a},{beta}}}({z}) exceeds f64 range (log magnitude {ln_term:.1})"
            )));
        }
        exp_part = ln_term.exp();
    }

    let inv_a = 1.0 / a;
    let power = (1.0 - beta) / a;
    let cos_ap = (PI * a).cos();
    let s1 = sinpi(1.0 - beta);
    let s2 = sinpi(1.0 - beta + a);
    let pref = 1.0 / (a * PI);
    let kernel = |chi: f64| -> f64 {
        let e = (-chi.powf(inv_a)).exp();
        if e == 0.0 {
            return 0.0;
        }
        let num = chi * s1 - z * s2;
        let den = chi * chi - 2.0 * chi * z * cos_ap + z * z;
        pref * chi.powf(power) * e * num / den
    };

    let chi_max = CHI_TAIL.powf(a);
    let mut breaks = vec![0.0, chi_max];
    let centre = z * cos_ap;
    let width = z.abs() * sinpi(a).abs();
    for p in [centre - 2.0 * width, centre - 0.5 * width, centre, centre + 0.5 * width, centre + 2.0 * width] {
        breaks.push(p);
    }
    for p in [z.abs() * 0.5, z.abs(), 2.0 * z.abs(), 1.0, 0.5] {
        breaks.push(p);
    }
    breaks.retain(|&p| p >= 0.0 && p <= chi_max && p.is_finite());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * chi_max);

    let tol = Tolerance {
        abs: 1e-300,
        rel: 1e-13,
        max_intervals: 4000,
    };
    let integral = integrate(kernel, &breaks, tol).map_err(|e| match e {
        Error::Quadrature(msg) => Error::Convergence(format!("E_{{{a},{beta}}}({z}): {msg}")),
        other => other,
    })?;
    Ok(integral.value + exp_part)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn al(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    #[test]
    fn value_at_zero() {
        for &a in &[0.2, 0.5, 1.0] {
            assert_eq!(mittag_leffler(al(a), 0.0).unwrap(), 1.0);
        }
        let g = crate::specfun::gamma(0.7).unwrap();
        assert!((mittag_leffler_two(al(0.7), 0.7, 0.0).unwrap() - 1.0 / g).abs() < 1e-15);
    }

    #[test]
    fn exponential_case() {
        assert!((mittag_leffler(al(1.0), 1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        for &z in &[-1.0, 0.0, 2.0] {
            assert!((mittag_leffler_two(al(1.0), 1.0, z).unwrap() - z.exp()).abs() < 1e-14 * z.exp());
        }
    }

    #[test]
    fn half_order_closed_form() {
        // E_{1/2}(−x) = e^{x²} erfc(x); at x = 2 this is 0.25539567631050...
        let v = mittag_leffler(al(0.5), -2.0).unwrap();
        assert!((v - 0.255_395_676_310_505_7).abs() < 1e-12, "{v}");
    }

    #[test]
    fn series_and_integral_agree_on_overlap() {
        let policy_series = SeriesPolicy {
            switch_radius: 10.0,
            ..SeriesPolicy::default()
        };
        for &a in &[0.6, 0.8, 0.95] {
            for &z in &[-2.5, -1.2, 0.8, 2.0] {
                let s = mittag_leffler_with(&policy_series, al(a), 1.0, z).unwrap();
                let i = contour_integral(a, 1.0, z).unwrap();
                assert!((s - i).abs() < 1e-12 * s.abs().max(1.0), "a={a} z={z}: {s} vs {i}");
                let s = mittag_leffler_with(&policy_series, al(a), a, z).unwrap();
                let i = contour_integral(a, a, z).unwrap();
                assert!((s - i).abs() < 1e-12 * s.abs().max(1.0), "beta=a a={a} z={z}: {s} vs {i}");
            }
        }
    }

    #[test]
    fn beta_recurrence() {
        // E_{α,α+1}(z) = (E_α(z) − 1)/z
        let a = 0.6;
        for &z in &[-30.0, -7.0, 4.0] {
            let lhs = mittag_leffler_two(al(a), 1.0 + a, z).unwrap();
            let rhs = (mittag_leffler(al(a), z).unwrap() - 1.0) / z;
            assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0));
        }
        // E_{1,2}(z) = (e^z − 1)/z
        assert!((mittag_leffler_two(al(1.0), 2.0, 1e-8).unwrap() - 1.000_000_005).abs() < 1e-15);
    }

    #[test]
    fn overflow_reported() {
        assert!(matches!(mittag_leffler(al(0.5), 40.0), Err(Error::Overflow(_))));
        assert!(matches!(mittag_leffler(al(1.0), 800.0), Err(Error::Overflow(_))));
        assert!(mittag_leffler(al(0.5), f64::NAN).is_err());
        assert!(mittag_leffler_two(al(0.5), -1.0, 1.0).is_err());
    }

    #[test]
    fn near_markov_order() {
        let v = mittag_leffler(al(0.999_999), -3.0).unwrap();
        assert!((v - (-3f64).exp()).abs() < 1e-5);
    }

    #[test]
    fn small_alpha_large_arguments() {
        // leading algebraic term 1/(x Γ(1−α)) dominates
        let a = 0.1;
        let x = 1e8;
        let v = mittag_leffler(al(a), -x).unwrap();
        let lead = 1.0 / (x * crate::specfun::gamma(1.0 - a).unwrap());
        assert!((v / lead - 1.0).abs() < 1e-6);
    }
}
