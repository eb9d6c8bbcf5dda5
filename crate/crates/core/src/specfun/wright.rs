//! Wright function of the second kind (M-Wright / Mainardi function)
//!
//! ```text
//! Φ_α(z) = Σ_k (−z)^k / (k! Γ(1 − α − αk)),   0 < α < 1, z ≥ 0.
//! ```
//!
//! Φ_α is the density of the subordinator that turns e^{tλ} into E_α(λt^α).
//! Small arguments use the series; larger ones the Zolotarev-type integral
//!
//! ```text
//! Φ_α(z) = z^{α/(1−α)} / (π(1−α)) ∫_0^π A(φ) exp(−z^{1/(1−α)} A(φ)) dφ,
//! A(φ)   = sin(αφ)^{α/(1−α)} sin((1−α)φ) / sin(φ)^{1/(1−α)}.
//! ```

use std::f64::consts::PI;

use super::{gamma, ln_gamma, sinpi, Alpha, CompensatedSum, SeriesPolicy};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Largest Σ|term| for which the series is trusted (roundoff ≲ 1e-13).
const SERIES_MASS_LIMIT: f64 = 100.0;

pub fn wright(alpha: Alpha, z: f64) -> Result<f64> {
    wright_with(&SeriesPolicy::default(), alpha, z)
}

pub fn wright_with(policy: &SeriesPolicy, alpha: Alpha, z: f64) -> Result<f64> {
    policy.validate()?;
    let a = alpha.get();
    if a >= 1.0 {
        return Err(Error::Domain(
            "the Wright density is a point mass at alpha = 1".into(),
        ));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("Wright argument must be finite and non-negative, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0 / gamma(1.0 - a)?);
    }
    if z <= policy.switch_radius {
        if let Some(v) = series(policy, a, z)? {
            return Ok(v);
        }
    }
    zolotarev(a, z)
}

/// E[τ^n] = n! / Γ(1 + αn) for τ with density Φ_α.
pub fn wright_moment(alpha: Alpha, n: u32) -> Result<f64> {
    let a = alpha.get();
    let n = n as f64;
    let ln = ln_gamma(n + 1.0)? - ln_gamma(1.0 + a * n)?;
    if n + 1.0 <= 170.0 {
        return Ok(gamma(n + 1.0)? / gamma(1.0 + a * n)?);
    }
    if ln > 709.78 {
        return Err(Error::Overflow(format!("moment {n} of the Wright density exceeds f64 range")));
    }
    Ok(ln.exp())
}

fn series(policy: &SeriesPolicy, a: f64, z: f64) -> Result<Option<f64>> {
    // term_k = (−z)^k sin(πα(k+1)) Γ(α(k+1)) / (π k!)
    let ln_z = z.ln();
    let mut acc = CompensatedSum::default();
    let mut prev = f64::INFINITY;
    for k in 0..policy.max_terms {
        let kf = k as f64;
        let g = a * (kf + 1.0);
        let ln_mag = kf * ln_z - ln_gamma(kf + 1.0)? + ln_gamma(g)? - PI.ln();
        let mag = ln_mag.exp();
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        acc.add(sign * sinpi(g) * mag);
        if acc.abs_total() > SERIES_MASS_LIMIT {
            return Ok(None);
        }
        let ratio = mag / prev;
        prev = mag;
        if k > 2 && ratio < 0.5 && mag <= 1e-18 * acc.abs_total().max(1e-300) {
            let bound = mag + 4.0 * f64::EPSILON * acc.abs_total();
            if bound <= policy.abs_tol.max(1e-12 * acc.value().abs()) {
                return Ok(Some(acc.value()));
            }
            return Ok(None);
        }
    }
    Ok(None)
}

fn zolotarev(a: f64, z: f64) -> Result<f64> {
    let p = a / (1.0 - a);
    let q = 1.0 / (1.0 - a);
    let c = z.powf(q);
    let ln_a = move |phi: f64| -> f64 {
        p * (a * phi).sin().ln() + ((1.0 - a) * phi).sin().ln() - q * phi.sin().ln()
    };
    let integrand = |phi: f64| -> f64 {
        if phi <= 0.0 || phi >= PI {
            return 0.0;
        }
        let la = ln_a(phi);
        let av = la.exp();
        let expo = la - c * av;
        if expo < -745.0 {
            0.0
        } else {
            expo.exp()
        }
    };

    let mut breaks: Vec<f64> = (0..8).map(|j| PI * 0.5f64.powi(j)).collect();
    breaks.push(0.0);
    // the integrand peaks where A(φ) = 1/c; A increases monotonically on (0, π)
    let target = (1.0 / c).ln();
    if ln_a(1e-9) < target {
        let (mut lo, mut hi) = (1e-9, PI - 1e-9);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if ln_a(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let peak = 0.5 * (lo + hi);
        breaks.extend([peak, 0.5 * peak, (peak + PI) * 0.5]);
    }
    breaks.retain(|x| (0.0..=PI).contains(x));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() < 1e-14);

    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-13,
        max_intervals: 4000,
    };
    let integral = integrate(integrand, &breaks, tol).map_err(|e| match e {
        Error::Quadrature(msg) => Error::Convergence(format!("Wright Φ_{a}({z}): {msg}")),
        other => other,
    })?;
    Ok(z.powf(p) / (PI * (1.0 - a)) * integral.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn al(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    #[test]
    fn half_order_is_gaussian() {
        // Φ_{1/2}(z) = exp(−z²/4)/√π
        for &z in &[0.0, 0.3, 1.0, 2.5, 6.0, 12.0] {
            let v = wright(al(0.5), z).unwrap();
            let exact = (-z * z / 4.0).exp() / PI.sqrt();
            assert!((v - exact).abs() < 1e-13 * exact.max(1e-300) + 1e-300, "z={z}: {v} vs {exact}");
        }
    }

    #[test]
    fn series_and_integral_agree() {
        for &a in &[0.2, 0.5, 0.75] {
            for &z in &[0.2, 1.0, 2.0] {
                let s = series(&SeriesPolicy::default(), a, z).unwrap().unwrap();
                let i = zolotarev(a, z).unwrap();
                assert!((s - i).abs() < 1e-12, "a={a} z={z}: {s} vs {i}");
            }
        }
    }

    #[test]
    fn moments() {
        assert_eq!(wright_moment(al(0.5), 0).unwrap(), 1.0);
        let m1 = wright_moment(al(0.5), 1).unwrap();
        assert!((m1 - 1.0 / gamma(1.5).unwrap()).abs() < 1e-15);
        assert!(wright_moment(al(0.5), 400).is_err());
    }

    #[test]
    fn domain() {
        assert!(wright(al(1.0), 1.0).is_err());
        assert!(wright(al(0.5), -1.0).is_err());
    }
}
