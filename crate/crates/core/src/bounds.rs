//! A-priori bounds on ‖k_t^(n)‖_∞, their large-time envelopes, and the two
//! integral identities behind them.
//!
//! With q = κA/(κ−1) (κ > 1), r = κA/(1−κ) (κ < 1) and
//! F(n, j) = (n−1)(n−2)⋯(n−j−1):
//!
//! ```text
//! κ > 1:  E_α(n(κ−1)t^α) [C^n n! + C^{n−1} n! Σ_j q^{j+1} F(n, j)]
//! κ < 1:  C^n n! E_α(−n(1−κ)t^α)
//!           + C^{n−1} n! Σ_j r^{j+1} F(n, j)/(j+1)! E_α(−(n−j−1)(1−κ)t^α)
//! κ = 1:  C^n n! + α^{−1} C^{n−1} n! Σ_j A^{j+1} F(n, j) t^{(j+1)α} / ((j+1) Γ((j+1)α))
//! ```
//!
//! with j running over 0..=n−2.

use std::fmt;

use crate::error::{Error, Result};
use crate::hierarchy::{FractionalParams, NormTable};
use crate::quadrature::{gauss_jacobi, VolterraRule};
use crate::specfun::{gamma, mittag_leffler, mittag_leffler_two, Alpha};

/// Relative slack in every bound and envelope comparison.
pub const BOUND_SLACK: f64 = 1e-6;
/// Below this relative separation the Djrbashian divided difference is
/// replaced by a derivative.
pub const DEGENERATE_GAP: f64 = 1e-5;
/// Volterra nodes per half interval for the Djrbashian left-hand side.
pub const IDENTITY_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Supercritical,
    Subcritical,
    Critical,
}

impl Regime {
    pub fn of(kappa: f64) -> Self {
        if kappa > 1.0 {
            Regime::Supercritical
        } else if kappa < 1.0 {
            Regime::Subcritical
        } else {
            Regime::Critical
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Supercritical => "supercritical",
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// (n−1)(n−2)⋯(n−j−1)
fn falling(n: usize, j: usize) -> f64 {
    (1..=j + 1).map(|i| (n - i) as f64).product()
}

fn check_common(n: usize, t: f64, c: f64, a: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("bounds are defined for n ≥ 1".into()));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t must be finite and non-negative, got {t}")));
    }
    if !(c >= 1.0) || !c.is_finite() {
        return Err(Error::Domain(format!("C must be at least 1, got {c}")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("A must be positive, got {a}")));
    }
    Ok(())
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("{what} exceeds f64 range")))
    }
}

pub fn bound_supercritical(n: usize, t: f64, alpha: Alpha, kappa: f64, c: f64, a: f64) -> Result<f64> {
    check_common(n, t, c, a)?;
    if !(kappa > 1.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!("supercritical bound needs kappa > 1, got {kappa}")));
    }
    if a < 1.0 {
        return Err(Error::Domain(format!("supercritical bound needs A ≥ 1, got {a}")));
    }
    let nf = factorial(n);
    let q = kappa * a / (kappa - 1.0);
    let mut bracket = c.powi(n as i32) * nf;
    for j in 0..n.saturating_sub(1) {
        bracket += c.powi(n as i32 - 1) * nf * q.powi(j as i32 + 1) * falling(n, j);
    }
    let growth = mittag_leffler(alpha, n as f64 * (kappa - 1.0) * t.powf(alpha.get()))?;
    finite(growth * bracket, "supercritical bound")
}

pub fn bound_subcritical(n: usize, t: f64, alpha: Alpha, kappa: f64, c: f64, a: f64) -> Result<f64> {
    check_common(n, t, c, a)?;
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Domain(format!("subcritical bound needs 0 < kappa < 1, got {kappa}")));
    }
    let nf = factorial(n);
    let ta = t.powf(alpha.get());
    let r = kappa * a / (1.0 - kappa);
    let mut total = c.powi(n as i32) * nf * mittag_leffler(alpha, -(n as f64) * (1.0 - kappa) * ta)?;
    for j in 0..n.saturating_sub(1) {
        let decay = mittag_leffler(alpha, -((n - j - 1) as f64) * (1.0 - kappa) * ta)?;
        total += c.powi(n as i32 - 1) * nf * r.powi(j as i32 + 1) * falling(n, j) / factorial(j + 1) * decay;
    }
    finite(total, "subcritical bound")
}

pub fn bound_critical(n: usize, t: f64, alpha: Alpha, c: f64, a: f64) -> Result<f64> {
    check_common(n, t, c, a)?;
    let al = alpha.get();
    let nf = factorial(n);
    let mut total = c.powi(n as i32) * nf;
    for j in 0..n.saturating_sub(1) {
        let k = (j + 1) as f64;
        let w = a.powi(j as i32 + 1) / (k * gamma(k * al)?);
        total += c.powi(n as i32 - 1) * nf / al * w * falling(n, j) * t.powf(k * al);
    }
    finite(total, "critical bound")
}

/// The bound of the regime selected by κ.
pub fn bound_for(n: usize, t: f64, params: &FractionalParams, a: f64) -> Result<f64> {
    match Regime::of(params.kappa) {
        Regime::Supercritical => bound_supercritical(n, t, params.alpha, params.kappa, params.c, a),
        Regime::Subcritical => bound_subcritical(n, t, params.alpha, params.kappa, params.c, a),
        Regime::Critical => bound_critical(n, t, params.alpha, params.c, a),
    }
}

/// M C^n n! (n−1)! q^n/(q−1) e^{[n(κ−1)]^{1/α} t}
pub fn envelope_supercritical(n: usize, t: f64, alpha: Alpha, kappa: f64, c: f64, a: f64, m: f64) -> Result<f64> {
    check_common(n, t, c, a)?;
    if !(kappa > 1.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!("supercritical envelope needs kappa > 1, got {kappa}")));
    }
    let q = kappa * a / (kappa - 1.0);
    if q <= 1.0 {
        return Err(Error::Domain(format!(
            "supercritical envelope needs q = κA/(κ−1) > 1, got q = {q} (kappa = {kappa}, A = {a})"
        )));
    }
    let rate = (n as f64 * (kappa - 1.0)).powf(1.0 / alpha.get());
    let ln = m.ln()
        + n as f64 * c.ln()
        + factorial(n).ln()
        + factorial(n - 1).ln()
        + n as f64 * q.ln()
        - (q - 1.0).ln()
        + rate * t;
    if ln > 709.78 {
        return Err(Error::Overflow(format!("supercritical envelope at t = {t} exceeds f64 range")));
    }
    Ok(ln.exp())
}

/// M C^n n! (n−1)! (κA/(1−κ))^n t^{−α}, t ≥ 1.
pub fn envelope_subcritical(n: usize, t: f64, alpha: Alpha, kappa: f64, c: f64, a: f64, m: f64) -> Result<f64> {
    check_common(n, t, c, a)?;
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Domain(format!("subcritical envelope needs 0 < kappa < 1, got {kappa}")));
    }
    if t < 1.0 {
        return Err(Error::Domain(format!("subcritical envelope holds for t ≥ 1, got {t}")));
    }
    let r = kappa * a / (1.0 - kappa);
    Ok(m * c.powi(n as i32) * factorial(n) * factorial(n - 1) * r.powi(n as i32) * t.powf(-alpha.get()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    Supercritical,
    Subcritical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSpec {
    pub kind: Envelope,
    pub n: usize,
    pub alpha: Alpha,
    pub kappa: f64,
    pub c: f64,
    pub a: f64,
}

impl EnvelopeSpec {
    pub fn eval(&self, t: f64, m: f64) -> Result<f64> {
        match self.kind {
            Envelope::Supercritical => envelope_supercritical(self.n, t, self.alpha, self.kappa, self.c, self.a, m),
            Envelope::Subcritical => envelope_subcritical(self.n, t, self.alpha, self.kappa, self.c, self.a, m),
        }
    }

    /// The growth rate [n(κ−1)]^{1/α} or the log-log slope −α.
    pub fn exponent_or_slope(&self) -> f64 {
        match self.kind {
            Envelope::Supercritical => (self.n as f64 * (self.kappa - 1.0)).powf(1.0 / self.alpha.get()),
            Envelope::Subcritical => -self.alpha.get(),
        }
    }

    pub fn bound(&self, t: f64) -> Result<f64> {
        match self.kind {
            Envelope::Supercritical => bound_supercritical(self.n, t, self.alpha, self.kappa, self.c, self.a),
            Envelope::Subcritical => bound_subcritical(self.n, t, self.alpha, self.kappa, self.c, self.a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeFit {
    /// Least-squares M in log space over the fit samples.
    pub m_estimate: f64,
    /// Smallest M with envelope ≥ every fit sample.
    pub m_dominating: f64,
    pub exponent_or_slope: f64,
    /// First scan time from which envelope(m_estimate)·(1 + BOUND_SLACK)
    /// dominates the proposition bound at every later scan time.
    pub t_star: Option<f64>,
}

/// Fits M to `samples` (t, value) and scans dominance over the proposition
/// bound at `scan` times.
pub fn fit_envelope(spec: &EnvelopeSpec, samples: &[(f64, f64)], scan: &[f64]) -> Result<EnvelopeFit> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples { need: 1, got: 0 });
    }
    let mut log_sum = 0.0;
    let mut m_dom = 0.0f64;
    for &(t, v) in samples {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("envelope fit needs positive samples, got {v} at t = {t}")));
        }
        let ratio = v / spec.eval(t, 1.0)?;
        log_sum += ratio.ln();
        m_dom = m_dom.max(ratio);
    }
    let m = (log_sum / samples.len() as f64).exp();
    let mut t_star = None;
    for &t in scan.iter().rev() {
        if spec.eval(t, m)? * (1.0 + BOUND_SLACK) >= spec.bound(t)? {
            t_star = Some(t);
        } else {
            break;
        }
    }
    Ok(EnvelopeFit {
        m_estimate: m,
        m_dominating: m_dom,
        exponent_or_slope: spec.exponent_or_slope(),
        t_star,
    })
}

/// Value of the Djrbashian left-hand side
/// ∫_0^t (t−τ)^{α−1} E_{α,α}(z(t−τ)^α) E_α(λτ^α) dτ with `per_half` nodes on each half.
pub fn djrbashian_lhs(alpha: Alpha, z: f64, lambda: f64, t: f64, per_half: usize) -> Result<f64> {
    let al = alpha.get();
    let rule = VolterraRule::new(al, t, per_half)?;
    let (mut kernel_err, mut history_err) = (None, None);
    let value = rule.apply(
        |u| {
            mittag_leffler_two(alpha, al, z * u.powf(al)).unwrap_or_else(|e| {
                kernel_err.get_or_insert(e);
                0.0
            })
        },
        |s| {
            mittag_leffler(alpha, lambda * s.powf(al)).unwrap_or_else(|e| {
                history_err.get_or_insert(e);
                0.0
            })
        },
    );
    match kernel_err.or(history_err) {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// (E_α(zt^α) − E_α(λt^α))/(z − λ), or its z → λ limit.
pub fn djrbashian_rhs(alpha: Alpha, z: f64, lambda: f64, t: f64) -> Result<f64> {
    let ta = t.powf(alpha.get());
    let scale = z.abs().max(lambda.abs()).max(1.0);
    if (z - lambda).abs() < DEGENERATE_GAP * scale {
        let h = 1e-6 * lambda.abs().max(1.0);
        let up = mittag_leffler(alpha, (lambda + h) * ta)?;
        let down = mittag_leffler(alpha, (lambda - h) * ta)?;
        return Ok((up - down) / (2.0 * h));
    }
    Ok((mittag_leffler(alpha, z * ta)? - mittag_leffler(alpha, lambda * ta)?) / (z - lambda))
}

/// |LHS − RHS| / max(1, |RHS|): absolute for moderate values, relative once
/// E_α(λt^α) is large enough that an absolute target would lie below roundoff.
pub fn djrbashian_identity_residual(alpha: Alpha, z: f64, lambda: f64, t: f64, per_half: usize) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("identity needs t > 0, got {t}")));
    }
    let lhs = djrbashian_lhs(alpha, z, lambda, t, per_half)?;
    let rhs = djrbashian_rhs(alpha, z, lambda, t)?;
    Ok((lhs - rhs).abs() / rhs.abs().max(1.0))
}

/// ∫_0^t (t−τ)^{α−1} τ^{β−1} dτ, split at t/2 with a Jacobi rule on each
/// half absorbing the nearby endpoint singularity.
pub fn beta_integral(alpha: f64, beta: f64, t: f64, nodes: usize) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::Domain(format!("{name} must lie in (0,1], got {v}")));
        }
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("identity needs t > 0, got {t}")));
    }
    let q = 0.25 * t;
    // τ = q(1+x) on [0, t/2]: τ^{β−1} = q^{β−1}(1+x)^{β−1}
    let lower = gauss_jacobi(nodes, 0.0, beta - 1.0)?;
    let lo = q.powf(beta) * lower.sum(|x| (t - q * (1.0 + x)).powf(alpha - 1.0));
    // t − τ = q(1−x) on [t/2, t]
    let upper = gauss_jacobi(nodes, alpha - 1.0, 0.0)?;
    let hi = q.powf(alpha) * upper.sum(|x| (t - q * (1.0 - x)).powf(beta - 1.0));
    Ok(lo + hi)
}

pub fn beta_identity_residual(alpha: f64, beta: f64, t: f64) -> Result<f64> {
    let lhs = beta_integral(alpha, beta, t, 32)?;
    let rhs = gamma(alpha)? * gamma(beta)? / gamma(alpha + beta)? * t.powf(alpha + beta - 1.0);
    Ok((lhs - rhs).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub n: usize,
    pub t: f64,
    pub solver_norm: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub regime: Regime,
    /// The constant A used in the bounds.
    pub a: f64,
    pub rows: Vec<BoundRow>,
    pub envelope_fit: Option<EnvelopeFit>,
}

pub const BOUND_REPORT_HEADER: &str = "regime,n,t,solver_norm,bound,ratio,pass";

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn csv_row(&self, row: &BoundRow) -> String {
        format!(
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.regime, row.n, row.t, row.solver_norm, row.bound, row.ratio, row.pass
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(BOUND_REPORT_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&self.csv_row(row));
            out.push('\n');
        }
        out
    }
}

/// The A entering the bounds for a kernel with sup a = `sup_a`: the bounds
/// are stated for A ≥ 1 and only grow with A.
pub fn bound_constant(sup_a: f64) -> f64 {
    sup_a.max(1.0)
}

/// Compares every row of `norms` with the bound of `regime`. `sup_a` is the
/// kernel's sup norm.
pub fn check_solution_against_bounds(
    norms: &NormTable,
    params: &FractionalParams,
    sup_a: f64,
    regime: Regime,
) -> Result<BoundReport> {
    let actual = Regime::of(params.kappa);
    if actual != regime {
        return Err(Error::RegimeMismatch {
            kappa: params.kappa,
            requested: regime.name(),
            actual: actual.name(),
        });
    }
    let a = bound_constant(sup_a);
    let mut rows = Vec::with_capacity(norms.rows.len());
    for r in &norms.rows {
        let bound = bound_for(r.n, r.t, params, a)?;
        let pass = r.max_norm <= bound * (1.0 + BOUND_SLACK);
        rows.push(BoundRow {
            n: r.n,
            t: r.t,
            solver_norm: r.max_norm,
            bound,
            ratio: r.max_norm / bound,
            pass,
        });
    }

    let kind = match regime {
        Regime::Supercritical => Some(Envelope::Supercritical),
        Regime::Subcritical => Some(Envelope::Subcritical),
        Regime::Critical => None,
    };
    let envelope_fit = match kind {
        Some(kind) => {
            let spec = EnvelopeSpec {
                kind,
                n: 1,
                alpha: params.alpha,
                kappa: params.kappa,
                c: params.c,
                a,
            };
            let samples: Vec<(f64, f64)> = norms
                .for_order(1)
                .filter(|r| kind == Envelope::Supercritical || r.t >= 1.0)
                .map(|r| (r.t, r.max_norm))
                .collect();
            if samples.is_empty() {
                None
            } else {
                let scan: Vec<f64> = samples.iter().map(|s| s.0).collect();
                Some(fit_envelope(&spec, &samples, &scan)?)
            }
        }
        None => None,
    };
    Ok(BoundReport {
        regime,
        a,
        rows,
        envelope_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn al(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    #[test]
    fn first_order_bounds() {
        assert_eq!(bound_supercritical(1, 0.0, al(0.5), 1.5, 2.0, 1.0).unwrap(), 2.0);
        for &t in &[0.0, 1.0, 50.0] {
            assert_eq!(bound_critical(1, t, al(0.3), 1.7, 3.0).unwrap(), 1.7);
        }
        let v = bound_subcritical(1, 2.0, al(0.7), 0.4, 1.3, 1.0).unwrap();
        let want = 1.3 * mittag_leffler(al(0.7), -0.6 * 2f64.powf(0.7)).unwrap();
        assert_eq!(v, want);
    }

    #[test]
    fn second_order_closed_forms() {
        let (a, k, c, big_a, t) = (al(0.6), 1.8, 1.2, 1.5, 0.9f64);
        let q = k * big_a / (k - 1.0);
        let want = mittag_leffler(a, 2.0 * (k - 1.0) * t.powf(0.6)).unwrap() * (2.0 * c * c + 2.0 * c * q);
        let got = bound_supercritical(2, t, a, k, c, big_a).unwrap();
        assert!((got - want).abs() < 1e-14 * want);

        let want = 2.0 * c * c + 2.0 * c * big_a / (0.6 * gamma(0.6).unwrap()) * t.powf(0.6);
        let got = bound_critical(2, t, a, c, big_a).unwrap();
        assert!((got - want).abs() < 1e-14 * want);
    }

    #[test]
    fn subcritical_at_zero() {
        // all E_α factors equal 1
        let (k, c, big_a) = (0.3, 1.4f64, 2.0);
        let r = k * big_a / (1.0 - k);
        let want = 6.0 * c.powi(3) + c * c * 6.0 * (r * 2.0 + r * r * 2.0 / 2.0);
        let got = bound_subcritical(3, 0.0, al(0.5), k, c, big_a).unwrap();
        assert!((got - want).abs() < 1e-13 * want);
    }

    #[test]
    fn domain_errors() {
        assert!(bound_supercritical(2, 1.0, al(0.5), 0.9, 1.0, 1.0).is_err());
        assert!(bound_supercritical(2, 1.0, al(0.5), 1.5, 1.0, 0.5).is_err());
        assert!(bound_subcritical(2, 1.0, al(0.5), 1.0, 1.0, 1.0).is_err());
        assert!(bound_critical(2, 1.0, al(0.5), 0.5, 1.0).is_err());
        assert!(envelope_subcritical(1, 0.5, al(0.5), 0.5, 1.0, 1.0, 1.0).is_err());
        // q = κA/(κ−1) ≤ 1 needs A < 1 − 1/κ
        assert!(envelope_supercritical(1, 1.0, al(0.5), 2.0, 1.0, 0.4, 1.0).is_err());
        assert!(matches!(
            bound_supercritical(1, 1e4, al(0.5), 2.0, 1.0, 1.0),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn envelope_rates() {
        let a = al(0.5);
        let e1 = envelope_supercritical(2, 3.0, a, 1.5, 1.0, 1.0, 1.0).unwrap();
        let e2 = envelope_supercritical(2, 4.0, a, 1.5, 1.0, 1.0, 1.0).unwrap();
        assert!(((e2 / e1).ln() - 1.0).abs() < 1e-12);
        let s1 = envelope_subcritical(2, 10.0, al(0.7), 0.5, 1.0, 1.0, 1.0).unwrap();
        let s2 = envelope_subcritical(2, 1000.0, al(0.7), 0.5, 1.0, 1.0, 1.0).unwrap();
        assert!(((s2 / s1).ln() / 100f64.ln() + 0.7).abs() < 1e-12);
    }

    #[test]
    fn markov_identity() {
        let r = djrbashian_identity_residual(al(1.0), 2.0, 1.0, 1.0, 16).unwrap();
        assert!(r < 1e-13, "{r}");
        let rhs = djrbashian_rhs(al(1.0), 2.0, 1.0, 1.0).unwrap();
        let e = std::f64::consts::E;
        assert!((rhs - (e * e - e)).abs() < 1e-13);
    }

    #[test]
    fn degenerate_limit() {
        let a = al(0.6);
        let lim = djrbashian_rhs(a, -1.0, -1.0, 1.5).unwrap();
        let near = djrbashian_rhs(a, -1.0 + 1e-4, -1.0, 1.5).unwrap();
        assert!((lim - near).abs() < 1e-4);
        let r = djrbashian_identity_residual(a, -1.0, -1.0, 1.5, IDENTITY_NODES).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn beta_values() {
        assert!(beta_identity_residual(1.0, 1.0, 3.0).unwrap() < 1e-14);
        let pi = beta_integral(0.5, 0.5, 1.0, 32).unwrap();
        assert!((pi - std::f64::consts::PI).abs() < 1e-12);
        assert!(beta_identity_residual(0.3, 0.9, 2.5).unwrap() < 1e-8);
    }
}
