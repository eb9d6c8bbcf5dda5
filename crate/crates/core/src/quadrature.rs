//! Quadrature building blocks.
//!
//! * adaptive Gauss–Kronrod (7/15) for smooth integrands on finite intervals,
//! * Gauss–Jacobi rules from the Golub–Welsch eigenvalue construction,
//! * a product rule for weakly singular Volterra integrals
//!   `∫_0^t (t−s)^{α−1} g(t−s) f(s) ds` whose integrands behave like power
//!   series in `s^α` and `(t−s)^α`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::specfun::ln_gamma;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-14,
            rel: 1e-12,
            max_intervals: 2000,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, error }
}

/// Adaptive Gauss–Kronrod integration over the consecutive intervals
/// `[breaks[0], breaks[1]], [breaks[1], breaks[2]], …`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], tol: Tolerance) -> Result<Integral> {
    if breaks.len() < 2 {
        return Err(Error::Domain("integration needs at least two break points".into()));
    }
    let mut panels: Vec<Panel> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod15(&mut f, w[0], w[1]))
        .collect();
    let mut evaluations = 15 * panels.len();
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand value on [{}, {}]", breaks[0], breaks[breaks.len() - 1])));
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Integral {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if panels.len() >= tol.max_intervals {
            return Err(Error::Quadrature(format!(
                "no convergence after {} subintervals (estimate {value:e}, error {error:e})",
                panels.len()
            )));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::Quadrature(format!("interval [{}, {}] cannot be bisected further", p.a, p.b)));
        }
        panels.push(kronrod15(&mut f, p.a, mid));
        panels.push(kronrod15(&mut f, mid, p.b));
        evaluations += 30;
    }
}

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sum<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// ∫_{-1}^{1} (1−x)^a (1+x)^b dx.
fn jacobi_moment(a: f64, b: f64) -> Result<f64> {
    if a == 0.0 {
        return Ok(2f64.powf(b + 1.0) / (b + 1.0));
    }
    if b == 0.0 {
        return Ok(2f64.powf(a + 1.0) / (a + 1.0));
    }
    let ln = (a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0)? + ln_gamma(b + 1.0)? - ln_gamma(a + b + 2.0)?;
    Ok(ln.exp())
}

/// Gauss–Jacobi rule for the weight (1−x)^a (1+x)^b on [-1, 1], a, b > −1.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::Domain("a Gauss rule needs at least one node".into()));
    }
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::Domain(format!("Jacobi exponents must exceed -1, got ({a}, {b})")));
    }
    let mu0 = jacobi_moment(a, b)?;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    let ab = a + b;
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let m = kf + 1.0;
            let beta = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * m * (m + a) * (m + b) * (m + ab)
                    / ((2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0))
            };
            let off = beta.sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Grading exponent m of the Volterra substitution; steeper grading pays
/// off only when the kernel singularity is mild.
fn grading(alpha: f64) -> f64 {
    if alpha < 0.5 {
        2.0
    } else {
        3.0
    }
}

/// One node of a Volterra product rule: the history time `s`, the lag
/// `t − s` and the weight multiplying `P(t − s) f(s)` where
/// `P(u) = u^{α−1} g(u)` carries the kernel singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolterraNode {
    pub s: f64,
    pub lag: f64,
    pub weight: f64,
}

/// Product rule for `∫_0^t (t−s)^{α−1} g(t−s) f(s) ds`.
///
/// The interval is split at `t/2`. On the upper half the lag is graded as
/// `u = (t/2) w^{m/α}`, which turns `u^{α−1} du` into `w^{m−1} dw`; on the
/// lower half `s = (t/2) v^{m/α}` leaves a Jacobi weight `v^{m/α−1}`. Functions
/// of `u^α` (resp. `s^α`) become polynomials in `w` (resp. `v`), and the
/// remaining integer powers of `u` turn into high, nearly smooth powers. Each half uses
/// `per_half` Gauss nodes, so every node satisfies `0 < s < t`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraRule {
    pub alpha: f64,
    pub t: f64,
    pub nodes: Vec<VolterraNode>,
}

impl VolterraRule {
    pub fn new(alpha: f64, t: f64, per_half: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0,1], got {alpha}")));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("Volterra rule needs t > 0, got {t}")));
        }
        if per_half == 0 {
            return Err(Error::Domain("Volterra rule needs at least one node per half".into()));
        }
        let h = 0.5 * t;
        let m = grading(alpha);
        let q = m / alpha;
        let b = q - 1.0;
        let lower = gauss_jacobi(per_half, 0.0, b)?;
        let upper = gauss_legendre(per_half)?;
        let mut nodes = Vec::with_capacity(2 * per_half);

        let lower_scale = q * h * 0.5f64.powf(b + 1.0);
        for (&x, &w) in lower.nodes.iter().zip(&lower.weights) {
            let v = 0.5 * (x + 1.0);
            let s = h * v.powf(q);
            nodes.push(VolterraNode {
                s,
                lag: t - s,
                weight: lower_scale * w,
            });
        }
        let h_alpha = h.powf(alpha);
        for (&x, &w) in upper.nodes.iter().zip(&upper.weights) {
            let wv = 0.5 * (1.0 - x);
            let u = h * wv.powf(q);
            nodes.push(VolterraNode {
                s: t - u,
                lag: u,
                weight: h_alpha * q * wv.powf(m - 1.0) * 0.5 * w * u.powf(1.0 - alpha),
            });
        }
        nodes.sort_by(|p, q| p.s.total_cmp(&q.s));
        Ok(Self { alpha, t, nodes })
    }

    /// Σ_j W_j (t−s_j)^{α−1} g(t−s_j) f(s_j)
    pub fn apply<G, F>(&self, mut g: G, mut f: F) -> f64
    where
        G: FnMut(f64) -> f64,
        F: FnMut(f64) -> f64,
    {
        self.nodes
            .iter()
            .map(|nd| nd.weight * nd.lag.powf(self.alpha - 1.0) * g(nd.lag) * f(nd.s))
            .sum()
    }
}
