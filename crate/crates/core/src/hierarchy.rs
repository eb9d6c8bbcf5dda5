//! The fractional correlation hierarchy
//!
//! ```text
//! k_t^(n) = S_α^(n)(t) k_0^(n) + ∫_0^t P_α^(n)(t−s) f_s^(n) ds,
//! f^(n)   = κ Σ_i k^(n−1)(x_1..x̌_i..x_n) Σ_{j≠i} a(x_i − x_j),   f^(1) = 0,
//! ```
//!
//! solved level by level: k^(n) at time t calls for k^(n−1) at the Volterra
//! nodes s_j < t, which are computed recursively.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{
    kernel_fourier, generator_multiplier, CorrelationTensor, DispersalKernel, Layout, SpectralPlan, TorusGrid,
};
use crate::quadrature::VolterraRule;
use crate::specfun::Alpha;

/// Relative change of a reported norm between s_nodes and 2·s_nodes above
/// which the Volterra quadrature is rejected.
pub const REFINEMENT_TOLERANCE: f64 = 1e-3;
/// Values below −POSITIVITY_TOLERANCE · max are reported as a violation.
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalParams {
    pub alpha: Alpha,
    pub kappa: f64,
    pub c: f64,
}

impl FractionalParams {
    pub fn new(alpha: f64, kappa: f64, c: f64) -> Result<Self> {
        let alpha = Alpha::new(alpha)?;
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        if !(c >= 1.0) || !c.is_finite() {
            return Err(Error::Domain(format!("C must be at least 1, got {c}")));
        }
        Ok(Self { alpha, kappa, c })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialDatum {
    /// k_0^(n) ≡ C^n, stored translation-invariantly.
    Constant,
    /// k_0^(n) = C^n (1 + a Π_i Π_axes cos(2π x/L)) / (1 + a), 0 ≤ a ≤ 1;
    /// not translation-invariant, stored in full.
    Modulated { amplitude: f64 },
    /// One tensor per order 1..=N_max, all in the same layout.
    Custom(Vec<CorrelationTensor>),
}

#[derive(Debug, Clone)]
pub struct ChainConfig {
    pub n_max: usize,
    pub times: Vec<f64>,
    /// Total Volterra nodes per integral.
    pub s_nodes: usize,
    pub params: FractionalParams,
    pub kernel: DispersalKernel,
    pub initial: InitialDatum,
    /// Probe sites x_1, x_2, …; order n reads k^(n)(x_1..x_n). Missing entries
    /// default to the origin.
    pub probe: Vec<usize>,
    /// Re-solve with 2·s_nodes and reject if any norm moves by more than
    /// REFINEMENT_TOLERANCE.
    pub refinement_check: bool,
}

impl ChainConfig {
    pub fn new(n_max: usize, times: Vec<f64>, params: FractionalParams, kernel: DispersalKernel) -> Self {
        Self {
            n_max,
            times,
            s_nodes: 32,
            params,
            kernel,
            initial: InitialDatum::Constant,
            probe: Vec::new(),
            refinement_check: true,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.kernel.grid()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.grid().dimension();
        let cap = if d == 1 { 3 } else { 2 };
        if self.n_max == 0 || self.n_max > cap {
            return Err(Error::Domain(format!("N_max must lie in 1..={cap} for d = {d}, got {}", self.n_max)));
        }
        if self.s_nodes < 2 {
            return Err(Error::Domain(format!("s_nodes must be at least 2, got {}", self.s_nodes)));
        }
        let mut prev = 0.0;
        for &t in &self.times {
            if !(t > prev) || !t.is_finite() {
                return Err(Error::Domain(format!(
                    "times must be finite, positive and strictly increasing; {t} follows {prev}"
                )));
            }
            prev = t;
        }
        if self.probe.iter().any(|&p| p >= self.grid().sites()) {
            return Err(Error::Domain("probe site outside the grid".into()));
        }
        if let InitialDatum::Modulated { amplitude } = self.initial {
            if !(0.0..=1.0).contains(&amplitude) {
                return Err(Error::Domain(format!("modulation amplitude must lie in [0, 1], got {amplitude}")));
            }
        }
        Ok(())
    }

    fn probe_sites(&self, n: usize) -> Vec<usize> {
        (0..n).map(|i| self.probe.get(i).copied().unwrap_or(0)).collect()
    }
}

/// k_0^(n) for the default datum: the constant C^n.
pub fn initial_datum(n: usize, c: f64, grid: TorusGrid) -> Result<CorrelationTensor> {
    CorrelationTensor::constant(n, grid, c.powi(n as i32), Layout::TranslationInvariant)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Checks 0 ≤ k_0^(n) ≤ C^n n!.
pub fn check_initial_bound(datum: &CorrelationTensor, c: f64) -> Result<()> {
    let n = datum.order();
    let limit = c.powi(n as i32) * factorial(n);
    let max = datum.max();
    if !(max <= limit) {
        return Err(Error::BoundViolation {
            order: n,
            limit,
            found: max,
        });
    }
    if datum.min() < 0.0 {
        return Err(Error::Invariant {
            check: "nonnegativity",
            detail: format!("initial datum of order {n} has negative entries (min {})", datum.min()),
        });
    }
    Ok(())
}

/// f^(n) = κ Σ_i k^(n−1)(x without x_i) Σ_{j≠i} a(x_i − x_j), in the layout of `k_prev`.
pub fn source_term(n: usize, k_prev: &CorrelationTensor, kernel: &DispersalKernel, kappa: f64) -> Result<CorrelationTensor> {
    if n < 2 || k_prev.order() + 1 != n {
        return Err(Error::OrderMismatch {
            expected: n.saturating_sub(1),
            found: k_prev.order(),
        });
    }
    if k_prev.grid() != kernel.grid() {
        return Err(Error::Shape("source term: tensor and kernel live on different grids".into()));
    }
    let grid = *k_prev.grid();
    let layout = k_prev.layout();
    let shape = CorrelationTensor::zeros(n, grid, layout)?;
    let values: Vec<f64> = (0..shape.len())
        .into_par_iter()
        .map_init(
            || (vec![0usize; n], vec![0usize; n - 1]),
            |(x, rest), idx| {
                shape.site_tuple(idx, x);
                let mut total = 0.0;
                for i in 0..n {
                    let mut w = 0.0;
                    let mut r = 0;
                    for j in 0..n {
                        if j != i {
                            w += kernel.between(x[i], x[j]);
                            rest[r] = x[j];
                            r += 1;
                        }
                    }
                    if w != 0.0 {
                        total += k_prev.value_at(rest) * w;
                    }
                }
                kappa * total
            },
        )
        .collect();
    CorrelationTensor::from_values(n, grid, layout, values)
}

/// One row of the norm table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRow {
    pub n: usize,
    pub t: f64,
    pub max_norm: f64,
    pub probe_value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormTable {
    pub rows: Vec<NormRow>,
}

impl NormTable {
    pub fn for_order(&self, n: usize) -> impl Iterator<Item = &NormRow> {
        self.rows.iter().filter(move |r| r.n == n)
    }
}

#[derive(Debug, Clone)]
pub struct ChainSolution {
    /// k_t^(n) ordered by n, then t.
    pub tensors: Vec<CorrelationTensor>,
    pub norms: NormTable,
}

/// sup over grid^n and the probe value of every solution tensor.
pub fn chain_norms(solution: &ChainSolution) -> NormTable {
    solution.norms.clone()
}

/// Recursive mild-solution evaluator with per-level transform plans.
pub struct ChainSolver {
    params: FractionalParams,
    kernel: DispersalKernel,
    plans: Vec<SpectralPlan>,
    initial: Vec<CorrelationTensor>,
}

impl ChainSolver {
    pub fn new(config: &ChainConfig) -> Result<Self> {
        config.validate()?;
        let grid = *config.grid();
        let n_max = config.n_max;
        let c = config.params.c;
        let initial: Vec<CorrelationTensor> = match &config.initial {
            InitialDatum::Constant => (1..=n_max).map(|n| initial_datum(n, c, grid)).collect::<Result<_>>()?,
            InitialDatum::Modulated { amplitude } => {
                let a = *amplitude;
                let l = grid.length();
                (1..=n_max)
                    .map(|n| {
                        let scale = c.powi(n as i32) / (1.0 + a);
                        CorrelationTensor::from_fn(n, grid, Layout::Full, |x| {
                            let prod: f64 = x
                                .iter()
                                .map(|&s| {
                                    let ax = grid.axes_of(s);
                                    (0..grid.dimension())
                                        .map(|k| (2.0 * std::f64::consts::PI * grid.coordinate(ax[k]) / l).cos())
                                        .product::<f64>()
                                })
                                .product();
                            scale * (1.0 + a * prod)
                        })
                    })
                    .collect::<Result<_>>()?
            }
            InitialDatum::Custom(data) => {
                if data.len() < n_max {
                    return Err(Error::Shape(format!(
                        "custom initial data cover orders 1..={}, need 1..={n_max}",
                        data.len()
                    )));
                }
                let layout = data[0].layout();
                for (i, d) in data.iter().take(n_max).enumerate() {
                    if d.order() != i + 1 {
                        return Err(Error::OrderMismatch {
                            expected: i + 1,
                            found: d.order(),
                        });
                    }
                    if d.layout() != layout || d.grid() != &grid {
                        return Err(Error::Shape("custom initial data must share one layout and the kernel grid".into()));
                    }
                }
                data[..n_max].to_vec()
            }
        };
        for d in &initial {
            check_initial_bound(d, c)?;
        }
        let spectrum = kernel_fourier(&config.kernel);
        let plans = (1..=n_max)
            .map(|n| {
                let m = generator_multiplier(n, config.params.kappa, &spectrum)?;
                SpectralPlan::new(&m, initial[n - 1].layout())
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            params: config.params,
            kernel: config.kernel.clone(),
            plans,
            initial,
        })
    }

    pub fn initial(&self, n: usize) -> &CorrelationTensor {
        &self.initial[n - 1]
    }

    /// k_t^(n) with `per_half` Volterra nodes on each half interval.
    pub fn solve_at(&self, n: usize, t: f64, per_half: usize) -> Result<CorrelationTensor> {
        let homogeneous = self.homogeneous(n, t)?;
        if n == 1 {
            return Ok(homogeneous);
        }
        let duhamel = self.volterra_term(n, t, per_half, &|s| self.solve_at(n - 1, s, per_half))?;
        add(homogeneous, &duhamel)
    }

    /// S_α^(n)(t) k_0^(n).
    pub fn homogeneous(&self, n: usize, t: f64) -> Result<CorrelationTensor> {
        let out = self.plans[n - 1].apply_s_alpha(&self.initial[n - 1], self.params.alpha, t)?;
        Ok(out.with_time(t))
    }

    /// ∫_0^t P_α^(n)(t−s) f^(n)[k_s^(n−1)] ds, where `lower(s)` supplies k_s^(n−1).
    pub fn volterra_term(
        &self,
        n: usize,
        t: f64,
        per_half: usize,
        lower: &dyn Fn(f64) -> Result<CorrelationTensor>,
    ) -> Result<CorrelationTensor> {
        if n < 2 {
            return Err(Error::OrderMismatch { expected: 2, found: n });
        }
        let plan = &self.plans[n - 1];
        let rule = VolterraRule::new(self.params.alpha.get(), t, per_half)?;
        let mut acc = plan.zeros();
        for node in &rule.nodes {
            let k_prev = lower(node.s)?;
            let f = source_term(n, &k_prev, &self.kernel, self.params.kappa)?;
            let spec = plan.forward(&f)?;
            let factors = plan.p_alpha_factors(&spec, self.params.alpha, node.lag)?;
            plan.accumulate(&mut acc, &spec, &factors, node.weight);
        }
        plan.inverse(acc, t)
    }
}

fn add(mut a: CorrelationTensor, b: &CorrelationTensor) -> Result<CorrelationTensor> {
    a.same_shape(b)?;
    for (x, y) in a.values_mut().iter_mut().zip(b.values()) {
        *x += y;
    }
    Ok(a)
}

fn check_result(k: &CorrelationTensor, n: usize, t: f64) -> Result<()> {
    if !k.is_finite() {
        return Err(Error::Overflow(format!("k^({n}) at t = {t} is not finite")));
    }
    let max = k.max();
    let min = k.min();
    if min < -POSITIVITY_TOLERANCE * max.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Invariant {
            check: "nonnegativity",
            detail: format!("k^({n}) at t = {t} reaches {min:e} against max {max:e}"),
        });
    }
    Ok(())
}

fn rel_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Solves the chain, calling `on_row` after each (n, t) in order n = 1..N_max,
/// t ascending; rows already passed to `on_row` survive a later error.
pub fn solve_chain_streaming<F>(config: &ChainConfig, mut on_row: F) -> Result<ChainSolution>
where
    F: FnMut(&NormRow, &CorrelationTensor) -> Result<()>,
{
    let solver = ChainSolver::new(config)?;
    let half = config.s_nodes.div_ceil(2);
    let mut tensors = Vec::new();
    let mut norms = NormTable::default();
    for n in 1..=config.n_max {
        let probe = config.probe_sites(n);
        for &t in &config.times {
            let coarse = solver.solve_at(n, t, half)?;
            check_result(&coarse, n, t)?;
            let k = if n > 1 && config.refinement_check {
                let fine = solver.solve_at(n, t, 2 * half)?;
                check_result(&fine, n, t)?;
                let d_max = rel_change(coarse.max(), fine.max());
                let d_probe = rel_change(coarse.value_at(&probe), fine.value_at(&probe));
                if d_max > REFINEMENT_TOLERANCE || d_probe > REFINEMENT_TOLERANCE {
                    return Err(Error::Quadrature(format!(
                        "k^({n}) at t = {t}: doubling s_nodes from {} moves the max norm by {d_max:.2e} and the probe by {d_probe:.2e} (tolerance {REFINEMENT_TOLERANCE:e})",
                        2 * half
                    )));
                }
                fine
            } else {
                coarse
            };
            let row = NormRow {
                n,
                t,
                max_norm: k.max(),
                probe_value: k.value_at(&probe),
            };
            on_row(&row, &k)?;
            norms.rows.push(row);
            tensors.push(k);
        }
    }
    Ok(ChainSolution { tensors, norms })
}

pub fn solve_chain(config: &ChainConfig) -> Result<ChainSolution> {
    solve_chain_streaming(config, |_, _| Ok(()))
}
