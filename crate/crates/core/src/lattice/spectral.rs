use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::NdFft;
use super::grid::TorusGrid;
use super::kernel::KernelSpectrum;
use super::tensor::{storage_len, CorrelationTensor, Layout};
use crate::error::{Error, Result};
use crate::specfun::{mittag_leffler, mittag_leffler_two, Alpha};

/// Largest order handled by the frequency-class packing.
const MAX_ORDER: usize = 4;

/// Fourier coefficients with |c| ≤ SPECTRAL_FLOOR · max|c| sit at FFT
/// roundoff level; their multiplier factors are not evaluated and the modes
/// are dropped. Every factor is bounded by its zero-mode value, so the dropped
/// part is below 1e-15 · (number of modes) relative to the field mean.
pub const SPECTRAL_FLOOR: f64 = 1e-15;

/// Symbol of the order-n generator,
/// λ(ξ_1, …, ξ_n) = n(κ−1) + κ Σ_i (â(ξ_i) − â(0)),
/// evaluated lazily from the per-site kernel spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierField {
    order: usize,
    kappa: f64,
    spectrum: Arc<KernelSpectrum>,
}

pub fn generator_multiplier(order: usize, kappa: f64, ahat: &KernelSpectrum) -> Result<MultiplierField> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Domain(format!("multiplier order must lie in 1..={MAX_ORDER}, got {order}")));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    Ok(MultiplierField {
        order,
        kappa,
        spectrum: Arc::new(ahat.clone()),
    })
}

impl MultiplierField {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn grid(&self) -> &TorusGrid {
        self.spectrum.grid()
    }

    pub fn spectrum(&self) -> &KernelSpectrum {
        &self.spectrum
    }

    /// n(κ−1), the value at the zero mode and the maximum over all modes.
    pub fn zero_mode(&self) -> f64 {
        self.order as f64 * (self.kappa - 1.0)
    }

    fn class_code(&self, mode: usize) -> u64 {
        let g = self.grid();
        let p = g.points();
        let a = g.axes_of(mode).map(|i| i.min(p - i) as u64);
        a[0] * (p as u64 / 2 + 1) + a[1]
    }

    fn code_mode(&self, code: u64) -> usize {
        let g = self.grid();
        let w = g.points() as u64 / 2 + 1;
        g.site_of([(code / w) as usize, (code % w) as usize])
    }

    /// λ from sorted class codes; summation order is fixed, so every mode of a
    /// class gets a bit-identical value.
    fn lambda_of_codes(&self, codes: &[u64]) -> f64 {
        let zero = self.spectrum.zero();
        let sum: f64 = codes
            .iter()
            .map(|&c| self.spectrum.at(self.code_mode(c)) - zero)
            .sum();
        self.zero_mode() + self.kappa * sum
    }

    /// λ at a frequency tuple (flat per-site frequency indices).
    pub fn lambda(&self, modes: &[usize]) -> Result<f64> {
        if modes.len() != self.order {
            return Err(Error::OrderMismatch {
                expected: self.order,
                found: modes.len(),
            });
        }
        let mut codes: Vec<u64> = modes.iter().map(|&m| self.class_code(m)).collect();
        codes.sort_unstable();
        Ok(self.lambda_of_codes(&codes))
    }
}

/// Fourier coefficients of a tensor in its storage layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    data: Vec<Complex64>,
}

impl Spectrum {
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }
}

/// Transform plan for one (order, layout, grid) with the multiplier grouped
/// into classes of modes that share the same λ.
pub struct SpectralPlan {
    multiplier: MultiplierField,
    layout: Layout,
    fft: NdFft,
    mode_class: Vec<u32>,
    class_lambda: Vec<f64>,
}

impl SpectralPlan {
    pub fn new(multiplier: &MultiplierField, layout: Layout) -> Result<Self> {
        let grid = *multiplier.grid();
        let order = multiplier.order();
        let len = storage_len(&grid, order, layout)?;
        let m = match layout {
            Layout::Full => order,
            Layout::TranslationInvariant => order - 1,
        };
        let s = grid.sites();
        let mut mode_class = Vec::with_capacity(len);
        let mut class_lambda = Vec::new();
        let mut index: HashMap<u64, u32> = HashMap::new();
        let mut by_lambda: HashMap<u64, u32> = HashMap::new();
        let mut modes = vec![0usize; order];
        let mut codes = vec![0u64; order];
        for i in 0..len {
            let mut rem = i;
            let offset = order - m;
            for j in (0..m).rev() {
                modes[offset + j] = rem % s;
                rem /= s;
            }
            if offset == 1 {
                // reduced storage η ↔ full frequency (−Ση, η_2, …, η_n)
                let total = modes[1..].iter().fold(0, |acc, &x| grid.add(acc, x));
                modes[0] = grid.neg(total);
            }
            for (c, &md) in codes.iter_mut().zip(&modes) {
                *c = multiplier.class_code(md);
            }
            codes.sort_unstable();
            let key = codes.iter().fold(0u64, |acc, &c| (acc << 16) | c);
            let id = *index.entry(key).or_insert_with(|| {
                // distinct multisets can share λ bit for bit (e.g. where â has decayed to 0)
                let l = multiplier.lambda_of_codes(&codes);
                *by_lambda.entry(l.to_bits()).or_insert_with(|| {
                    class_lambda.push(l);
                    (class_lambda.len() - 1) as u32
                })
            });
            mode_class.push(id);
        }
        Ok(Self {
            multiplier: multiplier.clone(),
            layout,
            fft: NdFft::new(grid.points(), grid.dimension() * m),
            mode_class,
            class_lambda,
        })
    }

    pub fn multiplier(&self) -> &MultiplierField {
        &self.multiplier
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Distinct λ values, one per class.
    pub fn class_lambdas(&self) -> &[f64] {
        &self.class_lambda
    }

    /// λ for every stored mode.
    pub fn mode_lambdas(&self) -> Vec<f64> {
        self.mode_class.iter().map(|&c| self.class_lambda[c as usize]).collect()
    }

    fn check(&self, field: &CorrelationTensor) -> Result<()> {
        if field.order() != self.multiplier.order() {
            return Err(Error::OrderMismatch {
                expected: self.multiplier.order(),
                found: field.order(),
            });
        }
        if field.layout() != self.layout || field.grid() != self.multiplier.grid() {
            return Err(Error::Shape(format!(
                "field ({:?} layout) does not match the plan ({:?} layout) or its grid",
                field.layout(),
                self.layout
            )));
        }
        Ok(())
    }

    pub fn forward(&self, field: &CorrelationTensor) -> Result<Spectrum> {
        self.check(field)?;
        let mut data: Vec<Complex64> = field.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut data);
        Ok(Spectrum { data })
    }

    pub fn zeros(&self) -> Spectrum {
        Spectrum {
            data: vec![Complex64::default(); self.mode_class.len()],
        }
    }

    pub fn inverse(&self, spectrum: Spectrum, time: f64) -> Result<CorrelationTensor> {
        let mut data = spectrum.data;
        self.fft.inverse(&mut data);
        let values = data.into_iter().map(|c| c.re).collect();
        let grid = *self.multiplier.grid();
        Ok(CorrelationTensor::from_values(self.multiplier.order(), grid, self.layout, values)?.with_time(time))
    }

    /// Evaluates `f(λ)` once per class, in parallel.
    pub fn class_factors<F>(&self, f: F) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        self.class_lambda.par_iter().map(|&l| f(l)).collect()
    }

    /// Like [`class_factors`](Self::class_factors), restricted to classes that
    /// carry a coefficient of `spectrum` above the roundoff floor; the others
    /// get factor 0.
    pub fn active_factors<F>(&self, spectrum: &Spectrum, f: F) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let peak = spectrum.data.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let cut = SPECTRAL_FLOOR * peak;
        let mut active = vec![false; self.class_lambda.len()];
        for (c, &k) in spectrum.data.iter().zip(&self.mode_class) {
            if c.norm() > cut {
                active[k as usize] = true;
            }
        }
        let ids: Vec<usize> = (0..active.len()).filter(|&k| active[k]).collect();
        let vals = ids
            .par_iter()
            .map(|&k| f(self.class_lambda[k]))
            .collect::<Result<Vec<f64>>>()?;
        let mut out = vec![0.0; self.class_lambda.len()];
        for (k, v) in ids.into_iter().zip(vals) {
            out[k] = v;
        }
        Ok(out)
    }

    /// E_α(λt^α) per active class of `spectrum`.
    pub fn s_alpha_factors(&self, spectrum: &Spectrum, alpha: Alpha, t: f64) -> Result<Vec<f64>> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("S_alpha needs t >= 0, got {t}")));
        }
        let ta = t.powf(alpha.get());
        self.active_factors(spectrum, |l| {
            if t == 0.0 {
                return Ok(1.0);
            }
            mittag_leffler(alpha, l * ta).map_err(|e| mode_error(e, l, t))
        })
    }

    /// u^{α−1} E_{α,α}(λu^α) per active class of `spectrum`.
    pub fn p_alpha_factors(&self, spectrum: &Spectrum, alpha: Alpha, u: f64) -> Result<Vec<f64>> {
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::Domain(format!("P_alpha needs u > 0, got {u}")));
        }
        let a = alpha.get();
        let ua = u.powf(a);
        let pre = u.powf(a - 1.0);
        self.active_factors(spectrum, |l| {
            Ok(pre * mittag_leffler_two(alpha, a, l * ua).map_err(|e| mode_error(e, l, u))?)
        })
    }

    /// acc += weight · factor(mode) · src(mode)
    pub fn accumulate(&self, acc: &mut Spectrum, src: &Spectrum, factors: &[f64], weight: f64) {
        acc.data
            .par_iter_mut()
            .zip(src.data.par_iter())
            .zip(self.mode_class.par_iter())
            .for_each(|((a, s), &c)| *a += s * (weight * factors[c as usize]));
    }

    pub fn scaled(&self, src: &Spectrum, factors: &[f64]) -> Spectrum {
        let mut out = self.zeros();
        self.accumulate(&mut out, src, factors, 1.0);
        out
    }

    pub fn apply_s_alpha(&self, field: &CorrelationTensor, alpha: Alpha, t: f64) -> Result<CorrelationTensor> {
        self.check(field)?;
        if t == 0.0 {
            return Ok(field.clone());
        }
        let spec = self.forward(field)?;
        let f = self.s_alpha_factors(&spec, alpha, t)?;
        self.inverse(self.scaled(&spec, &f), field.time() + t)
    }

    pub fn apply_p_alpha(&self, field: &CorrelationTensor, alpha: Alpha, u: f64) -> Result<CorrelationTensor> {
        let spec = self.forward(field)?;
        let f = self.p_alpha_factors(&spec, alpha, u)?;
        self.inverse(self.scaled(&spec, &f), field.time() + u)
    }

    pub fn apply_generator(&self, field: &CorrelationTensor) -> Result<CorrelationTensor> {
        let spec = self.forward(field)?;
        let f = self.class_factors(Ok)?;
        self.inverse(self.scaled(&spec, &f), field.time())
    }
}

fn mode_error(e: Error, lambda: f64, t: f64) -> Error {
    match e {
        Error::Overflow(msg) => Error::Overflow(format!("mode with rate {lambda} at t = {t}: {msg}")),
        Error::Convergence(msg) => Error::Convergence(format!("mode with rate {lambda} at t = {t}: {msg}")),
        other => other,
    }
}

/// S_α(t) k: every mode multiplied by E_α(λt^α).
pub fn apply_s_alpha(
    field: &CorrelationTensor,
    multiplier: &MultiplierField,
    alpha: Alpha,
    t: f64,
) -> Result<CorrelationTensor> {
    SpectralPlan::new(multiplier, field.layout())?.apply_s_alpha(field, alpha, t)
}

/// P_α(u) k: every mode multiplied by u^{α−1}E_{α,α}(λu^α).
pub fn apply_p_alpha(
    field: &CorrelationTensor,
    multiplier: &MultiplierField,
    alpha: Alpha,
    u: f64,
) -> Result<CorrelationTensor> {
    SpectralPlan::new(multiplier, field.layout())?.apply_p_alpha(field, alpha, u)
}

/// L̂*_n k through its symbol.
pub fn apply_generator(field: &CorrelationTensor, multiplier: &MultiplierField) -> Result<CorrelationTensor> {
    SpectralPlan::new(multiplier, field.layout())?.apply_generator(field)
}
