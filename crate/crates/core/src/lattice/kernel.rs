use num_complex::Complex64;

use super::fft::NdFft;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelShape {
    Gaussian,
    Tophat,
    ExponentialDecay,
}

impl KernelShape {
    pub fn name(&self) -> &'static str {
        match self {
            KernelShape::Gaussian => "gaussian",
            KernelShape::Tophat => "tophat",
            KernelShape::ExponentialDecay => "exponential-decay",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "gaussian" => Some(KernelShape::Gaussian),
            "tophat" => Some(KernelShape::Tophat),
            "exponential-decay" | "exponential" => Some(KernelShape::ExponentialDecay),
            _ => None,
        }
    }

    fn profile(&self, r: f64, width: f64) -> f64 {
        match self {
            KernelShape::Gaussian => (-0.5 * (r / width).powi(2)).exp(),
            KernelShape::Tophat => {
                let edge = (r - width).abs() <= 1e-12 * width;
                if edge {
                    0.5
                } else if r < width {
                    1.0
                } else {
                    0.0
                }
            }
            KernelShape::ExponentialDecay => (-r / width).exp(),
        }
    }
}

/// Even, nonnegative dispersal kernel sampled on a torus and renormalised so
/// that Σ a · cell volume equals `mass`.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersalKernel {
    shape: KernelShape,
    width: f64,
    mass: f64,
    grid: TorusGrid,
    samples: Vec<f64>,
    sup_norm_a: f64,
}

impl DispersalKernel {
    pub fn sample(shape: KernelShape, width: f64, mass: f64, grid: TorusGrid) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::Domain(format!("kernel width must be positive, got {width}")));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Domain(format!("kernel mass must be positive, got {mass}")));
        }
        let raw: Vec<f64> = (0..grid.sites())
            .map(|s| shape.profile(grid.radius_sq(s).sqrt(), width))
            .collect();
        let total: f64 = raw.iter().sum::<f64>() * grid.cell_volume();
        if !(total > 0.0) {
            return Err(Error::Domain(format!(
                "{} kernel of width {width} has no support on a grid with spacing {}",
                shape.name(),
                grid.spacing()
            )));
        }
        let scale = mass / total;
        let samples: Vec<f64> = raw.iter().map(|v| v * scale).collect();
        let peak = samples.iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            shape,
            width,
            mass,
            grid,
            samples,
            sup_norm_a: peak.max(1.0),
        })
    }

    pub fn shape(&self) -> KernelShape {
        self.shape
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// A = max(1, max sample).
    pub fn sup_norm_a(&self) -> f64 {
        self.sup_norm_a
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// a(x − y) for flat site indices.
    #[inline]
    pub fn between(&self, x: usize, y: usize) -> f64 {
        self.samples[self.grid.sub(x, y)]
    }
}

/// â(ξ) = cell volume · Σ_x a(x) e^{−iξ·x} over the grid frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpectrum {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl KernelSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn at(&self, mode: usize) -> f64 {
        self.values[mode]
    }

    pub fn zero(&self) -> f64 {
        self.values[0]
    }
}

pub fn kernel_fourier(kernel: &DispersalKernel) -> KernelSpectrum {
    let grid = *kernel.grid();
    let mut buf: Vec<Complex64> = kernel.samples().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    NdFft::new(grid.points(), grid.dimension()).forward(&mut buf);
    let vol = grid.cell_volume();
    let raw: Vec<f64> = buf.iter().map(|c| c.re * vol).collect();
    // exact evenness in every axis, so equal frequency classes share one value
    let mut values: Vec<f64> = (0..grid.sites())
        .map(|m| {
            let p = grid.points();
            let flip = |i: usize| (p - i) % p;
            // average from the canonical representative so all sign images agree bitwise
            let a = grid.axes_of(m).map(|i| i.min(flip(i)));
            let mut acc = 0.0;
            let mut count = 0.0;
            let flips: &[(bool, bool)] = if grid.dimension() == 1 {
                &[(false, false), (true, false)]
            } else {
                &[(false, false), (true, false), (false, true), (true, true)]
            };
            for &(f0, f1) in flips {
                let b = [
                    if f0 { flip(a[0]) } else { a[0] },
                    if f1 { flip(a[1]) } else { a[1] },
                ];
                acc += raw[grid.site_of(b)];
                count += 1.0;
            }
            acc / count
        })
        .collect();
    values[0] = kernel.mass();
    KernelSpectrum { grid, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_and_sup_norm() {
        let g = TorusGrid::new(1, 32.0, 256).unwrap();
        for shape in [KernelShape::Gaussian, KernelShape::Tophat, KernelShape::ExponentialDecay] {
            let k = DispersalKernel::sample(shape, 1.0, 2.5, g).unwrap();
            let total: f64 = k.samples().iter().sum::<f64>() * g.cell_volume();
            assert!((total - 2.5).abs() < 1e-10);
            assert!(k.sup_norm_a() >= 1.0);
            for x in 1..g.points() {
                assert_eq!(k.samples()[x], k.samples()[g.neg(x)]);
            }
        }
    }

    #[test]
    fn tophat_transform_matches_closed_form() {
        // half weight at the two edge samples makes the discrete transform a
        // trapezoid rule of the indicator: â(ξ) = h(1 + 2Σ_{j<m} cos ξx_j + cos ξw)
        let g = TorusGrid::new(1, 32.0, 256).unwrap();
        let w = 2.0;
        let k = DispersalKernel::sample(KernelShape::Tophat, w, 1.0, g).unwrap();
        let s = kernel_fourier(&k);
        for &m in &[1usize, 3, 7, 20, 64] {
            let xi = g.wavenumber(m);
            let sinc = (xi * w).sin() / (xi * w);
            let h = g.spacing();
            let disc = (xi * h / 2.0).sin() / (xi * h / 2.0);
            // trapezoid version of the indicator transform, normalised to unit mass
            let want = sinc * (xi * h / 2.0).cos() / disc;
            assert!((s.at(m) - want).abs() < 1e-12, "mode {m}: {} vs {want}", s.at(m));
        }
    }

    #[test]
    fn gaussian_transform_positive() {
        let g = TorusGrid::new(2, 20.0, 32).unwrap();
        let k = DispersalKernel::sample(KernelShape::Gaussian, 1.0, 1.0, g).unwrap();
        let s = kernel_fourier(&k);
        assert_eq!(s.zero(), 1.0);
        assert!(s.values().iter().all(|&v| v > 0.0 && v <= 1.0));
    }
}
