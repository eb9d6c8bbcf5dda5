use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// N-dimensional FFT over a row-major cube with `axes` axes of `points` each.
/// The inverse transform carries the 1/N normalisation.
pub(crate) struct NdFft {
    points: usize,
    axes: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl NdFft {
    pub(crate) fn new(points: usize, axes: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            points,
            axes,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.points.pow(self.axes as u32)
    }

    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / self.len() as f64;
        data.par_iter_mut().for_each(|c| *c *= scale);
    }

    fn run(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.len(), "FFT buffer has the wrong length");
        let p = self.points;
        for axis in 0..self.axes {
            // stride of this axis in row-major order
            let stride = p.pow((self.axes - 1 - axis) as u32);
            let block = stride * p;
            data.par_chunks_mut(block).for_each(|chunk| {
                let mut lines = vec![Complex64::default(); block];
                // transpose so each line along `axis` is contiguous
                for k in 0..p {
                    for j in 0..stride {
                        lines[j * p + k] = chunk[k * stride + j];
                    }
                }
                let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
                fft.process_with_scratch(&mut lines, &mut scratch);
                for k in 0..p {
                    for j in 0..stride {
                        chunk[k * stride + j] = lines[j * p + k];
                    }
                }
            });
        }
    }
}
