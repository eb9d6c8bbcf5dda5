//! Periodic discretisation of ℝ^d, the dispersal kernel and the diagonal
//! (Fourier multiplier) action of the tensor semigroups on grid^n fields.

mod fft;
mod grid;
mod kernel;
mod spectral;
mod tensor;

pub use grid::TorusGrid;
pub use kernel::{kernel_fourier, DispersalKernel, KernelShape, KernelSpectrum};
pub use spectral::{
    apply_generator, apply_p_alpha, apply_s_alpha, generator_multiplier, MultiplierField,
    SpectralPlan, Spectrum, SPECTRAL_FLOOR,
};
pub use tensor::{CorrelationTensor, Layout, MAX_TENSOR_ENTRIES};
