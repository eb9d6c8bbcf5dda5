#![allow(dead_code)]

use std::path::PathBuf;

pub fn fixture(name: &str) -> Vec<Vec<f64>> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|f| f.trim().parse::<f64>().unwrap()).collect())
        .collect()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

use fraccontact::lattice::DispersalKernel;
use nalgebra::{DMatrix, DVector};

/// Dense one-particle generator κ(a∗ − m) + (κ − 1) by direct convolution.
pub fn dense_l1(kernel: &DispersalKernel, kappa: f64) -> DMatrix<f64> {
    let g = kernel.grid();
    let p = g.sites();
    let h = g.cell_volume();
    DMatrix::from_fn(p, p, |x, z| {
        let conv = kappa * kernel.between(x, z) * h;
        if x == z {
            conv + kappa - 1.0 - kappa * kernel.mass()
        } else {
            conv
        }
    })
}

/// Markov (α = 1) oracle for orders 1 and 2 in the full layout: the linear
/// system d/dt (k², k¹) = (L₂k² + B k¹, L₁k¹) integrated exactly by the
/// matrix exponential of the augmented generator.
pub fn markov_oracle(kernel: &DispersalKernel, kappa: f64, k1: &[f64], k2: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    let p = kernel.grid().sites();
    let l1 = dense_l1(kernel, kappa);
    let n2 = p * p;
    let mut big = DMatrix::<f64>::zeros(n2 + p, n2 + p);
    for x1 in 0..p {
        for x2 in 0..p {
            let row = x1 * p + x2;
            for z in 0..p {
                big[(row, z * p + x2)] += l1[(x1, z)];
                big[(row, x1 * p + z)] += l1[(x2, z)];
            }
            // f(x1, x2) = κ (k¹(x2) a(x1 − x2) + k¹(x1) a(x2 − x1))
            big[(row, n2 + x2)] += kappa * kernel.between(x1, x2);
            big[(row, n2 + x1)] += kappa * kernel.between(x2, x1);
        }
    }
    for x in 0..p {
        for z in 0..p {
            big[(n2 + x, n2 + z)] = l1[(x, z)];
        }
    }
    let mut state = DVector::<f64>::zeros(n2 + p);
    state.rows_mut(0, n2).copy_from_slice(k2);
    state.rows_mut(n2, p).copy_from_slice(k1);
    let out = (big * t).exp() * state;
    (out.rows(n2, p).iter().copied().collect(), out.rows(0, n2).iter().copied().collect())
}

/// Translation-invariant version of `markov_oracle` for the constant datum
/// k¹ ≡ C, k² ≡ C²: the unknowns are k¹ and g(y) = k²(0, y).
pub fn markov_oracle_reduced(kernel: &DispersalKernel, kappa: f64, c: f64, t: f64) -> (f64, Vec<f64>) {
    let g = kernel.grid();
    let p = g.sites();
    let l1 = dense_l1(kernel, kappa);
    let mut big = DMatrix::<f64>::zeros(p + 1, p + 1);
    for y in 0..p {
        for z in 0..p {
            // k²(z, y) = g(y − z), k²(0, z) = g(z)
            big[(y, g.sub(y, z))] += l1[(0, z)];
            big[(y, z)] += l1[(y, z)];
        }
        big[(y, p)] = kappa * (kernel.between(0, y) + kernel.between(y, 0));
    }
    big[(p, p)] = (0..p).map(|z| l1[(0, z)]).sum::<f64>();
    let mut state = DVector::from_element(p + 1, c * c);
    state[p] = c;
    let out = (big * t).exp() * state;
    (out[p], out.rows(0, p).iter().copied().collect())
}
