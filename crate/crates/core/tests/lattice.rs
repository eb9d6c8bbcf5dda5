use fraccontact::lattice::{
    apply_generator, apply_s_alpha, generator_multiplier, kernel_fourier, CorrelationTensor,
    DispersalKernel, KernelShape, Layout, MultiplierField, SpectralPlan, TorusGrid,
};
use fraccontact::specfun::Alpha;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn setup(grid: TorusGrid, shape: KernelShape, n: usize, kappa: f64, mass: f64) -> (DispersalKernel, MultiplierField) {
    let k = DispersalKernel::sample(shape, 1.0, mass, grid).unwrap();
    let m = generator_multiplier(n, kappa, &kernel_fourier(&k)).unwrap();
    (k, m)
}

/// L̂*_n assembled entrywise on grid^n:
/// (Lk)(x) = n(κ−1)k(x) + κ Σ_i Σ_y vol·a(x_i − y)[k(x|x_i→y) − k(x)].
fn dense_generator(k: &DispersalKernel, n: usize, kappa: f64) -> DMatrix<f64> {
    let g = *k.grid();
    let s = g.sites();
    let len = s.pow(n as u32);
    let vol = g.cell_volume();
    let mut m = DMatrix::zeros(len, len);
    let digits = |mut idx: usize| {
        let mut d = vec![0usize; n];
        for j in (0..n).rev() {
            d[j] = idx % s;
            idx /= s;
        }
        d
    };
    let index = |d: &[usize]| d.iter().fold(0, |acc, &x| acc * s + x);
    for row in 0..len {
        let x = digits(row);
        m[(row, row)] += n as f64 * (kappa - 1.0);
        for i in 0..n {
            for y in 0..s {
                let w = kappa * vol * k.between(x[i], y);
                let mut z = x.clone();
                z[i] = y;
                m[(row, index(&z))] += w;
                m[(row, row)] -= w;
            }
        }
    }
    m
}

fn field_vec(t: &CorrelationTensor) -> DVector<f64> {
    DVector::from_column_slice(t.values())
}

#[test]
fn generator_matches_dense_operator() {
    let cases = [
        (TorusGrid::new(1, 8.0, 8).unwrap(), 1usize),
        (TorusGrid::new(1, 8.0, 8).unwrap(), 2),
        (TorusGrid::new(2, 6.0, 4).unwrap(), 2),
    ];
    for (g, n) in cases {
        for shape in [KernelShape::Gaussian, KernelShape::Tophat, KernelShape::ExponentialDecay] {
            let (k, m) = setup(g, shape, n, 1.7, 1.3);
            let dense = dense_generator(&k, n, 1.7);
            let f = CorrelationTensor::from_fn(n, g, Layout::Full, |x| {
                x.iter().enumerate().map(|(i, &v)| ((v + 1) as f64 * (i as f64 + 0.3)).sin()).sum::<f64>() + 2.0
            })
            .unwrap();
            let want = &dense * field_vec(&f);
            let got = apply_generator(&f, &m).unwrap();
            let err = (field_vec(&got) - &want).amax() / want.amax();
            assert!(err < 1e-10, "{shape:?} n={n} d={}: {err}", g.dimension());
        }
    }
}

#[test]
fn markov_semigroup_matches_matrix_exponential() {
    let g = TorusGrid::new(1, 8.0, 8).unwrap();
    for n in 1..=2 {
        let (k, m) = setup(g, KernelShape::Gaussian, n, 0.8, 1.0);
        let t = 1.3;
        let dense = (dense_generator(&k, n, 0.8) * t).exp();
        let f = CorrelationTensor::from_fn(n, g, Layout::Full, |x| {
            1.0 + x.iter().map(|&v| (v as f64 * 0.9).cos()).product::<f64>()
        })
        .unwrap();
        let want = &dense * field_vec(&f);
        let got = apply_s_alpha(&f, &m, Alpha::ONE, t).unwrap();
        let err = (field_vec(&got) - &want).amax() / want.amax();
        assert!(err < 1e-8, "n={n}: {err}");
    }
}

#[test]
fn maximum_of_the_symbol_is_the_zero_mode() {
    let g = TorusGrid::new(1, 8.0, 8).unwrap();
    let (k, m) = setup(g, KernelShape::Gaussian, 3, 2.0, 1.0);
    let plan = SpectralPlan::new(&m, Layout::Full).unwrap();
    let max = plan.class_lambdas().iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(max, 3.0);
    let dense = dense_generator(&k, 3, 2.0);
    let sym = (&dense + dense.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let top = eig.eigenvalues.max();
    assert!((top - 3.0).abs() < 1e-10, "{top}");
    // every eigenvalue of the dense operator is some λ(ξ)
    for ev in eig.eigenvalues.iter() {
        assert!(plan.class_lambdas().iter().any(|l| (l - ev).abs() < 1e-9));
    }
}

#[test]
fn critical_symbol_nonpositive() {
    let g = TorusGrid::new(1, 32.0, 64).unwrap();
    let (_, m) = setup(g, KernelShape::Tophat, 2, 1.0, 1.0);
    let plan = SpectralPlan::new(&m, Layout::Full).unwrap();
    assert!(plan.class_lambdas().iter().all(|&l| l <= 0.0));
}

#[test]
fn kernel_spectrum_bounded_by_mass() {
    let g = TorusGrid::new(1, 32.0, 256).unwrap();
    for shape in [KernelShape::Gaussian, KernelShape::Tophat, KernelShape::ExponentialDecay] {
        let k = DispersalKernel::sample(shape, 1.0, 0.7, g).unwrap();
        let s = kernel_fourier(&k);
        assert_eq!(s.zero(), 0.7);
        assert!(s.values().iter().all(|v| v.abs() <= 0.7));
    }
}

fn random_field(values: Vec<f64>) -> CorrelationTensor {
    let g = TorusGrid::new(1, 16.0, 16).unwrap();
    CorrelationTensor::from_values(2, g, Layout::Full, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn positivity_preserved(values in prop::collection::vec(0.0f64..1.0, 256), a in 0.2f64..1.0, t in 0.0f64..5.0, kappa in 0.2f64..2.0) {
        let f = random_field(values);
        let (_, m) = setup(*f.grid(), KernelShape::Gaussian, 2, kappa, 1.0);
        let out = apply_s_alpha(&f, &m, Alpha::new(a).unwrap(), t).unwrap();
        prop_assert!(out.min() >= -1e-9 * f.max());
    }

    #[test]
    fn fluctuations_contract(values in prop::collection::vec(0.0f64..1.0, 256), a in 0.2f64..1.0, t in 0.0f64..5.0, kappa in 0.2f64..1.0) {
        let f = random_field(values);
        let (_, m) = setup(*f.grid(), KernelShape::Tophat, 2, kappa, 1.0);
        let out = apply_s_alpha(&f, &m, Alpha::new(a).unwrap(), t).unwrap();
        let fluct = |t: &CorrelationTensor| {
            let mean = t.values().iter().sum::<f64>() / t.len() as f64;
            t.values().iter().fold(0.0f64, |acc, v| acc.max((v - mean).abs()))
        };
        prop_assert!(fluct(&out) <= fluct(&f) * (1.0 + 1e-12));
    }

    #[test]
    fn transform_round_trip(values in prop::collection::vec(-1.0f64..1.0, 256)) {
        let f = random_field(values);
        let (_, m) = setup(*f.grid(), KernelShape::Gaussian, 2, 1.0, 1.0);
        let plan = SpectralPlan::new(&m, Layout::Full).unwrap();
        let back = plan.inverse(plan.forward(&f).unwrap(), 0.0).unwrap();
        for (x, y) in back.values().iter().zip(f.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * f.max_abs().max(1e-300));
        }
    }
}
