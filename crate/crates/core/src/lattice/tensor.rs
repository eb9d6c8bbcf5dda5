use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Storage guard: largest number of stored entries of one tensor.
pub const MAX_TENSOR_ENTRIES: usize = 1 << 25;

/// How a tensor k(x_1, …, x_n) is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    /// All of grid^n.
    Full,
    /// k(x_1, …, x_n) = g(x_2 − x_1, …, x_n − x_1); stores g on grid^{n−1}.
    /// Exact for data invariant under joint translation, which the
    /// hierarchy preserves.
    TranslationInvariant,
}

/// A real field over grid^n at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTensor {
    order: usize,
    grid: TorusGrid,
    layout: Layout,
    values: Vec<f64>,
    time: f64,
}

fn stored_sites(order: usize, layout: Layout) -> usize {
    match layout {
        Layout::Full => order,
        Layout::TranslationInvariant => order - 1,
    }
}

pub(crate) fn storage_len(grid: &TorusGrid, order: usize, layout: Layout) -> Result<usize> {
    if order == 0 {
        return Err(Error::Shape("tensor order must be at least 1".into()));
    }
    let m = stored_sites(order, layout) as u32;
    grid.sites()
        .checked_pow(m)
        .filter(|&n| n <= MAX_TENSOR_ENTRIES)
        .ok_or_else(|| {
            Error::Shape(format!(
                "order-{order} tensor on {} sites exceeds the storage guard of {MAX_TENSOR_ENTRIES} entries",
                grid.sites()
            ))
        })
}

impl CorrelationTensor {
    pub fn constant(order: usize, grid: TorusGrid, value: f64, layout: Layout) -> Result<Self> {
        let len = storage_len(&grid, order, layout)?;
        Ok(Self {
            order,
            grid,
            layout,
            values: vec![value; len],
            time: 0.0,
        })
    }

    pub fn zeros(order: usize, grid: TorusGrid, layout: Layout) -> Result<Self> {
        Self::constant(order, grid, 0.0, layout)
    }

    /// Builds a tensor from a function of the full site tuple (x_1, …, x_n);
    /// for the reduced layout it is sampled at x_1 = 0.
    pub fn from_fn<F>(order: usize, grid: TorusGrid, layout: Layout, f: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> f64,
    {
        let mut t = Self::zeros(order, grid, layout)?;
        let mut sites = vec![0usize; order];
        for i in 0..t.values.len() {
            t.site_tuple(i, &mut sites);
            t.values[i] = f(&sites);
        }
        Ok(t)
    }

    pub fn from_values(order: usize, grid: TorusGrid, layout: Layout, values: Vec<f64>) -> Result<Self> {
        let len = storage_len(&grid, order, layout)?;
        if values.len() != len {
            return Err(Error::Shape(format!(
                "order-{order} tensor needs {len} values, got {}",
                values.len()
            )));
        }
        Ok(Self {
            order,
            grid,
            layout,
            values,
            time: 0.0,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of grid sites indexed by the storage.
    pub fn stored_sites(&self) -> usize {
        stored_sites(self.order, self.layout)
    }

    /// Full site tuple represented by a storage index (x_1 = 0 when reduced).
    pub fn site_tuple(&self, index: usize, out: &mut [usize]) {
        let s = self.grid.sites();
        let m = self.stored_sites();
        let offset = self.order - m;
        let mut rem = index;
        for j in (0..m).rev() {
            out[offset + j] = rem % s;
            rem /= s;
        }
        if offset == 1 {
            out[0] = 0;
        }
    }

    fn storage_index(&self, sites: &[usize]) -> usize {
        let s = self.grid.sites();
        match self.layout {
            Layout::Full => sites.iter().fold(0, |acc, &x| acc * s + x),
            Layout::TranslationInvariant => sites[1..]
                .iter()
                .fold(0, |acc, &x| acc * s + self.grid.sub(x, sites[0])),
        }
    }

    /// k(x_1, …, x_n) for flat site indices.
    #[inline]
    pub fn value_at(&self, sites: &[usize]) -> f64 {
        debug_assert_eq!(sites.len(), self.order);
        self.values[self.storage_index(sites)]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Expands to the full layout.
    pub fn to_full(&self) -> Result<Self> {
        if self.layout == Layout::Full {
            return Ok(self.clone());
        }
        let mut full = Self::from_fn(self.order, self.grid, Layout::Full, |x| self.value_at(x))?;
        full.time = self.time;
        Ok(full)
    }

    /// max |k(x) − k(σx)| / max |k| over transpositions σ of neighbouring blocks.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.max_abs();
        if self.order < 2 || scale == 0.0 {
            return 0.0;
        }
        let mut sites = vec![0usize; self.order];
        let mut worst = 0.0f64;
        for i in 0..self.values.len() {
            self.site_tuple(i, &mut sites);
            let v = self.values[i];
            for p in 0..self.order - 1 {
                sites.swap(p, p + 1);
                worst = worst.max((v - self.value_at(&sites)).abs());
                sites.swap(p, p + 1);
            }
        }
        worst / scale
    }

    pub(crate) fn same_shape(&self, other: &Self) -> Result<()> {
        if self.order != other.order || self.layout != other.layout || self.grid != other.grid {
            return Err(Error::Shape(format!(
                "tensors differ in order/layout/grid: ({}, {:?}) vs ({}, {:?})",
                self.order, self.layout, other.order, other.layout
            )));
        }
        Ok(())
    }
}
