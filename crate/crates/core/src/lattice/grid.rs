use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic grid with `points` sites per axis on [−L/2, L/2)^d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    dimension: usize,
    length: f64,
    points: usize,
}

impl TorusGrid {
    pub fn new(dimension: usize, length: f64, points: usize) -> Result<Self> {
        if !(1..=2).contains(&dimension) {
            return Err(Error::Domain(format!("grid dimension must be 1 or 2, got {dimension}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Domain(format!("grid length must be positive, got {length}")));
        }
        if points < 2 || !points.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "points per axis must be a positive even number, got {points}"
            )));
        }
        Ok(Self {
            dimension,
            length,
            points,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    /// Number of sites, points^d.
    pub fn sites(&self) -> usize {
        self.points.pow(self.dimension as u32)
    }

    /// Signed integer offset of an axis index: i for i < P/2, i − P otherwise.
    pub fn signed_index(&self, i: usize) -> i64 {
        let p = self.points as i64;
        let i = i as i64;
        if i < p / 2 {
            i
        } else {
            i - p
        }
    }

    /// Minimal-image coordinate of an axis index.
    pub fn coordinate(&self, i: usize) -> f64 {
        self.signed_index(i) as f64 * self.spacing()
    }

    /// Angular wavenumber of an axis frequency index.
    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * PI * self.signed_index(i) as f64 / self.length
    }

    /// Per-axis indices of a flat site index (row-major).
    pub fn axes_of(&self, site: usize) -> [usize; 2] {
        match self.dimension {
            1 => [site, 0],
            _ => [site / self.points, site % self.points],
        }
    }

    pub fn site_of(&self, axes: [usize; 2]) -> usize {
        match self.dimension {
            1 => axes[0],
            _ => axes[0] * self.points + axes[1],
        }
    }

    /// Site index of x − y on the torus.
    pub fn sub(&self, x: usize, y: usize) -> usize {
        let (a, b) = (self.axes_of(x), self.axes_of(y));
        let p = self.points;
        self.site_of([(a[0] + p - b[0]) % p, (a[1] + p - b[1]) % p])
    }

    /// Site index of x + y on the torus.
    pub fn add(&self, x: usize, y: usize) -> usize {
        let (a, b) = (self.axes_of(x), self.axes_of(y));
        let p = self.points;
        self.site_of([(a[0] + b[0]) % p, (a[1] + b[1]) % p])
    }

    /// Site index of −x.
    pub fn neg(&self, x: usize) -> usize {
        self.sub(0, x)
    }

    /// Squared minimal-image distance of a site from the origin.
    pub fn radius_sq(&self, site: usize) -> f64 {
        let a = self.axes_of(site);
        (0..self.dimension).map(|k| self.coordinate(a[k]).powi(2)).sum()
    }

    /// Nearest site to a real point (wrapped onto the torus).
    pub fn snap(&self, point: &[f64]) -> Result<usize> {
        if point.len() != self.dimension {
            return Err(Error::Shape(format!(
                "point has {} coordinates, grid dimension is {}",
                point.len(),
                self.dimension
            )));
        }
        let mut axes = [0usize; 2];
        let p = self.points as i64;
        for (k, &x) in point.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::Domain(format!("probe coordinate must be finite, got {x}")));
            }
            let i = (x / self.spacing()).round() as i64;
            axes[k] = i.rem_euclid(p) as usize;
        }
        Ok(self.site_of(axes))
    }
}
