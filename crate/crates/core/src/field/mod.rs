//! Periodic grids, sampled fields, norms and the fractional heat semigroup.
//!
//! The box is `[−L, L)^d` with `n` points per axis, `x_i = −L + i·h`,
//! `h = 2L/n`, so the origin is the grid point with index `n/2` on every axis.
//! Values are stored row-major with axis 0 slowest.

mod datum;
mod spectral;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use datum::{power_tail_crossover, sample, singular_profile, DatumWarning, InitialDatum, InitialDatumSpec, Sampled};
pub use spectral::{heat_propagate, Fft1d, FftBackend, HeatSemigroup, Spectral};

/// Uniform periodic grid on `[−L, L)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    d: u32,
    n: usize,
    half_length: f64,
}

impl Grid {
    pub fn new(d: u32, n: usize, half_length: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(domain!("grid dimension must be 1, 2 or 3, got {d}"));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(domain!("points per axis must be a power of two >= 16, got {n}"));
        }
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(domain!("half length must be positive and finite, got {half_length}"));
        }
        Ok(Self { d, n, half_length })
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        libm::pow(self.spacing(), f64::from(self.d))
    }

    /// Total number of points `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of index `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_length + i as f64 * self.spacing()
    }

    /// Per-axis indices of a flat index.
    pub fn unflatten(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for axis in (0..self.d as usize).rev() {
            idx[axis] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().take(self.d as usize).fold(0, |acc, &i| acc * self.n + i)
    }

    /// Flat index of the origin.
    pub fn origin(&self) -> usize {
        self.flatten(&[self.n / 2; 3])
    }

    /// Physical point of a flat index (unused axes are zero).
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.d as usize {
            x[axis] = self.coord(idx[axis]);
        }
        x
    }

    /// `|x|` at a flat index.
    pub fn radius(&self, flat: usize) -> f64 {
        let x = self.point(flat);
        libm::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])
    }

    /// `|x|` for every grid point.
    pub fn radii(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.radius(i)).collect()
    }

    /// `max(|x|, h/2)` for every grid point.
    pub fn capped_radii(&self) -> Vec<f64> {
        let cap = 0.5 * self.spacing();
        (0..self.len()).map(|i| self.radius(i).max(cap)).collect()
    }

    /// Signed wave index of FFT position `j` along one axis.
    pub fn signed_mode(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Largest `t` with `t^{1/α} ≤ L/8`.
    pub fn image_safe_time(&self, alpha: f64) -> f64 {
        libm::pow(self.half_length / 8.0, alpha)
    }

    /// Cyclic shift of a flat index by `shift` points along every axis.
    pub fn shifted(&self, flat: usize, shift: &[i64]) -> usize {
        let idx = self.unflatten(flat);
        let n = self.n as i64;
        let mut out = [0usize; 3];
        for axis in 0..self.d as usize {
            out[axis] = (idx[axis] as i64 + shift[axis]).rem_euclid(n) as usize;
        }
        self.flatten(&out)
    }
}

/// Real values on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(domain!("field has {} values, grid needs {}", values.len(), grid.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                step: 0,
                reason: alloc::format!("non-finite value at index {i}"),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: alloc::vec![0.0; grid.len()] }
    }

    pub fn from_fn<F: FnMut([f64; 3]) -> f64>(grid: Grid, mut f: F) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * factor).collect() }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ u h^d`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Unweighted `L^q` norm; `q = f64::INFINITY` gives the sup norm.
    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        weighted_norm(self, q, &WeightSpec::unweighted())
    }

    /// Cyclic shift by `shift` grid points along each axis.
    pub fn shifted(&self, shift: &[i64]) -> Self {
        let mut values = alloc::vec![0.0; self.values.len()];
        for (i, v) in self.values.iter().enumerate() {
            values[self.grid.shifted(i, shift)] = *v;
        }
        Self { grid: self.grid, values }
    }
}

/// Time-dependent weight `φ_σ(x,t) = 1 + t^{σ/α} |x|^{−σ}`.
///
/// `|x|` is capped below by `h/2`. With `sigma = 0` the weight is identically 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub sigma: f64,
    pub t: f64,
    pub alpha: f64,
}

impl WeightSpec {
    pub fn new(sigma: f64, t: f64, alpha: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !(t >= 0.0) || !(alpha > 0.0) {
            return Err(domain!("weight needs sigma >= 0, t >= 0 and alpha > 0"));
        }
        Ok(Self { sigma, t, alpha })
    }

    pub fn unweighted() -> Self {
        Self { sigma: 0.0, t: 0.0, alpha: 1.0 }
    }

    pub fn phi(&self, radius: f64) -> f64 {
        if self.sigma == 0.0 || self.t == 0.0 {
            return 1.0;
        }
        1.0 + libm::pow(self.t, self.sigma / self.alpha) * libm::pow(radius, -self.sigma)
    }

    /// Weight at every grid point of `grid`.
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.capped_radii().into_iter().map(|r| self.phi(r)).collect()
    }
}

/// `(Σ |u/φ|^q φ² h^d)^{1/q}` for finite `q`, `sup |u|/φ` for `q = ∞`.
pub fn weighted_norm(field: &Field, q: f64, weight: &WeightSpec) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(domain!("norm exponent must be >= 1, got {q}"));
    }
    let grid = field.grid();
    let cap = 0.5 * grid.spacing();
    let trivial = weight.sigma == 0.0 || weight.t == 0.0;
    let phi_at = |i: usize| if trivial { 1.0 } else { weight.phi(grid.radius(i).max(cap)) };
    if q == f64::INFINITY {
        let mut m: f64 = 0.0;
        for (i, v) in field.values().iter().enumerate() {
            m = m.max(libm::fabs(*v) / phi_at(i));
        }
        return Ok(m);
    }
    let mut acc = 0.0;
    for (i, v) in field.values().iter().enumerate() {
        let phi = phi_at(i);
        let a = libm::fabs(*v);
        if a == 0.0 {
            continue;
        }
        acc += if q == 2.0 { a * a } else { libm::pow(a / phi, q) * phi * phi };
    }
    Ok(libm::pow(acc * grid.cell_volume(), 1.0 / q))
}
