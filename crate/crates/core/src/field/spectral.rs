use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::{Field, Grid};
use crate::error::{domain, Error, Result};

/// A planned one-dimensional complex FFT of fixed length.
///
/// `inverse` is unnormalised: `inverse(forward(x)) = n·x`.
pub trait Fft1d: Send + Sync {
    fn len(&self) -> usize;
    fn forward(&self, data: &mut [Complex64]);
    fn inverse(&self, data: &mut [Complex64]);
}

/// Source of [`Fft1d`] plans. Implementations may cache plans; lookups must be
/// safe from several threads.
pub trait FftBackend: Send + Sync {
    fn plan(&self, n: usize) -> Arc<dyn Fft1d>;
}

/// Multidimensional transforms on a [`Grid`] and the norms `|ξ|` of its
/// angular wave vectors `ξ = (π/L)k`.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid,
    fft: Arc<dyn Fft1d>,
    wavenumber: Arc<[f64]>,
}

impl core::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl Spectral {
    pub fn new(grid: Grid, backend: &dyn FftBackend) -> Self {
        let fft = backend.plan(grid.n());
        assert_eq!(fft.len(), grid.n(), "FFT plan length does not match the grid");
        let k0 = PI / grid.half_length();
        let wavenumber = (0..grid.len())
            .map(|flat| {
                let idx = grid.unflatten(flat);
                let mut sq = 0.0;
                for &j in idx.iter().take(grid.dim() as usize) {
                    let k = k0 * grid.signed_mode(j) as f64;
                    sq += k * k;
                }
                libm::sqrt(sq)
            })
            .collect();
        Self { grid, fft, wavenumber }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `|ξ|` at every spectral position.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumber
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.grid.n();
        let d = self.grid.dim() as usize;
        let run = |line: &mut [Complex64]| {
            if inverse {
                self.fft.inverse(line);
            } else {
                self.fft.forward(line);
            }
        };
        for chunk in data.chunks_exact_mut(n) {
            run(chunk);
        }
        let mut line = alloc::vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..d.saturating_sub(1) {
            let stride = n.pow((d - 1 - axis) as u32);
            let block = stride * n;
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + k * stride];
                    }
                    run(&mut line);
                    for (k, slot) in line.iter().enumerate() {
                        data[base + k * stride] = *slot;
                    }
                }
            }
        }
    }

    /// Discrete Fourier transform of real values.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, false);
        data
    }

    /// Inverse transform, normalised, keeping the real part.
    pub fn inverse_real(&self, mut data: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut data, true);
        let scale = 1.0 / self.grid.len() as f64;
        data.into_iter().map(|c| c.re * scale).collect()
    }

    /// Applies the real Fourier multiplier `mult` (one entry per spectral position).
    pub fn apply_multiplier(&self, values: &[f64], mult: &[f64]) -> Vec<f64> {
        let mut spec = self.forward(values);
        for (c, m) in spec.iter_mut().zip(mult) {
            *c *= *m;
        }
        self.inverse_real(spec)
    }

    /// Periodic circular convolution `Σ_y a(y) b(x − y)` (without the cell volume).
    pub fn convolve(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut fa = self.forward(a);
        let fb = self.forward(b);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x *= *y;
        }
        self.inverse_real(fa)
    }
}

/// The semigroup `e^{−t(−Δ)^{α/2}}` on a fixed grid.
#[derive(Debug, Clone)]
pub struct HeatSemigroup {
    spectral: Spectral,
    alpha: f64,
    symbol: Vec<f64>,
}

impl HeatSemigroup {
    pub fn new(spectral: Spectral, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(domain!("alpha must lie in (0,2], got {alpha}"));
        }
        let symbol = spectral.wavenumbers().iter().map(|&k| libm::pow(k, alpha)).collect();
        Ok(Self { spectral, alpha, symbol })
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn grid(&self) -> &Grid {
        self.spectral.grid()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `|ξ|^α` at every spectral position.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// Multiplier `exp(−t|ξ|^α)`.
    pub fn multiplier(&self, t: f64) -> Vec<f64> {
        self.symbol.iter().map(|&s| libm::exp(-t * s)).collect()
    }

    /// `e^{−t(−Δ)^{α/2}} u` on raw values.
    pub fn apply_values(&self, values: &[f64], t: f64) -> Result<Vec<f64>> {
        if !(t >= 0.0) {
            return Err(domain!("propagation time must be >= 0, got {t}"));
        }
        if t == 0.0 {
            return Ok(values.to_vec());
        }
        Ok(self.spectral.apply_multiplier(values, &self.multiplier(t)))
    }

    pub fn apply(&self, field: &Field, t: f64) -> Result<Field> {
        let out = self.apply_values(field.values(), t)?;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: 0, reason: "heat propagation".into() });
        }
        Field::new(*field.grid(), out)
    }

    /// `(−Δ)^{α/2} u` on raw values.
    pub fn generator(&self, values: &[f64]) -> Vec<f64> {
        self.spectral.apply_multiplier(values, &self.symbol)
    }
}

/// `e^{−t(−Δ)^{α/2}} field`.
pub fn heat_propagate(spectral: &Spectral, field: &Field, t: f64, alpha: f64) -> Result<Field> {
    if field.grid() != spectral.grid() {
        return Err(domain!("field and transform were built for different grids"));
    }
    HeatSemigroup::new(spectral.clone(), alpha)?.apply(field, t)
}
