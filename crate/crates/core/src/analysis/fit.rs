use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares power law `v ≈ c·t^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

impl FitResult {
    /// `|exponent − target| ≤ tol·|target|` (absolute `tol` when the target is 0)
    /// with a standard error below half the allowed deviation.
    pub fn within(&self, target: f64, tol: f64) -> bool {
        let allowed = if target == 0.0 { tol } else { tol * libm::fabs(target) };
        libm::fabs(self.exponent - target) <= allowed && self.stderr < 0.5 * allowed
    }
}

pub const MIN_FIT_POINTS: usize = 5;

/// Fits `ln v` against `ln t` over the points with `t` in `window` (all points
/// when `None`).
pub fn fit_power_law(times: &[f64], values: &[f64], window: Option<(f64, f64)>) -> Result<FitResult> {
    if times.len() != values.len() {
        return Err(Error::Fit("times and values differ in length".into()));
    }
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut used = (f64::INFINITY, f64::NEG_INFINITY);
    for (&t, &v) in times.iter().zip(values) {
        if t < lo || t > hi {
            continue;
        }
        if !(t > 0.0) || !(v > 0.0) || !v.is_finite() {
            return Err(Error::Fit(alloc::format!("non-positive sample ({t}, {v}) in the fit window")));
        }
        xs.push(libm::log(t));
        ys.push(libm::log(v));
        used = (used.0.min(t), used.1.max(t));
    }
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::Fit(alloc::format!(
            "{n} points in the fit window, at least {MIN_FIT_POINTS} needed"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if !(sxx > 0.0) {
        return Err(Error::Fit("fit window contains a single time".into()));
    }
    let slope = sxy / sxx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - my - slope * (x - mx);
            r * r
        })
        .sum();
    let stderr = libm::sqrt(ssr / (nf - 2.0) / sxx);
    Ok(FitResult { exponent: slope, stderr, window: used, n_points: n })
}

/// The last decade `[t_max/10, t_max]` below the image-safe time `t_max`.
pub fn last_decade(t_max: f64) -> (f64, f64) {
    (t_max / 10.0, t_max)
}

/// `t0·2^{k/m}` for `k = 0, 1, …` up to `t_end`.
pub fn dyadic_times(t0: f64, per_octave: u32, t_end: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if !(t0 > 0.0) || per_octave == 0 {
        return out;
    }
    let m = f64::from(per_octave);
    let mut k = 0i32;
    loop {
        let t = t0 * libm::exp2(f64::from(k) / m);
        if t > t_end * (1.0 + 1e-12) {
            break;
        }
        out.push(t);
        k += 1;
    }
    out
}
