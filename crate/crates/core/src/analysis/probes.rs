use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::fit::{fit_power_law, FitResult};
use crate::error::{domain, Result};
use crate::field::{weighted_norm, Field, WeightSpec};

/// Scaled deviations from `u_∞` collected along a run:
/// `sup_{|x| ≤ t^{1/α}} |x|^σ (u_∞ − u)` and `sup_{|x| ≥ t^{1/α}} (u_∞ − u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceProbe {
    u_inf: Vec<f64>,
    alpha: f64,
    sigma: f64,
    pub times: Vec<f64>,
    pub inner: Vec<f64>,
    pub outer: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRates {
    pub inner: FitResult,
    pub outer: FitResult,
    pub expected_inner: f64,
    pub expected_outer: f64,
}

impl ConvergenceProbe {
    pub fn new(u_inf: Vec<f64>, alpha: f64, sigma: f64) -> Self {
        Self { u_inf, alpha, sigma, times: Vec::new(), inner: Vec::new(), outer: Vec::new() }
    }

    pub fn observe(&mut self, t: f64, u: &Field) -> Result<()> {
        if u.values().len() != self.u_inf.len() {
            return Err(domain!("probe and field sizes differ"));
        }
        let edge = libm::pow(t, 1.0 / self.alpha);
        let grid = u.grid();
        let cap = 0.5 * grid.spacing();
        let (mut inner, mut outer) = (0.0f64, 0.0f64);
        for (i, (a, v)) in self.u_inf.iter().zip(u.values()).enumerate() {
            let r = grid.radius(i).max(cap);
            let dev = a - v;
            if r <= edge {
                inner = inner.max(libm::pow(r, self.sigma) * dev);
            }
            if r >= edge {
                outer = outer.max(dev);
            }
        }
        self.times.push(t);
        self.inner.push(inner);
        self.outer.push(outer);
        Ok(())
    }

    /// Fits both scaled deviations; expected exponents `−(ℓ−σ)/α` and `−ℓ/α`.
    pub fn rates(&self, ell: f64, window: Option<(f64, f64)>) -> Result<ConvergenceRates> {
        Ok(ConvergenceRates {
            inner: fit_power_law(&self.times, &self.inner, window)?,
            outer: fit_power_law(&self.times, &self.outer, window)?,
            expected_inner: -(ell - self.sigma) / self.alpha,
            expected_outer: -ell / self.alpha,
        })
    }

    /// For `ℓ = σ`: both scaled deviations are non-increasing (up to `slack`
    /// relative) over the times in `window`.
    pub fn monotone_decrease(&self, window: (f64, f64), slack: f64) -> bool {
        let pick = |v: &[f64]| -> Vec<f64> {
            self.times.iter().zip(v).filter(|(t, _)| **t >= window.0 && **t <= window.1).map(|(_, x)| *x).collect()
        };
        [pick(&self.inner), pick(&self.outer)]
            .iter()
            .all(|s| s.len() >= 2 && s.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack)))
    }
}

/// `‖u_∞ − u(t)‖_2` along a run; the expected decay exponent is `−(d − 2σ)/(2α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L2StabilityProbe {
    u_inf: Vec<f64>,
    pub times: Vec<f64>,
    pub distance: Vec<f64>,
    /// Most negative `u_∞ − u` relative to `u_∞` seen so far.
    pub worst_overshoot: f64,
}

impl L2StabilityProbe {
    pub fn new(u_inf: Vec<f64>) -> Self {
        Self { u_inf, times: Vec::new(), distance: Vec::new(), worst_overshoot: 0.0 }
    }

    pub fn observe(&mut self, t: f64, u: &Field) -> Result<()> {
        let mut acc = 0.0;
        for (a, v) in self.u_inf.iter().zip(u.values()) {
            let w = a - v;
            acc += w * w;
            self.worst_overshoot = self.worst_overshoot.max(-w / a);
        }
        self.times.push(t);
        self.distance.push(libm::sqrt(acc * u.grid().cell_volume()));
        Ok(())
    }

    /// Fit of the distance; errors when `u` exceeded `u_∞` by more than `tol`.
    pub fn check(&self, window: Option<(f64, f64)>, tol: f64) -> Result<FitResult> {
        if self.worst_overshoot > tol {
            return Err(crate::error::Error::Monotonicity(alloc::format!(
                "u exceeds u_inf by {} relative",
                self.worst_overshoot
            )));
        }
        fit_power_law(&self.times, &self.distance, window)
    }
}

pub fn l2_stability_exponent(d: u32, alpha: f64, sigma: f64) -> f64 {
    -(f64::from(d) - 2.0 * sigma) / (2.0 * alpha)
}

/// `‖u(t)‖_{q,φ_σ(t)}` for `q = 1, 2, ∞` along a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedDecayProbe {
    alpha: f64,
    sigma: f64,
    pub times: Vec<f64>,
    pub norms: [Vec<f64>; 3],
}

pub const DECAY_EXPONENTS: [f64; 3] = [1.0, 2.0, f64::INFINITY];

impl WeightedDecayProbe {
    pub fn new(alpha: f64, sigma: f64) -> Self {
        Self { alpha, sigma, times: Vec::new(), norms: [Vec::new(), Vec::new(), Vec::new()] }
    }

    pub fn observe(&mut self, t: f64, u: &Field) -> Result<()> {
        let weight = WeightSpec::new(self.sigma, t, self.alpha)?;
        for (k, q) in DECAY_EXPONENTS.iter().enumerate() {
            self.norms[k].push(weighted_norm(u, *q, &weight)?);
        }
        self.times.push(t);
        Ok(())
    }

    /// `(q, fit, expected −(d/α)(1 − 1/q))` for each exponent.
    pub fn fits(&self, d: u32, window: Option<(f64, f64)>) -> Result<Vec<(f64, FitResult, f64)>> {
        DECAY_EXPONENTS
            .iter()
            .zip(&self.norms)
            .map(|(q, v)| {
                let fit = fit_power_law(&self.times, v, window)?;
                Ok((*q, fit, -(f64::from(d) / self.alpha) * (1.0 - 1.0 / q)))
            })
            .collect()
    }
}
