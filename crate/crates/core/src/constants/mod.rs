//! Closed-form constants of the model.
//!
//! Notation: `A(d,α)` is the normalising constant of the integral fractional
//! Laplacian, `C(γ)` the coefficient in `(−Δ)^{α/2}|x|^{−γ} = C(γ)|x|^{−γ−α}`,
//! `s` the amplitude of the singular steady state `u_∞ = s|x|^{−α/(p−1)}`,
//! `c_α` the fractional Hardy constant and `C_max = C((d−α)/2) = (2π)^α/c_α`
//! the largest admissible Hardy coupling.

mod gamma;

use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use gamma::{gamma, log_gamma};

/// Model parameters `(α, d, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub d: u32,
    pub p: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, d: u32, p: f64) -> Result<Self> {
        let params = Self { alpha, d, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(domain!("alpha must lie in (0,2), got {}", self.alpha));
        }
        if self.d == 0 {
            return Err(domain!("d must be at least 1"));
        }
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(domain!("p must be a finite number > 1, got {}", self.p));
        }
        Ok(())
    }

    pub fn dim(&self) -> f64 {
        f64::from(self.d)
    }

    /// Homogeneity exponent `α/(p−1)` of `u_∞`.
    pub fn steady_exponent(&self) -> f64 {
        self.alpha / (self.p - 1.0)
    }

    /// `p > 1 + α/(d−α)` with `d > α`.
    pub fn check_singular_regime(&self) -> Result<()> {
        self.validate()?;
        let d = self.dim();
        if !(d > self.alpha) {
            return Err(domain!(
                "singular steady state requires d > alpha (d = {}, alpha = {})",
                self.d,
                self.alpha
            ));
        }
        let p_sg = 1.0 + self.alpha / (d - self.alpha);
        if !(self.p > p_sg) {
            return Err(domain!(
                "singular steady state requires p > 1 + alpha/(d - alpha) = {p_sg} (p = {})",
                self.p
            ));
        }
        Ok(())
    }

    /// Coupling `p·s^{p−1}` of the Hardy operator obtained by linearising at `u_∞`.
    pub fn linearized_coupling(&self) -> Result<f64> {
        let s = singular_amplitude(self)?;
        Ok(self.p * libm::pow(s, self.p - 1.0))
    }
}

/// `A(d,α) = 2^α Γ((d+α)/2) / (π^{d/2} |Γ(−α/2)|)`.
pub fn frac_lap_constant(d: u32, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(domain!("A(d, alpha) needs alpha in (0,2), got {alpha}"));
    }
    if d == 0 {
        return Err(domain!("d must be at least 1"));
    }
    let d = f64::from(d);
    let num = libm::exp(alpha * libm::log(2.0) + log_gamma(0.5 * (d + alpha))?);
    Ok(num / (libm::pow(PI, 0.5 * d) * libm::fabs(gamma(-0.5 * alpha)?)))
}

/// `C(γ) = 2^α Γ((d−γ)/2) Γ((α+γ)/2) / (Γ((d−α−γ)/2) Γ(γ/2))` for `0 < γ < d−α`.
pub fn power_map_coeff(gamma_exp: f64, d: u32, alpha: f64) -> Result<f64> {
    let df = f64::from(d);
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(domain!("C(gamma) needs alpha in (0,2], got {alpha}"));
    }
    if !(gamma_exp > 0.0 && gamma_exp < df - alpha) {
        return Err(domain!(
            "C(gamma) needs 0 < gamma < d - alpha = {}, got gamma = {gamma_exp}",
            df - alpha
        ));
    }
    let ln = alpha * libm::log(2.0) + log_gamma(0.5 * (df - gamma_exp))?
        + log_gamma(0.5 * (alpha + gamma_exp))?
        - log_gamma(0.5 * (df - alpha - gamma_exp))?
        - log_gamma(0.5 * gamma_exp)?;
    Ok(libm::exp(ln))
}

/// Amplitude `s(α,d,p)` of `u_∞(x) = s|x|^{−α/(p−1)}`.
pub fn singular_amplitude(params: &ModelParams) -> Result<f64> {
    params.check_singular_regime()?;
    let (a, d, p) = (params.alpha, params.dim(), params.p);
    let q = a / (2.0 * (p - 1.0));
    let ln = a * libm::log(2.0) - log_gamma(q)? + log_gamma(0.5 * d - q)? + log_gamma(p * q)?
        - log_gamma(0.5 * d - p * q)?;
    Ok(libm::exp(ln / (p - 1.0)))
}

/// Fractional Hardy constant `c_α = π^α [Γ((d−α)/4)/Γ((d+α)/4)]²`.
pub fn hardy_constant(d: u32, alpha: f64) -> Result<f64> {
    let df = f64::from(d);
    if !(alpha > 0.0 && alpha < 2.0_f64.min(df)) {
        return Err(domain!("c_alpha needs 0 < alpha < min(d, 2), got alpha = {alpha}, d = {d}"));
    }
    let ratio = libm::exp(log_gamma(0.25 * (df - alpha))? - log_gamma(0.25 * (df + alpha))?);
    Ok(libm::pow(PI, alpha) * ratio * ratio)
}

/// Largest coupling `C_max = C((d−α)/2)` for which `C(σ) = κ` is solvable.
pub fn hardy_bound(d: u32, alpha: f64) -> Result<f64> {
    power_map_coeff(0.5 * (f64::from(d) - alpha), d, alpha)
}

/// `(p_F, p_sg) = (1 + α/d, 1 + α/(d−α))`; `p_sg` is absent when `d ≤ α`.
pub fn critical_exponents(d: u32, alpha: f64) -> (f64, Option<f64>) {
    let df = f64::from(d);
    let p_sg = if df > alpha { Some(1.0 + alpha / (df - alpha)) } else { None };
    (1.0 + alpha / df, p_sg)
}

/// Returns `(satisfied, ratio)` with `ratio = p·s^{p−1}·c_α/(2π)^α`.
pub fn jl_condition(params: &ModelParams) -> Result<(bool, f64)> {
    let coupling = params.linearized_coupling()?;
    let c_alpha = hardy_constant(params.d, params.alpha)?;
    let ratio = coupling * c_alpha / libm::pow(2.0 * PI, params.alpha);
    Ok((ratio <= 1.0 + 1e-12, ratio))
}

const SIGMA_LOWER: f64 = 1e-9;
const SIGMA_MAX_ITER: usize = 200;
const SIGMA_TOL: f64 = 1e-14;

/// Smaller root `σ ∈ (0, (d−α)/2]` of `C(σ) = κ`.
pub fn solve_sigma(kappa: f64, d: u32, alpha: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(domain!("kappa must be a finite positive number, got {kappa}"));
    }
    let df = f64::from(d);
    if !(df > alpha) {
        return Err(domain!("sigma equation needs d > alpha"));
    }
    let top = 0.5 * (df - alpha);
    let c_max = power_map_coeff(top, d, alpha)?;
    if kappa > c_max * (1.0 + 1e-12) {
        return Err(Error::NoRoot(alloc::format!(
            "kappa = {kappa} exceeds the maximum C((d-alpha)/2) = {c_max}"
        )));
    }
    if kappa >= c_max {
        return Ok(top);
    }
    let mut lo = SIGMA_LOWER;
    if power_map_coeff(lo, d, alpha)? > kappa {
        return Err(Error::NoRoot(alloc::format!("kappa = {kappa} lies below C({SIGMA_LOWER})")));
    }
    let mut hi = top;
    for _ in 0..SIGMA_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if power_map_coeff(mid, d, alpha)? < kappa {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= SIGMA_TOL * hi.min(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Larger root `d − α − σ` of `C(σ) = κ`.
pub fn solve_sigma_conjugate(kappa: f64, d: u32, alpha: f64) -> Result<f64> {
    Ok(f64::from(d) - alpha - solve_sigma(kappa, d, alpha)?)
}

/// Surface area `2π^{d/2}/Γ(d/2)` of the unit sphere in `ℝ^d`.
pub fn sphere_area(d: u32) -> Result<f64> {
    if d == 0 {
        return Err(domain!("d must be at least 1"));
    }
    let df = f64::from(d);
    Ok(2.0 * libm::pow(PI, 0.5 * df) / gamma(0.5 * df)?)
}

/// Morrey norm of `u_∞` in the critical space `M^{d(p−1)/α}_1`.
pub fn singular_morrey_norm(params: &ModelParams) -> Result<f64> {
    let s = singular_amplitude(params)?;
    Ok(sphere_area(params.d)? / (params.dim() - params.steady_exponent()) * s)
}

/// Summary of the regime facts for one parameter triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub p_fujita: f64,
    pub p_singular: Option<f64>,
    #[serde(rename = "s")]
    pub singular_amplitude: Option<f64>,
    pub hardy_ratio: Option<f64>,
    pub jl_satisfied: bool,
    pub sigma: Option<f64>,
    pub singular_morrey_norm: Option<f64>,
}

impl RegimeReport {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let (p_fujita, p_singular) = critical_exponents(params.d, params.alpha);
        let s = singular_amplitude(params).ok();
        let jl = s.and_then(|_| jl_condition(params).ok());
        let jl_satisfied = jl.is_some_and(|(ok, _)| ok);
        let sigma = if jl_satisfied {
            params
                .linearized_coupling()
                .and_then(|k| solve_sigma(k, params.d, params.alpha))
                .ok()
        } else {
            None
        };
        Ok(Self {
            p_fujita,
            p_singular,
            singular_amplitude: s,
            hardy_ratio: jl.map(|(_, r)| r),
            jl_satisfied,
            sigma,
            singular_morrey_norm: s.and_then(|_| singular_morrey_norm(params).ok()),
        })
    }
}
