use alloc::vec::Vec;

use super::{Field, Grid};
use crate::constants::{singular_amplitude, ModelParams};
use crate::error::{domain, Result};

/// Families of nonnegative initial data. Singular profiles are evaluated at
/// `max(|x|, h/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialDatumSpec {
    /// `δ·u_∞`.
    TruncatedSingular { delta: f64 },
    /// `A·exp(−|x|²/w²)`.
    Gaussian { amplitude: f64, width: f64 },
    /// `min(K|x|^{−γ₀}, δ·s·|x|^{−α/(p−1)})` with `0 < γ₀ < α/(p−1)`.
    PowerTail { k: f64, gamma0: f64, delta: f64 },
    /// `a·|x|^{−e}`.
    PowerLaw { amplitude: f64, exponent: f64 },
    Zero,
}

/// A datum family with an optional far-field taper `exp(−(|x|/R)^8)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialDatum {
    pub spec: InitialDatumSpec,
    pub taper_radius: Option<f64>,
}

impl From<InitialDatumSpec> for InitialDatum {
    fn from(spec: InitialDatumSpec) -> Self {
        Self { spec, taper_radius: None }
    }
}

impl InitialDatum {
    pub fn tapered(spec: InitialDatumSpec, radius: f64) -> Self {
        Self { spec, taper_radius: Some(radius) }
    }

    /// Whether sampling needs `s(α,d,p)`.
    pub fn needs_singular_regime(&self) -> bool {
        matches!(
            self.spec,
            InitialDatumSpec::TruncatedSingular { .. } | InitialDatumSpec::PowerTail { .. }
        )
    }
}

/// Non-fatal remarks about a sampled datum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatumWarning {
    /// `δ ≥ 1`: the datum is not strictly below `u_∞`.
    NotStrictlyBelowSingular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub field: Field,
    pub warning: Option<DatumWarning>,
}

/// `u_∞` sampled with its core capped at `|x| = h/2`.
pub fn singular_profile(grid: &Grid, params: &ModelParams) -> Result<Vec<f64>> {
    let s = singular_amplitude(params)?;
    let g = params.steady_exponent();
    Ok(grid.capped_radii().into_iter().map(|r| s * libm::pow(r, -g)).collect())
}

/// Samples an initial datum on `grid`.
pub fn sample(grid: &Grid, datum: &InitialDatum, params: &ModelParams) -> Result<Sampled> {
    let radii = grid.capped_radii();
    let mut warning = None;
    let mut values: Vec<f64> = match datum.spec {
        InitialDatumSpec::TruncatedSingular { delta } => {
            if !(delta >= 0.0) || !delta.is_finite() {
                return Err(domain!("truncated_singular needs delta >= 0, got {delta}"));
            }
            if delta >= 1.0 {
                warning = Some(DatumWarning::NotStrictlyBelowSingular);
            }
            singular_profile(grid, params)?.into_iter().map(|u| delta * u).collect()
        }
        InitialDatumSpec::Gaussian { amplitude, width } => {
            if !(amplitude >= 0.0) || !(width > 0.0) {
                return Err(domain!("gaussian needs amplitude >= 0 and width > 0"));
            }
            (0..grid.len())
                .map(|i| {
                    let r = grid.radius(i) / width;
                    amplitude * libm::exp(-r * r)
                })
                .collect()
        }
        InitialDatumSpec::PowerTail { k, gamma0, delta } => {
            let g = params.steady_exponent();
            if !(k > 0.0) || !(gamma0 > 0.0 && gamma0 < g) || !(delta > 0.0) {
                return Err(domain!(
                    "power_tail needs K > 0, 0 < gamma0 < alpha/(p-1) = {g} and delta > 0"
                ));
            }
            if delta >= 1.0 {
                warning = Some(DatumWarning::NotStrictlyBelowSingular);
            }
            let s = singular_amplitude(params)?;
            radii
                .iter()
                .map(|&r| (k * libm::pow(r, -gamma0)).min(delta * s * libm::pow(r, -g)))
                .collect()
        }
        InitialDatumSpec::PowerLaw { amplitude, exponent } => {
            if !(amplitude >= 0.0) || !(exponent >= 0.0) {
                return Err(domain!("power_law needs amplitude >= 0 and exponent >= 0"));
            }
            radii.iter().map(|&r| amplitude * libm::pow(r, -exponent)).collect()
        }
        InitialDatumSpec::Zero => alloc::vec![0.0; grid.len()],
    };
    if let Some(radius) = datum.taper_radius {
        if !(radius > 0.0) {
            return Err(domain!("taper radius must be positive"));
        }
        for (v, i) in values.iter_mut().zip(0..) {
            let x = grid.radius(i) / radius;
            let x2 = x * x;
            let x8 = x2 * x2 * x2 * x2;
            *v *= libm::exp(-x8);
        }
    }
    Ok(Sampled { field: Field::new(*grid, values)?, warning })
}

/// Radius `R_#` where `K|x|^{−γ₀} = δ·s·|x|^{−α/(p−1)}`, i.e.
/// `R_# = (δs/K)^{1/(α/(p−1) − γ₀)}`.
pub fn power_tail_crossover(params: &ModelParams, k: f64, gamma0: f64, delta: f64) -> Result<f64> {
    let s = singular_amplitude(params)?;
    Ok(libm::pow(delta * s / k, 1.0 / (params.steady_exponent() - gamma0)))
}
