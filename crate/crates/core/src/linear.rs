//! The Hardy semigroup `e^{−tH}`, `H = (−Δ)^{α/2} − κ|x|^{−α}`, by Strang
//! splitting on the periodic grid.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::analysis::{fit_power_law, FitResult};
use crate::constants::{hardy_bound, solve_sigma};
use crate::error::{domain, Error, Result};
use crate::field::{weighted_norm, Field, Grid, HeatSemigroup, Spectral, WeightSpec};

/// Operator data for `H`. The potential is `κ·max(|x|, cap)^{−α}` with the cap
/// defaulting to `h/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyOperatorSpec {
    pub alpha: f64,
    pub d: u32,
    pub kappa: f64,
    pub cap_radius: Option<f64>,
}

impl HardyOperatorSpec {
    pub fn new(alpha: f64, d: u32, kappa: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(domain!("alpha must lie in (0,2), got {alpha}"));
        }
        if d == 0 || f64::from(d) <= alpha {
            return Err(domain!("Hardy operator requires d > alpha"));
        }
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(domain!("kappa must be finite and >= 0, got {kappa}"));
        }
        Ok(Self { alpha, d, kappa, cap_radius: None })
    }

    pub fn with_cap(mut self, radius: f64) -> Self {
        self.cap_radius = Some(radius);
        self
    }

    pub fn cap(&self, grid: &Grid) -> f64 {
        self.cap_radius.unwrap_or(0.5 * grid.spacing())
    }

    /// `V(x) = κ·max(|x|, cap)^{−α}` at every grid point.
    pub fn potential(&self, grid: &Grid) -> Vec<f64> {
        let cap = self.cap(grid);
        if self.kappa == 0.0 {
            return alloc::vec![0.0; grid.len()];
        }
        (0..grid.len())
            .map(|i| self.kappa * libm::pow(grid.radius(i).max(cap), -self.alpha))
            .collect()
    }

    /// Weight exponent `σ` with `C(σ) = κ` (zero when `κ = 0`).
    pub fn sigma(&self) -> Result<f64> {
        if self.kappa == 0.0 {
            return Ok(0.0);
        }
        solve_sigma(self.kappa, self.d, self.alpha).map_err(|e| {
            Error::Config(alloc::format!("no weight exponent for kappa = {}: {e}", self.kappa))
        })
    }

    /// `κ ≤ (2π)^α/c_α` (with a `1e−12` slack), the hypothesis of the two-sided
    /// kernel bound.
    pub fn check_kernel_hypothesis(&self) -> Result<()> {
        let bound = hardy_bound(self.d, self.alpha)?;
        if self.kappa > bound + 1e-12 {
            return Err(Error::Config(alloc::format!(
                "kappa = {} exceeds the Hardy bound {bound}",
                self.kappa
            )));
        }
        Ok(())
    }
}

/// Time-step rule `dt(t) = min(dt_max, fraction·max(t, t0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRule {
    pub t0: f64,
    pub fraction: f64,
    pub dt_max: f64,
}

impl StepRule {
    /// `t0 = 4h^α`, 2% relative steps, no cap.
    pub fn for_grid(grid: &Grid, alpha: f64) -> Self {
        Self { t0: 4.0 * libm::pow(grid.spacing(), alpha), fraction: 0.02, dt_max: f64::INFINITY }
    }

    pub fn dt(&self, t: f64) -> f64 {
        self.dt_max.min(self.fraction * t.max(self.t0))
    }
}

/// Strang splitting for `e^{−tH}` with cached substep factors.
#[derive(Debug, Clone)]
pub struct HardyPropagator {
    heat: HeatSemigroup,
    potential: Vec<f64>,
    cached: Option<(f64, Vec<f64>, Vec<f64>)>,
}

impl HardyPropagator {
    pub fn new(spec: &HardyOperatorSpec, spectral: Spectral) -> Result<Self> {
        let grid = *spectral.grid();
        if grid.dim() != spec.d {
            return Err(domain!("grid dimension {} differs from operator dimension {}", grid.dim(), spec.d));
        }
        let potential = spec.potential(&grid);
        let heat = HeatSemigroup::new(spectral, spec.alpha)?;
        Ok(Self { heat, potential, cached: None })
    }

    pub fn grid(&self) -> &Grid {
        self.heat.grid()
    }

    pub fn heat(&self) -> &HeatSemigroup {
        &self.heat
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    fn refresh(&mut self, dt: f64) {
        if !matches!(&self.cached, Some((c, _, _)) if *c == dt) {
            let half = self.potential.iter().map(|v| libm::exp(0.5 * dt * v)).collect();
            self.cached = Some((dt, half, self.heat.multiplier(dt)));
        }
    }

    /// One Strang step `e^{V dt/2} e^{−dt(−Δ)^{α/2}} e^{V dt/2}` in place.
    pub fn step_values(&mut self, values: &mut [f64], dt: f64) -> Result<()> {
        if !(dt > 0.0) {
            return Err(domain!("time step must be positive, got {dt}"));
        }
        self.refresh(dt);
        let (_, half, mult) = self.cached.as_ref().unwrap();
        for (v, e) in values.iter_mut().zip(half) {
            *v *= e;
        }
        let out = self.heat.spectral().apply_multiplier(values, mult);
        for ((v, o), e) in values.iter_mut().zip(out).zip(half) {
            *v = o * e;
        }
        Ok(())
    }

    pub fn step(&mut self, field: &Field, dt: f64) -> Result<Field> {
        let mut values = field.values().to_vec();
        self.step_values(&mut values, dt)?;
        finite_field(*field.grid(), values)
    }

    /// Advances from `t_from` to `t_to` with steps from `rule`, landing exactly on
    /// `t_to`.
    pub fn advance(&mut self, values: &mut [f64], t_from: f64, t_to: f64, rule: &StepRule) -> Result<()> {
        let mut t = t_from;
        while t < t_to {
            let mut dt = rule.dt(t);
            if t + dt >= t_to * (1.0 - 1e-14) {
                dt = t_to - t;
            }
            if !(dt > 0.0) {
                break;
            }
            self.step_values(values, dt)?;
            t += dt;
        }
        Ok(())
    }
}

fn finite_field(grid: Grid, values: Vec<f64>) -> Result<Field> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step: 0, reason: "Hardy propagation".into() });
    }
    Field::new(grid, values)
}

/// A single Strang step of `e^{−dt H}`.
pub fn hardy_step(w: &Field, dt: f64, spec: &HardyOperatorSpec, spectral: &Spectral) -> Result<Field> {
    HardyPropagator::new(spec, spectral.clone())?.step(w, dt)
}

/// Plain and `φ_σ(t)`-weighted norms for `q = 1, 2, ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub t: f64,
    pub plain: [f64; 3],
    pub weighted: [f64; 3],
}

pub const NORM_EXPONENTS: [f64; 3] = [1.0, 2.0, f64::INFINITY];

impl NormRecord {
    pub fn measure(field: &Field, t: f64, sigma: f64, alpha: f64) -> Result<Self> {
        let weight = WeightSpec::new(sigma, t, alpha)?;
        let mut plain = [0.0; 3];
        let mut weighted = [0.0; 3];
        for (k, q) in NORM_EXPONENTS.iter().enumerate() {
            plain[k] = field.lq_norm(*q)?;
            weighted[k] = weighted_norm(field, *q, &weight)?;
        }
        Ok(Self { t, plain, weighted })
    }
}

/// Evolves `w0` under `e^{−tH}` and calls `observe` at each of the increasing
/// output `times`.
pub fn hardy_evolve_with<F>(
    w0: &Field,
    spec: &HardyOperatorSpec,
    spectral: &Spectral,
    times: &[f64],
    rule: &StepRule,
    mut observe: F,
) -> Result<()>
where
    F: FnMut(f64, &Field) -> Result<()>,
{
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.first().is_some_and(|t| *t < 0.0) {
        return Err(domain!("output times must be nonnegative and strictly increasing"));
    }
    let mut prop = HardyPropagator::new(spec, spectral.clone())?;
    let mut values = w0.values().to_vec();
    let mut t = 0.0;
    for &target in times {
        prop.advance(&mut values, t, target, rule)?;
        t = target;
        let field = finite_field(*w0.grid(), values.clone())?;
        observe(t, &field)?;
    }
    Ok(())
}

/// Norm time series of `e^{−tH}w0`.
pub fn hardy_evolve(
    w0: &Field,
    spec: &HardyOperatorSpec,
    spectral: &Spectral,
    times: &[f64],
    rule: &StepRule,
) -> Result<Vec<NormRecord>> {
    if w0.min_value() < 0.0 {
        return Err(domain!("Hardy evolution expects a nonnegative datum"));
    }
    let sigma = spec.sigma()?;
    let mut out = Vec::with_capacity(times.len());
    hardy_evolve_with(w0, spec, spectral, times, rule, |t, f| {
        out.push(NormRecord::measure(f, t, sigma, spec.alpha)?);
        Ok(())
    })?;
    Ok(out)
}

/// Summary of `e^{−tH}(x,y)/(φ(x,t)φ(y,t)G_α(x−y,t))` over the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRatioStats {
    pub max: f64,
    pub median: f64,
    pub min: f64,
    pub samples: usize,
    /// Maximum ratio at each probe time.
    pub per_time: Vec<(f64, f64)>,
}

/// Probes the two-sided kernel bound with a unit-mass single-cell bump at `y`.
///
/// The free kernel `G_α` is the κ = 0 evolution of the same bump. Samples with
/// `x = y = 0` or a non-positive free kernel are skipped.
pub fn kernel_ratio_probe(
    spec: &HardyOperatorSpec,
    spectral: &Spectral,
    y: usize,
    times: &[f64],
    sample_points: &[usize],
    rule: &StepRule,
) -> Result<KernelRatioStats> {
    spec.check_kernel_hypothesis()?;
    let grid = *spectral.grid();
    if y >= grid.len() || sample_points.iter().any(|&i| i >= grid.len()) {
        return Err(domain!("probe point outside the grid"));
    }
    let sigma = spec.sigma()?;
    let mut bump = alloc::vec![0.0; grid.len()];
    bump[y] = 1.0 / grid.cell_volume();
    let bump = Field::new(grid, bump)?;
    let heat = HeatSemigroup::new(spectral.clone(), spec.alpha)?;
    let cap = 0.5 * grid.spacing();
    let ry = grid.radius(y);
    let mut ratios = Vec::new();
    let mut per_time = Vec::new();
    hardy_evolve_with(&bump, spec, spectral, times, rule, |t, k| {
        let free = heat.apply_values(bump.values(), t)?;
        let weight = WeightSpec::new(sigma, t, spec.alpha)?;
        let phi_y = weight.phi(ry.max(cap));
        let mut m: f64 = 0.0;
        for &x in sample_points {
            let rx = grid.radius(x);
            if rx == 0.0 && ry == 0.0 {
                continue;
            }
            let g = free[x];
            if !(g > 0.0) {
                continue;
            }
            let r = k.values()[x] / (weight.phi(rx.max(cap)) * phi_y * g);
            m = m.max(r);
            ratios.push(r);
        }
        per_time.push((t, m));
        Ok(())
    })?;
    if ratios.is_empty() {
        return Err(domain!("kernel probe has no usable samples"));
    }
    ratios.sort_by(f64::total_cmp);
    Ok(KernelRatioStats {
        max: ratios[ratios.len() - 1],
        median: ratios[ratios.len() / 2],
        min: ratios[0],
        samples: ratios.len(),
        per_time,
    })
}

/// Fits the decay of `‖e^{−tH}w0‖_{q,φ_σ(t)} / ‖w0‖_{r,φ_σ(t)}`; the expected
/// exponent is `−(d/α)(1/r − 1/q)`.
pub fn hypercontractivity_measure(
    spec: &HardyOperatorSpec,
    spectral: &Spectral,
    w0: &Field,
    q: f64,
    r: f64,
    times: &[f64],
    window: Option<(f64, f64)>,
    rule: &StepRule,
) -> Result<FitResult> {
    if !(r >= 1.0 && r <= q) {
        return Err(domain!("need 1 <= r <= q, got r = {r}, q = {q}"));
    }
    let sigma = spec.sigma()?;
    let mut ratio = Vec::with_capacity(times.len());
    hardy_evolve_with(w0, spec, spectral, times, rule, |t, f| {
        let weight = WeightSpec::new(sigma, t, spec.alpha)?;
        ratio.push(weighted_norm(f, q, &weight)? / weighted_norm(w0, r, &weight)?);
        Ok(())
    })?;
    fit_power_law(times, &ratio, window)
}

/// `−(d/α)(1/r − 1/q)`.
pub fn hypercontractivity_exponent(d: u32, alpha: f64, q: f64, r: f64) -> f64 {
    -(f64::from(d) / alpha) * (1.0 / r - 1.0 / q)
}
