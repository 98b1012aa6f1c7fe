//! Splitting integrator for `u_t = −(−Δ)^{α/2}u + |u|^{p−1}u` with blowup
//! detection and barrier/comparison monitors.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::constants::ModelParams;
use crate::error::{domain, Error, Result};
use crate::field::{
    sample, singular_profile, Field, HeatSemigroup, InitialDatum, InitialDatumSpec, Spectral,
};
use crate::linear::{HardyOperatorSpec, HardyPropagator};

/// Exact flow of `u' = u^p` over `dt`; `None` when the pole lies within `dt`.
pub fn reaction_exact(u: f64, dt: f64, p: f64) -> Result<Option<f64>> {
    if !(u >= 0.0) {
        return Err(domain!("reaction substep needs u >= 0, got {u}"));
    }
    if !(dt > 0.0) {
        return Err(domain!("reaction substep needs dt > 0, got {dt}"));
    }
    Ok(reaction_signed(u, dt, p))
}

/// Odd extension of [`reaction_exact`], used on diffusion ringing below zero.
fn reaction_signed(u: f64, dt: f64, p: f64) -> Option<f64> {
    if u == 0.0 {
        return Some(0.0);
    }
    let a = libm::fabs(u);
    let q = p - 1.0;
    let base = 1.0 - q * libm::pow(a, q) * dt;
    if !(base > 0.0) {
        return None;
    }
    let v = a * libm::pow(base, -1.0 / q);
    Some(if u < 0.0 { -v } else { v })
}

/// Relative flow of `u' = u^p − U^p` written for `z = u/U`:
/// `z' = U^{p−1}(|z|^{p−1}z − 1)`.
fn balanced_reaction(z: f64, rate: f64, p: f64) -> f64 {
    if rate == 0.0 {
        return z;
    }
    if p == 2.0 && z >= 0.0 {
        // (z − 1)/(z + 1) = c·e^{2 rate}, valid while z stays nonnegative
        let c = (z - 1.0) / (z + 1.0) * libm::exp(2.0 * rate);
        let closed = (1.0 + c) / (1.0 - c);
        if closed >= 0.0 {
            return closed;
        }
    }
    let f = |z: f64| libm::pow(libm::fabs(z), p - 1.0) * z - 1.0;
    let substeps = libm::ceil(rate / 0.002).clamp(1.0, 10_000.0) as usize;
    let h = rate / substeps as f64;
    let mut z = z;
    for _ in 0..substeps {
        let k1 = f(z);
        let k2 = f(z + 0.5 * h * k1);
        let k3 = f(z + 0.5 * h * k2);
        let k4 = f(z + h * k3);
        z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    z
}

/// Splitting variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Half reaction, diffusion, half reaction on `u`.
    #[default]
    Plain,
    /// Diffusion on `w = U − u` and reaction `u^p − U^p`, with `U` the capped
    /// singular profile, so that `U` is an exact discrete steady state.
    WellBalanced,
}

/// Upper barrier watched during a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Barrier {
    Singular,
    PowerTail { k: f64, gamma0: f64, delta: f64 },
}

impl Barrier {
    pub fn sample(&self, spectral: &Spectral, params: &ModelParams) -> Result<Vec<f64>> {
        let grid = spectral.grid();
        match *self {
            Barrier::Singular => singular_profile(grid, params),
            Barrier::PowerTail { k, gamma0, delta } => {
                let datum = InitialDatum::from(InitialDatumSpec::PowerTail { k, gamma0, delta });
                Ok(sample(grid, &datum, params)?.field.into_values())
            }
        }
    }
}

/// `max (u − b)₊ / b` over the grid.
pub fn barrier_monitor(u: &Field, barrier: &[f64]) -> f64 {
    u.values()
        .iter()
        .zip(barrier)
        .fold(0.0, |m: f64, (u, b)| m.max((u - b).max(0.0) / b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub t_end: f64,
    pub eta: f64,
    pub dt_max: f64,
    pub blowup_sup_threshold: f64,
    pub dt_min: f64,
    /// Output times in `(0, t_end]`; `t = 0` and `t_end` are always recorded.
    pub output_times: Vec<f64>,
    pub scheme: Scheme,
    pub barrier: Option<Barrier>,
    /// Co-evolve `e^{−tH}(U − u_0)` with `κ = p·s^{p−1}` and watch the sandwich.
    pub comparison: bool,
    /// Negative values above `−clip_tolerance·sup` are set to zero.
    pub clip_tolerance: f64,
}

impl SolverSettings {
    pub fn new(t_end: f64) -> Self {
        Self {
            t_end,
            eta: 0.1,
            dt_max: f64::INFINITY,
            blowup_sup_threshold: 1e8,
            dt_min: 1e-12,
            output_times: Vec::new(),
            scheme: Scheme::Plain,
            barrier: None,
            comparison: false,
            clip_tolerance: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(domain!("t_end must be positive and finite"));
        }
        if !(self.eta > 0.0) || !(self.dt_max > 0.0) || !(self.dt_min > 0.0) {
            return Err(domain!("eta, dt_max and dt_min must be positive"));
        }
        if !(self.blowup_sup_threshold > 0.0) {
            return Err(domain!("blowup threshold must be positive"));
        }
        if self.output_times.iter().any(|t| !(*t > 0.0)) {
            return Err(domain!("output times must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowupSignal {
    ReactionPole,
    SupThreshold,
    StepCollapse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Global { horizon: f64 },
    Blowup { t_star: f64, signal: BlowupSignal },
    NumericalFailure { step: usize, reason: String },
}

impl RunStatus {
    pub fn is_global(&self) -> bool {
        matches!(self, RunStatus::Global { .. })
    }

    pub fn is_blowup(&self) -> bool {
        matches!(self, RunStatus::Blowup { .. })
    }
}

/// Largest monitored violations, relative to the barrier or to `U`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MonitorMaxima {
    pub barrier_violation: f64,
    pub sandwich_violation_lower: f64,
    pub sandwich_violation_upper: f64,
    /// Largest `−min(u)/sup(u)` after a diffusion substep.
    pub negative_ringing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub times: Vec<f64>,
    pub sup_norm: Vec<f64>,
    pub l2_norm: Vec<f64>,
    pub mass: Vec<f64>,
    pub min_value: Vec<f64>,
    /// Last step taken before each output (0 at `t = 0`).
    pub dt: Vec<f64>,
    pub status: RunStatus,
    pub monitor_maxima: MonitorMaxima,
    /// Barrier violation at each output time, when a barrier is watched.
    pub barrier_violation: Vec<f64>,
    pub steps: usize,
}

impl RunRecord {
    fn new() -> Self {
        Self {
            times: Vec::new(),
            sup_norm: Vec::new(),
            l2_norm: Vec::new(),
            mass: Vec::new(),
            min_value: Vec::new(),
            dt: Vec::new(),
            status: RunStatus::Global { horizon: 0.0 },
            monitor_maxima: MonitorMaxima::default(),
            barrier_violation: Vec::new(),
            steps: 0,
        }
    }

    fn push(&mut self, t: f64, dt: f64, u: &Field) -> Result<()> {
        self.times.push(t);
        self.sup_norm.push(u.sup_norm());
        self.l2_norm.push(u.lq_norm(2.0)?);
        self.mass.push(u.mass());
        self.min_value.push(u.min_value());
        self.dt.push(dt);
        Ok(())
    }
}

struct Comparison {
    hardy: HardyPropagator,
    linear: Vec<f64>,
}

/// Evolves `u0`; `observe` sees the state at every recorded time.
pub fn evolve_with<F>(
    u0: &Field,
    params: &ModelParams,
    spectral: &Spectral,
    settings: &SolverSettings,
    mut observe: F,
) -> Result<RunRecord>
where
    F: FnMut(f64, &Field) -> Result<()>,
{
    settings.validate()?;
    params.validate()?;
    let grid = *spectral.grid();
    if u0.grid() != &grid {
        return Err(domain!("datum and transform were built for different grids"));
    }
    if u0.min_value() < 0.0 {
        return Err(domain!("initial datum must be nonnegative"));
    }
    let p = params.p;
    let q = p - 1.0;
    let heat = HeatSemigroup::new(spectral.clone(), params.alpha)?;

    let needs_u_inf = settings.scheme == Scheme::WellBalanced || settings.comparison;
    let u_inf = if needs_u_inf { Some(singular_profile(&grid, params)?) } else { None };
    let barrier = match &settings.barrier {
        Some(b) => Some(b.sample(spectral, params)?),
        None => None,
    };
    let mut comparison = if settings.comparison {
        let spec = HardyOperatorSpec::new(params.alpha, params.d, params.linearized_coupling()?)?;
        let u_inf = u_inf.as_ref().unwrap();
        let linear = u_inf.iter().zip(u0.values()).map(|(a, b)| a - b).collect();
        Some(Comparison { hardy: HardyPropagator::new(&spec, spectral.clone())?, linear })
    } else {
        None
    };
    // rate factor U^{p−1} for the balanced reaction
    let balanced_rate: Option<Vec<f64>> = match settings.scheme {
        Scheme::WellBalanced => Some(u_inf.as_ref().unwrap().iter().map(|v| libm::pow(*v, q)).collect()),
        Scheme::Plain => None,
    };

    let mut outputs: Vec<f64> = settings.output_times.iter().copied().filter(|t| *t < settings.t_end).collect();
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();
    outputs.push(settings.t_end);

    let mut record = RunRecord::new();
    let mut values = u0.values().to_vec();
    let mut t = 0.0;
    let mut step = 0usize;
    let mut next = 0usize;

    let mut observe_now = |t: f64,
                           dt: f64,
                           values: &[f64],
                           record: &mut RunRecord,
                           comparison: &Option<Comparison>|
     -> Result<()> {
        let u = Field::new(grid, values.to_vec())?;
        record.push(t, dt, &u)?;
        if let Some(b) = &barrier {
            let v = barrier_monitor(&u, b);
            record.barrier_violation.push(v);
            let m = &mut record.monitor_maxima;
            m.barrier_violation = m.barrier_violation.max(v);
        }
        if let (Some(c), Some(ui)) = (comparison, &u_inf) {
            let m = &mut record.monitor_maxima;
            for ((u, a), l) in values.iter().zip(ui).zip(&c.linear) {
                m.sandwich_violation_lower = m.sandwich_violation_lower.max((u - a).max(0.0) / a);
                m.sandwich_violation_upper = m.sandwich_violation_upper.max((a - u - l).max(0.0) / a);
            }
        }
        observe(t, &u)
    };

    observe_now(0.0, 0.0, &values, &mut record, &comparison)?;

    let status = loop {
        if next >= outputs.len() {
            break RunStatus::Global { horizon: settings.t_end };
        }
        let target = outputs[next];
        let sup = values.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
        let mut dt = settings.dt_max;
        if sup > 0.0 {
            dt = dt.min(settings.eta / (q * libm::pow(sup, q)));
        }
        let landing = t + dt >= target * (1.0 - 1e-14);
        if landing {
            dt = target - t;
        }
        if !landing && dt < settings.dt_min {
            break RunStatus::Blowup { t_star: t + 0.5 * dt, signal: BlowupSignal::StepCollapse };
        }
        if !(dt > 0.0) {
            t = target;
            next += 1;
            continue;
        }

        let stepped = match &balanced_rate {
            None => {
                let mut pole = half_reaction(&mut values, dt, p);
                if !pole {
                    match heat.apply_values(&values, dt) {
                        Ok(v) if v.iter().all(|x| x.is_finite()) => {
                            values = v;
                            clip(&mut values, settings.clip_tolerance, &mut record.monitor_maxima);
                            pole = half_reaction(&mut values, dt, p);
                            Ok(pole)
                        }
                        Ok(_) => Err(Error::NonFinite { step, reason: "diffusion substep".into() }),
                        Err(e) => Err(e),
                    }
                } else {
                    Ok(pole)
                }
            }
            Some(rate) => {
                let ui = u_inf.as_ref().unwrap();
                balanced_half(&mut values, ui, rate, dt, p);
                let w: Vec<f64> = ui.iter().zip(&values).map(|(a, u)| a - u).collect();
                heat.apply_values(&w, dt).and_then(|w| {
                    if w.iter().any(|x| !x.is_finite()) {
                        return Err(Error::NonFinite { step, reason: "diffusion substep".into() });
                    }
                    for ((v, a), w) in values.iter_mut().zip(ui).zip(&w) {
                        *v = a - w;
                    }
                    clip(&mut values, settings.clip_tolerance, &mut record.monitor_maxima);
                    balanced_half(&mut values, ui, rate, dt, p);
                    Ok(false)
                })
            }
        };
        step += 1;
        let pole = match stepped {
            Ok(pole) => pole,
            Err(Error::NonFinite { reason, .. }) => {
                break RunStatus::NumericalFailure { step, reason: alloc::format!("{reason} produced a non-finite value at t = {t}") };
            }
            Err(e) => return Err(e),
        };
        if pole {
            break RunStatus::Blowup { t_star: t + 0.5 * dt, signal: BlowupSignal::ReactionPole };
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            break RunStatus::NumericalFailure {
                step,
                reason: alloc::format!("non-finite value at index {i}, t = {t}"),
            };
        }
        if let Some(c) = comparison.as_mut() {
            c.hardy.step_values(&mut c.linear, dt)?;
        }
        let new_sup = values.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
        if new_sup > settings.blowup_sup_threshold {
            break RunStatus::Blowup { t_star: t + 0.5 * dt, signal: BlowupSignal::SupThreshold };
        }
        t = if landing { target } else { t + dt };
        if landing {
            next += 1;
            observe_now(t, dt, &values, &mut record, &comparison)?;
        }
    };
    record.status = status;
    record.steps = step;
    Ok(record)
}

/// Evolves `u0` and records norms and monitors.
pub fn evolve(u0: &Field, params: &ModelParams, spectral: &Spectral, settings: &SolverSettings) -> Result<RunRecord> {
    evolve_with(u0, params, spectral, settings, |_, _| Ok(()))
}

fn half_reaction(values: &mut [f64], dt: f64, p: f64) -> bool {
    for v in values.iter_mut() {
        match reaction_signed(*v, 0.5 * dt, p) {
            Some(x) => *v = x,
            None => return true,
        }
    }
    false
}

fn balanced_half(values: &mut [f64], u_inf: &[f64], rate: &[f64], dt: f64, p: f64) {
    for ((v, a), r) in values.iter_mut().zip(u_inf).zip(rate) {
        *v = a * balanced_reaction(*v / a, r * 0.5 * dt, p);
    }
}

fn clip(values: &mut [f64], tol: f64, monitors: &mut MonitorMaxima) {
    let sup = values.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
    if sup == 0.0 {
        return;
    }
    for v in values.iter_mut() {
        if *v < 0.0 {
            monitors.negative_ringing = monitors.negative_ringing.max(-*v / sup);
            if -*v <= tol * sup {
                *v = 0.0;
            }
        }
    }
}

/// `max_t t^{1/(p−1)}·‖e^{−t(−Δ)^{α/2}}u0‖_∞` over `t = horizon·2^{−k/m}`,
/// `k = 0..=octaves·m`. Returns `(value, argmax t)`.
pub fn blowup_certificate(
    u0: &Field,
    params: &ModelParams,
    spectral: &Spectral,
    horizon: f64,
    octaves: u32,
    per_octave: u32,
) -> Result<(f64, f64)> {
    let (p_fujita, _) = crate::constants::critical_exponents(params.d, params.alpha);
    if !(params.p > p_fujita) {
        return Err(domain!("blowup certificate needs p > 1 + alpha/d = {p_fujita}"));
    }
    if !(horizon > 0.0) || per_octave == 0 {
        return Err(domain!("certificate needs a positive horizon and per_octave >= 1"));
    }
    let heat = HeatSemigroup::new(spectral.clone(), params.alpha)?;
    let spec = heat.spectral().forward(u0.values());
    let e = 1.0 / (params.p - 1.0);
    let mut best = (0.0, horizon);
    for k in 0..=octaves * per_octave {
        let t = horizon * libm::exp2(-f64::from(k) / f64::from(per_octave));
        let mult = heat.multiplier(t);
        let data = spec.iter().zip(&mult).map(|(c, m)| *c * *m).collect();
        let v = heat.spectral().inverse_real(data);
        let sup = v.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x)));
        let val = libm::pow(t, e) * sup;
        if !val.is_finite() {
            return Err(Error::NonFinite { step: k as usize, reason: "certificate".into() });
        }
        if val > best.0 {
            best = (val, t);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use crate::test_support::backend;
    use proptest::prelude::*;

    fn setup(n: usize, l: f64) -> (Grid, Spectral, ModelParams) {
        let g = Grid::new(1, n, l).unwrap();
        (g, Spectral::new(g, &backend()), ModelParams::new(0.5, 1, 3.0).unwrap())
    }

    fn gaussian(g: Grid, a: f64, w: f64) -> Field {
        Field::from_fn(g, |x| a * libm::exp(-x[0] * x[0] / (w * w))).unwrap()
    }

    #[test]
    fn reaction_examples() {
        assert_eq!(reaction_exact(0.0, 5.0, 3.0).unwrap(), Some(0.0));
        assert_eq!(reaction_exact(1.0, 0.5, 2.0).unwrap(), Some(2.0));
        assert_eq!(reaction_exact(1.0, 1.0, 2.0).unwrap(), None);
        assert!(reaction_exact(-1.0, 0.1, 2.0).is_err());
        assert!(reaction_exact(1.0, 0.0, 2.0).is_err());
    }

    proptest! {
        #[test]
        fn reaction_composes(u in 0.0f64..3.0, a in 1e-3f64..0.05, b in 1e-3f64..0.05, p in 1.2f64..4.0) {
            let once = reaction_exact(u, a + b, p).unwrap();
            let twice = reaction_exact(u, a, p).unwrap().and_then(|v| reaction_exact(v, b, p).unwrap());
            match (once, twice) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0)),
                (None, None) => {}
                (x, y) => prop_assert!(false, "{x:?} {y:?}"),
            }
        }

        #[test]
        fn balanced_reaction_matches_p2_closed_form(z in 0.0f64..1.0, rate in 0.0f64..0.2) {
            let closed = balanced_reaction(z, rate, 2.0);
            let rk = balanced_reaction(z, rate, 2.0 + 1e-15);
            prop_assert!((closed - rk).abs() < 1e-9);
        }
    }

    #[test]
    fn balanced_reaction_fixes_one_and_orders() {
        assert!((balanced_reaction(1.0, 0.3, 3.0) - 1.0).abs() < 1e-15);
        assert!(balanced_reaction(0.5, 0.3, 3.0) < 0.5);
        assert!(balanced_reaction(0.4, 0.3, 3.0) < balanced_reaction(0.5, 0.3, 3.0));
    }

    #[test]
    fn zero_datum_stays_zero() {
        let (g, s, p) = setup(256, 32.0);
        let rec = evolve(&Field::zeros(g), &p, &s, &SolverSettings { dt_max: 0.5, ..SolverSettings::new(10.0) }).unwrap();
        assert!(rec.status.is_global());
        assert!(rec.sup_norm.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn overflow_is_a_numerical_failure() {
        let (g, s, _) = setup(1024, 32.0);
        let p = ModelParams::new(0.5, 1, 1.0001).unwrap();
        let rec = evolve(&gaussian(g, 1e306, 30.0), &p, &s, &SolverSettings::new(1.0)).unwrap();
        assert!(matches!(rec.status, RunStatus::NumericalFailure { step: 1, .. }), "{:?}", rec.status);
    }

    #[test]
    fn large_gaussian_blows_up() {
        let (g, s, p) = setup(1024, 64.0);
        let rec = evolve(&gaussian(g, 100.0, 1.0), &p, &s, &SolverSettings::new(10.0)).unwrap();
        match rec.status {
            RunStatus::Blowup { t_star, .. } => {
                assert!(t_star.is_finite() && t_star > 0.0);
                assert!(t_star > *rec.times.last().unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn times_increase_and_norms_are_finite() {
        let (g, s, p) = setup(512, 64.0);
        let settings = SolverSettings {
            output_times: crate::analysis::dyadic_times(0.1, 2, 20.0),
            dt_max: 0.2,
            ..SolverSettings::new(20.0)
        };
        let rec = evolve(&gaussian(g, 0.3, 1.0), &p, &s, &settings).unwrap();
        assert!(rec.status.is_global());
        assert!(rec.times.windows(2).all(|w| w[1] > w[0]));
        assert!(rec.sup_norm.iter().chain(&rec.l2_norm).all(|v| v.is_finite()));
        assert_eq!(*rec.times.last().unwrap(), 20.0);
    }

    #[test]
    fn order_is_preserved_with_fixed_steps() {
        let (g, s, p) = setup(512, 64.0);
        let settings = SolverSettings { dt_max: 0.05, eta: 1e9, ..SolverSettings::new(5.0) };
        let mut small = Vec::new();
        evolve_with(&gaussian(g, 0.5, 1.0), &p, &s, &settings, |_, u| {
            small.push(u.values().to_vec());
            Ok(())
        })
        .unwrap();
        let mut k = 0;
        evolve_with(&gaussian(g, 0.6, 1.2), &p, &s, &settings, |_, u| {
            let sup = u.sup_norm();
            for (a, b) in small[k].iter().zip(u.values()) {
                assert!(*a <= b + 1e-10 * sup);
            }
            k += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(k, small.len());
    }

    #[test]
    fn halving_eta_barely_moves_the_sup_norm() {
        let (g, s, p) = setup(512, 64.0);
        let base = SolverSettings {
            output_times: crate::analysis::dyadic_times(0.5, 1, 16.0),
            eta: 0.1,
            dt_max: 0.1,
            ..SolverSettings::new(16.0)
        };
        let u0 = gaussian(g, 0.8, 1.0);
        let a = evolve(&u0, &p, &s, &base).unwrap();
        let b = evolve(&u0, &p, &s, &SolverSettings { eta: 0.05, ..base.clone() }).unwrap();
        for ((x, y), t) in a.sup_norm.iter().zip(&b.sup_norm).zip(&a.times) {
            assert!((x - y).abs() < 1e-3 * x, "{t} {x} {y}");
        }
    }

    #[test]
    fn barrier_monitor_cases() {
        let (g, s, p) = setup(256, 32.0);
        let b = Barrier::Singular.sample(&s, &p).unwrap();
        let u = Field::new(g, b.clone()).unwrap();
        assert_eq!(barrier_monitor(&u, &b), 0.0);
        assert!((barrier_monitor(&u.scaled(2.0), &b) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn well_balanced_keeps_the_singular_state() {
        let (g, s, p) = setup(1024, 64.0);
        let u0 = Field::new(g, singular_profile(&g, &p).unwrap()).unwrap();
        let settings = SolverSettings {
            scheme: Scheme::WellBalanced,
            barrier: Some(Barrier::Singular),
            comparison: true,
            dt_max: 0.1,
            ..SolverSettings::new(2.0)
        };
        let rec = evolve(&u0, &p, &s, &settings).unwrap();
        let m = rec.monitor_maxima;
        assert!(m.barrier_violation < 1e-12, "{m:?}");
        assert!(m.sandwich_violation_lower < 1e-12 && m.sandwich_violation_upper < 1e-12, "{m:?}");
    }

    #[test]
    fn certificate_is_linear_and_small_for_short_horizons() {
        let (g, s, p) = setup(1024, 64.0);
        let u0 = gaussian(g, 1.0, 1.0);
        let (a, ta) = blowup_certificate(&u0, &p, &s, 100.0, 30, 2).unwrap();
        let (b, tb) = blowup_certificate(&u0.scaled(3.0), &p, &s, 100.0, 30, 2).unwrap();
        assert_eq!(ta, tb);
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
        let (c, _) = blowup_certificate(&u0, &p, &s, 1e-8, 4, 1).unwrap();
        assert!(c < 1e-3);
        let sub = ModelParams::new(0.5, 1, 1.2).unwrap();
        assert!(blowup_certificate(&u0, &sub, &s, 1.0, 4, 1).is_err());
    }
}
