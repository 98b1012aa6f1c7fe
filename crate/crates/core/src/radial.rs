//! Quadrature for the integral fractional Laplacian of radial profiles.
//!
//! For a radial `f` in `ℝ^d`, `d ≥ 2`, the operator is written in polar
//! coordinates around the evaluation point `x` with `|x| = r`:
//!
//! ```text
//! (−Δ)^{α/2} f(r) = −A(d,α) ∫₀^∞ s^{−1−α} |S^{d−2}| ∫₀^π [f(ρ) − f(r)] sin^{d−2}θ dθ ds,
//! ρ² = r² + s² − 2rs cos θ.
//! ```
//!
//! The angular mean removes the principal value: the inner integral is
//! `O(s²)` as `s → 0`. The sign convention is the usual one, so the result is
//! nonnegative at a global maximum of `f`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::constants::{frac_lap_constant, singular_amplitude, sphere_area, ModelParams};
use crate::error::{domain, Error, Result};
use crate::quadrature::GaussLegendre;

/// A radial function sampled on increasing radii.
///
/// Below the first node the value is held constant; beyond the last node the
/// profile decays like `r^{−tail_exponent}`. Between nodes it is interpolated
/// by a monotone cubic in `(ln r, ln f)` when every value is positive and
/// linearly in `r` otherwise.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
    d: u32,
    tail_exponent: f64,
    log_r: Vec<f64>,
    log_v: Option<Vec<f64>>,
    slopes: Vec<f64>,
}

impl RadialProfile {
    pub fn new(radii: Vec<f64>, values: Vec<f64>, d: u32, tail_exponent: f64) -> Result<Self> {
        if d < 2 {
            return Err(domain!("radial profiles need d >= 2, got {d}"));
        }
        if radii.len() < 2 || radii.len() != values.len() {
            return Err(domain!("radii and values must have equal length >= 2"));
        }
        if !(radii[0] > 0.0) || radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain!("radii must be positive and strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) || !tail_exponent.is_finite() {
            return Err(domain!("profile values and tail exponent must be finite"));
        }
        let log_r: Vec<f64> = radii.iter().map(|&r| libm::log(r)).collect();
        let log_v = if values.iter().all(|&v| v > 0.0) {
            Some(values.iter().map(|&v| libm::log(v)).collect::<Vec<_>>())
        } else {
            None
        };
        let slopes = match &log_v {
            Some(lv) => pchip_slopes(&log_r, lv),
            None => Vec::new(),
        };
        Ok(Self { radii, values, d, tail_exponent, log_r, log_v, slopes })
    }

    /// Samples `f` at `n` logarithmically spaced radii in `[r_min, r_max]`.
    pub fn from_fn<F: Fn(f64) -> f64>(
        d: u32,
        r_min: f64,
        r_max: f64,
        n: usize,
        tail_exponent: f64,
        f: F,
    ) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min) || n < 2 {
            return Err(domain!("need 0 < r_min < r_max and n >= 2"));
        }
        let step = libm::log(r_max / r_min) / (n - 1) as f64;
        let radii: Vec<f64> = (0..n).map(|i| r_min * libm::exp(step * i as f64)).collect();
        let values = radii.iter().map(|&r| f(r)).collect();
        Self::new(radii, values, d, tail_exponent)
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Radii at least one decade away from both ends of the grid.
    pub fn resolved_range(&self) -> (f64, f64) {
        (self.radii[0] * 10.0, self.radii[self.radii.len() - 1] / 10.0)
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n = self.radii.len();
        if r <= self.radii[0] {
            return self.values[0];
        }
        let last = self.radii[n - 1];
        if r >= last {
            return self.values[n - 1] * libm::pow(r / last, -self.tail_exponent);
        }
        let i = self.radii.partition_point(|&x| x <= r) - 1;
        match &self.log_v {
            Some(lv) => {
                let x = libm::log(r);
                let h = self.log_r[i + 1] - self.log_r[i];
                let t = (x - self.log_r[i]) / h;
                let t2 = t * t;
                let t3 = t2 * t;
                let dy = (-2.0 * t3 + 3.0 * t2) * (lv[i + 1] - lv[i])
                    + (t3 - 2.0 * t2 + t) * h * self.slopes[i]
                    + (t3 - t2) * h * self.slopes[i + 1];
                self.values[i] * libm::exp(dy)
            }
            None => {
                let t = (r - self.radii[i]) / (self.radii[i + 1] - self.radii[i]);
                self.values[i] + t * (self.values[i + 1] - self.values[i])
            }
        }
    }
}

/// Fritsch–Carlson derivative estimates for monotone cubic interpolation.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = alloc::vec![0.0; n];
    if n == 2 {
        m[0] = delta[0];
        m[1] = delta[0];
        return m;
    }
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && libm::fabs(m) > libm::fabs(3.0 * d0) {
        3.0 * d0
    } else {
        m
    }
}

/// Discretisation parameters of [`frac_lap_radial_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRule {
    /// Gauss–Legendre nodes of the angular integral.
    pub angular_nodes: usize,
    /// Gauss–Legendre nodes per radial panel.
    pub panel_points: usize,
    /// Number of geometrically shrinking panels on each side of `s = r`.
    pub grading_levels: usize,
    /// Lower end of the radial integral relative to `r`.
    pub s_min_factor: f64,
    /// Upper end of the panel region relative to `r`; an analytic power tail follows.
    pub s_max_factor: f64,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self {
            angular_nodes: 64,
            panel_points: 32,
            grading_levels: 24,
            s_min_factor: 1e-6,
            s_max_factor: 1e6,
        }
    }
}

impl QuadratureRule {
    /// The same rule with twice as many angular and radial nodes.
    pub fn doubled(&self) -> Self {
        Self {
            angular_nodes: 2 * self.angular_nodes,
            panel_points: 2 * self.panel_points,
            ..*self
        }
    }
}

/// Exponent of the angular substitution `θ = π v^m`, which clusters nodes
/// near `θ = 0` where the integrand peaks when `s ≈ r`.
const ANGULAR_POWER: i32 = 4;

struct AngularRule {
    theta: Vec<f64>,
    weight: Vec<f64>,
}

impl AngularRule {
    fn new(n: usize, d: u32) -> Result<Self> {
        let gl = GaussLegendre::new(n);
        let m = f64::from(ANGULAR_POWER);
        let area = sphere_area(d - 1)?;
        let mut theta = Vec::with_capacity(n);
        let mut weight = Vec::with_capacity(n);
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let v = 0.5 * (x + 1.0);
            let th = PI * libm::pow(v, m);
            let jac = PI * m * libm::pow(v, m - 1.0) * 0.5;
            theta.push(th);
            weight.push(area * w * jac * libm::pow(libm::sin(th), f64::from(d) - 2.0));
        }
        Ok(Self { theta, weight })
    }

    fn mean_excess(&self, profile: &RadialProfile, r: f64, s: f64, fr: f64) -> f64 {
        let mut acc = 0.0;
        for (th, w) in self.theta.iter().zip(&self.weight) {
            let half = libm::sin(0.5 * th);
            let rho = libm::sqrt((r - s) * (r - s) + 4.0 * r * s * half * half);
            acc += w * (profile.eval(rho) - fr);
        }
        acc
    }
}

fn radial_panels(r: f64, s_end: f64, rule: &QuadratureRule) -> Vec<(f64, f64)> {
    let mut cuts = Vec::new();
    let mut s = r * rule.s_min_factor;
    while s < 0.5 * r {
        cuts.push(s);
        s *= 2.0;
    }
    cuts.push(0.5 * r);
    for j in 2..=rule.grading_levels {
        cuts.push(r * (1.0 - libm::ldexp(1.0, -(j as i32))));
    }
    let mut right = Vec::new();
    for j in (2..=rule.grading_levels).rev() {
        right.push(r * (1.0 + libm::ldexp(1.0, -(j as i32))));
    }
    let mut s = 1.5 * r;
    right.push(s);
    while s < s_end {
        s *= 2.0;
        right.push(s);
    }
    let mut out = Vec::with_capacity(cuts.len() + right.len() + 1);
    let mut all = cuts;
    all.push(r);
    all.extend(right);
    for w in all.windows(2) {
        out.push((w[0], w[1]));
    }
    out
}

/// `(−Δ)^{α/2} f` at radius `r_eval` with the default [`QuadratureRule`].
pub fn frac_lap_radial(profile: &RadialProfile, alpha: f64, r_eval: f64) -> Result<f64> {
    frac_lap_radial_with(profile, alpha, r_eval, &QuadratureRule::default())
}

/// `(−Δ)^{α/2} f` at radius `r_eval` with an explicit quadrature rule.
pub fn frac_lap_radial_with(
    profile: &RadialProfile,
    alpha: f64,
    r_eval: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(domain!("alpha must lie in (0,2), got {alpha}"));
    }
    let (lo, hi) = profile.resolved_range();
    if !(r_eval >= lo * (1.0 - 1e-12) && r_eval <= hi * (1.0 + 1e-12)) {
        return Err(Error::Range(alloc::format!(
            "r = {r_eval} outside the resolved annulus [{lo}, {hi}]"
        )));
    }
    let d = profile.dim();
    let a_const = frac_lap_constant(d, alpha)?;
    let angular = AngularRule::new(rule.angular_nodes, d)?;
    let radial = GaussLegendre::new(rule.panel_points);
    let r_last = profile.radii[profile.radii.len() - 1];
    let s_end = (r_eval * rule.s_max_factor).max(2.0 * (r_last + r_eval));
    let fr = profile.eval(r_eval);

    let mut integral = 0.0;
    let mut s_top = 0.0;
    for (a, b) in radial_panels(r_eval, s_end, rule) {
        integral += radial.integrate(a, b, |s| {
            libm::pow(s, -1.0 - alpha) * angular.mean_excess(profile, r_eval, s, fr)
        });
        s_top = b;
    }
    // Beyond s_top the sphere of radius s lies in the power-law tail and the
    // angular mean of f is f(s) up to O((r/s)²).
    let area = sphere_area(d)?;
    let tau = profile.tail_exponent;
    let v_last = profile.values[profile.values.len() - 1];
    let tail_f = v_last * libm::pow(r_last, tau) * libm::pow(s_top, -alpha - tau) / (alpha + tau);
    integral += area * (tail_f - fr * libm::pow(s_top, -alpha) / alpha);
    Ok(-a_const * integral)
}

/// Relative residual of the steady equation `(−Δ)^{α/2}u = u^p` along a radius sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyResidual {
    pub max_relative_residual: f64,
    /// `(r, |(−Δ)^{α/2}u(r) − u(r)^p| / u(r)^p)`.
    pub per_point: Vec<(f64, f64)>,
}

/// Options for [`steady_residual_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyCheck {
    /// Multiplier applied to the exact amplitude `s` (1 for `u_∞` itself).
    pub amplitude_factor: f64,
    /// Number of profile nodes.
    pub profile_nodes: usize,
    /// Decades added below `r_min` and above `r_max` when building the profile.
    pub margin_decades: f64,
    pub rule: QuadratureRule,
}

impl Default for SteadyCheck {
    fn default() -> Self {
        Self {
            amplitude_factor: 1.0,
            profile_nodes: 2048,
            margin_decades: 3.0,
            rule: QuadratureRule::default(),
        }
    }
}

/// Residual of `u_∞ = s r^{−α/(p−1)}` on `n_points` log-spaced radii in `[r_min, r_max]`.
pub fn steady_residual(
    params: &ModelParams,
    r_min: f64,
    r_max: f64,
    n_points: usize,
) -> Result<SteadyResidual> {
    steady_residual_with(params, r_min, r_max, n_points, &SteadyCheck::default())
}

pub fn steady_residual_with(
    params: &ModelParams,
    r_min: f64,
    r_max: f64,
    n_points: usize,
    check: &SteadyCheck,
) -> Result<SteadyResidual> {
    if params.d < 2 {
        return Err(domain!("radial steady check needs d >= 2"));
    }
    if !(r_min > 0.0 && r_max >= r_min) || n_points == 0 {
        return Err(domain!("need 0 < r_min <= r_max and n_points >= 1"));
    }
    let s = singular_amplitude(params)?;
    let gamma = params.steady_exponent();
    let amp = s * check.amplitude_factor;
    let scale = libm::pow(10.0, check.margin_decades);
    let profile = RadialProfile::from_fn(
        params.d,
        r_min / scale,
        r_max * scale,
        check.profile_nodes,
        gamma,
        |r| amp * libm::pow(r, -gamma),
    )?;
    let mut per_point = Vec::with_capacity(n_points);
    let mut worst: f64 = 0.0;
    for i in 0..n_points {
        let r = if n_points == 1 {
            r_min
        } else {
            r_min * libm::pow(r_max / r_min, i as f64 / (n_points - 1) as f64)
        };
        let lap = frac_lap_radial_with(&profile, params.alpha, r, &check.rule)?;
        let up = libm::pow(amp * libm::pow(r, -gamma), params.p);
        let res = libm::fabs(lap - up) / up;
        worst = worst.max(res);
        per_point.push((r, res));
    }
    Ok(SteadyResidual { max_relative_residual: worst, per_point })
}
