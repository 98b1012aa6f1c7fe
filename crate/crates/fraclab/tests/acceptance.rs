//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p fraclab --test acceptance`; pass criterion numbers
//! after `--` to run a subset, e.g. `-- 1 2 11`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use fraclab::RustFft;
use fraclab_core::analysis::{
    classify_threshold, dyadic_times, fit_power_law, last_decade, Envelope, Outcome, ThresholdState,
};
use fraclab_core::constants::{
    hardy_bound, hardy_constant, jl_condition, power_map_coeff, singular_amplitude, singular_morrey_norm,
    solve_sigma, ModelParams,
};
use fraclab_core::field::{sample, Field, Grid, InitialDatum, InitialDatumSpec, Spectral, WeightSpec};
use fraclab_core::linear::{
    hardy_evolve_with, hypercontractivity_exponent, hypercontractivity_measure, kernel_ratio_probe,
    HardyOperatorSpec, StepRule,
};
use fraclab_core::morrey::{morrey_norm, morrey_smoothing_probe, smoothing_exponent, MorreyQuery};
use fraclab_core::nonlinear::{blowup_certificate, evolve, Barrier, RunStatus, Scheme, SolverSettings};
use fraclab_core::quadrature::golden_section_max;
use fraclab_core::radial::{frac_lap_radial, steady_residual, steady_residual_with, QuadratureRule, RadialProfile, SteadyCheck};
use fraclab_core::Result;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Default)]
struct Report {
    lines: Vec<String>,
    failed: bool,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.lines.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
        self.failed |= !ok;
    }

    fn info(&mut self, what: impl Into<String>) {
        self.lines.push(format!("info {}", what.into()));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn spectral(d: u32, n: usize, l: f64) -> Result<Spectral> {
    Ok(Spectral::new(Grid::new(d, n, l)?, &RustFft::new()))
}

fn canonical() -> ModelParams {
    ModelParams { alpha: 0.5, d: 1, p: 3.0 }
}

fn random_regime(rng: &mut StdRng) -> ModelParams {
    loop {
        let alpha = rng.gen_range(0.05..1.95);
        let d = rng.gen_range(1..=8u32);
        if f64::from(d) <= alpha {
            continue;
        }
        let p_sg = 1.0 + alpha / (f64::from(d) - alpha);
        let p = p_sg + rng.gen_range(0.01..6.0);
        return ModelParams { alpha, d, p };
    }
}

fn criterion_1(r: &mut Report) -> Result<()> {
    let eps = 1e-6;
    let s_at = |alpha: f64| singular_amplitude(&ModelParams { alpha, d: 5, p: 2.0 });
    let raw = s_at(2.0 - eps)?;
    let extrapolated = 2.0 * s_at(2.0 - 0.5 * eps)? - raw;
    r.check((extrapolated - 2.0).abs() < 1e-6, format!("s(2-,5,2) = {extrapolated:.12} (raw at 2-1e-6: {raw:.12})"));

    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = [0.0f64; 3];
    for _ in 0..100 {
        let pr = random_regime(&mut rng);
        let s = singular_amplitude(&pr)?;
        worst[0] = worst[0].max(rel(s.powf(pr.p - 1.0), power_map_coeff(pr.steady_exponent(), pr.d, pr.alpha)?));
        let span = f64::from(pr.d) - pr.alpha;
        let sigma = rng.gen_range(0.01..0.99) * span;
        worst[1] = worst[1].max(rel(power_map_coeff(sigma, pr.d, pr.alpha)?, power_map_coeff(span - sigma, pr.d, pr.alpha)?));
        let c_max = power_map_coeff(0.5 * span, pr.d, pr.alpha)?;
        worst[2] = worst[2].max(rel(c_max * hardy_constant(pr.d, pr.alpha)?, (2.0 * PI).powf(pr.alpha)));
    }
    r.check(worst[0] < 1e-12, format!("s^(p-1) = C(alpha/(p-1)) on 100 triples, worst rel {:.2e}", worst[0]));
    r.check(worst[1] < 1e-12, format!("C(sigma) = C(d-alpha-sigma), worst rel {:.2e}", worst[1]));
    r.check(worst[2] < 1e-12, format!("C((d-alpha)/2) c_alpha = (2pi)^alpha, worst rel {:.2e}", worst[2]));

    let mut worst_ratio = 0.0f64;
    let mut all_false = true;
    for (d, alpha) in [(1, 0.5), (2, 1.0), (3, 1.0), (3, 1.7), (5, 0.3), (8, 1.9)] {
        let p = (f64::from(d) + alpha) / (f64::from(d) - alpha);
        let (ok, ratio) = jl_condition(&ModelParams { alpha, d, p })?;
        all_false &= !ok;
        worst_ratio = worst_ratio.max((ratio - p).abs());
    }
    r.check(all_false && worst_ratio < 1e-10, format!("p = (d+alpha)/(d-alpha): JL false, |ratio - p| <= {worst_ratio:.2e}"));
    Ok(())
}

fn criterion_2(r: &mut Report) -> Result<()> {
    let mut rng = StdRng::seed_from_u64(2);
    let (mut found, mut tries) = (0, 0);
    let (mut worst_res, mut inside) = (0.0f64, true);
    while found < 50 && tries < 100_000 {
        tries += 1;
        let pr = random_regime(&mut rng);
        let p_low = (pr.dim() + pr.alpha) / (pr.dim() - pr.alpha);
        if !(pr.p > p_low) || !jl_condition(&pr)?.0 {
            continue;
        }
        found += 1;
        let kappa = pr.linearized_coupling()?;
        let sigma = solve_sigma(kappa, pr.d, pr.alpha)?;
        worst_res = worst_res.max((power_map_coeff(sigma, pr.d, pr.alpha)? - kappa).abs());
        inside &= sigma > pr.steady_exponent() && sigma <= 0.5 * (pr.dim() - pr.alpha);
    }
    r.check(found == 50, format!("{found} admissible triples from {tries} draws"));
    r.check(worst_res < 1e-12, format!("max |C(sigma) - kappa| = {worst_res:.2e}"));
    r.check(inside, "sigma in (alpha/(p-1), (d-alpha)/2] for every triple");
    Ok(())
}

fn criterion_3(r: &mut Report) -> Result<()> {
    let mut worst = 0.0f64;
    for (d, alpha, gamma) in [(3, 1.0, 0.5), (2, 0.5, 0.5), (3, 1.5, 0.7), (4, 0.8, 1.2)] {
        let profile = RadialProfile::from_fn(d, 1e-5, 1e5, 2048, gamma, |x| x.powf(-gamma))?;
        let c = power_map_coeff(gamma, d, alpha)?;
        for x in [0.5, 1.0, 2.0] {
            worst = worst.max(rel(frac_lap_radial(&profile, alpha, x)?, c * x.powf(-gamma - alpha)));
        }
    }
    r.check(worst < 5e-3, format!("power profiles reproduce C(gamma) r^(-gamma-alpha), worst rel {worst:.2e}"));
    for (alpha, d, p) in [(1.0, 3, 2.0), (0.5, 2, 3.0), (1.5, 3, 4.0)] {
        let pr = ModelParams::new(alpha, d, p)?;
        let res = steady_residual(&pr, 0.5, 2.0, 9)?.max_relative_residual;
        r.check(res < 0.02, format!("u_inf residual on [0.5,2] for (alpha={alpha}, d={d}, p={p}): {res:.2e}"));
    }
    for (alpha, d, p) in [(1.0, 3, 2.0), (0.5, 2, 3.0)] {
        let pr = ModelParams::new(alpha, d, p)?;
        let mut rule = QuadratureRule { angular_nodes: 4, panel_points: 2, ..Default::default() };
        let mut history = Vec::new();
        for _ in 0..4 {
            let check = SteadyCheck { rule, ..Default::default() };
            history.push(steady_residual_with(&pr, 0.5, 2.0, 5, &check)?.max_relative_residual);
            rule = rule.doubled();
        }
        let floor = history[history.len() - 1];
        let halves = history.windows(2).all(|w| w[1] <= 0.5 * w[0] || w[0] <= 4.0 * floor) && history[0] > 100.0 * floor;
        let shown: Vec<String> = history.iter().map(|h| format!("{h:.1e}")).collect();
        r.check(halves, format!("residual halves per doubling down to the interpolation floor for (alpha={alpha}, d={d}): {}", shown.join(" -> ")));
    }
    Ok(())
}

fn criterion_4(r: &mut Report) -> Result<()> {
    let params = canonical();
    let sp = spectral(1, 4096, 512.0)?;
    let grid = *sp.grid();
    let u0 = sample(&grid, &InitialDatum::from(InitialDatumSpec::Gaussian { amplitude: 0.1, width: 2.0 }), &params)?.field;
    let t_max = grid.image_safe_time(params.alpha);
    let window = last_decade(t_max);
    let settings = SolverSettings {
        dt_max: 0.1,
        output_times: dyadic_times(window.0 / 4.0, 4, t_max),
        ..SolverSettings::new(t_max)
    };
    let rec = evolve(&u0, &params, &sp, &settings)?;
    r.check(rec.status.is_global(), format!("small Gaussian stays global up to t = {t_max}"));
    let fit = fit_power_law(&rec.times, &rec.sup_norm, Some(window))?;
    let target = -1.0 / (params.p - 1.0);
    r.check(
        fit.within(target, 0.15),
        format!(
            "sup-norm slope over [{:.2}, {:.2}] = {:.3} +- {:.3}, target {target} +- 15%",
            window.0, window.1, fit.exponent, fit.stderr
        ),
    );
    r.info(format!(
        "linear heat rate -d/alpha = {}; the measured slope decays at least as fast as t^(-1/(p-1)): {}",
        -f64::from(params.d) / params.alpha,
        fit.exponent <= target
    ));
    Ok(())
}

fn sandwich_settings(t_end: f64, scheme: Scheme) -> SolverSettings {
    SolverSettings {
        dt_max: 0.05,
        output_times: dyadic_times(0.125, 2, t_end),
        scheme,
        barrier: Some(Barrier::Singular),
        comparison: true,
        ..SolverSettings::new(t_end)
    }
}

fn criterion_5(r: &mut Report) -> Result<()> {
    let params = canonical();
    let datum = InitialDatum::from(InitialDatumSpec::TruncatedSingular { delta: 0.9 });
    let mut worst = Vec::new();
    for n in [1024, 2048, 4096] {
        let sp = spectral(1, n, 64.0)?;
        let u0 = sample(sp.grid(), &datum, &params)?.field;
        let rec = evolve(&u0, &params, &sp, &sandwich_settings(8.0, Scheme::WellBalanced))?;
        let m = rec.monitor_maxima;
        let w = m.sandwich_violation_lower.max(m.sandwich_violation_upper);
        r.check(
            rec.status.is_global() && m.sandwich_violation_lower < 1e-3 && m.sandwich_violation_upper < 1e-3,
            format!(
                "n={n}: max violation of 0 <= U-u {:.2e}, of U-u <= e^(-tH)(U-u0) {:.2e}",
                m.sandwich_violation_lower, m.sandwich_violation_upper
            ),
        );
        worst.push(w);
        let plain = evolve(&u0, &params, &sp, &sandwich_settings(8.0, Scheme::Plain))?.monitor_maxima;
        r.info(format!(
            "n={n} plain splitting: lower {:.2e}, upper {:.2e}",
            plain.sandwich_violation_lower, plain.sandwich_violation_upper
        ));
    }
    let floor = 1e-12;
    let shrinks = worst.windows(2).all(|w| w[1] <= w[0] || w[1] <= floor);
    r.check(shrinks, format!("violations shrink under refinement: {}", worst.iter().map(|w| format!("{w:.2e}")).collect::<Vec<_>>().join(" -> ")));
    Ok(())
}

fn criterion_6(r: &mut Report) -> Result<()> {
    let params = canonical();
    let (n, l) = (4096, 512.0);
    let sp = spectral(1, n, l)?;
    let taper = l / 4.0;
    let t_end = 20.0;
    let base = SolverSettings { dt_max: 0.05, output_times: dyadic_times(0.125, 2, t_end), ..SolverSettings::new(t_end) };
    for delta in [0.5, 0.9] {
        let u0 = sample(sp.grid(), &InitialDatum::tapered(InitialDatumSpec::TruncatedSingular { delta }, taper), &params)?.field;
        let settings = SolverSettings { barrier: Some(Barrier::Singular), ..base.clone() };
        let rec = evolve(&u0, &params, &sp, &settings)?;
        let v = rec.monitor_maxima.barrier_violation;
        r.check(rec.status.is_global() && v < 1e-3, format!("delta={delta}: max (u - u_inf)+/u_inf = {v:.2e} up to t = {t_end}"));
    }
    for (k, gamma0, delta) in [(0.2, 0.1, 0.9), (0.05, 0.2, 0.5)] {
        let tail = InitialDatumSpec::PowerTail { k, gamma0, delta };
        let u0 = sample(sp.grid(), &InitialDatum::tapered(tail, taper), &params)?.field;
        let settings = SolverSettings { barrier: Some(Barrier::PowerTail { k, gamma0, delta }), ..base.clone() };
        let rec = evolve(&u0, &params, &sp, &settings)?;
        let v = rec.monitor_maxima.barrier_violation;
        r.check(
            rec.status.is_global() && v < 1e-3,
            format!("power_tail(K={k}, gamma0={gamma0}, delta={delta}): max (u - b)+/b = {v:.2e}"),
        );
    }
    Ok(())
}

fn criterion_7(r: &mut Report) -> Result<()> {
    let (d, alpha) = (1, 0.5);
    let c_max = hardy_bound(d, alpha)?;
    let spec = HardyOperatorSpec::new(alpha, d, 0.5 * c_max)?;
    let sigma = spec.sigma()?;
    r.info(format!("kappa = {:.6}, sigma = {sigma:.6}", spec.kappa));

    let sp = spectral(1, 1 << 16, 512.0)?;
    let grid = *sp.grid();
    let bump = Field::from_fn(grid, |x| (-x[0] * x[0] / 0.01).exp())?;
    let rule = StepRule::for_grid(&grid, alpha);
    let t_max = grid.image_safe_time(alpha);
    let times = dyadic_times(rule.t0, 4, t_max);
    let window = Some(last_decade(t_max));
    for (q, rr) in [(f64::INFINITY, 1.0), (2.0, 1.0)] {
        let fit = hypercontractivity_measure(&spec, &sp, &bump, q, rr, &times, window, &rule)?;
        let target = hypercontractivity_exponent(d, alpha, q, rr);
        r.check(
            fit.within(target, 0.15),
            format!("(q,r)=({q},{rr}): slope {:.3} +- {:.3}, target {target}", fit.exponent, fit.stderr),
        );
    }

    let ell = 0.35;
    let sp = spectral(1, 1 << 18, 2048.0)?;
    let grid = *sp.grid();
    let tail = InitialDatum::tapered(InitialDatumSpec::PowerLaw { amplitude: 1.0, exponent: ell }, grid.half_length() / 4.0);
    let w0 = sample(&grid, &tail, &canonical())?.field;
    let t_end = (grid.half_length() / 64.0).powf(alpha);
    let rule = StepRule::for_grid(&grid, alpha);
    let times = dyadic_times(t_end / 16.0, 4, t_end);
    let (mut ts, mut sup) = (Vec::new(), Vec::new());
    hardy_evolve_with(&w0, &spec, &sp, &times, &rule, |t, w| {
        let weight = WeightSpec::new(sigma, t, alpha)?;
        let caps = grid.capped_radii();
        let m = w.values().iter().zip(&caps).fold(0.0f64, |m, (v, x)| m.max(v.abs() / weight.phi(*x)));
        ts.push(t);
        sup.push(m);
        Ok(())
    })?;
    let fit = fit_power_law(&ts, &sup, Some((t_end / 10.0, t_end)))?;
    let target = -ell / alpha;
    r.check(
        fit.within(target, 0.15),
        format!("tail |x|^-{ell}: weighted sup slope {:.3} +- {:.3}, target {target}", fit.exponent, fit.stderr),
    );
    let scaled: Vec<f64> = ts.iter().zip(&sup).map(|(t, m)| t.powf(sigma / alpha) * m).collect();
    let decreasing = scaled.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    r.check(
        decreasing && scaled[scaled.len() - 1] < scaled[0],
        format!(
            "t^(sigma/alpha) sup phi^-1 |e^(-tH)w0| decreases: {:.4} -> {:.4}",
            scaled[0],
            scaled[scaled.len() - 1]
        ),
    );
    Ok(())
}

fn criterion_8(r: &mut Report) -> Result<()> {
    let (d, alpha, l) = (1, 0.5, 128.0);
    let c_max = hardy_bound(d, alpha)?;
    let times = [1.0, 2.0, 4.0];
    let mut maxima = Vec::new();
    for n in [8192, 16384] {
        let sp = spectral(1, n, l)?;
        let grid = *sp.grid();
        let y = grid.origin() + n / 32;
        let samples: Vec<usize> = (0..n).filter(|&i| grid.radius(i) <= 32.0).collect();
        let rule = StepRule::for_grid(&grid, alpha);
        let hardy = HardyOperatorSpec::new(alpha, d, 0.5 * c_max)?;
        let stats = kernel_ratio_probe(&hardy, &sp, y, &times, &samples, &rule)?;
        r.info(format!("n={n}: ratio max {:.4}, median {:.4}, min {:.4}", stats.max, stats.median, stats.min));
        maxima.push(stats.max);
        let free = kernel_ratio_probe(&HardyOperatorSpec::new(alpha, d, 0.0)?, &sp, y, &times, &samples, &rule)?;
        r.check(free.max <= 1.0 + 1e-10, format!("n={n}, kappa=0: max ratio {:.12}", free.max));
    }
    let q = maxima[1] / maxima[0];
    r.check(
        maxima.iter().all(|m| m.is_finite()) && (0.5..=2.0).contains(&q),
        format!("kappa=0.5 C_max: max ratio {:.4} -> {:.4} under n -> 2n", maxima[0], maxima[1]),
    );
    Ok(())
}

fn criterion_9(r: &mut Report) -> Result<()> {
    let sp = spectral(1, 256, 8.0)?;
    let grid = *sp.grid();
    let c = 1.7;
    let f = Field::new(grid, vec![c; grid.len()])?;
    let est = morrey_norm(&f, &MorreyQuery::dyadic(&grid, 3.0, 1.0)?, &sp)?;
    let exact = c * 2.0 * 8.0f64.powf(1.0 / 3.0);
    r.check(rel(est.value, exact) < 0.03, format!("constant field: {:.5} vs {exact:.5}", est.value));

    let params = canonical();
    let sp = spectral(1, 1 << 14, 512.0)?;
    let grid = *sp.grid();
    let u = sample(&grid, &InitialDatum::from(InitialDatumSpec::TruncatedSingular { delta: 1.0 }), &params)?.field;
    let s_crit = f64::from(params.d) * (params.p - 1.0) / params.alpha;
    let est = morrey_norm(&u, &MorreyQuery::dyadic(&grid, s_crit, 1.0)?, &sp)?;
    let exact = singular_morrey_norm(&params)?;
    r.check(rel(est.value, exact) < 0.05, format!("capped u_inf: {:.5} vs sigma_d s/(d - alpha/(p-1)) = {exact:.5}", est.value));

    let alpha = 0.5;
    let (p1, p2) = (2.0, 4.0);
    let sp = spectral(1, 1 << 18, 2048.0)?;
    let grid = *sp.grid();
    let datum = InitialDatum::tapered(InitialDatumSpec::PowerLaw { amplitude: 1.0, exponent: 1.0 / p1 }, grid.half_length() / 4.0);
    let f = sample(&grid, &datum, &params)?.field;
    let t_end = (grid.half_length() / 64.0).powf(alpha);
    let times: Vec<f64> = (0..14).rev().map(|k| t_end * (-f64::from(k) / 4.0).exp2()).collect();
    let fit = morrey_smoothing_probe(&f, alpha, (p1, p2), 1.0, &times, None, &sp)?;
    let target = smoothing_exponent(1, alpha, p1, p2);
    r.check(
        fit.within(target, 0.15),
        format!("M^{p1} datum |x|^-1/2 into M^{p2}: slope {:.3} +- {:.3}, target {target}", fit.exponent, fit.stderr),
    );
    Ok(())
}

fn criterion_10(r: &mut Report) -> Result<()> {
    let params = canonical();
    let sp = spectral(1, 4096, 512.0)?;
    let base = Field::from_fn(*sp.grid(), |x| (-x[0] * x[0]).exp())?;
    let settings = SolverSettings { dt_max: 0.1, output_times: vec![1000.0], ..SolverSettings::new(1000.0) };
    let classify = |lambdas: &[f64], s: &SolverSettings| -> Result<Vec<Outcome>> {
        lambdas
            .iter()
            .map(|l| {
                Ok(match evolve(&base.scaled(*l), &params, &sp, s)?.status {
                    RunStatus::Global { .. } => Outcome::Global,
                    RunStatus::Blowup { .. } => Outcome::Blowup,
                    RunStatus::NumericalFailure { step, reason } => {
                        return Err(fraclab_core::Error::NonFinite { step, reason })
                    }
                })
            })
            .collect()
    };
    let mut state = ThresholdState::new(0.01, 10.0, 0.1)?;
    let bracket = match classify_threshold(&mut state, 1, None, |ls| classify(ls, &settings), |_| Ok(())) {
        Ok(b) => b,
        Err(e) => {
            r.check(false, format!("bisection failed: {e}"));
            return Ok(());
        }
    };
    r.check(
        bracket.ratio <= 1.1,
        format!(
            "bracket [{:.5}, {:.5}], ratio {:.4} after {} rounds, no monotonicity violation",
            bracket.lambda_global, bracket.lambda_blowup, bracket.ratio, state.iterations
        ),
    );
    let below: Vec<f64> = state.observations.iter().filter(|o| o.0 <= bracket.lambda_global).map(|o| o.0).collect();
    let above: Vec<f64> = state.observations.iter().filter(|o| o.0 >= bracket.lambda_blowup).map(|o| o.0).collect();
    let consistent = state
        .observations
        .iter()
        .all(|(l, o)| (*l <= bracket.lambda_global) == (*o == Outcome::Global));
    r.check(
        consistent,
        format!("{} amplitudes at or below the bracket are Global, {} at or above blow up", below.len(), above.len()),
    );
    let fine = SolverSettings { eta: 0.5 * settings.eta, ..settings.clone() };
    let ends = classify(&[bracket.lambda_global, bracket.lambda_blowup], &fine)?;
    r.check(
        ends == [Outcome::Global, Outcome::Blowup],
        format!("ends reclassified with eta/2: {ends:?}"),
    );
    let (cg, _) = blowup_certificate(&base.scaled(bracket.lambda_global), &params, &sp, 1000.0, 30, 4)?;
    let (cb, _) = blowup_certificate(&base.scaled(bracket.lambda_blowup), &params, &sp, 1000.0, 30, 4)?;
    r.check(cb > cg, format!("blowup certificate {cb:.6} at the Blowup end exceeds {cg:.6} at the Global end"));
    Ok(())
}

/// Root of the analytic derivative of `F(·,t)` on the inner branch, by bisection on its sign.
///
/// The sign of `F_r = −γ s r^{−γ−1} + σB r^{−σ−1}` is that of `σB r^{γ−σ} − γ s`,
/// which is evaluated in log form to stay finite.
fn derivative_root(e: &Envelope, t: f64) -> f64 {
    let b = e.b * t.powf((e.sigma - e.ell) / e.alpha);
    let rising = |lx: f64| (e.sigma * b).ln() + (e.gamma - e.sigma) * lx > (e.gamma * e.amplitude).ln();
    let (mut lo, mut hi) = (-700.0f64, t.ln() / e.alpha);
    if rising(hi) {
        return hi.exp();
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rising(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

fn criterion_11(r: &mut Report) -> Result<()> {
    let mut rng = StdRng::seed_from_u64(11);
    let (mut worst_arg, mut worst_max, mut worst_t, mut worst_gs_arg) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut draws = 0;
    while draws < 20 {
        let pr = random_regime(&mut rng);
        let gamma = pr.steady_exponent();
        let span = f64::from(pr.d) - pr.alpha;
        if !(span > gamma * 1.05) {
            continue;
        }
        draws += 1;
        let sigma = gamma + rng.gen_range(0.05..0.95) * (span - gamma);
        let ell = sigma + rng.gen_range(0.0..1.0) * (span - sigma).max(0.1);
        let b = 10f64.powf(rng.gen_range(-3.0..1.0));
        let t = 10f64.powf(rng.gen_range(-1.0..3.0));
        for (ell, label) in [(ell, "F"), (sigma, "G")] {
            let e = Envelope::for_params(&pr, b, ell, sigma)?;
            let m = e.max(t)?;
            let edge = t.ln() / e.alpha;
            let (x, v) = golden_section_max(|lx| e.value(lx.exp(), t), -700.0, edge + 20.0, 1e-12);
            worst_max = worst_max.max(rel(v, m.max));
            worst_gs_arg = worst_gs_arg.max(rel(x.exp(), m.argmax));
            worst_arg = worst_arg.max(rel(derivative_root(&e, t), m.argmax));
            if label == "G" {
                let mut t_free = t;
                while !e.max(t_free)?.interior {
                    t_free *= 10.0;
                }
                let search = |t: f64| golden_section_max(|lx| e.value(lx.exp(), t), -700.0, t.ln() / e.alpha + 20.0, 1e-12).1;
                worst_t = worst_t.max(rel(e.max(37.0 * t_free)?.max, e.max(t_free)?.max));
                worst_t = worst_t.max(rel(search(37.0 * t_free), search(t_free)));
            }
        }
    }
    r.check(worst_max < 1e-8, format!("max of F and G vs golden section on 20 draws: worst rel {worst_max:.2e}"));
    r.check(worst_arg < 1e-8, format!("argmax vs derivative-sign bisection: worst rel {worst_arg:.2e}"));
    r.info(format!("argmax vs golden section (limited to about sqrt(eps) by flatness): worst rel {worst_gs_arg:.2e}"));
    r.check(worst_t < 1e-8, format!("ell = sigma: max at t and 37t agree (closed form and search), worst rel {worst_t:.2e}"));
    Ok(())
}

type Criterion = fn(&mut Report) -> Result<()>;

const CRITERIA: [(u32, &str, Criterion); 11] = [
    (1, "constant identities", criterion_1),
    (2, "sigma solver", criterion_2),
    (3, "steady state", criterion_3),
    (4, "decay of global solutions", criterion_4),
    (5, "comparison sandwich", criterion_5),
    (6, "barrier preservation", criterion_6),
    (7, "linear Hardy decay", criterion_7),
    (8, "kernel bound", criterion_8),
    (9, "Morrey estimator", criterion_9),
    (10, "dichotomy", criterion_10),
    (11, "envelope closed forms", criterion_11),
];

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (n, name, run) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let mut report = Report::default();
        if let Err(e) = run(&mut report) {
            report.check(false, format!("error: {e}"));
        }
        let verdict = if report.failed { "FAIL" } else { "PASS" };
        println!("[{verdict}] criterion {n}: {name} ({:.1}s)", start.elapsed().as_secs_f64());
        for line in &report.lines {
            println!("        {line}");
        }
        if report.failed {
            failed.push(n);
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
