//! Subcommands of the `fraclab` binary.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fraclab_core::analysis::{classify_threshold, fit_power_law, Outcome, ThresholdState};
use fraclab_core::constants::{
    frac_lap_constant, power_map_coeff, solve_sigma, solve_sigma_conjugate, ModelParams, RegimeReport,
};
use fraclab_core::field::{sample, Field, Spectral};
use fraclab_core::linear::{hardy_evolve, StepRule};
use fraclab_core::morrey::{morrey_norm, MorreyQuery};
use fraclab_core::nonlinear::{blowup_certificate, evolve_with, RunStatus};
use fraclab_core::radial::steady_residual;
use serde_json::json;

use crate::config::{parse_config, ExperimentConfig, TOOL_VERSION};
use crate::error::LabError;
use crate::executor::{parallel_map, thread_count};
use crate::fft::RustFft;
use crate::output::{read_column, CsvTable};
use crate::snapshot::{read_snapshot, write_snapshot, SnapshotMeta};

#[derive(Debug, Parser)]
#[command(name = "fraclab", version, about = "Experiments on the fractional semilinear heat equation")]
pub struct Cli {
    /// Worker threads for parallel commands (falls back to FRACLAB_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long)]
    pub d: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub p: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regime report: critical exponents, s, Hardy ratio, sigma.
    Constants {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        json: bool,
    },
    /// Root sigma of C(sigma) = kappa on the small branch and its conjugate.
    Sigma {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long)]
        d: u32,
        /// Explicit coupling; defaults to p*s^(p-1) when --p is given.
        #[arg(long, allow_negative_numbers = true, required_unless_present = "p")]
        kappa: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
    },
    /// Residual of the singular steady state via the radial operator (CSV r,residual).
    SteadyCheck {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.5)]
        r_min: f64,
        #[arg(long, default_value_t = 2.0)]
        r_max: f64,
        #[arg(long, default_value_t = 9)]
        n: usize,
    },
    /// Nonlinear evolution; CSV t,sup_norm,l2_norm,mass,min_value,dt and a JSON footer.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides outputs.snapshot_every.
        #[arg(long)]
        snapshot_every: Option<usize>,
        /// Overrides outputs.csv_path; `-` writes to stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Hardy semigroup applied to the initial datum; plain and weighted norms.
    LinearEvolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Amplitude bisection between global existence and blowup.
    Classify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        lambda_min: f64,
        #[arg(long)]
        lambda_max: f64,
        #[arg(long, default_value_t = 0.1)]
        tol: f64,
        /// Interior amplitudes per round.
        #[arg(long)]
        batch: Option<usize>,
        /// JSON state file; resumed when present and rewritten after each round.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Morrey norm estimate of a snapshot.
    Morrey {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Log-log power-law fit of one CSV column against t.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        column: String,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
    },
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                LabError::Usage(String::new()).exit_code()
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, LabError> {
    match &cli.command {
        Command::Constants { model, json } => constants(model, *json, out),
        Command::Sigma { alpha, d, kappa, p } => sigma(*alpha, *d, *kappa, *p, out),
        Command::SteadyCheck { model, r_min, r_max, n } => steady_check(model, *r_min, *r_max, *n, out),
        Command::Evolve { config, snapshot_every, csv } => evolve(config, *snapshot_every, csv.as_deref(), out),
        Command::LinearEvolve { config, csv } => linear_evolve(config, csv.as_deref(), out),
        Command::Classify { config, lambda_min, lambda_max, tol, batch, state } => {
            let threads = thread_count(cli.threads);
            let k = batch.unwrap_or(threads.saturating_sub(1).max(1));
            classify(config, (*lambda_min, *lambda_max, *tol), k, threads, state.as_deref(), out)
        }
        Command::Morrey { snapshot, s, q, stride } => morrey(snapshot, *s, *q, *stride, out),
        Command::Fit { csv, column, t_min, t_max } => fit(csv, column, *t_min, *t_max, out),
    }
}

fn params(m: &ModelArgs) -> Result<ModelParams, LabError> {
    Ok(ModelParams::new(m.alpha, m.d, m.p)?)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.17}"))
}

fn constants(m: &ModelArgs, as_json: bool, out: &mut dyn Write) -> Result<i32, LabError> {
    let report = RegimeReport::new(&params(m)?)?;
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        let rows = [
            ("p_fujita", opt(Some(report.p_fujita))),
            ("p_singular", opt(report.p_singular)),
            ("s", opt(report.singular_amplitude)),
            ("hardy_ratio", opt(report.hardy_ratio)),
            ("jl_satisfied", report.jl_satisfied.to_string()),
            ("sigma", opt(report.sigma)),
            ("singular_morrey_norm", opt(report.singular_morrey_norm)),
        ];
        for (k, v) in rows {
            writeln!(out, "{k:<22}{v}")?;
        }
    }
    Ok(0)
}

fn sigma(alpha: f64, d: u32, kappa: Option<f64>, p: Option<f64>, out: &mut dyn Write) -> Result<i32, LabError> {
    let kappa = match (kappa, p) {
        (Some(k), _) => k,
        (None, Some(p)) => ModelParams::new(alpha, d, p)?.linearized_coupling()?,
        (None, None) => return Err(LabError::Usage("need --kappa or --p".into())),
    };
    let s = solve_sigma(kappa, d, alpha)?;
    let report = json!({
        "kappa": kappa,
        "sigma": s,
        "conjugate": solve_sigma_conjugate(kappa, d, alpha)?,
        "residual": power_map_coeff(s, d, alpha)? - kappa,
        "kappa_max": power_map_coeff(0.5 * (f64::from(d) - alpha), d, alpha)?,
        "frac_lap_constant": frac_lap_constant(d, alpha)?,
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(0)
}

fn steady_check(m: &ModelArgs, r_min: f64, r_max: f64, n: usize, out: &mut dyn Write) -> Result<i32, LabError> {
    let res = steady_residual(&params(m)?, r_min, r_max, n)?;
    writeln!(out, "r,residual")?;
    for (r, v) in &res.per_point {
        writeln!(out, "{r:e},{v:e}")?;
    }
    writeln!(out, "# max_relative_residual {:e}", res.max_relative_residual)?;
    Ok(0)
}

fn load(path: &Path) -> Result<ExperimentConfig, LabError> {
    let text = fs::read_to_string(path)
        .map_err(|e| LabError::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
    parse_config(&text)
}

struct Prepared {
    cfg: ExperimentConfig,
    params: ModelParams,
    spectral: Spectral,
    u0: Field,
}

fn prepare(path: &Path) -> Result<Prepared, LabError> {
    let cfg = load(path)?;
    let params = cfg.model_params();
    let grid = cfg.grid()?;
    let spectral = Spectral::new(grid, &RustFft::new());
    let u0 = sample(&grid, &cfg.initial.datum(), &params)?.field;
    Ok(Prepared { cfg, params, spectral, u0 })
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), LabError> {
    match path {
        Some(p) if p != Path::new("-") => Ok(fs::write(p, text)?),
        _ => Ok(out.write_all(text.as_bytes())?),
    }
}

fn evolve(path: &Path, snapshot_every: Option<usize>, csv: Option<&Path>, out: &mut dyn Write) -> Result<i32, LabError> {
    let Prepared { cfg, params, spectral, u0 } = prepare(path)?;
    let hash = cfg.hash();
    let every = snapshot_every.or(cfg.outputs.snapshot_every).filter(|n| *n > 0);
    let dir = cfg.outputs.snapshot_dir.as_ref().map(PathBuf::from);
    if every.is_some() && dir.is_none() {
        return Err(LabError::Config(vec!["snapshots requested but outputs.snapshot_dir is not set".into()]));
    }
    if let Some(d) = &dir {
        fs::create_dir_all(d)?;
    }
    let mut index = 0usize;
    let record = evolve_with(&u0, &params, &spectral, &cfg.solver_settings(), |t, u| {
        if let (Some(n), Some(d)) = (every, &dir) {
            if index % n == 0 {
                let name = format!("snapshot_{index:05}.frdf");
                let meta = SnapshotMeta { alpha: params.alpha, p: params.p, t };
                write_snapshot(&d.join(&name), u, &meta).map_err(|e| fraclab_core::Error::Config(e.to_string()))?;
                let side = json!({"fraclab_version": TOOL_VERSION, "config_hash": hash, "snapshot": name, "t": t});
                fs::write(d.join(format!("{name}.json")), side.to_string())
                    .map_err(|e| fraclab_core::Error::Config(e.to_string()))?;
            }
        }
        index += 1;
        Ok(())
    })?;
    let mut table = CsvTable::new(&["t", "sup_norm", "l2_norm", "mass", "min_value", "dt"]);
    for i in 0..record.times.len() {
        table.push(vec![
            record.times[i],
            record.sup_norm[i],
            record.l2_norm[i],
            record.mass[i],
            record.min_value[i],
            record.dt[i],
        ]);
    }
    let footer = json!({
        "config_hash": hash,
        "status": record.status,
        "monitor_maxima": record.monitor_maxima,
        "steps": record.steps,
    });
    let csv_path = csv.map(Path::to_path_buf).or_else(|| cfg.outputs.csv_path.as_ref().map(PathBuf::from));
    emit(&table.render(&hash, Some(&footer)), csv_path.as_deref(), out)?;
    Ok(match record.status {
        RunStatus::NumericalFailure { .. } => 3,
        _ => 0,
    })
}

fn linear_evolve(path: &Path, csv: Option<&Path>, out: &mut dyn Write) -> Result<i32, LabError> {
    let Prepared { cfg, spectral, u0, .. } = prepare(path)?;
    let spec = cfg.hardy_spec()?;
    let mut rule = StepRule::for_grid(spectral.grid(), spec.alpha);
    rule.dt_max = cfg.time.dt_max;
    let records = hardy_evolve(&u0, &spec, &spectral, &cfg.output_times(), &rule)?;
    let mut table =
        CsvTable::new(&["t", "norm_q1", "norm_q2", "norm_qinf", "weighted_q1", "weighted_q2", "weighted_qinf"]);
    for r in &records {
        let mut row = vec![r.t];
        row.extend_from_slice(&r.plain);
        row.extend_from_slice(&r.weighted);
        table.push(row);
    }
    let footer = json!({"config_hash": cfg.hash(), "kappa": spec.kappa, "sigma": spec.sigma()?});
    let csv_path = csv.map(Path::to_path_buf).or_else(|| cfg.outputs.csv_path.as_ref().map(PathBuf::from));
    emit(&table.render(&cfg.hash(), Some(&footer)), csv_path.as_deref(), out)?;
    Ok(0)
}

fn classify(
    path: &Path,
    (lambda_min, lambda_max, tol): (f64, f64, f64),
    k: usize,
    threads: usize,
    state_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, LabError> {
    let Prepared { cfg, params, spectral, u0 } = prepare(path)?;
    let settings = cfg.solver_settings();
    let mut state = match state_path.filter(|p| p.exists()) {
        Some(p) => {
            let saved: ThresholdState = serde_json::from_str(&fs::read_to_string(p)?)?;
            if saved.lambda_min != lambda_min || saved.lambda_max != lambda_max || saved.tol != tol {
                return Err(LabError::Config(vec![format!(
                    "state file {} was written for a different bracket or tolerance",
                    p.display()
                )]));
            }
            saved
        }
        None => ThresholdState::new(lambda_min, lambda_max, tol)?,
    };
    let s_crit = f64::from(params.d) * (params.p - 1.0) / params.alpha;
    let base_morrey = MorreyQuery::dyadic(spectral.grid(), s_crit, 1.0)
        .and_then(|q| morrey_norm(&u0, &q, &spectral))
        .ok()
        .map(|m| m.value);
    let eval = |lambdas: &[f64]| -> fraclab_core::Result<Vec<Outcome>> {
        let runs = parallel_map(lambdas, threads, |l| {
            fraclab_core::nonlinear::evolve(&u0.scaled(*l), &params, &spectral, &settings).map(|r| r.status)
        });
        runs.into_iter()
            .map(|r| match r? {
                RunStatus::Global { .. } => Ok(Outcome::Global),
                RunStatus::Blowup { .. } => Ok(Outcome::Blowup),
                RunStatus::NumericalFailure { step, reason } => Err(fraclab_core::Error::NonFinite { step, reason }),
            })
            .collect()
    };
    let checkpoint = |st: &ThresholdState| -> fraclab_core::Result<()> {
        if let Some(p) = state_path {
            let text = serde_json::to_string_pretty(st).map_err(|e| fraclab_core::Error::Config(e.to_string()))?;
            fs::write(p, text).map_err(|e| fraclab_core::Error::Config(e.to_string()))?;
        }
        Ok(())
    };
    let bracket = classify_threshold(&mut state, k, base_morrey, eval, checkpoint)?;
    let certificate = |l: f64| {
        blowup_certificate(&u0.scaled(l), &params, &spectral, cfg.time.t_end, 30, 4).ok().map(|c| c.0)
    };
    let report = json!({
        "fraclab_version": TOOL_VERSION,
        "config_hash": cfg.hash(),
        "bracket": bracket,
        "iterations": state.iterations,
        "evaluations": state.observations.len(),
        "critical_morrey_exponent": s_crit,
        "base_morrey": base_morrey,
        "certificate_global": certificate(bracket.lambda_global),
        "certificate_blowup": certificate(bracket.lambda_blowup),
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(0)
}

fn morrey(path: &Path, s: f64, q: f64, stride: usize, out: &mut dyn Write) -> Result<i32, LabError> {
    let (field, meta) = read_snapshot(path)?;
    let grid = *field.grid();
    let spectral = Spectral::new(grid, &RustFft::new());
    let query = MorreyQuery::dyadic(&grid, s, q)?.with_stride(stride);
    let est = morrey_norm(&field, &query, &spectral)?;
    let center = &grid.point(est.center)[..grid.dim() as usize];
    let report = json!({"value": est.value, "center": center, "radius": est.radius, "s": s, "q": q, "t": meta.t});
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(0)
}

fn fit(csv: &Path, column: &str, t_min: Option<f64>, t_max: Option<f64>, out: &mut dyn Write) -> Result<i32, LabError> {
    let (t, v) = read_column(csv, column)?;
    let (t, v): (Vec<f64>, Vec<f64>) = t.into_iter().zip(v).filter(|(t, _)| *t > 0.0).unzip();
    let window = match (t_min, t_max) {
        (None, None) => None,
        (a, b) => Some((a.unwrap_or(0.0), b.unwrap_or(f64::INFINITY))),
    };
    let result = fit_power_law(&t, &v, window)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&result)?)?;
    Ok(0)
}
