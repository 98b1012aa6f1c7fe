//! JSON experiment configuration.
//!
//! Every field except `params` and `initial` has a default. Parsing rejects
//! unknown keys and collects every error it finds before giving up.


use fraclab_core::analysis::dyadic_times;
use fraclab_core::constants::{singular_amplitude, ModelParams};
use fraclab_core::field::{Grid, InitialDatum, InitialDatumSpec};
use fraclab_core::linear::HardyOperatorSpec;
use fraclab_core::nonlinear::{Barrier, Scheme, SolverSettings};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::LabError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest accepted `n^d` (2 GiB of `f64` values).
pub const MAX_GRID_POINTS: usize = 1 << 28;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsSection {
    pub alpha: f64,
    pub d: u32,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSection {
    pub n: usize,
    #[serde(rename = "L")]
    pub half_length: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 4096, half_length: 512.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OutputSchedule {
    /// `t0·2^{k/per_octave}` up to `t_end`.
    Dyadic { t0: f64, per_octave: u32 },
    List { times: Vec<f64> },
    /// `count` equally spaced times ending at `t_end`.
    Uniform { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeSection {
    pub t_end: f64,
    pub eta: f64,
    pub dt_max: f64,
    pub blowup_sup_threshold: f64,
    pub output_schedule: OutputSchedule,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            t_end: 100.0,
            eta: 0.1,
            dt_max: 0.1,
            blowup_sup_threshold: 1e8,
            output_schedule: OutputSchedule::Dyadic { t0: 0.01, per_octave: 4 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatumConfig {
    TruncatedSingular { delta: f64 },
    Gaussian { amplitude: f64, width: f64 },
    PowerTail { k: f64, gamma0: f64, delta: f64 },
    PowerLaw { amplitude: f64, exponent: f64 },
    Zero,
}

impl DatumConfig {
    fn keys(kind: &str) -> Option<&'static [&'static str]> {
        Some(match kind {
            "truncated_singular" => &["delta"],
            "gaussian" => &["amplitude", "width"],
            "power_tail" => &["k", "gamma0", "delta"],
            "power_law" => &["amplitude", "exponent"],
            "zero" => &[],
            _ => return None,
        })
    }

    pub fn spec(&self) -> InitialDatumSpec {
        match *self {
            DatumConfig::TruncatedSingular { delta } => InitialDatumSpec::TruncatedSingular { delta },
            DatumConfig::Gaussian { amplitude, width } => InitialDatumSpec::Gaussian { amplitude, width },
            DatumConfig::PowerTail { k, gamma0, delta } => InitialDatumSpec::PowerTail { k, gamma0, delta },
            DatumConfig::PowerLaw { amplitude, exponent } => InitialDatumSpec::PowerLaw { amplitude, exponent },
            DatumConfig::Zero => InitialDatumSpec::Zero,
        }
    }

    fn delta(&self) -> Option<f64> {
        match *self {
            DatumConfig::TruncatedSingular { delta } | DatumConfig::PowerTail { delta, .. } => Some(delta),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialSection {
    #[serde(flatten)]
    pub datum: DatumConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taper_radius: Option<f64>,
}

impl InitialSection {
    pub fn datum(&self) -> InitialDatum {
        InitialDatum { spec: self.datum.spec(), taper_radius: self.taper_radius }
    }
}

/// Hardy coupling of the linear problem: an explicit `κ`, `"from-p"` for
/// `κ = p·s^{p−1}`, or `"from-delta"` for `κ = (δs)^{p−1}` with `δ` taken from
/// the initial datum. The derived forms are resolved when a linear run needs them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PotentialSection {
    Kappa(f64),
    #[default]
    FromP,
    FromDelta,
}

impl Serialize for PotentialSection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PotentialSection::Kappa(k) => {
                let mut m = Map::new();
                m.insert("kappa".into(), serde_json::json!(k));
                Value::Object(m).serialize(s)
            }
            PotentialSection::FromP => s.serialize_str("from-p"),
            PotentialSection::FromDelta => s.serialize_str("from-delta"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSection {
    pub scheme: Scheme,
    pub barrier: Option<Barrier>,
    pub comparison: bool,
    pub dt_min: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { scheme: Scheme::Plain, barrier: None, comparison: false, dt_min: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputsSection {
    pub csv_path: Option<String>,
    pub snapshot_dir: Option<String>,
    /// Write a snapshot at every N-th output time.
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub params: ParamsSection,
    pub grid: GridSection,
    pub time: TimeSection,
    pub initial: InitialSection,
    pub potential: PotentialSection,
    pub solver: SolverSection,
    pub outputs: OutputsSection,
}

const SECTIONS: [&str; 7] = ["params", "grid", "time", "initial", "potential", "solver", "outputs"];

fn section_keys(name: &str) -> &'static [&'static str] {
    match name {
        "params" => &["alpha", "d", "p"],
        "grid" => &["n", "L"],
        "time" => &["t_end", "eta", "dt_max", "blowup_sup_threshold", "output_schedule"],
        "solver" => &["scheme", "barrier", "comparison", "dt_min"],
        "outputs" => &["csv_path", "snapshot_dir", "snapshot_every"],
        _ => &[],
    }
}

struct Collector(Vec<String>);

impl Collector {
    fn unknown_keys(&mut self, section: &str, obj: &Map<String, Value>, allowed: &[&str]) {
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                self.0.push(format!("{section}: unknown key '{k}'"));
            }
        }
    }

    fn section<T: DeserializeOwned>(&mut self, name: &str, v: Option<&Value>, required: bool) -> Option<T> {
        let v = match v {
            Some(v) => v.clone(),
            None if required => {
                self.0.push(format!("missing required section '{name}'"));
                return None;
            }
            None => Value::Object(Map::new()),
        };
        if let Value::Object(obj) = &v {
            self.unknown_keys(name, obj, section_keys(name));
        }
        match serde_json::from_value(v) {
            Ok(x) => Some(x),
            Err(e) => {
                self.0.push(format!("{name}: {e}"));
                None
            }
        }
    }
}

fn parse_initial(c: &mut Collector, v: Option<&Value>) -> Option<InitialSection> {
    let Some(v) = v else {
        c.0.push("missing required section 'initial'".into());
        return None;
    };
    let Value::Object(obj) = v else {
        c.0.push("initial: expected an object".into());
        return None;
    };
    let kind = match obj.get("kind").and_then(Value::as_str) {
        Some(k) => k,
        None => {
            c.0.push("initial: missing string field 'kind'".into());
            return None;
        }
    };
    let Some(keys) = DatumConfig::keys(kind) else {
        c.0.push(format!(
            "initial: unknown kind '{kind}' (expected truncated_singular, gaussian, power_tail, power_law or zero)"
        ));
        return None;
    };
    let mut allowed = vec!["kind", "taper_radius"];
    allowed.extend_from_slice(keys);
    c.unknown_keys("initial", obj, &allowed);
    let taper_radius = match obj.get("taper_radius") {
        None | Some(Value::Null) => None,
        Some(t) => match t.as_f64() {
            Some(t) => Some(t),
            None => {
                c.0.push("initial: taper_radius must be a number".into());
                return None;
            }
        },
    };
    let mut rest = obj.clone();
    rest.remove("taper_radius");
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            rest.remove(k);
        }
    }
    match serde_json::from_value::<DatumConfig>(Value::Object(rest)) {
        Ok(datum) => Some(InitialSection { datum, taper_radius }),
        Err(e) => {
            c.0.push(format!("initial: {e}"));
            None
        }
    }
}

fn parse_potential(c: &mut Collector, v: Option<&Value>) -> Option<PotentialSection> {
    match v {
        None => Some(PotentialSection::default()),
        Some(Value::String(s)) if s == "from-p" => Some(PotentialSection::FromP),
        Some(Value::String(s)) if s == "from-delta" => Some(PotentialSection::FromDelta),
        Some(Value::Object(obj)) => {
            c.unknown_keys("potential", obj, &["kappa"]);
            match obj.get("kappa").and_then(Value::as_f64) {
                Some(k) => Some(PotentialSection::Kappa(k)),
                None => {
                    c.0.push("potential: 'kappa' must be a number".into());
                    None
                }
            }
        }
        Some(other) => {
            c.0.push(format!("potential: expected {{\"kappa\": number}}, \"from-p\" or \"from-delta\", got {other}"));
            None
        }
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, LabError> {
    let root: Value = serde_json::from_str(text).map_err(|e| LabError::Config(vec![format!("not valid JSON: {e}")]))?;
    let Value::Object(root) = root else {
        return Err(LabError::Config(vec!["top level must be a JSON object".into()]));
    };
    let mut c = Collector(Vec::new());
    c.unknown_keys("config", &root, &SECTIONS);
    let params = c.section::<ParamsSection>("params", root.get("params"), true);
    let grid = c.section::<GridSection>("grid", root.get("grid"), false);
    let time = c.section::<TimeSection>("time", root.get("time"), false);
    let initial = parse_initial(&mut c, root.get("initial"));
    let potential = parse_potential(&mut c, root.get("potential"));
    let solver = c.section::<SolverSection>("solver", root.get("solver"), false);
    let outputs = c.section::<OutputsSection>("outputs", root.get("outputs"), false);
    match (params, grid, time, initial, potential, solver, outputs) {
        (Some(params), Some(grid), Some(time), Some(initial), Some(potential), Some(solver), Some(outputs))
            if c.0.is_empty() =>
        {
            let cfg = ExperimentConfig { params, grid, time, initial, potential, solver, outputs };
            let errors = cfg.semantic_errors();
            if errors.is_empty() {
                Ok(cfg)
            } else {
                Err(LabError::Config(errors))
            }
        }
        _ => Err(LabError::Config(c.0)),
    }
}

impl ExperimentConfig {
    /// Defaults everywhere except `params` and `initial`.
    pub fn new(params: ParamsSection, initial: InitialSection) -> Self {
        Self {
            params,
            grid: GridSection::default(),
            time: TimeSection::default(),
            initial,
            potential: PotentialSection::default(),
            solver: SolverSection::default(),
            outputs: OutputsSection::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// SHA-256 of the compact serialised form, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialises");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams { alpha: self.params.alpha, d: self.params.d, p: self.params.p }
    }

    pub fn grid(&self) -> Result<Grid, LabError> {
        Ok(Grid::new(self.params.d, self.grid.n, self.grid.half_length)?)
    }

    pub fn output_times(&self) -> Vec<f64> {
        let t_end = self.time.t_end;
        let mut times: Vec<f64> = match &self.time.output_schedule {
            OutputSchedule::Dyadic { t0, per_octave } => dyadic_times(*t0, *per_octave, t_end),
            OutputSchedule::List { times } => times.clone(),
            OutputSchedule::Uniform { count } => (1..=*count).map(|k| t_end * k as f64 / *count as f64).collect(),
        };
        times.retain(|t| *t > 0.0 && *t <= t_end);
        times
    }

    pub fn solver_settings(&self) -> SolverSettings {
        let mut s = SolverSettings::new(self.time.t_end);
        s.eta = self.time.eta;
        s.dt_max = self.time.dt_max;
        s.blowup_sup_threshold = self.time.blowup_sup_threshold;
        s.dt_min = self.solver.dt_min;
        s.output_times = self.output_times();
        s.scheme = self.solver.scheme;
        s.barrier = self.solver.barrier;
        s.comparison = self.solver.comparison;
        s
    }

    pub fn kappa(&self) -> Result<f64, LabError> {
        let params = self.model_params();
        Ok(match self.potential {
            PotentialSection::Kappa(k) => k,
            PotentialSection::FromP => params.linearized_coupling()?,
            PotentialSection::FromDelta => {
                let delta = self.initial.datum.delta().ok_or_else(|| {
                    LabError::Config(vec!["potential 'from-delta' needs an initial datum with delta".into()])
                })?;
                (delta * singular_amplitude(&params)?).powf(params.p - 1.0)
            }
        })
    }

    pub fn hardy_spec(&self) -> Result<HardyOperatorSpec, LabError> {
        Ok(HardyOperatorSpec::new(self.params.alpha, self.params.d, self.kappa()?)?)
    }

    fn semantic_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        let params = self.model_params();
        if let Err(e) = params.validate() {
            errors.push(format!("params: {e}"));
            return errors;
        }
        if !(1..=3).contains(&self.params.d) {
            errors.push(format!("params: d must be 1, 2 or 3 for grid runs, got {}", self.params.d));
        }
        match Grid::new(self.params.d.clamp(1, 3), self.grid.n, self.grid.half_length) {
            Err(e) => errors.push(format!("grid: {e}")),
            Ok(g) if g.len() > MAX_GRID_POINTS => errors.push(format!(
                "grid: n^d = {} points exceeds the limit of {MAX_GRID_POINTS}; lower n for d = {}",
                g.len(),
                self.params.d
            )),
            Ok(_) => {}
        }
        let t = &self.time;
        for (name, v) in [("t_end", t.t_end), ("eta", t.eta), ("dt_max", t.dt_max), ("blowup_sup_threshold", t.blowup_sup_threshold)] {
            if !(v > 0.0) || !v.is_finite() {
                errors.push(format!("time: {name} must be positive and finite, got {v}"));
            }
        }
        if !(self.solver.dt_min > 0.0) {
            errors.push("solver: dt_min must be positive".into());
        }
        match &t.output_schedule {
            OutputSchedule::Dyadic { t0, per_octave } => {
                if !(*t0 > 0.0) || *per_octave == 0 {
                    errors.push("time: dyadic schedule needs t0 > 0 and per_octave >= 1".into());
                }
            }
            OutputSchedule::List { times } => {
                if times.iter().any(|x| !(*x > 0.0)) || times.windows(2).any(|w| !(w[1] > w[0])) {
                    errors.push("time: listed output times must be positive and increasing".into());
                }
            }
            OutputSchedule::Uniform { count } => {
                if *count == 0 {
                    errors.push("time: uniform schedule needs count >= 1".into());
                }
            }
        }
        let singular_needed = self.initial.datum().needs_singular_regime()
            || self.solver.scheme == Scheme::WellBalanced
            || self.solver.barrier.is_some()
            || self.solver.comparison;
        if singular_needed {
            if let Err(e) = params.check_singular_regime() {
                errors.push(format!("regime: {e}"));
            }
        }
        if let Some(r) = self.initial.taper_radius {
            if !(r > 0.0) {
                errors.push("initial: taper_radius must be positive".into());
            }
        }
        match self.potential {
            PotentialSection::Kappa(k) => {
                if let Err(e) = HardyOperatorSpec::new(params.alpha, params.d, k).and_then(|h| h.sigma()) {
                    errors.push(format!("potential: {e}"));
                }
            }
            PotentialSection::FromDelta if self.initial.datum.delta().is_none() => {
                errors.push("potential: 'from-delta' needs an initial datum with delta".into());
            }
            _ => {}
        }
        if errors.is_empty() {
            // Datum parameters are checked on a small grid of the same box.
            if let Ok(probe) = Grid::new(self.params.d, 16, self.grid.half_length) {
                if let Err(e) = fraclab_core::field::sample(&probe, &self.initial.datum(), &params) {
                    errors.push(format!("initial: {e}"));
                }
            }
        }
        errors
    }
}
