//! JSON scenarios: loading with defaults and field-path diagnostics, running
//! steady-state, cooling and sweep pipelines, and writing CSV or JSON.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::baths::{BathLabel, BathPreset, BathSpec};
use crate::cooling::{
    fit_scaling_exponent, integrate_cooling, CoolingConfig, CoolingStatus, CoolingTrajectory,
    DeltaPolicy, IntegratorSettings, ScalingFit, DEFAULT_FLOOR_RATIO,
};
use crate::error::{Error, Result};
use crate::floquet::{harmonic_spectrum, ModulationScheme};
use crate::rates::RateOptions;
use crate::steady::{solve_steady_state, SteadyStateReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub modulation: ModulationScheme,
    pub cold: BathSpec,
    pub hot: BathSpec,
    pub run: RunSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_tail_tolerance() -> f64 {
    RateOptions::default().tail_tolerance
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RunSpec {
    SteadyState {
        #[serde(default = "default_tail_tolerance")]
        tail_tolerance: f64,
        #[serde(default)]
        include_negative_sidebands: bool,
    },
    Cooling(CoolingSettings),
    Sweep {
        /// Dotted path of a numeric field, e.g. `cold.gamma` or
        /// `run.initial_temperature` (the latter addressing the inner run).
        parameter: String,
        values: Vec<f64>,
        inner: Box<RunSpec>,
    },
}

impl RunSpec {
    pub fn kind(&self) -> RunKind {
        match self {
            RunSpec::SteadyState { .. } => RunKind::SteadyState,
            RunSpec::Cooling(_) => RunKind::Cooling,
            RunSpec::Sweep { .. } => RunKind::Sweep,
        }
    }

    fn leaf_kind(&self) -> RunKind {
        match self {
            RunSpec::Sweep { inner, .. } => inner.leaf_kind(),
            r => r.kind(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    SteadyState,
    Cooling,
    Sweep,
}

/// Cooling run parameters; bath specs and `ω₀` come from the scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolingSettings {
    pub initial_temperature: f64,
    /// Defaults to `10⁻⁶ ω_cut^C`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_floor: Option<f64>,
    pub t_max: f64,
    #[serde(default)]
    pub delta_policy: DeltaPolicy,
    #[serde(default)]
    pub integrator: IntegratorSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

const BATH_FIELDS: [&str; 7] = [
    "label",
    "gamma",
    "dim",
    "prefactor",
    "omega_cut",
    "cutoff_shape",
    "temperature",
];

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

/// Parses and validates a scenario from JSON text.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    scenario_from_value(value)
}

fn scenario_from_value(mut value: Value) -> Result<Scenario> {
    if let Value::Object(top) = &mut value {
        for (key, label) in [("cold", BathLabel::Cold), ("hot", BathLabel::Hot)] {
            if let Some(bath) = top.get_mut(key) {
                expand_bath(key, label, bath)?;
            }
        }
    }
    let scenario: Scenario = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        match unknown_field(&inner) {
            Some(field) if path == "." => Error::UnknownKey(field),
            Some(_) => Error::UnknownKey(path),
            None => Error::validation(path, inner),
        }
    })?;
    scenario.validate()?;
    Ok(scenario)
}

fn unknown_field(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

/// Replaces `{"preset": ..., overrides...}` by the expanded spec and fills a
/// missing `label` from the bath's position.
fn expand_bath(key: &str, label: BathLabel, bath: &mut Value) -> Result<()> {
    let Value::Object(obj) = bath else {
        return Ok(());
    };
    if let Some(preset) = obj.remove("preset") {
        let preset: BathPreset = serde_json::from_value(preset)
            .map_err(|e| Error::validation(format!("{key}.preset"), e.to_string()))?;
        preset.validate().map_err(|e| match e {
            Error::Validation { path, constraint } => {
                Error::validation(format!("{key}.{path}"), constraint)
            }
            e => e,
        })?;
        let Value::Object(mut expanded) =
            serde_json::to_value(preset.spec(label)).expect("bath spec serializes")
        else {
            unreachable!("bath spec is an object")
        };
        for (k, v) in std::mem::take(obj) {
            if !BATH_FIELDS.contains(&k.as_str()) {
                return Err(Error::UnknownKey(format!("{key}.{k}")));
            }
            expanded.insert(k, v);
        }
        *obj = expanded;
    }
    obj.entry("label")
        .or_insert_with(|| serde_json::to_value(label).expect("label serializes"));
    Ok(())
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::validation("name", "must be non-empty"));
        }
        self.modulation.validate()?;
        self.cold.validate_at("cold")?;
        self.hot.validate_at("hot")?;
        if self.cold.label != BathLabel::Cold {
            return Err(Error::validation("cold.label", "must be \"cold\""));
        }
        if self.hot.label != BathLabel::Hot {
            return Err(Error::validation("hot.label", "must be \"hot\""));
        }
        match &self.run {
            RunSpec::Sweep {
                parameter,
                values,
                inner,
            } => {
                if values.is_empty() {
                    return Err(Error::validation("run.values", "must be non-empty"));
                }
                if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::validation(
                        format!("run.values[{i}]"),
                        "must be finite",
                    ));
                }
                if matches!(**inner, RunSpec::Sweep { .. }) {
                    return Err(Error::validation(
                        "run.inner",
                        "nested sweeps are not supported",
                    ));
                }
                let base = self.point_value(inner)?;
                match lookup(&base, parameter) {
                    Some(Value::Number(_)) => {}
                    _ => {
                        return Err(Error::validation(
                            "run.parameter",
                            format!("`{parameter}` does not address a numeric field"),
                        ))
                    }
                }
                // every point must itself be valid
                for (i, &v) in values.iter().enumerate() {
                    self.point(parameter, v, inner).map_err(|e| match e {
                        Error::Validation { path, constraint } => Error::validation(
                            path,
                            format!("{constraint} (sweep point {i}, value {v})"),
                        ),
                        e => e,
                    })?;
                }
            }
            run => self.validate_leaf(run)?,
        }
        Ok(())
    }

    fn validate_leaf(&self, run: &RunSpec) -> Result<()> {
        match run {
            RunSpec::SteadyState { tail_tolerance, .. } => {
                if !(*tail_tolerance > 0.0) {
                    return Err(Error::validation("run.tail_tolerance", "must be > 0"));
                }
                Ok(())
            }
            RunSpec::Cooling(settings) => self.cooling_config(settings).validate(),
            RunSpec::Sweep { .. } => unreachable!("sweeps are validated by the caller"),
        }
    }

    pub fn cooling_config(&self, settings: &CoolingSettings) -> CoolingConfig {
        CoolingConfig {
            cold: self
                .cold
                .clone()
                .with_temperature(settings.initial_temperature),
            hot: self.hot.clone(),
            omega0: self.modulation.omega0,
            initial_temperature: settings.initial_temperature,
            t_floor: settings
                .t_floor
                .unwrap_or(DEFAULT_FLOOR_RATIO * self.cold.omega_cut),
            t_max: settings.t_max,
            delta_policy: settings.delta_policy,
            integrator: settings.integrator,
        }
    }

    /// Scenario value with `run` replaced by a leaf run, for path edits.
    fn point_value(&self, inner: &RunSpec) -> Result<Value> {
        let mut s = self.clone();
        s.run = inner.clone();
        s.output = OutputSpec::default();
        Ok(serde_json::to_value(&s).expect("scenario serializes"))
    }

    /// The leaf scenario of one sweep point.
    pub fn point(&self, parameter: &str, value: f64, inner: &RunSpec) -> Result<Scenario> {
        let mut v = self.point_value(inner)?;
        let slot = lookup_mut(&mut v, parameter).ok_or_else(|| {
            Error::validation(
                "run.parameter",
                format!("`{parameter}` does not address a field"),
            )
        })?;
        *slot = serde_json::Number::from_f64(value)
            .map(Value::Number)
            .ok_or_else(|| Error::validation("run.values", "must be finite"))?;
        let s: Scenario =
            serde_json::from_value(v).map_err(|e| Error::validation(parameter, e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// SHA-256 of the canonical (key-sorted, compact) JSON of everything
    /// except the output section.
    pub fn config_hash(&self) -> String {
        let mut s = self.clone();
        s.output = OutputSpec::default();
        let value = serde_json::to_value(&s).expect("scenario serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut out, b| {
            let _ = write!(out, "{b:02x}");
            out
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

fn lookup<'a>(v: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.')
        .try_fold(v, |cur, key| cur.as_object()?.get(key))
}

fn lookup_mut<'a>(v: &'a mut Value, path: &str) -> Option<&'a mut Value> {
    path.split('.')
        .try_fold(v, |cur, key| cur.as_object_mut()?.get_mut(key))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweptValue {
    pub parameter: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoolingOutcome {
    pub trajectory: CoolingTrajectory,
    /// Exponent fit over all samples, when they span enough of `T_C`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<ScalingFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    SteadyState(SteadyStateReport),
    Cooling(CoolingOutcome),
    Failed { error: String, exit_code: i32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub point_id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub swept: Option<SweptValue>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub scenario: String,
    pub version: String,
    pub config_hash: String,
    pub records: Vec<Record>,
}

impl RunResult {
    /// Exit code of the first failed record, if any.
    pub fn failure_code(&self) -> Option<i32> {
        self.records.iter().find_map(|r| match r.outcome {
            Outcome::Failed { exit_code, .. } => Some(exit_code),
            _ => None,
        })
    }
}

fn run_leaf(s: &Scenario) -> Outcome {
    let result = match &s.run {
        RunSpec::SteadyState {
            tail_tolerance,
            include_negative_sidebands,
        } => harmonic_spectrum(&s.modulation).and_then(|spectrum| {
            solve_steady_state(
                &spectrum,
                s.modulation.omega0,
                &[s.cold.clone(), s.hot.clone()],
                RateOptions {
                    tail_tolerance: *tail_tolerance,
                    include_negative_sidebands: *include_negative_sidebands,
                },
            )
            .map(Outcome::SteadyState)
        }),
        RunSpec::Cooling(settings) => {
            integrate_cooling(&s.cooling_config(settings)).map(|trajectory| {
                let fit = fit_scaling_exponent(&trajectory.scaling_samples()).ok();
                Outcome::Cooling(CoolingOutcome { trajectory, fit })
            })
        }
        RunSpec::Sweep { .. } => unreachable!("nested sweeps are rejected by validation"),
    };
    result.unwrap_or_else(|e| Outcome::Failed {
        error: e.to_string(),
        exit_code: e.exit_code(),
    })
}

/// Runs a validated scenario. Sweep points run on a pool of `threads`
/// workers (rayon's default when `None`); records keep the order of the
/// values list.
pub fn run_scenario(s: &Scenario, threads: Option<usize>) -> Result<RunResult> {
    s.validate()?;
    let records = match &s.run {
        RunSpec::Sweep {
            parameter,
            values,
            inner,
        } => {
            let points: Vec<Scenario> = values
                .iter()
                .map(|&v| s.point(parameter, v, inner))
                .collect::<Result<_>>()?;
            let evaluate = || -> Vec<Outcome> { points.par_iter().map(run_leaf).collect() };
            let outcomes = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
                    .install(evaluate),
                None => evaluate(),
            };
            outcomes
                .into_iter()
                .zip(values)
                .enumerate()
                .map(|(i, (outcome, &value))| Record {
                    point_id: i,
                    swept: Some(SweptValue {
                        parameter: parameter.clone(),
                        value,
                    }),
                    outcome,
                })
                .collect()
        }
        _ => vec![Record {
            point_id: 0,
            swept: None,
            outcome: run_leaf(s),
        }],
    };
    Ok(RunResult {
        scenario: s.name.clone(),
        version: TOOL_VERSION.to_string(),
        config_hash: s.config_hash(),
        records,
    })
}

/// Twelve significant digits.
fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        x.to_string()
    }
}

pub const STEADY_COLUMNS: [&str; 5] = ["S_ss", "J_C", "J_H", "sigma", "cooling"];
pub const COOLING_COLUMNS: [&str; 5] = ["t", "T_C", "delta", "J_C", "c_V"];

/// CSV rendering. Steady runs: `point_id, [swept parameter,] S_ss, J_C,
/// J_H, sigma, cooling`. Cooling runs: `t, T_C, delta, J_C, c_V`, prefixed
/// by `point_id` and the swept parameter inside sweeps. Failed points leave
/// their value cells empty.
pub fn to_csv(scenario: &Scenario, result: &RunResult) -> String {
    let swept = match &scenario.run {
        RunSpec::Sweep { parameter, .. } => Some(parameter.as_str()),
        _ => None,
    };
    let mut out = String::new();
    match scenario.run.leaf_kind() {
        RunKind::Cooling => {
            let mut header: Vec<&str> = Vec::new();
            if let Some(p) = swept {
                header.extend(["point_id", p]);
            }
            header.extend(COOLING_COLUMNS);
            out.push_str(&header.join(","));
            out.push('\n');
            for r in &result.records {
                let prefix = match &r.swept {
                    Some(sv) => format!("{},{},", r.point_id, num(sv.value)),
                    None => String::new(),
                };
                match &r.outcome {
                    Outcome::Cooling(c) => {
                        for s in &c.trajectory.samples {
                            let _ = writeln!(
                                out,
                                "{prefix}{},{},{},{},{}",
                                num(s.t),
                                num(s.temperature),
                                num(s.delta),
                                num(s.current),
                                num(s.heat_capacity)
                            );
                        }
                    }
                    _ => {
                        let _ = writeln!(out, "{prefix},,,,");
                    }
                }
            }
        }
        _ => {
            let mut header = vec!["point_id"];
            if let Some(p) = swept {
                header.push(p);
            }
            header.extend(STEADY_COLUMNS);
            out.push_str(&header.join(","));
            out.push('\n');
            for r in &result.records {
                let mut row = vec![r.point_id.to_string()];
                if let Some(sv) = &r.swept {
                    row.push(num(sv.value));
                }
                match &r.outcome {
                    Outcome::SteadyState(rep) => row.extend([
                        num(rep.polarization),
                        num(rep.cold_current),
                        num(rep.hot_current),
                        rep.entropy_production.map(num).unwrap_or_default(),
                        rep.cooling.to_string(),
                    ]),
                    _ => row.extend(std::iter::repeat_n(String::new(), STEADY_COLUMNS.len())),
                }
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
    }
    out
}

/// JSON rendering; numbers use the shortest representation that round-trips.
pub fn to_json(result: &RunResult) -> String {
    let mut s = serde_json::to_string_pretty(result).expect("result serializes");
    s.push('\n');
    s
}

pub fn render(scenario: &Scenario, result: &RunResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => to_csv(scenario, result),
        OutputFormat::Json => to_json(result),
    }
}

/// Short human-readable summary of a cooling outcome's status.
pub fn describe_status(status: &CoolingStatus) -> String {
    match status {
        CoolingStatus::ReachedFloor { t_floor, t_zero } => match t_zero {
            Some(t0) => format!("reached floor at t = {t_floor:e}; extrapolated t_zero = {t0:e}"),
            None => format!("reached floor at t = {t_floor:e}; no finite t_zero"),
        },
        CoolingStatus::TimedOut => "timed out".into(),
        CoolingStatus::StalledNonCooling => "stalled (no cooling)".into(),
    }
}

/// Builds a scenario value by hand; used by callers that want presets
/// without writing JSON.
pub fn preset_bath(
    preset: BathPreset,
    label: BathLabel,
    overrides: &[(&str, f64)],
) -> Result<BathSpec> {
    let mut v = serde_json::to_value(preset.spec(label)).expect("bath spec serializes");
    let obj: &mut Map<String, Value> = v.as_object_mut().expect("object");
    for (k, x) in overrides {
        if !BATH_FIELDS.contains(k) {
            return Err(Error::UnknownKey((*k).to_string()));
        }
        obj.insert((*k).to_string(), Value::from(*x));
    }
    serde_json::from_value(v).map_err(|e| Error::invalid(e.to_string()))
}
