//! Slow cooling of a finite cold bath, `dT_C/dt = J_C / c_V`.
//!
//! The right-hand side is supplied by a [`CoolingModel`]. The physical model
//! ([`TwoBandModel`]) evaluates the two-band cold current at a control offset
//! chosen by a [`DeltaPolicy`]; [`PowerLawModel`] forces an exact power law
//! and is mainly useful for checking the integrator.

use serde::{Deserialize, Serialize};

use crate::baths::{bose, heat_capacity, BathSpec};
use crate::error::{Error, Result};
use crate::numerics::fit::{fit_line, LineFit};
use crate::numerics::golden::maximize;
use crate::numerics::ode::dopri_step;
use crate::steady::DOMINANT_SIDEBAND_RATE;

/// Points of the coarse scan in [`optimize_delta`].
pub const DELTA_SCAN_POINTS: usize = 128;
/// Relative bracket width at which the golden-section refinement stops.
pub const DELTA_REL_WIDTH: f64 = 1e-6;
/// Largest admissible relative temperature change per bath memory time.
pub const QUASI_STATIC_LIMIT: f64 = 1e-2;
/// Default floor in units of the cold cutoff frequency.
pub const DEFAULT_FLOOR_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DeltaPolicy {
    /// Maximize `J_C` over `Δ` at every evaluation.
    #[default]
    OptimizedEachStep,
    /// `ω₀ − Δ = c · T_C`.
    FixedOffset(f64),
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSettings {
    pub rtol: f64,
    pub atol: f64,
    /// Cap on `|ΔT|/T` per accepted step; keeps the sample spacing fine
    /// enough for exponent fits.
    pub max_relative_step: f64,
    pub max_halvings: u32,
    pub max_steps: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-16,
            max_relative_step: 0.05,
            max_halvings: 40,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoolingConfig {
    pub cold: BathSpec,
    pub hot: BathSpec,
    pub omega0: f64,
    pub initial_temperature: f64,
    pub t_floor: f64,
    pub t_max: f64,
    pub delta_policy: DeltaPolicy,
    pub integrator: IntegratorSettings,
}

impl CoolingConfig {
    /// Config with the default floor `10⁻⁶ ω_cut^C`, optimized offsets and
    /// default tolerances.
    pub fn new(
        cold: BathSpec,
        hot: BathSpec,
        omega0: f64,
        initial_temperature: f64,
        t_max: f64,
    ) -> Self {
        let t_floor = DEFAULT_FLOOR_RATIO * cold.omega_cut;
        Self {
            cold,
            hot,
            omega0,
            initial_temperature,
            t_floor,
            t_max,
            delta_policy: DeltaPolicy::default(),
            integrator: IntegratorSettings::default(),
        }
    }

    pub fn with_floor(mut self, t_floor: f64) -> Self {
        self.t_floor = t_floor;
        self
    }

    pub fn with_policy(mut self, policy: DeltaPolicy) -> Self {
        self.delta_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.cold.validate_at("cold")?;
        self.hot.validate_at("hot")?;
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::validation(
                "modulation.omega0",
                "must be finite and > 0",
            ));
        }
        if !(self.t_floor > 0.0 && self.t_floor.is_finite()) {
            return Err(Error::validation("run.t_floor", "must be finite and > 0"));
        }
        if !(self.initial_temperature > self.t_floor && self.initial_temperature.is_finite()) {
            return Err(Error::validation(
                "run.initial_temperature",
                "must be finite and > t_floor",
            ));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::validation("run.t_max", "must be > 0"));
        }
        match self.delta_policy {
            DeltaPolicy::OptimizedEachStep => {}
            DeltaPolicy::FixedOffset(c) if !(c > 0.0 && c.is_finite()) => {
                return Err(Error::validation(
                    "run.delta_policy.fixed_offset",
                    "must be finite and > 0",
                ))
            }
            DeltaPolicy::Constant(d) if !(d > 0.0 && d < self.omega0) => {
                return Err(Error::validation(
                    "run.delta_policy.constant",
                    "must lie in (0, omega0)",
                ))
            }
            _ => {}
        }
        let s = &self.integrator;
        if !(s.rtol > 0.0
            && s.atol >= 0.0
            && s.max_relative_step > 0.0
            && s.max_relative_step < 1.0)
        {
            return Err(Error::validation(
                "run.integrator",
                "need rtol > 0, atol >= 0, 0 < max_relative_step < 1",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingSample {
    pub t: f64,
    #[serde(rename = "T_C")]
    pub temperature: f64,
    pub delta: f64,
    #[serde(rename = "J_C")]
    pub current: f64,
    #[serde(rename = "c_V")]
    pub heat_capacity: f64,
}

impl CoolingSample {
    pub fn rate(&self) -> f64 {
        self.current / self.heat_capacity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoolingStatus {
    /// The floor was reached at `t_floor`. `t_zero` is the extrapolated time
    /// at which `T_C` would vanish under the power law fitted just above the
    /// floor; absent when that law only approaches zero asymptotically.
    ReachedFloor {
        t_floor: f64,
        t_zero: Option<f64>,
    },
    TimedOut,
    StalledNonCooling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoolingTrajectory {
    pub samples: Vec<CoolingSample>,
    pub status: CoolingStatus,
    /// Sum of the local error estimates of all accepted steps.
    pub error_estimate: f64,
    pub rejected_steps: usize,
}

impl CoolingTrajectory {
    /// `(T_C, dT_C/dt)` pairs for exponent fits.
    pub fn scaling_samples(&self) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .map(|s| (s.temperature, -s.rate()))
            .collect()
    }

    /// Samples with `lo ≤ T_C ≤ hi`.
    pub fn scaling_samples_between(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .filter(|s| s.temperature >= lo && s.temperature <= hi)
            .map(|s| (s.temperature, -s.rate()))
            .collect()
    }

    pub fn final_temperature(&self) -> f64 {
        self.samples.last().map_or(f64::NAN, |s| s.temperature)
    }

    pub fn final_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    pub fn t_zero(&self) -> Option<f64> {
        match self.status {
            CoolingStatus::ReachedFloor { t_zero, .. } => t_zero,
            _ => None,
        }
    }
}

/// Right-hand side data at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub delta: f64,
    pub current: f64,
    pub heat_capacity: f64,
}

impl Derivative {
    pub fn rate(&self) -> f64 {
        self.current / self.heat_capacity
    }
}

pub trait CoolingModel {
    fn evaluate(&self, temperature: f64) -> Result<Derivative>;
    /// Time scale on which the bath re-thermalizes; the quasi-static check
    /// measures temperature changes per this time.
    fn relaxation_time(&self) -> f64;
}

#[derive(Debug, Clone)]
pub struct TwoBandModel {
    pub cold: BathSpec,
    pub hot: BathSpec,
    pub omega0: f64,
    pub policy: DeltaPolicy,
}

impl CoolingModel for TwoBandModel {
    fn evaluate(&self, temperature: f64) -> Result<Derivative> {
        let cold = self.cold.clone().with_temperature(temperature);
        let (delta, current) = match self.policy {
            DeltaPolicy::OptimizedEachStep => {
                let opt = optimize_delta(temperature, self.omega0, &self.cold, &self.hot)?;
                (opt.delta, opt.current)
            }
            DeltaPolicy::FixedOffset(c) => {
                let lower = c * temperature;
                (
                    self.omega0 - lower,
                    two_band_current_at(&cold, &self.hot, self.omega0, lower),
                )
            }
            DeltaPolicy::Constant(delta) => (
                delta,
                two_band_current_at(&cold, &self.hot, self.omega0, self.omega0 - delta),
            ),
        };
        Ok(Derivative {
            delta,
            current,
            heat_capacity: heat_capacity(&cold, temperature)?,
        })
    }

    fn relaxation_time(&self) -> f64 {
        self.cold.memory_time()
    }
}

/// `dT/dt = −A T^γ` exactly, with unit heat capacity.
#[derive(Debug, Clone, Copy)]
pub struct PowerLawModel {
    pub amplitude: f64,
    pub gamma: f64,
    pub relaxation_time: f64,
}

impl CoolingModel for PowerLawModel {
    fn evaluate(&self, temperature: f64) -> Result<Derivative> {
        Ok(Derivative {
            delta: 0.0,
            current: self.amplitude * temperature.powf(self.gamma),
            heat_capacity: 1.0,
        })
    }

    fn relaxation_time(&self) -> f64 {
        self.relaxation_time
    }
}

/// Two-band cold current as a function of the lower sideband `ω₀ − Δ`;
/// `cold` must carry the current cold temperature.
fn two_band_current_at(cold: &BathSpec, hot: &BathSpec, omega0: f64, lower: f64) -> f64 {
    if !(lower > 0.0 && lower < omega0) {
        return f64::NEG_INFINITY;
    }
    let upper = 2.0 * omega0 - lower;
    let n_hot = bose(upper, hot.temperature);
    lower
        * DOMINANT_SIDEBAND_RATE
        * cold.bare_spectrum(lower)
        * (bose(lower, cold.temperature) - n_hot)
        / (2.0 * n_hot + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalDelta {
    pub delta: f64,
    pub current: f64,
}

/// Largest admissible lower sideband: below the cold cutoff, below `ω₀`,
/// and with the upper sideband `2ω₀ − (ω₀−Δ)` above the cold cutoff.
fn lower_sideband_ceiling(omega0: f64, cold: &BathSpec) -> f64 {
    cold.omega_cut
        .min(omega0)
        .min(2.0 * omega0 - cold.omega_cut)
}

/// Control offset maximizing the two-band cold current at `T_C`.
///
/// The lower sideband `ω₀ − Δ` is scanned on [`DELTA_SCAN_POINTS`]
/// log-spaced points in `(10⁻³ T_C, ω_c)`, `ω_c` from
/// `min(ω_cut^C, ω₀, 2ω₀ − ω_cut^C)`, then refined by golden-section search
/// in `ln(ω₀ − Δ)` between the neighbours of the best scan point.
pub fn optimize_delta(
    temperature: f64,
    omega0: f64,
    cold: &BathSpec,
    hot: &BathSpec,
) -> Result<OptimalDelta> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::invalid("optimize_delta needs T_C > 0"));
    }
    if !(omega0 > 0.0) {
        return Err(Error::invalid("omega0 must be > 0"));
    }
    let cold = cold.clone().with_temperature(temperature);
    let hi = lower_sideband_ceiling(omega0, &cold);
    let lo = 1e-3 * temperature;
    if !(hi > lo) {
        return Err(Error::invalid(format!(
            "empty control range: need min(omega_cut^C, omega0, 2 omega0 - omega_cut^C) > 1e-3 T_C, got {hi}"
        )));
    }
    let current = |ln_lower: f64| two_band_current_at(&cold, hot, omega0, ln_lower.exp());
    let (a, b) = (lo.ln(), hi.ln());
    let n = DELTA_SCAN_POINTS;
    // keep strictly inside the open interval
    let grid: Vec<f64> = (0..n)
        .map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| current(x)).collect();
    let (best, &best_value) = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty scan");
    if !(best_value > 0.0) {
        return Err(Error::NotCoolable {
            temperature,
            best_delta: omega0 - grid[best].exp(),
            best_current: best_value,
        });
    }
    let left = if best == 0 { a } else { grid[best - 1] };
    let right = if best + 1 == n { b } else { grid[best + 1] };
    let refined = maximize(current, left, right, DELTA_REL_WIDTH);
    let (x, value) = if refined.value >= best_value {
        (refined.x, refined.value)
    } else {
        (grid[best], best_value)
    };
    Ok(OptimalDelta {
        delta: omega0 - x.exp(),
        current: value,
    })
}

/// Integrates the physical model described by `config`.
pub fn integrate_cooling(config: &CoolingConfig) -> Result<CoolingTrajectory> {
    config.validate()?;
    let model = TwoBandModel {
        cold: config.cold.clone(),
        hot: config.hot.clone(),
        omega0: config.omega0,
        policy: config.delta_policy,
    };
    integrate_model(
        &model,
        config.initial_temperature,
        config.t_floor,
        config.t_max,
        &config.integrator,
    )
}

enum Probe {
    Model(Error),
    NonPositive,
}

fn sample(t: f64, temperature: f64, d: &Derivative) -> CoolingSample {
    CoolingSample {
        t,
        temperature,
        delta: d.delta,
        current: d.current,
        heat_capacity: d.heat_capacity,
    }
}

/// Adaptive Dormand-Prince integration of `dT/dt = model.rate(T)`.
///
/// A step is rejected and halved when its embedded error exceeds
/// `atol + rtol·T`, when `|ΔT|/T` exceeds `max_relative_step`, or when the
/// relative change per relaxation time, `(|ΔT|/T)·t_r/h`, exceeds
/// [`QUASI_STATIC_LIMIT`]. Since that last ratio is essentially independent of
/// `h`, a persistent violation ends in [`Error::Stiffness`] once
/// `max_halvings` is exhausted.
pub fn integrate_model<M: CoolingModel>(
    model: &M,
    initial_temperature: f64,
    t_floor: f64,
    t_max: f64,
    settings: &IntegratorSettings,
) -> Result<CoolingTrajectory> {
    if !(initial_temperature > t_floor && t_floor > 0.0 && t_max > 0.0) {
        return Err(Error::invalid("need T(0) > T_floor > 0 and t_max > 0"));
    }
    let relax = model.relaxation_time();
    let mut traj = CoolingTrajectory {
        samples: Vec::new(),
        status: CoolingStatus::TimedOut,
        error_estimate: 0.0,
        rejected_steps: 0,
    };
    let mut t = 0.0;
    let mut temp = initial_temperature;
    let mut deriv = match model.evaluate(temp) {
        Ok(d) => d,
        Err(Error::NotCoolable { .. }) => {
            traj.status = CoolingStatus::StalledNonCooling;
            return Ok(traj);
        }
        Err(e) => return Err(e),
    };
    traj.samples.push(sample(t, temp, &deriv));
    if !(deriv.current > 0.0) {
        traj.status = CoolingStatus::StalledNonCooling;
        return Ok(traj);
    }

    let rhs = |_t: f64, y: f64| -> std::result::Result<f64, Probe> {
        if !(y > 0.0) {
            return Err(Probe::NonPositive);
        }
        model.evaluate(y).map(|d| -d.rate()).map_err(Probe::Model)
    };

    let mut h = 0.1 * settings.max_relative_step * temp / deriv.rate();
    let mut halvings = 0u32;
    let mut steps = 0usize;
    loop {
        if t >= t_max {
            traj.status = CoolingStatus::TimedOut;
            return Ok(traj);
        }
        if steps >= settings.max_steps {
            return Err(Error::Accuracy {
                what: "cooling integration exceeded max_steps".into(),
                achieved: t,
                bound: t_max,
            });
        }
        let h_try = h.min(t_max - t);
        let dy0 = -deriv.rate();
        let reject =
            |reason: String, traj: &mut CoolingTrajectory, halvings: &mut u32| -> Result<()> {
                traj.rejected_steps += 1;
                *halvings += 1;
                if *halvings > settings.max_halvings {
                    return Err(Error::Stiffness {
                        t,
                        halvings: *halvings - 1,
                        reason,
                        trajectory: Box::new(traj.clone()),
                    });
                }
                Ok(())
            };
        let step = match dopri_step(rhs, t, temp, dy0, h_try) {
            Ok(s) => s,
            Err(Probe::NonPositive) => {
                reject(
                    "trial temperature left T > 0".into(),
                    &mut traj,
                    &mut halvings,
                )?;
                h = 0.5 * h_try;
                continue;
            }
            Err(Probe::Model(Error::NotCoolable { .. })) => {
                // stage leaves the coolable range: shrink unless already tiny
                reject(
                    "stage temperature not coolable".into(),
                    &mut traj,
                    &mut halvings,
                )?;
                h = 0.5 * h_try;
                continue;
            }
            Err(Probe::Model(e)) => return Err(e),
        };
        let scale = settings.atol + settings.rtol * temp.abs();
        let err_ratio = step.error.abs() / scale;
        let relative = (step.y - temp).abs() / temp;
        let quasi = relative * relax / h_try;
        let reached = step.y <= t_floor;
        if quasi > QUASI_STATIC_LIMIT {
            reject(
                format!("quasi-static limit: relative change {quasi:e} per relaxation time"),
                &mut traj,
                &mut halvings,
            )?;
            h = 0.5 * h_try;
            continue;
        }
        if !reached && (err_ratio > 1.0 || relative > settings.max_relative_step || !(step.y > 0.0))
        {
            reject(
                format!("local error ratio {err_ratio:e}, relative change {relative:e}"),
                &mut traj,
                &mut halvings,
            )?;
            h = 0.5 * h_try;
            continue;
        }
        if reached {
            return land_on_floor(model, &mut traj, t, temp, dy0, h_try, t_floor);
        }
        halvings = 0;
        steps += 1;
        t += h_try;
        temp = step.y;
        traj.error_estimate += step.error.abs();
        deriv = match model.evaluate(temp) {
            Ok(d) => d,
            Err(Error::NotCoolable { .. }) => {
                traj.status = CoolingStatus::StalledNonCooling;
                return Ok(traj);
            }
            Err(e) => return Err(e),
        };
        traj.samples.push(sample(t, temp, &deriv));
        if !(deriv.current > 0.0) {
            traj.status = CoolingStatus::StalledNonCooling;
            return Ok(traj);
        }
        let growth = if err_ratio > 0.0 {
            (0.9 * err_ratio.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        let cap = 0.9 * settings.max_relative_step * temp / deriv.rate();
        h = (h_try * growth).min(cap);
    }
}

/// Shortens the final step so it ends on `T_floor`, then extrapolates `t_zero`.
fn land_on_floor<M: CoolingModel>(
    model: &M,
    traj: &mut CoolingTrajectory,
    t: f64,
    temp: f64,
    dy0: f64,
    h_full: f64,
    t_floor: f64,
) -> Result<CoolingTrajectory> {
    let rhs = |_t: f64, y: f64| -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::invalid("non-positive temperature"));
        }
        model.evaluate(y).map(|d| -d.rate())
    };
    // y(h) decreases in h; bisect with a linear first guess
    let (mut lo, mut hi) = (0.0, h_full);
    let mut h =
        h_full * (temp - t_floor) / (temp - (temp + dy0 * h_full).max(0.0)).max(f64::MIN_POSITIVE);
    h = h.clamp(0.0, h_full);
    let mut landed = None;
    for _ in 0..200 {
        if !(h > lo && h < hi) {
            h = 0.5 * (lo + hi);
        }
        match dopri_step(rhs, t, temp, dy0, h) {
            Ok(s) if s.y > 0.0 => {
                if (s.y - t_floor).abs() <= 1e-10 * t_floor || (hi - lo) <= 1e-14 * h_full {
                    landed = Some((h, s));
                    break;
                }
                if s.y > t_floor {
                    lo = h;
                } else {
                    hi = h;
                }
                // secant-like refinement from the current slope
                h += (s.y - t_floor) / s.dy_end.abs().max(f64::MIN_POSITIVE);
            }
            _ => {
                hi = h;
                h = 0.5 * (lo + hi);
            }
        }
    }
    let (h, step) = landed.ok_or_else(|| Error::Accuracy {
        what: "could not land the final step on T_floor".into(),
        achieved: hi - lo,
        bound: 1e-14 * h_full,
    })?;
    let t_floor_time = t + h;
    traj.error_estimate += step.error.abs();
    let deriv = model.evaluate(step.y)?;
    traj.samples.push(sample(t_floor_time, step.y, &deriv));
    traj.status = CoolingStatus::ReachedFloor {
        t_floor: t_floor_time,
        t_zero: extrapolate_t_zero(traj, t_floor, t_floor_time),
    };
    Ok(traj.clone())
}

/// Fits the power law on the samples within a decade and a half above the
/// floor and integrates it from the floor down to zero.
fn extrapolate_t_zero(traj: &CoolingTrajectory, t_floor: f64, t_at_floor: f64) -> Option<f64> {
    let mut window = traj.scaling_samples_between(t_floor, t_floor * 10f64.powf(1.5));
    if window.len() < 10 {
        let n = traj.samples.len();
        window = traj.samples[n.saturating_sub(10)..]
            .iter()
            .map(|s| (s.temperature, -s.rate()))
            .collect();
    }
    let xs: Vec<f64> = window.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = window.iter().map(|p| (-p.1).ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    let gamma = fit.slope;
    if !(gamma < 1.0) {
        return None;
    }
    let a = fit.intercept.exp();
    Some(t_at_floor + t_floor.powf(1.0 - gamma) / (a * (1.0 - gamma)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub gamma_eff: f64,
    pub ln_a_eff: f64,
    pub a_eff: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
    pub samples: usize,
    pub decades: f64,
}

/// Least-squares fit of `ln(−dT/dt) = ln A + γ ln T`.
pub fn fit_scaling_exponent(samples: &[(f64, f64)]) -> Result<ScalingFit> {
    if samples.len() < 10 {
        return Err(Error::invalid(format!(
            "scaling fit needs at least 10 samples, got {}",
            samples.len()
        )));
    }
    if let Some(p) = samples.iter().find(|p| !(p.1 < 0.0) || !(p.0 > 0.0)) {
        return Err(Error::invalid(format!(
            "scaling fit needs T > 0 and dT/dt < 0, got ({}, {})",
            p.0, p.1
        )));
    }
    let (mut t_lo, mut t_hi) = (f64::INFINITY, 0.0f64);
    for p in samples {
        t_lo = t_lo.min(p.0);
        t_hi = t_hi.max(p.0);
    }
    let decades = (t_hi / t_lo).log10();
    if decades < 1.5 {
        return Err(Error::invalid(format!(
            "scaling fit needs 1.5 decades of T, got {decades:.3}"
        )));
    }
    let xs: Vec<f64> = samples.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|p| (-p.1).ln()).collect();
    let LineFit {
        slope,
        intercept,
        r_squared,
        slope_stderr,
        n,
    } = fit_line(&xs, &ys).ok_or_else(|| Error::invalid("degenerate scaling samples"))?;
    Ok(ScalingFit {
        gamma_eff: slope,
        ln_a_eff: intercept,
        a_eff: intercept.exp(),
        r_squared,
        slope_stderr,
        samples: n,
        decades,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baths::{BathPreset, CutoffShape};

    fn hot() -> BathSpec {
        BathSpec::hot(BathPreset::HotCubic).with_temperature(1.0)
    }

    fn cold(preset: BathPreset) -> BathSpec {
        BathSpec::cold(preset).with_prefactor(1e-9)
    }

    #[test]
    fn power_law_toy_matches_closed_form() {
        let model = PowerLawModel {
            amplitude: 0.3,
            gamma: 0.75,
            relaxation_time: 1e-3,
        };
        let t0 = 1.0;
        let traj = integrate_model(&model, t0, 1e-4, 1e3, &IntegratorSettings::default()).unwrap();
        assert!(matches!(traj.status, CoolingStatus::ReachedFloor { .. }));
        let exact = |t: f64| (t0.powf(0.25) - 0.3 * 0.25 * t).max(0.0).powf(4.0);
        for s in &traj.samples {
            let e = exact(s.t);
            assert!(
                (s.temperature - e).abs() <= 1e-6 * e + 1e-12,
                "{} {} {}",
                s.t,
                s.temperature,
                e
            );
        }
        let t_zero_exact = t0.powf(0.25) / (0.3 * 0.25);
        let t_zero = traj.t_zero().unwrap();
        assert!((t_zero - t_zero_exact).abs() < 1e-6 * t_zero_exact);
    }

    #[test]
    fn exponential_toy_times_out() {
        let model = PowerLawModel {
            amplitude: 1.0,
            gamma: 1.0,
            relaxation_time: 1e-3,
        };
        let traj = integrate_model(&model, 1.0, 1e-6, 5.0, &IntegratorSettings::default()).unwrap();
        assert_eq!(traj.status, CoolingStatus::TimedOut);
        assert!((traj.final_time() - 5.0).abs() < 1e-12);
        assert!((traj.final_temperature() - (-5.0f64).exp()).abs() < 1e-8 * (-5.0f64).exp());
    }

    #[test]
    fn quasi_static_violation_is_stiffness() {
        let model = PowerLawModel {
            amplitude: 1.0,
            gamma: 1.0,
            relaxation_time: 1.0,
        };
        let err =
            integrate_model(&model, 1.0, 1e-3, 10.0, &IntegratorSettings::default()).unwrap_err();
        match err {
            Error::Stiffness { trajectory, .. } => assert_eq!(trajectory.samples.len(), 1),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn exact_power_law_fit() {
        let samples: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let t = 10f64.powf(-(i as f64) * 0.1);
                (t, -2.5 * t)
            })
            .collect();
        let fit = fit_scaling_exponent(&samples).unwrap();
        assert!((fit.gamma_eff - 1.0).abs() < 1e-8);
        assert!((fit.a_eff - 2.5).abs() < 1e-8);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let short: Vec<(f64, f64)> = (0..40).map(|i| (1.0 + i as f64 * 0.01, -1.0)).collect();
        assert!(fit_scaling_exponent(&short).is_err());
        let mut heating: Vec<(f64, f64)> = (0..40)
            .map(|i| (10f64.powf(-(i as f64) * 0.1), -1.0))
            .collect();
        heating[3].1 = 0.5;
        assert!(fit_scaling_exponent(&heating).is_err());
        assert!(fit_scaling_exponent(&heating[..5]).is_err());
    }

    #[test]
    fn optimum_beats_dense_grid_and_tracks_temperature() {
        let c = cold(BathPreset::Magnon);
        let h = hot();
        let mut last_lower = f64::INFINITY;
        for k in 0..9 {
            let t_c = 1e-2 * 10f64.powf(-0.25 * k as f64);
            let opt = optimize_delta(t_c, 1.0, &c, &h).unwrap();
            let cc = c.clone().with_temperature(t_c);
            let dense_max = (1..20_000)
                .map(|i| 1e-3 * t_c * (1e3 / t_c).powf(i as f64 / 20_000.0))
                .map(|l| two_band_current_at(&cc, &h, 1.0, l))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(opt.current >= dense_max * (1.0 - 1e-9));
            let lower = 1.0 - opt.delta;
            assert!(lower < last_lower);
            let ratio = lower / t_c;
            assert!((0.1..=10.0).contains(&ratio), "{ratio}");
            last_lower = lower;
        }
    }

    #[test]
    fn not_coolable_when_hot_bath_is_too_warm() {
        // cooling needs ω₀ − Δ < 2 T_C/T_H = 2e-7, below the scanned range
        let err = optimize_delta(
            1e-2,
            1.0,
            &cold(BathPreset::Magnon),
            &hot().with_temperature(1e5),
        )
        .unwrap_err();
        match err {
            Error::NotCoolable { best_current, .. } => assert!(best_current <= 0.0),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn empty_control_range() {
        let c = cold(BathPreset::Magnon).with_cutoff(3.0, CutoffShape::Hard);
        assert!(optimize_delta(1e-2, 1.0, &c, &hot()).is_err());
    }

    #[test]
    fn stall_when_policy_cannot_cool() {
        let cfg = CoolingConfig::new(cold(BathPreset::Magnon), hot(), 1.0, 1e-2, 1e12)
            .with_policy(DeltaPolicy::Constant(0.5));
        // ω₀ − Δ = 0.5 ≫ T_C: n^C is negligible next to n^H(1.5)
        let traj = integrate_cooling(&cfg).unwrap();
        assert_eq!(traj.status, CoolingStatus::StalledNonCooling);
        assert_eq!(traj.samples.len(), 1);
    }

    #[test]
    fn config_validation_paths() {
        let base = CoolingConfig::new(cold(BathPreset::Magnon), hot(), 1.0, 1e-2, 1e3);
        let bad = base.clone().with_floor(0.1);
        match bad.validate().unwrap_err() {
            Error::Validation { path, .. } => assert_eq!(path, "run.initial_temperature"),
            e => panic!("{e:?}"),
        }
        let bad = base.with_policy(DeltaPolicy::FixedOffset(-1.0));
        assert!(bad.validate().is_err());
    }

    #[test]
    fn magnon_cooling_is_monotone_and_reaches_floor() {
        let cfg =
            CoolingConfig::new(cold(BathPreset::Magnon), hot(), 1.0, 1e-2, 1e12).with_floor(1e-5);
        let traj = integrate_cooling(&cfg).unwrap();
        assert!(matches!(traj.status, CoolingStatus::ReachedFloor { .. }));
        for w in traj.samples.windows(2) {
            assert!(w[1].t > w[0].t);
            assert!(w[1].temperature < w[0].temperature);
            assert!(w[1].current > 0.0);
        }
    }
}
