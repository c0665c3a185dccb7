//! Power-law bosonic baths.
//!
//! A bath couples with `|g(ω)|² ∝ ω^γ` to modes of density `ρ(ω) ∝ ω^{d−1}`,
//! so its zero-temperature spectrum is `G₀(ω) = κ ω^{γ+d−1} f_cut(ω)` and the
//! thermal coupling spectrum is `G_T(ω) = G₀(ω)(n(ω) + 1)` for `ω > 0`.
//! Negative frequencies follow from detailed balance,
//! `G_T(−ω) = e^{−ω/T} G_T(ω) = G₀(ω) n(ω)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::{adaptive, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathLabel {
    Cold,
    Hot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffShape {
    /// `1` for `ω ≤ ω_cut`, `0` above.
    Hard,
    /// `e^{−ω/ω_cut}`.
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSpec {
    pub label: BathLabel,
    /// Coupling-dispersion exponent γ.
    pub gamma: f64,
    /// Mode-density exponent d.
    pub dim: f64,
    /// Coupling strength κ; absorbs the inverse bath volume.
    pub prefactor: f64,
    pub omega_cut: f64,
    pub cutoff_shape: CutoffShape,
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathPreset {
    /// γ = 1.
    AcousticPhonon,
    /// Disordered-medium phonons with 0 < γ < 1.
    Fracton { gamma: f64 },
    /// γ = 0.
    Magnon,
    /// Hot dump with `G₀ ∝ ω³` (γ = 1, d = 3).
    HotCubic,
}

impl BathPreset {
    /// Expands to a bath with `d = 3`, unit prefactor and temperature zero.
    /// Cold presets get a hard cutoff at 1; the hot dump an exponential
    /// cutoff at 100.
    pub fn spec(self, label: BathLabel) -> BathSpec {
        let (gamma, cutoff_shape, omega_cut) = match self {
            BathPreset::AcousticPhonon => (1.0, CutoffShape::Hard, 1.0),
            BathPreset::Fracton { gamma } => (gamma, CutoffShape::Hard, 1.0),
            BathPreset::Magnon => (0.0, CutoffShape::Hard, 1.0),
            BathPreset::HotCubic => (1.0, CutoffShape::Exponential, 100.0),
        };
        BathSpec {
            label,
            gamma,
            dim: 3.0,
            prefactor: 1.0,
            omega_cut,
            cutoff_shape,
            temperature: 0.0,
        }
    }

    pub fn validate(self) -> Result<()> {
        if let BathPreset::Fracton { gamma } = self {
            if !(gamma > 0.0 && gamma < 1.0) {
                return Err(Error::validation(
                    "preset.fracton.gamma",
                    "must lie in (0, 1)",
                ));
            }
        }
        Ok(())
    }
}

impl BathSpec {
    pub fn cold(preset: BathPreset) -> Self {
        preset.spec(BathLabel::Cold)
    }

    pub fn hot(preset: BathPreset) -> Self {
        preset.spec(BathLabel::Hot)
    }

    pub fn with_temperature(mut self, t: f64) -> Self {
        self.temperature = t;
        self
    }

    pub fn with_prefactor(mut self, k: f64) -> Self {
        self.prefactor = k;
        self
    }

    pub fn with_dim(mut self, d: f64) -> Self {
        self.dim = d;
        self
    }

    pub fn with_gamma(mut self, g: f64) -> Self {
        self.gamma = g;
        self
    }

    pub fn with_cutoff(mut self, omega_cut: f64, shape: CutoffShape) -> Self {
        self.omega_cut = omega_cut;
        self.cutoff_shape = shape;
        self
    }

    /// Validates the invariants; `prefix` names the field path in errors.
    pub fn validate_at(&self, prefix: &str) -> Result<()> {
        let field = |f: &str| format!("{prefix}.{f}");
        let finite = |v: f64, f: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(field(f), "must be finite"))
            }
        };
        finite(self.gamma, "gamma")?;
        finite(self.dim, "dim")?;
        finite(self.prefactor, "prefactor")?;
        finite(self.omega_cut, "omega_cut")?;
        finite(self.temperature, "temperature")?;
        if self.gamma < 0.0 {
            return Err(Error::validation(field("gamma"), "must be >= 0"));
        }
        if self.dim <= 0.0 {
            return Err(Error::validation(field("dim"), "must be > 0"));
        }
        if self.prefactor <= 0.0 {
            return Err(Error::validation(field("prefactor"), "must be > 0"));
        }
        if self.omega_cut <= 0.0 {
            return Err(Error::validation(field("omega_cut"), "must be > 0"));
        }
        if self.temperature < 0.0 {
            return Err(Error::validation(field("temperature"), "must be >= 0"));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let prefix = match self.label {
            BathLabel::Cold => "cold",
            BathLabel::Hot => "hot",
        };
        self.validate_at(prefix)
    }

    /// Spectral exponent `γ + d − 1` of `G₀`.
    pub fn spectral_exponent(&self) -> f64 {
        self.gamma + self.dim - 1.0
    }

    pub fn cutoff(&self, omega: f64) -> f64 {
        match self.cutoff_shape {
            CutoffShape::Hard => {
                if omega <= self.omega_cut {
                    1.0
                } else {
                    0.0
                }
            }
            CutoffShape::Exponential => (-omega / self.omega_cut).exp(),
        }
    }

    /// Zero-temperature spectrum `G₀(ω)` for `ω > 0`.
    pub fn bare_spectrum(&self, omega: f64) -> f64 {
        self.prefactor * omega.powf(self.spectral_exponent()) * self.cutoff(omega)
    }

    /// Bath memory time, taken as the inverse spectral width `1/ω_cut`.
    pub fn memory_time(&self) -> f64 {
        1.0 / self.omega_cut
    }

    /// Frequency above which `G₀` is negligible (or exactly zero).
    pub(crate) fn support_edge(&self) -> f64 {
        match self.cutoff_shape {
            CutoffShape::Hard => self.omega_cut,
            CutoffShape::Exponential => {
                self.omega_cut * (45.0 + 2.0 * self.spectral_exponent().max(0.0))
            }
        }
    }
}

/// Bose-Einstein occupancy `1/(e^{ω/T} − 1)`; zero at `T = 0`.
pub fn occupancy(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::invalid(format!(
            "occupancy needs omega > 0, got {omega}"
        )));
    }
    if temperature < 0.0 {
        return Err(Error::invalid("temperature must be >= 0"));
    }
    Ok(bose(omega, temperature))
}

/// Unchecked occupancy for internal hot paths (`omega > 0`, `T ≥ 0`).
pub(crate) fn bose(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return 0.0;
    }
    let x = omega / temperature;
    if x > 700.0 {
        (-x).exp()
    } else {
        1.0 / x.exp_m1()
    }
}

/// Thermal coupling spectrum `G_T(ω)` on `ω ≠ 0`.
pub fn coupling_spectrum(bath: &BathSpec, omega: f64) -> Result<f64> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::invalid(format!(
            "coupling spectrum is defined on finite omega != 0, got {omega}"
        )));
    }
    Ok(spectrum_unchecked(bath, omega))
}

pub(crate) fn spectrum_unchecked(bath: &BathSpec, omega: f64) -> f64 {
    if omega > 0.0 {
        let g0 = bath.bare_spectrum(omega);
        if g0 == 0.0 {
            return 0.0;
        }
        g0 * (bose(omega, bath.temperature) + 1.0)
    } else {
        if bath.temperature == 0.0 {
            return 0.0;
        }
        let w = -omega;
        let g0 = bath.bare_spectrum(w);
        if g0 == 0.0 {
            return 0.0;
        }
        g0 * bose(w, bath.temperature)
    }
}

/// Heat capacity per unit volume `c_V = ∂/∂T ∫ ω ρ(ω) f_cut(ω) n(ω) dω`
/// with `ρ(ω) = ω^{d−1}`.
///
/// In the scaled variable `x = ω/T` this is
/// `T^d ∫ x^{d+1} / (4 sinh²(x/2)) f_cut(Tx) dx`.
pub fn heat_capacity(bath: &BathSpec, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::invalid(format!(
            "heat capacity needs T > 0, got {temperature}"
        )));
    }
    let d = bath.dim;
    let x_decay = 60.0 + 2.0 * d;
    let x_max = match bath.cutoff_shape {
        CutoffShape::Hard => (bath.omega_cut / temperature).min(x_decay),
        CutoffShape::Exponential => x_decay,
    };
    let integrand = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        let s = (0.5 * x).sinh();
        x.powf(d + 1.0) / (4.0 * s * s) * bath.cutoff(temperature * x)
    };
    let mut breaks = vec![0.0];
    for b in [1.0, d + 1.0] {
        if b < x_max {
            breaks.push(b);
        }
    }
    breaks.push(x_max);
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-11,
        max_intervals: 2000,
    };
    let est = adaptive(integrand, &breaks, tol)?;
    Ok(temperature.powf(d) * est.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// `G_T^C(ω₀+Δ) / G_T^H(ω₀+Δ)`
    pub cold_leak_upper: f64,
    /// `G_T^H(ω₀−Δ) / G_T^H(ω₀+Δ)`
    pub hot_lower_over_upper: f64,
    /// `G_T^C(ω₀−Δ) / G_T^H(ω₀+Δ)`
    pub cold_lower_over_hot_upper: f64,
    /// `ω_cut^C < ω₀ + Δ`
    pub cold_cutoff_below_upper: bool,
    pub threshold: f64,
    pub two_band: bool,
}

pub const DEFAULT_SEPARATION_THRESHOLD: f64 = 1e-2;

/// Checks the two-band conditions: the upper sideband sees only the hot
/// bath, and the hot spectrum dominates at the upper sideband.
pub fn validate_separation(
    cold: &BathSpec,
    hot: &BathSpec,
    omega0: f64,
    delta: f64,
    threshold: f64,
) -> SeparationReport {
    let g = |b: &BathSpec, w: f64| coupling_spectrum(b, w).unwrap_or(f64::NAN);
    let upper = omega0 + delta;
    let lower = omega0 - delta;
    let hot_upper = g(hot, upper);
    let cold_leak_upper = g(cold, upper) / hot_upper;
    let hot_lower_over_upper = g(hot, lower) / hot_upper;
    let cold_lower_over_hot_upper = g(cold, lower) / hot_upper;
    let cold_cutoff_below_upper = cold.omega_cut < upper;
    let ok = |r: f64| r.is_finite() && r < threshold;
    let two_band = ok(cold_leak_upper)
        && ok(hot_lower_over_upper)
        && ok(cold_lower_over_hot_upper)
        && cold_cutoff_below_upper;
    SeparationReport {
        cold_leak_upper,
        hot_lower_over_upper,
        cold_lower_over_hot_upper,
        cold_cutoff_below_upper,
        threshold,
        two_band,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::fit::fit_line;

    #[test]
    fn occupancy_values() {
        let n = occupancy(1.0, 1.0).unwrap();
        assert!((n - 1.0 / (std::f64::consts::E - 1.0)).abs() < 1e-15);
        assert!((n - 0.581977).abs() < 1e-6);
        assert_eq!(occupancy(3.0, 0.0).unwrap(), 0.0);
        assert!(occupancy(0.0, 1.0).is_err());
        assert!(occupancy(-1.0, 1.0).is_err());
        // deep Boltzmann tail: no overflow
        let tail = occupancy(720.0, 1.0).unwrap();
        assert!(tail > 0.0 && tail < 1e-300);
        assert_eq!(occupancy(800.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn occupancy_high_temperature_series() {
        // 1/(e^x − 1) = 1/x − 1/2 + x/12 + …
        let x = 1e-6;
        let n = occupancy(x, 1.0).unwrap();
        let series = 1.0 / x - 0.5 + x / 12.0;
        assert!((n - series).abs() / series < 1e-12);
        assert!((n - 1e6).abs() / 1e6 < 1e-4);
    }

    #[test]
    fn detailed_balance_at_reference_point() {
        let bath = BathSpec::cold(BathPreset::Magnon)
            .with_cutoff(10.0, CutoffShape::Hard)
            .with_temperature(0.5);
        let fwd = coupling_spectrum(&bath, 1.0).unwrap();
        let back = coupling_spectrum(&bath, -1.0).unwrap();
        assert!((fwd - (1.0f64 / 0.5).exp() * back).abs() / fwd < 1e-13);
    }

    #[test]
    fn zero_temperature_has_no_absorption() {
        let bath = BathSpec::cold(BathPreset::AcousticPhonon);
        assert_eq!(coupling_spectrum(&bath, -0.3).unwrap(), 0.0);
        assert!(coupling_spectrum(&bath, 0.0).is_err());
    }

    #[test]
    fn magnon_high_temperature_limit() {
        let bath = BathSpec::cold(BathPreset::Magnon).with_cutoff(10.0, CutoffShape::Hard);
        let omega: f64 = 2.0;
        let mut prev = f64::INFINITY;
        for t in [1e2, 1e4, 1e6] {
            let b = bath.clone().with_temperature(t);
            let ratio = coupling_spectrum(&b, omega).unwrap() / (t * omega.powf(b.dim - 2.0));
            let dev = (ratio - 1.0).abs();
            assert!(dev < prev);
            prev = dev;
        }
        assert!(prev < 1e-5);
    }

    #[test]
    fn hard_cutoff_is_exact_zero_above() {
        let bath = BathSpec::cold(BathPreset::Magnon).with_temperature(0.3);
        assert_eq!(coupling_spectrum(&bath, 1.0001).unwrap(), 0.0);
        assert!(coupling_spectrum(&bath, 0.9999).unwrap() > 0.0);
    }

    fn low_t_slope(bath: &BathSpec) -> f64 {
        let ts: Vec<f64> = (0..=10)
            .map(|i| 1e-3 * 10f64.powf(i as f64 / 10.0) * bath.omega_cut)
            .collect();
        let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
        let ys: Vec<f64> = ts
            .iter()
            .map(|&t| heat_capacity(bath, t).unwrap().ln())
            .collect();
        fit_line(&xs, &ys).unwrap().slope
    }

    #[test]
    fn heat_capacity_low_temperature_exponent() {
        for d in [1.0, 2.0, 3.0] {
            let bath = BathSpec::cold(BathPreset::AcousticPhonon).with_dim(d);
            let slope = low_t_slope(&bath);
            assert!((slope - d).abs() < 0.05, "d = {d}: slope {slope}");
        }
    }

    #[test]
    fn heat_capacity_one_dimensional_closed_form() {
        // ∫₀^∞ ω n dω = π² T² / 6, so c_V = π² T / 3 when ω_cut ≫ T
        let bath = BathSpec::cold(BathPreset::Magnon).with_dim(1.0);
        for t in [1e-3, 3e-3, 1e-2] {
            let c = heat_capacity(&bath, t).unwrap();
            let exact = std::f64::consts::PI.powi(2) * t / 3.0;
            assert!((c - exact).abs() / exact < 1e-9, "T = {t}");
        }
    }

    #[test]
    fn heat_capacity_monotone_and_positive() {
        let bath = BathSpec::cold(BathPreset::Magnon);
        let a = heat_capacity(&bath, 0.01).unwrap();
        let b = heat_capacity(&bath, 0.02).unwrap();
        assert!(a > 0.0 && b > a);
        assert!(heat_capacity(&bath, 0.0).is_err());
    }

    #[test]
    fn separation_hard_cutoff_leak_is_zero() {
        let omega0 = 1.0;
        let cold = BathSpec::cold(BathPreset::Magnon)
            .with_cutoff(omega0, CutoffShape::Hard)
            .with_temperature(0.1);
        let hot = BathSpec::hot(BathPreset::HotCubic).with_temperature(0.5);
        let r = validate_separation(&cold, &hot, omega0, 0.9, DEFAULT_SEPARATION_THRESHOLD);
        assert_eq!(r.cold_leak_upper, 0.0);
        assert!(r.cold_cutoff_below_upper);
    }

    #[test]
    fn separation_identical_spectra_not_two_band() {
        let cold = BathSpec::cold(BathPreset::HotCubic).with_temperature(1.0);
        let mut hot = cold.clone();
        hot.label = BathLabel::Hot;
        let r = validate_separation(&cold, &hot, 10.0, 5.0, DEFAULT_SEPARATION_THRESHOLD);
        assert!((r.cold_leak_upper - 1.0).abs() < 1e-15);
        assert!(!r.two_band);
    }

    #[test]
    fn separation_hot_cubic_ratio() {
        let cold = BathSpec::cold(BathPreset::Magnon).with_temperature(0.1);
        let hot = BathSpec::hot(BathPreset::HotCubic)
            .with_cutoff(1e6, CutoffShape::Hard)
            .with_temperature(1e-3);
        let r = validate_separation(&cold, &hot, 10.0, 5.0, DEFAULT_SEPARATION_THRESHOLD);
        assert!((r.hot_lower_over_upper - (5.0f64 / 15.0).powi(3)).abs() < 1e-12);
        assert!((r.hot_lower_over_upper - 0.037).abs() < 1e-3);
    }
}
