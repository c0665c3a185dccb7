//! Steady state of the averaged polarization equation and its heat currents.
//!
//! With `pe = ½ + S` and `pg = ½ − S`, each (bath, sideband) channel carries
//! the polarization flux `Ṡ_m^b = R_g^{b,m} pg − R_e^{b,m} pe` and the heat
//! `(ω₀ + mδ) Ṡ_m^b` extracted from bath `b`. A positive cold current means
//! refrigeration. The polarization fluxes cancel at steady state; the heat
//! currents do not, the difference being supplied by the modulation.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::baths::{bose, spectrum_unchecked, validate_separation, BathLabel, BathSpec};
use crate::error::{Error, Result};
use crate::floquet::HarmonicSpectrum;
use crate::rates::{averaged_rates_with, BathChannel, RateOptions, RateTable};

/// Residual of the polarization equation accepted as steady, relative to
/// the total rate.
const RESIDUAL_TOL: f64 = 1e-9;
/// Entropy production below `−SIGMA_TOL · max(1, Σ|J_b/T_b|)` is a violation.
pub const SIGMA_TOL: f64 = 1e-12;

/// Net cold current below this fraction of the gross energy exchanged with
/// all baths is treated as zero when deciding whether the device cools.
pub const COOLING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    /// `S = (ρ_ee − ρ_gg)/2`.
    pub polarization: f64,
    /// `ρ_ee`, kept separately because `½ + S` loses it when `S ≈ −½`.
    pub excited: f64,
    pub ground: f64,
}

impl QubitState {
    pub fn from_polarization(polarization: f64) -> Self {
        Self {
            polarization,
            excited: 0.5 + polarization,
            ground: 0.5 - polarization,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicCurrent {
    pub bath: usize,
    pub label: BathLabel,
    pub m: i64,
    pub frequency: f64,
    /// Upward flow `R_g p_g` through this channel.
    pub excitation: f64,
    /// Downward flow `R_e p_e`.
    pub relaxation: f64,
    pub polarization_flux: f64,
    pub heat: f64,
}

impl HarmonicCurrent {
    fn new(
        bath: usize,
        label: BathLabel,
        m: i64,
        frequency: f64,
        excitation: f64,
        relaxation: f64,
    ) -> Self {
        let flux = excitation - relaxation;
        Self {
            bath,
            label,
            m,
            frequency,
            excitation,
            relaxation,
            polarization_flux: flux,
            heat: frequency * flux,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateReport {
    #[serde(rename = "S_ss")]
    pub polarization: f64,
    /// Heat extracted from the cold bath(s) per unit time.
    #[serde(rename = "J_C")]
    pub cold_current: f64,
    #[serde(rename = "J_H")]
    pub hot_current: f64,
    /// `−Σ_b J_b/T_b`; absent when a bath sits at zero temperature.
    #[serde(rename = "sigma")]
    pub entropy_production: Option<f64>,
    pub cooling: bool,
    pub harmonics: Vec<HarmonicCurrent>,
}

/// `S_ss = (R̄_g − R̄_e) / (2 (R̄_g + R̄_e))`.
pub fn steady_polarization(table: &RateTable) -> Result<QubitState> {
    let total = table.emission_total + table.absorption_total;
    if !(total > 0.0) {
        return Err(Error::NoSteadyState);
    }
    Ok(QubitState {
        polarization: (table.absorption_total - table.emission_total) / (2.0 * total),
        excited: table.absorption_total / total,
        ground: table.emission_total / total,
    })
}

/// `dS/dt` of the averaged equation at `state`.
pub fn polarization_rate(table: &RateTable, state: QubitState) -> f64 {
    -(table.absorption_total + table.emission_total) * state.polarization
        + 0.5 * (table.absorption_total - table.emission_total)
}

pub fn heat_currents(table: &RateTable, state: QubitState) -> Result<SteadyStateReport> {
    let total = table.emission_total + table.absorption_total;
    let residual = polarization_rate(table, state);
    if residual.abs() > RESIDUAL_TOL * total.max(f64::MIN_POSITIVE) {
        return Err(Error::InconsistentInput(format!(
            "polarization {} is not stationary for this rate table (dS/dt = {residual:e})",
            state.polarization
        )));
    }
    let (pe, pg) = (state.excited, state.ground);
    if !(pe >= 0.0
        && pg >= 0.0
        && (pe + pg - 1.0).abs() <= 1e-12
        && (pe - pg - 2.0 * state.polarization).abs() <= 1e-12)
    {
        return Err(Error::InconsistentInput(format!(
            "populations ({pe}, {pg}) do not match polarization {}",
            state.polarization
        )));
    }
    let harmonics: Vec<HarmonicCurrent> = table
        .entries
        .iter()
        .map(|e| {
            HarmonicCurrent::new(
                e.bath,
                table.label_of(e),
                e.m,
                e.frequency,
                e.absorption * pg,
                e.emission * pe,
            )
        })
        .collect();
    Ok(assemble(state.polarization, &table.baths, harmonics))
}

fn assemble(
    polarization: f64,
    baths: &[BathChannel],
    harmonics: Vec<HarmonicCurrent>,
) -> SteadyStateReport {
    let sum_for = |label| {
        harmonics
            .iter()
            .filter(|h| h.label == label)
            .map(|h| h.heat)
            .sum::<f64>()
    };
    let cold_current = sum_for(BathLabel::Cold);
    let hot_current = sum_for(BathLabel::Hot);
    let gross: f64 = harmonics
        .iter()
        .map(|h| h.frequency.abs() * (h.excitation + h.relaxation))
        .sum();
    let entropy_production = if baths.iter().all(|b| b.temperature > 0.0) {
        Some(
            harmonics
                .iter()
                .map(|h| channel_entropy(h, baths[h.bath].temperature))
                .sum(),
        )
    } else {
        None
    };
    SteadyStateReport {
        polarization,
        cold_current,
        hot_current,
        entropy_production,
        cooling: cold_current > COOLING_TOL * gross,
        harmonics,
    }
}

/// Entropy produced by one channel, `(a − b) ln(a/b)` with `a = R_g p_g`,
/// `b = R_e p_e`.
///
/// Because `ln(R_g/R_e) = −ω/T`, the channel sum equals `−Σ_b J_b/T_b` up
/// to `ln(p_g/p_e) Σ Ṡ`, which vanishes at steady state. Each term is
/// non-negative, so the sum carries no cancellation error.
fn channel_entropy(h: &HarmonicCurrent, temperature: f64) -> f64 {
    let (a, b) = (h.excitation, h.relaxation);
    if a == b {
        0.0
    } else if a > 0.0 && b > 0.0 {
        (a - b) * (a.ln() - b.ln())
    } else {
        -h.heat / temperature
    }
}

/// Steady-state entropy production `σ = −(J_C/T_C + J_H/T_H)`.
///
/// The currents are sums over sidebands whose individual terms may be much
/// larger than the result, so the admissible negative excursion is
/// [`SIGMA_TOL`] relative to `max(1, Σ |ω Ṡ| / T)` over the breakdown.
pub fn entropy_production(report: &SteadyStateReport, t_cold: f64, t_hot: f64) -> Result<f64> {
    if !(t_cold > 0.0 && t_hot > 0.0) {
        return Err(Error::invalid("entropy production needs T_C, T_H > 0"));
    }
    let a = report.cold_current / t_cold;
    let b = report.hot_current / t_hot;
    let sigma = -(a + b);
    let terms: f64 = report
        .harmonics
        .iter()
        .map(|h| {
            h.heat.abs()
                / match h.label {
                    BathLabel::Cold => t_cold,
                    BathLabel::Hot => t_hot,
                }
        })
        .sum();
    let tol = SIGMA_TOL * (a.abs() + b.abs()).max(terms).max(1.0);
    if sigma < -tol {
        return Err(Error::InvariantViolation(format!(
            "negative entropy production {sigma:e}"
        )));
    }
    Ok(sigma)
}

/// Full pipeline for given baths: averaged rates, steady state, currents.
pub fn solve_steady_state(
    spectrum: &HarmonicSpectrum,
    omega0: f64,
    baths: &[BathSpec],
    opts: RateOptions,
) -> Result<SteadyStateReport> {
    let table = averaged_rates_with(spectrum, omega0, baths, opts)?;
    let state = steady_polarization(&table)?;
    heat_currents(&table, state)
}

/// Rate strength of a dominant π-flip sideband, `2π (2/π)² = 8/π`.
pub const DOMINANT_SIDEBAND_RATE: f64 = 8.0 / PI;

/// Cold current in the two-band limit, where the lower sideband couples only
/// to the cold bath and the hot bath dominates the upper sideband:
///
/// `J_C = (ω₀−Δ) (8/π) G₀^C(ω₀−Δ) [n^C(ω₀−Δ) − n^H(ω₀+Δ)] / [2 n^H(ω₀+Δ) + 1]`.
pub fn two_band_cold_current(
    cold: &BathSpec,
    hot: &BathSpec,
    omega0: f64,
    delta: f64,
) -> Result<f64> {
    if !(omega0 > delta && delta > 0.0) {
        return Err(Error::invalid("two-band current needs omega0 > delta > 0"));
    }
    let lower = omega0 - delta;
    let upper = omega0 + delta;
    let n_cold = bose(lower, cold.temperature);
    let n_hot = bose(upper, hot.temperature);
    Ok(
        lower * DOMINANT_SIDEBAND_RATE * cold.bare_spectrum(lower) * (n_cold - n_hot)
            / (2.0 * n_hot + 1.0),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WideBandCurrents {
    /// Total polarization flux from the cold bath.
    pub cold_polarization_flux: f64,
    pub cold_current: f64,
    pub hot_current: f64,
}

/// Both baths coupled at both dominant sidebands `ω₀ ± Δ` (no other
/// harmonics). Channel `i` carries the flux `Ṡ_i = c_i Σ_k c_k (n_i − n_k) / K`
/// with `c = (8/π) G₀`, `K = Σ_k c_k (2 n_k + 1)` and `k` running over all
/// four channels. The cold flux reduces to the four-term pairwise sum over
/// (cold, hot) pairs; the heats also pick up the pair linking a bath's two
/// sidebands, which moves energy `2Δ` per quantum.
pub fn wide_band_currents(
    cold: &BathSpec,
    hot: &BathSpec,
    omega0: f64,
    delta: f64,
) -> Result<WideBandCurrents> {
    if !(omega0 > delta && delta > 0.0) {
        return Err(Error::invalid("wide-band currents need omega0 > delta > 0"));
    }
    let freqs = [omega0 - delta, omega0 + delta];
    let chan = |b: &BathSpec, w: f64| {
        (
            DOMINANT_SIDEBAND_RATE * b.bare_spectrum(w),
            bose(w, b.temperature),
        )
    };
    // (is_cold, ω, c, n)
    let channels: Vec<(bool, f64, f64, f64)> = [(true, cold), (false, hot)]
        .iter()
        .flat_map(|&(is_cold, b)| freqs.iter().map(move |&w| (is_cold, w, chan(b, w))))
        .map(|(is_cold, w, (c, n))| (is_cold, w, c, n))
        .collect();
    let k: f64 = channels
        .iter()
        .map(|&(_, _, c, n)| c * (2.0 * n + 1.0))
        .sum();
    if !(k > 0.0) {
        return Err(Error::NoSteadyState);
    }
    let mut out = WideBandCurrents {
        cold_polarization_flux: 0.0,
        cold_current: 0.0,
        hot_current: 0.0,
    };
    for &(is_cold, w, ci, ni) in &channels {
        let flux = ci
            * channels
                .iter()
                .map(|&(_, _, ck, nk)| ck * (ni - nk))
                .sum::<f64>()
            / k;
        if is_cold {
            out.cold_polarization_flux += flux;
            out.cold_current += w * flux;
        } else {
            out.hot_current += w * flux;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum ClosedFormCurrent {
    TwoBand { cold_current: f64 },
    WideBand { cold_current: f64 },
}

impl ClosedFormCurrent {
    pub fn cold_current(&self) -> f64 {
        match *self {
            ClosedFormCurrent::TwoBand { cold_current }
            | ClosedFormCurrent::WideBand { cold_current } => cold_current,
        }
    }
}

/// Two-band closed form when the spectra are separated, four-term wide-band
/// form otherwise.
pub fn closed_form_cold_current(
    cold: &BathSpec,
    hot: &BathSpec,
    omega0: f64,
    delta: f64,
    threshold: f64,
) -> Result<ClosedFormCurrent> {
    if validate_separation(cold, hot, omega0, delta, threshold).two_band {
        Ok(ClosedFormCurrent::TwoBand {
            cold_current: two_band_cold_current(cold, hot, omega0, delta)?,
        })
    } else {
        Ok(ClosedFormCurrent::WideBand {
            cold_current: wide_band_currents(cold, hot, omega0, delta)?.cold_current,
        })
    }
}

fn pauli_lower() -> Matrix2<Complex64> {
    // basis (|e⟩, |g⟩); σ⁻ = |g⟩⟨e|
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    Matrix2::new(z, z, o, z)
}

/// Steady state of the Floquet-expanded Lindblad generator.
///
/// Each (bath `j`, sideband `q`) channel contributes
/// `P_q G_j(ω_q) D[σ⁻] + P_q G_j(−ω_q) D[σ⁺]` with `G_j(−ω) = e^{−ω/T_j} G_j(ω)`.
/// The stationary density matrix is the null vector of the 4×4 generator
/// (trace fixed to one); the currents follow from the population ratio
/// `A/B = ρ_ee/ρ_gg` as `J_j = Σ_q P_q ω_q G_j(ω_q) (e^{−ω_q/T_j} − A/B)/(A/B + 1)`.
/// Channel strengths carry the same `2π` as the averaged rates.
pub fn lindblad_floquet_steady(
    spectrum: &HarmonicSpectrum,
    omega0: f64,
    baths: &[BathSpec],
) -> Result<SteadyStateReport> {
    lindblad_floquet_steady_with(spectrum, omega0, baths, RateOptions::default())
}

struct Channel {
    bath: usize,
    m: i64,
    frequency: f64,
    down: f64,
    boltzmann: f64,
}

pub fn lindblad_floquet_steady_with(
    spectrum: &HarmonicSpectrum,
    omega0: f64,
    baths: &[BathSpec],
    opts: RateOptions,
) -> Result<SteadyStateReport> {
    if !(omega0 > 0.0) {
        return Err(Error::invalid("omega0 must be > 0"));
    }
    if spectrum.tail_mass > opts.tail_tolerance {
        return Err(Error::Accuracy {
            what: "harmonic spectrum tail mass above tolerance".into(),
            achieved: spectrum.tail_mass,
            bound: opts.tail_tolerance,
        });
    }
    let mut channels = Vec::new();
    for h in &spectrum.entries {
        let w = omega0 + h.m as f64 * spectrum.delta;
        if !(w > 0.0) {
            continue;
        }
        for (j, bath) in baths.iter().enumerate() {
            bath.validate()?;
            let down = 2.0 * PI * h.weight * spectrum_unchecked(bath, w);
            let boltzmann = if bath.temperature > 0.0 {
                (-w / bath.temperature).exp()
            } else {
                0.0
            };
            channels.push(Channel {
                bath: j,
                m: h.m,
                frequency: w,
                down,
                boltzmann,
            });
        }
    }
    let gamma_down: f64 = channels.iter().map(|c| c.down).sum();
    let gamma_up: f64 = channels.iter().map(|c| c.down * c.boltzmann).sum();
    if !(gamma_down + gamma_up > 0.0) {
        return Err(Error::NoSteadyState);
    }

    let rho = lindblad_null_state(omega0, gamma_down, gamma_up)?;
    let (a, b) = (rho[(0, 0)].re, rho[(1, 1)].re);
    let ratio = a / b;
    let harmonics = channels
        .iter()
        .map(|c| {
            let excitation = c.down * c.boltzmann / (ratio + 1.0);
            let relaxation = c.down * ratio / (ratio + 1.0);
            HarmonicCurrent::new(
                c.bath,
                baths[c.bath].label,
                c.m,
                c.frequency,
                excitation,
                relaxation,
            )
        })
        .collect();
    let chans: Vec<BathChannel> = baths
        .iter()
        .map(|b| BathChannel {
            label: b.label,
            temperature: b.temperature,
        })
        .collect();
    Ok(assemble(0.5 * (a - b), &chans, harmonics))
}

/// Population ratio `A/B` in closed form:
/// `Σ P G(ω_q) e^{−ω_q/T} / Σ P G(ω_q)` over baths and positive sidebands.
pub fn lindblad_population_ratio(
    spectrum: &HarmonicSpectrum,
    omega0: f64,
    baths: &[BathSpec],
) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for h in &spectrum.entries {
        let w = omega0 + h.m as f64 * spectrum.delta;
        if !(w > 0.0) {
            continue;
        }
        for bath in baths {
            let g = h.weight * spectrum_unchecked(bath, w);
            let boltz = if bath.temperature > 0.0 {
                (-w / bath.temperature).exp()
            } else {
                0.0
            };
            num += g * boltz;
            den += g;
        }
    }
    num / den
}

fn lindblad_null_state(omega0: f64, gamma_down: f64, gamma_up: f64) -> Result<Matrix2<Complex64>> {
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    let lower = pauli_lower();
    let raise = lower.adjoint();
    let h = Matrix2::new(
        Complex64::new(0.5 * omega0, 0.0),
        z,
        z,
        Complex64::new(-0.5 * omega0, 0.0),
    );
    let dissipate = |l: &Matrix2<Complex64>, rho: &Matrix2<Complex64>| {
        let ld = l.adjoint();
        // [Lρ, L†] + [L, ρL†]
        (l * rho) * ld - ld * (l * rho) + l * (rho * ld) - (rho * ld) * l
    };
    let generator = |rho: &Matrix2<Complex64>| -> Matrix2<Complex64> {
        let unitary = (h * rho - rho * h) * (-i);
        unitary
            + dissipate(&lower, rho) * Complex64::new(0.5 * gamma_down, 0.0)
            + dissipate(&raise, rho) * Complex64::new(0.5 * gamma_up, 0.0)
    };
    // column-stacked vec: (ρ00, ρ10, ρ01, ρ11)
    let mut sup = Matrix4::<Complex64>::zeros();
    for k in 0..4 {
        let mut basis = Matrix2::<Complex64>::zeros();
        basis[(k % 2, k / 2)] = Complex64::new(1.0, 0.0);
        let image = generator(&basis);
        for r in 0..4 {
            sup[(r, k)] = image[(r % 2, r / 2)];
        }
    }
    // the ρ_ee row is redundant with ρ_gg; replace it by the trace condition
    for k in 0..4 {
        sup[(0, k)] = z;
    }
    sup[(0, 0)] = Complex64::new(1.0, 0.0);
    sup[(0, 3)] = Complex64::new(1.0, 0.0);
    let mut rhs = Vector4::<Complex64>::zeros();
    rhs[0] = Complex64::new(1.0, 0.0);
    let v = sup.lu().solve(&rhs).ok_or(Error::NoSteadyState)?;
    Ok(Matrix2::new(v[0], v[2], v[1], v[3]))
}
