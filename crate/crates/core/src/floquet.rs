//! Harmonic (Floquet) decomposition of the qubit phase modulation.
//!
//! The modulated qubit carries the unimodular phase factor
//! `ε(t) = exp(i ∫₀ᵗ (ν(t') − ω₀) dt')`. Writing `ε(t) = Σ_m c_m e^{i m δ t}`
//! over its true period, the weight `P_m = |c_m|²` is the probability that the
//! bath sees the qubit at the shifted frequency `ω₀ + m δ`.
//!
//! For periodic π-flips every `τ` the phase factor is a ±1 square wave of
//! period `2τ`, so `δ = π/τ`, `c_m = −2i/(mπ)` for odd `m` and zero otherwise.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::gl16;

pub const DEFAULT_TRUNCATION: usize = 51;

/// Refinement stops when no amplitude moves by more than this.
const AMPLITUDE_TOL: f64 = 1e-10;
const MAX_PANEL_DOUBLINGS: u32 = 14;
/// Allowed mismatch of the accumulated phase over a period (mod 2π).
const PERIODICITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulationKind {
    /// Instantaneous π phase flips every `tau`.
    PiFlip,
    Unmodulated,
    /// Instantaneous qubit frequency `ν(t)` sampled on a uniform grid
    /// `t_j = j·tau/N`, `j = 0..N`, covering exactly one period `tau`.
    /// Linear interpolation between samples, wrapping at the period.
    SampledWaveform {
        samples: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationScheme {
    /// Mean qubit angular frequency ω₀.
    pub omega0: f64,
    /// Time between phase flips (π-flips) or the waveform period (sampled).
    pub tau: f64,
    pub kind: ModulationKind,
    /// Harmonics with `|m| ≤ truncation` are retained.
    #[serde(default = "default_truncation")]
    pub truncation: usize,
}

fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}

impl ModulationScheme {
    pub fn pi_flip(omega0: f64, tau: f64) -> Self {
        Self {
            omega0,
            tau,
            kind: ModulationKind::PiFlip,
            truncation: DEFAULT_TRUNCATION,
        }
    }

    pub fn unmodulated(omega0: f64) -> Self {
        Self {
            omega0,
            tau: 1.0,
            kind: ModulationKind::Unmodulated,
            truncation: DEFAULT_TRUNCATION,
        }
    }

    /// π-flip scheme whose dominant sideband sits at `ω₀ ± delta`.
    pub fn pi_flip_with_shift(omega0: f64, delta: f64) -> Self {
        Self::pi_flip(omega0, PI / delta)
    }

    pub fn with_truncation(mut self, m: usize) -> Self {
        self.truncation = m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::validation(
                "modulation.omega0",
                "must be finite and > 0",
            ));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::validation(
                "modulation.tau",
                "must be finite and > 0",
            ));
        }
        if self.truncation < 1 {
            return Err(Error::validation("modulation.truncation", "must be >= 1"));
        }
        if let ModulationKind::SampledWaveform { samples } = &self.kind {
            if samples.is_empty() {
                return Err(Error::validation(
                    "modulation.kind.sampled_waveform.samples",
                    "must not be empty",
                ));
            }
            if samples.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation(
                    "modulation.kind.sampled_waveform.samples",
                    "must be finite",
                ));
            }
        }
        Ok(())
    }

    /// Period of ε(t).
    pub fn period(&self) -> f64 {
        match self.kind {
            ModulationKind::PiFlip => 2.0 * self.tau,
            _ => self.tau,
        }
    }

    /// Fundamental sideband spacing δ = 2π / period (zero when unmodulated).
    pub fn spacing(&self) -> f64 {
        match self.kind {
            ModulationKind::Unmodulated => 0.0,
            _ => 2.0 * PI / self.period(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub m: i64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSpectrum {
    /// Sideband spacing δ; sideband `m` sits at `ω₀ + m δ`.
    pub delta: f64,
    /// Retained sidebands with non-zero weight, sorted by `m`.
    pub entries: Vec<Harmonic>,
    /// Weight not captured by the retained sidebands.
    pub tail_mass: f64,
}

impl HarmonicSpectrum {
    pub fn weight(&self, m: i64) -> f64 {
        self.entries
            .binary_search_by_key(&m, |h| h.m)
            .map(|i| self.entries[i].weight)
            .unwrap_or(0.0)
    }

    pub fn retained_mass(&self) -> f64 {
        self.entries.iter().map(|h| h.weight).sum()
    }

    /// Keeps only the listed harmonics; the dropped weight moves to the tail.
    pub fn restricted_to(&self, ms: &[i64]) -> Self {
        let entries: Vec<Harmonic> = self
            .entries
            .iter()
            .copied()
            .filter(|h| ms.contains(&h.m))
            .collect();
        let kept: f64 = entries.iter().map(|h| h.weight).sum();
        Self {
            delta: self.delta,
            tail_mass: 1.0 - kept,
            entries,
        }
    }

    fn from_weights(delta: f64, mut entries: Vec<Harmonic>) -> Self {
        entries.sort_by_key(|h| h.m);
        let retained: f64 = entries.iter().map(|h| h.weight).sum();
        Self {
            delta,
            entries,
            tail_mass: 1.0 - retained,
        }
    }
}

/// Complex Fourier amplitudes `c_m` of ε(t), needed by the time-resolved rates.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicAmplitudes {
    pub delta: f64,
    /// `(m, c_m)` for `|m| ≤ M`, sorted by `m`, zero amplitudes omitted.
    pub coefficients: Vec<(i64, Complex64)>,
}

impl HarmonicAmplitudes {
    /// Truncated phase factor `Σ_m c_m e^{i m δ t}`.
    pub fn phase_factor(&self, t: f64) -> Complex64 {
        self.coefficients
            .iter()
            .map(|&(m, c)| c * Complex64::from_polar(1.0, m as f64 * self.delta * t))
            .sum()
    }

    pub fn to_spectrum(&self) -> HarmonicSpectrum {
        HarmonicSpectrum::from_weights(
            self.delta,
            self.coefficients
                .iter()
                .map(|&(m, c)| Harmonic {
                    m,
                    weight: c.norm_sqr(),
                })
                .filter(|h| h.weight > 0.0)
                .collect(),
        )
    }
}

/// Sideband weights of the modulation. π-flips and the unmodulated qubit use
/// closed forms; sampled waveforms go through [`spectrum_by_quadrature`].
pub fn harmonic_spectrum(scheme: &ModulationScheme) -> Result<HarmonicSpectrum> {
    scheme.validate()?;
    match &scheme.kind {
        ModulationKind::Unmodulated => Ok(HarmonicSpectrum::from_weights(
            0.0,
            vec![Harmonic { m: 0, weight: 1.0 }],
        )),
        ModulationKind::PiFlip => {
            let m_max = scheme.truncation as i64;
            let entries = (-m_max..=m_max)
                .filter(|m| m % 2 != 0)
                .map(|m| Harmonic {
                    m,
                    weight: pi_flip_weight(m),
                })
                .collect();
            Ok(HarmonicSpectrum::from_weights(scheme.spacing(), entries))
        }
        ModulationKind::SampledWaveform { .. } => spectrum_by_quadrature(scheme),
    }
}

/// `4/(m²π²)` for odd `m`, zero for even `m`.
pub fn pi_flip_weight(m: i64) -> f64 {
    if m % 2 == 0 {
        0.0
    } else {
        let mf = m as f64;
        4.0 / (mf * mf * PI * PI)
    }
}

/// Offset of the dominant sidebands from ω₀ (the control parameter Δ).
pub fn dominant_shift(scheme: &ModulationScheme) -> f64 {
    scheme.spacing()
}

/// Weights obtained by numerically integrating the Fourier coefficients of
/// ε(t) over one period, for any modulation kind.
pub fn spectrum_by_quadrature(scheme: &ModulationScheme) -> Result<HarmonicSpectrum> {
    let amps = harmonic_amplitudes(scheme)?;
    let spectrum = amps.to_spectrum();
    if spectrum.tail_mass < -1e-8 {
        return Err(Error::Accuracy {
            what: "Parseval sum of quadrature weights exceeds one".into(),
            achieved: spectrum.tail_mass,
            bound: 1e-8,
        });
    }
    Ok(spectrum)
}

/// Complex amplitudes `c_m = (1/T) ∫₀ᵀ ε(t) e^{−i m δ t} dt`, `|m| ≤ M`.
pub fn harmonic_amplitudes(scheme: &ModulationScheme) -> Result<HarmonicAmplitudes> {
    scheme.validate()?;
    let m_max = scheme.truncation as i64;
    match &scheme.kind {
        ModulationKind::Unmodulated => Ok(HarmonicAmplitudes {
            delta: 0.0,
            coefficients: vec![(0, Complex64::new(1.0, 0.0))],
        }),
        ModulationKind::PiFlip => {
            let tau = scheme.tau;
            let eps = move |t: f64| {
                if t.rem_euclid(2.0 * tau) < tau {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            };
            fourier_by_quadrature(eps, &[0.0, tau, 2.0 * tau], scheme.spacing(), m_max)
        }
        ModulationKind::SampledWaveform { samples } => {
            let phase = SampledPhase::new(samples, scheme.tau, scheme.omega0)?;
            let n = samples.len();
            let h = scheme.tau / n as f64;
            let breaks: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
            fourier_by_quadrature(
                |t| Complex64::from_polar(1.0, phase.at(t)),
                &breaks,
                scheme.spacing(),
                m_max,
            )
        }
    }
}

fn fourier_by_quadrature<F: Fn(f64) -> Complex64>(
    eps: F,
    breaks: &[f64],
    delta: f64,
    m_max: i64,
) -> Result<HarmonicAmplitudes> {
    let period = breaks[breaks.len() - 1] - breaks[0];
    let ms: Vec<i64> = (-m_max..=m_max).collect();
    let rule = gl16();
    let eval = |panels: usize| -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); ms.len()];
        for w in breaks.windows(2) {
            let hp = (w[1] - w[0]) / panels as f64;
            for p in 0..panels {
                let lo = w[0] + hp * p as f64;
                for (t, wt) in rule.mapped(lo, lo + hp) {
                    let e = eps(t) * wt;
                    // e^{-i m δ t} by recurrence from m = -m_max
                    let step = Complex64::from_polar(1.0, -delta * t);
                    let mut rot = Complex64::from_polar(1.0, m_max as f64 * delta * t);
                    for a in acc.iter_mut() {
                        *a += e * rot;
                        rot *= step;
                    }
                }
            }
        }
        acc.into_iter().map(|a| a / period).collect()
    };

    let mut panels = 1usize.max((m_max as usize).div_ceil(8 * (breaks.len() - 1)));
    let mut prev = eval(panels);
    for _ in 0..MAX_PANEL_DOUBLINGS {
        panels *= 2;
        let next = eval(panels);
        let change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change < AMPLITUDE_TOL {
            let coefficients = ms
                .iter()
                .copied()
                .zip(next)
                .map(|(m, c)| {
                    (
                        m,
                        if c.norm() < 1e-14 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            c
                        },
                    )
                })
                .filter(|(_, c)| c.norm() > 0.0)
                .collect();
            return Ok(HarmonicAmplitudes {
                delta,
                coefficients,
            });
        }
        prev = next;
    }
    Err(Error::Accuracy {
        what: "Fourier amplitudes did not converge under panel refinement".into(),
        achieved: prev.iter().map(|c| c.norm_sqr()).sum(),
        bound: AMPLITUDE_TOL,
    })
}

/// Piecewise-quadratic phase `φ(t) = ∫₀ᵗ (ν − ω₀)` for linearly interpolated
/// frequency samples.
struct SampledPhase {
    samples: Vec<f64>,
    h: f64,
    omega0: f64,
    /// φ at each grid node.
    nodes: Vec<f64>,
}

impl SampledPhase {
    fn new(samples: &[f64], period: f64, omega0: f64) -> Result<Self> {
        let n = samples.len();
        let h = period / n as f64;
        let mut nodes = Vec::with_capacity(n + 1);
        let mut phi = 0.0;
        nodes.push(0.0);
        for j in 0..n {
            let (a, b) = (samples[j], samples[(j + 1) % n]);
            phi += h * (0.5 * (a + b) - omega0);
            nodes.push(phi);
        }
        let winding = phi / (2.0 * PI);
        if (winding - winding.round()).abs() * 2.0 * PI > PERIODICITY_TOL * phi.abs().max(1.0) {
            return Err(Error::invalid(format!(
                "sampled waveform is not periodic: accumulated phase {phi} is not a multiple of 2π"
            )));
        }
        Ok(Self {
            samples: samples.to_vec(),
            h,
            omega0,
            nodes,
        })
    }

    fn at(&self, t: f64) -> f64 {
        let n = self.samples.len();
        let j = ((t / self.h).floor() as usize).min(n - 1);
        let s = t - j as f64 * self.h;
        let (a, b) = (self.samples[j], self.samples[(j + 1) % n]);
        self.nodes[j] + (a - self.omega0) * s + (b - a) * s * s / (2.0 * self.h)
    }
}
