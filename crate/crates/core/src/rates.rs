//! Transition rates of the modulated qubit.
//!
//! Averaged over a modulation period, each bath `b` and sideband `m`
//! contributes additively
//! `R_e^{b,m} = 2π P_m G_T^b(ω₀ + mδ)` and `R_g^{b,m} = 2π P_m G_T^b(−(ω₀ + mδ))`.
//! [`time_dependent_rates`] evaluates the full memory-kernel rates at a given
//! time, whose period average converges to the same values.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baths::{spectrum_unchecked, BathLabel, BathSpec};
use crate::error::{Error, Result};
use crate::floquet::{harmonic_amplitudes, HarmonicSpectrum, ModulationScheme};
use crate::numerics::quadrature::gl16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    /// Index into [`RateTable::baths`].
    pub bath: usize,
    pub m: i64,
    /// Sideband frequency `ω₀ + mδ`.
    pub frequency: f64,
    pub weight: f64,
    /// Contribution to `R̄_e` (|e⟩ → |g⟩).
    pub emission: f64,
    /// Contribution to `R̄_g` (|g⟩ → |e⟩).
    pub absorption: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathChannel {
    pub label: BathLabel,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub omega0: f64,
    pub delta: f64,
    pub baths: Vec<BathChannel>,
    pub entries: Vec<RateEntry>,
    pub emission_total: f64,
    pub absorption_total: f64,
    /// Total weight of sidebands dropped because `ω₀ + mδ ≤ 0`.
    pub excluded_mass: f64,
}

impl RateTable {
    /// Builds a table from explicit entries; totals are their sums.
    pub fn from_entries(
        omega0: f64,
        delta: f64,
        baths: Vec<BathChannel>,
        entries: Vec<RateEntry>,
        excluded_mass: f64,
    ) -> Self {
        let emission_total = entries.iter().map(|e| e.emission).sum();
        let absorption_total = entries.iter().map(|e| e.absorption).sum();
        Self {
            omega0,
            delta,
            baths,
            entries,
            emission_total,
            absorption_total,
            excluded_mass,
        }
    }

    pub fn label_of(&self, entry: &RateEntry) -> BathLabel {
        self.baths[entry.bath].label
    }

    /// Totals `(R̄_e, R̄_g)` restricted to one bath label.
    pub fn totals_for(&self, label: BathLabel) -> (f64, f64) {
        self.entries
            .iter()
            .filter(|e| self.label_of(e) == label)
            .fold((0.0, 0.0), |(re, rg), e| {
                (re + e.emission, rg + e.absorption)
            })
    }

    /// Totals restricted to one label and a set of sidebands.
    pub fn totals_for_harmonics(&self, label: BathLabel, ms: &[i64]) -> (f64, f64) {
        self.entries
            .iter()
            .filter(|e| self.label_of(e) == label && ms.contains(&e.m))
            .fold((0.0, 0.0), |(re, rg), e| {
                (re + e.emission, rg + e.absorption)
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    /// Largest admissible `tail_mass` of the harmonic spectrum.
    pub tail_tolerance: f64,
    /// Keep sidebands with `ω₀ + mδ < 0` (emission and absorption roles
    /// then follow the sign of the frequency).
    pub include_negative_sidebands: bool,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            tail_tolerance: 1e-2,
            include_negative_sidebands: false,
        }
    }
}

pub fn averaged_rates(
    spectrum: &HarmonicSpectrum,
    omega0: f64,
    baths: &[BathSpec],
) -> Result<RateTable> {
    averaged_rates_with(spectrum, omega0, baths, RateOptions::default())
}

pub fn averaged_rates_with(
    spectrum: &HarmonicSpectrum,
    omega0: f64,
    baths: &[BathSpec],
    opts: RateOptions,
) -> Result<RateTable> {
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
    for b in baths {
        b.validate()?;
    }
    let mut excluded_mass = 0.0;
    let mut entries = Vec::with_capacity(baths.len() * spectrum.entries.len());
    for h in &spectrum.entries {
        let frequency = omega0 + h.m as f64 * spectrum.delta;
        let keep = frequency > 0.0 || (opts.include_negative_sidebands && frequency < 0.0);
        if !keep {
            excluded_mass += h.weight;
            continue;
        }
        for (i, bath) in baths.iter().enumerate() {
            entries.push(RateEntry {
                bath: i,
                m: h.m,
                frequency,
                weight: h.weight,
                emission: 2.0 * PI * h.weight * spectrum_unchecked(bath, frequency),
                absorption: 2.0 * PI * h.weight * spectrum_unchecked(bath, -frequency),
            });
        }
    }
    let channels = baths
        .iter()
        .map(|b| BathChannel {
            label: b.label,
            temperature: b.temperature,
        })
        .collect();
    Ok(RateTable::from_entries(
        omega0,
        spectrum.delta,
        channels,
        entries,
        excluded_mass,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeDependentRates {
    pub t: f64,
    /// `R_e(t)`; may be transiently negative.
    pub emission: f64,
    pub absorption: f64,
    /// Change between the last two quadrature refinements.
    pub error_bound: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct TimeRateOptions {
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for TimeRateOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            max_doublings: 8,
        }
    }
}

pub fn time_dependent_rates(
    scheme: &ModulationScheme,
    bath: &BathSpec,
    t: f64,
) -> Result<TimeDependentRates> {
    TimeKernel::new(scheme, bath)?.rates_at(t, TimeRateOptions::default())
}

/// Mean of `R_e(t)`, `R_g(t)` over one modulation period starting at
/// `t_start`, by composite Gauss-Legendre sampling in time.
pub fn period_averaged_rates(
    scheme: &ModulationScheme,
    bath: &BathSpec,
    t_start: f64,
    time_panels: usize,
) -> Result<TimeDependentRates> {
    let kernel = TimeKernel::new(scheme, bath)?;
    let period = scheme.period();
    let rule = gl16();
    let nodes: Vec<(f64, f64)> = (0..time_panels)
        .flat_map(|p| {
            let h = period / time_panels as f64;
            let lo = t_start + h * p as f64;
            rule.mapped(lo, lo + h).collect::<Vec<_>>()
        })
        .collect();
    let samples: Vec<(f64, TimeDependentRates)> = nodes
        .par_iter()
        .map(|&(t, w)| {
            kernel
                .rates_at(t, TimeRateOptions::default())
                .map(|r| (w, r))
        })
        .collect::<Result<_>>()?;
    let mut out = TimeDependentRates {
        t: t_start,
        emission: 0.0,
        absorption: 0.0,
        error_bound: 0.0,
    };
    for (w, r) in samples {
        out.emission += w * r.emission / period;
        out.absorption += w * r.absorption / period;
        out.error_bound += w * r.error_bound / period;
    }
    Ok(out)
}

/// Precomputed harmonic data for evaluating the memory-kernel rates.
struct TimeKernel<'a> {
    bath: &'a BathSpec,
    omega0: f64,
    delta: f64,
    coefficients: Vec<(i64, Complex64)>,
    lower: f64,
    upper: f64,
}

impl<'a> TimeKernel<'a> {
    fn new(scheme: &ModulationScheme, bath: &'a BathSpec) -> Result<Self> {
        bath.validate()?;
        let amps = harmonic_amplitudes(scheme)?;
        let upper = bath.support_edge();
        let lower = if bath.temperature > 0.0 {
            -upper.min(bath.temperature * (50.0 + 2.0 * bath.spectral_exponent().max(0.0)))
        } else {
            0.0
        };
        Ok(Self {
            bath,
            omega0: scheme.omega0,
            delta: amps.delta,
            coefficients: amps.coefficients,
            lower,
            upper,
        })
    }

    /// `A_l = ∫ G(ω) K(ω₀+lδ−ω)` and `B_l = ∫ G(ω) K(ω₀+lδ+ω)` with
    /// `K(χ) = (e^{iχt} − 1)/(iχ)`, on `panels` panels per unit `π/t`.
    fn kernel_integrals(&self, t: f64, refine: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.coefficients.len();
        let mut a = vec![Complex64::new(0.0, 0.0); n];
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        let rule = gl16();
        let sideband: Vec<f64> = self
            .coefficients
            .iter()
            .map(|&(m, _)| self.omega0 + m as f64 * self.delta)
            .collect();
        let rot: Vec<Complex64> = sideband
            .iter()
            .map(|&w| Complex64::from_polar(1.0, w * t))
            .collect();
        let kernel = |chi: f64, e_chi: Complex64| -> Complex64 {
            let x = chi * t;
            if x.abs() < 1e-3 {
                // (e^{ix} − 1)/(iχ) = t (1 + ix/2 − x²/6 − i x³/24 + …)
                Complex64::new(t * (1.0 - x * x / 6.0), t * (x / 2.0 - x * x * x / 24.0))
            } else {
                (e_chi - 1.0) / Complex64::new(0.0, chi)
            }
        };
        let mut segments = Vec::new();
        if self.lower < 0.0 {
            segments.push((self.lower, 0.0));
        }
        segments.push((0.0, self.upper));
        for (lo, hi) in segments {
            let panels = (((hi - lo) * t / PI).ceil() as usize + 8) * refine;
            let h = (hi - lo) / panels as f64;
            for p in 0..panels {
                let plo = lo + h * p as f64;
                for (w, wt) in rule.mapped(plo, plo + h) {
                    if w == 0.0 {
                        continue;
                    }
                    let g = spectrum_unchecked(self.bath, w) * wt;
                    if g == 0.0 {
                        continue;
                    }
                    let e_minus = Complex64::from_polar(1.0, -w * t);
                    let e_plus = e_minus.conj();
                    for l in 0..n {
                        a[l] += g * kernel(sideband[l] - w, rot[l] * e_minus);
                        b[l] += g * kernel(sideband[l] + w, rot[l] * e_plus);
                    }
                }
            }
        }
        (a, b)
    }

    fn combine(&self, t: f64, a: &[Complex64], b: &[Complex64]) -> (f64, f64) {
        let mut eps = Complex64::new(0.0, 0.0);
        let mut sum_e = Complex64::new(0.0, 0.0);
        let mut sum_g = Complex64::new(0.0, 0.0);
        for (l, &(m, c)) in self.coefficients.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, m as f64 * self.delta * t);
            eps += c * phase;
            sum_e += c.conj() * phase.conj() * a[l];
            sum_g += c * phase * b[l].conj();
        }
        let re = 2.0 * (eps * sum_e).re;
        let rg = 2.0 * (eps.conj() * sum_g).re;
        (re, rg)
    }

    fn rates_at(&self, t: f64, opts: TimeRateOptions) -> Result<TimeDependentRates> {
        if !(t >= 0.0) {
            return Err(Error::invalid("time must be >= 0"));
        }
        if t == 0.0 {
            return Ok(TimeDependentRates {
                t,
                emission: 0.0,
                absorption: 0.0,
                error_bound: 0.0,
            });
        }
        let mut refine = 1;
        let (a, b) = self.kernel_integrals(t, refine);
        let mut prev = self.combine(t, &a, &b);
        for _ in 0..opts.max_doublings {
            refine *= 2;
            let (a, b) = self.kernel_integrals(t, refine);
            let next = self.combine(t, &a, &b);
            let err = (next.0 - prev.0).abs().max((next.1 - prev.1).abs());
            let scale = next.0.abs().max(next.1.abs()).max(f64::MIN_POSITIVE);
            if err <= opts.rel_tol * scale {
                return Ok(TimeDependentRates {
                    t,
                    emission: next.0,
                    absorption: next.1,
                    error_bound: err,
                });
            }
            prev = next;
        }
        Err(Error::Accuracy {
            what: format!("time-dependent rate quadrature at t = {t}"),
            achieved: prev.0,
            bound: opts.rel_tol,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baths::{BathPreset, CutoffShape};
    use crate::floquet::harmonic_spectrum;

    fn two_band_setup() -> (HarmonicSpectrum, f64, BathSpec, BathSpec) {
        let omega0 = 10.0;
        let delta = 8.0;
        let spec = harmonic_spectrum(&ModulationScheme::pi_flip_with_shift(omega0, delta)).unwrap();
        let cold = BathSpec::cold(BathPreset::Magnon)
            .with_cutoff(5.0, CutoffShape::Hard)
            .with_temperature(1.0);
        let hot = BathSpec::hot(BathPreset::HotCubic).with_temperature(5.0);
        (spec, omega0, cold, hot)
    }

    #[test]
    fn lower_sideband_cold_rate_is_eight_over_pi() {
        let (spec, omega0, cold, _) = two_band_setup();
        let table = averaged_rates(&spec, omega0, std::slice::from_ref(&cold)).unwrap();
        let (re, rg) = table.totals_for_harmonics(BathLabel::Cold, &[-1]);
        let w = omega0 - spec.delta;
        let g0 = cold.bare_spectrum(w);
        let n = crate::baths::occupancy(w, cold.temperature).unwrap();
        assert!((re - 8.0 / PI * g0 * (n + 1.0)).abs() < 1e-12 * re);
        assert!((rg - 8.0 / PI * g0 * n).abs() < 1e-12 * rg);
    }

    #[test]
    fn zero_temperature_cold_bath_never_excites() {
        let (spec, omega0, cold, _) = two_band_setup();
        let cold = cold.with_temperature(0.0);
        let table = averaged_rates(&spec, omega0, &[cold]).unwrap();
        assert_eq!(table.absorption_total, 0.0);
        assert!(table.emission_total > 0.0);
    }

    #[test]
    fn unmodulated_single_bath() {
        let bath = BathSpec::hot(BathPreset::HotCubic).with_temperature(2.0);
        let spec = harmonic_spectrum(&ModulationScheme::unmodulated(3.0)).unwrap();
        let table = averaged_rates(&spec, 3.0, std::slice::from_ref(&bath)).unwrap();
        let ge = crate::baths::coupling_spectrum(&bath, 3.0).unwrap();
        let ga = crate::baths::coupling_spectrum(&bath, -3.0).unwrap();
        assert!((table.emission_total - 2.0 * PI * ge).abs() < 1e-12 * table.emission_total);
        assert!((table.absorption_total - 2.0 * PI * ga).abs() < 1e-12 * table.absorption_total);
    }

    #[test]
    fn negative_sidebands_are_excluded_and_counted() {
        let (spec, omega0, cold, hot) = two_band_setup();
        let table = averaged_rates(&spec, omega0, &[cold.clone(), hot.clone()]).unwrap();
        // δ = 8, ω₀ = 10: every m ≤ −3 is at negative frequency
        let expected: f64 = spec
            .entries
            .iter()
            .filter(|h| h.m <= -3)
            .map(|h| h.weight)
            .sum();
        assert!((table.excluded_mass - expected).abs() < 1e-15);
        assert!(table.entries.iter().all(|e| e.frequency > 0.0));
        let opts = RateOptions {
            include_negative_sidebands: true,
            ..RateOptions::default()
        };
        let full = averaged_rates_with(&spec, omega0, &[cold, hot], opts).unwrap();
        assert_eq!(full.excluded_mass, 0.0);
        assert!(full.entries.len() > table.entries.len());
    }

    #[test]
    fn rejects_heavy_tail() {
        let (spec, omega0, cold, _) = two_band_setup();
        let spec = spec.restricted_to(&[-1, 1]);
        assert!(matches!(
            averaged_rates(&spec, omega0, &[cold]),
            Err(Error::Accuracy { .. })
        ));
    }

    #[test]
    fn time_dependent_rates_vanish_at_origin() {
        let bath = BathSpec::cold(BathPreset::Magnon).with_temperature(0.2);
        let scheme = ModulationScheme::pi_flip(0.7, 2.0).with_truncation(5);
        let r = time_dependent_rates(&scheme, &bath, 0.0).unwrap();
        assert_eq!(r.emission, 0.0);
        let small = time_dependent_rates(&scheme, &bath, 1e-4).unwrap();
        assert!(small.emission.abs() < 1e-3);
    }

    /// Si(x) by composite Simpson on sin(u)/u, independent of the library's
    /// quadrature.
    fn sine_integral(x: f64) -> f64 {
        let n = 200_000;
        let h = x / n as f64;
        let f = |u: f64| if u == 0.0 { 1.0 } else { u.sin() / u };
        let mut s = f(0.0) + f(x);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn flat_spectrum_golden_rule_limit() {
        // γ = 0, d = 1 at T = 0: G_T = κ on (0, ω_cut], zero elsewhere, so
        // R_e(t) = 2κ [Si(ω₀t) + Si((ω_cut − ω₀)t)]; the off-resonant
        // transient R_g(t) = 2κ [Si((ω₀ + ω_cut)t) − Si(ω₀t)] decays as 1/t.
        let kappa = 0.3;
        let bath = BathSpec::cold(BathPreset::Magnon)
            .with_dim(1.0)
            .with_prefactor(kappa)
            .with_cutoff(10.0, CutoffShape::Hard);
        let omega0 = 5.0;
        let scheme = ModulationScheme::unmodulated(omega0);
        for t in [0.5, 3.0, 40.0] {
            let r = time_dependent_rates(&scheme, &bath, t).unwrap();
            let exact = 2.0 * kappa * (sine_integral(omega0 * t) + sine_integral(5.0 * t));
            assert!(
                (r.emission - exact).abs() < 1e-6,
                "t = {t}: {} vs {exact}",
                r.emission
            );
            let transient = 2.0 * kappa * (sine_integral(15.0 * t) - sine_integral(omega0 * t));
            assert!(
                (r.absorption - transient).abs() < 1e-6,
                "t = {t}: {} vs {transient}",
                r.absorption
            );
        }
        let late = time_dependent_rates(&scheme, &bath, 400.0).unwrap();
        assert!((late.emission - 2.0 * PI * kappa).abs() / (2.0 * PI * kappa) < 0.01);
    }
}
