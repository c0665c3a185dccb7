//! Steady state of the flipped qubit between a magnon cold bath and a hot
//! dump, compared with the closed forms, and a scan across the cooling
//! boundary.
//!
//! Run with `cargo run --example steady_state_refrigerator`.

use std::f64::consts::PI;

use qrsim::baths::{
    validate_separation, BathPreset, BathSpec, CutoffShape, DEFAULT_SEPARATION_THRESHOLD,
};
use qrsim::floquet::{harmonic_spectrum, ModulationScheme};
use qrsim::rates::RateOptions;
use qrsim::steady::{closed_form_cold_current, entropy_production, solve_steady_state};

fn main() -> qrsim::Result<()> {
    let omega0 = 10.0;
    let (t_c, t_h) = (1.0, 5.0);
    let cold = BathSpec::cold(BathPreset::Magnon)
        .with_cutoff(5.0, CutoffShape::Hard)
        .with_temperature(t_c);
    let hot = BathSpec::hot(BathPreset::HotCubic).with_temperature(t_h);
    let baths = [cold.clone(), hot.clone()];

    let delta = 8.0;
    let spectrum = harmonic_spectrum(&ModulationScheme::pi_flip(omega0, PI / delta))?;
    let r = solve_steady_state(&spectrum, omega0, &baths, RateOptions::default())?;
    println!("omega0 = {omega0}, delta = {delta}, T_C = {t_c}, T_H = {t_h}");
    println!("  S_ss  = {:.6}", r.polarization);
    println!("  J_C   = {:.6e}", r.cold_current);
    println!("  J_H   = {:.6e}", r.hot_current);
    println!("  sigma = {:.6e}", entropy_production(&r, t_c, t_h)?);
    println!("  cooling: {}", r.cooling);

    let sep = validate_separation(&cold, &hot, omega0, delta, DEFAULT_SEPARATION_THRESHOLD);
    let closed =
        closed_form_cold_current(&cold, &hot, omega0, delta, DEFAULT_SEPARATION_THRESHOLD)?;
    println!(
        "  two-band separated: {}, closed form {:?}",
        sep.two_band, closed
    );

    // With only the dominant pair kept and a hot bath that is negligible at
    // the lower sideband, cooling switches on exactly where
    // n^C(ω₀−Δ) = n^H(ω₀+Δ). The full spectrum above also cools below this
    // offset: the strong hot dump at higher harmonics drags the qubit toward
    // its ground state.
    let weak_hot = BathSpec {
        dim: 8.0,
        prefactor: 1e-9,
        ..hot
    };
    let two_band = [cold, weak_hot];
    let boundary = omega0 * (t_h - t_c) / (t_h + t_c);
    println!("\ntwo-band limit: cooling needs delta > {boundary:.4}");
    println!("{:>8} {:>14} {:>8}", "delta", "J_C", "cooling");
    for i in 0..=10 {
        let d = 6.0 + 0.15 * i as f64;
        let spec =
            harmonic_spectrum(&ModulationScheme::pi_flip_with_shift(omega0, d).with_truncation(1))?;
        let opts = RateOptions {
            tail_tolerance: 0.2,
            ..RateOptions::default()
        };
        let r = solve_steady_state(&spec, omega0, &two_band, opts)?;
        println!("{d:>8.2} {:>14.6e} {:>8}", r.cold_current, r.cooling);
    }
    Ok(())
}
