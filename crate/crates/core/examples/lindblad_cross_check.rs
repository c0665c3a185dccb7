//! Cross-check of the rate-equation steady state against the stationary
//! state of the Floquet-expanded Lindblad generator.
//!
//! Run with `cargo run --example lindblad_cross_check`.

use qrsim::baths::{BathPreset, BathSpec, CutoffShape};
use qrsim::floquet::{harmonic_spectrum, ModulationScheme};
use qrsim::rates::RateOptions;
use qrsim::steady::{lindblad_floquet_steady, solve_steady_state};

fn main() -> qrsim::Result<()> {
    let omega0 = 8.0;
    let hot = BathSpec::hot(BathPreset::HotCubic).with_temperature(4.0);
    println!(
        "{:>6} {:>6} {:>15} {:>15} {:>10}",
        "delta", "T_C", "J_C (rates)", "J_C (Lindblad)", "rel diff"
    );
    for delta in [3.0, 5.0, 7.0] {
        let spectrum = harmonic_spectrum(&ModulationScheme::pi_flip_with_shift(omega0, delta))?;
        for t_c in [0.2, 0.6, 1.0] {
            let cold = BathSpec::cold(BathPreset::Magnon)
                .with_cutoff(omega0, CutoffShape::Hard)
                .with_temperature(t_c);
            let baths = [cold, hot.clone()];
            let rates = solve_steady_state(&spectrum, omega0, &baths, RateOptions::default())?;
            let lindblad = lindblad_floquet_steady(&spectrum, omega0, &baths)?;
            let rel = (rates.cold_current - lindblad.cold_current).abs() / rates.cold_current.abs();
            println!(
                "{delta:>6.1} {t_c:>6.2} {:>15.6e} {:>15.6e} {rel:>10.1e}",
                rates.cold_current, lindblad.cold_current
            );
        }
    }
    Ok(())
}
