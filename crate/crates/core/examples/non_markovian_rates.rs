//! Time-resolved transition rates from the bath correlation function and
//! their approach to the averaged (Markovian) rates after a few memory times.
//!
//! Run with `cargo run --release --example non_markovian_rates`.

use std::f64::consts::PI;

use qrsim::baths::{BathPreset, BathSpec, CutoffShape};
use qrsim::floquet::{harmonic_spectrum, ModulationScheme};
use qrsim::rates::{averaged_rates_with, period_averaged_rates, time_dependent_rates, RateOptions};

fn main() -> qrsim::Result<()> {
    let omega0 = 1.3;
    let scheme = ModulationScheme::pi_flip(omega0, PI);
    let bath = BathSpec::cold(BathPreset::Magnon)
        .with_cutoff(1.0, CutoffShape::Exponential)
        .with_temperature(0.5);
    let opts = RateOptions {
        include_negative_sidebands: true,
        ..RateOptions::default()
    };
    let spectrum = harmonic_spectrum(&scheme)?;
    let markov = averaged_rates_with(&spectrum, omega0, std::slice::from_ref(&bath), opts)?;
    println!(
        "averaged rates: R_e = {:.6e}, R_g = {:.6e}",
        markov.emission_total, markov.absorption_total
    );

    println!("\n{:>8} {:>14} {:>14}", "t", "R_e(t)", "R_g(t)");
    for t in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let r = time_dependent_rates(&scheme, &bath, t)?;
        println!("{t:>8.2} {:>14.6e} {:>14.6e}", r.emission, r.absorption);
    }

    let t_c = bath.memory_time();
    println!("\nperiod averages starting at multiples of the memory time {t_c}:");
    for k in [5.0, 10.0, 20.0] {
        let avg = period_averaged_rates(&scheme, &bath, k * t_c, 8)?;
        println!(
            "  start {:>5.1}: R_e rel dev {:.2e}, R_g rel dev {:.2e}",
            k * t_c,
            (avg.emission - markov.emission_total).abs() / markov.emission_total,
            (avg.absorption - markov.absorption_total).abs() / markov.absorption_total
        );
    }
    Ok(())
}
