//! Sideband weights of a π-flip modulation, from the closed form and from
//! direct quadrature, plus a smooth sampled waveform.
//!
//! Run with `cargo run --example floquet_sidebands`.

use std::f64::consts::PI;

use qrsim::floquet::{harmonic_spectrum, spectrum_by_quadrature, ModulationKind, ModulationScheme};

fn main() -> qrsim::Result<()> {
    let scheme = ModulationScheme::pi_flip(10.0, PI / 8.0);
    let exact = harmonic_spectrum(&scheme)?;
    let numeric = spectrum_by_quadrature(&scheme)?;

    println!(
        "pi-flip every tau = pi/8: sidebands at omega0 + m * {:.3}",
        exact.delta
    );
    println!("{:>4} {:>14} {:>14}", "m", "P_m (exact)", "P_m (quad)");
    for m in (-7..=7).filter(|m: &i64| m % 2 != 0) {
        println!(
            "{m:>4} {:>14.10} {:>14.10}",
            exact.weight(m),
            numeric.weight(m)
        );
    }
    println!(
        "retained weight {:.6}, tail {:.2e}",
        exact.retained_mass(),
        exact.tail_mass
    );

    // A sinusoidal frequency wobble: ν(t) = ω₀ + A cos(2πt/τ) has weights J_m(A τ / 2π)².
    let (omega0, tau, amp) = (10.0, 1.0, 6.0);
    let n = 256;
    let samples = (0..n)
        .map(|j| omega0 + amp * (2.0 * PI * j as f64 / n as f64).cos())
        .collect();
    let wobble = ModulationScheme {
        omega0,
        tau,
        kind: ModulationKind::SampledWaveform { samples },
        truncation: 8,
    };
    let s = spectrum_by_quadrature(&wobble)?;
    println!("\nsinusoidal wobble, index {:.3}:", amp * tau / (2.0 * PI));
    for h in &s.entries {
        if h.weight > 1e-6 {
            println!("{:>4} {:>14.10}", h.m, h.weight);
        }
    }
    Ok(())
}
