//! Coupling spectra, occupancies and heat capacities of the bath presets.
//!
//! Run with `cargo run --example bath_spectra`.

use qrsim::baths::{coupling_spectrum, heat_capacity, occupancy, BathPreset, BathSpec};

fn main() -> qrsim::Result<()> {
    let t = 0.2;
    let baths = [
        (
            "acoustic phonon",
            BathSpec::cold(BathPreset::AcousticPhonon),
        ),
        (
            "fracton 0.5",
            BathSpec::cold(BathPreset::Fracton { gamma: 0.5 }),
        ),
        ("magnon", BathSpec::cold(BathPreset::Magnon)),
        ("hot cubic", BathSpec::hot(BathPreset::HotCubic)),
    ];

    println!("T = {t}");
    println!(
        "{:<16} {:>10} {:>12} {:>12} {:>12}",
        "bath", "omega", "G(+omega)", "G(-omega)", "G0"
    );
    for (name, bath) in &baths {
        let bath = bath.clone().with_temperature(t);
        for w in [0.1, 0.5, 0.9] {
            println!(
                "{name:<16} {w:>10.2} {:>12.4e} {:>12.4e} {:>12.4e}",
                coupling_spectrum(&bath, w)?,
                coupling_spectrum(&bath, -w)?,
                bath.bare_spectrum(w)
            );
        }
    }

    println!("\noccupancy n(omega = 1):");
    for temp in [0.05, 0.2, 1.0, 5.0] {
        println!("  T = {temp:<5} n = {:.6e}", occupancy(1.0, temp)?);
    }

    println!("\nheat capacity of the acoustic phonon bath, c_V ~ T^d at low T:");
    let phonon = BathSpec::cold(BathPreset::AcousticPhonon);
    for temp in [1e-4, 1e-3, 1e-2, 1e-1] {
        let c = heat_capacity(&phonon, temp)?;
        println!(
            "  T = {temp:<7.0e} c_V = {c:.6e}  c_V/T^3 = {:.6}",
            c / temp.powi(3)
        );
    }
    Ok(())
}
