//! Cooling of a finite cold bath toward absolute zero for three coupling
//! exponents, with the fitted scaling exponent of dT/dt against T.
//!
//! Run with `cargo run --release --example cooling_trajectories`.

use qrsim::baths::{BathPreset, BathSpec};
use qrsim::cooling::{fit_scaling_exponent, integrate_cooling, CoolingConfig, CoolingStatus};

fn main() -> qrsim::Result<()> {
    let hot = BathSpec::hot(BathPreset::HotCubic).with_temperature(1.0);
    for gamma in [1.0, 0.75, 0.0] {
        let cold = BathSpec::cold(BathPreset::AcousticPhonon)
            .with_gamma(gamma)
            .with_prefactor(1e-9);
        let config = CoolingConfig::new(cold, hot.clone(), 1.0, 0.01, 1e11);
        let traj = integrate_cooling(&config)?;
        let fit = fit_scaling_exponent(&traj.scaling_samples())?;
        println!("gamma = {gamma}");
        match traj.status {
            CoolingStatus::ReachedFloor { t_floor, t_zero } => {
                println!("  reached the floor at t = {t_floor:.4e}");
                if let Some(t0) = t_zero {
                    println!("  extrapolated time to T = 0: {t0:.4e}");
                }
            }
            CoolingStatus::TimedOut => println!(
                "  still cooling at t_max: T_C = {:.3e} (exponential approach)",
                traj.final_temperature()
            ),
            CoolingStatus::StalledNonCooling => {
                println!("  stalled at T_C = {:.3e}", traj.final_temperature())
            }
        }
        println!(
            "  dT/dt ~ -A T^g: g = {:.4}, A = {:.3e} over {:.2} decades ({} samples, R^2 = {:.6})",
            fit.gamma_eff, fit.a_eff, fit.decades, fit.samples, fit.r_squared
        );
        for s in traj.samples.iter().step_by((traj.samples.len() / 5).max(1)) {
            println!(
                "    t = {:>10.3e}  T_C = {:>9.3e}  delta = {:.6}  J_C = {:>10.3e}",
                s.t, s.temperature, s.delta, s.current
            );
        }
    }
    Ok(())
}
