use qrsim::baths::{BathPreset, BathSpec};
use qrsim::cooling::{
    fit_scaling_exponent, integrate_cooling, CoolingConfig, CoolingStatus, DeltaPolicy,
};

fn config(gamma: f64, prefactor: f64) -> CoolingConfig {
    let cold = BathSpec::cold(BathPreset::AcousticPhonon)
        .with_gamma(gamma)
        .with_prefactor(prefactor);
    let hot = BathSpec::hot(BathPreset::HotCubic).with_temperature(1.0);
    CoolingConfig::new(cold, hot, 1.0, 0.01, 1e11)
}

#[test]
fn halving_the_coupling_doubles_the_time_scale() {
    let a = integrate_cooling(&config(0.75, 1e-9)).unwrap();
    let b = integrate_cooling(&config(0.75, 0.5e-9)).unwrap();
    let (ta, tb) = (a.t_zero().unwrap(), b.t_zero().unwrap());
    assert!((tb / ta - 2.0).abs() < 1e-5, "{ta} {tb}");

    let fa = fit_scaling_exponent(&a.scaling_samples()).unwrap();
    let fb = fit_scaling_exponent(&b.scaling_samples()).unwrap();
    assert!((fb.a_eff / fa.a_eff - 0.5).abs() < 1e-4);
    assert!((fb.gamma_eff - fa.gamma_eff).abs() < 1e-6);
}

#[test]
fn tighter_tolerances_stay_within_error_estimate() {
    let coarse_cfg = config(1.0, 1e-9);
    let mut fine_cfg = coarse_cfg.clone();
    fine_cfg.integrator.rtol *= 0.5;
    fine_cfg.integrator.atol *= 0.5;
    let coarse = integrate_cooling(&coarse_cfg).unwrap();
    let fine = integrate_cooling(&fine_cfg).unwrap();
    assert_eq!(coarse.status, CoolingStatus::TimedOut);
    assert_eq!(fine.status, CoolingStatus::TimedOut);
    let change = (coarse.final_temperature() - fine.final_temperature()).abs();
    assert!(
        change < 10.0 * coarse.error_estimate,
        "{change:e} vs {:e}",
        coarse.error_estimate
    );
}

#[test]
fn optimized_offset_cools_at_least_as_fast_as_fixed_ones() {
    let optimized = integrate_cooling(&config(0.75, 1e-9)).unwrap();
    let fixed =
        integrate_cooling(&config(0.75, 1e-9).with_policy(DeltaPolicy::FixedOffset(2.0))).unwrap();
    let CoolingStatus::ReachedFloor { t_floor: t_opt, .. } = optimized.status else {
        panic!("optimized run should reach the floor")
    };
    match fixed.status {
        CoolingStatus::ReachedFloor { t_floor, .. } => assert!(t_floor >= t_opt * (1.0 - 1e-6)),
        CoolingStatus::TimedOut => assert!(fixed.final_time() >= t_opt),
        CoolingStatus::StalledNonCooling => {}
    }
}

#[test]
fn temperature_decreases_along_trajectory() {
    let traj = integrate_cooling(&config(0.0, 1e-9)).unwrap();
    assert!(matches!(traj.status, CoolingStatus::ReachedFloor { .. }));
    assert!(traj
        .samples
        .windows(2)
        .all(|w| w[1].t > w[0].t && w[1].temperature < w[0].temperature));
    assert!(traj
        .samples
        .iter()
        .all(|s| s.current > 0.0 && s.heat_capacity > 0.0));
    assert!(traj.samples.iter().all(|s| s.delta > 0.0 && s.delta < 1.0));
}
