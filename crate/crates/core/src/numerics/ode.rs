//! Dormand-Prince 5(4) embedded Runge-Kutta step for a scalar ODE.
//!
//! Only the single step lives here; step-size control is left to the caller
//! because the cooling integrator couples acceptance to extra physical checks.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// 5th-order weights (also row 7 of the tableau, FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// difference between 5th- and 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub y: f64,
    /// Local error estimate (5th minus 4th order solution).
    pub error: f64,
    /// Derivative at the new point, reusable as the next step's first stage.
    pub dy_end: f64,
}

/// One Dormand-Prince step from `(t, y)` with slope `dy0 = f(t, y)`.
pub fn dopri_step<F, E>(mut f: F, t: f64, y: f64, dy0: f64, h: f64) -> Result<Step, E>
where
    F: FnMut(f64, f64) -> Result<f64, E>,
{
    let k1 = dy0;
    let k2 = f(t + C2 * h, y + h * A21 * k1)?;
    let k3 = f(t + C3 * h, y + h * (A31 * k1 + A32 * k2))?;
    let k4 = f(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
    let k5 = f(
        t + C5 * h,
        y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4),
    )?;
    let k6 = f(
        t + h,
        y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
    )?;
    let y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    let k7 = f(t + h, y_new)?;
    let error = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    Ok(Step {
        y: y_new,
        error,
        dy_end: k7,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn exponential_decay_fifth_order() {
        let f = |_t: f64, y: f64| Ok::<_, Infallible>(-y);
        let mut y = 1.0;
        let mut dy = -1.0;
        let h = 0.1;
        for i in 0..10 {
            let s = dopri_step(f, i as f64 * h, y, dy, h).unwrap();
            y = s.y;
            dy = s.dy_end;
        }
        assert!((y - (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn error_estimate_scales_with_step() {
        let f = |t: f64, _y: f64| Ok::<_, Infallible>(t.cos());
        let e1 = dopri_step(f, 0.0, 0.0, 1.0, 0.4).unwrap().error.abs();
        let e2 = dopri_step(f, 0.0, 0.0, 1.0, 0.2).unwrap().error.abs();
        // embedded estimate is O(h^5): halving h shrinks it ~32x
        assert!(e1 / e2 > 16.0, "{e1} {e2}");
    }
}
