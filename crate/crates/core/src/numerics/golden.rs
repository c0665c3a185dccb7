//! Golden-section search for the maximum of a unimodal function.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Maximizes `f` on `[lo, hi]` until the bracket is narrower than
/// `rel_width · max(|lo|, |hi|, 1e-300)`. The returned point is the best
/// evaluated point, so it never falls below `f` at the bracket interior probes.
pub fn maximize<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, rel_width: f64) -> Maximum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > rel_width * a.abs().max(b.abs()).max(1e-300) && iterations < 500 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    if fc >= fd {
        Maximum {
            x: c,
            value: fc,
            iterations,
        }
    } else {
        Maximum {
            x: d,
            value: fd,
            iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let m = maximize(|x| -(x - 1.3).powi(2) + 2.0, 0.0, 5.0, 1e-10);
        // a flat maximum only pins x to about sqrt(machine epsilon)
        assert!((m.x - 1.3).abs() < 1e-6);
        assert!((m.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_bracket() {
        let m = maximize(|x: f64| (-x * x).exp(), 2.0, -3.0, 1e-9);
        assert!(m.x.abs() < 1e-7);
    }
}
