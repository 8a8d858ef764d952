//! Adaptive Dormand–Prince 5(4) integrator for small real systems.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates y' = f(t, y) from t0 to t1, returning y(t1). `h` carries the
/// step-size suggestion between calls.
pub fn dopri5<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: Tolerance,
    h: &mut f64,
) -> Result<[f64; N]> {
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut step = h.abs().min(span.abs()).max(1e-14 * span.abs().max(1.0));
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);
    let mut iters = 0usize;
    while (t1 - t) * dir > 0.0 {
        iters += 1;
        if iters > 2_000_000 {
            return Err(Error::Solver("ODE step budget exhausted".into()));
        }
        let last = step >= (t1 - t).abs();
        let hs = if last { t1 - t } else { step * dir };
        for s in 1..7 {
            let mut ys = y;
            for (j, a) in A[s].iter().enumerate().take(s) {
                if *a != 0.0 {
                    for i in 0..N {
                        ys[i] += hs * a * k[j][i];
                    }
                }
            }
            k[s] = f(t + C[s] * hs, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let (mut s5, mut s4) = (0.0, 0.0);
            for s in 0..7 {
                s5 += B5[s] * k[s][i];
                s4 += B4[s] * k[s][i];
            }
            y5[i] = y[i] + hs * s5;
            let sc = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((hs * (s5 - s4) / sc).abs());
        }
        if !err.is_finite() {
            return Err(Error::Solver("non-finite ODE state".into()));
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + hs };
            y = y5;
            k[0] = k[6];
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !last {
                step = hs.abs() * fac;
            }
            *h = step;
        } else {
            step = hs.abs() * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if step < 1e-15 * t.abs().max(1.0) {
                return Err(Error::Solver(format!("ODE step size underflow at t = {t}")));
            }
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let mut h = 0.1;
        let tol = Tolerance { rtol: 1e-12, atol: 1e-14 };
        let y = dopri5(&f, 0.0, [0.0, 1.0], 10.0, tol, &mut h).unwrap();
        assert!((y[0] - 10f64.sin()).abs() < 1e-10);
        assert!((y[1] - 10f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn backward_integration() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let mut h = 0.1;
        let tol = Tolerance { rtol: 1e-12, atol: 1e-300 };
        let y = dopri5(&f, 1.0, [1f64.exp()], 0.0, tol, &mut h).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-11);
    }
}
