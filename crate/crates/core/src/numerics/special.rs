//! Spherical Bessel functions, Legendre polynomials and the Airy function.
//!
//! Switchover points:
//! * `j_ℓ`: upward recurrence from j₀, j₁ when x > ℓ; Miller downward recurrence
//!   normalised on j₀ (or j₁ near zeros of j₀) otherwise.
//! * `y_ℓ`: upward recurrence, always stable.
//! * `Ai`: Taylor stepping of y'' = x y from x = 0 for x ∈ [-40, 2]; backward
//!   stepping from the decaying asymptotic series at x = 12 for x ∈ (2, 12);
//!   asymptotic series for x ≥ 12 and x < −40.

use num_complex::Complex64;

use crate::error::{domain, Result};

/// j_0 … j_lmax at x ≥ 0.
pub fn sph_j_array(lmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; lmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let (s, c) = x.sin_cos();
    let j0 = if x < 1e-4 { 1.0 - x * x / 6.0 } else { s / x };
    let j1 = if x < 1e-4 { x / 3.0 * (1.0 - x * x / 10.0) } else { (s / x - c) / x };
    out[0] = j0;
    if lmax == 0 {
        return out;
    }
    if x > lmax as f64 {
        out[1] = j1;
        for n in 1..lmax {
            out[n + 1] = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
        }
        return out;
    }
    // Miller: start well above both ℓ and x.
    let top = lmax.max(x as usize);
    let start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    let mut fp1 = 0.0;
    let mut f = 1e-300;
    let mut tmp = vec![0.0; lmax + 1];
    for n in (1..=start).rev() {
        let fm1 = (2 * n + 1) as f64 / x * f - fp1;
        fp1 = f;
        f = fm1;
        if n - 1 <= lmax {
            tmp[n - 1] = f;
        }
        if n <= lmax {
            tmp[n] = fp1;
        }
        if f.abs() > 1e250 {
            f *= 1e-250;
            fp1 *= 1e-250;
            for t in tmp.iter_mut() {
                *t *= 1e-250;
            }
        }
    }
    let scale = if j0.abs() >= j1.abs() { j0 / tmp[0] } else { j1 / tmp[1] };
    for (o, t) in out.iter_mut().zip(&tmp) {
        *o = t * scale;
    }
    out
}

pub fn sph_j(l: usize, x: f64) -> f64 {
    sph_j_array(l, x)[l]
}

/// y_0 … y_lmax at x > 0.
pub fn sph_y_array(lmax: usize, x: f64) -> Result<Vec<f64>> {
    if !(x > 0.0) {
        return Err(domain(format!("irregular spherical Bessel function needs x > 0, got {x}")));
    }
    let (s, c) = x.sin_cos();
    let mut out = vec![0.0; lmax + 1];
    out[0] = -c / x;
    if lmax >= 1 {
        out[1] = -c / (x * x) - s / x;
    }
    for n in 1..lmax {
        out[n + 1] = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
    }
    Ok(out)
}

pub fn sph_y(l: usize, x: f64) -> Result<f64> {
    Ok(sph_y_array(l, x)?[l])
}

/// Values and x-derivatives of j_ℓ and y_ℓ.
#[derive(Clone, Copy, Debug)]
pub struct SphBessel {
    pub j: f64,
    pub y: f64,
    pub dj: f64,
    pub dy: f64,
}

impl SphBessel {
    pub fn h1(&self) -> Complex64 {
        Complex64::new(self.j, self.y)
    }
}

pub fn sph_bessel(l: usize, x: f64) -> Result<SphBessel> {
    let j = sph_j_array(l + 1, x);
    let y = sph_y_array(l + 1, x)?;
    // f_ℓ' = (ℓ/x) f_ℓ − f_{ℓ+1}
    let lf = l as f64;
    Ok(SphBessel {
        j: j[l],
        y: y[l],
        dj: lf / x * j[l] - j[l + 1],
        dy: lf / x * y[l] - y[l + 1],
    })
}

/// P_0 … P_lmax at x.
pub fn legendre_array(lmax: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; lmax + 1];
    p[0] = 1.0;
    if lmax >= 1 {
        p[1] = x;
    }
    for n in 1..lmax {
        let nf = n as f64;
        p[n + 1] = ((2.0 * nf + 1.0) * x * p[n] - nf * p[n - 1]) / (nf + 1.0);
    }
    p
}

pub fn legendre(l: usize, x: f64) -> f64 {
    legendre_array(l, x)[l]
}

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;

/// Advance (y, y') of y'' = x y from x0 to x0 + h by Taylor series.
fn airy_taylor_step(x0: f64, y: f64, dy: f64, h: f64) -> (f64, f64) {
    // a_{n+2} = (x0 a_n + a_{n-1}) / ((n+2)(n+1))
    let mut a = [0.0f64; 128];
    a[0] = y;
    a[1] = dy;
    let (mut val, mut der) = (y + dy * h, dy);
    let mut hp = h;
    let scale = y.abs() + dy.abs() * h.abs();
    let mut small = 0;
    for n in 2..a.len() {
        let am3 = if n >= 3 { a[n - 3] } else { 0.0 };
        a[n] = (x0 * a[n - 2] + am3) / (n as f64 * (n - 1) as f64);
        der += n as f64 * a[n] * hp;
        hp *= h;
        let term = a[n] * hp;
        val += term;
        if term.abs() <= 1e-18 * scale {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    (val, der)
}

fn airy_u(k: usize) -> Vec<f64> {
    let mut u = vec![1.0; k + 1];
    for i in 1..=k {
        let f = i as f64;
        u[i] = u[i - 1] * (6.0 * f - 5.0) * (6.0 * f - 3.0) * (6.0 * f - 1.0) / ((2.0 * f - 1.0) * 216.0 * f);
    }
    u
}

fn airy_asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let u = airy_u(24);
    let (mut s, mut sp) = (0.0, 0.0);
    let mut zp = 1.0;
    for (k, uk) in u.iter().enumerate() {
        let kf = k as f64;
        let vk = if k == 0 { 1.0 } else { -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk };
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * uk * zp;
        sp += sign * vk * zp;
        zp /= zeta;
    }
    let e = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    let q = x.powf(0.25);
    (e / q * s, -e * q * sp)
}

fn airy_asymptotic_negative(x: f64) -> (f64, f64) {
    let ax = -x;
    let zeta = 2.0 / 3.0 * ax * ax.sqrt();
    let u = airy_u(24);
    let (mut se, mut so, mut ve, mut vo) = (0.0, 0.0, 0.0, 0.0);
    let mut zp = 1.0;
    for (k, uk) in u.iter().enumerate() {
        let kf = k as f64;
        let vk = if k == 0 { 1.0 } else { -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk };
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            se += sign * uk * zp;
            ve += sign * vk * zp;
        } else {
            so += sign * uk * zp;
            vo += sign * vk * zp;
        }
        zp /= zeta;
    }
    let th = zeta + std::f64::consts::FRAC_PI_4;
    let (s, c) = th.sin_cos();
    let q = ax.powf(0.25);
    let rp = 1.0 / std::f64::consts::PI.sqrt();
    let ai = rp / q * (s * se - c * so);
    let aip = -rp * q * (c * ve + s * vo);
    (ai, aip)
}

/// Ai(x) and Ai'(x).
pub fn airy_ai_with_derivative(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x >= 12.0 {
        return airy_asymptotic_positive(x);
    }
    if x < -40.0 {
        return airy_asymptotic_negative(x);
    }
    if x > 2.0 {
        let (mut y, mut dy) = airy_asymptotic_positive(12.0);
        let mut pos = 12.0;
        let steps = ((pos - x) / 0.5).ceil() as usize;
        let h = (x - pos) / steps as f64;
        for _ in 0..steps {
            let (a, b) = airy_taylor_step(pos, y, dy, h);
            y = a;
            dy = b;
            pos += h;
        }
        return (y, dy);
    }
    let steps = (x.abs() / 0.5).ceil().max(1.0) as usize;
    let h = x / steps as f64;
    let (mut y, mut dy, mut pos) = (AI0, AIP0, 0.0);
    for _ in 0..steps {
        let (a, b) = airy_taylor_step(pos, y, dy, h);
        y = a;
        dy = b;
        pos += h;
    }
    (y, dy)
}

pub fn airy_ai(x: f64) -> f64 {
    airy_ai_with_derivative(x).0
}

/// n-th zero (n ≥ 1) of Ai on the negative axis, with Ai' at the zero.
pub fn airy_zero(n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(domain("Airy zeros are indexed from 1"));
    }
    let t = 3.0 * std::f64::consts::PI * (4.0 * n as f64 - 1.0) / 8.0;
    let mut z = -t.powf(2.0 / 3.0) * (1.0 + 5.0 / 48.0 / (t * t) - 5.0 / 36.0 / t.powi(4));
    for _ in 0..50 {
        let (a, ap) = airy_ai_with_derivative(z);
        let dz = a / ap;
        z -= dz;
        if dz.abs() < 1e-15 * z.abs() {
            break;
        }
    }
    let (_, ap) = airy_ai_with_derivative(z);
    Ok((z, ap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_j(l: usize, x: f64) -> f64 {
        // x^ℓ / (2ℓ+1)!! Σ_k (−x²/2)^k / (k! (2ℓ+2k+1)!!/(2ℓ+1)!!)
        let mut dfact = 1.0;
        for i in (1..=(2 * l + 1)).step_by(2) {
            dfact *= i as f64;
        }
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            term *= -0.5 * x * x / (k as f64 * (2 * l + 2 * k + 1) as f64);
            sum += term;
        }
        x.powi(l as i32) / dfact * sum
    }

    #[test]
    fn j0_closed_form() {
        for &x in &[0.1, 1.0, 3.3, 17.0, 150.0] {
            assert!((sph_j(0, x) - x.sin() / x).abs() < 1e-15);
        }
    }

    #[test]
    fn wronskian_at_1_7() {
        let b = sph_bessel(3, 1.7).unwrap();
        let w = b.j * b.dy - b.dj * b.y;
        assert!((w - 1.0 / (1.7 * 1.7)).abs() < 1e-12 * w.abs());
    }

    #[test]
    fn series_agreement() {
        let v = sph_j(5, 0.3);
        let s = series_j(5, 0.3);
        assert!(((v - s) / s).abs() < 1e-13, "{v} vs {s}");
        for &(l, x) in &[(2usize, 1.5f64), (10, 4.0), (20, 0.7), (3, 5.5)] {
            let s = series_j(l, x);
            assert!(((sph_j(l, x) - s) / s).abs() < 1e-10, "l={l} x={x}");
        }
    }

    #[test]
    fn irregular_needs_positive_argument() {
        assert!(sph_y(2, 0.0).is_err());
        assert!(sph_bessel(1, -1.0).is_err());
    }

    #[test]
    fn recurrence_regimes_join() {
        // near x = ℓ the two branches must agree
        let a = sph_j_array(30, 29.999)[30];
        let b = sph_j_array(30, 30.001)[30];
        assert!((a - b).abs() < 1e-3 * a.abs());
    }

    #[test]
    fn legendre_values() {
        let x = 0.37;
        assert!((legendre(2, x) - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
        assert!((legendre(3, x) - 0.5 * (5.0 * x.powi(3) - 3.0 * x)).abs() < 1e-15);
        assert_eq!(legendre(7, 1.0), 1.0);
    }

    #[test]
    fn airy_origin() {
        let gamma_two_thirds = 1.354_117_939_426_400_4;
        let expect = 3f64.powf(-2.0 / 3.0) / gamma_two_thirds;
        assert!((airy_ai(0.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn airy_decays() {
        assert!(airy_ai(8.0) > 0.0);
        assert!(airy_ai(8.0) < airy_ai(4.0));
        assert!(airy_ai(20.0) < airy_ai(8.0));
    }

    #[test]
    fn airy_continuity_at_switchovers() {
        for &x in &[2.0f64, 12.0, -40.0] {
            let (a, da) = airy_ai_with_derivative(x - 1e-9);
            let (b, _) = airy_ai_with_derivative(x + 1e-9);
            let jump = b - a - 2e-9 * da;
            assert!(jump.abs() < 1e-11 * a.abs().max(1e-3), "x={x}: {a} {b} {jump:e}");
        }
    }

    #[test]
    fn airy_solves_ode() {
        for &x in &[-30.0, -7.3, -1.0, 0.5, 3.0, 9.0] {
            let h = 1e-4;
            let d2 = (airy_ai(x + h) - 2.0 * airy_ai(x) + airy_ai(x - h)) / (h * h);
            assert!((d2 - x * airy_ai(x)).abs() < 1e-5 * (1.0 + x.abs()), "x={x}");
        }
    }

    #[test]
    fn airy_reference_values() {
        let table = [
            (-40.0, -0.045_933_923_437_957_25),
            (-20.0, -0.176_406_127_077_984_7),
            (-5.0, 0.350_761_009_024_114_3),
            (2.0, 0.034_924_130_423_274_38),
            (5.0, 1.083_444_281_360_744e-4),
            (11.9, 1.972_577_843_025_200_4e-13),
        ];
        for (x, v) in table {
            assert!(((airy_ai(x) - v) / v).abs() < 1e-10, "x={x}: {} vs {v}", airy_ai(x));
        }
    }

    #[test]
    fn airy_pure() {
        assert_eq!(airy_ai(-3.21).to_bits(), airy_ai(-3.21).to_bits());
    }
}
