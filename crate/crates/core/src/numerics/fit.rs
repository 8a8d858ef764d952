//! Least-squares fits used for decay exponents and convergence orders.

/// Ordinary least squares y ≈ a + b x, returning (b, a).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of ln y against ln x. Decay like x^{-p} gives slope −p.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Decay exponent p of y ~ x^{-p} fitted over points with x ≥ x_max / window.
pub fn decay_exponent(x: &[f64], y: &[f64], window: f64) -> f64 {
    let xmax = x.iter().copied().fold(f64::MIN, f64::max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(a, _)| **a >= xmax / window * (1.0 - 1e-12))
        .map(|(a, b)| (*a, *b))
        .unzip();
    -loglog_slope(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let x: Vec<f64> = (0..12).map(|i| 2f64.powi(i)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-1.7)).collect();
        assert!((decay_exponent(&x, &y, 1e9) - 1.7).abs() < 1e-12);
        assert!((decay_exponent(&x, &y, 10.0) - 1.7).abs() < 1e-12);
    }
}
