//! Three-point finite differences on nonuniform nodes (exact for quadratics)
//! and cumulative trapezoid integration.

/// First derivative at every node; one-sided stencils at the ends.
pub fn derivative(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 3 && f.len() == n, "need at least 3 matching samples");
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let h1 = x[i] - x[i - 1];
        let h2 = x[i + 1] - x[i];
        d[i] = -h2 / (h1 * (h1 + h2)) * f[i - 1]
            + (h2 - h1) / (h1 * h2) * f[i]
            + h1 / (h2 * (h1 + h2)) * f[i + 1];
    }
    let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1]
        - h1 / (h2 * (h1 + h2)) * f[2];
    let (h1, h2) = (x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]);
    d[n - 1] = h2 / (h1 * (h1 + h2)) * f[n - 3] - (h1 + h2) / (h1 * h2) * f[n - 2]
        + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
    d
}

/// Central second difference on a uniform grid, interior nodes only
/// (the ends are `NaN`).
pub fn second_uniform(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![f64::NAN; n];
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
    }
    d
}

/// `∫_{x[start]}^{x[i]} f` by the trapezoid rule.
pub fn cumulative_trapezoid(x: &[f64], f: &[f64], start: usize) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    for i in start + 1..n {
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
    }
    for i in (0..start).rev() {
        out[i] = out[i + 1] - 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
    }
    out
}

/// `max |a_i|`, ignoring non-finite entries.
pub fn max_abs(a: &[f64]) -> f64 {
    a.iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratics_are_exact() {
        let x = vec![0.0, 0.1, 0.35, 0.4, 1.0, 1.7];
        let f: Vec<f64> = x.iter().map(|t| 3.0 * t * t - t + 2.0).collect();
        for (t, d) in x.iter().zip(derivative(&x, &f)) {
            assert!((d - (6.0 * t - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn second_difference_order() {
        let err = |n: usize| {
            let h = 1.0 / (n - 1) as f64;
            let f: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
            let d = second_uniform(&f, h);
            (1..n - 1)
                .map(|i| (d[i] + (i as f64 * h).sin()).abs())
                .fold(0.0, f64::max)
        };
        let order = (err(51) / err(101)).log2();
        assert!((order - 2.0).abs() < 0.1);
    }

    #[test]
    fn trapezoid() {
        let x: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let f: Vec<f64> = x.iter().map(|t| 2.0 * t).collect();
        let c = cumulative_trapezoid(&x, &f, 50);
        assert!((c[100] - 0.75).abs() < 1e-12);
        assert!((c[0] + 0.25).abs() < 1e-12);
    }
}
