//! Finite differences on (possibly non-uniform) time grids.

/// Three-point derivative estimates at interior nodes, exact for quadratics.
pub fn centered_derivatives(times: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    assert_eq!(times.len(), values.len());
    (1..times.len().saturating_sub(1))
        .map(|i| {
            let (hm, hp) = (times[i] - times[i - 1], times[i + 1] - times[i]);
            let d = (hm * hm * (values[i + 1] - values[i]) + hp * hp * (values[i] - values[i - 1]))
                / (hm * hp * (hm + hp));
            (times[i], d)
        })
        .collect()
}

/// Largest |f'''| estimated by third divided differences (×3!).
pub fn third_derivative_bound(times: &[f64], values: &[f64]) -> f64 {
    let n = times.len();
    if n < 4 {
        return 0.0;
    }
    let mut dd: Vec<f64> = values.to_vec();
    for order in 1..=3 {
        dd = (0..dd.len() - 1)
            .map(|i| (dd[i + 1] - dd[i]) / (times[i + order] - times[i]))
            .collect();
    }
    dd.iter().fold(0.0f64, |m, v| m.max(6.0 * v.abs()))
}

/// Truncation allowance for centered derivatives: Δt² · max|f'''|.
pub fn truncation_allowance(times: &[f64], values: &[f64]) -> f64 {
    let h = times
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    h * h * third_derivative_bound(times, values)
}
