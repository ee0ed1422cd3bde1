//! Gauss rules and a few exact special-function values used by the
//! quadrature and normalization code.

use std::f64::consts::PI;

/// Γ(a/2) for a positive integer `a`, by the half-step recurrence.
pub fn gamma_half(a: u32) -> f64 {
    assert!(a > 0, "gamma_half needs a positive argument");
    let mut value = if a % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if a % 2 == 0 { 1.0 } else { 0.5 };
    let target = a as f64 / 2.0;
    while x < target - 0.25 {
        value *= x;
        x += 1.0;
    }
    value
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Area of the unit sphere S^d ⊂ R^{d+1}.
pub fn unit_sphere_area(d: u32) -> f64 {
    2.0 * PI.powf((d + 1) as f64 / 2.0) / gamma_half(d + 1)
}

/// ∫_{S^{d-1}} u^α dΩ over the unit sphere in R^d, d = α.len().
pub fn sphere_monomial_integral(exponents: &[u32]) -> f64 {
    if exponents.iter().any(|e| e % 2 == 1) {
        return 0.0;
    }
    let numerator: f64 = exponents.iter().map(|&e| gamma_half(e + 1)).product();
    let total: u32 = exponents.iter().map(|&e| e + 1).sum();
    2.0 * numerator / gamma_half(total)
}

/// E[y^p] for y ~ N(0, 2), the one-dimensional factor of dμ_{-1} on a plane.
pub fn gaussian_moment(p: u32) -> f64 {
    if p % 2 == 1 {
        return 0.0;
    }
    // (p-1)!! * 2^(p/2)
    let mut value = 1.0;
    let mut j = 1;
    while j < p {
        value *= j as f64;
        j += 2;
    }
    value * 2f64.powi((p / 2) as i32)
}

/// Gauss rule for the standard normal weight e^{-x²/2}/√(2π); weights sum to 1.
///
/// Nodes are Newton-polished roots of the orthonormal probabilists' Hermite
/// polynomial, weights are 1/(m h̃_{m-1}(x)²).
pub fn gauss_hermite_normal(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let eval = |x: f64| -> (f64, f64, f64) {
        // returns (h̃_m, h̃_{m-1}, h̃'_m)
        let mut prev = 0.0;
        let mut cur = 1.0;
        for k in 0..m {
            let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
            prev = cur;
            cur = next;
        }
        (cur, prev, (m as f64).sqrt() * prev)
    };
    // Golub–Welsch for the initial nodes, then Newton on the recurrence.
    let jacobi = nalgebra::DMatrix::from_fn(m, m, |i, j| {
        if i.abs_diff(j) == 1 {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let mut all: Vec<f64> = nalgebra::SymmetricEigen::new(jacobi)
        .eigenvalues
        .iter()
        .map(|&guess| {
            let mut x = guess;
            for _ in 0..8 {
                let (p, _, dp) = eval(x);
                let step = p / dp;
                x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            x
        })
        .collect();
    all.sort_by(f64::total_cmp);
    // symmetrize so odd moments vanish exactly
    for i in 0..m / 2 {
        let r = 0.5 * (all[m - 1 - i] - all[i]);
        all[i] = -r;
        all[m - 1 - i] = r;
    }
    if m % 2 == 1 {
        all[m / 2] = 0.0;
    }
    let mf = m as f64;
    let weights = all
        .iter()
        .map(|&x| {
            let (_, prev, _) = eval(x.abs());
            1.0 / (mf * prev * prev)
        })
        .collect();
    (all, weights)
}

/// Gauss–Legendre rule on [-1, 1]; weights sum to 2.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mf = m as f64;
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let (p, pm1) = if m == 1 { (x, 1.0) } else { (p1, p0) };
            dp = mf * (x * p - pm1) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}
