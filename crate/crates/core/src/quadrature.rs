use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::background::Background;
use crate::error::{Error, Result};
use crate::geometry::ensure_supported;
use crate::special::{gauss_hermite_normal, gauss_legendre};

/// Points on the unit-scale shrinker with positive weights representing dμ_{−1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub background: Background,
    pub resolution: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }
}

/// Gauss rule for N(0, 2) in one variable.
fn axial_rule(m: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_hermite_normal(m);
    (x.into_iter().map(|x| SQRT_2 * x).collect(), w)
}

/// Uniform angles on the circle of radius √2, carrying the full circle mass.
fn circle_rule(count: usize) -> (Vec<[f64; 2]>, Vec<f64>) {
    let mass = Background::Sphere { n: 1 }.gaussian_density();
    let points = (0..count)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / count as f64;
            [SQRT_2 * theta.cos(), SQRT_2 * theta.sin()]
        })
        .collect();
    (points, vec![mass / count as f64; count])
}

/// Tensor-product rule with `resolution` nodes per Gaussian direction.
///
/// Planes and axial factors use Gauss–Hermite nodes for N(0, 2); the round
/// S² uses Gauss–Legendre in cos θ times 2·resolution uniform longitudes;
/// circles use 2·resolution uniform angles.
pub fn quadrature(bg: &Background, resolution: usize) -> Result<QuadratureRule> {
    ensure_supported(bg)?;
    if resolution == 0 {
        return Err(Error::InvalidArgument {
            name: "resolution",
            reason: "must be at least 1".into(),
        });
    }
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match *bg {
        Background::Plane { n } => {
            let (x, w) = axial_rule(resolution);
            let n = n as usize;
            let total = resolution.pow(n as u32);
            for flat in 0..total {
                let mut idx = flat;
                let mut p = vec![0.0; n];
                let mut weight = 1.0;
                for coord in p.iter_mut().rev() {
                    let j = idx % resolution;
                    idx /= resolution;
                    *coord = x[j];
                    weight *= w[j];
                }
                points.push(p);
                weights.push(weight);
            }
        }
        Background::Sphere { n: 1 } => {
            let (pts, w) = circle_rule(2 * resolution);
            points = pts.iter().map(|p| p.to_vec()).collect();
            weights = w;
        }
        Background::Sphere { .. } => {
            let r = 2.0;
            let density = (-1.0f64).exp() / (4.0 * PI);
            let (z, wz) = gauss_legendre(resolution);
            let longitudes = 2 * resolution;
            let dphi = 2.0 * PI / longitudes as f64;
            for (zi, wi) in z.iter().zip(&wz) {
                let s = (1.0 - zi * zi).sqrt();
                for j in 0..longitudes {
                    let phi = dphi * j as f64;
                    points.push(vec![r * s * phi.cos(), r * s * phi.sin(), r * zi]);
                    weights.push(wi * dphi * r * r * density);
                }
            }
        }
        Background::Cylinder { .. } => {
            let (circle, wc) = circle_rule(2 * resolution);
            let (x, wx) = axial_rule(resolution);
            for (c, w1) in circle.iter().zip(&wc) {
                for (z, w2) in x.iter().zip(&wx) {
                    points.push(vec![c[0], c[1], *z]);
                    weights.push(w1 * w2);
                }
            }
        }
    }
    Ok(QuadratureRule {
        background: *bg,
        resolution,
        points,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shrinker_defect;
    use crate::poly::Poly;

    #[test]
    fn masses() {
        let e = std::f64::consts::E;
        for res in [1, 4, 17, 32] {
            let s2 = quadrature(&Background::sphere(2).unwrap(), res).unwrap();
            assert!((s2.total_mass() - 4.0 / e).abs() < 1e-13);
            let p2 = quadrature(&Background::plane(2).unwrap(), res).unwrap();
            assert!((p2.total_mass() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn line_rule_is_gaussian() {
        let bg = Background::plane(1).unwrap();
        for m in [1usize, 3, 8] {
            let rule = quadrature(&bg, m).unwrap();
            for deg in 0..(2 * m as u32) {
                let p = Poly::monomial(1, vec![deg], 1.0);
                let q = rule.integrate(|y| p.eval(y));
                let exact = crate::modes::exact_integral(&bg, &p).unwrap();
                assert!((q - exact).abs() <= 1e-10 * exact.abs().max(1.0), "m={m} deg={deg}");
            }
        }
    }

    #[test]
    fn points_lie_on_shrinker() {
        for bg in [
            Background::sphere(1).unwrap(),
            Background::sphere(2).unwrap(),
            Background::cylinder(1, 1).unwrap(),
        ] {
            let rule = quadrature(&bg, 6).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for p in &rule.points {
                assert!(shrinker_defect(&bg, p).unwrap() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_unsupported_and_zero_resolution() {
        assert!(quadrature(&Background::sphere(3).unwrap(), 4).is_err());
        assert!(quadrature(&Background::plane(1).unwrap(), 0).is_err());
    }
}
