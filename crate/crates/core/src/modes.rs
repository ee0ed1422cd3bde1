//! Orthonormal eigenmodes of 𝓛₁ as ambient polynomials, with intrinsic jets.
//!
//! Plane modes are tensor products of He_k(y/√2)/√(k!). Round-factor modes are
//! homogeneous harmonic polynomials (solid harmonics) restricted to the sphere,
//! normalized by exact monomial integration against dμ_{−1}.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use nalgebra::{DMatrix, DVector};

use crate::background::{Background, Mode, ModeLabel};
use crate::error::{Error, Result};
use crate::geometry::{ensure_on_shrinker, ensure_supported, geometry_at, GeometryData};
use crate::poly::Poly;
use crate::special::{binomial, factorial, gaussian_moment, sphere_monomial_integral};

/// He_k(y/√2)/√(k!) in one variable.
pub fn hermite_mode_1d(k: u32) -> Poly {
    let x = Poly::var(1, 0);
    let mut prev = Poly::zero(1);
    let mut cur = Poly::constant(1, 1.0);
    for j in 0..k {
        let next = &(&x * &cur) - &prev.scale(j as f64);
        prev = cur;
        cur = next;
    }
    cur.rescale_vars(std::f64::consts::FRAC_1_SQRT_2)
        .scale(1.0 / factorial(k).sqrt())
}

/// Re or Im of (x + iy)^m in the first two of `nvars` variables.
fn complex_power(nvars: usize, m: u32, imaginary: bool) -> Poly {
    let mut out = Poly::zero(nvars);
    for j in 0..=m {
        let real_part = j % 2 == 0;
        if real_part == imaginary {
            continue;
        }
        let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let mut e = vec![0; nvars];
        e[0] = m - j;
        e[1] = j;
        out = &out + &Poly::monomial(nvars, e, sign * binomial(m, j));
    }
    out
}

/// Unnormalized degree-k harmonic on S¹ ⊂ R².
fn circle_harmonic(degree: u32, label: u32) -> Poly {
    if degree == 0 {
        return Poly::constant(2, 1.0);
    }
    complex_power(2, degree, label == 1)
}

/// Unnormalized real solid harmonic of degree l on S² ⊂ R³.
///
/// r^l P_l^m(z/r)·{cos, sin}(mφ) ∝ Re/Im[(x+iy)^m] · r^{l−m} P_l^{(m)}(z/r), and
/// the second factor expands to Σ_j c_j z^{l−m−2j} (x²+y²+z²)^j.
fn sphere2_harmonic(degree: u32, label: u32) -> Poly {
    let l = degree;
    let m = label.div_ceil(2);
    let imaginary = label > 0 && label % 2 == 0;
    let r2 = Poly::norm_sq(3, 0..3);
    let mut legendre = Poly::zero(3);
    for j in 0..=l / 2 {
        let power = l - 2 * j;
        if power < m {
            continue;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * binomial(l, j) * binomial(2 * l - 2 * j, l)
            / 2f64.powi(l as i32)
            * factorial(power)
            / factorial(power - m);
        let mut e = vec![0; 3];
        e[2] = power - m;
        let term = &Poly::monomial(3, e, coeff) * &r2.pow(j);
        legendre = &legendre + &term;
    }
    let azimuthal = if m == 0 {
        Poly::constant(3, 1.0)
    } else {
        complex_power(3, m, imaginary)
    };
    &azimuthal * &legendre
}

/// ∫ p dμ_{−1} computed exactly monomial by monomial.
pub fn exact_integral(bg: &Background, p: &Poly) -> Result<f64> {
    bg.validate()?;
    if p.nvars() != bg.ambient_dim() {
        return Err(Error::InvalidArgument {
            name: "poly",
            reason: format!(
                "polynomial has {} variables, {bg} needs {}",
                p.nvars(),
                bg.ambient_dim()
            ),
        });
    }
    let round = |d: u32, exps: &[u32]| -> f64 {
        let r2 = 2.0 * d as f64;
        let deg: u32 = exps.iter().sum();
        (4.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0)
            * (-r2 / 4.0).exp()
            * r2.sqrt().powi((deg + d) as i32)
            * sphere_monomial_integral(exps)
    };
    Ok(p.terms()
        .map(|(e, c)| {
            c * match *bg {
                Background::Plane { .. } => e.iter().map(|&k| gaussian_moment(k)).product(),
                Background::Sphere { n } => round(n, e),
                Background::Cylinder { k, .. } => {
                    let split = k as usize + 1;
                    round(k, &e[..split])
                        * e[split..].iter().map(|&j| gaussian_moment(j)).product::<f64>()
                }
            }
        })
        .sum())
}

/// Orthonormal eigenfunction of 𝓛₁ as an ambient polynomial.
pub fn mode_polynomial(bg: &Background, label: &ModeLabel) -> Result<Poly> {
    ensure_supported(bg)?;
    bg.check_label(label)?;
    let d = bg.ambient_dim();
    let p = match (*bg, label) {
        (Background::Plane { .. }, ModeLabel::Hermite(degrees)) => degrees
            .iter()
            .enumerate()
            .fold(Poly::constant(d, 1.0), |acc, (i, &k)| {
                &acc * &hermite_mode_1d(k).embed(d, &[i])
            }),
        (Background::Sphere { n }, ModeLabel::Harmonic { degree, label }) => {
            let raw = if n == 1 {
                circle_harmonic(*degree, *label)
            } else {
                sphere2_harmonic(*degree, *label)
            };
            let norm = exact_integral(bg, &(&raw * &raw))?.sqrt();
            raw.scale(1.0 / norm)
        }
        (
            Background::Cylinder { .. },
            ModeLabel::Product {
                degree,
                label,
                axial,
            },
        ) => {
            let raw = circle_harmonic(*degree, *label);
            let circle = Background::Sphere { n: 1 };
            let norm = exact_integral(&circle, &(&raw * &raw))?.sqrt();
            let round = raw.scale(1.0 / norm).embed(d, &[0, 1]);
            // axial Gaussian factor integrates to 1, the circle factor carries the density
            let axial_part = hermite_mode_1d(axial[0]).embed(d, &[2]);
            &round * &axial_part
        }
        _ => unreachable!("label checked against background"),
    };
    Ok(p)
}

/// Value, intrinsic gradient, intrinsic Hessian and 𝓛₁ of a function at a
/// point of the unit-scale shrinker. Vectors and forms use ambient coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
    pub drift_laplacian: f64,
}

impl Jet {
    pub fn zero(dim: usize) -> Self {
        Self {
            value: 0.0,
            gradient: DVector::zeros(dim),
            hessian: DMatrix::zeros(dim, dim),
            drift_laplacian: 0.0,
        }
    }

    pub fn laplacian(&self) -> f64 {
        self.hessian.trace()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet {
            value: self.value + rhs.value,
            gradient: self.gradient + rhs.gradient,
            hessian: self.hessian + rhs.hessian,
            drift_laplacian: self.drift_laplacian + rhs.drift_laplacian,
        }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        Jet {
            value: self.value * s,
            gradient: self.gradient * s,
            hessian: self.hessian * s,
            drift_laplacian: self.drift_laplacian * s,
        }
    }
}

/// An ambient polynomial with its derivatives precomputed.
#[derive(Clone, Debug)]
pub struct SmoothFunction {
    pub value: Poly,
    gradient: Vec<Poly>,
    hessian: Vec<Vec<Poly>>,
}

impl SmoothFunction {
    pub fn new(value: Poly) -> Self {
        Self {
            gradient: value.gradient(),
            hessian: value.hessian(),
            value,
        }
    }

    pub fn ambient_gradient(&self, y: &[f64]) -> DVector<f64> {
        DVector::from_iterator(y.len(), self.gradient.iter().map(|g| g.eval(y)))
    }

    pub fn ambient_hessian(&self, y: &[f64]) -> DMatrix<f64> {
        let d = y.len();
        DMatrix::from_fn(d, d, |i, j| self.hessian[i][j].eval(y))
    }

    /// Intrinsic jet: ∇_M f = P∇f and Hess_M f = P D²f P + ⟨∇f, A⟩.
    pub fn jet(&self, geometry: &GeometryData, y: &[f64]) -> Jet {
        let p = &geometry.metric;
        let grad = self.ambient_gradient(y);
        let hess = self.ambient_hessian(y);
        let tangent_grad = p * &grad;
        let hessian = p * hess * p + geometry.pair_with(&grad);
        let position = DVector::from_column_slice(y);
        let drift_laplacian = hessian.trace() - 0.5 * position.dot(&tangent_grad);
        Jet {
            value: self.value.eval(y),
            gradient: tangent_grad,
            hessian,
            drift_laplacian,
        }
    }
}

/// Orthonormal modes of one background, built lazily and cached.
#[derive(Clone, Debug)]
pub struct ModeBasis {
    background: Background,
    functions: BTreeMap<ModeLabel, SmoothFunction>,
}

impl ModeBasis {
    pub fn new(background: Background) -> Result<Self> {
        ensure_supported(&background)?;
        Ok(Self {
            background,
            functions: BTreeMap::new(),
        })
    }

    pub fn background(&self) -> Background {
        self.background
    }

    pub fn function(&mut self, label: &ModeLabel) -> Result<&SmoothFunction> {
        if !self.functions.contains_key(label) {
            let poly = mode_polynomial(&self.background, label)?;
            self.functions.insert(label.clone(), SmoothFunction::new(poly));
        }
        Ok(&self.functions[label])
    }

    /// Jet of Σ a_j φ_j at a point.
    pub fn combination_jet<'a>(
        &mut self,
        terms: impl IntoIterator<Item = (&'a ModeLabel, f64)>,
        geometry: &GeometryData,
        y: &[f64],
    ) -> Result<Jet> {
        let mut jet = Jet::zero(y.len());
        for (label, a) in terms {
            if a == 0.0 {
                continue;
            }
            jet = jet + self.function(label)?.jet(geometry, y) * a;
        }
        Ok(jet)
    }
}

/// Value of the orthonormalized eigenfunction at a unit-scale point.
pub fn evaluate_mode(bg: &Background, mode: &Mode, point: &[f64]) -> Result<f64> {
    ensure_supported(bg)?;
    ensure_on_shrinker(bg, point)?;
    Ok(mode_polynomial(bg, &mode.label)?.eval(point))
}

/// Intrinsic jet of a single mode at a unit-scale point.
pub fn mode_jet(bg: &Background, label: &ModeLabel, point: &[f64]) -> Result<Jet> {
    let geometry = geometry_at(bg, point)?;
    let f = SmoothFunction::new(mode_polynomial(bg, label)?);
    Ok(f.jet(&geometry, point))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_degree_two_is_y_squared_minus_two() {
        // (d² − (y/2)d)(y² + c) = 2 − y² ⇒ eigenvalue −1 needs c = −2.
        let p = hermite_mode_1d(2);
        let ratio = p.eval(&[3.0]) / (9.0 - 2.0);
        for y in [-2.0, 0.5, 1.7] {
            assert!((p.eval(&[y]) - ratio * (y * y - 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn hermite_eigen_equation_holds_exactly() {
        for k in 0..=6 {
            let p = hermite_mode_1d(k);
            let y = Poly::var(1, 0);
            let lhs = &p.derivative(0).derivative(0) - &(&y * &p.derivative(0)).scale(0.5);
            let residual = &lhs + &p.scale(k as f64 / 2.0);
            assert!(
                residual.terms().all(|(_, c)| c.abs() < 1e-12),
                "k={k}: {residual:?}"
            );
        }
    }

    #[test]
    fn solid_harmonics_are_harmonic() {
        for l in 0..6 {
            for label in 0..(2 * l + 1) {
                let p = sphere2_harmonic(l, label);
                assert!(!p.is_zero());
                assert!(p.laplacian().terms().all(|(_, c)| c.abs() < 1e-9), "l={l} #{label}");
            }
        }
        for k in 0..6 {
            for label in 0..(if k == 0 { 1 } else { 2 }) {
                assert!(circle_harmonic(k, label).laplacian().is_zero());
            }
        }
    }

    #[test]
    fn odd_plane_mode_vanishes_at_origin() {
        let bg = Background::plane(1).unwrap();
        let mode = bg.mode(ModeLabel::Hermite(vec![1])).unwrap();
        assert_eq!(evaluate_mode(&bg, &mode, &[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn circle_cosine_peak() {
        let bg = Background::sphere(1).unwrap();
        let mode = bg
            .mode(ModeLabel::Harmonic {
                degree: 1,
                label: 0,
            })
            .unwrap();
        let r = std::f64::consts::SQRT_2;
        let peak = evaluate_mode(&bg, &mode, &[r, 0.0]).unwrap();
        // cos θ normalized: ∫cos² dμ = mass/2
        let expected = (2.0 / bg.gaussian_density()).sqrt();
        assert!((peak - expected).abs() < 1e-14);
        for theta in [0.3f64, 1.0, 2.5] {
            let v = evaluate_mode(&bg, &mode, &[r * theta.cos(), r * theta.sin()]).unwrap();
            assert!(v < peak);
        }
    }

    #[test]
    fn drift_laplacian_of_modes_matches_eigenvalue() {
        let cases: Vec<(Background, Vec<f64>)> = vec![
            (Background::plane(2).unwrap(), vec![0.4, -1.3]),
            (Background::plane(3).unwrap(), vec![0.4, -1.3, 2.0]),
            (Background::sphere(1).unwrap(), vec![1.0, 1.0]),
            (Background::sphere(2).unwrap(), vec![1.2, 0.0, 1.6]),
            (Background::cylinder(1, 1).unwrap(), vec![0.0, -std::f64::consts::SQRT_2, 0.9]),
        ];
        for (bg, point) in cases {
            for mode in bg.enumerate_modes(3.0).unwrap() {
                let jet = mode_jet(&bg, &mode.label, &point).unwrap();
                assert!(
                    (jet.drift_laplacian + mode.mu * jet.value).abs() < 1e-10,
                    "{bg} {}: {} vs {}",
                    mode.label,
                    jet.drift_laplacian,
                    -mode.mu * jet.value
                );
            }
        }
    }

    #[test]
    fn exact_integral_mass() {
        for bg in [
            Background::plane(2).unwrap(),
            Background::sphere(1).unwrap(),
            Background::sphere(2).unwrap(),
            Background::sphere(4).unwrap(),
            Background::cylinder(1, 1).unwrap(),
        ] {
            let one = Poly::constant(bg.ambient_dim(), 1.0);
            let mass = exact_integral(&bg, &one).unwrap();
            assert!((mass - bg.gaussian_density()).abs() < 1e-13, "{bg}");
        }
    }
}
