//! d/dt ∫ f dμ_t = ∫ ((∂_t − Δ)f − |H − x^⊥/2t|² f) dμ_t for ambient polynomial
//! test functions, with the left side differenced in time and the right side
//! assembled from closed-form derivatives and curvature.

use nalgebra::DVector;

use crate::background::Background;
use crate::error::{Error, Result};
use crate::field::TimeGrid;
use crate::geometry::{ensure_supported, geometry_at, GeometryData};
use crate::modes::SmoothFunction;
use crate::poly::Poly;
use crate::quadrature::QuadratureRule;

use super::diff::{centered_derivatives, truncation_allowance};
use super::report::{CheckKind, ReportBuilder, VerificationReport};

/// f(x, t) = Σ_p t^p P_p(x) in ambient coordinates.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub name: String,
    terms: Vec<(u32, SmoothFunction)>,
}

impl TestFunction {
    pub fn new(name: impl Into<String>, terms: Vec<(u32, Poly)>) -> Self {
        Self {
            name: name.into(),
            terms: terms
                .into_iter()
                .map(|(p, poly)| (p, SmoothFunction::new(poly)))
                .collect(),
        }
    }

    pub fn stationary(name: impl Into<String>, poly: Poly) -> Self {
        Self::new(name, vec![(0, poly)])
    }

    fn nvars(&self) -> Option<usize> {
        self.terms.first().map(|(_, f)| f.value.nvars())
    }

    pub fn value(&self, x: &[f64], t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(p, f)| t.powi(*p as i32) * f.value.eval(x))
            .sum()
    }

    fn explicit_time_derivative(&self, x: &[f64], t: f64) -> f64 {
        self.terms
            .iter()
            .filter(|(p, _)| *p > 0)
            .map(|(p, f)| *p as f64 * t.powi(*p as i32 - 1) * f.value.eval(x))
            .sum()
    }

    fn gradient_and_tangent_trace(&self, x: &[f64], t: f64, metric: &nalgebra::DMatrix<f64>) -> (DVector<f64>, f64) {
        let mut grad = DVector::zeros(x.len());
        let mut trace = 0.0;
        for (p, f) in &self.terms {
            let w = t.powi(*p as i32);
            grad += f.ambient_gradient(x) * w;
            trace += (metric * f.ambient_hessian(x) * metric).trace() * w;
        }
        (grad, trace)
    }
}

/// Polynomial test functions shipped for each supported background. All have
/// degree ≤ 4, so ∫f dμ_t is at most quadratic in t and centered differences
/// recover its derivative exactly.
pub fn packaged_test_functions(bg: &Background) -> Result<Vec<TestFunction>> {
    ensure_supported(bg)?;
    let d = bg.ambient_dim();
    let x = |i: usize| Poly::var(d, i);
    let mono = |i: usize, k: u32| x(i).pow(k);
    let mut out = vec![TestFunction::stationary("1", Poly::constant(d, 1.0))];
    match *bg {
        Background::Plane { .. } => {
            out.push(TestFunction::stationary("x1^2", mono(0, 2)));
            out.push(TestFunction::stationary("x1^4", mono(0, 4)));
            // caloric: x1² + 2t
            out.push(TestFunction::new(
                "x1^2+2t",
                vec![(0, mono(0, 2)), (1, Poly::constant(d, 2.0))],
            ));
            if d > 1 {
                out.push(TestFunction::stationary("x1^2*x2^2", &mono(0, 2) * &mono(1, 2)));
            }
        }
        Background::Sphere { .. } | Background::Cylinder { .. } => {
            let r2 = Poly::norm_sq(d, 0..d);
            out.push(TestFunction::stationary("|x|^2", r2.clone()));
            out.push(TestFunction::stationary(format!("x{d}^2"), mono(d - 1, 2)));
            out.push(TestFunction::stationary(format!("x{d}^4"), mono(d - 1, 4)));
            out.push(TestFunction::stationary("x1^2*x2^2", &mono(0, 2) * &mono(1, 2)));
        }
    }
    Ok(out)
}

/// Sextic probes whose mass is cubic in t, so the centered-difference
/// residual is a pure O(Δt²) truncation term.
pub fn convergence_test_functions(bg: &Background) -> Result<Vec<TestFunction>> {
    ensure_supported(bg)?;
    let d = bg.ambient_dim();
    Ok(match *bg {
        Background::Plane { .. } => {
            vec![TestFunction::stationary("x1^6", Poly::var(d, 0).pow(6))]
        }
        Background::Sphere { .. } | Background::Cylinder { .. } => vec![
            TestFunction::stationary("|x|^6", Poly::norm_sq(d, 0..d).pow(3)),
            TestFunction::stationary(format!("x{d}^6"), Poly::var(d, d - 1).pow(6)),
        ],
    })
}

/// Right-hand side integrand at a unit-scale point y and time t.
fn rhs_integrand(f: &TestFunction, geometry: &GeometryData, y: &[f64], t: f64) -> f64 {
    let s = -t;
    let root = s.sqrt();
    let x: Vec<f64> = y.iter().map(|v| root * v).collect();
    let (grad, tangent_trace) = f.gradient_and_tangent_trace(&x, t, &geometry.metric);
    // curvature at scale √s: H_t = H₁/√s, A_t = A₁/√s
    let h_t = &geometry.mean_curvature / root;
    let a_trace = geometry.pair_with(&grad).trace() / root;
    let normal_speed = grad.dot(&h_t);
    let dt_f = f.explicit_time_derivative(&x, t) + normal_speed;
    let laplacian = tangent_trace + a_trace;
    let x_perp_over_2t = &geometry.x_perp * (root / (2.0 * t));
    let defect = (&h_t - x_perp_over_2t).norm_squared();
    dt_f - laplacian - defect * f.value(&x, t)
}

pub fn verify_weighted_monotonicity(
    bg: &Background,
    f: &TestFunction,
    grid: &TimeGrid,
    rule: &QuadratureRule,
    tolerance: f64,
) -> Result<VerificationReport> {
    ensure_supported(bg)?;
    if rule.background != *bg {
        return Err(Error::InvalidArgument {
            name: "rule",
            reason: format!("rule is for {} but the check runs on {bg}", rule.background),
        });
    }
    if f.nvars() != Some(bg.ambient_dim()) {
        return Err(Error::InvalidArgument {
            name: "test_function",
            reason: format!("`{}` does not live in R^{}", f.name, bg.ambient_dim()),
        });
    }
    let mut report = ReportBuilder::new("weighted_monotonicity", *bg, CheckKind::Identity, tolerance);
    report.note(format!("test function {}", f.name));
    if grid.len() < 3 {
        return Ok(report.inapplicable("need at least 3 nodes for centered differences"));
    }
    let geometries = rule
        .points
        .iter()
        .map(|p| geometry_at(bg, p))
        .collect::<Result<Vec<_>>>()?;
    let times = grid.nodes();
    let mass: Vec<f64> = times
        .iter()
        .map(|&t| {
            let root = (-t).sqrt();
            rule.integrate(|y| {
                let x: Vec<f64> = y.iter().map(|v| root * v).collect();
                f.value(&x, t)
            })
        })
        .collect();
    for (t, lhs) in centered_derivatives(times, &mass) {
        let rhs: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .zip(&geometries)
            .map(|((y, w), g)| w * rhs_integrand(f, g, y, t))
            .sum();
        report.push(t, &f.name, lhs - rhs);
    }
    let allowance = truncation_allowance(times, &mass);
    report.set_tolerance(tolerance + allowance);
    report.note(format!("truncation allowance {allowance:e}"));
    Ok(report.finish())
}

/// Largest |LHS − RHS| over the interior nodes, without any allowance.
pub fn max_weighted_residual(report: &VerificationReport) -> f64 {
    report.nodes.iter().fold(0.0f64, |m, n| m.max(n.value.abs()))
}

/// Observed order of the weighted-monotonicity residual under one 2× grid
/// refinement, or `None` when the coarse residual is already at roundoff.
pub fn weighted_monotonicity_order(
    bg: &Background,
    f: &TestFunction,
    grid: &TimeGrid,
    rule: &QuadratureRule,
) -> Result<Option<f64>> {
    let worst = |g: &TimeGrid| -> Result<f64> {
        Ok(max_weighted_residual(&verify_weighted_monotonicity(bg, f, g, rule, 0.0)?))
    };
    let coarse = worst(grid)?;
    if coarse < 1e-10 {
        return Ok(None);
    }
    let fine = worst(&grid.refined())?;
    Ok(Some((coarse / fine).log2()))
}
