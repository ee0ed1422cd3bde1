//! Integrated drift Bochner identity on a time slice.
//!
//! Integrating ½𝓛_f|∇u|² = |Hess u|² + Ric(∇u,∇u) + ⟨∇u, ∇𝓛_f u⟩ + Hess_f(∇u,∇u)
//! against e^{−f} with f = |x|²/(4(−t)) gives
//!
//! ```text
//! ∫ |Hess u|² + Ric(∇u,∇u) = ∫ (𝓛_t u)² − Hess_f(∇u,∇u).
//! ```
//!
//! Taking Hess_f = g/(2(−t)) yields the verbatim form. On a submanifold the
//! intrinsic Hessian of |x|²/2 is g + ⟨x, A⟩, and on a shrinker
//! x^⊥ = 2tH, which adds +∫⟨H, A(∇u,∇u)⟩ to the right side.

use crate::background::Background;
use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::field::CoefficientField;
use crate::geometry::geometry_at;
use crate::modes::ModeBasis;
use crate::quadrature::QuadratureRule;

use super::report::{CheckKind, ReportBuilder, VerificationReport};

#[derive(Clone, Debug, PartialEq)]
pub struct BochnerReports {
    /// With the ⟨H, A(∇u,∇u)⟩ term.
    pub corrected: VerificationReport,
    /// Hess_{−|x|²/4t} taken as the Euclidean metric over 2(−t).
    pub verbatim: VerificationReport,
}

/// Slice integrals entering the identity, all at scale t.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BochnerTerms {
    pub hessian_sq: f64,
    pub ricci: f64,
    pub drift_laplacian_sq: f64,
    pub gradient_sq: f64,
    pub shape_term: f64,
}

impl BochnerTerms {
    pub fn lhs(&self) -> f64 {
        self.hessian_sq + self.ricci
    }

    pub fn rhs_verbatim(&self, t: f64) -> f64 {
        self.drift_laplacian_sq - self.gradient_sq / (-2.0 * t)
    }

    pub fn rhs_corrected(&self, t: f64) -> f64 {
        self.rhs_verbatim(t) + self.shape_term
    }
}

fn bochner_supported(bg: &Background) -> bool {
    matches!(*bg, Background::Plane { n } | Background::Sphere { n } if n == 1 || n == 2)
}

pub fn bochner_terms(field: &CoefficientField, rule: &QuadratureRule) -> Result<BochnerTerms> {
    let bg = field.background();
    if !bochner_supported(&bg) {
        return Err(Error::Unsupported(bg));
    }
    if rule.background != bg {
        return Err(Error::InvalidArgument {
            name: "rule",
            reason: format!("rule is for {} but the field lives on {bg}", rule.background),
        });
    }
    let s = -field.time();
    let s2 = s * s;
    let mut basis = ModeBasis::new(bg)?;
    let mut terms = BochnerTerms {
        hessian_sq: 0.0,
        ricci: 0.0,
        drift_laplacian_sq: 0.0,
        gradient_sq: 0.0,
        shape_term: 0.0,
    };
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let g = geometry_at(&bg, p)?;
        let jet = basis.combination_jet(field.coeffs().iter().map(|(l, a)| (l, *a)), &g, p)?;
        let grad = &jet.gradient;
        // every term is quadratic in derivatives of u and scales as 1/(−t)²
        terms.hessian_sq += w * jet.hessian.norm_squared() / s2;
        terms.ricci += w * (grad.transpose() * &g.ric * grad)[(0, 0)] / s2;
        terms.drift_laplacian_sq += w * jet.drift_laplacian.powi(2) / s2;
        terms.gradient_sq += w * grad.norm_squared() / s;
        terms.shape_term += w * (grad.transpose() * &g.shape_pairing * grad)[(0, 0)] / s2;
    }
    Ok(terms)
}

fn bochner_reports(
    bg: Background,
    fields: &[CoefficientField],
    rule: &QuadratureRule,
    tolerance: f64,
) -> Result<BochnerReports> {
    let mut corrected = ReportBuilder::new("drift_bochner", bg, CheckKind::Identity, tolerance);
    let mut verbatim =
        ReportBuilder::new("drift_bochner_verbatim", bg, CheckKind::Identity, tolerance);
    let mut gap_mismatch = 0.0f64;
    for field in fields {
        let t = field.time();
        let terms = bochner_terms(field, rule)?;
        let lhs = terms.lhs();
        let verbatim_residual = lhs - terms.rhs_verbatim(t);
        corrected.push(t, "residual", lhs - terms.rhs_corrected(t));
        verbatim.push(t, "residual", verbatim_residual);
        gap_mismatch = gap_mismatch.max((verbatim_residual - terms.shape_term).abs());
    }
    corrected.note("right side includes the mean curvature pairing with A(grad u, grad u)");
    verbatim.note("right side takes the weight Hessian to be the metric over 2(-t)");
    verbatim.note(format!(
        "verbatim residual matches the mean curvature pairing term to {gap_mismatch:e}"
    ));
    Ok(BochnerReports {
        corrected: corrected.finish(),
        verbatim: verbatim.finish(),
    })
}

/// Both variants at every node of a trajectory.
pub fn verify_drift_bochner_trajectory(
    traj: &Trajectory,
    rule: &QuadratureRule,
    tolerance: f64,
) -> Result<BochnerReports> {
    bochner_reports(traj.background(), &traj.fields, rule, tolerance)
}

/// Both variants on a single slice.
pub fn verify_drift_bochner(
    field: &CoefficientField,
    rule: &QuadratureRule,
    tolerance: f64,
) -> Result<BochnerReports> {
    bochner_reports(field.background(), std::slice::from_ref(field), rule, tolerance)
}
