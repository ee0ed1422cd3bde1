//! Internal consistency of the discretization: quadrature mass and agreement
//! between the coefficient and quadrature paths.

use crate::background::Background;
use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::frequency::{compute_d, compute_i, quadrature_functionals};
use crate::quadrature::QuadratureRule;

use super::report::{CheckKind, ReportBuilder, VerificationReport};

/// Total quadrature weight against the Gaussian density of the background.
pub fn verify_quadrature_mass(
    bg: &Background,
    rule: &QuadratureRule,
    tolerance: f64,
) -> Result<VerificationReport> {
    if rule.background != *bg {
        return Err(Error::InvalidArgument {
            name: "rule",
            reason: format!("rule is for {} but the check runs on {bg}", rule.background),
        });
    }
    let mut report = ReportBuilder::new("quadrature_mass", *bg, CheckKind::Identity, tolerance);
    let mass = bg.gaussian_density();
    report.note(format!("{} nodes, exact mass {mass}", rule.len()));
    // the measure is time-invariant, so one node suffices
    report.push(-1.0, "mass_error", rule.total_mass() - mass);
    Ok(report.finish())
}

/// Relative gap between I, D from coefficients and from quadrature of jets.
pub fn verify_dual_path(
    traj: &Trajectory,
    rule: &QuadratureRule,
    tolerance: f64,
) -> Result<VerificationReport> {
    let bg = traj.background();
    let mut report = ReportBuilder::new("dual_path", bg, CheckKind::Identity, tolerance);
    for field in &traj.fields {
        let t = field.time();
        let q = quadrature_functionals(field, rule)?;
        let (i, d) = (compute_i(field), compute_d(field));
        report.push(t, "I_relative", (q.i - i) / i.abs().max(f64::MIN_POSITIVE));
        report.push(t, "D_relative", (q.d - d) / d.abs().max(i.abs()).max(f64::MIN_POSITIVE));
    }
    Ok(report.finish())
}
