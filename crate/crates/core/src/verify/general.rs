use crate::error::Result;
use crate::evolution::{coefficient_rate, forcing_bound_margin, Forcing, Trajectory};
use crate::field::CoefficientField;
use crate::frequency::{check_kappa, compute_i};
use crate::quadrature::QuadratureRule;

use super::diff::{centered_derivatives, truncation_allowance};
use super::monotonicity::frequency_series;
use super::report::{CheckKind, ReportBuilder, VerificationReport};

/// First node where |f| ≤ C(|∇u| + |u|) fails on the quadrature points.
pub(crate) fn certify_hypothesis(
    traj: &Trajectory,
    rule: &QuadratureRule,
) -> Result<Option<(f64, f64)>> {
    let Some(forcing) = &traj.forcing else {
        return Ok(None);
    };
    for field in &traj.fields {
        let margin = forcing_bound_margin(field, forcing, rule)?;
        // roundoff in |f| against an equal C|u| bound (ScalarOnU at ∇u = 0)
        let slack = 1e-12 * forcing.profile.at(field.time()).max(1.0) * compute_i(field).sqrt().max(1.0);
        if margin < -slack {
            return Ok(Some((field.time(), margin)));
        }
    }
    Ok(None)
}

/// (log I)' and U' at a snapshot from da/dt, with U = (−t)^{2κ}N.
fn rates(field: &CoefficientField, forcing: Option<&Forcing>, kappa: f64) -> Result<(f64, f64)> {
    let bg = field.background();
    let s = -field.time();
    let rate = coefficient_rate(field, forcing)?;
    let (mut i, mut di, mut m, mut dm) = (0.0, 0.0, 0.0, 0.0);
    for (label, r) in &rate {
        let a = field.amplitude(label);
        let mu = bg.mu(label)?;
        i += a * a;
        di += 2.0 * a * r;
        m += mu * a * a;
        dm += 2.0 * mu * a * r;
    }
    let n = -2.0 * m / i;
    let dn = -2.0 * (dm * i - m * di) / (i * i);
    let du = -2.0 * kappa * s.powf(2.0 * kappa - 1.0) * n + s.powf(2.0 * kappa) * dn;
    Ok((di / i, du))
}

/// Differential bounds for forced flows at every node:
///
/// ```text
/// (log I)' ≥ (1 + C/2)(−t)^{−1−2κ}U − 3C
/// U'       ≥ C²(U − 2(−t)^{1+2κ})
/// ```
///
/// Derivatives come from da/dt at the node, so the margins are pointwise in
/// t. Centered differences of the sampled series are reported alongside as a
/// cross-check against their truncation allowance.
pub fn verify_general_bounds(
    traj: &Trajectory,
    kappa: f64,
    rule: &QuadratureRule,
    tolerance: f64,
) -> Result<VerificationReport> {
    check_kappa(kappa)?;
    let bg = traj.background();
    let mut report = ReportBuilder::new("general_bounds", bg, CheckKind::Inequality, tolerance);
    if traj.fields.len() < 3 {
        return Ok(report.inapplicable("need at least 3 nodes for centered differences"));
    }
    if let Some((t, margin)) = certify_hypothesis(traj, rule)? {
        return Ok(report.inapplicable(format!(
            "forcing hypothesis fails at t = {t} (margin {margin:e})"
        )));
    }
    let u = match frequency_series(traj, kappa) {
        Ok(u) => u,
        Err(t) => return Ok(report.inapplicable(format!("zero field at t = {t}; frequency undefined"))),
    };
    let times = traj.times();
    let none = Forcing::none();
    let forcing = traj.forcing.as_ref().unwrap_or(&none);
    let mut d_log_i = Vec::with_capacity(times.len());
    let mut d_u = Vec::with_capacity(times.len());
    for (field, &u_t) in traj.fields.iter().zip(&u) {
        let t = field.time();
        let (dli, du) = rates(field, traj.forcing.as_ref(), kappa)?;
        let c = forcing.profile.at(t);
        let s = -t;
        let i_bound = (1.0 + 0.5 * c) * s.powf(-1.0 - 2.0 * kappa) * u_t - 3.0 * c;
        report.push(t, "log_I_bound", dli - i_bound);
        let u_bound = c * c * (u_t - 2.0 * s.powf(1.0 + 2.0 * kappa));
        report.push(t, "U_bound", du - u_bound);
        d_log_i.push(dli);
        d_u.push(du);
    }
    let log_i: Vec<f64> = traj.fields.iter().map(|f| compute_i(f).ln()).collect();
    let gap = |values: &[f64], rates: &[f64]| {
        centered_derivatives(times, values)
            .iter()
            .enumerate()
            .map(|(k, (_, d))| (d - rates[k + 1]).abs())
            .fold(0.0f64, f64::max)
    };
    report.note(format!(
        "centered differences vs rates: log I {:e} (allowance {:e}), U {:e} (allowance {:e})",
        gap(&log_i, &d_log_i),
        truncation_allowance(times, &log_i),
        gap(&u, &d_u),
        truncation_allowance(times, &u)
    ));
    Ok(report.finish())
}
