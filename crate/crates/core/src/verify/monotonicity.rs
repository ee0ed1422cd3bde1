use crate::background::Background;
use crate::error::Result;
use crate::evolution::{CProfile, Trajectory};
use crate::field::TimeGrid;
use crate::frequency::{
    cauchy_schwarz_defect, check_kappa, compute_d, compute_i, compute_u, lambda1,
};

use super::diff::{centered_derivatives, truncation_allowance};
use super::report::{CheckKind, ReportBuilder, VerificationReport};

pub(crate) fn is_pure_heat(traj: &Trajectory) -> bool {
    match &traj.forcing {
        None => true,
        Some(f) => match &f.profile {
            CProfile::Constant(c) => *c == 0.0,
            CProfile::PiecewiseLinear { values, .. } => values.iter().all(|&v| v == 0.0),
        },
    }
}

/// U along the trajectory, or the time of the first vanishing snapshot.
pub(crate) fn frequency_series(traj: &Trajectory, kappa: f64) -> std::result::Result<Vec<f64>, f64> {
    traj.fields
        .iter()
        .map(|f| compute_u(f, kappa).map_err(|_| f.time()))
        .collect()
}

/// Consecutive differences U(t_{i+1}) − U(t_i) and centered derivatives of U,
/// both of which must be nonnegative.
///
/// `relative_tolerance` is scaled by max|U|; the derivative series also gets
/// the centered-difference truncation allowance.
pub fn verify_frequency_monotonicity(
    traj: &Trajectory,
    kappa: f64,
    relative_tolerance: f64,
) -> Result<VerificationReport> {
    check_kappa(kappa)?;
    let bg = traj.background();
    let mut report = ReportBuilder::new("frequency_monotonicity", bg, CheckKind::Inequality, 0.0);
    report.note(format!("kappa = {kappa}"));
    if !is_pure_heat(traj) {
        return Ok(report.inapplicable("trajectory is forced; monotonicity needs the pure heat equation"));
    }
    if kappa < bg.kappa() {
        return Ok(report.inapplicable(format!(
            "kappa {kappa} is below the curvature bound {} of {bg}",
            bg.kappa()
        )));
    }
    let u = match frequency_series(traj, kappa) {
        Ok(u) => u,
        Err(t) => return Ok(report.inapplicable(format!("zero field at t = {t}; frequency undefined"))),
    };
    let times = traj.times();
    for i in 0..u.len() - 1 {
        report.push(times[i + 1], "difference", u[i + 1] - u[i]);
    }
    for (t, d) in centered_derivatives(times, &u) {
        report.push(t, "derivative", d);
    }
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let allowance = truncation_allowance(times, &u);
    report.set_tolerance(relative_tolerance * scale + allowance);
    report.note(format!(
        "tolerance = {relative_tolerance:e}·max|U| + truncation allowance {allowance:e}"
    ));
    Ok(report.finish())
}

/// Wherever U is stationary across a node pair, the field must be an
/// eigenfunction: cs_defect/I² ≈ 0 and D/(2I) = U/(2(−t)^{1+2κ}).
pub fn verify_equality_case(
    traj: &Trajectory,
    kappa: f64,
    tolerance: f64,
) -> Result<VerificationReport> {
    check_kappa(kappa)?;
    let bg = traj.background();
    let mut report = ReportBuilder::new("equality_case", bg, CheckKind::Identity, tolerance);
    if !is_pure_heat(traj) {
        return Ok(report.inapplicable("trajectory is forced"));
    }
    let u = match frequency_series(traj, kappa) {
        Ok(u) => u,
        Err(t) => return Ok(report.inapplicable(format!("zero field at t = {t}; frequency undefined"))),
    };
    let mut triggered = 0;
    for i in 0..u.len() - 1 {
        if (u[i + 1] - u[i]).abs() >= tolerance {
            continue;
        }
        for j in [i, i + 1] {
            let field = &traj.fields[j];
            let t = field.time();
            let i_val = compute_i(field);
            report.push(t, "cs_defect_over_I2", cauchy_schwarz_defect(field) / (i_val * i_val));
            let fitted = compute_d(field) / (2.0 * i_val);
            let predicted = u[j] / (2.0 * (-t).powf(1.0 + 2.0 * kappa));
            report.push(t, "c_mismatch", fitted - predicted);
            if (t + 1.0).abs() < 1e-14 {
                report.note(format!("c(-1) = {fitted}"));
            }
        }
        triggered += 1;
    }
    if triggered == 0 {
        return Ok(report.inapplicable(format!(
            "no node pair with |ΔU| < {tolerance:e}; equality case not triggered"
        )));
    }
    report.note(format!("{triggered} stationary node pairs"));
    Ok(report.finish())
}

/// (−t)^{1+2κ}λ₁(t) must be nonincreasing along the grid.
pub fn verify_eigenvalue_monotonicity(
    bg: &Background,
    grid: &TimeGrid,
    kappa: f64,
    tolerance: f64,
) -> Result<VerificationReport> {
    check_kappa(kappa)?;
    let mut report =
        ReportBuilder::new("eigenvalue_monotonicity", *bg, CheckKind::Inequality, tolerance);
    let scaled = grid
        .nodes()
        .iter()
        .map(|&t| Ok((-t).powf(1.0 + 2.0 * kappa) * lambda1(bg, t)?))
        .collect::<Result<Vec<f64>>>()?;
    for (i, w) in scaled.windows(2).enumerate() {
        report.push(grid.nodes()[i + 1], "decrease", w[0] - w[1]);
    }
    report.note(format!(
        "(-t)^(1+2κ)λ₁ from {} to {}",
        scaled[0],
        scaled[scaled.len() - 1]
    ));
    Ok(report.finish())
}
