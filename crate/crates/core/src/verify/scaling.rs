//! u(·, t) = (−t)^{−N/2} u(·, −1) read in self-similar coordinates, for runs
//! whose raw frequency N is constant.

use crate::error::Result;
use crate::evolution::{evolve_exact, Trajectory};
use crate::field::CoefficientField;
use crate::frequency::compute_n_raw;
use crate::modes::ModeBasis;
use crate::quadrature::QuadratureRule;

use super::monotonicity::is_pure_heat;
use super::report::{CheckKind, ReportBuilder, VerificationReport};

fn values_on_rule(
    basis: &mut ModeBasis,
    field: &CoefficientField,
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    rule.points
        .iter()
        .map(|y| {
            field.coeffs().iter().try_fold(0.0, |acc, (label, a)| {
                Ok(acc + a * basis.function(label)?.value.eval(y))
            })
        })
        .collect()
}

pub fn verify_selfsimilar_scaling(
    traj: &Trajectory,
    rule: &QuadratureRule,
    tolerance: f64,
) -> Result<VerificationReport> {
    let bg = traj.background();
    let mut report = ReportBuilder::new("selfsimilar_scaling", bg, CheckKind::Identity, tolerance);
    if !is_pure_heat(traj) {
        return Ok(report.inapplicable("forced run"));
    }
    let first = &traj.fields[0];
    if first.is_zero() {
        return Ok(report.inapplicable("zero initial data"));
    }
    let n0 = compute_n_raw(first)?;
    for field in &traj.fields[1..] {
        let n = compute_n_raw(field)?;
        if (n - n0).abs() > 1e-12 * n0.abs().max(1.0) {
            return Ok(report.inapplicable(format!(
                "raw frequency not constant: {n0} at t = {} but {n} at t = {}",
                first.time(),
                field.time()
            )));
        }
    }
    let mut basis = ModeBasis::new(bg)?;
    let reference = values_on_rule(&mut basis, &evolve_exact(first, -1.0)?, rule)?;
    report.note(format!("raw frequency {n0}; exponent -N/2 = {}", -n0 / 2.0));
    for field in &traj.fields {
        let t = field.time();
        let factor = (-t).powf(-n0 / 2.0);
        let values = values_on_rule(&mut basis, field, rule)?;
        let sup = values
            .iter()
            .zip(&reference)
            .map(|(u, r)| (u - factor * r).abs())
            .fold(0.0f64, f64::max);
        report.push(t, "sup_residual", sup);
    }
    Ok(report.finish())
}
