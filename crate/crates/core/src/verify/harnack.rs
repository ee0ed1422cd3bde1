use crate::error::Result;
use crate::evolution::Trajectory;
use crate::frequency::{check_kappa, compute_i, compute_u};
use crate::quadrature::QuadratureRule;
use crate::special::gauss_legendre;

use super::general::certify_hypothesis;
use super::monotonicity::is_pure_heat;
use super::report::{CheckKind, ReportBuilder, VerificationReport};

/// Lower bound for log I(b) − log I(a) along a pure heat flow.
///
/// κ > 0: (1/2κ)((−b)^{−2κ} − (−a)^{−2κ})U(a). κ = 0: integrating
/// (log I)' = U/(−t) ≥ U(a)/(−t) gives −U(a)·log(b/a).
pub fn heat_harnack_exponent(a: f64, b: f64, kappa: f64, u_a: f64) -> f64 {
    if kappa > 0.0 {
        ((-b).powf(-2.0 * kappa) - (-a).powf(-2.0 * kappa)) * u_a / (2.0 * kappa)
    } else {
        -u_a * (b / a).ln()
    }
}

/// The κ = 0 bound exactly as printed, I(b) ≥ I(a)·e^{−U(a)}·(b/a), in log form.
pub fn printed_harnack_exponent(a: f64, b: f64, u_a: f64) -> f64 {
    -u_a + (b / a).ln()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarnackReports {
    /// κ > 0 bound, or the κ = 0 bound consistent with its derivation.
    pub bound: VerificationReport,
    /// κ = 0 bound as printed; `None` when κ > 0.
    pub printed: Option<VerificationReport>,
}

/// Log-space margins log I(b) − log I(a) − exponent for every node b after a.
pub fn verify_harnack(traj: &Trajectory, kappa: f64, tolerance: f64) -> Result<HarnackReports> {
    check_kappa(kappa)?;
    let bg = traj.background();
    let mut bound = ReportBuilder::new("harnack", bg, CheckKind::Inequality, tolerance);
    let mut printed = (kappa == 0.0)
        .then(|| ReportBuilder::new("harnack_printed", bg, CheckKind::Inequality, tolerance));
    bound.note(format!("kappa = {kappa}"));
    let done = |bound: ReportBuilder, printed: Option<ReportBuilder>, reason: Option<String>| {
        match reason {
            Some(r) => HarnackReports {
                bound: bound.inapplicable(r.clone()),
                printed: printed.map(|p| p.inapplicable(r)),
            },
            None => HarnackReports {
                bound: bound.finish(),
                printed: printed.map(|p| p.finish()),
            },
        }
    };
    if !is_pure_heat(traj) {
        return Ok(done(bound, printed, Some("trajectory is forced".into())));
    }
    if kappa < bg.kappa() {
        return Ok(done(
            bound,
            printed,
            Some(format!("kappa {kappa} is below the curvature bound {}", bg.kappa())),
        ));
    }
    let first = &traj.fields[0];
    let a = first.time();
    let i_a = compute_i(first);
    if i_a == 0.0 {
        // I ≡ 0 stays 0 under the heat flow: 0 ≥ 0·e^{…}
        let degenerate = traj.fields.iter().all(|f| compute_i(f) == 0.0);
        for f in &traj.fields[1..] {
            let value = if degenerate { 0.0 } else { -compute_i(f) };
            bound.push(f.time(), "log_margin", value);
            if let Some(p) = printed.as_mut() {
                p.push(f.time(), "log_margin", value);
            }
        }
        bound.note("zero initial data: degenerate branch 0 ≥ 0");
        return Ok(done(bound, printed, None));
    }
    let u_a = compute_u(first, kappa)?;
    for f in &traj.fields[1..] {
        let b = f.time();
        let lhs = compute_i(f).ln() - i_a.ln();
        bound.push(b, "log_margin", lhs - heat_harnack_exponent(a, b, kappa, u_a));
        if let Some(p) = printed.as_mut() {
            p.push(b, "log_margin", lhs - printed_harnack_exponent(a, b, u_a));
        }
    }
    if let Some(p) = printed.as_mut() {
        p.note("bound as printed, I(b) ≥ I(a)·e^{-U(a)}·(b/a); reported, not derived");
    }
    Ok(done(bound, printed, None))
}

/// Composite 8-point Gauss–Legendre of g over [lo, hi] split into `panels`.
fn integrate(lo: f64, hi: f64, panels: usize, g: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_legendre(8);
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = lo + h * (p as f64 + 0.5);
            x.iter()
                .zip(&w)
                .map(|(xi, wi)| wi * g(mid + 0.5 * h * xi))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

/// Exponent of the lower bound for forced flows:
/// ∫_a^b (1 + C/2)(−t)^{−1−2κ}((U(a) − 2(−a)^{1+2κ})e^{∫_a^t C²} + 2(−a)^{1+2κ}) dt − 3∫_a^b C.
pub fn general_harnack_exponent(
    profile: &crate::evolution::CProfile,
    a: f64,
    b: f64,
    kappa: f64,
    u_a: f64,
    panels: usize,
) -> f64 {
    let anchor = 2.0 * (-a).powf(1.0 + 2.0 * kappa);
    let g = |t: f64| {
        let c = profile.at(t);
        (1.0 + 0.5 * c)
            * (-t).powf(-1.0 - 2.0 * kappa)
            * ((u_a - anchor) * profile.integral(a, t, 2).exp() + anchor)
    };
    integrate(a, b, panels, g) - 3.0 * profile.integral(a, b, 1)
}

/// Log-space margins of I(b) against the forced-flow Harnack bound.
pub fn verify_general_harnack(
    traj: &Trajectory,
    kappa: f64,
    rule: &QuadratureRule,
    tolerance: f64,
) -> Result<VerificationReport> {
    check_kappa(kappa)?;
    let bg = traj.background();
    let mut report = ReportBuilder::new("general_harnack", bg, CheckKind::Inequality, tolerance);
    if let Some((t, margin)) = certify_hypothesis(traj, rule)? {
        return Ok(report.inapplicable(format!(
            "forcing hypothesis fails at t = {t} (margin {margin:e})"
        )));
    }
    let first = &traj.fields[0];
    let a = first.time();
    let i_a = compute_i(first);
    if traj.fields.iter().all(|f| compute_i(f) == 0.0) {
        for f in &traj.fields[1..] {
            report.push(f.time(), "log_margin", 0.0);
        }
        report.note("zero data: I ≡ 0, backward-uniqueness degenerate branch 0 ≥ 0");
        return Ok(report.finish());
    }
    if i_a == 0.0 {
        for f in &traj.fields[1..] {
            report.push(f.time(), "log_margin", -compute_i(f));
        }
        report.note("I(a) = 0 but the solution is nonzero later");
        return Ok(report.finish());
    }
    let zero = crate::evolution::CProfile::zero();
    let profile = traj.forcing.as_ref().map_or(&zero, |f| &f.profile);
    let u_a = compute_u(first, kappa)?;
    for (idx, f) in traj.fields.iter().enumerate().skip(1) {
        let b = f.time();
        let panels = 16 * idx;
        let exponent = general_harnack_exponent(profile, a, b, kappa, u_a, panels);
        let lhs = compute_i(f).ln() - i_a.ln();
        report.push(b, "log_margin", lhs - exponent);
    }
    report.note(format!(
        "∫C = {:e}, ∫C² = {:e} over [{a}, {}]",
        profile.integral(a, traj.grid.b(), 1),
        profile.integral(a, traj.grid.b(), 2),
        traj.grid.b()
    ));
    Ok(report.finish())
}

/// Zero data must stay identically zero; nonzero data must keep log I finite
/// and above the Harnack floor at every node.
pub fn verify_backward_uniqueness(traj: &Trajectory, kappa: f64) -> Result<VerificationReport> {
    check_kappa(kappa)?;
    let bg = traj.background();
    let i: Vec<f64> = traj.fields.iter().map(compute_i).collect();
    if i[0] == 0.0 {
        let mut report = ReportBuilder::new("backward_uniqueness", bg, CheckKind::Identity, 0.0);
        for (f, v) in traj.fields.iter().zip(&i) {
            report.push(f.time(), "I", *v);
        }
        report.note("zero data: I must vanish exactly at every node");
        return Ok(report.finish());
    }
    let mut report = ReportBuilder::new("backward_uniqueness", bg, CheckKind::Inequality, 1e-10);
    if !is_pure_heat(traj) {
        return Ok(report.inapplicable("trajectory is forced; use general_harnack"));
    }
    let a = traj.fields[0].time();
    let u_a = compute_u(&traj.fields[0], kappa)?;
    for (f, v) in traj.fields.iter().zip(&i) {
        let floor = i[0].ln() + heat_harnack_exponent(a, f.time(), kappa, u_a);
        report.push(f.time(), "log_I_above_floor", v.ln() - floor);
    }
    report.note(format!("I(b) = {:e} > 0", i[i.len() - 1]));
    Ok(report.finish())
}
