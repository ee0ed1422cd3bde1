//! Scenario execution: build the initial data, evolve it, run the requested
//! checks.

use freqlab_core::background::Background;
use freqlab_core::verify::{
    convergence_test_functions, packaged_test_functions, verify_backward_uniqueness,
    verify_drift_bochner_trajectory, verify_dual_path, verify_eigenvalue_monotonicity,
    verify_equality_case, verify_frequency_monotonicity, verify_general_bounds,
    verify_general_harnack, verify_harnack, verify_quadrature_mass, verify_selfsimilar_scaling,
    verify_weighted_monotonicity, weighted_monotonicity_order, CheckKind, ReportBuilder,
};
use freqlab_core::{
    evolve_forced, pointwise_supported, quadrature, CoefficientField, FrequencyTrace,
    QuadratureRule, StepperOptions, TimeGrid, Trajectory, Verdict, VerificationReport,
};
use rand::seq::index::sample;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{CheckName, ConfigError, RandomMixture, ScenarioConfig};

/// Smallest observed order accepted for the weighted-monotonicity residual.
pub const MIN_OBSERVED_ORDER: f64 = 1.8;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("scenario `{id}`: {source}")]
    Core {
        id: String,
        source: freqlab_core::error::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub scenario_id: String,
    pub config_hash: String,
    pub tool_version: String,
    pub resolution: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub provenance: Provenance,
    /// Trace of the first member for mixture scenarios.
    pub trace: FrequencyTrace,
    /// One report per requested check, ordered by check name.
    pub reports: Vec<VerificationReport>,
}

impl RunOutput {
    /// Verdict over the reports that count toward the exit code.
    pub fn verdict(&self) -> Verdict {
        summarize(self.reports.iter().filter(|r| !r.report_only).map(|r| r.verdict))
    }
}

/// Fail beats pass beats inapplicable.
pub fn summarize(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::Inapplicable;
    for v in verdicts {
        match v {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Pass => out = Verdict::Pass,
            Verdict::Inapplicable => {}
        }
    }
    out
}

fn mixture_fields(
    bg: Background,
    a: f64,
    mix: &RandomMixture,
    seed: u64,
) -> freqlab_core::error::Result<Vec<CoefficientField>> {
    let modes = bg.enumerate_modes(mix.mu_cutoff)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let distinct = |picked: &[usize]| picked.iter().any(|&i| modes[i].mu != modes[picked[0]].mu);
    let max = mix.max_modes.min(modes.len());
    let mut fields = Vec::with_capacity(mix.members);
    while fields.len() < mix.members {
        let count = rng.random_range(1..=max);
        let picked = sample(&mut rng, modes.len(), count).into_vec();
        let amplitudes: Vec<f64> = (0..count).map(|_| rng.random_range(-1.0..1.0)).collect();
        // a mixture must span at least two eigenvalues; redraw otherwise
        if !distinct(&picked) && modes.iter().any(|m| m.mu != modes[0].mu) {
            continue;
        }
        let coeffs = picked
            .iter()
            .zip(amplitudes)
            .map(|(&i, c)| (modes[i].label.clone(), c));
        fields.push(CoefficientField::new(bg, a, coeffs)?);
    }
    Ok(fields)
}

/// Merge per-member reports of one check into a single report.
fn combine(mut members: Vec<VerificationReport>) -> VerificationReport {
    if members.len() == 1 {
        return members.pop().unwrap();
    }
    let mut out = members[0].clone();
    out.nodes.clear();
    out.notes.clear();
    let (mut pass, mut fail, mut skip) = (0, 0, 0);
    for (i, m) in members.iter().enumerate() {
        for n in &m.nodes {
            let mut n = n.clone();
            n.series = format!("m{i}/{}", n.series);
            out.nodes.push(n);
        }
        match m.verdict {
            Verdict::Pass => pass += 1,
            Verdict::Fail => {
                if fail == 0 {
                    out.notes.push(format!("first failing member m{i}: {}", m.notes.join("; ")));
                }
                fail += 1
            }
            Verdict::Inapplicable => skip += 1,
        }
    }
    out.notes.insert(
        0,
        format!("{} members: {pass} pass, {fail} fail, {skip} inapplicable", members.len()),
    );
    if skip > 0 && pass == 0 && fail == 0 {
        out.notes.extend(members[0].notes.iter().cloned());
    }
    out.min_margin = members.iter().filter_map(|m| m.min_margin).reduce(f64::min);
    out.tolerance = members.iter().map(|m| m.tolerance).fold(0.0, f64::max);
    out.verdict = summarize(members.iter().map(|m| m.verdict));
    out
}

fn kind_of(check: CheckName) -> CheckKind {
    match check {
        CheckName::EqualityCase
        | CheckName::WeightedMonotonicity
        | CheckName::DriftBochner
        | CheckName::DriftBochnerVerbatim
        | CheckName::SelfsimilarScaling
        | CheckName::QuadratureMass
        | CheckName::DualPath => CheckKind::Identity,
        _ => CheckKind::Inequality,
    }
}

struct Context<'a> {
    config: &'a ScenarioConfig,
    grid: TimeGrid,
    kappa: f64,
    rule: Option<QuadratureRule>,
}

impl Context<'_> {
    fn skip(&self, check: CheckName, reason: impl Into<String>) -> VerificationReport {
        ReportBuilder::new(
            check.as_str(),
            self.config.background,
            kind_of(check),
            self.config.tolerance(check),
        )
        .inapplicable(reason)
    }

    fn rule(&self, check: CheckName) -> Result<&QuadratureRule, VerificationReport> {
        self.rule.as_ref().ok_or_else(|| {
            self.skip(
                check,
                format!("pointwise evaluation is not available on {}", self.config.background),
            )
        })
    }

    /// Checks that depend only on the background and grid.
    fn background_check(&self, check: CheckName) -> freqlab_core::error::Result<VerificationReport> {
        let bg = self.config.background;
        let tol = self.config.tolerance(check);
        Ok(match check {
            CheckName::EigenvalueMonotonicity => {
                verify_eigenvalue_monotonicity(&bg, &self.grid, self.kappa, tol)?
            }
            CheckName::QuadratureMass => match self.rule(check) {
                Ok(rule) => verify_quadrature_mass(&bg, rule, tol)?,
                Err(r) => r,
            },
            CheckName::WeightedMonotonicity => match self.rule(check) {
                Ok(rule) => combine_functions(
                    packaged_test_functions(&bg)?
                        .iter()
                        .map(|f| verify_weighted_monotonicity(&bg, f, &self.grid, rule, tol))
                        .collect::<freqlab_core::error::Result<Vec<_>>>()?,
                ),
                Err(r) => r,
            },
            CheckName::WeightedConvergenceOrder => match self.rule(check) {
                Ok(rule) => {
                    let mut report = ReportBuilder::new(check.as_str(), bg, CheckKind::Inequality, tol);
                    report.note(format!("series hold observed order minus {MIN_OBSERVED_ORDER}"));
                    for f in convergence_test_functions(&bg)? {
                        match weighted_monotonicity_order(&bg, &f, &self.grid, rule)? {
                            Some(order) => {
                                report.push(self.grid.b(), &f.name, order - MIN_OBSERVED_ORDER)
                            }
                            None => report.note(format!("{}: exact on the coarse grid", f.name)),
                        }
                    }
                    report.finish()
                }
                Err(r) => r,
            },
            _ => unreachable!("not a background check"),
        })
    }

    fn trajectory_check(
        &self,
        check: CheckName,
        traj: &Trajectory,
    ) -> freqlab_core::error::Result<VerificationReport> {
        let tol = self.config.tolerance(check);
        let kappa = self.kappa;
        Ok(match check {
            CheckName::FrequencyMonotonicity => verify_frequency_monotonicity(traj, kappa, tol)?,
            CheckName::EqualityCase => verify_equality_case(traj, kappa, tol)?,
            CheckName::Harnack => verify_harnack(traj, kappa, tol)?.bound,
            CheckName::HarnackPrinted => match verify_harnack(traj, kappa, tol)?.printed {
                Some(r) => r,
                None => self.skip(check, "the printed form is stated for kappa = 0 only"),
            },
            CheckName::BackwardUniqueness => verify_backward_uniqueness(traj, kappa)?,
            CheckName::DriftBochner | CheckName::DriftBochnerVerbatim => {
                let rule = match self.rule(check) {
                    Ok(rule) => rule,
                    Err(r) => return Ok(r),
                };
                match verify_drift_bochner_trajectory(traj, rule, tol) {
                    Ok(r) if check == CheckName::DriftBochner => r.corrected,
                    Ok(r) => r.verbatim,
                    Err(freqlab_core::error::Error::Unsupported(bg)) => {
                        self.skip(check, format!("drift Bochner check is not available on {bg}"))
                    }
                    Err(e) => return Err(e),
                }
            }
            CheckName::GeneralBounds | CheckName::GeneralHarnack | CheckName::SelfsimilarScaling
            | CheckName::DualPath => {
                let rule = match self.rule(check) {
                    Ok(rule) => rule,
                    Err(r) => return Ok(r),
                };
                match check {
                    CheckName::GeneralBounds => verify_general_bounds(traj, kappa, rule, tol)?,
                    CheckName::GeneralHarnack => verify_general_harnack(traj, kappa, rule, tol)?,
                    CheckName::SelfsimilarScaling => verify_selfsimilar_scaling(traj, rule, tol)?,
                    _ => verify_dual_path(traj, rule, tol)?,
                }
            }
            _ => unreachable!("not a trajectory check"),
        })
    }
}

/// Merge reports from several test functions; series names already differ.
fn combine_functions(reports: Vec<VerificationReport>) -> VerificationReport {
    let mut out = reports[0].clone();
    out.nodes = reports.iter().flat_map(|r| r.nodes.iter().cloned()).collect();
    out.notes = reports.iter().flat_map(|r| r.notes.iter().cloned()).collect();
    out.min_margin = reports.iter().filter_map(|r| r.min_margin).reduce(f64::min);
    out.tolerance = reports.iter().map(|r| r.tolerance).fold(0.0, f64::max);
    out.verdict = summarize(reports.iter().map(|r| r.verdict));
    out
}

fn is_background_check(check: CheckName) -> bool {
    matches!(
        check,
        CheckName::EigenvalueMonotonicity
            | CheckName::QuadratureMass
            | CheckName::WeightedMonotonicity
            | CheckName::WeightedConvergenceOrder
    )
}

/// Initial data at the start of the interval: the listed modes, or every
/// member of the seeded mixture.
pub fn scenario_fields(config: &ScenarioConfig) -> Result<Vec<CoefficientField>, RunError> {
    let core = |source| RunError::Core {
        id: config.id.clone(),
        source,
    };
    let a = config.interval[0];
    match &config.random_mixture {
        Some(mix) => mixture_fields(config.background, a, mix, config.seed).map_err(core),
        None => Ok(vec![CoefficientField::new(
            config.background,
            a,
            config.initial_modes.iter().map(|m| (m.mode.clone(), m.amplitude)),
        )
        .map_err(core)?]),
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<RunOutput, RunError> {
    config.validate()?;
    let core = |source| RunError::Core {
        id: config.id.clone(),
        source,
    };
    let bg = config.background;
    let [a, b] = config.interval;
    let grid = TimeGrid::uniform(a, b, config.nodes).map_err(core)?;
    let fields = scenario_fields(config)?;
    let options = StepperOptions::default();
    let trajectories = fields
        .iter()
        .map(|f| match &config.forcing {
            Some(forcing) => evolve_forced(f, &grid, forcing, &options),
            None => Trajectory::exact(f, &grid),
        })
        .collect::<freqlab_core::error::Result<Vec<_>>>()
        .map_err(core)?;
    let rule = if pointwise_supported(&bg) {
        Some(quadrature(&bg, config.resolution).map_err(core)?)
    } else {
        None
    };
    let ctx = Context {
        config,
        grid,
        kappa: config.kappa(),
        rule,
    };
    let trace = FrequencyTrace::from_trajectory(&trajectories[0], ctx.kappa).map_err(core)?;
    let zero = fields.iter().all(CoefficientField::is_zero);
    let mut reports = Vec::with_capacity(config.checks.len());
    for &check in &config.checks {
        let report = if zero && check.needs_frequency() {
            ctx.skip(check, "zero initial data")
        } else if is_background_check(check) {
            ctx.background_check(check).map_err(core)?
        } else {
            combine(
                trajectories
                    .iter()
                    .map(|t| ctx.trajectory_check(check, t))
                    .collect::<freqlab_core::error::Result<Vec<_>>>()
                    .map_err(core)?,
            )
        };
        let mut report = report.with_scenario(&config.id);
        report.report_only = config.report_only.contains(&check);
        reports.push(report);
    }
    reports.sort_by(|x, y| x.check_name.cmp(&y.check_name));
    Ok(RunOutput {
        provenance: Provenance {
            scenario_id: config.id.clone(),
            config_hash: config.hash(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            resolution: config.resolution,
        },
        trace,
        reports,
    })
}
