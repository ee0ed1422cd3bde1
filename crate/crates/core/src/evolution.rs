//! Time evolution of coefficient fields.
//!
//! In self-similar coordinates the heat equation is ∂_t v = 𝓛₁v/(−t), so each
//! eigen-coefficient obeys a_j' = −μ_j a_j/(−t) and
//! a_j(t) = a_j(t₀)·((−t)/(−t₀))^{μ_j}. A forcing f = (∂_t − Δ)u adds its own
//! coefficients to the right-hand side; those runs are integrated with
//! classical RK4 and step doubling.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::background::ModeLabel;
use crate::error::{Error, Result};
use crate::field::{check_time, CoefficientField, TimeGrid};
use crate::geometry::geometry_at;
use crate::modes::ModeBasis;
use crate::quadrature::QuadratureRule;

/// Exact heat evolution to `t_target`, forward or backward in time.
pub fn evolve_exact(field: &CoefficientField, t_target: f64) -> Result<CoefficientField> {
    check_time(t_target)?;
    let ratio = t_target / field.time();
    let coeffs = field
        .coeffs()
        .iter()
        .map(|(label, &a)| {
            let mu = field.background().mu(label)?;
            Ok((label.clone(), a * ratio.powf(mu)))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(field.with_coeffs(t_target, coeffs))
}

/// C(t) ≥ 0 in the forcing bound |(∂_t − Δ)u| ≤ C(t)(|∇u| + |u|).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CProfile {
    Constant(f64),
    /// Linear interpolation between samples, held constant outside them.
    PiecewiseLinear { times: Vec<f64>, values: Vec<f64> },
}

impl CProfile {
    pub fn zero() -> Self {
        CProfile::Constant(0.0)
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            CProfile::Constant(c) => *c,
            CProfile::PiecewiseLinear { times, values } => {
                if t <= times[0] {
                    return values[0];
                }
                let last = times.len() - 1;
                if t >= times[last] {
                    return values[last];
                }
                let i = times.partition_point(|&s| s <= t) - 1;
                let s = (t - times[i]) / (times[i + 1] - times[i]);
                values[i] + s * (values[i + 1] - values[i])
            }
        }
    }

    /// Breakpoints strictly inside (a, b).
    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        match self {
            CProfile::Constant(_) => Vec::new(),
            CProfile::PiecewiseLinear { times, .. } => {
                times.iter().copied().filter(|&s| s > a && s < b).collect()
            }
        }
    }

    /// ∫_a^b C(t)^p dt for p ∈ {1, 2}, exact for piecewise-linear profiles.
    pub fn integral(&self, a: f64, b: f64, power: u32) -> f64 {
        assert!(power == 1 || power == 2);
        if b <= a {
            return 0.0;
        }
        let mut knots = vec![a];
        knots.extend(self.breakpoints(a, b));
        knots.push(b);
        knots
            .windows(2)
            .map(|w| {
                let (c0, c1, h) = (self.at(w[0]), self.at(w[1]), w[1] - w[0]);
                if power == 1 {
                    0.5 * h * (c0 + c1)
                } else {
                    h * (c0 * c0 + c0 * c1 + c1 * c1) / 3.0
                }
            })
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CProfile::Constant(c) => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(Error::InvalidForcing(format!("C must be finite and ≥ 0, got {c}")));
                }
            }
            CProfile::PiecewiseLinear { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::InvalidForcing(
                        "profile needs matching, nonempty times and values".into(),
                    ));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidForcing("profile times must increase".into()));
                }
                if values.iter().chain(times).any(|v| !v.is_finite())
                    || values.iter().any(|&v| v < 0.0)
                {
                    return Err(Error::InvalidForcing(
                        "profile samples must be finite with C ≥ 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// How the forcing f = (∂_t − Δ)u is built from u.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// f = C(t)·u.
    ScalarOnU,
    /// f = C(t)·Σ_i (W a)_i φ_i over the listed modes; `matrix[i][j]` feeds
    /// mode j into mode i.
    ModeMatrix {
        modes: Vec<ModeLabel>,
        matrix: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forcing {
    pub profile: CProfile,
    pub coupling: Coupling,
}

impl Forcing {
    pub fn none() -> Self {
        Self {
            profile: CProfile::zero(),
            coupling: Coupling::ScalarOnU,
        }
    }

    pub fn validate(&self, field: &CoefficientField, grid: &TimeGrid) -> Result<()> {
        self.profile.validate()?;
        let c2 = self.profile.integral(grid.a(), grid.b(), 2);
        if !c2.is_finite() {
            return Err(Error::InvalidForcing("∫C² is not finite".into()));
        }
        if let Coupling::ModeMatrix { modes, matrix } = &self.coupling {
            if matrix.len() != modes.len() || matrix.iter().any(|row| row.len() != modes.len()) {
                return Err(Error::InvalidForcing(format!(
                    "coupling matrix must be {0}×{0}",
                    modes.len()
                )));
            }
            if matrix.iter().flatten().any(|w| !w.is_finite()) {
                return Err(Error::InvalidForcing("coupling matrix must be finite".into()));
            }
            let unique: BTreeSet<_> = modes.iter().collect();
            if unique.len() != modes.len() {
                return Err(Error::InvalidForcing("coupling modes must be distinct".into()));
            }
            for label in modes {
                field.background().check_label(label)?;
            }
        }
        Ok(())
    }

    /// Coefficients of f/C(t) for the given amplitudes.
    fn coupled(&self, labels: &[ModeLabel], a: &[f64]) -> Vec<f64> {
        match &self.coupling {
            Coupling::ScalarOnU => a.to_vec(),
            Coupling::ModeMatrix { modes, matrix } => {
                let index: Vec<Option<usize>> = modes
                    .iter()
                    .map(|m| labels.iter().position(|l| l == m))
                    .collect();
                let mut out = vec![0.0; a.len()];
                for (i, row) in matrix.iter().enumerate() {
                    let Some(target) = index[i] else { continue };
                    out[target] = row
                        .iter()
                        .zip(&index)
                        .map(|(w, j)| j.map_or(0.0, |j| w * a[j]))
                        .sum();
                }
                out
            }
        }
    }

    fn coupling_labels(&self) -> Vec<ModeLabel> {
        match &self.coupling {
            Coupling::ScalarOnU => Vec::new(),
            Coupling::ModeMatrix { modes, .. } => modes.clone(),
        }
    }

    /// The forcing f as a coefficient map for a snapshot.
    pub fn forcing_coeffs(&self, field: &CoefficientField) -> BTreeMap<ModeLabel, f64> {
        let labels: Vec<ModeLabel> = field
            .coeffs()
            .keys()
            .cloned()
            .chain(self.coupling_labels())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let a: Vec<f64> = labels.iter().map(|l| field.amplitude(l)).collect();
        let c = self.profile.at(field.time());
        let coupled = self.coupled(&labels, &a);
        labels
            .into_iter()
            .zip(coupled)
            .map(|(l, f)| (l, c * f))
            .filter(|(_, f)| *f != 0.0)
            .collect()
    }
}

/// da/dt at a snapshot: −μa/(−t) plus the forcing coefficients.
pub fn coefficient_rate(
    field: &CoefficientField,
    forcing: Option<&Forcing>,
) -> Result<BTreeMap<ModeLabel, f64>> {
    let bg = field.background();
    let s = -field.time();
    let mut rate = field
        .coeffs()
        .iter()
        .map(|(label, &a)| Ok((label.clone(), -bg.mu(label)? * a / s)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    if let Some(forcing) = forcing {
        for (label, f) in forcing.forcing_coeffs(field) {
            *rate.entry(label).or_insert(0.0) += f;
        }
    }
    Ok(rate)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    SteppedRk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub fields: Vec<CoefficientField>,
    pub method: Method,
    /// Present for stepped runs; `None` means the pure heat equation.
    pub forcing: Option<Forcing>,
}

impl Trajectory {
    /// Exact heat trajectory through `field`, sampled on `grid`.
    pub fn exact(field: &CoefficientField, grid: &TimeGrid) -> Result<Self> {
        let fields = grid
            .nodes()
            .iter()
            .map(|&t| evolve_exact(field, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: grid.clone(),
            fields,
            method: Method::Exact,
            forcing: None,
        })
    }

    pub fn background(&self) -> crate::background::Background {
        self.fields[0].background()
    }

    pub fn times(&self) -> &[f64] {
        self.grid.nodes()
    }

    /// C(t) at the nodes; zero for pure heat runs.
    pub fn c_at(&self, t: f64) -> f64 {
        self.forcing.as_ref().map_or(0.0, |f| f.profile.at(t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepperOptions {
    /// Local relative error per grid interval, estimated by step doubling.
    pub tolerance: f64,
    pub max_substeps: usize,
    /// Grids must end at or before this time; the 1/(−t) stiffness grows near 0.
    pub latest_time: f64,
}

impl Default for StepperOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_substeps: 1 << 16,
            latest_time: -1e-3,
        }
    }
}

struct System<'a> {
    labels: Vec<ModeLabel>,
    mu: Vec<f64>,
    forcing: &'a Forcing,
}

impl System<'_> {
    fn rhs(&self, t: f64, a: &[f64]) -> Vec<f64> {
        let c = self.forcing.profile.at(t);
        let coupled = if c == 0.0 {
            vec![0.0; a.len()]
        } else {
            self.forcing.coupled(&self.labels, a)
        };
        a.iter()
            .zip(&self.mu)
            .zip(coupled)
            .map(|((a, mu), f)| -mu * a / (-t) + c * f)
            .collect()
    }

    fn rk4(&self, t0: f64, t1: f64, y0: &[f64], steps: usize) -> Vec<f64> {
        let h = (t1 - t0) / steps as f64;
        let axpy = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> {
            y.iter().zip(k).map(|(y, k)| y + s * k).collect()
        };
        let mut y = y0.to_vec();
        for i in 0..steps {
            let t = t0 + h * i as f64;
            let k1 = self.rhs(t, &y);
            let k2 = self.rhs(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
            let k3 = self.rhs(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
            let k4 = self.rhs(t + h, &axpy(&y, &k3, h));
            for j in 0..y.len() {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        y
    }
}

/// Forward RK4 integration of da/dt = Λ(t)a + C(t)·(coupling)a over `grid`.
pub fn evolve_forced(
    field: &CoefficientField,
    grid: &TimeGrid,
    forcing: &Forcing,
    options: &StepperOptions,
) -> Result<Trajectory> {
    forcing.validate(field, grid)?;
    if (field.time() - grid.a()).abs() > 1e-12 * grid.a().abs() {
        return Err(Error::InvalidGrid(format!(
            "field is at t = {} but the grid starts at {}; the stepper only integrates forward",
            field.time(),
            grid.a()
        )));
    }
    if grid.b() > options.latest_time {
        return Err(Error::InvalidGrid(format!(
            "grid ends at {} after the latest allowed time {}",
            grid.b(),
            options.latest_time
        )));
    }
    let labels: Vec<ModeLabel> = field
        .coeffs()
        .keys()
        .cloned()
        .chain(forcing.coupling_labels())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mu = labels
        .iter()
        .map(|l| field.background().mu(l))
        .collect::<Result<Vec<_>>>()?;
    let system = System {
        labels,
        mu,
        forcing,
    };
    let mut y: Vec<f64> = system.labels.iter().map(|l| field.amplitude(l)).collect();
    let to_field = |t: f64, y: &[f64]| {
        let coeffs = system
            .labels
            .iter()
            .cloned()
            .zip(y.iter().copied())
            .filter(|(_, a)| *a != 0.0)
            .collect();
        field.with_coeffs(t, coeffs)
    };
    let mut fields = vec![to_field(grid.a(), &y)];
    for w in grid.nodes().windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let mut steps = 1;
        let mut coarse = system.rk4(t0, t1, &y, steps);
        loop {
            let fine = system.rk4(t0, t1, &y, 2 * steps);
            let scale = fine.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = fine
                .iter()
                .zip(&coarse)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if diff <= 15.0 * options.tolerance * scale || scale == 0.0 {
                y = fine;
                break;
            }
            steps *= 2;
            if 2 * steps > options.max_substeps {
                return Err(Error::GridTooCoarse {
                    start: t0,
                    end: t1,
                    max_substeps: options.max_substeps,
                    tolerance: options.tolerance,
                });
            }
            coarse = fine;
        }
        fields.push(to_field(t1, &y));
    }
    Ok(Trajectory {
        grid: grid.clone(),
        fields,
        method: Method::SteppedRk4,
        forcing: Some(forcing.clone()),
    })
}

/// min over quadrature points of C(t)(|∇u| + |u|) − |f| for the snapshot.
///
/// A nonnegative value certifies the forcing hypothesis at this time on the
/// quadrature nodes. Gradients are taken at scale t: |∇u|_t = |∇_y v|/√(−t).
pub fn forcing_bound_margin(
    field: &CoefficientField,
    forcing: &Forcing,
    rule: &QuadratureRule,
) -> Result<f64> {
    let bg = field.background();
    if rule.background != bg {
        return Err(Error::InvalidArgument {
            name: "rule",
            reason: format!("rule is for {} but the field lives on {bg}", rule.background),
        });
    }
    let mut basis = ModeBasis::new(bg)?;
    let c = forcing.profile.at(field.time());
    let f_coeffs = forcing.forcing_coeffs(field);
    let scale = (-field.time()).sqrt();
    let mut worst = f64::INFINITY;
    for p in &rule.points {
        let geometry = geometry_at(&bg, p)?;
        let u = basis.combination_jet(field.coeffs().iter().map(|(l, a)| (l, *a)), &geometry, p)?;
        let mut f = 0.0;
        for (label, coeff) in &f_coeffs {
            f += coeff * basis.function(label)?.value.eval(p);
        }
        let margin = c * (u.gradient.norm() / scale + u.value.abs()) - f.abs();
        worst = worst.min(margin);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::Background;
    use crate::quadrature::quadrature;

    fn plane_mode(k: u32) -> ModeLabel {
        ModeLabel::Hermite(vec![k])
    }

    #[test]
    fn constant_mode_is_stationary() {
        let bg = Background::sphere(2).unwrap();
        let f = CoefficientField::constant(bg, -1.0, 2.5).unwrap();
        let g = evolve_exact(&f, -0.01).unwrap();
        assert_eq!(f.coeffs(), g.coeffs());
    }

    #[test]
    fn caloric_quadratic() {
        let bg = Background::plane(1).unwrap();
        let f = CoefficientField::new(bg, -1.0, [(plane_mode(2), 1.0)]).unwrap();
        let g = evolve_exact(&f, -0.5).unwrap();
        assert!((g.amplitude(&plane_mode(2)) - 0.5).abs() < 1e-15);
        // (−t)·((x/√(−t))² − 2) = x² + 2t
        for &(x, t) in &[(0.3f64, -0.5f64), (-2.0, -0.7), (1.1, -0.2)] {
            let y = x / (-t).sqrt();
            assert!(((-t) * (y * y - 2.0) - (x * x + 2.0 * t)).abs() < 1e-14);
        }
    }

    #[test]
    fn sphere_degree_one_quarter_time() {
        let bg = Background::sphere(2).unwrap();
        let label = ModeLabel::Harmonic {
            degree: 1,
            label: 0,
        };
        let f = CoefficientField::new(bg, -1.0, [(label.clone(), 1.0)]).unwrap();
        let g = evolve_exact(&f, -0.25).unwrap();
        assert!((g.amplitude(&label) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nonnegative_target_rejected() {
        let bg = Background::plane(1).unwrap();
        let f = CoefficientField::constant(bg, -1.0, 1.0).unwrap();
        assert!(matches!(evolve_exact(&f, 0.0), Err(Error::NonNegativeTime(_))));
    }

    #[test]
    fn scalar_forcing_closed_form() {
        let bg = Background::plane(1).unwrap();
        let f = CoefficientField::new(bg, -1.0, [(plane_mode(3), 0.7)]).unwrap();
        let grid = TimeGrid::uniform(-1.0, -0.1, 19).unwrap();
        let c0 = 0.4;
        let forcing = Forcing {
            profile: CProfile::Constant(c0),
            coupling: Coupling::ScalarOnU,
        };
        let traj = evolve_forced(&f, &grid, &forcing, &StepperOptions::default()).unwrap();
        for (t, field) in grid.nodes().iter().zip(&traj.fields) {
            let exact = 0.7 * (-t).powf(1.5) * (c0 * (t + 1.0)).exp();
            let got = field.amplitude(&plane_mode(3));
            assert!((got - exact).abs() < 1e-7 * exact, "t={t}: {got} vs {exact}");
        }
    }

    #[test]
    fn zero_matrix_matches_unforced() {
        let bg = Background::plane(1).unwrap();
        let f = CoefficientField::new(bg, -1.0, [(plane_mode(1), 1.0), (plane_mode(2), 0.5)])
            .unwrap();
        let grid = TimeGrid::uniform(-1.0, -0.2, 9).unwrap();
        let zero = Forcing {
            profile: CProfile::Constant(1.0),
            coupling: Coupling::ModeMatrix {
                modes: vec![plane_mode(1), plane_mode(2)],
                matrix: vec![vec![0.0; 2]; 2],
            },
        };
        let a = evolve_forced(&f, &grid, &zero, &StepperOptions::default()).unwrap();
        let b = evolve_forced(&f, &grid, &Forcing::none(), &StepperOptions::default()).unwrap();
        assert_eq!(a.fields, b.fields);
    }

    #[test]
    fn stepper_refuses_late_grids_and_backward_starts() {
        let bg = Background::plane(1).unwrap();
        let f = CoefficientField::constant(bg, -1.0, 1.0).unwrap();
        let late = TimeGrid::uniform(-1.0, -1e-4, 5).unwrap();
        assert!(evolve_forced(&f, &late, &Forcing::none(), &StepperOptions::default()).is_err());
        let shifted = TimeGrid::uniform(-2.0, -1.0, 5).unwrap();
        assert!(evolve_forced(&f, &shifted, &Forcing::none(), &StepperOptions::default()).is_err());
    }

    #[test]
    fn coarse_grid_reported() {
        let bg = Background::plane(1).unwrap();
        let f = CoefficientField::new(bg, -1.0, [(plane_mode(6), 1.0)]).unwrap();
        let grid = TimeGrid::uniform(-1.0, -0.01, 2).unwrap();
        let opts = StepperOptions {
            tolerance: 1e-14,
            max_substeps: 4,
            latest_time: -1e-3,
        };
        assert!(matches!(
            evolve_forced(&f, &grid, &Forcing::none(), &opts),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn scalar_margin_is_c_times_gradient() {
        let bg = Background::plane(1).unwrap();
        let rule = quadrature(&bg, 12).unwrap();
        let f = CoefficientField::new(bg, -1.0, [(plane_mode(1), 1.0), (plane_mode(2), 1.0)])
            .unwrap();
        let forcing = Forcing {
            profile: CProfile::Constant(0.5),
            coupling: Coupling::ScalarOnU,
        };
        let m = forcing_bound_margin(&f, &forcing, &rule).unwrap();
        let mut basis = ModeBasis::new(bg).unwrap();
        let mut expected = f64::INFINITY;
        for p in &rule.points {
            let g = geometry_at(&bg, p).unwrap();
            let jet = basis
                .combination_jet(f.coeffs().iter().map(|(l, a)| (l, *a)), &g, p)
                .unwrap();
            expected = expected.min(0.5 * jet.gradient.norm());
        }
        assert!((m - expected).abs() < 1e-12);
        assert!(m >= 0.0);
    }

    #[test]
    fn profile_integrals() {
        let p = CProfile::PiecewiseLinear {
            times: vec![-1.0, -0.5],
            values: vec![0.0, 1.0],
        };
        assert!((p.integral(-1.0, -0.5, 1) - 0.25).abs() < 1e-15);
        assert!((p.integral(-1.0, -0.5, 2) - 0.5 / 3.0).abs() < 1e-15);
        assert!((p.integral(-1.0, 0.0, 1) - 0.75).abs() < 1e-15);
        assert!(CProfile::Constant(-1.0).validate().is_err());
    }
}
