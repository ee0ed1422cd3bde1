use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::background::{Background, Eigenvalue, ModeLabel};
use crate::error::{Error, Result};
use crate::modes::ModeBasis;
use crate::quadrature::QuadratureRule;

/// A solution snapshot v(·, t) = Σ a_j φ_j in self-similar coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    background: Background,
    time: f64,
    coeffs: BTreeMap<ModeLabel, f64>,
}

impl CoefficientField {
    pub fn new(
        background: Background,
        time: f64,
        coeffs: impl IntoIterator<Item = (ModeLabel, f64)>,
    ) -> Result<Self> {
        background.validate()?;
        check_time(time)?;
        let mut map = BTreeMap::new();
        for (label, a) in coeffs {
            background.check_label(&label)?;
            if !a.is_finite() {
                return Err(Error::InvalidArgument {
                    name: "amplitude",
                    reason: format!("{label} has non-finite amplitude {a}"),
                });
            }
            *map.entry(label).or_insert(0.0) += a;
        }
        map.retain(|_, a| *a != 0.0);
        Ok(Self {
            background,
            time,
            coeffs: map,
        })
    }

    pub fn zero(background: Background, time: f64) -> Result<Self> {
        Self::new(background, time, [])
    }

    /// The constant function c, i.e. c·√mass on the normalized constant mode.
    pub fn constant(background: Background, time: f64, c: f64) -> Result<Self> {
        let a = c * background.gaussian_density().sqrt();
        Self::new(background, time, [(background.constant_label(), a)])
    }

    /// L²(dμ_{−1}) projection of a function onto the modes with μ ≤ `mu_cutoff`.
    pub fn project(
        rule: &QuadratureRule,
        time: f64,
        mu_cutoff: f64,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        let bg = rule.background;
        let mut basis = ModeBasis::new(bg)?;
        let values: Vec<f64> = rule.points.iter().map(|p| f(p)).collect();
        let mut coeffs = Vec::new();
        for mode in bg.enumerate_modes(mu_cutoff)? {
            let phi = basis.function(&mode.label)?;
            let a: f64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .zip(&values)
                .map(|((p, w), v)| w * v * phi.value.eval(p))
                .sum();
            coeffs.push((mode.label, a));
        }
        Self::new(bg, time, coeffs)
    }

    pub fn background(&self) -> Background {
        self.background
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn coeffs(&self) -> &BTreeMap<ModeLabel, f64> {
        &self.coeffs
    }

    pub fn amplitude(&self, label: &ModeLabel) -> f64 {
        self.coeffs.get(label).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// (μ_j, a_j) pairs in label order.
    pub fn spectrum(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.coeffs.iter().map(|(l, &a)| {
            let mu = self.background.mu(l).expect("labels validated on construction");
            (mu, a)
        })
    }

    /// Distinct exact eigenvalues carried by nonzero coefficients.
    pub fn active_eigenvalues(&self) -> Vec<Eigenvalue> {
        let mut out: Vec<Eigenvalue> = self
            .coeffs
            .keys()
            .map(|l| self.background.eigenvalue(l).expect("validated"))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub(crate) fn with_coeffs(&self, time: f64, coeffs: BTreeMap<ModeLabel, f64>) -> Self {
        Self {
            background: self.background,
            time,
            coeffs,
        }
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t < 0.0 {
        Ok(())
    } else {
        Err(Error::NonNegativeTime(t))
    }
}

/// Strictly increasing sample times in [a, b] ⊂ (−∞, 0), both endpoints included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn uniform(a: f64, b: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 nodes, got {count}"
            )));
        }
        let h = (b - a) / (count - 1) as f64;
        let mut nodes: Vec<f64> = (0..count).map(|i| a + h * i as f64).collect();
        nodes[count - 1] = b;
        Self::from_nodes(nodes)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid("need at least 2 nodes".into()));
        }
        if nodes.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("non-finite node".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("nodes must be strictly increasing".into()));
        }
        let b = nodes[nodes.len() - 1];
        if b >= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "interval must lie in (−∞, 0), right end is {b}"
            )));
        }
        Ok(Self { nodes })
    }

    pub fn a(&self) -> f64 {
        self.nodes[0]
    }

    pub fn b(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Inserts the midpoint of every interval.
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(self.b());
        Self { nodes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_must_be_negative() {
        let bg = Background::plane(1).unwrap();
        assert!(CoefficientField::zero(bg, 0.0).is_err());
        assert!(CoefficientField::zero(bg, 0.5).is_err());
        assert!(CoefficientField::zero(bg, -0.5).is_ok());
    }

    #[test]
    fn foreign_label_rejected() {
        let bg = Background::sphere(2).unwrap();
        let bad = ModeLabel::Hermite(vec![1, 0]);
        assert!(CoefficientField::new(bg, -1.0, [(bad, 1.0)]).is_err());
        let bad_label = ModeLabel::Harmonic {
            degree: 1,
            label: 3,
        };
        assert!(CoefficientField::new(bg, -1.0, [(bad_label, 1.0)]).is_err());
    }

    #[test]
    fn zero_amplitudes_dropped() {
        let bg = Background::plane(1).unwrap();
        let f = CoefficientField::new(bg, -1.0, [(ModeLabel::Hermite(vec![2]), 0.0)]).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::uniform(-1.0, -0.1, 50).is_ok());
        assert!(TimeGrid::uniform(-1.0, 0.0, 5).is_err());
        assert!(TimeGrid::from_nodes(vec![-1.0, -1.0]).is_err());
        assert!(TimeGrid::uniform(-1.0, -0.5, 1).is_err());
        let g = TimeGrid::uniform(-1.0, -0.5, 3).unwrap().refined();
        assert_eq!(g.nodes(), &[-1.0, -0.875, -0.75, -0.625, -0.5]);
    }

    #[test]
    fn projection_recovers_constant() {
        let bg = Background::sphere(2).unwrap();
        let rule = crate::quadrature::quadrature(&bg, 8).unwrap();
        let f = CoefficientField::project(&rule, -1.0, 2.0, |_| 1.0).unwrap();
        let c = CoefficientField::constant(bg, -1.0, 1.0).unwrap();
        for (l, a) in c.coeffs() {
            assert!((f.amplitude(l) - a).abs() < 1e-13);
        }
        assert!(f.coeffs().iter().filter(|(l, _)| **l != bg.constant_label()).all(|(_, a)| a.abs() < 1e-13));
    }
}
