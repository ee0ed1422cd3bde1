//! Scenario documents: one JSON object per scenario.

use std::collections::BTreeMap;
use std::path::Path;

use freqlab_core::background::{Background, ModeLabel};
use freqlab_core::Forcing;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const DEFAULT_RESOLUTION: usize = 24;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed scenario {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    FrequencyMonotonicity,
    EqualityCase,
    Harnack,
    HarnackPrinted,
    WeightedMonotonicity,
    WeightedConvergenceOrder,
    DriftBochner,
    DriftBochnerVerbatim,
    GeneralBounds,
    GeneralHarnack,
    EigenvalueMonotonicity,
    SelfsimilarScaling,
    BackwardUniqueness,
    QuadratureMass,
    DualPath,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::FrequencyMonotonicity => "frequency_monotonicity",
            CheckName::EqualityCase => "equality_case",
            CheckName::Harnack => "harnack",
            CheckName::HarnackPrinted => "harnack_printed",
            CheckName::WeightedMonotonicity => "weighted_monotonicity",
            CheckName::WeightedConvergenceOrder => "weighted_convergence_order",
            CheckName::DriftBochner => "drift_bochner",
            CheckName::DriftBochnerVerbatim => "drift_bochner_verbatim",
            CheckName::GeneralBounds => "general_bounds",
            CheckName::GeneralHarnack => "general_harnack",
            CheckName::EigenvalueMonotonicity => "eigenvalue_monotonicity",
            CheckName::SelfsimilarScaling => "selfsimilar_scaling",
            CheckName::BackwardUniqueness => "backward_uniqueness",
            CheckName::QuadratureMass => "quadrature_mass",
            CheckName::DualPath => "dual_path",
        }
    }

    /// Tolerance used when the scenario does not override it. Relative for
    /// frequency monotonicity, absolute elsewhere.
    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckName::FrequencyMonotonicity => 1e-9,
            CheckName::EqualityCase => 1e-12,
            CheckName::Harnack | CheckName::HarnackPrinted => 1e-10,
            CheckName::WeightedMonotonicity => 1e-7,
            CheckName::WeightedConvergenceOrder => 0.0,
            CheckName::DriftBochner | CheckName::DriftBochnerVerbatim => 1e-8,
            CheckName::GeneralBounds | CheckName::GeneralHarnack => 1e-6,
            CheckName::EigenvalueMonotonicity => 1e-12,
            CheckName::SelfsimilarScaling => 1e-10,
            CheckName::BackwardUniqueness => 1e-10,
            CheckName::QuadratureMass => 1e-12,
            CheckName::DualPath => 1e-8,
        }
    }

    /// Checks that need a nonzero field to say anything.
    pub fn needs_frequency(self) -> bool {
        matches!(
            self,
            CheckName::FrequencyMonotonicity
                | CheckName::EqualityCase
                | CheckName::Harnack
                | CheckName::HarnackPrinted
                | CheckName::GeneralBounds
                | CheckName::SelfsimilarScaling
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeAmplitude {
    pub mode: ModeLabel,
    pub amplitude: f64,
}

/// Seeded random mode mixtures run in place of `initial_modes`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMixture {
    pub members: usize,
    pub max_modes: usize,
    pub mu_cutoff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub background: Background,
    #[serde(default)]
    pub initial_modes: Vec<ModeAmplitude>,
    #[serde(default)]
    pub random_mixture: Option<RandomMixture>,
    pub interval: [f64; 2],
    pub nodes: usize,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub forcing: Option<Forcing>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    pub checks: Vec<CheckName>,
    #[serde(default)]
    pub tolerances: BTreeMap<CheckName, f64>,
    /// Checks whose failure is reported but does not affect the exit code.
    #[serde(default)]
    pub report_only: Vec<CheckName>,
    #[serde(default)]
    pub seed: u64,
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

impl ScenarioConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig =
            serde_json::from_str(text).map_err(|source| ConfigError::Parse {
                path: origin.to_string(),
                source,
            })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.id.is_empty()
            || !self
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(invalid("id", "must be nonempty ASCII letters, digits, '_' or '-'"));
        }
        self.background
            .validate()
            .map_err(|e| invalid("background", e.to_string()))?;
        let [a, b] = self.interval;
        if !(a.is_finite() && b.is_finite() && a < b && b < 0.0) {
            return Err(invalid("interval", format!("need a < b < 0, got [{a}, {b}]")));
        }
        if self.nodes < 3 {
            return Err(invalid("nodes", format!("need at least 3, got {}", self.nodes)));
        }
        for (i, m) in self.initial_modes.iter().enumerate() {
            let field = format!("initial_modes[{i}]");
            if !m.amplitude.is_finite() {
                return Err(invalid(&field, format!("amplitude {} is not finite", m.amplitude)));
            }
            self.background
                .check_label(&m.mode)
                .map_err(|e| invalid(&field, e.to_string()))?;
        }
        if let Some(mix) = &self.random_mixture {
            if !self.initial_modes.is_empty() {
                return Err(invalid("random_mixture", "cannot be combined with initial_modes"));
            }
            if mix.members == 0 || mix.max_modes == 0 {
                return Err(invalid("random_mixture", "members and max_modes must be positive"));
            }
            if !(mix.mu_cutoff.is_finite() && mix.mu_cutoff >= 0.0) {
                return Err(invalid("random_mixture", "mu_cutoff must be finite and nonnegative"));
            }
        }
        if let Some(k) = self.kappa {
            if !(k.is_finite() && k >= 0.0) {
                return Err(invalid("kappa", format!("must be finite and nonnegative, got {k}")));
            }
        }
        if self.resolution < 2 || self.resolution > 256 {
            return Err(invalid("resolution", format!("must lie in 2..=256, got {}", self.resolution)));
        }
        if self.checks.is_empty() {
            return Err(invalid("checks", "no checks requested"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.checks {
            if !seen.insert(*c) {
                return Err(invalid("checks", format!("`{}` listed twice", c.as_str())));
            }
        }
        for (c, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(invalid(&format!("tolerances.{}", c.as_str()), "must be finite and nonnegative"));
            }
        }
        if let Some(f) = &self.forcing {
            f.profile
                .validate()
                .map_err(|e| invalid("forcing", e.to_string()))?;
        }
        Ok(())
    }

    pub fn kappa(&self) -> f64 {
        self.kappa.unwrap_or_else(|| self.background.kappa())
    }

    pub fn tolerance(&self, check: CheckName) -> f64 {
        self.tolerances
            .get(&check)
            .copied()
            .unwrap_or_else(|| check.default_tolerance())
    }

    /// SHA-256 of the canonical serialization: defaults filled in, keys and
    /// check lists sorted, no whitespace.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.checks.sort();
        canonical.report_only.sort();
        canonical.report_only.dedup();
        let value = serde_json::to_value(&canonical).expect("scenario serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
