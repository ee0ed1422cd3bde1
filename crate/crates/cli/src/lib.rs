//! Declarative scenario runner for freqlab-core: JSON scenarios in, trace CSV,
//! report JSON and plot scripts out.

pub mod config;
pub mod emit;
pub mod run;
pub mod suite;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{CheckName, ConfigError, ScenarioConfig};
pub use emit::{emit_all, emit_plot_script, emit_report_json, emit_trace_csv, ReportDocument};
pub use run::{run_scenario, RunError, RunOutput};

use freqlab_core::Verdict;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const ERROR: i32 = 2;
    pub const INAPPLICABLE: i32 = 3;
}

/// The packaged scenarios, parsed.
pub fn paper_suite() -> Result<Vec<ScenarioConfig>, ConfigError> {
    suite::PAPER_SUITE
        .iter()
        .map(|(name, text)| ScenarioConfig::from_json(text, &format!("paper-suite/{name}.json")))
        .collect()
}

/// Scenario files named on the command line; directories contribute their
/// `*.json` entries in name order.
pub fn load_scenarios(paths: &[PathBuf]) -> Result<Vec<ScenarioConfig>, ConfigError> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(path)
                .map_err(|source| ConfigError::Io {
                    path: path.display().to_string(),
                    source,
                })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(path.clone());
        }
    }
    files.iter().map(|p| ScenarioConfig::load(p)).collect()
}

/// One line of the aggregate summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub scenario_id: String,
    pub check_name: String,
    pub verdict: Verdict,
    pub min_margin: Option<f64>,
    pub report_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub tool_version: String,
    pub scenarios: usize,
    pub errors: Vec<String>,
    pub entries: Vec<SummaryEntry>,
}

pub struct SuiteOutcome {
    pub outputs: Vec<RunOutput>,
    pub errors: Vec<String>,
}

impl SuiteOutcome {
    pub fn summary(&self) -> SuiteSummary {
        let entries = self
            .outputs
            .iter()
            .flat_map(|o| &o.reports)
            .map(|r| SummaryEntry {
                scenario_id: r.scenario_id.clone(),
                check_name: r.check_name.clone(),
                verdict: r.verdict,
                min_margin: r.min_margin,
                report_only: r.report_only,
            })
            .collect();
        SuiteSummary {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            scenarios: self.outputs.len() + self.errors.len(),
            errors: self.errors.clone(),
            entries,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if !self.errors.is_empty() {
            return exit::ERROR;
        }
        match run::summarize(self.outputs.iter().map(RunOutput::verdict)) {
            Verdict::Pass => exit::PASS,
            Verdict::Fail => exit::FAIL,
            Verdict::Inapplicable => exit::INAPPLICABLE,
        }
    }
}

/// Run scenarios concurrently, write each one's artifacts into `out` when
/// given, and merge results in scenario-id order.
pub fn run_suite(configs: &[ScenarioConfig], out: Option<&Path>) -> SuiteOutcome {
    let mut ids: Vec<&str> = configs.iter().map(|c| c.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return SuiteOutcome {
            outputs: Vec::new(),
            errors: vec![format!("duplicate scenario id `{}`", w[0])],
        };
    }
    let results: Vec<(String, Result<RunOutput, String>)> = configs
        .par_iter()
        .map(|c| {
            let result = run_scenario(c).map_err(|e| e.to_string()).and_then(|o| {
                if let Some(dir) = out {
                    emit_all(&o, dir).map_err(|e| format!("scenario `{}`: cannot write: {e}", c.id))?;
                }
                Ok(o)
            });
            (c.id.clone(), result)
        })
        .collect();
    let mut sorted = results;
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut outcome = SuiteOutcome {
        outputs: Vec::new(),
        errors: Vec::new(),
    };
    for (_, r) in sorted {
        match r {
            Ok(o) => outcome.outputs.push(o),
            Err(e) => outcome.errors.push(e),
        }
    }
    outcome
}

pub fn write_summary(outcome: &SuiteOutcome, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(&outcome.summary()).expect("summary serializes");
    text.push('\n');
    emit::write_atomic(&dir.join("summary.json"), text.as_bytes())
}
