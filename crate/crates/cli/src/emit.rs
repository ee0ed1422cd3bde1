//! Trace CSV, report JSON and plot script writers. Every file is written to
//! a temporary sibling first and renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use freqlab_core::VerificationReport;
use serde::{Deserialize, Serialize};

use crate::run::{Provenance, RunOutput};

pub const CSV_HEADER: &str = "t,I,D,U,N_raw,cs_defect";

/// The report file: provenance plus every report of the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub provenance: Provenance,
    pub reports: Vec<VerificationReport>,
}

impl ReportDocument {
    pub fn from_output(output: &RunOutput) -> Self {
        Self {
            provenance: output.provenance.clone(),
            reports: output.reports.clone(),
        }
    }
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

fn number(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        _ => "NaN".to_string(),
    }
}

pub fn trace_csv(output: &RunOutput) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &output.trace.rows {
        let cells = [
            Some(row.t),
            Some(row.i),
            Some(row.d),
            row.u,
            row.n_raw,
            Some(row.cs_defect),
        ];
        let line: Vec<String> = cells.into_iter().map(number).collect();
        writeln!(out, "{}", line.join(",")).unwrap();
    }
    out
}

pub fn report_json(output: &RunOutput) -> String {
    let mut text = serde_json::to_string_pretty(&ReportDocument::from_output(output))
        .expect("reports serialize");
    text.push('\n');
    text
}

/// Standalone matplotlib script. The CSV is looked up next to the script
/// when it runs, so a missing CSV is reported then, not when emitting.
pub fn plot_script(output: &RunOutput, csv_name: &str) -> String {
    let id = &output.provenance.scenario_id;
    format!(
        r#"#!/usr/bin/env python3
"""U(t) and log I(t) for scenario {id}."""
import csv
import math
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = pathlib.Path(__file__).resolve().parent
source = here / "{csv_name}"
if not source.exists():
    sys.exit(f"missing trace {{source}}")

t, u, log_i = [], [], []
with source.open() as fh:
    for row in csv.DictReader(fh):
        t.append(float(row["t"]))
        u.append(float(row["U"]))
        i = float(row["I"])
        log_i.append(math.log(i) if i > 0 else float("nan"))

fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
top.plot(t, u, marker=".")
top.set_ylabel("U(t)")
bottom.plot(t, log_i, marker=".")
bottom.set_ylabel("log I(t)")
bottom.set_xlabel("t")
fig.suptitle("{id}")
fig.tight_layout()
target = here / "{id}.png"
fig.savefig(target)
print(target)
"#
    )
}

pub fn emit_trace_csv(output: &RunOutput, path: &Path) -> std::io::Result<()> {
    write_atomic(path, trace_csv(output).as_bytes())
}

pub fn emit_report_json(output: &RunOutput, path: &Path) -> std::io::Result<()> {
    write_atomic(path, report_json(output).as_bytes())
}

pub fn emit_plot_script(output: &RunOutput, path: &Path, csv_name: &str) -> std::io::Result<()> {
    write_atomic(path, plot_script(output, csv_name).as_bytes())
}

/// File names used for one scenario inside an output directory.
pub struct ArtifactNames {
    pub csv: String,
    pub report: String,
    pub plot: String,
}

impl ArtifactNames {
    pub fn for_id(id: &str) -> Self {
        Self {
            csv: format!("{id}.csv"),
            report: format!("{id}.report.json"),
            plot: format!("{id}.plot.py"),
        }
    }
}

pub fn emit_all(output: &RunOutput, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let names = ArtifactNames::for_id(&output.provenance.scenario_id);
    emit_trace_csv(output, &dir.join(&names.csv))?;
    emit_report_json(output, &dir.join(&names.report))?;
    emit_plot_script(output, &dir.join(&names.plot), &names.csv)
}
