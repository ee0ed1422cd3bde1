use std::path::Path;
use std::process::Command;

use freqlab::emit::{plot_script, report_json, trace_csv, CSV_HEADER};
use freqlab::run::{Provenance, RunOutput};
use freqlab::{emit_all, emit_plot_script, run_scenario, ConfigError, ReportDocument, ScenarioConfig};
use freqlab_core::{FrequencyTrace, Verdict};

const SPHERE_GOLDEN: &str = r#"{
    "id": "sphere_golden",
    "background": {"sphere": {"n": 2}},
    "initial_modes": [{"mode": {"harmonic": {"degree": 1, "label": 0}}, "amplitude": 1.0}],
    "interval": [-1.0, -0.1],
    "nodes": 10,
    "checks": ["frequency_monotonicity", "harnack", "backward_uniqueness"]
}"#;

fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
    ScenarioConfig::from_json(text, "inline")
}

fn with(text: &str, key: &str, value: serde_json::Value) -> String {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v[key] = value;
    v.to_string()
}

fn invalid_field(text: &str) -> String {
    match parse(text) {
        Err(ConfigError::Invalid { field, .. }) => field,
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn golden_sphere_run_starts_at_minus_one() {
    let out = run_scenario(&parse(SPHERE_GOLDEN).unwrap()).unwrap();
    let csv = trace_csv(&out);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(first[0], -1.0);
    assert!((first[3] + 1.0).abs() < 1e-12);
    assert!(out.reports.iter().all(|r| r.verdict == Verdict::Pass));
    assert_eq!(out.reports.len(), 3);
}

#[test]
fn validation_names_the_field() {
    assert_eq!(invalid_field(&with(SPHERE_GOLDEN, "nodes", 2.into())), "nodes");
    assert_eq!(invalid_field(&with(SPHERE_GOLDEN, "interval", serde_json::json!([-0.5, -1.0]))), "interval");
    assert_eq!(invalid_field(&with(SPHERE_GOLDEN, "interval", serde_json::json!([-1.0, 0.5]))), "interval");
    assert_eq!(
        invalid_field(&with(SPHERE_GOLDEN, "initial_modes", serde_json::json!([{"mode": {"hermite": [1]}, "amplitude": 1.0}]))),
        "initial_modes[0]"
    );
    assert_eq!(invalid_field(&with(SPHERE_GOLDEN, "kappa", (-1.0).into())), "kappa");
    assert_eq!(invalid_field(&with(SPHERE_GOLDEN, "checks", serde_json::json!([]))), "checks");
    assert_eq!(invalid_field(&with(SPHERE_GOLDEN, "background", serde_json::json!({"sphere": {"n": 0}}))), "background");
    // unknown keys and unknown check names are parse errors
    assert!(matches!(parse(&with(SPHERE_GOLDEN, "colour", "red".into())), Err(ConfigError::Parse { .. })));
    assert!(matches!(
        parse(&with(SPHERE_GOLDEN, "checks", serde_json::json!(["frequency_monotonicity", "vibes"]))),
        Err(ConfigError::Parse { .. })
    ));
}

#[test]
fn zero_initial_data_skips_frequency_checks_but_runs_mass() {
    let text = r#"{
        "id": "empty",
        "background": {"plane": {"n": 1}},
        "initial_modes": [],
        "interval": [-1.0, -0.1],
        "nodes": 5,
        "checks": ["frequency_monotonicity", "harnack", "quadrature_mass", "backward_uniqueness"]
    }"#;
    let out = run_scenario(&parse(text).unwrap()).unwrap();
    for r in &out.reports {
        match r.check_name.as_str() {
            "frequency_monotonicity" | "harnack" => {
                assert_eq!(r.verdict, Verdict::Inapplicable);
                assert!(r.notes.iter().any(|n| n == "zero initial data"));
            }
            _ => assert_eq!(r.verdict, Verdict::Pass, "{}", r.check_name),
        }
    }
    assert!(trace_csv(&out).lines().nth(1).unwrap().contains("NaN"));
}

#[test]
fn config_hash_ignores_formatting_and_tracks_content() {
    let base = parse(SPHERE_GOLDEN).unwrap();
    let compact = parse(&serde_json::to_string(&serde_json::from_str::<serde_json::Value>(SPHERE_GOLDEN).unwrap()).unwrap()).unwrap();
    assert_eq!(base.hash(), compact.hash());
    // an explicit default is the same scenario
    assert_eq!(base.hash(), parse(&with(SPHERE_GOLDEN, "resolution", 24.into())).unwrap().hash());
    let reordered = with(
        SPHERE_GOLDEN,
        "checks",
        serde_json::json!(["backward_uniqueness", "harnack", "frequency_monotonicity"]),
    );
    assert_eq!(base.hash(), parse(&reordered).unwrap().hash());
    for (key, value) in [
        ("nodes", serde_json::json!(11)),
        ("interval", serde_json::json!([-1.0, -0.2])),
        ("kappa", serde_json::json!(0.75)),
        ("seed", serde_json::json!(3)),
        ("resolution", serde_json::json!(16)),
    ] {
        assert_ne!(base.hash(), parse(&with(SPHERE_GOLDEN, key, value)).unwrap().hash(), "{key}");
    }
}

#[test]
fn mixture_run_is_byte_identical() {
    let text = r#"{
        "id": "plane_mixture",
        "background": {"plane": {"n": 2}},
        "random_mixture": {"members": 20, "max_modes": 5, "mu_cutoff": 2.5},
        "interval": [-1.0, -0.1],
        "nodes": 12,
        "seed": 42,
        "checks": ["frequency_monotonicity", "dual_path"]
    }"#;
    let config = parse(text).unwrap();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        emit_all(&run_scenario(&config).unwrap(), d.path()).unwrap();
    }
    for name in ["plane_mixture.csv", "plane_mixture.report.json", "plane_mixture.plot.py"] {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let other = parse(&with(text, "seed", 43.into())).unwrap();
    assert_ne!(trace_csv(&run_scenario(&config).unwrap()), trace_csv(&run_scenario(&other).unwrap()));
}

#[test]
fn report_document_round_trips() {
    let out = run_scenario(&parse(SPHERE_GOLDEN).unwrap()).unwrap();
    let parsed: ReportDocument = serde_json::from_str(&report_json(&out)).unwrap();
    assert_eq!(parsed, ReportDocument::from_output(&out));
    let empty = RunOutput {
        provenance: out.provenance.clone(),
        trace: FrequencyTrace { rows: Vec::new() },
        reports: Vec::new(),
    };
    let value: serde_json::Value = serde_json::from_str(&report_json(&empty)).unwrap();
    assert_eq!(value["reports"], serde_json::json!([]));
}

#[test]
fn non_finite_node_values_survive_serialization() {
    let mut out = run_scenario(&parse(SPHERE_GOLDEN).unwrap()).unwrap();
    out.reports[0].nodes[0].value = f64::NEG_INFINITY;
    let parsed: ReportDocument = serde_json::from_str(&report_json(&out)).unwrap();
    assert_eq!(parsed.reports[0].nodes[0].value, f64::NEG_INFINITY);
}

#[test]
fn plot_script_fails_only_when_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = RunOutput {
        provenance: Provenance {
            scenario_id: "ghost".into(),
            config_hash: String::new(),
            tool_version: String::new(),
            resolution: 0,
        },
        trace: FrequencyTrace { rows: Vec::new() },
        reports: Vec::new(),
    };
    let script = dir.path().join("ghost.plot.py");
    emit_plot_script(&out, &script, "ghost.csv").unwrap();
    assert!(plot_script(&out, "ghost.csv").contains("ghost.csv"));
    if let Ok(status) = Command::new("python3").arg(&script).output() {
        assert!(!status.status.success());
        assert!(String::from_utf8_lossy(&status.stderr).contains("missing trace"));
    }
}

fn write_config(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn run_cli(args: &[&str], out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_freqlab"))
        .args(args)
        .arg("--quiet")
        .arg("--out")
        .arg(out)
        .status()
        .unwrap()
        .code()
        .unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();

    write_config(dir.path(), "pass.json", SPHERE_GOLDEN);
    assert_eq!(run_cli(&["run", &p("pass.json")], &out), 0);
    assert!(out.join("sphere_golden.csv").exists());
    assert!(out.join("summary.json").exists());

    let printed = r#"{
        "id": "printed",
        "background": {"plane": {"n": 1}},
        "initial_modes": [{"mode": {"hermite": [3]}, "amplitude": 1.0}],
        "interval": [-1.0, -0.1],
        "nodes": 5,
        "kappa": 0.0,
        "checks": ["harnack", "harnack_printed"]
    }"#;
    write_config(dir.path(), "fail.json", printed);
    assert_eq!(run_cli(&["run", &p("fail.json")], &out), 1);
    let report_only = with(printed, "report_only", serde_json::json!(["harnack_printed"]));
    write_config(dir.path(), "report_only.json", &with(&report_only, "id", "printed_report_only".into()));
    assert_eq!(run_cli(&["run", &p("report_only.json")], &out), 0);

    let inapplicable = with(SPHERE_GOLDEN, "checks", serde_json::json!(["general_bounds"]));
    let inapplicable = with(&inapplicable, "initial_modes", serde_json::json!([]));
    let inapplicable = with(&inapplicable, "id", "all_skipped".into());
    write_config(dir.path(), "skip.json", &inapplicable);
    assert_eq!(run_cli(&["run", &p("skip.json")], &out), 3);

    write_config(dir.path(), "bad.json", &with(SPHERE_GOLDEN, "nodes", 1.into()));
    assert_eq!(run_cli(&["run", &p("bad.json")], &out), 2);
    assert_eq!(run_cli(&["run", &p("missing.json")], &out), 2);

    // a directory runs every scenario in it; the failing one decides
    std::fs::remove_file(dir.path().join("bad.json")).unwrap();
    assert_eq!(run_cli(&["run", &dir.path().to_string_lossy()], &out), 1);
}

#[test]
fn resolution_override_reaches_provenance() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "s.json", SPHERE_GOLDEN);
    let out = dir.path().join("out");
    let code = run_cli(&["run", &dir.path().join("s.json").to_string_lossy(), "--resolution", "12"], &out);
    assert_eq!(code, 0);
    let doc: ReportDocument =
        serde_json::from_str(&std::fs::read_to_string(out.join("sphere_golden.report.json")).unwrap()).unwrap();
    assert_eq!(doc.provenance.resolution, 12);
}
