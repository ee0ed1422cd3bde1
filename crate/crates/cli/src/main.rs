use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use freqlab::{exit, load_scenarios, paper_suite, run_suite, write_summary, ScenarioConfig};
use freqlab_core::Verdict;

#[derive(Parser)]
#[command(name = "freqlab", version, about = "Parabolic frequency verification along self-shrinking flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for traces, reports and plot scripts.
    #[arg(long, global = true, default_value = "freqlab-out")]
    out: PathBuf,
    /// Quadrature resolution for every scenario, overriding the files.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files, or every *.json in a directory.
    Run {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Run the packaged scenarios behind every acceptance criterion.
    PaperSuite,
}

fn label(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Inapplicable => "SKIP",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let loaded = match &cli.command {
        Command::Run { paths } => load_scenarios(paths),
        Command::PaperSuite => paper_suite(),
    };
    let mut configs: Vec<ScenarioConfig> = match loaded {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::ERROR as u8);
        }
    };
    if let Some(r) = cli.resolution {
        for c in &mut configs {
            c.resolution = r;
        }
    }
    let outcome = run_suite(&configs, Some(&cli.out));
    if let Err(e) = write_summary(&outcome, &cli.out) {
        eprintln!("error: cannot write summary: {e}");
        return ExitCode::from(exit::ERROR as u8);
    }
    for e in &outcome.errors {
        eprintln!("error: {e}");
    }
    if !cli.quiet {
        for r in outcome.outputs.iter().flat_map(|o| &o.reports) {
            let margin = r.min_margin.map_or("-".to_string(), |m| format!("{m:.3e}"));
            let tag = if r.report_only { " (report only)" } else { "" };
            println!(
                "{} {:<28} {:<26} margin {margin}{tag}",
                label(r.verdict),
                r.scenario_id,
                r.check_name
            );
        }
        println!("{} scenarios, artifacts in {}", outcome.outputs.len(), cli.out.display());
    }
    ExitCode::from(outcome.exit_code() as u8)
}
