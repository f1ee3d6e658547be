use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use g2lab_cli::{run, summarize, write_outcome, Report, Scenario, ScenarioConfig};

#[derive(Parser)]
#[command(name = "g2lab", version, about = "Verification suites and flow experiments for reduced G2 geometry")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML scenario file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for reports and time series.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Overrides the primary tolerance of the scenario.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Torsion of the transverse ansatz against the closed forms.
    VerifyTorsion,
    /// Finite-difference certification of the first variation.
    CheckVariation,
    /// Reduction and reconstruction round trips.
    ReduceRoundtrip,
    /// The W345 gradient flow.
    FlowW345,
    /// The GH flow in homogeneous or grid mode.
    FlowGh,
    /// Discrete curvature against the conformal formula.
    CurvatureCheck,
    /// Sign facts of the reduced functionals.
    FunctionalSigns,
    /// Runs the scenario named in `--config`.
    Run,
    /// Consolidates reports into one table.
    Summarize { reports: Vec<PathBuf> },
}

fn scenario_of(command: &Command) -> Option<Scenario> {
    Some(match command {
        Command::VerifyTorsion => Scenario::VerifyTorsion,
        Command::CheckVariation => Scenario::CheckVariation,
        Command::ReduceRoundtrip => Scenario::ReduceRoundtrip,
        Command::FlowW345 => Scenario::FlowW345,
        Command::FlowGh => Scenario::FlowGh,
        Command::CurvatureCheck => Scenario::CurvatureCheck,
        Command::FunctionalSigns => Scenario::FunctionalSigns,
        Command::Run | Command::Summarize { .. } => return None,
    })
}

fn usage(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn summarize_reports(paths: &[PathBuf]) -> ExitCode {
    if paths.is_empty() {
        return usage("summarize needs at least one report");
    }
    let mut reports = Vec::new();
    for p in paths {
        let text = match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => return usage(format!("cannot read {}: {e}", p.display())),
        };
        match Report::from_json(&text) {
            Ok(r) => reports.push((p.display().to_string(), r)),
            Err(e) => return usage(format!("{}: {e}", p.display())),
        }
    }
    print!("{}", summarize(&reports));
    if reports.iter().all(|(_, r)| r.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command.unwrap_or(Command::Run);
    if let Command::Summarize { reports } = &command {
        return summarize_reports(reports);
    }
    let common = cli.common;
    let mut config = match (&common.config, scenario_of(&command)) {
        (Some(path), wanted) => match ScenarioConfig::from_path(path) {
            Ok(c) => {
                if let Some(w) = wanted {
                    if c.scenario != w {
                        return usage(format!("{} describes scenario {}, not {w}", path.display(), c.scenario));
                    }
                }
                c
            }
            Err(e) => return usage(e),
        },
        (None, Some(s)) => ScenarioConfig::new(s),
        (None, None) => return usage("`run` needs --config PATH"),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(n) = common.samples {
        if n == 0 {
            return usage("--samples must be at least 1");
        }
        config.samples = Some(n);
    }
    if let Some(t) = common.tolerance {
        if !(t.is_finite() && t > 0.0) {
            return usage("--tolerance must be a positive number");
        }
        config.set_primary_tolerance(t);
    }
    let dir = common.out.or_else(|| config.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let outcome = run(&config);
    let written = match write_outcome(&dir, &config.name(), &outcome) {
        Ok(w) => w,
        Err(e) => return usage(format!("cannot write to {}: {e}", dir.display())),
    };
    let report = &outcome.report;
    for c in &report.checks {
        println!("{} {:<36} {:.6e}", if c.passed() { "ok  " } else { "FAIL" }, c.name, c.value);
    }
    for e in &report.errors {
        println!("FAIL error: {e}");
    }
    println!("{} {} -> {}", report.status(), config.name(), written[0].display());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
