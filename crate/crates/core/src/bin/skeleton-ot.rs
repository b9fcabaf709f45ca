use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use skeleton_ot::pipeline::{self, load_config, Report, RunOptions};

#[derive(Parser)]
#[command(version, about = "Limiting Calabi-Yau potential on the skeleton via optimal transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve, analyse and write all artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Exit with status 4 when any threshold check fails.
        #[arg(long)]
        strict: bool,
        /// Also write plan.csv.
        #[arg(long)]
        emit_plan: bool,
        /// Seed for Monte Carlo spot checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cheap checks only; prints the report to stdout.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        strict: bool,
    },
}

fn finish(report: &Report, strict: bool) -> ExitCode {
    let breaches = report.breaches();
    for c in &breaches {
        eprintln!("check failed: {} = {:e} (lower {:?}, upper {:?})", c.name, c.value, c.lower, c.upper);
    }
    if strict && !breaches.is_empty() {
        ExitCode::from(4)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, strict, emit_plan, seed } => load_config(&config)
            .and_then(|cfg| pipeline::run(&cfg, &RunOptions { emit_plan, seed }))
            .map(|out| {
                eprintln!("wrote {} files", out.files.len());
                finish(&out.report, strict)
            }),
        Command::Validate { config, strict } => load_config(&config).and_then(|cfg| pipeline::validate(&cfg)).and_then(|report| {
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(finish(&report, strict))
        }),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(pipeline::exit_code(&e) as u8)
    })
}
