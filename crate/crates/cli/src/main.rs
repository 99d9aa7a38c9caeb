use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chenwarp_cli::analyze::{run_analyze, RunOptions};
use chenwarp_cli::identities::run_identities;
use chenwarp_cli::report::to_json;
use chenwarp_cli::scan::run_scan;
use chenwarp_cli::{catalog, CliError, Scene};
use chenwarp_core::sampling::DEFAULT_SEED;

#[derive(Parser)]
#[command(name = "chenwarp", version, about = "Check Chen-type curvature inequalities on warped-product immersions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse every point of a scene and write a JSON report.
    Analyze {
        /// Scene file, or the name of a catalog entry.
        scene: String,
        /// Report destination; stdout when omitted.
        #[arg(long)]
        out: Option<String>,
        /// Tolerance override such as `gauss=1e-6`; repeatable.
        #[arg(long = "tol", value_name = "KEY=VALUE")]
        tol: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate a scene's grid and write one CSV row per point.
    Scan {
        scene: String,
        #[arg(long)]
        csv: String,
        #[arg(long = "tol", value_name = "KEY=VALUE")]
        tol: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List or print the built-in scenes.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Run the randomized algebraic identity suites.
    Identities {
        #[arg(long, default_value_t = 100_000)]
        random: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show { name: String },
}

fn write_text(path: Option<&str>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_string(),
            source,
        }),
        None => io::stdout().write_all(text.as_bytes()).map_err(|source| CliError::Write {
            path: "stdout".into(),
            source,
        }),
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze { scene, out, tol, seed } => {
            let scene = Scene::load(&scene)?;
            let report = run_analyze(
                &scene,
                &RunOptions {
                    tolerance_overrides: tol,
                    seed,
                },
            )?;
            write_text(out.as_deref(), &to_json(&report))?;
            if report.status != 0 {
                eprintln!("failed checks: {}", report.summary.failed.join(", "));
            }
            Ok(report.status)
        }
        Command::Scan { scene, csv, tol, seed } => {
            let scene = Scene::load(&scene)?;
            let file = File::create(&csv).map_err(|source| CliError::Write {
                path: csv.clone(),
                source,
            })?;
            let outcome = run_scan(
                &scene,
                &RunOptions {
                    tolerance_overrides: tol,
                    seed,
                },
                BufWriter::new(file),
            )?;
            eprintln!("wrote {} rows to {csv}", outcome.rows);
            if outcome.status != 0 {
                eprintln!("failed checks: {}", outcome.summary.failed.join(", "));
            }
            Ok(outcome.status)
        }
        Command::Catalog { action } => {
            match action {
                CatalogAction::List => {
                    for name in catalog::names() {
                        let scene = catalog::scene(name)?;
                        println!("{name:<16} {}", scene.description);
                    }
                }
                CatalogAction::Show { name } => print!("{}", catalog::source(&name)?),
            }
            Ok(0)
        }
        Command::Identities { random, seed } => {
            let report = run_identities(random, seed);
            print!("{}", to_json(&report));
            Ok(report.status)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status() as u8)
        }
    }
}
