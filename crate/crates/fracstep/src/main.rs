use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracstep::config::Scenario;
use fracstep::registry;
use fracstep::runner::{run_scenario, write_outcome};
use fracstep::CliError;

/// Environment variable overriding the output directory.
const OUT_ENV: &str = "FRACSTEP_OUT";

#[derive(Parser)]
#[command(
    name = "fracstep",
    version,
    about = "Front tracking and fractional-step splitting experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its artifacts.
    Run {
        scenario: PathBuf,
        /// Output directory (overrides the scenario and FRACSTEP_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the physical cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List models, diagnostics or presets.
    List { what: String },
    /// Describe a model, diagnostic or preset.
    Describe { id: String },
}

fn out_dir(scenario: &std::path::Path, sc: &Scenario, flag: Option<PathBuf>) -> PathBuf {
    let base = scenario.parent().unwrap_or(std::path::Path::new("."));
    flag.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| {
            base.join(
                sc.out
                    .clone()
                    .unwrap_or_else(|| PathBuf::from("out").join(&sc.name)),
            )
        })
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    // A closed pipe ends the listing early; it is not an error.
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Run {
            scenario,
            out,
            jobs,
        } => {
            let sc = Scenario::load(&scenario)?;
            let jobs = jobs.unwrap_or_else(num_cpus::get_physical);
            let outcome = run_scenario(&sc, jobs)?;
            let dir = out_dir(&scenario, &sc, out);
            write_outcome(&dir, &outcome)?;
            for d in &outcome.summary.diagnostics {
                for c in &d.checks {
                    let _ = writeln!(
                        stdout,
                        "{:<18} {:<22} {:<5} {:e}  ({})",
                        d.kind,
                        c.name,
                        if c.pass { "pass" } else { "FAIL" },
                        c.value,
                        c.bound
                    );
                }
            }
            let _ = writeln!(stdout, "artifacts in {}", dir.display());
            Ok(outcome.summary.pass)
        }
        Command::List { what } => {
            for (id, doc) in registry::listing(&what)? {
                let _ = writeln!(stdout, "{id:<18} {doc}");
            }
            Ok(true)
        }
        Command::Describe { id } => {
            let _ = write!(stdout, "{}", registry::describe(&id)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
