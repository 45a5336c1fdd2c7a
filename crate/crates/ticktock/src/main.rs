use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ticktock::error::{Error, Result};
use ticktock::scenario::{self, series, Overrides};

#[derive(Parser)]
#[command(
    name = "ticktock",
    version,
    about = "Exact sparse simulation of discrete-time unitary radiator models",
    long_about = "Runs named scenarios of a discrete-space, discrete-time radiator \
                  model: a source site leaks amplitude onto a lattice one step at a \
                  time while a detector register records the passage. Every scenario \
                  with a closed form is cross-checked against it and the run fails \
                  if the two disagree beyond 1e-8."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum CliFormat {
    Csv,
    Json,
}

impl From<CliFormat> for series::Format {
    fn from(f: CliFormat) -> Self {
        match f {
            CliFormat::Csv => series::Format::Csv,
            CliFormat::Json => series::Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config file.
    Run {
        /// Path to the scenario config (JSON).
        config: PathBuf,
        /// Override the config's scenario name.
        #[arg(long)]
        scenario: Option<String>,
        /// Override the per-step survival probability q.
        #[arg(long)]
        q: Option<f64>,
        /// Override the number of steps.
        #[arg(long)]
        steps: Option<u64>,
        /// Drop amplitudes below this threshold after each step.
        #[arg(long = "prune-epsilon")]
        prune_epsilon: Option<f64>,
        /// Output format.
        #[arg(long, value_enum, default_value = "csv")]
        format: CliFormat,
        /// Output path (standard output when absent).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Add exact hex-float renderings to JSON output.
        #[arg(long)]
        hex_floats: bool,
    },
    /// Reproduce a reference figure: fig1, fig2, or fig3.
    Reproduce {
        /// Which figure: fig1 (continuum entropy), fig2 (shadow),
        /// fig3 (statistics comparison).
        which: String,
        /// Output format.
        #[arg(long, value_enum, default_value = "csv")]
        format: CliFormat,
        /// Output path (standard output when absent).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Add exact hex-float renderings to JSON output.
        #[arg(long)]
        hex_floats: bool,
    },
    /// Run the cross product of a base config and a parameter grid.
    Sweep {
        /// Path to the sweep config (JSON with "base" and "grid").
        config: PathBuf,
        /// Output directory for the per-point files.
        #[arg(long, default_value = ".")]
        output: PathBuf,
        /// Output format.
        #[arg(long, value_enum, default_value = "csv")]
        format: CliFormat,
    },
    /// Run the built-in brute-force-vs-closed-form self-checks.
    Check,
}

fn emit(out: &series::SeriesOutput, format: series::Format, hex: bool, path: Option<&PathBuf>) -> Result<()> {
    let text = out.render(format, hex)?;
    match path {
        Some(p) => series::write_atomic(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            scenario: scenario_name,
            q,
            steps,
            prune_epsilon,
            format,
            output,
            hex_floats,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = scenario::parse_config(&text)?;
            Overrides {
                scenario: scenario_name,
                q,
                steps,
                prune_epsilon,
            }
            .apply(&mut cfg);
            let out = scenario::run_scenario(&cfg)?;
            emit(&out, format.into(), hex_floats, output.as_ref())
        }
        Command::Reproduce {
            which,
            format,
            output,
            hex_floats,
        } => {
            let out = scenario::reproduce_figure(&which)?;
            emit(&out, format.into(), hex_floats, output.as_ref())
        }
        Command::Sweep {
            config,
            output,
            format,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = scenario::parse_sweep(&text)?;
            let paths = scenario::run_sweep(&cfg, &output, format.into())?;
            for p in paths {
                println!("{}", p.display());
            }
            Ok(())
        }
        Command::Check => {
            let lines = scenario::check_all()?;
            let mut first_failure: Option<Error> = None;
            for line in &lines {
                let status = if line.passed() { "PASS" } else { "FAIL" };
                println!(
                    "check {}: max deviation {:.3e} (limit {:.0e}) {status}",
                    line.name, line.worst, line.limit
                );
                if !line.passed() && first_failure.is_none() {
                    first_failure = Some(Error::Discrepancy {
                        context: format!("check {}", line.name),
                        found: line.worst,
                        limit: line.limit,
                    });
                }
            }
            match first_failure {
                Some(e) => Err(e),
                None => {
                    println!("all {} checks passed", lines.len());
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else is a
            // usage/validation failure (exit 1, distinct from the
            // discrepancy exit 2).
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
