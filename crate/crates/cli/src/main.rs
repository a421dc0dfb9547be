use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use respole_cli::{run_figure, run_scenario, CliError, Product, Report};

/// Resonance poles, coupling coefficients and effective-Hamiltonian sweeps.
#[derive(Debug, Parser)]
#[command(name = "respole", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reproduce a built-in figure (1 to 7) as CSV files.
    Figure {
        /// Figure number.
        id: u32,
        /// Output directory.
        #[arg(long, env = "RESPOLE_OUT_DIR", default_value = ".")]
        out: PathBuf,
        /// Also write SVG line plots.
        #[arg(long)]
        svg: bool,
    },
    /// Run every product requested by the scenarios of a TOML config.
    Scan {
        /// Scenario file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, env = "RESPOLE_OUT_DIR", default_value = ".")]
        out: PathBuf,
    },
    /// Run only the parameter sweeps (`crossing` outputs) of a TOML config.
    Crossing {
        /// Scenario file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, env = "RESPOLE_OUT_DIR", default_value = ".")]
        out: PathBuf,
    },
    /// Run only the coupling-strength scans (`trapping` outputs) of a TOML config.
    Trapping {
        /// Scenario file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, env = "RESPOLE_OUT_DIR", default_value = ".")]
        out: PathBuf,
    },
}

fn execute(command: Command) -> Result<(Report, Vec<PathBuf>), CliError> {
    match command {
        Command::Figure { id, out, svg } => run_figure(id, &out, svg),
        Command::Scan { config, out } => run_scenario(&config, &out, None),
        Command::Crossing { config, out } => run_scenario(&config, &out, Some(Product::Crossing)),
        Command::Trapping { config, out } => run_scenario(&config, &out, Some(Product::Trapping)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok((report, written)) => {
            for note in &report.notes {
                println!("{note}");
            }
            for path in &written {
                println!("wrote {}", display(path));
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}
