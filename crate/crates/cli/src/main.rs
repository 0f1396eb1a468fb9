use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nonkahler::surface::SigmaFault;
use nonkahler_cli::commands::{self, Sweep};
use nonkahler_cli::config::{Config, Overrides};
use nonkahler_cli::{verify, CliError, EXIT_FAILURE, EXIT_PASS};

#[derive(Debug, Parser)]
#[command(name = "nonkahler", version, about = "Check and explore the charts of a non-Kahler elliptic surface")]
struct Cli {
    /// JSON config file; unset keys take their defaults
    #[arg(long, global = true, env = "NONKAHLER_CONFIG")]
    config: Option<PathBuf>,
    /// Write the output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    rho0: Option<f64>,
    #[arg(long, global = true)]
    rho1: Option<f64>,
    #[arg(long, global = true)]
    rho2: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FaultArg {
    None,
    SquaredInA,
    SimplePoleInB,
}

impl From<FaultArg> for SigmaFault {
    fn from(f: FaultArg) -> Self {
        match f {
            FaultArg::None => SigmaFault::None,
            FaultArg::SquaredInA => SigmaFault::SquaredInA,
            FaultArg::SimplePoleInB => SigmaFault::SimplePoleInB,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepKind {
    Radial,
    Circle,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every check and print a JSON report; exit 1 if any fails
    Verify {
        /// Test hook: use a corrupted canonical form
        #[arg(long, value_enum, num_args = 0..=1, default_missing_value = "simple-pole-in-b")]
        inject_sigma_fault: Option<FaultArg>,
    },
    /// Tabulate the j-invariant of the fibers along a path in w, as CSV
    FiberModuli {
        #[arg(long, value_enum, default_value = "radial")]
        sweep: SweepKind,
        #[arg(long, default_value_t = 0.05)]
        from: f64,
        #[arg(long, default_value_t = 0.45)]
        to: f64,
        #[arg(long, default_value_t = 0.3)]
        radius: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Section count and splitting type of a cocycle given as a JSON file
    Sections { cocycle: PathBuf },
    /// Print the charts, domains and transitions as JSON
    AtlasExport,
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let fault = match &cli.command {
        Command::Verify { inject_sigma_fault } => inject_sigma_fault.map(SigmaFault::from),
        _ => None,
    };
    let overrides = Overrides {
        seed: cli.seed,
        rho0: cli.rho0,
        rho1: cli.rho1,
        rho2: cli.rho2,
        sigma_fault: fault,
    };
    let config = Config::load(cli.config.as_deref(), overrides)?;
    let out = cli.out.as_ref();
    match cli.command {
        Command::Verify { .. } => {
            let report = verify::run(&config)?;
            for check in report.checks.iter().filter(|c| !c.passed()) {
                eprintln!("FAIL {}: measured {:e}, threshold {:e}", check.name, check.measured, check.threshold);
            }
            emit(out, &to_json(&report))?;
            Ok(if report.passed() { EXIT_PASS } else { EXIT_FAILURE })
        }
        Command::FiberModuli {
            sweep,
            from,
            to,
            radius,
            points,
        } => {
            let sweep = match sweep {
                SweepKind::Radial => Sweep::Radial { from, to, points },
                SweepKind::Circle => Sweep::Circle { radius, points },
            };
            let rows = commands::fiber_moduli(&config, &sweep)?;
            emit(out, &commands::moduli_csv(&rows))?;
            Ok(EXIT_PASS)
        }
        Command::Sections { cocycle } => {
            let matrix = commands::read_cocycle(&cocycle)?;
            let report = commands::sections(&config, &matrix)?;
            emit(out, &to_json(&report))?;
            Ok(EXIT_PASS)
        }
        Command::AtlasExport => {
            emit(out, &to_json(&commands::atlas_export(&config)?))?;
            Ok(EXIT_PASS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
