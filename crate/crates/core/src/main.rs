use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fusion_excess::commands;
use fusion_excess::excess::SNAP_TOL;
use fusion_excess::Result;
use fusion_excess::report::RunReport;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

/// Excess of fusion frames and certification of their duals.
#[derive(Debug, Parser)]
#[command(name = "fusion-excess", version)]
struct Cli {
    /// Largest accepted distance from an integer when rounding real-valued formulas.
    #[arg(long, global = true, default_value_t = SNAP_TOL)]
    tolerance: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Excess of a frame by every method.
    Excess { frame: PathBuf },
    /// Orthogonal complement frame and its excess identity.
    Complement { frame: PathBuf },
    /// Fusion Riesz basis test, listing failing member pairs.
    Riesz { frame: PathBuf },
    /// Certify V as a dual of W (Gavruta, or Q-dual with --q).
    DualCheck {
        w: PathBuf,
        v: PathBuf,
        #[arg(long)]
        q: Option<PathBuf>,
    },
    /// Seeded random frame; the generating document is echoed.
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        subspaces: Vec<usize>,
        #[arg(long)]
        seed: u64,
        /// Also write the frame document here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regression corpus of named examples.
    PaperExamples {
        /// Replace every weight by a seeded random value.
        #[arg(long)]
        perturb_weights: Option<u64>,
    },
}

fn dispatch(cli: &Cli) -> Result<RunReport> {
    let tol = cli.tolerance;
    match &cli.command {
        Command::Excess { frame } => commands::cmd_excess(frame, tol),
        Command::Complement { frame } => commands::cmd_complement(frame, tol),
        Command::Riesz { frame } => commands::cmd_riesz(frame, tol),
        Command::DualCheck { w, v, q } => commands::cmd_dual_check(w, v, q.as_deref(), tol),
        Command::Random { dim, subspaces, seed, out } => commands::cmd_random(*dim, subspaces, *seed, out.as_ref(), tol),
        Command::PaperExamples { perturb_weights } => commands::cmd_corpus(tol, *perturb_weights),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Table => print!("{}", report.to_table()),
            }
            if report.summary.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
