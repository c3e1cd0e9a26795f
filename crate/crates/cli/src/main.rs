//! Verification runs and exports for deformed p-adic metrics, dilations and
//! wavelet bases.
//!
//! Exit status: 0 when every check passes, 1 on a failed check, 2 on a
//! configuration or guard error.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Target;

#[derive(Parser)]
#[command(name = "padic-wavelets", version, about = "Exact checks for p-adic wavelets on deformed metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Output {
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a matrix as an isometry and compare with random sampling.
    VerifyIsometry {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Check that a matrix maps every ball of the chain onto its maximal subball.
    VerifyDilation {
        #[command(flatten)]
        target: Target,
        /// Expected verdict.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        expect: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Exact orthonormality of the truncated wavelet family.
    Basis {
        #[command(flatten)]
        target: Target,
        /// Scales |j| <= J.
        #[arg(long, default_value_t = 1)]
        scales: i64,
        /// Translations with digit depth L.
        #[arg(long, default_value_t = 1)]
        depth: u32,
        /// Write the mother wavelet tables here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Partial Parseval sum for the unit ball indicator.
    Parseval {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 8)]
        scales: i64,
        #[command(flatten)]
        output: Output,
    },
    /// Fourier transform of mother wavelets and the eigenfunction relation.
    Spectral {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long, default_value_t = 1)]
        scales: i64,
        #[arg(long, default_value_t = 1)]
        depth: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Digit expansions, the real tile and its measure and overlap estimates.
    Monna {
        #[command(flatten)]
        target: Target,
        /// Digits as inline rows, e.g. `0,0;0,1`; lexicographic by default.
        #[arg(long)]
        digits: Option<String>,
        /// Truncation depth T (20 for d >= 2, 22 for d = 1).
        #[arg(long)]
        series_depth: Option<u32>,
        /// Grid exponent m (7 for d >= 2, 10 for d = 1).
        #[arg(long)]
        grid: Option<u32>,
        /// Write the sample points here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// The full verification suite.
    VerifyAll {
        #[arg(long, default_value_t = padic_wavelets::suite::DEFAULT_SEED)]
        seed: u64,
        /// Append wall-clock times and enforce the runtime bounds.
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        output: Output,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = match cli.command {
        Command::VerifyIsometry { target, trials, seed, output } => (commands::isometry(&target, trials, seed), output),
        Command::VerifyDilation { target, expect, output } => (commands::dilation(&target, expect), output),
        Command::Basis { target, scales, depth, csv, output } => {
            (commands::basis(&target, scales, depth, csv.as_deref()), output)
        }
        Command::Parseval { target, scales, output } => (commands::parseval(&target, scales), output),
        Command::Spectral { target, alpha, scales, depth, output } => {
            (commands::spectral(&target, &alpha, scales, depth), output)
        }
        Command::Monna { target, digits, series_depth, grid, csv, output } => (
            commands::monna(&target, digits.as_deref(), series_depth, grid, csv.as_deref()),
            output,
        ),
        Command::VerifyAll { seed, timings, output } => (Ok(commands::verify_all(seed, timings)), output),
    };
    match result {
        Ok(report) => {
            print!("{}", report.text);
            if let Some(path) = &output.out {
                if let Err(e) = std::fs::write(path, &report.text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            let _ = std::io::stdout().flush();
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
