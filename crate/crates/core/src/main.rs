//! Command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use visco_spectral::analysis::dispersion_sweep;
use visco_spectral::app::simulate_to_dir;
use visco_spectral::checks::identity_suite;
use visco_spectral::io::{dispersion_csv, parse_config, read_field, NormReport, RunConfig};
use visco_spectral::lp::{build_filter_bank, hybrid_besov_parts, BesovSpec};
use visco_spectral::{Error, Result};

#[derive(Parser)]
#[command(name = "visco", version, about = "Spectral laboratory for Oldroyd-type viscoelastic flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite; exit code 0 when every identity holds.
    Check {
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Integrate a configured run and write reports.
    Simulate { config: PathBuf },
    /// Sweep the linear symbol over |ξ| and write dispersion.csv.
    Dispersion { config: PathBuf },
    /// Simulate, fit decay exponents and record verdicts.
    Decay { config: PathBuf },
    /// Hybrid Besov norm of a stored field.
    Besov {
        field: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        j0: i32,
        #[arg(long, default_value_t = 1.0)]
        sharpness: f64,
    },
}

fn load(path: &PathBuf) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
    let config = parse_config(&text)?;
    if let Some(w) = &config.warning {
        eprintln!("warning: {w}");
    }
    Ok(config)
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check { n, seed } => {
            let lines = identity_suite(n, seed)?;
            for l in &lines {
                println!(
                    "{} {:<32} {:.3e} (tolerance {:.0e})",
                    if l.pass { "PASS" } else { "FAIL" },
                    l.name,
                    l.value,
                    l.tolerance
                );
            }
            Ok(lines.iter().all(|l| l.pass))
        }
        Command::Simulate { config } => {
            let cfg = load(&config)?;
            let dir = PathBuf::from(&cfg.output.dir);
            let (out, _) = simulate_to_dir(&cfg, &dir, false)?;
            println!("{} samples written to {}", out.series.len(), dir.display());
            Ok(true)
        }
        Command::Decay { config } => {
            let cfg = load(&config)?;
            let dir = PathBuf::from(&cfg.output.dir);
            let (_, fits) = simulate_to_dir(&cfg, &dir, true)?;
            for f in &fits {
                println!(
                    "{} {}: exponent {:.4} ± {:.4}, theory {:.4}",
                    f.verdict, f.label, f.exponent, f.stderr, f.theory_exponent
                );
            }
            Ok(fits.iter().all(|f| f.verdict == "pass"))
        }
        Command::Dispersion { config } => {
            let cfg = load(&config)?;
            let dir = PathBuf::from(&cfg.output.dir);
            std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.display().to_string(), source: e })?;
            let d = &cfg.dispersion;
            let symbols = dispersion_sweep(&cfg.model, d.xi_min, d.xi_max, d.count);
            let path = dir.join("dispersion.csv");
            std::fs::write(&path, dispersion_csv(&symbols))
                .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
            println!("{} symbols written to {}", symbols.len(), path.display());
            Ok(true)
        }
        Command::Besov { field, s, t, j0, sharpness } => {
            let f = read_field(&field)?;
            let bank = build_filter_bank(f.grid, sharpness)?;
            let spec = BesovSpec::new(s, t, j0);
            let parts = hybrid_besov_parts(&bank, &f, &spec)?;
            print!("{}", NormReport::new(field.display().to_string(), spec, parts).to_json()?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
