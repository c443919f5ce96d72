//! Command-line flags and dispatch.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::selmer::Assertions;

use super::commands::{analyze, delta, modsym_build, modsym_export, modsym_import, sieve_primes};
use super::{resolve_cache_dir, CurveSource, RunConfig};

fn parse_p(s: &str) -> std::result::Result<u64, String> {
    let p: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if p < 5 || !crate::arith::is_prime(p) {
        return Err(format!("{p} is not a prime >= 5"));
    }
    Ok(p)
}

#[derive(Debug, Parser)]
#[command(name = "kurihara", version, about = "Kurihara numbers and Selmer structure of elliptic curves over Q")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Weierstrass coefficients `[a1,a2,a3,a4,a6]`.
    #[arg(long, global = true, conflicts_with = "curve_file", allow_hyphen_values = true)]
    pub curve: Option<String>,
    /// JSON curve record `{"label": ..., "ainvs": [...]}`.
    #[arg(long, global = true)]
    pub curve_file: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 5, value_parser = parse_p)]
    pub p: u64,
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// Sieve bound for Kolyvagin primes.
    #[arg(long, global = true, default_value_t = 200)]
    pub bound: u64,
    #[arg(long, global = true, default_value_t = 3)]
    pub nu_max: usize,
    /// Moduli evaluated per number of prime factors.
    #[arg(long, global = true, default_value_t = 10)]
    pub budget: usize,
    #[arg(long, global = true, default_value_t = 128, value_parser = clap::value_parser!(u64).range(64..))]
    pub precision_bits: u64,
    /// Overridden by `KURIHARA_CACHE`.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Use this eigen-symbol file instead of building the space.
    #[arg(long, global = true)]
    pub import_modsym: Option<PathBuf>,
    /// Assert the Manin constant is prime to p.
    #[arg(long, global = true)]
    pub assert_manin: bool,
    /// Assert the mod-p representation is surjective.
    #[arg(long, global = true)]
    pub assert_surjective: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    pub json_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline with a JSON report and a summary.
    Analyze,
    /// A single Kurihara number.
    Delta {
        /// Squarefree product of Kolyvagin primes, or 1.
        n: u64,
    },
    /// Build, export or import eigen-symbols.
    Modsym {
        #[command(subcommand)]
        action: ModsymAction,
    },
    /// List Kolyvagin primes up to the bound.
    Sieve,
}

#[derive(Debug, Subcommand)]
pub enum ModsymAction {
    /// Build the eigen-symbol and store it in the cache.
    Build,
    /// Write the cached eigen-symbol to a file.
    Export {
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify an eigen-symbol file and store it in the cache.
    Import {
        #[arg(long)]
        from: PathBuf,
    },
}

impl CommonArgs {
    pub fn config(&self) -> Result<RunConfig> {
        let curve = match (&self.curve, &self.curve_file) {
            (Some(c), None) => CurveSource::Inline(c.clone()),
            (None, Some(f)) => CurveSource::File(f.clone()),
            _ => return Err(Error::InvalidInput("exactly one of --curve and --curve-file is required".into())),
        };
        let cfg = RunConfig {
            curve,
            p: self.p,
            k: self.k,
            bound: self.bound,
            nu_max: self.nu_max,
            budget: self.budget,
            precision_bits: self.precision_bits as usize,
            cache_dir: resolve_cache_dir(self.cache_dir.clone()),
            import_modsym: self.import_modsym.clone(),
            assertions: Assertions { manin_ok: self.assert_manin, rho_surjective: self.assert_surjective },
            seed: self.seed,
            workers: self.workers.map(|w| w as usize),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn emit_json(&self, json: &str) -> Result<()> {
        match &self.json_out {
            Some(path) => fs::write(path, json)?,
            None => std::io::stdout().write_all(json.as_bytes())?,
        }
        Ok(())
    }
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let common = &cli.common;
    let cfg = common.config()?;
    match &cli.command {
        Command::Analyze => {
            let analysis = analyze(&cfg)?;
            for note in &analysis.notes {
                eprintln!("note: {note}");
            }
            let summary = analysis.report.summary();
            // The summary goes to stdout unless stdout carries the JSON.
            if common.json_out.is_some() {
                print!("{summary}");
            } else {
                eprint!("{summary}");
            }
            common.emit_json(&analysis.report.to_json())?;
            analysis.status()
        }
        Command::Delta { n } => {
            let outcome = delta(&cfg, *n)?;
            print!("{}", outcome.describe());
            if common.json_out.is_some() {
                common.emit_json(&(serde_json::to_string_pretty(&outcome.number)? + "\n"))?;
            }
            match outcome.sign {
                crate::kurihara::SignCheck::Consistent => Ok(()),
                crate::kurihara::SignCheck::Violation => {
                    Err(Error::Invariant(format!("delta_{n} is nonzero but its parity forces zero")))
                }
            }
        }
        Command::Modsym { action } => match action {
            ModsymAction::Build => {
                let (path, dim) = modsym_build(&cfg)?;
                println!("built plus space of dimension {dim}; eigen-symbol stored in {}", path.display());
                Ok(())
            }
            ModsymAction::Export { out } => {
                modsym_export(&cfg, out)?;
                println!("exported to {}", out.display());
                Ok(())
            }
            ModsymAction::Import { from } => {
                let path = modsym_import(&cfg, from)?;
                println!("verified {} and stored it in {}", from.display(), path.display());
                Ok(())
            }
        },
        Command::Sieve => {
            let section = sieve_primes(&cfg)?;
            let ells: Vec<String> = section.primes.iter().map(|l| l.ell.to_string()).collect();
            println!("{} Kolyvagin primes (p = {}, k = {}, l <= {}): {}", ells.len(), cfg.p, cfg.k, cfg.bound, ells.join(" "));
            if common.json_out.is_some() {
                common.emit_json(&(serde_json::to_string_pretty(&section)? + "\n"))?;
            }
            Ok(())
        }
    }
}
