//! Command-line interface.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

use crate::bench::{self, BENCHMARKS};
use crate::copier::{HashFlavor, SharingMode};
use crate::tabling::Engine;

#[derive(Debug, Parser)]
#[command(name = "hctab", version, about = "Tabled logic programs over a hash-consed table area")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a program and print every answer to a query.
    Run {
        file: PathBuf,
        #[arg(short, long)]
        query: String,
        #[arg(long, default_value = "enhanced")]
        mode: SharingMode,
        #[arg(long, default_value = "full")]
        hash: HashFlavor,
        /// Print table statistics after the answers.
        #[arg(long)]
        stats: bool,
    },
    /// Run a bundled benchmark over several sizes.
    Bench {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(BENCHMARKS))]
        name: String,
        /// Comma-separated sizes; defaults depend on the benchmark.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value = "enhanced")]
        mode: SharingMode,
        #[arg(long, default_value = "full")]
        hash: HashFlavor,
        #[arg(long, default_value_t = bench::DEFAULT_SEED)]
        seed: u64,
        /// Write rows here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Executes a parsed command, writing results to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { file, query, mode, hash, stats } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let program = crate::frontend::parse_program(&text).with_context(|| file.display().to_string())?;
            for w in &program.warnings {
                eprintln!("warning: {w}");
            }
            let mut engine = Engine::new(&program, mode, hash)?;
            let mut any = false;
            for answer in engine.query(&query)? {
                writeln!(out, "{}", answer?)?;
                any = true;
            }
            if !any {
                writeln!(out, "no")?;
            }
            if stats {
                write!(out, "{}", engine.statistics())?;
            }
        }
        Command::Bench { name, sizes, mode, hash, seed, csv } => {
            let sizes = if sizes.is_empty() { bench::default_sizes(&name) } else { sizes };
            let rows = bench::run_benchmark(&name, &sizes, mode, hash, seed)?;
            match csv {
                Some(path) => {
                    bench::write_csv(&rows, &path)?;
                    writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
                }
                None => write!(out, "{}", bench::to_csv_string(&rows))?,
            }
        }
    }
    Ok(())
}
