use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use persuade::bench::{self, BenchOptions};
use persuade::format::Format;
use persuade::report::{check_conditions, solve, SolveOptions};
use persuade::reproduce::{self, ReproduceOptions, Reproducer, CRITERIA};
use persuade::Source;
use persuade_core::instances::GeneratorSpec;
use serde_json::json;

#[derive(Parser)]
#[command(name = "persuade", version, about = "Pricing with seller-designed information: constructions, bounds and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every construction and, for small supports, the oracle bracket.
    Solve {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Evaluate the full-surplus, negative-affiliation and exchangeability conditions.
    Check {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Recompute the claimed values and report one row per claim.
    Reproduce {
        /// Restrict to these criteria (repeatable); default is all.
        #[arg(long = "criterion", value_parser = clap::value_parser!(u8).range(1..=11))]
        criteria: Vec<u8>,
        /// First seed of the random samples.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sweep a generator over seeds and tabulate ratios against OPT-Wel.
    Bench {
        /// Generator spec, e.g. `correlated:m=2..5,k=1..12`.
        #[arg(long)]
        family: String,
        /// First seed; overrides the spec's.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of seeds.
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct SourceArgs {
    /// Built-in example: ex1, ex2, arc, tight-uniform, lemma2, a6, b1, b2.
    #[arg(long, group = "source")]
    example: Option<String>,
    /// Instance JSON file.
    #[arg(long, group = "source")]
    instance: Option<PathBuf>,
    /// Generator spec, e.g. `neg-affiliated:m=3,k=2`.
    #[arg(long, group = "source")]
    family: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl SourceArgs {
    fn source(self) -> Result<Source> {
        Source::from_options(self.example, self.instance, self.family, self.eps, self.n, self.seed)
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve { source, out, tolerance } => {
            anyhow::ensure!(tolerance > 0.0, "--tolerance must be positive");
            let dist = source.source()?.load()?;
            let report = solve(&dist, &SolveOptions { tolerance, ..SolveOptions::default() })?;
            let text = match out.format {
                Format::Json => pretty(&report.to_json(&dist)?),
                Format::Csv => report.table().to_csv(),
                Format::Table => format!("{}\n{}", report.table().to_text(), report.checks_table().to_text()),
            };
            out.emit(&text)?;
            Ok(report.passed())
        }
        Command::Check { source, out } => {
            let dist = source.source()?.load()?;
            let report = check_conditions(&dist);
            let text = match out.format {
                Format::Json => pretty(&report.to_json()),
                f => report.table().render(f),
            };
            out.emit(&text)?;
            Ok(report.passed())
        }
        Command::Reproduce { criteria, seed, out } => {
            let criteria = if criteria.is_empty() { CRITERIA.collect() } else { criteria };
            let rows = Reproducer::new(ReproduceOptions { seed, ..ReproduceOptions::default() }).run(&criteria)?;
            out.emit(&reproduce::table(&rows).render(out.format))?;
            Ok(rows.iter().all(|r| r.pass))
        }
        Command::Bench { family, seed, count, jobs, tolerance, out } => {
            anyhow::ensure!(tolerance > 0.0, "--tolerance must be positive");
            let mut spec: GeneratorSpec = family.parse()?;
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            let name = spec.family.as_str();
            let opts = BenchOptions { jobs, tolerance, ..BenchOptions::new(spec, count) };
            let rows = bench::bench(&opts)?;
            let table = bench::table(name, &rows);
            let text = match out.format {
                Format::Json => pretty(&json!({ "rows": table.to_json(), "pass": bench::rows_pass(&rows, tolerance) })),
                f => table.render(f),
            };
            out.emit(&text)?;
            Ok(bench::rows_pass(&rows, tolerance))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
