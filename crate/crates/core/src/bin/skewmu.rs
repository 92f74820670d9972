use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use skewmu::experiments::{exit_code, run, write_reports, ExperimentConfig, Subcommand};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    CfInfo,
    OstrowskiCheck,
    IndepTv,
    ApproxLadder,
    TruncDecay,
    PhiProduct,
    ResidueArcs,
    MuSieve,
    Davenport,
    MrtCorr,
    Disjointness,
    WindowDecomp,
}

impl From<Cmd> for Subcommand {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::CfInfo => Subcommand::CfInfo,
            Cmd::OstrowskiCheck => Subcommand::OstrowskiCheck,
            Cmd::IndepTv => Subcommand::IndepTv,
            Cmd::ApproxLadder => Subcommand::ApproxLadder,
            Cmd::TruncDecay => Subcommand::TruncDecay,
            Cmd::PhiProduct => Subcommand::PhiProduct,
            Cmd::ResidueArcs => Subcommand::ResidueArcs,
            Cmd::MuSieve => Subcommand::MuSieve,
            Cmd::Davenport => Subcommand::Davenport,
            Cmd::MrtCorr => Subcommand::MrtCorr,
            Cmd::Disjointness => Subcommand::Disjointness,
            Cmd::WindowDecomp => Subcommand::WindowDecomp,
        }
    }
}

/// Numerical checks for Möbius disjointness of skew products on the 2-torus.
#[derive(Debug, Parser)]
#[command(name = "skewmu", version)]
struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    command: Cmd,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the `out` key.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Working precision in bits; overrides the `precision` key.
    #[arg(long)]
    precision: Option<u32>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("skewmu: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn execute(args: &Args) -> skewmu::Result<Vec<PathBuf>> {
    let mut pairs = match &args.config {
        Some(p) => ExperimentConfig::parse_text(&std::fs::read_to_string(p)?)?,
        None => Default::default(),
    };
    if let Some(s) = args.seed {
        pairs.insert("seed".into(), s.to_string());
    }
    if let Some(b) = args.precision {
        pairs.insert("precision".into(), b.to_string());
    }
    if let Some(o) = &args.out {
        pairs.insert("out".into(), o.display().to_string());
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| skewmu::Error::invalid(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        pairs.insert(k.trim().into(), v.trim().into());
    }
    let cfg = ExperimentConfig::from_pairs(&pairs)?;
    let files = run(args.command.into(), &cfg)?;
    write_reports(std::path::Path::new(&cfg.out), &files)
}
