//! Configuration, seeded runners and report files behind the `skewmu` CLI.
//!
//! Every runner is a pure function of the configuration (including its seed)
//! and every report carries the SHA-256 of the effective configuration.

mod config;
mod runners;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub use config::{lattice_h, AlphaSpec, BetaSpec, ExperimentConfig, HSpec, KEYS};
pub use runners::ls_slope;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
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

impl Subcommand {
    pub const ALL: [Subcommand; 12] = [
        Subcommand::CfInfo,
        Subcommand::OstrowskiCheck,
        Subcommand::IndepTv,
        Subcommand::ApproxLadder,
        Subcommand::TruncDecay,
        Subcommand::PhiProduct,
        Subcommand::ResidueArcs,
        Subcommand::MuSieve,
        Subcommand::Davenport,
        Subcommand::MrtCorr,
        Subcommand::Disjointness,
        Subcommand::WindowDecomp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::CfInfo => "cf-info",
            Subcommand::OstrowskiCheck => "ostrowski-check",
            Subcommand::IndepTv => "indep-tv",
            Subcommand::ApproxLadder => "approx-ladder",
            Subcommand::TruncDecay => "trunc-decay",
            Subcommand::PhiProduct => "phi-product",
            Subcommand::ResidueArcs => "residue-arcs",
            Subcommand::MuSieve => "mu-sieve",
            Subcommand::Davenport => "davenport",
            Subcommand::MrtCorr => "mrt-corr",
            Subcommand::Disjointness => "disjointness",
            Subcommand::WindowDecomp => "window-decomp",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Subcommand::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown subcommand {s:?}")))
    }
}

/// One output file of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportFile {
    pub name: String,
    pub contents: Vec<u8>,
}

impl ReportFile {
    pub fn text(name: &str, body: String) -> Self {
        ReportFile {
            name: name.to_string(),
            contents: body.into_bytes(),
        }
    }

    pub fn binary(name: &str, contents: Vec<u8>) -> Self {
        ReportFile {
            name: name.to_string(),
            contents,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        std::str::from_utf8(&self.contents).ok()
    }
}

pub fn run(cmd: Subcommand, cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    match cmd {
        Subcommand::CfInfo => runners::cf_info(cfg),
        Subcommand::OstrowskiCheck => runners::ostrowski_check(cfg),
        Subcommand::IndepTv => runners::indep_tv(cfg),
        Subcommand::ApproxLadder => runners::approx_ladder(cfg),
        Subcommand::TruncDecay => runners::trunc_decay(cfg),
        Subcommand::PhiProduct => runners::phi_product(cfg),
        Subcommand::ResidueArcs => runners::residue_arcs_report(cfg),
        Subcommand::MuSieve => runners::mu_sieve(cfg),
        Subcommand::Davenport => runners::davenport(cfg),
        Subcommand::MrtCorr => runners::mrt_corr(cfg),
        Subcommand::Disjointness => runners::disjointness(cfg),
        Subcommand::WindowDecomp => runners::window_decomp(cfg),
    }
}

/// Writes the files into `dir` (created if missing) and returns their paths.
pub fn write_reports(dir: &Path, files: &[ReportFile]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    files
        .iter()
        .map(|f| {
            let p = dir.join(&f.name);
            std::fs::write(&p, &f.contents)?;
            Ok(p)
        })
        .collect()
}

/// CLI exit code for an error: 3 for the precision family, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_precision() {
        3
    } else {
        2
    }
}
