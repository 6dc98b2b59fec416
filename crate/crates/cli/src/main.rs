//! `ivhs`: command-line front end.
//!
//! Exit codes: 0 verified or completed, 2 completed with inconclusive
//! entries, 1 error.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ivhs::detideal::Variant;
use ivhs::field::DEFAULT_PRIME;
use ivhs::MultiIndex;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "ivhs",
    version,
    about = "IVHS matrices, minors ideals and Hodge-locus codimension bounds at the Fermat point"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct Common {
    /// Even dimension of the hypersurface.
    #[arg(long)]
    pub m: u32,
    /// Degree of the hypersurface.
    #[arg(long)]
    pub d: u32,
    /// Artifact directory; defaults to out/{m}-{d}/{command}.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Txt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Kind {
    #[value(name = "M")]
    M,
    #[value(name = "Mcheck")]
    Mcheck,
    #[value(name = "N")]
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum VariantArg {
    #[value(name = "I0")]
    I0,
    #[value(name = "I1")]
    I1,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::I0 => Variant::I0,
            VariantArg::I1 => Variant::I1,
        }
    }
}

fn parse_index(text: &str) -> Result<MultiIndex, String> {
    let text = text.trim().trim_start_matches('[').trim_end_matches(']');
    let entries: Result<Vec<u32>, _> = text.split(',').map(|t| t.trim().parse::<u32>()).collect();
    entries
        .map(MultiIndex::new)
        .map_err(|e| format!("expected comma-separated integers: {e}"))
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Closed-form bounds, transversality table and counting-lemma minimum.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Attach a probe estimate of the generic rank with this many trials.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Symbolic IVHS matrix `M`, `M̌_alpha` or `N_{j,alpha}`.
    Matrix {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "M")]
        kind: Kind,
        #[arg(long, value_parser = parse_index)]
        alpha: Option<MultiIndex>,
        #[arg(long, value_parser = parse_index)]
        j: Option<MultiIndex>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Generators of `I_s^0` or `I_s^1` plus a hash manifest.
    Ideal {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        s: u32,
        #[arg(long, value_enum, default_value = "I0")]
        variant: VariantArg,
        #[arg(long, value_enum, default_value = "txt")]
        format: Format,
    },
    /// Builds and verifies the elimination certificate for `s_max0`.
    CertifySmax0 {
        #[command(flatten)]
        common: Common,
    },
    /// Re-verifies a certificate file.
    VerifyCertificate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Capped Buchberger zero-dimensionality test of one ideal.
    Groebner {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        s: u32,
        #[arg(long, value_enum, default_value = "I0")]
        variant: VariantArg,
        /// Default `2(s+1)`.
        #[arg(long)]
        degree_cap: Option<u32>,
        /// Seconds.
        #[arg(long, default_value_t = 60)]
        time_cap: u64,
        #[arg(long, default_value_t = 20_000)]
        max_generators: usize,
    },
    /// Budgeted sandwich for `s_max` (I1 by default).
    SearchSmax1 {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "I1")]
        variant: VariantArg,
        #[arg(long)]
        degree_cap: Option<u32>,
        /// Seconds for the whole search.
        #[arg(long, default_value_t = 60)]
        time_cap: u64,
        #[arg(long, default_value_t = 20_000)]
        max_generators: usize,
    },
    /// Random rank probe of `M`.
    Probe {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        field_prime: u64,
        /// Probe over the rationals with integers in `[-R, R]` instead.
        #[arg(long, value_name = "R")]
        rationals: Option<i64>,
    },
    /// Exact linear-cycle witness and its independent re-verification.
    Witness {
        #[command(flatten)]
        common: Common,
    },
    /// Re-verifies a witness file.
    VerifyWitness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bounds { .. } => "bounds",
            Command::Matrix { .. } => "matrix",
            Command::Ideal { .. } => "ideal",
            Command::CertifySmax0 { .. } => "certify-smax0",
            Command::VerifyCertificate { .. } => "verify-certificate",
            Command::Groebner { .. } => "groebner",
            Command::SearchSmax1 { .. } => "search-smax1",
            Command::Probe { .. } => "probe",
            Command::Witness { .. } => "witness",
            Command::VerifyWitness { .. } => "verify-witness",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Bounds { common, .. }
            | Command::Matrix { common, .. }
            | Command::Ideal { common, .. }
            | Command::CertifySmax0 { common }
            | Command::VerifyCertificate { common, .. }
            | Command::Groebner { common, .. }
            | Command::SearchSmax1 { common, .. }
            | Command::Probe { common, .. }
            | Command::Witness { common }
            | Command::VerifyWitness { common, .. } => common,
        }
    }
}

/// How a command finished; errors are reported separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    Inconclusive,
    Failed,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Completed => 0,
            Outcome::Failed => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.command.common().threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
