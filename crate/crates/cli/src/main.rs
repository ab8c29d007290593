mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "kmap-ecc", version, about = "Karnaugh-map error-correcting code toolkit")]
pub struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "KMAP_ECC_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stream valid placements as JSON lines.
    Search(SearchArgs),
    /// Check a placement file for syndrome collisions.
    Validate(PlacementArg),
    #[command(subcommand)]
    Codec(CodecCommand),
    #[command(subcommand)]
    Coverage(CoverageCommand),
    #[command(subcommand)]
    Burst(BurstCommand),
    /// Draw the Karnaugh map of a placement.
    Render(RenderArgs),
    /// Compare two map grids (CSV or JSON).
    Diff(DiffArgs),
    /// Exhaustive checks of the overlap theorems and the triple bound.
    VerifyTheorems(WidthArg),
    /// Candidate-evaluation counts of guided vs naive search.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct PlacementArg {
    /// Placement JSON file: {"n": 7, "data": [106, 86, 79]}.
    #[arg(long)]
    pub placement: PathBuf,
}

#[derive(Args, Debug)]
pub struct WidthArg {
    #[arg(long, default_value_t = 7)]
    pub n: u32,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 7)]
    pub n: u32,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Stop after this many placements.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Restrict to one class, e.g. S445^433.
    #[arg(long)]
    pub class: Option<String>,
    /// Do not restrict X_1 and X_2 to the top tier.
    #[arg(long)]
    pub all_tiers: bool,
    /// Use the unguided numeric-order search instead.
    #[arg(long)]
    pub naive: bool,
}

#[derive(Subcommand, Debug)]
pub enum CodecCommand {
    /// Print the syndrome table.
    Build(CodecBuildArgs),
    /// Encode data bits (`X_1` first) into a codeword.
    Encode(EncodeArgs),
    /// Decode a received codeword.
    Decode(DecodeArgs),
}

#[derive(Args, Debug)]
pub struct TripleArgs {
    /// Include correctable three-bit patterns.
    #[arg(long)]
    pub triples: bool,
    /// Rule for triples sharing a free square.
    #[arg(long, default_value = "data-triple-yields")]
    pub rule: String,
}

#[derive(Args, Debug)]
pub struct CodecBuildArgs {
    #[command(flatten)]
    pub placement: PlacementArg,
    #[command(flatten)]
    pub triples: TripleArgs,
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub placement: PlacementArg,
    /// Data as a bit string (`X_1` first) or 0x-prefixed hex.
    #[arg(long)]
    pub data: String,
    /// Print the codeword as hex instead of a bit string.
    #[arg(long)]
    pub hex: bool,
    #[arg(long)]
    pub odd: bool,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub placement: PlacementArg,
    /// Codeword as a bit string (`X_1..X_d P_1..P_n`) or 0x-prefixed hex.
    #[arg(long)]
    pub word: String,
    #[command(flatten)]
    pub triples: TripleArgs,
    #[arg(long)]
    pub hex: bool,
    #[arg(long)]
    pub odd: bool,
}

#[derive(Subcommand, Debug)]
pub enum CoverageCommand {
    /// Correctable three-bit patterns of one placement.
    Report(CoverageReportArgs),
    /// Coverage of every realizable class of 3-data placements.
    Census(CensusArgs),
    /// Search for placements keeping every parity triple free.
    Theorem4(WidthArg),
    /// Search for a full three-bit-correcting 3-data code.
    Minparity(MinParityArgs),
}

#[derive(Args, Debug)]
pub struct CoverageReportArgs {
    #[command(flatten)]
    pub placement: PlacementArg,
    #[arg(long, default_value = "data-triple-yields")]
    pub rule: String,
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[arg(long, default_value_t = 7)]
    pub n: u32,
    #[arg(long, default_value = "data-triple-yields")]
    pub rule: String,
    /// Compare every placement of each class, not a sample.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Extra placements compared per class when sampling.
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct MinParityArgs {
    #[arg(long, default_value_t = 8)]
    pub n: u32,
    /// pruned | exhaustive
    #[arg(long, default_value = "pruned")]
    pub mode: String,
}

#[derive(Subcommand, Debug)]
pub enum BurstCommand {
    /// Every burst-safe ordering, grouped by data positions.
    Search(CoverageReportArgs),
    /// Check one ordering.
    Check(BurstCheckArgs),
}

#[derive(Args, Debug)]
pub struct BurstCheckArgs {
    #[command(flatten)]
    pub placement: PlacementArg,
    /// e.g. "X1,P7,P3,P6,X3,P2,P4,P1,P5,X2"
    #[arg(long)]
    pub ordering: String,
    #[arg(long, default_value = "data-triple-yields")]
    pub rule: String,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[command(flatten)]
    pub placement: PlacementArg,
    /// Label covered three-bit patterns.
    #[arg(long)]
    pub triples: bool,
    #[arg(long, default_value = "data-triple-yields")]
    pub rule: String,
    /// Mark squares forbidden for a third data bit, e.g. "1,2".
    #[arg(long)]
    pub forbidden_for: Option<String>,
}

#[derive(Args, Debug)]
pub struct DiffArgs {
    pub left: PathBuf,
    pub right: PathBuf,
    /// Map width for CSV grids.
    #[arg(long, default_value_t = 7)]
    pub n: u32,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 7)]
    pub n: u32,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Valid placements each search must reach.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Also report wall-clock times (not reproducible).
    #[arg(long)]
    pub timing: bool,
}

/// How a run ended; maps onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Domain(anyhow::Error),
    /// Work finished and was printed, but the outcome is a domain failure
    /// (uncorrectable word, unsafe ordering, differing grids).
    Reported,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let outcome = std::panic::catch_unwind(|| commands::run(&cli));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Usage(e))) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Domain(e))) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Ok(Err(Failure::Reported)) => ExitCode::from(2),
        Err(_) => ExitCode::from(3),
    }
}
