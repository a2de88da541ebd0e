use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact count distributions of stationary 1-dependent 0/1 processes.
#[derive(Parser, Debug)]
#[command(name = "onedep", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// P(S_j = k) for every j <= n.
    Dist {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
    },
    /// Zero-run or one-run probabilities q_0..q_N / p_0..p_N.
    Runs {
        #[command(flatten)]
        model: ModelArgs,
        /// Truncation order N.
        #[arg(long, env = "ONEDEP_ORDER", default_value_t = 20)]
        order: usize,
        #[arg(long, value_enum, default_value_t = RunKindArg::Zero)]
        kind: RunKindArg,
    },
    /// Kernel values k(-1)..k(hi).
    Kernel {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 5)]
        hi: usize,
    },
    /// Strings over {0..m-1} counted by number of adjacent pairs in B.
    Enumerate {
        /// Alphabet size m.
        #[arg(long)]
        alphabet: usize,
        /// Pairs of B as "x:y,x:y"; empty for no pairs.
        #[arg(long, default_value = "")]
        pairs: String,
        /// Longest string length.
        #[arg(long)]
        n: usize,
    },
    /// Run the self-verification suites.
    Verify {
        /// Suite name, or "all".
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    /// Success or flip probability (iid, one-pair, flipping).
    #[arg(long)]
    pub p: Option<String>,
    /// Base (carries).
    #[arg(long)]
    pub b: Option<u32>,
    /// p_1 (non-2bf).
    #[arg(long)]
    pub alpha: Option<String>,
    /// p_2 (non-2bf).
    #[arg(long)]
    pub beta: Option<String>,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    pub format: Format,
    /// Add approximate decimal columns (15 significant digits).
    #[arg(long, global = true)]
    pub decimal: bool,
    /// Write to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelName {
    Eulerian,
    Iid,
    OnePair,
    Carries,
    Flipping,
    #[value(name = "non-2bf")]
    NonTwoBlock,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunKindArg {
    Zero,
    One,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}
