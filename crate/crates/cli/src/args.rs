use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tachyon", version, about = "Self-force on a charged tachyon in circular superluminal motion")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Significant digits that must be stable.
    #[arg(long, global = true, default_value_t = 40)]
    pub digits: u32,
    /// Starting working precision in digits [default: digits + 24].
    #[arg(long, global = true)]
    pub working: Option<u32>,
    /// Precision ceiling in digits.
    #[arg(long, global = true, default_value_t = 2000)]
    pub cap: u32,
    /// Worker threads for sweeps [default: available cores].
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// File of `key = value` lines supplying flags not given on the command line.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file [default: standard output].
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Fw,
    Causal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Series {
    Z,
    Epsilon,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of singular velocities β_k.
    SingularBetas {
        #[arg(long, default_value_t = 15)]
        count: u32,
    },
    /// Null-condition roots at one β.
    Roots {
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// Lower guard on β [default: 1 + 1e-6].
        #[arg(long)]
        guard: Option<String>,
    },
    /// Self-force at one β.
    Force {
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, value_enum, default_value_t = ModelArg::Fw)]
        model: ModelArg,
    },
    /// Force over a grid of β.
    Sweep {
        #[arg(long)]
        beta_min: String,
        #[arg(long)]
        beta_max: String,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, value_enum, default_value_t = SpacingArg::Linear)]
        spacing: SpacingArg,
        #[arg(long, value_enum, default_value_t = ModelArg::Fw)]
        model: ModelArg,
        /// Also scan the window above this singular velocity.
        #[arg(long)]
        refine_k: Option<u32>,
        #[arg(long, default_value = "1e-2")]
        refine_window: String,
        #[arg(long, default_value_t = 8)]
        refine_depth: u32,
    },
    /// Dense scan of (β_k, β_k + window].
    Refine {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "1e-2")]
        window: String,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long, default_value_t = 4)]
        decades: u32,
        #[arg(long, default_value_t = 8)]
        per_decade: u32,
        #[arg(long, value_enum, default_value_t = ModelArg::Fw)]
        model: ModelArg,
    },
    /// Radius of the self-consistent circular orbit at β.
    Radius {
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, default_value = "1")]
        q: String,
        #[arg(long, default_value = "1")]
        m0: String,
        #[arg(long, default_value = "1")]
        c: String,
    },
    /// SVG plot of a sweep CSV.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Series::Z)]
        series: Series,
        #[arg(long, default_value_t = 960)]
        width: u32,
        #[arg(long, default_value_t = 540)]
        height: u32,
    },
}
