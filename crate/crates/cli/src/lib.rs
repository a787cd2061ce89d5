//! `kakeya-lab`: command-line experiments over the kakeya-core library.

mod commands;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kakeya_core::Error;

#[derive(Parser, Debug)]
#[command(name = "kakeya-lab", version, about = "Curved Kakeya and Nikodym experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output path; CSV commands also write <out>.summary.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Box-counting dimension of a tube family (ω = Wy unless --tubes).
    Dimension {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        tubes: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "4,5,6")]
        ks: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Small-volume Kakeya construction with C² = 0 blocks.
    Worstcase {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Number of 2×2 nilpotent blocks.
        #[arg(long, default_value_t = 1)]
        blocks: usize,
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "5,6,7,8")]
        ks: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Sum-difference ratios or trapezium counts on given or random instances.
    Sumset {
        #[arg(long)]
        instance: Option<String>,
        /// Number of seeded random instances instead of --instance.
        #[arg(long)]
        random: Option<usize>,
        /// X matrices (repeatable); the identity when absent.
        #[arg(long)]
        matrix: Vec<String>,
        #[arg(long, default_value = "1/6")]
        eps: String,
        /// ratio | trapezia
        #[arg(long, default_value = "ratio")]
        mode: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Points drawn per side for random instances.
        #[arg(long, default_value_t = 32)]
        size: usize,
        #[arg(long, default_value_t = 16)]
        side: i64,
        #[arg(long, default_value_t = 0.1)]
        rho: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Line or secular counterexample instances.
    Counterexample {
        /// line | secular
        #[arg(long, default_value = "line")]
        mode: String,
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long = "m", default_value_t = 8)]
        count: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        w: Vec<i64>,
        /// Fractions p/q, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        fracs: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Slice heights for the three-slice Nikodym or four-slice Kakeya condition.
    SolveHeights {
        #[arg(long)]
        matrix: String,
        /// nikodym3 | kakeya4
        #[arg(long, default_value = "nikodym3")]
        mode: String,
        #[command(flatten)]
        common: Common,
    },
    /// Failure exponents for the companion-block constructions.
    Exponents {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        tr_adj_zero: bool,
        #[arg(long)]
        det_zero: bool,
        /// Optional companion-block C: also reports W and the vanishing order.
        #[arg(long)]
        matrix: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Greedy hairbrush decomposition of a tube list.
    Hairbrush {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        tubes: String,
        #[arg(long, default_value_t = 2)]
        threshold: usize,
        #[arg(long)]
        candidates: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Hairbrush distance claim on a given triple or random admissible triples.
    ClaimCheck {
        #[arg(long)]
        matrix: String,
        /// JSON list [central, T_j, T_i].
        #[arg(long)]
        tubes: Option<String>,
        #[arg(long)]
        random: Option<usize>,
        /// Tube thickness 2^-delta_k for random triples.
        #[arg(long, default_value_t = 8)]
        delta_k: i32,
        #[arg(long)]
        k: i32,
        #[arg(long)]
        l: i32,
        #[arg(long)]
        m: i32,
        #[arg(long = "K", default_value_t = 16.0)]
        k_const: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Locus of curves meeting the axis and a second curve.
    Locus {
        #[arg(long)]
        matrix: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y0: Vec<String>,
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        t0: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// u,s,t: also evaluate one locus point exactly.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Iterates ε ↦ (2 − ε²)/(8 − 7ε + ε²).
    IterateEps {
        #[arg(long, default_value = "0.1666667")]
        start: String,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Dimension for the reported lower bound (n−1)/(2−ε).
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(std::io::Error),
    Usage(String),
    /// A well-formed run whose outcome is negative.
    Negative(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::NoSolution(_)) | CliError::Negative(_) => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Usage(s) | CliError::Negative(s) => f.write_str(s),
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("KAKEYA_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // the global pool can only be built once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parses arguments, runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match commands::dispatch(cli.command, &echo) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("kakeya-lab: {e}");
            e.exit_code()
        }
    }
}
