//! `fermient`: build fermionic states, reduce them, and run the bound suites.

mod commands;
mod output;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use fermient::{Limits, Tolerances};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] fermient::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(fermient::Error::Capacity { .. }) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug, Serialize)]
#[command(name = "fermient", version, about = "Fermionic reduced density matrices and entanglement bounds")]
pub struct Cli {
    /// Seed for every random input.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Slack below which a bound counts as violated.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output format (default: json for verify, csv for sweep, text otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; for `state` and `rdm` this is the state or RDM file.
    #[arg(short = 'o', long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for verify and sweep.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Display entropies in bits instead of nats.
    #[arg(long, global = true)]
    pub bits: bool,
    /// Largest antisymmetric state dimension binomial(M, N).
    #[arg(long, global = true, default_value_t = Limits::DEFAULT.max_state_dim)]
    pub max_state_dim: usize,
    /// Largest dense tensor-product dimension.
    #[arg(long, global = true, default_value_t = Limits::DEFAULT.max_tensor_dim)]
    pub max_tensor_dim: usize,
    /// Largest M^N for the brute-force tensor expansion.
    #[arg(long, global = true, default_value_t = Limits::DEFAULT.max_bruteforce)]
    pub max_bruteforce: usize,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::DEFAULT;
        if let Some(b) = self.tol {
            t.bound = b;
        }
        t
    }

    pub fn limits(&self) -> Limits {
        Limits {
            max_state_dim: self.max_state_dim,
            max_tensor_dim: self.max_tensor_dim,
            max_bruteforce: self.max_bruteforce,
            ..Limits::DEFAULT
        }
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// Entropy in the display unit.
    pub fn show_entropy(&self, nats: f64) -> f64 {
        if self.bits {
            nats / std::f64::consts::LN_2
        } else {
            nats
        }
    }

    pub fn entropy_unit(&self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Slater,
    Yang,
    Chi,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormArg {
    Unit,
    Physics,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Mutual,
    Subadd,
    Elem,
    Ef,
    Squash,
    Yang,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    S2,
    Ef,
    MutualSlack,
    YangSpectrum,
}

/// Inclusive integer range written `a..b` or a single value `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub fn values(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad range bound `{t}`: {e}"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        Ok(Span { lo, hi })
    }
}

impl Serialize for Span {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}..{}", self.lo, self.hi))
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Build a state and write it as a fermistate file.
    State {
        #[arg(value_enum)]
        kind: StateKind,
        /// Number of modes.
        #[arg(long = "M")]
        modes: Option<usize>,
        /// Number of particles.
        #[arg(long = "N")]
        particles: Option<usize>,
        /// Number of mode pairs (yang, chi).
        #[arg(long = "m")]
        pairs: Option<usize>,
        /// Number of occupied pairs (yang).
        #[arg(long = "n")]
        occupied_pairs: Option<usize>,
        /// Occupied modes of a Slater determinant, comma separated.
        #[arg(long, value_delimiter = ',')]
        occ: Vec<usize>,
    },
    /// Reduce a state file to its k-RDM.
    Rdm {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "unit")]
        norm: NormArg,
    },
    /// k-particle entropies of a state file, or the entropy of an RDM file.
    Entropy {
        input: PathBuf,
        /// Only this k (default: every k from 1 to N).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Run bound suites over the built-in corpus and any given state files.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Restrict the corpus to this number of modes (needs --N).
        #[arg(long = "M")]
        modes: Option<usize>,
        /// Restrict the corpus to this particle number; for squash, the Slater N.
        #[arg(long = "N")]
        particles: Option<usize>,
        /// Number of seeded random states in the corpus.
        #[arg(long, default_value_t = 200)]
        random: usize,
        /// Largest pair count of the pairing states.
        #[arg(long, default_value_t = 3)]
        yang_max_m: usize,
        /// Optimizer restarts for the ef suite.
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        /// Optimizer sweeps per restart for the ef suite.
        #[arg(long, default_value_t = 3)]
        ef_iters: usize,
        /// Extra fermistate files.
        files: Vec<PathBuf>,
    },
    /// Tabulate a quantity over a parameter grid.
    Sweep {
        #[arg(value_enum)]
        quantity: Quantity,
        /// Mode range, e.g. 4..8.
        #[arg(long = "M")]
        modes: Option<Span>,
        /// Particle range, e.g. 2..6.
        #[arg(long = "N")]
        particles: Option<Span>,
        /// Pair-count range for yang-spectrum.
        #[arg(long = "m")]
        pairs: Option<Span>,
        /// Occupied-pair range for yang-spectrum (clipped to n <= m).
        #[arg(long = "n")]
        occupied_pairs: Option<Span>,
        /// Random states per grid point (s2, mutual-slack).
        #[arg(long, default_value_t = 20)]
        random: usize,
        /// Optimizer restarts (ef).
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
    /// Closed-form pairing-state quantities, checked against the numeric 2-RDM.
    Yang {
        #[arg(long = "m")]
        pairs: usize,
        #[arg(long = "n")]
        occupied_pairs: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::State { .. } => "state",
            Command::Rdm { .. } => "rdm",
            Command::Entropy { .. } => "entropy",
            Command::Verify { .. } => "verify",
            Command::Sweep { .. } => "sweep",
            Command::Yang { .. } => "yang",
        }
    }
}

/// Returns true when every counted bound held.
fn run(cli: &Cli) -> CliResult<bool> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    if let Some(t) = cli.tol {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(CliError::Usage(format!("--tol must be a finite non-negative number, got {t}")));
        }
    }
    match &cli.command {
        Command::State { .. } => commands::state(cli).map(|_| true),
        Command::Rdm { .. } => commands::rdm(cli).map(|_| true),
        Command::Entropy { .. } => commands::entropy(cli).map(|_| true),
        Command::Yang { .. } => commands::yang(cli),
        Command::Verify { .. } => verify::run(cli),
        Command::Sweep { .. } => sweep::run(cli),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    eprintln!("# wall-clock {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
