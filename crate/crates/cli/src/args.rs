use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "typmod", version, about = "Evidence, typical models and typical kernels of CNF systems")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table, env = "TYPMOD_FORMAT")]
    pub format: Format,

    /// Master seed for anything random
    #[arg(long, global = true, default_value_t = 0, env = "TYPMOD_SEED")]
    pub seed: u64,

    /// Worker threads (0 = one per core)
    #[arg(long, global = true, default_value_t = 0, env = "TYPMOD_JOBS")]
    pub jobs: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchingArg {
    Static,
    MostFrequent,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Oblivious,
    Nonoblivious,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisArg {
    Ratio,
    Impurity,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count models
    Count {
        /// DIMACS file, or - for standard input
        input: PathBuf,
        /// Print every terminated search path to standard error
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = BranchingArg::Static)]
        branching: BranchingArg,
    },
    /// Evidence of every variable, or of given formulas
    Evidence {
        input: PathBuf,
        /// Formula to evaluate instead of the per-variable table (repeatable)
        #[arg(long = "formula", short = 'f')]
        formulas: Vec<String>,
        /// Model with a known probability, written `lit,lit,...=p` over all
        /// variables, e.g. `a,b,!c=1/2` (repeatable; needs --formula)
        #[arg(long = "pin")]
        pins: Vec<String>,
    },
    /// Evidence, typical atoms, kernel and erratum summary
    Typical { input: PathBuf },
    /// Kernel verdicts per typical atom
    Kernel {
        input: PathBuf,
        /// Report which kernel atoms survive adding this formula
        #[arg(long)]
        stability: Option<String>,
    },
    /// List the typical models
    TypicalModels {
        input: PathBuf,
        /// Refuse when the system has more models than this
        #[arg(long, default_value_t = 10_000, env = "TYPMOD_CAP")]
        cap: usize,
        /// Enumerate regardless of the cap
        #[arg(long)]
        force: bool,
    },
    /// Answer queries one by one, interactively or from a file
    Session {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Nonoblivious)]
        mode: ModeArg,
        /// Abstain when |E - 1/2| is below this (a fraction or decimal)
        #[arg(long, default_value = "0", env = "TYPMOD_FLOOR")]
        floor: String,
        /// Read queries from this file and print the trail as JSON
        #[arg(long)]
        batch: Option<PathBuf>,
    },
    /// Approximate evidence from surroundings, or early typical decisions
    Approx {
        input: PathBuf,
        /// Surrounding order
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Report anytime decisions instead of surroundings
        #[arg(long)]
        early: bool,
    },
    /// Generate a random CNF
    Gen {
        #[arg(long)]
        vars: usize,
        /// Number of clauses
        #[arg(long, conflicts_with = "ratio")]
        clauses: Option<usize>,
        /// Clauses per variable
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long, default_value_t = 3)]
        width: usize,
        /// Target impurity in [0, 1]
        #[arg(long)]
        impurity: Option<f64>,
        /// Write here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the clause ratio or impurity and tabulate p(mtm) and ER(mtm)
    Sweep {
        #[arg(long, value_enum, default_value_t = AxisArg::Ratio)]
        axis: AxisArg,
        /// Comma-separated grid values
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[arg(long, default_value_t = 30)]
        vars: usize,
        /// Satisfiable instances per grid point
        #[arg(long, default_value_t = 500)]
        samples: usize,
        /// Clause ratio held fixed on impurity sweeps
        #[arg(long, default_value_t = 4.26)]
        ratio: f64,
        #[arg(long, default_value_t = 3)]
        width: usize,
        /// Instances generated per grid point before giving up
        #[arg(long)]
        max_attempts: Option<usize>,
        /// Record wall time per row (output is then not reproducible)
        #[arg(long)]
        timed: bool,
        /// Allow more than 40 variables
        #[arg(long)]
        force: bool,
        /// Write CSV here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write plot data here
        #[arg(long)]
        dat: Option<PathBuf>,
    },
    /// Solve the minimum equation for the number of models
    SolveM0 {
        #[arg(long)]
        vars: u32,
    },
}
