use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use examtt::{ClockKind, LsMode, SatRule};

#[derive(Debug, Parser)]
#[command(name = "examtt", version, about = "Examination timetabling solvers and benchmark harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the saturation-degree constructors.
    Construct(ConstructArgs),
    /// Run one algorithm on one instance.
    Solve(SolveArgs),
    /// Run every algorithm on every instance for several seeds.
    Bench(BenchArgs),
    /// Full factorial parameter grid.
    Calibrate(CalibrateArgs),
    /// Mann-Whitney U test between two result files, per instance.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Directory holding the `.stu` (and optional `.crs`) files.
    #[arg(long, env = "EXAMTT_DATA_DIR", default_value = "data/toronto")]
    pub data_dir: PathBuf,
    /// TOML table of slot counts overriding the bundled one.
    #[arg(long)]
    pub slots_file: Option<PathBuf>,
    /// Slot count for every instance, overriding any table.
    #[arg(long)]
    pub slots: Option<usize>,
    /// TOML table of best known values overriding the bundled one.
    #[arg(long)]
    pub best_known: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Min,
    Dist,
}

impl From<Rule> for SatRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Min => SatRule::Min,
            Rule::Dist => SatRule::Dist,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ls {
    Vdls,
    #[value(name = "vdls+hhls")]
    VdlsHhls,
}

impl From<Ls> for LsMode {
    fn from(l: Ls) -> Self {
        match l {
            Ls::Vdls => LsMode::Vdls,
            Ls::VdlsHhls => LsMode::VdlsHhls,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Clock {
    Work,
    Wall,
}

impl From<Clock> for ClockKind {
    fn from(c: Clock) -> Self {
        match c {
            Clock::Work => ClockKind::Work,
            Clock::Wall => ClockKind::Wall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum)]
pub enum Algo {
    Parhga,
    Prihga,
    Multls,
    #[value(name = "pure-parhga")]
    PureParhga,
    #[value(name = "pure-prihga")]
    PurePrihga,
}

impl Algo {
    pub fn name(&self) -> &'static str {
        match self {
            Algo::Parhga => "parhga",
            Algo::Prihga => "prihga",
            Algo::Multls => "multls",
            Algo::PureParhga => "pure-parhga",
            Algo::PurePrihga => "pure-prihga",
        }
    }
}

/// Parameter overrides; unset values keep the calibrated defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Population size.
    #[arg(long)]
    pub pop: Option<usize>,
    /// Crossover fraction r.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub p_elit: Option<f64>,
    #[arg(long)]
    pub sel_frac: Option<f64>,
    #[arg(long)]
    pub mig_frac: Option<f64>,
    /// Local search applied to offspring (and MULTLS restarts).
    #[arg(long, value_enum)]
    pub ls: Option<Ls>,
    /// Local search applied to the initial population.
    #[arg(long, value_enum)]
    pub init_ls: Option<Ls>,
    /// Constructor for the initial population (PARHGA) or MULTLS restarts.
    #[arg(long, value_enum)]
    pub init_rule: Option<Rule>,
    /// Share of PARHGA's initial population built by the constructor.
    #[arg(long)]
    pub heuristic_fraction: Option<f64>,
    /// Rule completing crossover offspring.
    #[arg(long, value_enum)]
    pub completion: Option<Rule>,
    #[arg(long)]
    pub hhls_iters: Option<usize>,
    #[arg(long)]
    pub hhls_stall: Option<usize>,
    /// PARHGA: install transferred sets at their source slot.
    #[arg(long)]
    pub preserve_source_slot: bool,
    /// PRIHGA: keep crossover keys instead of re-encoding improved offspring.
    #[arg(long)]
    pub baldwinian: bool,
    /// PRIHGA: breed offspring in parallel.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    /// Time limit per run in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub time: f64,
    /// `work` counts search operations (reproducible); `wall` uses real time.
    #[arg(long, value_enum, default_value_t = Clock::Work)]
    pub clock: Clock,
    /// Stop after this many generations (restarts for MULTLS).
    #[arg(long)]
    pub max_generations: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Instance name (repeatable) or path to a `.stu` file.
    #[arg(long, required = true, value_delimiter = ',')]
    pub instance: Vec<String>,
    /// Rules to sample; both by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub rule: Vec<Rule>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 50)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub instance: String,
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[command(flatten)]
    pub overrides: Overrides,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Best-so-far trace CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the best timetable, one `exam slot` line per exam (1-based).
    #[arg(long)]
    pub solution: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, required = true, value_delimiter = ',')]
    pub instance: Vec<String>,
    #[arg(long, value_enum, required = true, value_delimiter = ',')]
    pub algo: Vec<Algo>,
    /// Runs per (instance, algorithm).
    #[arg(long, default_value_t = 5)]
    pub runs: u64,
    /// Master seed; each run's seed is derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Runs executed concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GaAlgo {
    Parhga,
    Prihga,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, required = true, value_delimiter = ',')]
    pub instance: Vec<String>,
    #[arg(long, value_enum)]
    pub algo: GaAlgo,
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Population sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [20, 50, 100])]
    pub pop_levels: Vec<usize>,
    /// Crossover fractions r.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.75, 0.5, 0.25])]
    pub r_levels: Vec<f64>,
    /// PARHGA offspring local search.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Ls::Vdls, Ls::VdlsHhls])]
    pub ls_levels: Vec<Ls>,
    /// PARHGA heuristic share of the initial population.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0])]
    pub heuristic_levels: Vec<f64>,
    /// PARHGA initial constructor.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Rule::Min, Rule::Dist])]
    pub init_levels: Vec<Rule>,
    /// PRIHGA selection fraction, migration set to the same value.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.25])]
    pub selmig_levels: Vec<f64>,
    /// PRIHGA elite inheritance probability.
    #[arg(long, value_delimiter = ',', default_values_t = [0.6, 0.8])]
    pub p_elit_levels: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Column holding the compared values.
    #[arg(long, default_value = "best_cost")]
    pub column: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
