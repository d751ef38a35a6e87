//! Run budgets and results shared by every solver.

use std::time::Instant;

use crate::cost::CostBreakdown;
use crate::error::{Error, Result};
use crate::timetable::Timetable;

/// Work units that make up one second on the work clock.
///
/// Calibrated so that a work-clock second roughly matches a wall-clock second
/// of single-threaded optimized search on a current x86-64 core. Measured
/// wall/work ratios were 0.7 to 1.2 across the solvers and instance sizes.
pub const WORK_UNITS_PER_SECOND: u64 = 450_000_000;

/// How elapsed time is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ClockKind {
    /// Deterministic: elapsed time is the amount of search work performed
    /// divided by [`WORK_UNITS_PER_SECOND`]. Identical inputs give identical
    /// runs regardless of machine load.
    #[default]
    Work,
    /// Real elapsed time.
    Wall,
}

impl std::str::FromStr for ClockKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "work" => Ok(ClockKind::Work),
            "wall" => Ok(ClockKind::Wall),
            other => Err(Error::Config(format!("unknown clock `{other}`"))),
        }
    }
}

/// Stopping rule for a run. Limits are soft: they are checked between
/// generations (or restarts), never inside a local search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub seconds: f64,
    pub clock: ClockKind,
    /// Optional cap on generations or restarts.
    pub max_generations: Option<u64>,
}

impl Budget {
    pub fn seconds(seconds: f64) -> Self {
        Self {
            seconds,
            clock: ClockKind::Work,
            max_generations: None,
        }
    }

    pub fn with_clock(mut self, clock: ClockKind) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_max_generations(mut self, generations: u64) -> Self {
        self.max_generations = Some(generations);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.seconds > 0.0) || !self.seconds.is_finite() {
            return Err(Error::Config(format!(
                "time limit must be positive, got {}",
                self.seconds
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Clock {
    kind: ClockKind,
    started: Instant,
    units: u64,
    budget: Budget,
}

impl Clock {
    pub fn start(budget: Budget) -> Self {
        Self {
            kind: budget.clock,
            started: Instant::now(),
            units: 0,
            budget,
        }
    }

    pub fn charge(&mut self, units: u64) {
        self.units += units;
    }

    pub fn units(&self) -> u64 {
        self.units
    }

    pub fn elapsed(&self) -> f64 {
        match self.kind {
            ClockKind::Work => self.units as f64 / WORK_UNITS_PER_SECOND as f64,
            ClockKind::Wall => self.started.elapsed().as_secs_f64(),
        }
    }

    /// Whether the budget is used up after `generations` completed generations.
    pub fn expired(&self, generations: u64) -> bool {
        if let Some(max) = self.budget.max_generations {
            if generations >= max {
                return true;
            }
        }
        self.elapsed() >= self.budget.seconds
    }
}

/// Best-cost sample taken when the incumbent improves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub elapsed: f64,
    pub generation: u64,
    pub best_raw: u64,
    pub best_total: f64,
}

/// Instrumentation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    /// Local search calls on initial-population members.
    pub initial_ls: u64,
    /// Local search calls on crossover offspring.
    pub offspring_ls: u64,
    /// Local search calls on migrants (PRIHGA); stays zero by design.
    pub migrant_ls: u64,
    pub vdls_runs: u64,
    pub hhls_runs: u64,
    pub constructions: u64,
    pub crossovers: u64,
}

impl Counters {
    pub fn add_ls(&mut self, report: &crate::local_search::LsReport) {
        self.vdls_runs += report.vdls_runs as u64;
        self.hhls_runs += report.hhls_runs as u64;
    }

    pub fn merge(&mut self, other: &Counters) {
        self.initial_ls += other.initial_ls;
        self.offspring_ls += other.offspring_ls;
        self.migrant_ls += other.migrant_ls;
        self.vdls_runs += other.vdls_runs;
        self.hhls_runs += other.hhls_runs;
        self.constructions += other.constructions;
        self.crossovers += other.crossovers;
    }
}

/// Outcome of one solver run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub instance: String,
    pub algorithm: String,
    pub seed: u64,
    /// Seconds on the run's clock (see [`ClockKind`]).
    pub elapsed: f64,
    /// Generations for the genetic algorithms, restarts for MULTLS.
    pub generations: u64,
    pub best: Timetable,
    pub best_cost: CostBreakdown,
    /// Penalized raw cost of the best initial-population member.
    pub initial_best_raw: Option<u64>,
    pub trace: Vec<TracePoint>,
    pub counters: Counters,
}

impl RunResult {
    pub fn best_proximity(&self) -> f64 {
        self.best_cost.proximity_avg()
    }

    pub fn feasible(&self) -> bool {
        self.best_cost.is_feasible()
    }
}

/// Appends a trace point when `cost` beats the last recorded one.
pub(crate) fn record_best(
    trace: &mut Vec<TracePoint>,
    clock: &Clock,
    generation: u64,
    cost: &CostBreakdown,
) {
    let raw = cost.penalized_raw();
    if trace.last().is_none_or(|p| raw < p.best_raw) {
        trace.push(TracePoint {
            elapsed: clock.elapsed(),
            generation,
            best_raw: raw,
            best_total: cost.penalized_total(),
        });
    }
}
