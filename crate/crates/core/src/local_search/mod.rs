//! Local search on complete timetables: vertex descent (VDLS) and the
//! hyper-heuristic local search (HHLS) over five low-level heuristics.

mod hhls;
pub mod llh;
mod vdls;

pub use hhls::{hhls, HhlsParams, HhlsRecord, HhlsReport};
pub use llh::{LowLevelHeuristic, SlotShiftMode};
pub use vdls::{vdls, VdlsReport};

use rand::Rng;

use crate::cost::{CostBreakdown, Problem};
use crate::error::{Error, Result};
use crate::table::MoveCostTable;
use crate::timetable::Timetable;

/// Local search applied to a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LsMode {
    /// VDLS to a fixpoint.
    Vdls,
    /// VDLS, then HHLS, then VDLS again.
    VdlsHhls,
}

impl LsMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            LsMode::Vdls => "vdls",
            LsMode::VdlsHhls => "vdls+hhls",
        }
    }
}

impl std::str::FromStr for LsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vdls" => Ok(LsMode::Vdls),
            "vdls+hhls" | "vdls-hhls" | "both" => Ok(LsMode::VdlsHhls),
            other => Err(Error::Config(format!("unknown local search `{other}`"))),
        }
    }
}

impl std::fmt::Display for LsMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LsReport {
    pub vdls_runs: usize,
    pub hhls_runs: usize,
    pub hhls: Option<HhlsReport>,
}

/// Runs `mode` on the table in place.
pub fn improve<R: Rng + ?Sized>(
    table: &mut MoveCostTable<'_>,
    mode: LsMode,
    params: &HhlsParams,
    rng: &mut R,
) -> LsReport {
    let mut report = LsReport::default();
    vdls(table);
    report.vdls_runs += 1;
    if mode == LsMode::VdlsHhls {
        report.hhls = Some(hhls(table, params, rng));
        report.hhls_runs += 1;
        vdls(table);
        report.vdls_runs += 1;
    }
    report
}

/// A locally improved timetable with its cost and the work spent on it.
#[derive(Debug, Clone)]
pub struct Improved {
    pub timetable: Timetable,
    pub cost: CostBreakdown,
    pub ops: u64,
    pub report: LsReport,
}

/// Builds a move-cost table for `timetable`, improves it, and hands back the result.
pub fn improve_timetable<R: Rng + ?Sized>(
    problem: &Problem,
    timetable: &Timetable,
    mode: LsMode,
    params: &HhlsParams,
    rng: &mut R,
) -> Result<Improved> {
    let mut table = MoveCostTable::new(problem, timetable)?;
    let report = improve(&mut table, mode, params, rng);
    Ok(Improved {
        timetable: table.timetable(),
        cost: table.cost(),
        ops: table.ops(),
        report,
    })
}
