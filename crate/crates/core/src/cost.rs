//! Proximity cost and conflict penalty.
//!
//! Everything is computed on an integer "raw" scale: proximity is summed as
//! `w_ij * 2^(5 - gap)` without dividing by the student count, and the
//! conflict weight is pre-multiplied by the student count. Division happens
//! only when reporting, so incremental deltas compare exactly.

use crate::error::{Error, Result};
use crate::graph::ConflictGraph;
use crate::instance::Instance;
use crate::timetable::Timetable;

/// Largest slot gap that still incurs a proximity penalty.
pub const PROXIMITY_WINDOW: usize = 5;

/// Per-student penalty for two exams `gap` slots apart: 16, 8, 4, 2, 1 for
/// gaps 1..=5, zero otherwise. Same-slot pairs are conflicts, not proximity.
#[inline]
pub const fn proximity_weight(gap: usize) -> u64 {
    if gap >= 1 && gap <= PROXIMITY_WINDOW {
        1 << (PROXIMITY_WINDOW - gap)
    } else {
        0
    }
}

/// Cost of a complete timetable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostBreakdown {
    /// Sum of `w_ij` over co-enrolled pairs sharing a slot.
    pub conflict_weight: u64,
    /// Sum of `w_ij * 2^(5 - gap)` over pairs with gap in 1..=5.
    pub proximity_raw: u64,
    pub num_students: usize,
    /// Conflict weight multiplier on the raw scale (W times student count).
    pub conflict_penalty: u64,
}

impl CostBreakdown {
    pub fn proximity_avg(&self) -> f64 {
        self.proximity_raw as f64 / self.num_students as f64
    }

    /// Penalized total on the raw scale; orders timetables exactly.
    pub fn penalized_raw(&self) -> u64 {
        self.proximity_raw + self.conflict_penalty * self.conflict_weight
    }

    pub fn penalized_total(&self) -> f64 {
        self.penalized_raw() as f64 / self.num_students as f64
    }

    pub fn conflict_penalty_per_unit(&self) -> f64 {
        self.conflict_penalty as f64 / self.num_students as f64
    }

    pub fn is_feasible(&self) -> bool {
        self.conflict_weight == 0
    }
}

/// An instance together with its conflict graph and conflict penalty;
/// everything the solvers read but never mutate.
#[derive(Debug, Clone)]
pub struct Problem {
    instance: Instance,
    graph: ConflictGraph,
    conflict_penalty: u64,
}

impl Problem {
    /// Uses the default conflict weight
    /// `W = 32 * sum_s C(|s|, 2) / num_students + 1`, which exceeds any
    /// proximity average a feasible timetable can reach.
    pub fn new(instance: Instance) -> Self {
        let graph = ConflictGraph::build(&instance);
        let conflict_penalty = default_conflict_penalty(&instance);
        Self {
            instance,
            graph,
            conflict_penalty,
        }
    }

    /// Overrides the conflict weight (per unit of conflict weight, on the
    /// per-student scale). Rounded to the raw integer scale.
    pub fn with_conflict_weight(mut self, weight: f64) -> Result<Self> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::Config(format!(
                "conflict weight must be finite and non-negative, got {weight}"
            )));
        }
        self.conflict_penalty = (weight * self.instance.num_students() as f64).round() as u64;
        Ok(self)
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn graph(&self) -> &ConflictGraph {
        &self.graph
    }

    pub fn name(&self) -> &str {
        self.instance.name()
    }

    pub fn num_exams(&self) -> usize {
        self.instance.num_exams()
    }

    pub fn num_slots(&self) -> usize {
        self.instance.num_slots()
    }

    pub fn num_students(&self) -> usize {
        self.instance.num_students()
    }

    /// Conflict multiplier on the raw scale.
    pub fn conflict_penalty(&self) -> u64 {
        self.conflict_penalty
    }

    /// Conflict weight on the per-student scale.
    pub fn conflict_weight(&self) -> f64 {
        self.conflict_penalty as f64 / self.num_students() as f64
    }

    pub fn evaluate(&self, timetable: &Timetable) -> Result<CostBreakdown> {
        evaluate(timetable, &self.graph, &self.instance, self.conflict_penalty)
    }

    /// Penalty of an exam pair `a`, `b` slots on the raw scale.
    #[inline]
    pub fn pair_penalty(&self, a: usize, b: usize) -> u64 {
        if a == b {
            self.conflict_penalty
        } else {
            proximity_weight(a.abs_diff(b))
        }
    }

    /// Rough operation count of one constructive pass, used by the work clock.
    pub(crate) fn construction_work(&self) -> u64 {
        let m = self.num_exams() as u64;
        m * m / 2 + self.graph.nonzero_entries() as u64 * 2 + m * self.num_slots() as u64
    }
}

fn default_conflict_penalty(instance: &Instance) -> u64 {
    32 * instance.co_enrolled_pairs() + instance.num_students() as u64
}

/// Full evaluation of a complete timetable. `conflict_penalty` is on the raw
/// scale (see [`Problem::conflict_penalty`]).
pub fn evaluate(
    timetable: &Timetable,
    graph: &ConflictGraph,
    instance: &Instance,
    conflict_penalty: u64,
) -> Result<CostBreakdown> {
    timetable.check_complete()?;
    let slots = timetable.raw();
    let mut conflict_weight = 0u64;
    let mut proximity_raw = 0u64;
    for i in 0..graph.num_exams() {
        let si = slots[i] as usize;
        for (j, w) in graph.neighbors(i) {
            if j <= i {
                continue;
            }
            let sj = slots[j] as usize;
            if si == sj {
                conflict_weight += w as u64;
            } else {
                proximity_raw += w as u64 * proximity_weight(si.abs_diff(sj));
            }
        }
    }
    Ok(CostBreakdown {
        conflict_weight,
        proximity_raw,
        num_students: instance.num_students(),
        conflict_penalty,
    })
}
