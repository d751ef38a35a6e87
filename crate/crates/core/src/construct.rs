//! Randomized saturation-degree construction (DSATUR adapted to timetabling).
//!
//! Repeatedly picks the unassigned exam with the fewest remaining feasible
//! slots (ties uniformly at random) and places it by a [`SatRule`]. Once no
//! unassigned exam has a feasible slot left, the rest are dropped into
//! uniformly random slots, which may create conflicts.

use rand::Rng;

use crate::cost::Problem;
use crate::error::{Error, Result};
use crate::graph::ConflictGraph;
use crate::timetable::Timetable;

/// Slot choice for the exam selected by saturation degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SatRule {
    /// Earliest feasible slot.
    Min,
    /// Feasible slot farthest from the centre `c = floor(k / 2)` (1-based
    /// labels), ties uniformly at random.
    Dist,
}

impl SatRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            SatRule::Min => "min",
            SatRule::Dist => "dist",
        }
    }
}

impl std::str::FromStr for SatRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" | "sat-min" => Ok(SatRule::Min),
            "dist" | "sat-dist" => Ok(SatRule::Dist),
            other => Err(Error::Config(format!("unknown SAT rule `{other}`"))),
        }
    }
}

impl std::fmt::Display for SatRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Completes `partial` (possibly empty). Exams already assigned in `partial`
/// are never moved.
pub fn saturation_construct<R: Rng + ?Sized>(
    problem: &Problem,
    rule: SatRule,
    partial: &Timetable,
    rng: &mut R,
) -> Timetable {
    saturation_construct_ordered(problem, rule, partial, rng).0
}

/// Like [`saturation_construct`], also returning the exams in the order they
/// were placed (saturation phase first, then the random completion).
pub fn saturation_construct_ordered<R: Rng + ?Sized>(
    problem: &Problem,
    rule: SatRule,
    partial: &Timetable,
    rng: &mut R,
) -> (Timetable, Vec<u32>) {
    let graph = problem.graph();
    let m = problem.num_exams();
    let k = problem.num_slots();
    debug_assert_eq!(partial.num_exams(), m);
    debug_assert_eq!(partial.num_slots(), k);

    let mut timetable = partial.clone();
    // blocked[e * k + t]: number of assigned neighbours of e in slot t
    let mut blocked = vec![0u32; m * k];
    let mut free = vec![k as u32; m];
    for e in 0..m {
        if let Some(s) = timetable.slot(e) {
            block(graph, &mut blocked, &mut free, &timetable, e, s, k);
        }
    }

    let mut open: Vec<u32> = (0..m as u32).filter(|&e| !timetable.is_assigned(e as usize)).collect();
    let mut order = Vec::with_capacity(open.len());
    // 1-based centre label; slot index s has label s + 1
    let centre = (k / 2) as i64;

    loop {
        let mut best: Option<usize> = None;
        let mut best_free = u32::MAX;
        let mut ties = 0u32;
        for (pos, &e) in open.iter().enumerate() {
            let f = free[e as usize];
            if f == 0 {
                continue;
            }
            if f < best_free {
                best_free = f;
                best = Some(pos);
                ties = 1;
            } else if f == best_free {
                ties += 1;
                if rng.gen_range(0..ties) == 0 {
                    best = Some(pos);
                }
            }
        }
        let Some(pos) = best else { break };
        let e = open.swap_remove(pos) as usize;
        let row = &blocked[e * k..(e + 1) * k];
        let slot = match rule {
            SatRule::Min => row.iter().position(|&b| b == 0).expect("free slot exists"),
            SatRule::Dist => {
                let mut chosen = 0;
                let mut best_dist = -1i64;
                let mut ties = 0u32;
                for (s, _) in row.iter().enumerate().filter(|(_, &b)| b == 0) {
                    let d = (s as i64 + 1 - centre).abs();
                    if d > best_dist {
                        best_dist = d;
                        chosen = s;
                        ties = 1;
                    } else if d == best_dist {
                        ties += 1;
                        if rng.gen_range(0..ties) == 0 {
                            chosen = s;
                        }
                    }
                }
                chosen
            }
        };
        timetable.assign(e, slot).expect("slot in range");
        block(graph, &mut blocked, &mut free, &timetable, e, slot, k);
        order.push(e as u32);
    }

    open.sort_unstable();
    for e in open {
        let slot = rng.gen_range(0..k);
        timetable.assign(e as usize, slot).expect("slot in range");
        order.push(e);
    }
    (timetable, order)
}

fn block(
    graph: &ConflictGraph,
    blocked: &mut [u32],
    free: &mut [u32],
    timetable: &Timetable,
    exam: usize,
    slot: usize,
    k: usize,
) {
    for (j, _) in graph.neighbors(exam) {
        if timetable.is_assigned(j) {
            continue;
        }
        let cell = &mut blocked[j * k + slot];
        if *cell == 0 {
            free[j] -= 1;
        }
        *cell += 1;
    }
}

/// Slots where unassigned `exam` has no assigned neighbour.
pub fn feasible_slots(exam: usize, timetable: &Timetable, graph: &ConflictGraph) -> Result<Vec<usize>> {
    if timetable.is_assigned(exam) {
        return Err(Error::AlreadyAssigned { exam });
    }
    let mut taken = vec![false; timetable.num_slots()];
    for (j, _) in graph.neighbors(exam) {
        if let Some(s) = timetable.slot(j) {
            taken[s] = true;
        }
    }
    Ok((0..timetable.num_slots()).filter(|&s| !taken[s]).collect())
}

/// Every exam in an independent, uniformly random slot.
pub fn random_timetable<R: Rng + ?Sized>(num_exams: usize, num_slots: usize, rng: &mut R) -> Timetable {
    let slots = (0..num_exams).map(|_| rng.gen_range(0..num_slots as u32)).collect();
    Timetable::from_slots(slots, num_slots).expect("slots in range")
}

/// Outcome of sampling a constructor repeatedly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub samples: usize,
    /// Samples without conflicts.
    pub feasible: usize,
    /// Lowest average proximity cost among the feasible samples.
    pub best_feasible: Option<f64>,
}

/// Builds `samples` timetables from scratch with `rule`.
pub fn sample_constructor<R: Rng + ?Sized>(
    problem: &Problem,
    rule: SatRule,
    samples: usize,
    rng: &mut R,
) -> Result<SampleSummary> {
    let empty = Timetable::empty(problem.num_exams(), problem.num_slots());
    let mut feasible = 0;
    let mut best: Option<u64> = None;
    for _ in 0..samples {
        let t = saturation_construct(problem, rule, &empty, rng);
        let cost = problem.evaluate(&t)?;
        if cost.is_feasible() {
            feasible += 1;
            best = Some(best.map_or(cost.proximity_raw, |b| b.min(cost.proximity_raw)));
        }
    }
    Ok(SampleSummary {
        samples,
        feasible,
        best_feasible: best.map(|b| b as f64 / problem.num_students() as f64),
    })
}
