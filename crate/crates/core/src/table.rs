//! Incremental move evaluation.
//!
//! For every exam `e` and slot `t` the table keeps the proximity and the
//! conflict weight `e` would have towards its neighbours if it sat in `t`.
//! A single-exam move then costs one subtraction to evaluate, and applying
//! it touches only the rows of the moved exam's neighbours, within the
//! proximity window around the old and the new slot.
//!
//! A `k x k` slot-pair matrix of conflict weights is maintained alongside
//! so that moves relabelling whole slots can be priced in `O(k^2)`.

use crate::cost::{proximity_weight, CostBreakdown, Problem, PROXIMITY_WINDOW};
use crate::error::{Error, Result};
use crate::timetable::Timetable;

pub struct MoveCostTable<'p> {
    problem: &'p Problem,
    num_slots: usize,
    slots: Vec<u32>,
    /// `prox[e * k + t]`: proximity of `e` to its neighbours if `e` sat in `t`.
    prox: Vec<u64>,
    /// `clash[e * k + t]`: summed weight of `e`'s neighbours sitting in `t`.
    clash: Vec<u32>,
    /// `pair[a * k + b]`: summed weight of conflicting pairs across slots
    /// `a` and `b`; the diagonal counts each same-slot pair once.
    pair: Vec<u64>,
    proximity_raw: u64,
    conflict_weight: u64,
    ops: u64,
}

impl<'p> MoveCostTable<'p> {
    pub fn new(problem: &'p Problem, timetable: &Timetable) -> Result<Self> {
        timetable.check_complete()?;
        if timetable.num_exams() != problem.num_exams()
            || timetable.num_slots() != problem.num_slots()
        {
            return Err(Error::Config(format!(
                "timetable shape {}x{} does not match instance {}x{}",
                timetable.num_exams(),
                timetable.num_slots(),
                problem.num_exams(),
                problem.num_slots()
            )));
        }
        let m = problem.num_exams();
        let k = problem.num_slots();
        let mut table = Self {
            problem,
            num_slots: k,
            slots: timetable.raw().to_vec(),
            prox: vec![0; m * k],
            clash: vec![0; m * k],
            pair: vec![0; k * k],
            proximity_raw: 0,
            conflict_weight: 0,
            ops: 0,
        };
        table.rebuild();
        Ok(table)
    }

    fn rebuild(&mut self) {
        let graph = self.problem.graph();
        let k = self.num_slots;
        self.prox.fill(0);
        self.clash.fill(0);
        self.pair.fill(0);
        let mut proximity_raw = 0;
        let mut conflict_weight = 0;
        for e in 0..graph.num_exams() {
            let row = e * k;
            let se = self.slots[e] as usize;
            for (j, w) in graph.neighbors(e) {
                let sj = self.slots[j] as usize;
                self.clash[row + sj] += w;
                let lo = sj.saturating_sub(PROXIMITY_WINDOW);
                let hi = (sj + PROXIMITY_WINDOW).min(k - 1);
                for t in lo..=hi {
                    self.prox[row + t] += w as u64 * proximity_weight(t.abs_diff(sj));
                }
                if j > e {
                    if se == sj {
                        conflict_weight += w as u64;
                        self.pair[se * k + se] += w as u64;
                    } else {
                        proximity_raw += w as u64 * proximity_weight(se.abs_diff(sj));
                        self.pair[se * k + sj] += w as u64;
                        self.pair[sj * k + se] += w as u64;
                    }
                }
            }
        }
        self.proximity_raw = proximity_raw;
        self.conflict_weight = conflict_weight;
        self.ops += (graph.nonzero_entries() * (2 * PROXIMITY_WINDOW + 2)) as u64
            + (graph.num_exams() * k) as u64;
    }

    pub fn problem(&self) -> &'p Problem {
        self.problem
    }

    pub fn num_exams(&self) -> usize {
        self.slots.len()
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    #[inline]
    pub fn slot(&self, exam: usize) -> usize {
        self.slots[exam] as usize
    }

    pub fn slots(&self) -> &[u32] {
        &self.slots
    }

    pub fn timetable(&self) -> Timetable {
        Timetable::from_slots(self.slots.clone(), self.num_slots)
            .expect("table slots are always in range")
    }

    pub fn cost(&self) -> CostBreakdown {
        CostBreakdown {
            conflict_weight: self.conflict_weight,
            proximity_raw: self.proximity_raw,
            num_students: self.problem.num_students(),
            conflict_penalty: self.problem.conflict_penalty(),
        }
    }

    /// Current penalized cost on the raw scale.
    #[inline]
    pub fn penalized_raw(&self) -> u64 {
        self.proximity_raw + self.problem.conflict_penalty() * self.conflict_weight
    }

    /// Summed weight of `exam`'s neighbours sitting in `slot`.
    #[inline]
    pub fn clash(&self, exam: usize, slot: usize) -> u32 {
        self.clash[exam * self.num_slots + slot]
    }

    /// Whether `exam` has no neighbour in `slot` (ignoring itself).
    #[inline]
    pub fn is_free(&self, exam: usize, slot: usize) -> bool {
        self.clash(exam, slot) == 0
    }

    /// Conflict weight between the exam sets of slots `a` and `b`.
    #[inline]
    pub fn slot_pair_weight(&self, a: usize, b: usize) -> u64 {
        self.pair[a * self.num_slots + b]
    }

    /// Change of the raw penalized cost if `exam` moved to `slot`.
    #[inline]
    pub fn delta_raw(&self, exam: usize, slot: usize) -> i64 {
        let k = self.num_slots;
        let row = exam * k;
        let cur = self.slots[exam] as usize;
        let dprox = self.prox[row + slot] as i64 - self.prox[row + cur] as i64;
        let dclash = self.clash[row + slot] as i64 - self.clash[row + cur] as i64;
        dprox + self.problem.conflict_penalty() as i64 * dclash
    }

    /// Checked variant of [`delta_raw`](Self::delta_raw).
    pub fn delta(&self, exam: usize, slot: usize) -> Result<i64> {
        self.check_move(exam, slot)?;
        Ok(self.delta_raw(exam, slot))
    }

    /// Delta on the per-student scale.
    pub fn delta_total(&self, exam: usize, slot: usize) -> Result<f64> {
        Ok(self.delta(exam, slot)? as f64 / self.problem.num_students() as f64)
    }

    fn check_move(&self, exam: usize, slot: usize) -> Result<()> {
        if exam >= self.slots.len() {
            return Err(Error::ExamOutOfRange {
                exam,
                num_exams: self.slots.len(),
            });
        }
        if slot >= self.num_slots {
            return Err(Error::SlotOutOfRange {
                slot,
                num_slots: self.num_slots,
            });
        }
        Ok(())
    }

    /// Moves `exam` to `slot`, returning the raw cost change.
    pub fn apply_move(&mut self, exam: usize, slot: usize) -> Result<i64> {
        self.check_move(exam, slot)?;
        Ok(self.move_exam(exam, slot))
    }

    pub(crate) fn move_exam(&mut self, exam: usize, to: usize) -> i64 {
        let from = self.slots[exam] as usize;
        if from == to {
            return 0;
        }
        let k = self.num_slots;
        let row = exam * k;
        let dprox = self.prox[row + to] as i64 - self.prox[row + from] as i64;
        let dclash = self.clash[row + to] as i64 - self.clash[row + from] as i64;
        self.proximity_raw = (self.proximity_raw as i64 + dprox) as u64;
        self.conflict_weight = (self.conflict_weight as i64 + dclash) as u64;

        let graph = self.problem.graph();
        let from_lo = from.saturating_sub(PROXIMITY_WINDOW);
        let from_hi = (from + PROXIMITY_WINDOW).min(k - 1);
        let to_lo = to.saturating_sub(PROXIMITY_WINDOW);
        let to_hi = (to + PROXIMITY_WINDOW).min(k - 1);
        for (j, w) in graph.neighbors(exam) {
            let jrow = j * k;
            let w64 = w as u64;
            self.clash[jrow + from] -= w;
            self.clash[jrow + to] += w;
            for t in from_lo..=from_hi {
                self.prox[jrow + t] -= w64 * proximity_weight(t.abs_diff(from));
            }
            for t in to_lo..=to_hi {
                self.prox[jrow + t] += w64 * proximity_weight(t.abs_diff(to));
            }
            let sj = self.slots[j] as usize;
            self.pair_sub(from, sj, w64);
            self.pair_add(to, sj, w64);
        }
        self.slots[exam] = to as u32;
        self.ops += graph.degree(exam) as u64 * (4 * PROXIMITY_WINDOW as u64 + 6) + 4;
        dprox + self.problem.conflict_penalty() as i64 * dclash
    }

    #[inline]
    fn pair_sub(&mut self, a: usize, b: usize, w: u64) {
        let k = self.num_slots;
        self.pair[a * k + b] -= w;
        if a != b {
            self.pair[b * k + a] -= w;
        }
    }

    #[inline]
    fn pair_add(&mut self, a: usize, b: usize, w: u64) {
        let k = self.num_slots;
        self.pair[a * k + b] += w;
        if a != b {
            self.pair[b * k + a] += w;
        }
    }

    /// Raw cost change of relabelling every exam in slot `a` to `map[a]`.
    /// `map` need not be a bijection; slots mapped onto the same label merge.
    pub fn relabel_delta(&self, map: &[usize]) -> i64 {
        let k = self.num_slots;
        debug_assert_eq!(map.len(), k);
        let penalty = self.problem.conflict_penalty();
        let pen = |x: usize, y: usize| -> u64 {
            if x == y {
                penalty
            } else {
                proximity_weight(x.abs_diff(y))
            }
        };
        let mut delta = 0i64;
        for a in 0..k {
            for b in a + 1..k {
                let w = self.pair[a * k + b];
                if w == 0 || (map[a] == a && map[b] == b) {
                    continue;
                }
                delta += w as i64 * (pen(map[a], map[b]) as i64 - pen(a, b) as i64);
            }
        }
        delta
    }

    /// Applies a slot relabelling, returning the raw cost change.
    pub fn apply_relabel(&mut self, map: &[usize]) -> i64 {
        let mut delta = 0;
        for e in 0..self.slots.len() {
            let s = self.slots[e] as usize;
            if map[s] != s {
                delta += self.move_exam(e, map[s]);
            }
        }
        delta
    }

    /// Operation counter feeding the work clock.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    pub fn charge(&mut self, units: u64) {
        self.ops += units;
    }

    /// True when every cached entry equals that of a freshly built table.
    pub fn same_state(&self, other: &MoveCostTable<'_>) -> bool {
        self.slots == other.slots
            && self.prox == other.prox
            && self.clash == other.clash
            && self.pair == other.pair
            && self.proximity_raw == other.proximity_raw
            && self.conflict_weight == other.conflict_weight
    }

    /// Rebuilds a table from scratch and compares.
    pub fn is_consistent(&self) -> bool {
        let fresh = MoveCostTable::new(self.problem, &self.timetable())
            .expect("table timetable is complete");
        self.same_state(&fresh)
    }
}
