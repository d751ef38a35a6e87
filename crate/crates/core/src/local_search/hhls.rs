use rand::Rng;

use super::llh::{self, LowLevelHeuristic, SlotShiftMode};
use crate::error::{Error, Result};
use crate::table::MoveCostTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HhlsParams {
    pub iteration_limit: usize,
    /// Stop after this many consecutive iterations without strict improvement.
    pub stall_limit: usize,
    pub shift_mode: SlotShiftMode,
    pub record_trace: bool,
}

impl Default for HhlsParams {
    fn default() -> Self {
        Self {
            iteration_limit: 25_000,
            stall_limit: 5_000,
            shift_mode: SlotShiftMode::Reinsert,
            record_trace: false,
        }
    }
}

impl HhlsParams {
    pub fn new(iteration_limit: usize, stall_limit: usize) -> Result<Self> {
        let params = Self {
            iteration_limit,
            stall_limit,
            ..Self::default()
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iteration_limit == 0 || self.stall_limit == 0 {
            return Err(Error::Config("HHLS limits must be positive".into()));
        }
        if self.stall_limit > self.iteration_limit {
            return Err(Error::Config(format!(
                "HHLS stall limit {} exceeds iteration limit {}",
                self.stall_limit, self.iteration_limit
            )));
        }
        Ok(())
    }
}

/// One HHLS iteration, as recorded when tracing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HhlsRecord {
    pub iteration: usize,
    pub operator: LowLevelHeuristic,
    pub accepted: bool,
    /// Raw penalized cost of the current solution after the iteration.
    pub cost_raw: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HhlsReport {
    pub iterations: usize,
    pub accepted: usize,
    pub improvements: usize,
    pub stalled: bool,
    pub trace: Vec<HhlsRecord>,
}

enum Step {
    NoMove,
    Accepted(i64),
    Rejected,
}

/// Selection-perturbation hyper-heuristic: draw a low-level heuristic
/// uniformly, keep the result if it does not worsen the penalized cost.
pub fn hhls<R: Rng + ?Sized>(
    table: &mut MoveCostTable<'_>,
    params: &HhlsParams,
    rng: &mut R,
) -> HhlsReport {
    let mut report = HhlsReport::default();
    let mut stall = 0usize;
    for iteration in 1..=params.iteration_limit {
        let op = LowLevelHeuristic::ALL[rng.gen_range(0..LowLevelHeuristic::ALL.len())];
        let step = apply_operator(table, op, params.shift_mode, rng);
        report.iterations = iteration;
        let accepted = matches!(step, Step::Accepted(_));
        if accepted {
            report.accepted += 1;
        }
        if let Step::Accepted(d) = step {
            if d < 0 {
                report.improvements += 1;
                stall = 0;
            } else {
                stall += 1;
            }
        } else {
            stall += 1;
        }
        if params.record_trace {
            report.trace.push(HhlsRecord {
                iteration,
                operator: op,
                accepted,
                cost_raw: table.penalized_raw(),
            });
        }
        if stall >= params.stall_limit {
            report.stalled = true;
            break;
        }
    }
    report
}

fn apply_operator<R: Rng + ?Sized>(
    table: &mut MoveCostTable<'_>,
    op: LowLevelHeuristic,
    shift_mode: SlotShiftMode,
    rng: &mut R,
) -> Step {
    table.charge(8);
    match op {
        LowLevelHeuristic::RandomMove => match llh::propose_random_move(table, rng) {
            None => Step::NoMove,
            Some((e, t)) => {
                let d = table.delta_raw(e, t);
                if d <= 0 {
                    Step::Accepted(table.move_exam(e, t))
                } else {
                    Step::Rejected
                }
            }
        },
        LowLevelHeuristic::BestSwap => match llh::propose_best_swap(table, rng) {
            None => Step::NoMove,
            Some((a, b, d)) => {
                if d <= 0 {
                    let (sa, sb) = (table.slot(a), table.slot(b));
                    Step::Accepted(table.move_exam(a, sb) + table.move_exam(b, sa))
                } else {
                    Step::Rejected
                }
            }
        },
        LowLevelHeuristic::KempeChain => match llh::propose_kempe(table, rng) {
            None => Step::NoMove,
            Some((chain, a, b)) => {
                let d = llh::apply_kempe(table, &chain, a, b);
                if d <= 0 {
                    Step::Accepted(d)
                } else {
                    // the chain is symmetric: applying it again restores it
                    llh::apply_kempe(table, &chain, a, b);
                    Step::Rejected
                }
            }
        },
        LowLevelHeuristic::SlotShift | LowLevelHeuristic::SlotSwap => {
            let map = if op == LowLevelHeuristic::SlotShift {
                llh::propose_slot_shift(table, shift_mode, rng)
            } else {
                llh::propose_slot_swap(table, rng)
            };
            match map {
                None => Step::NoMove,
                Some(map) => {
                    let d = table.relabel_delta(&map);
                    if d <= 0 {
                        Step::Accepted(table.apply_relabel(&map))
                    } else {
                        Step::Rejected
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Problem;
    use crate::instance::Instance;
    use crate::timetable::Timetable;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn params_validation() {
        assert!(HhlsParams::new(10, 20).is_err());
        assert!(HhlsParams::new(0, 0).is_err());
        assert!(HhlsParams::new(1, 1).is_ok());
        assert_eq!(HhlsParams::default().iteration_limit, 25_000);
        assert_eq!(HhlsParams::default().stall_limit, 5_000);
    }

    #[test]
    fn single_exam_single_slot_returns_input() {
        let p = Problem::new(Instance::parse_stu("t", "1\n", 1).unwrap());
        let t = Timetable::from_slots(vec![0], 1).unwrap();
        let mut tbl = MoveCostTable::new(&p, &t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let report = hhls(&mut tbl, &HhlsParams::new(1, 1).unwrap(), &mut rng);
        assert_eq!(report.iterations, 1);
        assert_eq!(report.accepted, 0);
        assert_eq!(tbl.timetable(), t);
    }
}
