//! The five low-level heuristics of the hyper-heuristic local search.
//!
//! Each operator has a `propose_*` half that picks a move without touching
//! the timetable, so HHLS can price it and skip the application when it would
//! be rejected. The public `llh*` functions apply unconditionally.

use rand::Rng;

use crate::table::MoveCostTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LowLevelHeuristic {
    /// LLH1: move a random exam to a random feasible slot.
    RandomMove,
    /// LLH2: best feasible swap partner for a movable exam.
    BestSwap,
    /// LLH3: Kempe chain interchange between two slots.
    KempeChain,
    /// LLH4: take a slot out and reinsert it elsewhere.
    SlotShift,
    /// LLH5: exchange the contents of two slots.
    SlotSwap,
}

impl LowLevelHeuristic {
    pub const ALL: [LowLevelHeuristic; 5] = [
        LowLevelHeuristic::RandomMove,
        LowLevelHeuristic::BestSwap,
        LowLevelHeuristic::KempeChain,
        LowLevelHeuristic::SlotShift,
        LowLevelHeuristic::SlotSwap,
    ];

    pub fn index(&self) -> usize {
        match self {
            LowLevelHeuristic::RandomMove => 1,
            LowLevelHeuristic::BestSwap => 2,
            LowLevelHeuristic::KempeChain => 3,
            LowLevelHeuristic::SlotShift => 4,
            LowLevelHeuristic::SlotSwap => 5,
        }
    }
}

/// How LLH4 rearranges slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlotShiftMode {
    /// Remove slot `t1`, close the gap, reinsert its exams at position `t2`.
    #[default]
    Reinsert,
    /// Move every exam of `t1` into `t2`, leaving `t1` empty.
    Merge,
}

pub fn propose_random_move<R: Rng + ?Sized>(
    table: &mut MoveCostTable<'_>,
    rng: &mut R,
) -> Option<(usize, usize)> {
    let k = table.num_slots();
    let e = rng.gen_range(0..table.num_exams());
    let cur = table.slot(e);
    table.charge(k as u64);
    let free: Vec<usize> = (0..k).filter(|&t| t != cur && table.is_free(e, t)).collect();
    if free.is_empty() {
        None
    } else {
        Some((e, free[rng.gen_range(0..free.len())]))
    }
}

fn has_free_alternative(table: &MoveCostTable<'_>, e: usize) -> bool {
    let cur = table.slot(e);
    (0..table.num_slots()).any(|t| t != cur && table.is_free(e, t))
}

/// Raw cost change of exchanging the slots of `a` and `b`.
pub fn swap_delta(table: &MoveCostTable<'_>, a: usize, b: usize) -> i64 {
    let sa = table.slot(a);
    let sb = table.slot(b);
    if sa == sb {
        return 0;
    }
    let w = table.problem().graph().weight(a, b) as i64;
    let single = table.delta_raw(a, sb) + table.delta_raw(b, sa);
    if w == 0 {
        single
    } else {
        // both single-move deltas count the a-b pair as newly clashing; after
        // the swap their gap is unchanged
        let p = table.problem();
        single - 2 * w * (p.pair_penalty(sb, sb) as i64 - p.pair_penalty(sa, sb) as i64)
    }
}

/// Whether swapping `a` and `b` leaves both without a clash in their new slot.
pub fn swap_is_feasible(table: &MoveCostTable<'_>, a: usize, b: usize) -> bool {
    let sa = table.slot(a);
    let sb = table.slot(b);
    if sa == sb {
        return false;
    }
    let w = table.problem().graph().weight(a, b);
    table.clash(a, sb) == w && table.clash(b, sa) == w
}

/// Picks `a` uniformly among exams with a feasible alternative slot, then the
/// feasible swap partner `b` with the most negative delta (lowest index on
/// ties). Returns `(a, b, delta)`.
pub fn propose_best_swap<R: Rng + ?Sized>(
    table: &mut MoveCostTable<'_>,
    rng: &mut R,
) -> Option<(usize, usize, i64)> {
    let m = table.num_exams();
    let k = table.num_slots() as u64;
    let mut chosen = None;
    // rejection sampling is uniform over the qualifying exams
    for _ in 0..2 * m {
        let e = rng.gen_range(0..m);
        table.charge(k);
        if has_free_alternative(table, e) {
            chosen = Some(e);
            break;
        }
    }
    let a = match chosen {
        Some(a) => a,
        None => {
            table.charge(m as u64 * k);
            let movable: Vec<usize> = (0..m).filter(|&e| has_free_alternative(table, e)).collect();
            if movable.is_empty() {
                return None;
            }
            movable[rng.gen_range(0..movable.len())]
        }
    };
    table.charge(2 * m as u64);
    let mut best: Option<(usize, i64)> = None;
    for b in 0..m {
        if !swap_is_feasible(table, a, b) {
            continue;
        }
        let d = swap_delta(table, a, b);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((b, d));
        }
    }
    best.map(|(b, d)| (a, b, d))
}

/// Connected component of `start` in the conflict subgraph induced by the
/// exams of `start`'s slot and `other`.
pub fn kempe_chain(table: &mut MoveCostTable<'_>, start: usize, other: usize) -> Vec<usize> {
    let graph = table.problem().graph();
    let home = table.slot(start);
    let mut in_chain = vec![false; table.num_exams()];
    let mut chain = vec![start];
    in_chain[start] = true;
    let mut head = 0;
    let mut visited_edges = 0u64;
    while head < chain.len() {
        let e = chain[head];
        head += 1;
        for (j, _) in graph.neighbors(e) {
            visited_edges += 1;
            let sj = table.slot(j);
            if !in_chain[j] && (sj == home || sj == other) {
                in_chain[j] = true;
                chain.push(j);
            }
        }
    }
    table.charge(visited_edges + chain.len() as u64);
    chain
}

pub fn propose_kempe<R: Rng + ?Sized>(
    table: &mut MoveCostTable<'_>,
    rng: &mut R,
) -> Option<(Vec<usize>, usize, usize)> {
    let k = table.num_slots();
    if k < 2 {
        return None;
    }
    let e = rng.gen_range(0..table.num_exams());
    let home = table.slot(e);
    let mut other = rng.gen_range(0..k - 1);
    if other >= home {
        other += 1;
    }
    let chain = kempe_chain(table, e, other);
    Some((chain, home, other))
}

/// Moves chain members from slot `a` to `b` and vice versa; returns the delta.
pub fn apply_kempe(table: &mut MoveCostTable<'_>, chain: &[usize], a: usize, b: usize) -> i64 {
    let mut delta = 0;
    for &e in chain {
        let s = table.slot(e);
        let target = if s == a { b } else { a };
        delta += table.move_exam(e, target);
    }
    delta
}

/// Slot relabelling for LLH4.
pub fn shift_map(k: usize, from: usize, to: usize, mode: SlotShiftMode) -> Vec<usize> {
    let mut map: Vec<usize> = (0..k).collect();
    match mode {
        SlotShiftMode::Merge => map[from] = to,
        SlotShiftMode::Reinsert => {
            if from < to {
                for (a, m) in map.iter_mut().enumerate().take(to + 1).skip(from + 1) {
                    *m = a - 1;
                }
            } else {
                for (a, m) in map.iter_mut().enumerate().take(from).skip(to) {
                    *m = a + 1;
                }
            }
            map[from] = to;
        }
    }
    map
}

pub fn propose_slot_shift<R: Rng + ?Sized>(
    table: &mut MoveCostTable<'_>,
    mode: SlotShiftMode,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let k = table.num_slots();
    let (from, to) = distinct_pair(k, rng)?;
    table.charge((k * k / 2) as u64);
    Some(shift_map(k, from, to, mode))
}

pub fn propose_slot_swap<R: Rng + ?Sized>(
    table: &mut MoveCostTable<'_>,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let k = table.num_slots();
    let (a, b) = distinct_pair(k, rng)?;
    table.charge((k * k / 2) as u64);
    let mut map: Vec<usize> = (0..k).collect();
    map.swap(a, b);
    Some(map)
}

fn distinct_pair<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Option<(usize, usize)> {
    if k < 2 {
        return None;
    }
    let a = rng.gen_range(0..k);
    let mut b = rng.gen_range(0..k - 1);
    if b >= a {
        b += 1;
    }
    Some((a, b))
}

/// LLH1. Returns the applied delta, or `None` for a no-op.
pub fn llh1<R: Rng + ?Sized>(table: &mut MoveCostTable<'_>, rng: &mut R) -> Option<i64> {
    let (e, t) = propose_random_move(table, rng)?;
    Some(table.move_exam(e, t))
}

/// LLH2.
pub fn llh2<R: Rng + ?Sized>(table: &mut MoveCostTable<'_>, rng: &mut R) -> Option<i64> {
    let (a, b, _) = propose_best_swap(table, rng)?;
    let (sa, sb) = (table.slot(a), table.slot(b));
    Some(table.move_exam(a, sb) + table.move_exam(b, sa))
}

/// LLH3.
pub fn llh3<R: Rng + ?Sized>(table: &mut MoveCostTable<'_>, rng: &mut R) -> Option<i64> {
    let (chain, a, b) = propose_kempe(table, rng)?;
    Some(apply_kempe(table, &chain, a, b))
}

/// LLH4.
pub fn llh4<R: Rng + ?Sized>(
    table: &mut MoveCostTable<'_>,
    mode: SlotShiftMode,
    rng: &mut R,
) -> Option<i64> {
    let map = propose_slot_shift(table, mode, rng)?;
    Some(table.apply_relabel(&map))
}

/// LLH5.
pub fn llh5<R: Rng + ?Sized>(table: &mut MoveCostTable<'_>, rng: &mut R) -> Option<i64> {
    let map = propose_slot_swap(table, rng)?;
    Some(table.apply_relabel(&map))
}
