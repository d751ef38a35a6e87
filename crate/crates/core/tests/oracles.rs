//! Solver components checked against naive, independently written oracles.

use examtt::local_search::llh;
use examtt::rng::SolverRng;
use examtt::testkit::{synthetic_instance, toy_instance, SyntheticSpec};
use examtt::*;
use rand::{Rng, SeedableRng};

/// Cost straight from the enrollment lists: `(proximity_raw, conflicting pairs)`.
fn naive_cost(inst: &Instance, slots: &[u32]) -> (u64, u64) {
    let mut prox = 0;
    let mut clash = 0;
    for s in inst.students() {
        for (i, &a) in s.iter().enumerate() {
            for &b in &s[i + 1..] {
                let (sa, sb) = (slots[a as usize], slots[b as usize]);
                let gap = sa.abs_diff(sb);
                if gap == 0 {
                    clash += 1;
                } else if gap <= 5 {
                    prox += 1u64 << (5 - gap);
                }
            }
        }
    }
    (prox, clash)
}

fn naive_penalized(p: &Problem, slots: &[u32]) -> i64 {
    let (prox, clash) = naive_cost(p.instance(), slots);
    (prox + clash * p.conflict_penalty()) as i64
}

fn all_assignments(m: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..k as u32).map(move |s| {
                    let mut w = v.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out
}

fn stand_in() -> Problem {
    Problem::new(synthetic_instance("stand-in", SyntheticSpec::small(), 11))
}

#[test]
fn toy_evaluation_matches_enumeration() {
    let p = Problem::new(toy_instance());
    let all = all_assignments(4, 3);
    assert_eq!(all.len(), 81);
    for slots in all {
        let t = Timetable::from_slots(slots.clone(), 3).unwrap();
        let c = p.evaluate(&t).unwrap();
        let (prox, clash) = naive_cost(p.instance(), &slots);
        assert_eq!(c.proximity_raw, prox, "{slots:?}");
        assert_eq!(c.conflict_weight, clash, "{slots:?}");
        assert_eq!(c.penalized_raw() as i64, naive_penalized(&p, &slots));
        assert_eq!(c.is_feasible(), clash == 0);
    }
}

#[test]
fn toy_conflict_graph_is_a_four_clique() {
    // students {1,2},{2,3},{3,4},{1,3},{1,2,4}: every pair of exams clashes,
    // so three slots never suffice
    let p = Problem::new(toy_instance());
    assert_eq!(p.graph().nonzero_entries(), 12);
    assert!(all_assignments(4, 3).iter().all(|s| naive_cost(p.instance(), s).1 > 0));
    assert!(all_assignments(4, 4).iter().any(|s| naive_cost(p.instance(), s).1 == 0));
}

/// Vertex descent written from the definition: full re-evaluation per candidate.
fn naive_descent(p: &Problem, mut slots: Vec<u32>) -> Vec<u32> {
    let k = p.num_slots() as u32;
    loop {
        let mut improved = false;
        for e in 0..slots.len() {
            let base = naive_penalized(p, &slots);
            let cur = slots[e];
            let mut best = (0i64, cur);
            for t in 0..k {
                slots[e] = t;
                let d = naive_penalized(p, &slots) - base;
                if d < best.0 {
                    best = (d, t);
                }
            }
            slots[e] = best.1;
            improved |= best.0 < 0;
        }
        if !improved {
            return slots;
        }
    }
}

#[test]
fn vdls_matches_naive_descent_on_toy() {
    let p = Problem::new(toy_instance());
    for slots in all_assignments(4, 3) {
        let t = Timetable::from_slots(slots.clone(), 3).unwrap();
        let mut table = MoveCostTable::new(&p, &t).unwrap();
        vdls(&mut table);
        assert_eq!(table.slots(), naive_descent(&p, slots).as_slice());
    }
}

#[test]
fn vdls_matches_naive_descent_on_random_instances() {
    let mut rng = SolverRng::seed_from_u64(2);
    for seed in 0..4 {
        let spec = SyntheticSpec { exams: 25, students: 120, slots: 7, max_load: 4, skew: 0.5 };
        let p = Problem::new(synthetic_instance("r", spec, seed));
        let t = random_timetable(25, 7, &mut rng);
        let mut table = MoveCostTable::new(&p, &t).unwrap();
        vdls(&mut table);
        assert_eq!(table.slots(), naive_descent(&p, t.raw().to_vec()).as_slice());
    }
}

/// Exhaustive LLH2 oracle: best feasible partner of `a` by full evaluation.
fn best_swap_oracle(p: &Problem, slots: &[u32], a: usize) -> Option<(usize, i64)> {
    let base = naive_penalized(p, slots);
    let g = p.graph();
    let mut best: Option<(usize, i64)> = None;
    for b in 0..slots.len() {
        if slots[a] == slots[b] {
            continue;
        }
        let mut s = slots.to_vec();
        s.swap(a, b);
        let clean = |e: usize| (0..s.len()).all(|j| j == e || s[j] != s[e] || g.weight(e, j) == 0);
        if !(clean(a) && clean(b)) {
            continue;
        }
        let d = naive_penalized(p, &s) - base;
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((b, d));
        }
    }
    best
}

#[test]
fn best_swap_matches_exhaustive_oracle() {
    let mut rng = SolverRng::seed_from_u64(8);
    let toy = Problem::new(toy_instance());
    let stand = stand_in();
    for p in [&toy, &stand] {
        for _ in 0..200 {
            let t = random_timetable(p.num_exams(), p.num_slots(), &mut rng);
            let mut table = MoveCostTable::new(p, &t).unwrap();
            if let Some((a, b, d)) = llh::propose_best_swap(&mut table, &mut rng) {
                assert_eq!(Some((b, d)), best_swap_oracle(p, t.raw(), a));
            }
        }
    }
}

#[test]
fn delta_table_matches_full_evaluation() {
    let p = stand_in();
    let mut rng = SolverRng::seed_from_u64(4);
    let t = saturation_construct(&p, SatRule::Dist, &Timetable::empty(p.num_exams(), p.num_slots()), &mut rng);
    let mut table = MoveCostTable::new(&p, &t).unwrap();
    let mut slots = t.raw().to_vec();
    for _ in 0..1000 {
        let e = rng.gen_range(0..p.num_exams());
        let s = rng.gen_range(0..p.num_slots());
        let before = naive_penalized(&p, &slots);
        let predicted = table.delta(e, s).unwrap();
        slots[e] = s as u32;
        assert_eq!(predicted, naive_penalized(&p, &slots) - before);
        assert_eq!(table.apply_move(e, s).unwrap(), predicted);
        assert_eq!(table.penalized_raw() as i64, naive_penalized(&p, &slots));
    }
    assert!(table.is_consistent());
}

#[test]
fn swap_and_relabel_deltas_match_full_evaluation() {
    let p = stand_in();
    let mut rng = SolverRng::seed_from_u64(5);
    let k = p.num_slots();
    for _ in 0..200 {
        let t = random_timetable(p.num_exams(), k, &mut rng);
        let table = MoveCostTable::new(&p, &t).unwrap();
        let base = naive_penalized(&p, t.raw());
        let (a, b) = (rng.gen_range(0..p.num_exams()), rng.gen_range(0..p.num_exams()));
        let mut s = t.raw().to_vec();
        s.swap(a, b);
        assert_eq!(llh::swap_delta(&table, a, b), naive_penalized(&p, &s) - base);

        let from = rng.gen_range(0..k);
        let to = (from + 1 + rng.gen_range(0..k - 1)) % k;
        let mode = if rng.gen_bool(0.5) { SlotShiftMode::Reinsert } else { SlotShiftMode::Merge };
        let map = llh::shift_map(k, from, to, mode);
        let s: Vec<u32> = t.raw().iter().map(|&x| map[x as usize] as u32).collect();
        assert_eq!(table.relabel_delta(&map), naive_penalized(&p, &s) - base);
    }
}

#[test]
fn kempe_chains_keep_timetables_feasible() {
    let p = Problem::new(synthetic_instance("roomy", SyntheticSpec { slots: 30, ..SyntheticSpec::small() }, 11));
    let mut rng = SolverRng::seed_from_u64(6);
    let empty = Timetable::empty(p.num_exams(), p.num_slots());
    let t = (0..100)
        .map(|_| saturation_construct(&p, SatRule::Min, &empty, &mut rng))
        .find(|t| p.evaluate(t).unwrap().is_feasible())
        .expect("a feasible start within 100 samples");
    let mut table = MoveCostTable::new(&p, &t).unwrap();
    for _ in 0..10_000 {
        let d = llh::llh3(&mut table, &mut rng).unwrap();
        assert_eq!(table.cost().conflict_weight, 0);
        let _ = d;
    }
    let (prox, clash) = naive_cost(p.instance(), table.slots());
    assert_eq!((clash, prox), (0, table.cost().proximity_raw));
}

#[test]
fn kempe_chain_is_closed() {
    // every neighbour of a chain member sitting in either slot is in the chain
    let p = stand_in();
    let mut rng = SolverRng::seed_from_u64(7);
    for _ in 0..100 {
        let t = random_timetable(p.num_exams(), p.num_slots(), &mut rng);
        let mut table = MoveCostTable::new(&p, &t).unwrap();
        let e = rng.gen_range(0..p.num_exams());
        let other = (t.slot(e).unwrap() + 1) % p.num_slots();
        let chain = llh::kempe_chain(&mut table, e, other);
        let home = t.slot(e).unwrap();
        for &c in &chain {
            for (j, _) in p.graph().neighbors(c) {
                let sj = t.slot(j).unwrap();
                if sj == home || sj == other {
                    assert!(chain.contains(&j));
                }
            }
        }
    }
}

/// List scheduling from the definition: exams by decreasing key, each into
/// the first slot none of its co-enrolled exams occupies.
fn decode_oracle(inst: &Instance, keys: &[f64]) -> Vec<Option<u32>> {
    let m = keys.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| keys[b].partial_cmp(&keys[a]).unwrap().then(a.cmp(&b)));
    let mut slot: Vec<Option<u32>> = vec![None; m];
    for e in order {
        let blocked = |t: u32| {
            inst.students().iter().any(|s| {
                s.contains(&(e as u32)) && s.iter().any(|&o| o as usize != e && slot[o as usize] == Some(t))
            })
        };
        slot[e] = (0..inst.num_slots() as u32).find(|&t| !blocked(t));
    }
    slot
}

#[test]
fn decode_matches_list_scheduling_oracle() {
    let toy = Problem::new(toy_instance());
    let tight = Problem::new(toy_instance().with_slots(2).unwrap());
    let mut rng = SolverRng::seed_from_u64(9);
    for p in [&toy, &tight] {
        for _ in 0..200 {
            let c = PriorityChromosome::random(4, &mut rng);
            let t = decode(p, &c, &mut rng);
            assert!(t.is_complete());
            for (e, s) in decode_oracle(p.instance(), c.keys()).into_iter().enumerate() {
                if let Some(s) = s {
                    assert_eq!(t.slot(e), Some(s as usize));
                }
            }
        }
    }
}

#[test]
fn reencoding_keeps_feasible_toy_timetables_feasible() {
    let p = Problem::new(toy_instance());
    let mut rng = SolverRng::seed_from_u64(10);
    for slots in all_assignments(4, 3) {
        let t = Timetable::from_slots(slots, 3).unwrap();
        let again = decode(&p, &encode(&t), &mut rng);
        assert!(again.is_complete());
        if p.evaluate(&t).unwrap().is_feasible() {
            assert!(p.evaluate(&again).unwrap().is_feasible());
            // exams never move to a later slot
            for e in 0..4 {
                assert!(again.slot(e) <= t.slot(e));
            }
        }
    }
}

#[test]
fn conflict_free_encode_decode_round_trip() {
    let p = Problem::new(Instance::parse_stu("free", "1\n2\n3\n", 4).unwrap());
    let t = Timetable::from_slots(vec![0, 0, 0], 4).unwrap();
    let mut rng = SolverRng::seed_from_u64(0);
    assert_eq!(decode(&p, &encode(&t), &mut rng), t);
    let c = PriorityChromosome::random(3, &mut rng);
    assert_eq!(decode(&p, &c, &mut rng), t);
}

#[test]
fn sathgpx_offspring_hold_every_exam_once() {
    let toy = Problem::new(toy_instance());
    let stand = stand_in();
    let mut rng = SolverRng::seed_from_u64(12);
    for p in [&toy, &stand] {
        let (m, k) = (p.num_exams(), p.num_slots());
        for _ in 0..1000 {
            let a = random_timetable(m, k, &mut rng);
            let b = random_timetable(m, k, &mut rng);
            let r = rng.gen::<f64>();
            let keep = rng.gen_bool(0.5);
            let rule = if rng.gen_bool(0.5) { SatRule::Min } else { SatRule::Dist };
            let child = sathgpx(p, &a, &b, r, rule, keep, &mut rng);
            let mut count = vec![0; m];
            for set in child.partition() {
                for e in set {
                    count[e as usize] += 1;
                }
            }
            assert!(count.iter().all(|&c| c == 1));
        }
    }
}

#[test]
fn sathgpx_on_identical_conflict_free_parents_keeps_set_sizes() {
    let p = Problem::new(Instance::parse_stu("free", "1\n2\n3\n4\n5\n6\n7\n", 4).unwrap());
    let mut rng = SolverRng::seed_from_u64(13);
    for _ in 0..100 {
        let a = random_timetable(7, 4, &mut rng);
        let child = sathgpx(&p, &a, &a, 1.0, SatRule::Min, false, &mut rng);
        let mut want: Vec<usize> = a.partition().iter().map(Vec::len).collect();
        let mut got: Vec<usize> = child.partition().iter().map(Vec::len).collect();
        want.sort();
        got.sort();
        assert_eq!(got, want);
    }
}

#[test]
fn sathucx_keys_come_from_parents() {
    let toy = Problem::new(toy_instance());
    let stand = stand_in();
    let mut rng = SolverRng::seed_from_u64(14);
    for p in [&toy, &stand] {
        let m = p.num_exams();
        for _ in 0..1000 {
            let a = PriorityChromosome::random(m, &mut rng);
            let b = PriorityChromosome::random(m, &mut rng);
            let c = sathucx(p, &a, &b, 1.0, 0.6, SatRule::Min, &mut rng);
            for e in 0..m {
                assert!(c.keys()[e] == a.keys()[e] || c.keys()[e] == b.keys()[e]);
            }
        }
        let a = PriorityChromosome::random(m, &mut rng);
        let b = PriorityChromosome::random(m, &mut rng);
        assert_eq!(sathucx(p, &a, &b, 1.0, 1.0, SatRule::Min, &mut rng), a);
    }
}

#[test]
fn sathucx_with_partial_transfer_is_complete() {
    let p = stand_in();
    let mut rng = SolverRng::seed_from_u64(15);
    for _ in 0..1000 {
        let a = PriorityChromosome::random(p.num_exams(), &mut rng);
        let b = PriorityChromosome::random(p.num_exams(), &mut rng);
        let r = rng.gen::<f64>();
        let c = sathucx(&p, &a, &b, r, 0.8, SatRule::Dist, &mut rng);
        assert!(c.keys().iter().all(|k| (0.0..=1.0).contains(k)));
        let t = decode(&p, &c, &mut rng);
        assert_eq!(t.assigned_count(), p.num_exams());
    }
}

/// Exact two-sided p-value by enumerating every split of the pooled sample.
fn exact_mann_whitney(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let n = pooled.len();
    let n1 = xs.len();
    let u_of = |mask: u32| {
        let mut u = 0.0;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                for j in 0..n {
                    if mask >> j & 1 == 0 {
                        u += if pooled[i] > pooled[j] {
                            1.0
                        } else if pooled[i] == pooled[j] {
                            0.5
                        } else {
                            0.0
                        };
                    }
                }
            }
        }
        u
    };
    let observed = u_of((1u32 << n1) - 1);
    let centre = (n1 * (n - n1)) as f64 / 2.0;
    let (mut extreme, mut total) = (0u32, 0u32);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == n1 {
            total += 1;
            if (u_of(mask) - centre).abs() >= (observed - centre).abs() - 1e-12 {
                extreme += 1;
            }
        }
    }
    (observed, extreme as f64 / total as f64)
}

#[test]
fn mann_whitney_matches_exact_enumeration() {
    let cases: [(&[f64], &[f64]); 4] = [
        (&[1.0, 3.0, 5.0, 7.0], &[2.0, 4.0, 6.0, 8.0]),
        (&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]),
        (&[1.0, 2.0, 2.0, 9.0], &[2.0, 3.0, 4.0, 5.0]),
        (&[10.0, 11.0, 12.0, 13.0, 3.0], &[1.0, 2.0, 4.0, 5.0]),
    ];
    for (xs, ys) in cases {
        let (u, p) = exact_mann_whitney(xs, ys);
        let r = mann_whitney_u(xs, ys).unwrap();
        assert_eq!(r.u, u);
        assert_eq!(r.significant(0.05), p < 0.05, "{xs:?} {ys:?}: {} vs exact {p}", r.p);
    }
    // the normal approximation is close to the exact value on the tie-free case
    let (xs, ys) = cases[0];
    let (_, exact) = exact_mann_whitney(xs, ys);
    let r = mann_whitney_u(xs, ys).unwrap();
    assert_eq!(r.u, 6.0);
    assert!((r.p - exact).abs() < 0.05, "{} vs exact {exact}", r.p);
}
