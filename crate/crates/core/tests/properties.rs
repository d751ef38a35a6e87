use examtt::local_search::llh;
use examtt::rng::SolverRng;
use examtt::*;
use proptest::prelude::*;
use rand::SeedableRng;

/// Random small instance (as `.stu` text) with its slot count.
fn instance_text() -> impl Strategy<Value = (String, usize, usize)> {
    (2usize..12, 2usize..9).prop_flat_map(|(m, k)| {
        let student = proptest::collection::btree_set(1..=m as u32, 1..=m.min(4));
        proptest::collection::vec(student, 1..25).prop_map(move |students| {
            let mut text = String::new();
            // make sure the highest exam index appears
            text.push_str(&format!("{m}\n"));
            for s in students {
                let line: Vec<String> = s.iter().map(u32::to_string).collect();
                text.push_str(&line.join(" "));
                text.push('\n');
            }
            (text, m, k)
        })
    })
}

fn problem_and_timetable() -> impl Strategy<Value = (Problem, Timetable)> {
    instance_text().prop_flat_map(|(text, m, k)| {
        proptest::collection::vec(0..k as u32, m).prop_map(move |slots| {
            let p = Problem::new(Instance::parse_stu("p", &text, k).unwrap());
            (p, Timetable::from_slots(slots, k).unwrap())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reflection_preserves_cost((p, t) in problem_and_timetable()) {
        prop_assert_eq!(p.evaluate(&t).unwrap(), p.evaluate(&t.reflected()).unwrap());
    }

    #[test]
    fn relabelling_exams_preserves_cost((p, t) in problem_and_timetable(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let m = p.num_exams();
        let mut perm: Vec<u32> = (0..m as u32).collect();
        perm.shuffle(&mut SolverRng::seed_from_u64(seed));
        let mut text = String::new();
        for s in p.instance().students() {
            let line: Vec<String> = s.iter().map(|&e| (perm[e as usize] + 1).to_string()).collect();
            text.push_str(&line.join(" "));
            text.push('\n');
        }
        let q = Problem::new(
            Instance::parse_stu("q", &text, p.num_slots()).unwrap().with_exam_count(m).unwrap(),
        );
        let mut slots = vec![0u32; m];
        for e in 0..m {
            slots[perm[e] as usize] = t.raw()[e];
        }
        let u = Timetable::from_slots(slots, p.num_slots()).unwrap();
        let (a, b) = (p.evaluate(&t).unwrap(), q.evaluate(&u).unwrap());
        prop_assert_eq!(a.proximity_raw, b.proximity_raw);
        prop_assert_eq!(a.conflict_weight, b.conflict_weight);
    }

    #[test]
    fn incremental_cost_tracks_exact_cost(
        (p, t) in problem_and_timetable(),
        moves in proptest::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 1..60),
    ) {
        let mut table = MoveCostTable::new(&p, &t).unwrap();
        for (e, s) in moves {
            let e = e.index(p.num_exams());
            let s = s.index(p.num_slots());
            let before = table.penalized_raw() as i64;
            let d = table.apply_move(e, s).unwrap();
            prop_assert_eq!(table.penalized_raw() as i64, before + d);
        }
        prop_assert_eq!(table.cost(), p.evaluate(&table.timetable()).unwrap());
        prop_assert!(table.is_consistent());
    }

    #[test]
    fn llh_moves_keep_the_table_exact((p, t) in problem_and_timetable(), seed in any::<u64>()) {
        let mut rng = SolverRng::seed_from_u64(seed);
        let mut table = MoveCostTable::new(&p, &t).unwrap();
        for i in 0..40 {
            let before = table.penalized_raw() as i64;
            let d = match i % 5 {
                0 => llh::llh1(&mut table, &mut rng),
                1 => llh::llh2(&mut table, &mut rng),
                2 => llh::llh3(&mut table, &mut rng),
                3 => llh::llh4(&mut table, SlotShiftMode::Reinsert, &mut rng),
                _ => llh::llh5(&mut table, &mut rng),
            };
            prop_assert_eq!(table.penalized_raw() as i64, before + d.unwrap_or(0));
        }
        prop_assert_eq!(table.cost(), p.evaluate(&table.timetable()).unwrap());
    }

    #[test]
    fn hhls_never_accepts_a_worse_solution((p, t) in problem_and_timetable(), seed in any::<u64>()) {
        let mut rng = SolverRng::seed_from_u64(seed);
        let mut table = MoveCostTable::new(&p, &t).unwrap();
        let start = table.penalized_raw();
        let params = HhlsParams { iteration_limit: 300, stall_limit: 100, record_trace: true, ..HhlsParams::default() };
        let report = hhls(&mut table, &params, &mut rng);
        let mut last = start;
        for r in &report.trace {
            prop_assert!(r.cost_raw <= last);
            last = r.cost_raw;
        }
        prop_assert!(report.iterations <= 300);
        prop_assert!(report.stalled || report.iterations == 300);
        prop_assert_eq!(table.cost(), p.evaluate(&table.timetable()).unwrap());
    }

    #[test]
    fn vdls_reaches_a_local_optimum((p, t) in problem_and_timetable()) {
        let mut table = MoveCostTable::new(&p, &t).unwrap();
        let start = table.penalized_raw();
        vdls(&mut table);
        prop_assert!(table.penalized_raw() <= start);
        for e in 0..p.num_exams() {
            for s in 0..p.num_slots() {
                prop_assert!(table.delta_raw(e, s) >= 0);
            }
        }
    }

    #[test]
    fn construction_respects_fixed_exams((p, t) in problem_and_timetable(), seed in any::<u64>(), dist in any::<bool>()) {
        let mut rng = SolverRng::seed_from_u64(seed);
        let mut partial = Timetable::empty(p.num_exams(), p.num_slots());
        for e in (0..p.num_exams()).step_by(2) {
            partial.assign(e, t.slot(e).unwrap()).unwrap();
        }
        let rule = if dist { SatRule::Dist } else { SatRule::Min };
        let out = saturation_construct(&p, rule, &partial, &mut rng);
        prop_assert!(out.is_complete());
        for e in (0..p.num_exams()).step_by(2) {
            prop_assert_eq!(out.slot(e), t.slot(e));
        }
    }

    #[test]
    fn decode_is_complete_for_any_keys(
        (p, _t) in problem_and_timetable(),
        raw in proptest::collection::vec(0.0f64..=1.0, 12),
        flat in any::<bool>(),
    ) {
        let m = p.num_exams();
        let keys = if flat { vec![0.5; m] } else { raw[..m].to_vec() };
        let c = PriorityChromosome::new(keys).unwrap();
        let mut rng = SolverRng::seed_from_u64(1);
        prop_assert!(decode(&p, &c, &mut rng).is_complete());
    }

    #[test]
    fn sathgpx_is_a_partition((p, a) in problem_and_timetable(), seed in any::<u64>(), r in 0.0f64..=1.0) {
        let mut rng = SolverRng::seed_from_u64(seed);
        let b = random_timetable(p.num_exams(), p.num_slots(), &mut rng);
        let child = sathgpx(&p, &a, &b, r, SatRule::Dist, false, &mut rng);
        let mut seen = vec![0; p.num_exams()];
        for set in child.partition() {
            for e in set {
                seen[e as usize] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }
}
