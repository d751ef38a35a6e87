use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use examtt::report::read_results;
use examtt::testkit::{synthetic_instance, to_stu, SyntheticSpec};
use tempfile::TempDir;

fn exe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_examtt"))
}

fn toy_path() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/toy.stu").to_string()
}

/// Writes a 40-exam synthetic instance and returns its path.
fn synthetic(dir: &Path) -> String {
    let spec = SyntheticSpec { exams: 40, students: 300, slots: 20, max_load: 4, skew: 0.8 };
    let path = dir.join("syn.stu");
    fs::write(&path, to_stu(&synthetic_instance("syn", spec, 4))).unwrap();
    path.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["examtt"];
    full.extend_from_slice(args);
    examtt_cli::run(full)
}

fn out(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let code = |args: &[&str]| exe().args(args).output().unwrap().status.code().unwrap();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["solve", "--bogus"]), 1);
    assert_eq!(code(&["solve", "--instance", &toy_path(), "--algo", "parhga", "--r", "2"]), 1);
    assert_eq!(code(&["solve", "--instance", &toy_path(), "--algo", "parhga", "--time", "0"]), 1);
    let missing = ["solve", "--data-dir", dir.path().to_str().unwrap(), "--instance", "car-f-92", "--algo", "parhga"];
    assert_eq!(code(&missing), 2);
    assert_eq!(code(&["solve", "--instance", "no-such-instance", "--algo", "parhga", "--slots", "3"]), 2);
    let unwritable = ["solve", "--instance", &toy_path(), "--algo", "multls", "--time", "0.01", "--out", "/nonexistent/x.csv"];
    assert_eq!(code(&unwritable), 3);
    let ok = ["solve", "--instance", &toy_path(), "--algo", "multls", "--time", "0.01", "--out"];
    let target = out(&dir, "ok.csv");
    let mut args = ok.to_vec();
    args.push(target.to_str().unwrap());
    assert_eq!(code(&args), 0);
}

#[test]
fn solve_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let inst = synthetic(dir.path());
    let go = |tag: &str| {
        let res = out(&dir, &format!("{tag}.csv"));
        let trace = out(&dir, &format!("{tag}.trace.csv"));
        let sol = out(&dir, &format!("{tag}.sol"));
        let code = run(&[
            "solve", "--slots", "20", "--instance", &inst, "--algo", "prihga", "--pop", "10", "--time", "0.3", "--seed", "9",
            "--out", res.to_str().unwrap(), "--trace", trace.to_str().unwrap(), "--solution", sol.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        (fs::read(res).unwrap(), fs::read(trace).unwrap(), fs::read_to_string(sol).unwrap())
    };
    let a = go("a");
    assert_eq!(a, go("b"));
    let lines: Vec<&str> = a.2.lines().collect();
    assert_eq!(lines.len(), 40);
    for (i, l) in lines.iter().enumerate() {
        let mut it = l.split(' ').map(|x| x.parse::<usize>().unwrap());
        assert_eq!(it.next(), Some(i + 1));
        assert!((1..=20).contains(&it.next().unwrap()));
    }
}

#[test]
fn bench_output_is_independent_of_jobs() {
    let dir = TempDir::new().unwrap();
    let inst = synthetic(dir.path());
    let slots = out(&dir, "slots.toml");
    fs::write(&slots, "syn = 20\n").unwrap();
    let go = |jobs: &str| {
        let res = out(&dir, &format!("bench{jobs}.csv"));
        let code = run(&[
            "bench", "--slots-file", slots.to_str().unwrap(), "--instance", &format!("{inst},{}", toy_path()), "--algo", "multls,parhga,pure-prihga",
            "--runs", "3", "--pop", "6", "--time", "0.05", "--jobs", jobs, "--seed", "5", "--out", res.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        fs::read(res).unwrap()
    };
    let one = go("1");
    assert_eq!(one, go("2"));
    let rows = read_results(one.as_slice()).unwrap();
    assert_eq!(rows.len(), 2 * 3 * 3);
    let mut seeds: Vec<u64> = rows.iter().map(|r| r.seed).collect();
    seeds.sort();
    seeds.dedup();
    assert_eq!(seeds.len(), rows.len());
    for r in rows.iter().filter(|r| r.instance == "syn") {
        assert!(r.rpd.is_none());
        assert!(r.wall_seconds >= 0.05);
    }
}

fn count_rows(path: &Path) -> usize {
    csv::Reader::from_path(path).unwrap().records().count()
}

#[test]
fn calibrate_covers_the_full_grid() {
    let dir = TempDir::new().unwrap();
    for (algo, cells) in [("parhga", 96), ("prihga", 72)] {
        let res = out(&dir, &format!("{algo}.csv"));
        let code = run(&[
            "calibrate", "--instance", &toy_path(), "--algo", algo, "--time", "1", "--max-generations", "1",
            "--out", res.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert_eq!(count_rows(&res), cells);
    }
    let res = out(&dir, "small.csv");
    let code = run(&[
        "calibrate", "--instance", &toy_path(), "--algo", "prihga", "--runs", "2", "--pop-levels", "10",
        "--r-levels", "1,0.5", "--selmig-levels", "0.2", "--p-elit-levels", "0.6,0.8", "--time", "1",
        "--max-generations", "2", "--out", res.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_path(&res).unwrap();
    let header = rdr.headers().unwrap().clone();
    assert_eq!(header.iter().collect::<Vec<_>>(), examtt_cli::CALIBRATE_HEADER);
    let recs: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(recs.len(), 2 * 2 * 2);
    for r in &recs {
        assert_eq!(&r[8], &r[9], "selection and migration fractions are paired");
        assert_eq!(&r[12], "2");
    }
}

#[test]
fn construct_reports_each_run() {
    let dir = TempDir::new().unwrap();
    let inst = synthetic(dir.path());
    let res = out(&dir, "c.csv");
    let code = run(&[
        "construct", "--slots", "20", "--instance", &inst, "--samples", "5", "--runs", "4", "--seed", "1", "--out", res.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_path(&res).unwrap();
    let recs: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(recs.len(), 8);
    let mut feasible_runs = 0;
    for r in &recs {
        assert_eq!(&r[3], "5");
        let feasible: usize = r[4].parse().unwrap();
        assert!(feasible <= 5);
        assert_eq!(feasible == 0, r[5].is_empty());
        if feasible > 0 {
            feasible_runs += 1;
            assert!(r[5].parse::<f64>().unwrap() > 0.0);
        }
    }
    assert!(feasible_runs > 0);
}

#[test]
fn compare_flags_a_clear_winner() {
    let dir = TempDir::new().unwrap();
    let header = "instance,algorithm,seed,wall_seconds,generations,best_cost,feasible,rpd\n";
    let file = |name: &str, vals: &[f64]| {
        let mut s = header.to_string();
        for (i, v) in vals.iter().enumerate() {
            s.push_str(&format!("x,alg,{i},1.0,1,{v},true,\n"));
        }
        s.push_str("y,alg,0,1.0,1,1.0,true,\n");
        let p = out(&dir, name);
        fs::write(&p, s).unwrap();
        p
    };
    let a = file("a.csv", &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    let b = file("b.csv", &[11.0, 12.0, 13.0, 14.0, 15.0, 16.0]);
    let res = out(&dir, "cmp.csv");
    let code = run(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--out", res.to_str().unwrap()]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_path(&res).unwrap();
    let recs: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(recs.len(), 2);
    assert_eq!(&recs[0][0], "x");
    assert_eq!(recs[0][5].parse::<f64>().unwrap(), 0.0);
    assert_eq!(&recs[0][7], "true");
    assert_eq!(&recs[0][8], "a");
    // one value per side: no test
    assert_eq!(&recs[1][0], "y");
    assert!(recs[1][6].is_empty());

    let missing = out(&dir, "missing.csv");
    assert_eq!(run(&["compare", a.to_str().unwrap(), missing.to_str().unwrap()]), 2);
}
