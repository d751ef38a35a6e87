//! Command-line harness for the `examtt` solvers.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.

pub mod cli;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::Parser;
use rayon::prelude::*;

use examtt::report::{self, BestKnownTable, ResultRow};
use examtt::rng::{derive_seed, name_key, stream};
use examtt::toronto::{load_instance, SlotTable};
use examtt::{
    multls_run, parhga_run, prihga_run, pure_ga_run, sample_constructor, Budget, Error, HhlsParams,
    Instance, LsMode, MultlsConfig, ParhgaConfig, PrihgaConfig, Problem, PureGa, RunResult, SatRule,
};

use cli::{Algo, BudgetArgs, Cli, Command, DataArgs, GaAlgo, Overrides};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_USAGE, error: error.into() }
    }

    fn data(error: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_DATA, error: error.into() }
    }

    fn runtime(error: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_RUNTIME, error: error.into() }
    }

    /// Invalid parameters are usage errors; anything else failed at run time.
    fn from_run(error: Error) -> Self {
        match error {
            Error::Config(_) => Self::usage(error),
            other => Self::runtime(other),
        }
    }
}

type CmdResult<T = ()> = Result<T, Failure>;

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            f.code
        }
    }
}

fn dispatch(command: Command) -> CmdResult {
    match command {
        Command::Construct(a) => construct(a),
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Compare(a) => compare(a),
    }
}

/// Instance metadata and data location shared by the subcommands.
pub struct DataSource {
    dir: PathBuf,
    slots: SlotTable,
    override_k: Option<usize>,
    best_known: BestKnownTable,
}

impl DataSource {
    pub fn from_args(args: &DataArgs) -> CmdResult<Self> {
        let slots = match &args.slots_file {
            Some(p) => SlotTable::with_overrides(p).map_err(Failure::data)?,
            None => SlotTable::default(),
        };
        let best_known = match &args.best_known {
            Some(p) => BestKnownTable::with_overrides(p).map_err(Failure::data)?,
            None => BestKnownTable::default(),
        };
        if args.slots == Some(0) {
            return Err(Failure::usage(anyhow!("--slots must be positive")));
        }
        Ok(Self {
            dir: args.data_dir.clone(),
            slots,
            override_k: args.slots,
            best_known,
        })
    }

    pub fn best_known(&self) -> &BestKnownTable {
        &self.best_known
    }

    /// Loads an instance by name from the data directory, or from a path
    /// ending in `.stu` (named after the file stem).
    pub fn load(&self, name: &str) -> CmdResult<Problem> {
        let instance = if name.ends_with(".stu") {
            let path = Path::new(name);
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or(name)
                .to_ascii_lowercase();
            let k = self
                .override_k
                .or_else(|| self.slots.get(&stem))
                .ok_or_else(|| Failure::data(Error::MissingSlots(stem.clone())))?;
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(Failure::data)?;
            Instance::parse_stu(stem, &text, k).map_err(Failure::data)?
        } else {
            load_instance(&self.dir, name, &self.slots, self.override_k)
                .map_err(Failure::data)?
                .instance
        };
        Ok(Problem::new(instance))
    }
}

fn open_out(path: Option<&Path>) -> CmdResult<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
        Some(p) => {
            let f = File::create(p)
                .with_context(|| format!("cannot write {}", p.display()))
                .map_err(Failure::runtime)?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn budget(args: &BudgetArgs) -> CmdResult<Budget> {
    let mut b = Budget::seconds(args.time).with_clock(args.clock.into());
    if let Some(g) = args.max_generations {
        b = b.with_max_generations(g);
    }
    b.validate().map_err(Failure::usage)?;
    Ok(b)
}

fn hhls_params(o: &Overrides) -> HhlsParams {
    let d = HhlsParams::default();
    let iteration_limit = o.hhls_iters.unwrap_or(d.iteration_limit);
    HhlsParams {
        iteration_limit,
        stall_limit: o.hhls_stall.unwrap_or(d.stall_limit.min(iteration_limit)),
        ..d
    }
}

pub fn parhga_config(o: &Overrides, budget: Budget, seed: u64) -> ParhgaConfig {
    let d = ParhgaConfig::default();
    ParhgaConfig {
        population: o.pop.unwrap_or(d.population),
        r: o.r.unwrap_or(d.r),
        init_rule: o.init_rule.map(SatRule::from).unwrap_or(d.init_rule),
        heuristic_fraction: o.heuristic_fraction.unwrap_or(d.heuristic_fraction),
        ls: o.ls.map(LsMode::from).unwrap_or(d.ls),
        init_ls: o.init_ls.map(LsMode::from).unwrap_or(d.init_ls),
        completion_rule: o.completion.map(SatRule::from).unwrap_or(d.completion_rule),
        preserve_source_slot: o.preserve_source_slot,
        offspring_ls: true,
        hhls: hhls_params(o),
        budget,
        seed,
    }
}

pub fn prihga_config(o: &Overrides, budget: Budget, seed: u64) -> PrihgaConfig {
    let d = PrihgaConfig::default();
    PrihgaConfig {
        population: o.pop.unwrap_or(d.population),
        sel_frac: o.sel_frac.unwrap_or(d.sel_frac),
        mig_frac: o.mig_frac.unwrap_or(d.mig_frac),
        p_elit: o.p_elit.unwrap_or(d.p_elit),
        r: o.r.unwrap_or(d.r),
        init_rule: o.init_rule.map(SatRule::from).unwrap_or(d.init_rule),
        init_ls: o.init_ls.map(LsMode::from).unwrap_or(d.init_ls),
        ls: o.ls.map(LsMode::from).unwrap_or(d.ls),
        completion_rule: o.completion.map(SatRule::from).unwrap_or(d.completion_rule),
        lamarckian: !o.baldwinian,
        offspring_ls: true,
        parallel: o.parallel,
        hhls: hhls_params(o),
        budget,
        seed,
    }
}

pub fn multls_config(o: &Overrides, budget: Budget, seed: u64) -> MultlsConfig {
    let d = MultlsConfig::default();
    MultlsConfig {
        constructor: o.init_rule.map(SatRule::from).unwrap_or(d.constructor),
        ls: o.ls.map(LsMode::from).unwrap_or(d.ls),
        hhls: hhls_params(o),
        budget,
        seed,
    }
}

/// Runs `algo` with the calibrated defaults adjusted by `overrides`.
pub fn run_algorithm(
    problem: &Problem,
    algo: Algo,
    overrides: &Overrides,
    budget: Budget,
    seed: u64,
) -> examtt::Result<RunResult> {
    match algo {
        Algo::Parhga => parhga_run(problem, &parhga_config(overrides, budget, seed)),
        Algo::Prihga => prihga_run(problem, &prihga_config(overrides, budget, seed)),
        Algo::Multls => multls_run(problem, &multls_config(overrides, budget, seed)),
        Algo::PureParhga => pure_ga_run(problem, PureGa::Parhga(parhga_config(overrides, budget, seed))),
        Algo::PurePrihga => pure_ga_run(problem, PureGa::Prihga(prihga_config(overrides, budget, seed))),
    }
}

/// Seed of run `run` of `algo` on `instance` under a master seed.
pub fn cell_seed(master: u64, instance: &str, algo: &str, run: u64) -> u64 {
    derive_seed(master, &[name_key(instance), name_key(algo), run])
}

fn thread_pool(jobs: usize) -> CmdResult<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(Failure::usage(anyhow!("--jobs must be positive")));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(Failure::runtime)
}

fn write_rows(out: Option<&Path>, rows: &[ResultRow]) -> CmdResult {
    let w = open_out(out)?;
    report::write_results(w, rows).map_err(Failure::runtime)
}

fn write_traces(path: Option<&Path>, results: &[RunResult]) -> CmdResult {
    if let Some(p) = path {
        let w = open_out(Some(p))?;
        report::write_traces(w, results).map_err(Failure::runtime)?;
    }
    Ok(())
}

fn solve(args: cli::SolveArgs) -> CmdResult {
    let data = DataSource::from_args(&args.data)?;
    let budget = budget(&args.budget)?;
    let problem = data.load(&args.instance)?;
    let result = run_algorithm(&problem, args.algo, &args.overrides, budget, args.seed)
        .map_err(Failure::from_run)?;
    eprintln!(
        "{} {} seed {}: best {:.6} ({}), {} generations, {:.3} s",
        result.instance,
        result.algorithm,
        result.seed,
        result.best_proximity(),
        if result.feasible() { "feasible" } else { "infeasible" },
        result.generations,
        result.elapsed
    );
    let row = ResultRow::from_result(&result, data.best_known());
    write_rows(args.out.as_deref(), &[row])?;
    write_traces(args.trace.as_deref(), std::slice::from_ref(&result))?;
    if let Some(p) = &args.solution {
        let mut w = open_out(Some(p))?;
        let body: String = (0..result.best.num_exams())
            .map(|e| format!("{} {}\n", e + 1, result.best.slot(e).map_or(0, |s| s + 1)))
            .collect();
        w.write_all(body.as_bytes())
            .and_then(|_| w.flush())
            .map_err(Failure::runtime)?;
    }
    Ok(())
}

fn bench(args: cli::BenchArgs) -> CmdResult {
    let data = DataSource::from_args(&args.data)?;
    let budget = budget(&args.budget)?;
    let pool = thread_pool(args.jobs)?;
    let mut problems = BTreeMap::new();
    for name in &args.instance {
        let p = data.load(name)?;
        problems.insert(p.name().to_string(), p);
    }
    let mut algos = args.algo.clone();
    algos.sort();
    algos.dedup();
    // cells in sorted order; the output follows it whatever the completion order
    let cells: Vec<(&str, Algo, u64)> = problems
        .keys()
        .flat_map(|inst| {
            algos
                .iter()
                .flat_map(move |&a| (0..args.runs).map(move |r| (inst.as_str(), a, r)))
        })
        .collect();
    let results: Vec<examtt::Result<RunResult>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(inst, algo, run)| {
                let seed = cell_seed(args.seed, inst, algo.name(), run);
                let r = run_algorithm(&problems[inst], algo, &args.overrides, budget, seed);
                if let Ok(r) = &r {
                    eprintln!("{inst} {} run {run}: best {:.6}", algo.name(), r.best_proximity());
                }
                r
            })
            .collect()
    });
    let results: Vec<RunResult> = results
        .into_iter()
        .collect::<examtt::Result<_>>()
        .map_err(Failure::from_run)?;
    let rows: Vec<ResultRow> = results
        .iter()
        .map(|r| ResultRow::from_result(r, data.best_known()))
        .collect();
    write_rows(args.out.as_deref(), &rows)?;
    write_traces(args.trace.as_deref(), &results)
}

/// One cell of a calibration grid.
#[derive(Debug, Clone)]
pub struct GridCell {
    pub pop: usize,
    pub r: f64,
    pub ls: LsMode,
    pub heuristic_fraction: f64,
    pub init_rule: SatRule,
    pub selmig: Option<f64>,
    pub p_elit: Option<f64>,
}

/// Full factorial grid over the factor levels of `algo`.
pub fn calibration_grid(args: &cli::CalibrateArgs) -> Vec<GridCell> {
    let mut cells = Vec::new();
    for &pop in &args.pop_levels {
        for &r in &args.r_levels {
            match args.algo {
                GaAlgo::Parhga => {
                    for &ls in &args.ls_levels {
                        for &h in &args.heuristic_levels {
                            for &init in &args.init_levels {
                                cells.push(GridCell {
                                    pop,
                                    r,
                                    ls: ls.into(),
                                    heuristic_fraction: h,
                                    init_rule: init.into(),
                                    selmig: None,
                                    p_elit: None,
                                });
                            }
                        }
                    }
                }
                GaAlgo::Prihga => {
                    for &sm in &args.selmig_levels {
                        for &pe in &args.p_elit_levels {
                            cells.push(GridCell {
                                pop,
                                r,
                                ls: LsMode::VdlsHhls,
                                heuristic_fraction: 1.0,
                                init_rule: SatRule::Min,
                                selmig: Some(sm),
                                p_elit: Some(pe),
                            });
                        }
                    }
                }
            }
        }
    }
    cells
}

pub const CALIBRATE_HEADER: [&str; 16] = [
    "instance",
    "algorithm",
    "seed",
    "pop",
    "r",
    "ls",
    "heuristic_fraction",
    "init_rule",
    "sel_frac",
    "mig_frac",
    "p_elit",
    "wall_seconds",
    "generations",
    "best_cost",
    "feasible",
    "rpd",
];

fn calibrate(args: cli::CalibrateArgs) -> CmdResult {
    let data = DataSource::from_args(&args.data)?;
    let budget = budget(&args.budget)?;
    let pool = thread_pool(args.jobs)?;
    let grid = calibration_grid(&args);
    let algo = match args.algo {
        GaAlgo::Parhga => Algo::Parhga,
        GaAlgo::Prihga => Algo::Prihga,
    };
    let mut problems = BTreeMap::new();
    for name in &args.instance {
        let p = data.load(name)?;
        problems.insert(p.name().to_string(), p);
    }
    let mut jobs = Vec::new();
    for inst in problems.keys() {
        for run in 0..args.runs {
            // the same seed for every cell of a run: common random numbers
            let seed = cell_seed(args.seed, inst, algo.name(), run);
            for cell in &grid {
                jobs.push((inst.as_str(), seed, cell));
            }
        }
    }
    let results: Vec<examtt::Result<RunResult>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(inst, seed, cell)| {
                let p = &problems[inst];
                match algo {
                    Algo::Parhga => {
                        let cfg = ParhgaConfig {
                            population: cell.pop,
                            r: cell.r,
                            ls: cell.ls,
                            heuristic_fraction: cell.heuristic_fraction,
                            init_rule: cell.init_rule,
                            budget,
                            seed,
                            ..ParhgaConfig::default()
                        };
                        parhga_run(p, &cfg)
                    }
                    _ => {
                        let sm = cell.selmig.expect("prihga cell");
                        let cfg = PrihgaConfig {
                            population: cell.pop,
                            r: cell.r,
                            sel_frac: sm,
                            mig_frac: sm,
                            p_elit: cell.p_elit.expect("prihga cell"),
                            budget,
                            seed,
                            ..PrihgaConfig::default()
                        };
                        prihga_run(p, &cfg)
                    }
                }
            })
            .collect()
    });
    let mut w = csv::Writer::from_writer(open_out(args.out.as_deref())?);
    let werr = |e: csv::Error| Failure::runtime(e);
    w.write_record(CALIBRATE_HEADER).map_err(werr)?;
    for ((inst, seed, cell), res) in jobs.iter().zip(results) {
        let r = res.map_err(Failure::from_run)?;
        let row = ResultRow::from_result(&r, data.best_known());
        let opt = |v: Option<f64>| v.map(report::fmt_float).unwrap_or_default();
        w.write_record([
            inst.to_string(),
            algo.name().to_string(),
            seed.to_string(),
            cell.pop.to_string(),
            report::fmt_float(cell.r),
            cell.ls.to_string(),
            report::fmt_float(cell.heuristic_fraction),
            cell.init_rule.to_string(),
            opt(cell.selmig),
            opt(cell.selmig),
            opt(cell.p_elit),
            report::fmt_float(row.wall_seconds),
            row.generations.to_string(),
            report::fmt_float(row.best_cost),
            row.feasible.to_string(),
            opt(row.rpd),
        ])
        .map_err(werr)?;
    }
    w.flush().map_err(Failure::runtime)
}

pub const CONSTRUCT_HEADER: [&str; 6] = ["instance", "rule", "run", "samples", "feasible", "best_cost"];

fn construct(args: cli::ConstructArgs) -> CmdResult {
    let data = DataSource::from_args(&args.data)?;
    if args.samples == 0 || args.runs == 0 {
        return Err(Failure::usage(anyhow!("--samples and --runs must be positive")));
    }
    let rules: Vec<SatRule> = if args.rule.is_empty() {
        vec![SatRule::Min, SatRule::Dist]
    } else {
        args.rule.iter().map(|&r| r.into()).collect()
    };
    let mut w = csv::Writer::from_writer(open_out(args.out.as_deref())?);
    w.write_record(CONSTRUCT_HEADER).map_err(Failure::runtime)?;
    for name in &args.instance {
        let problem = data.load(name)?;
        for &rule in &rules {
            let mut bests = Vec::new();
            let mut feasible = Vec::new();
            for run in 0..args.runs {
                let mut rng = stream(
                    args.seed,
                    &[name_key(problem.name()), name_key(rule.as_str()), run as u64],
                );
                let s = sample_constructor(&problem, rule, args.samples, &mut rng)
                    .map_err(Failure::runtime)?;
                w.write_record([
                    problem.name().to_string(),
                    rule.to_string(),
                    run.to_string(),
                    s.samples.to_string(),
                    s.feasible.to_string(),
                    s.best_feasible.map(report::fmt_float).unwrap_or_default(),
                ])
                .map_err(Failure::runtime)?;
                bests.extend(s.best_feasible);
                feasible.push(s.feasible as f64);
            }
            let mean_best = if bests.is_empty() {
                "none".to_string()
            } else {
                format!("{:.2}", examtt::stats::mean(&bests))
            };
            eprintln!(
                "{} sat-{}: mean best {mean_best}, mean feasible {:.2}, runs without a feasible sample {}",
                problem.name(),
                rule,
                examtt::stats::mean(&feasible),
                args.runs - bests.len()
            );
        }
    }
    w.flush().map_err(Failure::runtime)
}

fn compare(args: cli::CompareArgs) -> CmdResult {
    let read = |p: &Path| -> CmdResult<BTreeMap<String, Vec<f64>>> {
        let f = File::open(p)
            .with_context(|| format!("cannot read {}", p.display()))
            .map_err(Failure::data)?;
        report::read_metric(f, &args.column)
            .with_context(|| p.display().to_string())
            .map_err(Failure::data)
    };
    let a = read(&args.a)?;
    let b = read(&args.b)?;
    let rows = report::compare(&a, &b);
    if rows.is_empty() {
        return Err(Failure::data(anyhow!("the two files share no instance")));
    }
    for c in &rows {
        match (c.test, c.winner(args.alpha)) {
            (None, _) => eprintln!("{}: too few values to test", c.instance),
            (Some(t), None) => eprintln!("{}: no significant difference (p = {:.4})", c.instance, t.p),
            (Some(t), Some(wn)) => eprintln!(
                "{}: {} is significantly better (p = {:.4})",
                c.instance,
                if wn == "a" { args.a.display() } else { args.b.display() },
                t.p
            ),
        }
    }
    let w = open_out(args.out.as_deref())?;
    report::write_comparisons(w, &rows, args.alpha).map_err(Failure::runtime)
}
