//! PRIHGA: generational random-key genetic algorithm.
//!
//! A chromosome holds one priority in `[0, 1]` per exam. The decoder takes
//! exams by decreasing priority and puts each into its earliest feasible
//! slot. Every generation keeps the `n_sel` best individuals, breeds
//! `n_cross` offspring with SATHUCX (one parent from the elite), improves
//! them by local search, and adds `n_mig` random migrants.

use rand::Rng;
use rayon::prelude::*;

use crate::construct::{saturation_construct, saturation_construct_ordered, SatRule};
use crate::cost::{CostBreakdown, Problem};
use crate::error::{Error, Result};
use crate::local_search::{improve_timetable, HhlsParams, LsMode};
use crate::parhga::{check_fraction, evaluation_work, fraction_count};
use crate::rng::{stream, SolverRng};
use crate::run::{record_best, Budget, Clock, Counters, RunResult, TracePoint};
use crate::timetable::Timetable;

#[derive(Debug, Clone, PartialEq)]
pub struct PriorityChromosome {
    keys: Vec<f64>,
}

impl PriorityChromosome {
    pub fn new(keys: Vec<f64>) -> Result<Self> {
        if let Some(bad) = keys.iter().find(|k| !(0.0..=1.0).contains(*k)) {
            return Err(Error::Config(format!("priority key {bad} outside [0, 1]")));
        }
        Ok(Self { keys })
    }

    pub fn random<R: Rng + ?Sized>(num_exams: usize, rng: &mut R) -> Self {
        Self {
            keys: (0..num_exams).map(|_| rng.gen::<f64>()).collect(),
        }
    }

    pub fn keys(&self) -> &[f64] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Exams by decreasing key, lower index first on ties.
    pub fn order(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.keys.len() as u32).collect();
        order.sort_by(|&a, &b| {
            self.keys[b as usize]
                .total_cmp(&self.keys[a as usize])
                .then(a.cmp(&b))
        });
        order
    }
}

/// Earliest-feasible list assignment of `order` onto `timetable`. Exams with
/// no feasible slot are skipped and returned.
fn assign_earliest(problem: &Problem, order: &[u32], timetable: &mut Timetable) -> Vec<u32> {
    let graph = problem.graph();
    let k = problem.num_slots();
    // stamp[t] == e + 1 marks slot t as blocked for exam e
    let mut stamp = vec![0u32; k];
    let mut skipped = Vec::new();
    for &e in order {
        let e = e as usize;
        for (j, _) in graph.neighbors(e) {
            if let Some(s) = timetable.slot(j) {
                stamp[s] = e as u32 + 1;
            }
        }
        match stamp.iter().position(|&s| s != e as u32 + 1) {
            Some(t) => timetable.assign(e, t).expect("slot in range"),
            None => skipped.push(e as u32),
        }
    }
    skipped
}

/// Decodes a chromosome into a complete timetable. Exams that find no
/// feasible slot get a uniformly random one at the end, in index order.
pub fn decode<R: Rng + ?Sized>(problem: &Problem, chromosome: &PriorityChromosome, rng: &mut R) -> Timetable {
    let k = problem.num_slots();
    let mut timetable = Timetable::empty(problem.num_exams(), k);
    let mut skipped = assign_earliest(problem, &chromosome.order(), &mut timetable);
    skipped.sort_unstable();
    for e in skipped {
        timetable.assign(e as usize, rng.gen_range(0..k)).expect("slot in range");
    }
    timetable
}

/// Keys `m/(m+1), (m-1)/(m+1), ...` handed out over the exams sorted by
/// (slot, index), so decoding visits exams in the timetable's slot order.
pub fn encode(timetable: &Timetable) -> PriorityChromosome {
    let m = timetable.num_exams();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&e| (timetable.slot(e).unwrap_or(usize::MAX), e));
    let mut keys = vec![0.0; m];
    for (pos, e) in order.into_iter().enumerate() {
        keys[e] = (m - pos) as f64 / (m + 1) as f64;
    }
    PriorityChromosome { keys }
}

/// SATHUCX crossover. For `floor(r*m)` rounds a biased coin picks parent `a`
/// with probability `p_elit`, else `b`; the untransmitted exam with that
/// parent's highest key inherits the key. The other exams are ordered by
/// saturation construction on top of the decoded partial offspring and get
/// evenly spaced keys below the smallest inherited key, in placement order.
pub fn sathucx<R: Rng + ?Sized>(
    problem: &Problem,
    a: &PriorityChromosome,
    b: &PriorityChromosome,
    r: f64,
    p_elit: f64,
    completion: SatRule,
    rng: &mut R,
) -> PriorityChromosome {
    let m = a.len();
    let parents = [a, b];
    let orders = [a.order(), b.order()];
    let mut cursor = [0usize; 2];
    let mut transmitted = vec![false; m];
    let mut keys = vec![0.0; m];
    let mut inherited = Vec::new();
    let rounds = fraction_count(r, m);
    for _ in 0..rounds {
        let p = if rng.gen_bool(p_elit) { 0 } else { 1 };
        while transmitted[orders[p][cursor[p]] as usize] {
            cursor[p] += 1;
        }
        let e = orders[p][cursor[p]] as usize;
        transmitted[e] = true;
        keys[e] = parents[p].keys[e];
        inherited.push(e as u32);
    }
    if rounds < m {
        let floor = inherited
            .iter()
            .map(|&e| keys[e as usize])
            .fold(1.0f64, f64::min);
        let mut partial = Timetable::empty(m, problem.num_slots());
        inherited.sort_by(|&x, &y| keys[y as usize].total_cmp(&keys[x as usize]).then(x.cmp(&y)));
        assign_earliest(problem, &inherited, &mut partial);
        let (_, placed) = saturation_construct_ordered(problem, completion, &partial, rng);
        let rest: Vec<u32> = placed.into_iter().filter(|&e| !transmitted[e as usize]).collect();
        let q = rest.len();
        for (j, e) in rest.into_iter().enumerate() {
            keys[e as usize] = floor * (q - j) as f64 / (q + 1) as f64;
        }
    }
    PriorityChromosome { keys }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrihgaConfig {
    pub population: usize,
    /// Elite share; `n_sel = round(sel_frac * n)`.
    pub sel_frac: f64,
    /// Migrant share; `n_mig = round(mig_frac * n)`.
    pub mig_frac: f64,
    /// Probability of inheriting from the elite parent.
    pub p_elit: f64,
    /// Fraction of keys inherited; the rest come from SAT completion.
    pub r: f64,
    pub init_rule: SatRule,
    pub init_ls: LsMode,
    pub ls: LsMode,
    pub completion_rule: SatRule,
    /// Write locally improved timetables back into the chromosome.
    pub lamarckian: bool,
    pub offspring_ls: bool,
    /// Breed offspring on the rayon pool. Results do not depend on it.
    pub parallel: bool,
    pub hhls: HhlsParams,
    pub budget: Budget,
    pub seed: u64,
}

impl Default for PrihgaConfig {
    fn default() -> Self {
        Self {
            population: 100,
            sel_frac: 0.1,
            mig_frac: 0.1,
            p_elit: 0.6,
            r: 1.0,
            init_rule: SatRule::Min,
            init_ls: LsMode::Vdls,
            ls: LsMode::VdlsHhls,
            completion_rule: SatRule::Min,
            lamarckian: true,
            offspring_ls: true,
            parallel: false,
            hhls: HhlsParams::default(),
            budget: Budget::seconds(60.0),
            seed: 0,
        }
    }
}

impl PrihgaConfig {
    pub fn n_sel(&self) -> usize {
        (self.sel_frac * self.population as f64).round() as usize
    }

    pub fn n_mig(&self) -> usize {
        (self.mig_frac * self.population as f64).round() as usize
    }

    pub fn n_cross(&self) -> usize {
        self.population.saturating_sub(self.n_sel() + self.n_mig())
    }

    pub fn validate(&self) -> Result<()> {
        check_fraction("selection fraction", self.sel_frac)?;
        check_fraction("migration fraction", self.mig_frac)?;
        check_fraction("r", self.r)?;
        if !(self.p_elit > 0.5 && self.p_elit <= 1.0) {
            return Err(Error::Config(format!("p_elit must lie in (0.5, 1], got {}", self.p_elit)));
        }
        if self.n_sel() < 1 {
            return Err(Error::Config("elite set is empty".into()));
        }
        if self.n_sel() + self.n_mig() >= self.population {
            return Err(Error::Config(format!(
                "population {} leaves no room for offspring",
                self.population
            )));
        }
        self.hhls.validate()?;
        self.budget.validate()
    }

    pub fn algorithm_name(&self) -> &'static str {
        if self.offspring_ls {
            "prihga"
        } else {
            "pure-prihga"
        }
    }
}

/// A chromosome with the timetable it stands for and that timetable's cost.
///
/// For offspring the timetable is the locally improved decode, so fitness
/// reflects the local search even where re-decoding the chromosome would not
/// reproduce it exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub chromosome: PriorityChromosome,
    pub timetable: Timetable,
    pub cost: CostBreakdown,
}

impl Individual {
    pub fn penalized_raw(&self) -> u64 {
        self.cost.penalized_raw()
    }
}

/// Where each member of a new generation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationReport {
    pub elites: usize,
    pub offspring: usize,
    pub migrants: usize,
    pub best_before: u64,
    pub best_after: u64,
}

struct Bred {
    individual: Individual,
    ops: u64,
    counters: Counters,
}

pub struct Prihga<'p> {
    problem: &'p Problem,
    config: PrihgaConfig,
    population: Vec<Individual>,
    clock: Clock,
    generation: u64,
    best: Individual,
    initial_best_raw: u64,
    trace: Vec<TracePoint>,
    counters: Counters,
}

fn map_indices<T, F>(count: usize, parallel: bool, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if parallel {
        (0..count).into_par_iter().map(f).collect()
    } else {
        (0..count).map(f).collect()
    }
}

impl<'p> Prihga<'p> {
    pub fn new(problem: &'p Problem, config: PrihgaConfig) -> Result<Self> {
        config.validate()?;
        let mut clock = Clock::start(config.budget);
        let m = problem.num_exams();
        let k = problem.num_slots();
        let cfg = &config;
        let bred = map_indices(cfg.population, cfg.parallel, |i| {
            let mut rng = stream(cfg.seed, &[0, i as u64]);
            let start = saturation_construct(problem, cfg.init_rule, &Timetable::empty(m, k), &mut rng);
            let improved = improve_timetable(problem, &start, cfg.init_ls, &cfg.hhls, &mut rng)?;
            let mut counters = Counters {
                constructions: 1,
                initial_ls: 1,
                ..Counters::default()
            };
            counters.add_ls(&improved.report);
            Ok(Bred {
                individual: Individual {
                    chromosome: encode(&improved.timetable),
                    timetable: improved.timetable,
                    cost: improved.cost,
                },
                ops: improved.ops + problem.construction_work(),
                counters,
            })
        })?;
        let mut counters = Counters::default();
        let mut population = Vec::with_capacity(bred.len());
        for b in bred {
            clock.charge(b.ops);
            counters.merge(&b.counters);
            population.push(b.individual);
        }
        let best = population
            .iter()
            .min_by_key(|s| s.penalized_raw())
            .expect("population is non-empty")
            .clone();
        let mut trace = Vec::new();
        record_best(&mut trace, &clock, 0, &best.cost);
        Ok(Self {
            problem,
            initial_best_raw: best.penalized_raw(),
            config,
            population,
            clock,
            generation: 0,
            best,
            trace,
            counters,
        })
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn best(&self) -> &Individual {
        &self.best
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    pub fn trace(&self) -> &[TracePoint] {
        &self.trace
    }

    pub fn expired(&self) -> bool {
        self.clock.expired(self.generation)
    }

    pub fn step(&mut self) -> Result<GenerationReport> {
        let problem = self.problem;
        let cfg = &self.config;
        let n = cfg.population;
        let (n_sel, n_mig, n_cross) = (cfg.n_sel(), cfg.n_mig(), cfg.n_cross());
        let gen = self.generation + 1;

        let mut ranked: Vec<usize> = (0..n).collect();
        ranked.sort_by_key(|&i| (self.population[i].penalized_raw(), i));
        let best_before = self.population[ranked[0]].penalized_raw();
        let (top, rest) = ranked.split_at(n_sel);
        let population = &self.population;

        let offspring = map_indices(n_cross, cfg.parallel, |j| {
            let mut rng: SolverRng = stream(cfg.seed, &[gen, j as u64]);
            let a = &population[top[rng.gen_range(0..top.len())]];
            let b = &population[rest[rng.gen_range(0..rest.len())]];
            let child = sathucx(
                problem,
                &a.chromosome,
                &b.chromosome,
                cfg.r,
                cfg.p_elit,
                cfg.completion_rule,
                &mut rng,
            );
            let decoded = decode(problem, &child, &mut rng);
            let mut counters = Counters {
                crossovers: 1,
                ..Counters::default()
            };
            let mut ops = problem.construction_work() * 2;
            let (timetable, cost) = if cfg.offspring_ls {
                let improved = improve_timetable(problem, &decoded, cfg.ls, &cfg.hhls, &mut rng)?;
                counters.offspring_ls = 1;
                counters.add_ls(&improved.report);
                ops += improved.ops;
                (improved.timetable, improved.cost)
            } else {
                ops += evaluation_work(problem);
                let cost = problem.evaluate(&decoded)?;
                (decoded, cost)
            };
            let chromosome = if cfg.lamarckian && cfg.offspring_ls {
                encode(&timetable)
            } else {
                child
            };
            Ok(Bred {
                individual: Individual { chromosome, timetable, cost },
                ops,
                counters,
            })
        })?;

        let migrants = map_indices(n_mig, cfg.parallel, |j| {
            let mut rng: SolverRng = stream(cfg.seed, &[gen, (n_cross + j) as u64]);
            let chromosome = PriorityChromosome::random(problem.num_exams(), &mut rng);
            let timetable = decode(problem, &chromosome, &mut rng);
            let cost = problem.evaluate(&timetable)?;
            Ok(Bred {
                individual: Individual { chromosome, timetable, cost },
                ops: problem.construction_work() + evaluation_work(problem),
                counters: Counters::default(),
            })
        })?;

        let mut next: Vec<Individual> = top.iter().map(|&i| self.population[i].clone()).collect();
        for b in offspring.into_iter().chain(migrants) {
            self.clock.charge(b.ops);
            self.counters.merge(&b.counters);
            next.push(b.individual);
        }
        let best_after = next.iter().map(Individual::penalized_raw).min().expect("non-empty");
        if best_after < self.best.penalized_raw() {
            self.best = next
                .iter()
                .find(|s| s.penalized_raw() == best_after)
                .expect("minimum exists")
                .clone();
        }
        self.population = next;
        self.generation = gen;
        record_best(&mut self.trace, &self.clock, gen, &self.best.cost);
        Ok(GenerationReport {
            elites: n_sel,
            offspring: n_cross,
            migrants: n_mig,
            best_before,
            best_after,
        })
    }

    pub fn finish(self) -> RunResult {
        RunResult {
            instance: self.problem.name().to_string(),
            algorithm: self.config.algorithm_name().to_string(),
            seed: self.config.seed,
            elapsed: self.clock.elapsed(),
            generations: self.generation,
            best_cost: self.best.cost,
            best: self.best.timetable,
            initial_best_raw: Some(self.initial_best_raw),
            trace: self.trace,
            counters: self.counters,
        }
    }
}

/// Runs PRIHGA until the budget is spent.
pub fn prihga_run(problem: &Problem, config: &PrihgaConfig) -> Result<RunResult> {
    let mut ga = Prihga::new(problem, config.clone())?;
    while !ga.expired() {
        ga.step()?;
    }
    Ok(ga.finish())
}
