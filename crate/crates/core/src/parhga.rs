//! PARHGA: steady-state hybrid genetic algorithm over slot partitions.
//!
//! Each individual is a complete timetable seen as `k` exam sets. Two
//! distinct parents are drawn uniformly, recombined with SATHGPX, the
//! offspring is improved by local search and replaces the worse parent.

use rand::Rng;

use crate::construct::{random_timetable, saturation_construct, SatRule};
use crate::cost::{CostBreakdown, Problem};
use crate::error::{Error, Result};
use crate::local_search::{improve_timetable, HhlsParams, LsMode};
use crate::rng::{stream, SolverRng};
use crate::run::{record_best, Budget, Clock, Counters, RunResult, TracePoint};
use crate::timetable::Timetable;

/// A complete timetable together with its cached cost.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSolution {
    timetable: Timetable,
    cost: CostBreakdown,
}

impl PartitionSolution {
    pub fn new(problem: &Problem, timetable: Timetable) -> Result<Self> {
        let cost = problem.evaluate(&timetable)?;
        Ok(Self { timetable, cost })
    }

    pub(crate) fn from_parts(timetable: Timetable, cost: CostBreakdown) -> Self {
        Self { timetable, cost }
    }

    /// Exam sets `V_1..V_k`, each sorted ascending.
    pub fn sets(&self) -> Vec<Vec<u32>> {
        self.timetable.partition()
    }

    pub fn timetable(&self) -> &Timetable {
        &self.timetable
    }

    pub fn into_timetable(self) -> Timetable {
        self.timetable
    }

    pub fn cost(&self) -> &CostBreakdown {
        &self.cost
    }

    pub fn penalized_raw(&self) -> u64 {
        self.cost.penalized_raw()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParhgaConfig {
    /// Population size `n`.
    pub population: usize,
    /// Fraction of the `k` slots filled by crossover; the rest is completed by SAT.
    pub r: f64,
    /// Constructor for the heuristic part of the initial population.
    pub init_rule: SatRule,
    /// Share of the initial population built by `init_rule`; the rest is random.
    pub heuristic_fraction: f64,
    /// Local search applied to offspring.
    pub ls: LsMode,
    /// Local search applied to initial-population members.
    pub init_ls: LsMode,
    /// Rule completing the exams left over by the crossover.
    pub completion_rule: SatRule,
    /// Install transferred sets at their source slot rather than at slot `i`.
    pub preserve_source_slot: bool,
    /// When false the GA runs without offspring local search.
    pub offspring_ls: bool,
    pub hhls: HhlsParams,
    pub budget: Budget,
    pub seed: u64,
}

impl Default for ParhgaConfig {
    fn default() -> Self {
        Self {
            population: 20,
            r: 0.5,
            init_rule: SatRule::Dist,
            heuristic_fraction: 0.5,
            ls: LsMode::VdlsHhls,
            init_ls: LsMode::Vdls,
            completion_rule: SatRule::Dist,
            preserve_source_slot: false,
            offspring_ls: true,
            hhls: HhlsParams::default(),
            budget: Budget::seconds(60.0),
            seed: 0,
        }
    }
}

impl ParhgaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::Config(format!(
                "population must be at least 2, got {}",
                self.population
            )));
        }
        check_fraction("r", self.r)?;
        check_fraction("heuristic fraction", self.heuristic_fraction)?;
        self.hhls.validate()?;
        self.budget.validate()
    }

    pub fn algorithm_name(&self) -> &'static str {
        if self.offspring_ls {
            "parhga"
        } else {
            "pure-parhga"
        }
    }
}

pub(crate) fn check_fraction(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Config(format!("{name} must lie in [0, 1], got {value}")));
    }
    Ok(())
}

/// `floor(r * n)`, tolerant of representation error in `r`.
pub(crate) fn fraction_count(r: f64, n: usize) -> usize {
    ((r * n as f64) + 1e-9).floor().min(n as f64) as usize
}

/// SATHGPX crossover. For `floor(r*k)` rounds the largest remaining set over
/// both parents (ties uniformly at random) is copied into the offspring and
/// its exams are struck from both parents. The leftover exams are completed
/// by saturation construction with `completion`.
///
/// Set number `i` goes to slot `i`, or with `preserve_source_slot` to the
/// slot it held in its parent (lowest unused slot when that one is taken).
pub fn sathgpx<R: Rng + ?Sized>(
    problem: &Problem,
    a: &Timetable,
    b: &Timetable,
    r: f64,
    completion: SatRule,
    preserve_source_slot: bool,
    rng: &mut R,
) -> Timetable {
    let partial = sathgpx_transfer(a, b, r, preserve_source_slot, rng);
    saturation_construct(problem, completion, &partial, rng)
}

/// The gene-transfer half of [`sathgpx`]: the partial offspring before completion.
pub fn sathgpx_transfer<R: Rng + ?Sized>(
    a: &Timetable,
    b: &Timetable,
    r: f64,
    preserve_source_slot: bool,
    rng: &mut R,
) -> Timetable {
    let m = a.num_exams();
    let k = a.num_slots();
    let parents = [a, b];
    let sets = [a.partition(), b.partition()];
    let mut live: [Vec<usize>; 2] = [
        sets[0].iter().map(Vec::len).collect(),
        sets[1].iter().map(Vec::len).collect(),
    ];
    let mut taken = vec![false; m];
    let mut used_slot = vec![false; k];
    let mut child = Timetable::empty(m, k);

    for i in 0..fraction_count(r, k) {
        let mut best = (0usize, 0usize);
        let mut best_size = 0usize;
        let mut ties = 0u32;
        for (p, sizes) in live.iter().enumerate() {
            for (s, &size) in sizes.iter().enumerate() {
                if size == 0 || size < best_size {
                    continue;
                }
                if size > best_size {
                    best_size = size;
                    best = (p, s);
                    ties = 1;
                } else {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        best = (p, s);
                    }
                }
            }
        }
        if best_size == 0 {
            break;
        }
        let (p, s) = best;
        let target = if preserve_source_slot {
            if used_slot[s] {
                used_slot.iter().position(|&u| !u).expect("fewer sets than slots")
            } else {
                s
            }
        } else {
            i
        };
        used_slot[target] = true;
        let other = parents[1 - p];
        for &e in &sets[p][s] {
            let e = e as usize;
            if taken[e] {
                continue;
            }
            taken[e] = true;
            child.assign(e, target).expect("slot in range");
            let os = other.slot(e).expect("parents are complete");
            live[1 - p][os] -= 1;
        }
        live[p][s] = 0;
    }
    child
}

/// What happened in one PARHGA generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationReport {
    pub parents: (usize, usize),
    /// Population index whose parent was removed; the offspring now sits there.
    pub removed: usize,
    pub removed_raw: u64,
    pub survivor_raw: u64,
    pub offspring_raw: u64,
}

pub struct Parhga<'p> {
    problem: &'p Problem,
    config: ParhgaConfig,
    population: Vec<PartitionSolution>,
    rng: SolverRng,
    clock: Clock,
    generation: u64,
    best: PartitionSolution,
    initial_best_raw: u64,
    trace: Vec<TracePoint>,
    counters: Counters,
}

impl<'p> Parhga<'p> {
    /// Builds and locally improves the initial population.
    pub fn new(problem: &'p Problem, config: ParhgaConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = stream(config.seed, &[]);
        let mut clock = Clock::start(config.budget);
        let mut counters = Counters::default();
        let n = config.population;
        let heuristic = (config.heuristic_fraction * n as f64 - 1e-9).ceil().max(0.0) as usize;
        let m = problem.num_exams();
        let k = problem.num_slots();
        let mut population = Vec::with_capacity(n);
        for i in 0..n {
            let start = if i < heuristic {
                clock.charge(problem.construction_work());
                saturation_construct(problem, config.init_rule, &Timetable::empty(m, k), &mut rng)
            } else {
                clock.charge((m + k) as u64);
                random_timetable(m, k, &mut rng)
            };
            counters.constructions += 1;
            let improved = improve_timetable(problem, &start, config.init_ls, &config.hhls, &mut rng)?;
            clock.charge(improved.ops);
            counters.initial_ls += 1;
            counters.add_ls(&improved.report);
            population.push(PartitionSolution::from_parts(improved.timetable, improved.cost));
        }
        let best = population
            .iter()
            .min_by_key(|s| s.penalized_raw())
            .expect("population is non-empty")
            .clone();
        let mut trace = Vec::new();
        record_best(&mut trace, &clock, 0, best.cost());
        Ok(Self {
            problem,
            initial_best_raw: best.penalized_raw(),
            config,
            population,
            rng,
            clock,
            generation: 0,
            best,
            trace,
            counters,
        })
    }

    pub fn population(&self) -> &[PartitionSolution] {
        &self.population
    }

    pub fn best(&self) -> &PartitionSolution {
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

    pub fn elapsed(&self) -> f64 {
        self.clock.elapsed()
    }

    pub fn expired(&self) -> bool {
        self.clock.expired(self.generation)
    }

    /// One steady-state generation.
    pub fn step(&mut self) -> Result<GenerationReport> {
        let n = self.population.len();
        let a = self.rng.gen_range(0..n);
        let mut b = self.rng.gen_range(0..n);
        while b == a {
            b = self.rng.gen_range(0..n);
        }
        let problem = self.problem;
        let cfg = &self.config;
        let raw_child = sathgpx(
            problem,
            self.population[a].timetable(),
            self.population[b].timetable(),
            cfg.r,
            cfg.completion_rule,
            cfg.preserve_source_slot,
            &mut self.rng,
        );
        self.counters.crossovers += 1;
        self.clock.charge(problem.construction_work());
        let child = if cfg.offspring_ls {
            let improved = improve_timetable(problem, &raw_child, cfg.ls, &cfg.hhls, &mut self.rng)?;
            self.clock.charge(improved.ops);
            self.counters.offspring_ls += 1;
            self.counters.add_ls(&improved.report);
            PartitionSolution::from_parts(improved.timetable, improved.cost)
        } else {
            self.clock.charge(evaluation_work(problem));
            PartitionSolution::new(problem, raw_child)?
        };

        let (ra, rb) = (self.population[a].penalized_raw(), self.population[b].penalized_raw());
        // the worse parent goes; on a tie the second one
        let (removed, survivor_raw, removed_raw) = if ra > rb { (a, rb, ra) } else { (b, ra, rb) };
        let offspring_raw = child.penalized_raw();
        if offspring_raw < self.best.penalized_raw() {
            self.best = child.clone();
        }
        self.population[removed] = child;
        self.generation += 1;
        record_best(&mut self.trace, &self.clock, self.generation, self.best.cost());
        Ok(GenerationReport {
            parents: (a, b),
            removed,
            removed_raw,
            survivor_raw,
            offspring_raw,
        })
    }

    pub fn finish(self) -> RunResult {
        RunResult {
            instance: self.problem.name().to_string(),
            algorithm: self.config.algorithm_name().to_string(),
            seed: self.config.seed,
            elapsed: self.clock.elapsed(),
            generations: self.generation,
            best_cost: *self.best.cost(),
            best: self.best.into_timetable(),
            initial_best_raw: Some(self.initial_best_raw),
            trace: self.trace,
            counters: self.counters,
        }
    }
}

pub(crate) fn evaluation_work(problem: &Problem) -> u64 {
    (problem.graph().nonzero_entries() + problem.num_exams()) as u64
}

/// Runs PARHGA until the budget is spent.
pub fn parhga_run(problem: &Problem, config: &ParhgaConfig) -> Result<RunResult> {
    let mut ga = Parhga::new(problem, config.clone())?;
    while !ga.expired() {
        ga.step()?;
    }
    Ok(ga.finish())
}
