//! Baselines: multi-start local search and the GAs without offspring local search.

use crate::construct::{saturation_construct, SatRule};
use crate::cost::{CostBreakdown, Problem};
use crate::error::Result;
use crate::local_search::{improve_timetable, HhlsParams, Improved, LsMode};
use crate::parhga::{parhga_run, ParhgaConfig};
use crate::prihga::{prihga_run, PrihgaConfig};
use crate::rng::stream;
use crate::run::{record_best, Budget, Clock, Counters, RunResult};
use crate::timetable::Timetable;

#[derive(Debug, Clone, PartialEq)]
pub struct MultlsConfig {
    pub constructor: SatRule,
    pub ls: LsMode,
    pub hhls: HhlsParams,
    pub budget: Budget,
    pub seed: u64,
}

impl Default for MultlsConfig {
    fn default() -> Self {
        Self {
            constructor: SatRule::Min,
            ls: LsMode::VdlsHhls,
            hhls: HhlsParams::default(),
            budget: Budget::seconds(60.0),
            seed: 0,
        }
    }
}

/// Constructs and improves independent solutions until the budget runs out.
/// Restart `i` draws from its own random stream, so any restart can be
/// replayed on its own. At least one restart always runs.
pub fn multls_run(problem: &Problem, config: &MultlsConfig) -> Result<RunResult> {
    config.budget.validate()?;
    config.hhls.validate()?;
    let mut clock = Clock::start(config.budget);
    let mut counters = Counters::default();
    let mut trace = Vec::new();
    let mut best: Option<(Timetable, CostBreakdown)> = None;
    let mut restarts = 0u64;
    let empty = Timetable::empty(problem.num_exams(), problem.num_slots());
    while restarts == 0 || !clock.expired(restarts) {
        let improved = multls_restart(problem, config, restarts, &empty)?;
        clock.charge(problem.construction_work() + improved.ops);
        counters.constructions += 1;
        counters.add_ls(&improved.report);
        restarts += 1;
        if best.as_ref().is_none_or(|(_, c)| improved.cost.penalized_raw() < c.penalized_raw()) {
            best = Some((improved.timetable, improved.cost));
        }
        record_best(&mut trace, &clock, restarts, &best.as_ref().expect("set above").1);
    }
    let (best, best_cost) = best.expect("at least one restart");
    Ok(RunResult {
        instance: problem.name().to_string(),
        algorithm: "multls".to_string(),
        seed: config.seed,
        elapsed: clock.elapsed(),
        generations: restarts,
        best,
        best_cost,
        initial_best_raw: None,
        trace,
        counters,
    })
}

/// Restart `index` of a MULTLS run, computed in isolation.
pub fn multls_restart(
    problem: &Problem,
    config: &MultlsConfig,
    index: u64,
    empty: &Timetable,
) -> Result<Improved> {
    let mut rng = stream(config.seed, &[index]);
    let start = saturation_construct(problem, config.constructor, empty, &mut rng);
    improve_timetable(problem, &start, config.ls, &config.hhls, &mut rng)
}

/// A genetic algorithm run as a pure GA.
#[derive(Debug, Clone, PartialEq)]
pub enum PureGa {
    Parhga(ParhgaConfig),
    Prihga(PrihgaConfig),
}

/// Runs the chosen GA with offspring local search switched off. The whole
/// initial population is built by SAT-MIN and improved by VDLS only.
pub fn pure_ga_run(problem: &Problem, algo: PureGa) -> Result<RunResult> {
    match algo {
        PureGa::Parhga(cfg) => {
            let cfg = ParhgaConfig {
                offspring_ls: false,
                init_ls: LsMode::Vdls,
                init_rule: SatRule::Min,
                heuristic_fraction: 1.0,
                ..cfg
            };
            parhga_run(problem, &cfg)
        }
        PureGa::Prihga(cfg) => {
            let cfg = PrihgaConfig {
                offspring_ls: false,
                init_ls: LsMode::Vdls,
                init_rule: SatRule::Min,
                ..cfg
            };
            prihga_run(problem, &cfg)
        }
    }
}
