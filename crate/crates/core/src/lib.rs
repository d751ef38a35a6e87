//! Uncapacitated examination timetabling.
//!
//! The crate provides the Toronto instance model, saturation-degree
//! constructors, local search (VDLS and a hyper-heuristic HHLS), two hybrid
//! genetic algorithms (PARHGA over partitions and PRIHGA over priority
//! keys), and baselines used to compare them.
//!
//! ```
//! use examtt::{Instance, Problem, SatRule, saturation_construct};
//! use rand::SeedableRng;
//!
//! let inst = Instance::parse_stu("toy", "1 2\n2 3\n", 3).unwrap();
//! let problem = Problem::new(inst);
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
//! let empty = examtt::Timetable::empty(problem.num_exams(), problem.num_slots());
//! let t = saturation_construct(&problem, SatRule::Min, &empty, &mut rng);
//! assert!(problem.evaluate(&t).unwrap().is_feasible());
//! ```

pub mod baselines;
pub mod construct;
pub mod cost;
pub mod error;
pub mod graph;
pub mod instance;
pub mod local_search;
pub mod parhga;
pub mod prihga;
pub mod report;
pub mod rng;
pub mod run;
pub mod stats;
pub mod table;
#[cfg(feature = "testkit")]
pub mod testkit;
pub mod timetable;
pub mod toronto;

pub use baselines::{multls_run, pure_ga_run, MultlsConfig, PureGa};
pub use construct::{
    feasible_slots, random_timetable, sample_constructor, saturation_construct,
    saturation_construct_ordered, SampleSummary, SatRule,
};
pub use cost::{evaluate, proximity_weight, CostBreakdown, Problem, PROXIMITY_WINDOW};
pub use error::{Error, Result};
pub use graph::ConflictGraph;
pub use instance::{CourseList, Instance};
pub use local_search::{
    hhls, improve, improve_timetable, vdls, HhlsParams, HhlsReport, LowLevelHeuristic, LsMode,
    LsReport, SlotShiftMode,
};
pub use parhga::{parhga_run, sathgpx, Parhga, ParhgaConfig, PartitionSolution};
pub use prihga::{decode, encode, prihga_run, sathucx, Prihga, PrihgaConfig, PriorityChromosome};
pub use run::{Budget, ClockKind, Counters, RunResult, TracePoint, WORK_UNITS_PER_SECOND};
pub use stats::{mann_whitney_u, rpd, MannWhitney};
pub use table::MoveCostTable;
pub use timetable::{Timetable, UNASSIGNED};
