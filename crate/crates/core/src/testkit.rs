//! Fixtures for tests and benchmarks: the bundled toy instance and a
//! generator of synthetic Toronto-like instances.

use rand::Rng;

use crate::instance::Instance;
use crate::rng::stream;

pub const TOY_STU: &str = include_str!("../data/toy.stu");

/// Four exams, five students, three slots.
pub fn toy_instance() -> Instance {
    Instance::parse_stu("toy", TOY_STU, 3).expect("bundled toy instance is valid")
}

/// Shape of a synthetic instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub exams: usize,
    pub students: usize,
    pub slots: usize,
    /// Enrollments per student are drawn uniformly from `1..=max_load`.
    pub max_load: usize,
    /// Exam popularity decays like `1 / (rank + 1)^skew`.
    pub skew: f64,
}

impl SyntheticSpec {
    /// Roughly the size of a small Toronto instance.
    pub fn small() -> Self {
        Self {
            exams: 120,
            students: 1500,
            slots: 16,
            max_load: 5,
            skew: 0.8,
        }
    }
}

/// Deterministic synthetic instance. Courses are picked with a skewed
/// popularity so the conflict graph has a few dense hubs, as real data does.
pub fn synthetic_instance(name: &str, spec: SyntheticSpec, seed: u64) -> Instance {
    let mut rng = stream(seed, &[spec.exams as u64, spec.students as u64]);
    let weights: Vec<f64> = (0..spec.exams)
        .map(|r| 1.0 / ((r + 1) as f64).powf(spec.skew))
        .collect();
    let total: f64 = weights.iter().sum();
    let mut cumulative = Vec::with_capacity(spec.exams);
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cumulative.push(acc);
    }
    let mut text = String::new();
    // every exam gets at least one student so the exam range is exact
    for e in 0..spec.exams {
        text.push_str(&format!("{}\n", e + 1));
    }
    for _ in spec.exams..spec.students.max(spec.exams) {
        let load = rng.gen_range(1..=spec.max_load.min(spec.exams));
        let mut picked: Vec<usize> = Vec::with_capacity(load);
        while picked.len() < load {
            let u: f64 = rng.gen();
            let e = cumulative.partition_point(|&c| c < u).min(spec.exams - 1);
            if !picked.contains(&e) {
                picked.push(e);
            }
        }
        let line: Vec<String> = picked.iter().map(|e| (e + 1).to_string()).collect();
        text.push_str(&line.join(" "));
        text.push('\n');
    }
    Instance::parse_stu(name, &text, spec.slots).expect("generated instance is valid")
}

/// Renders an instance in `.stu` format.
pub fn to_stu(instance: &Instance) -> String {
    let mut text = String::new();
    for s in instance.students() {
        let line: Vec<String> = s.iter().map(|e| (e + 1).to_string()).collect();
        text.push_str(&line.join(" "));
        text.push('\n');
    }
    text
}
