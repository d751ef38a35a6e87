//! CSV output and the best-known value table.
//!
//! Floats are always written with six decimals so that result files diff
//! cleanly between runs.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::run::RunResult;
use crate::stats::{mann_whitney_u, mean, rpd, MannWhitney};

/// Instance name to best known average proximity cost.
#[derive(Debug, Clone, PartialEq)]
pub struct BestKnownTable {
    values: BTreeMap<String, f64>,
}

const BUNDLED_BEST: &str = include_str!("../data/best_known.toml");

impl Default for BestKnownTable {
    fn default() -> Self {
        Self::parse(BUNDLED_BEST).expect("bundled best-known table is valid")
    }
}

impl BestKnownTable {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, f64> =
            toml::from_str(text).map_err(|e| Error::Metadata(format!("best-known table: {e}")))?;
        let mut values = BTreeMap::new();
        for (name, v) in raw {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Metadata(format!("best-known value for `{name}` must be positive")));
            }
            values.insert(name.to_ascii_lowercase(), v);
        }
        Ok(Self { values })
    }

    /// Bundled defaults overlaid with the entries of `path`.
    pub fn with_overrides(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut table = Self::default();
        table.values.extend(Self::parse(&text)?.values);
        Ok(table)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(&name.to_ascii_lowercase()).copied()
    }

    pub fn rpd(&self, name: &str, value: f64) -> Option<f64> {
        self.get(name).and_then(|best| rpd(value, best).ok())
    }
}

pub const RESULT_HEADER: [&str; 8] = [
    "instance",
    "algorithm",
    "seed",
    "wall_seconds",
    "generations",
    "best_cost",
    "feasible",
    "rpd",
];

pub fn fmt_float(v: f64) -> String {
    format!("{v:.6}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

/// One line of a result file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub algorithm: String,
    pub seed: u64,
    pub wall_seconds: f64,
    pub generations: u64,
    /// Average proximity cost of the best solution.
    pub best_cost: f64,
    pub feasible: bool,
    pub rpd: Option<f64>,
}

impl ResultRow {
    pub fn from_result(result: &RunResult, best_known: &BestKnownTable) -> Self {
        let best_cost = result.best_proximity();
        Self {
            instance: result.instance.clone(),
            algorithm: result.algorithm.clone(),
            seed: result.seed,
            wall_seconds: result.elapsed,
            generations: result.generations,
            best_cost,
            feasible: result.feasible(),
            rpd: best_known.rpd(&result.instance, best_cost),
        }
    }

    fn record(&self) -> [String; 8] {
        [
            self.instance.clone(),
            self.algorithm.clone(),
            self.seed.to_string(),
            fmt_float(self.wall_seconds),
            self.generations.to_string(),
            fmt_float(self.best_cost),
            self.feasible.to_string(),
            fmt_opt(self.rpd),
        ]
    }
}

pub fn write_results<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_results<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

pub const TRACE_HEADER: [&str; 6] = ["instance", "algorithm", "seed", "elapsed", "generation", "best_cost"];

/// Best-so-far trace of each run; `best_cost` is the penalized average cost.
pub fn write_traces<W: Write>(out: W, results: &[RunResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in results {
        for p in &r.trace {
            w.write_record([
                r.instance.clone(),
                r.algorithm.clone(),
                r.seed.to_string(),
                fmt_float(p.elapsed),
                p.generation.to_string(),
                fmt_float(p.best_total),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Non-empty values of `column` grouped by the `instance` column.
pub fn read_metric<R: Read>(input: R, column: &str) -> Result<BTreeMap<String, Vec<f64>>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Metadata(format!("CSV has no `{name}` column")))
    };
    let inst = find("instance")?;
    let col = find(column)?;
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = rec.get(col).unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        let v: f64 = field.parse().map_err(|_| Error::Parse {
            line: i + 2,
            message: format!("`{field}` is not a number"),
        })?;
        out.entry(rec.get(inst).unwrap_or("").to_string()).or_default().push(v);
    }
    Ok(out)
}

/// Mann-Whitney comparison of one instance's values from two files.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub instance: String,
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub test: Option<MannWhitney>,
}

impl Comparison {
    /// `"a"` or `"b"` when the difference is significant at `alpha` (lower is better).
    pub fn winner(&self, alpha: f64) -> Option<&'static str> {
        let t = self.test?;
        if !t.significant(alpha) {
            return None;
        }
        Some(if self.mean_a < self.mean_b { "a" } else { "b" })
    }
}

/// Compares the instances present in both inputs. Instances where either
/// side has fewer than three values get no test.
pub fn compare(a: &BTreeMap<String, Vec<f64>>, b: &BTreeMap<String, Vec<f64>>) -> Vec<Comparison> {
    a.iter()
        .filter_map(|(inst, xs)| {
            let ys = b.get(inst)?;
            Some(Comparison {
                instance: inst.clone(),
                n_a: xs.len(),
                n_b: ys.len(),
                mean_a: mean(xs),
                mean_b: mean(ys),
                test: mann_whitney_u(xs, ys).ok(),
            })
        })
        .collect()
}

pub const COMPARE_HEADER: [&str; 9] = ["instance", "n_a", "n_b", "mean_a", "mean_b", "u", "p", "significant", "better"];

pub fn write_comparisons<W: Write>(out: W, rows: &[Comparison], alpha: f64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPARE_HEADER)?;
    for c in rows {
        w.write_record([
            c.instance.clone(),
            c.n_a.to_string(),
            c.n_b.to_string(),
            fmt_float(c.mean_a),
            fmt_float(c.mean_b),
            fmt_opt(c.test.map(|t| t.u)),
            fmt_opt(c.test.map(|t| t.p)),
            c.test.is_some_and(|t| t.significant(alpha)).to_string(),
            c.winner(alpha).unwrap_or("").to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
