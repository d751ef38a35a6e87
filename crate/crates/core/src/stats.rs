//! Relative percentage deviation and the Mann-Whitney U test.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// `(val - best) / best * 100`.
pub fn rpd(val: f64, best: f64) -> Result<f64> {
    if !(best > 0.0) || !best.is_finite() {
        return Err(Error::Statistics(format!("best-known value must be positive, got {best}")));
    }
    Ok((val - best) / best * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// U statistic of the first sample: pairs with `x > y`, ties counting one half.
    pub u: f64,
    /// Standardized statistic (continuity corrected, non-negative).
    pub z: f64,
    /// Two-sided p-value from the normal approximation.
    pub p: f64,
}

impl MannWhitney {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p < alpha
    }
}

/// Midranks of `values` (1-based), plus the tie-correction sum `Σ(t³ - t)`.
fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut ties = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &p in &idx[i..=j] {
            ranks[p] = rank;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

/// Two-sided Mann-Whitney U test. Both samples need at least three values.
pub fn mann_whitney_u(xs: &[f64], ys: &[f64]) -> Result<MannWhitney> {
    if xs.len() < 3 || ys.len() < 3 {
        return Err(Error::Statistics(format!(
            "samples of size {} and {} are too small (need at least 3)",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Statistics("samples must be finite".into()));
    }
    let n1 = xs.len() as f64;
    let n2 = ys.len() as f64;
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let r1: f64 = ranks[..xs.len()].iter().sum();
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    let n = n1 + n2;
    let mean = n1 * n2 / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok(MannWhitney { u, z: 0.0, p: 1.0 });
    }
    let z = (((u - mean).abs() - 0.5).max(0.0)) / var.sqrt();
    let normal = Normal::standard();
    let p = (2.0 * (1.0 - normal.cdf(z))).min(1.0);
    Ok(MannWhitney { u, z, p })
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}
