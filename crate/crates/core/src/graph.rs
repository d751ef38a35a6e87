use crate::error::{Error, Result};
use crate::instance::Instance;

/// Student-conflict graph: `weight(i, j)` is the number of students sitting
/// both exam `i` and exam `j`.
///
/// Holds the dense matrix for O(1) pair lookups and a CSR adjacency of the
/// nonzero entries for neighbourhood scans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    n: usize,
    weights: Vec<u32>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    edge_weights: Vec<u32>,
}

impl ConflictGraph {
    pub fn build(instance: &Instance) -> Self {
        let n = instance.num_exams();
        let mut weights = vec![0u32; n * n];
        for student in instance.students() {
            for (i, &a) in student.iter().enumerate() {
                for &b in &student[i + 1..] {
                    weights[a as usize * n + b as usize] += 1;
                    weights[b as usize * n + a as usize] += 1;
                }
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut edge_weights = Vec::new();
        offsets.push(0);
        for i in 0..n {
            for j in 0..n {
                let w = weights[i * n + j];
                if w > 0 {
                    targets.push(j as u32);
                    edge_weights.push(w);
                }
            }
            offsets.push(targets.len());
        }
        Self {
            n,
            weights,
            offsets,
            targets,
            edge_weights,
        }
    }

    pub fn num_exams(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> u32 {
        self.weights[i * self.n + j]
    }

    /// `(neighbour, weight)` pairs of exam `e`.
    #[inline]
    pub fn neighbors(&self, e: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let range = self.offsets[e]..self.offsets[e + 1];
        self.targets[range.clone()]
            .iter()
            .zip(&self.edge_weights[range])
            .map(|(&j, &w)| (j as usize, w))
    }

    #[inline]
    pub fn degree(&self, e: usize) -> usize {
        self.offsets[e + 1] - self.offsets[e]
    }

    /// Number of nonzero off-diagonal entries (each edge counted twice).
    pub fn nonzero_entries(&self) -> usize {
        self.targets.len()
    }

    /// Fraction of nonzero off-diagonal entries: nnz / (m (m - 1)).
    pub fn density(&self) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::InvalidInstance(
                "density needs at least two exams".into(),
            ));
        }
        Ok(self.nonzero_entries() as f64 / (self.n * (self.n - 1)) as f64)
    }
}
