//! Agreement between two partitions of the same items.

use crate::error::{Error, Result};
use crate::hclust::Partition;

/// r × c cross-tabulation of two partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    n: u64,
}

pub fn contingency(a: &Partition, b: &Partition) -> Result<ContingencyTable> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "partitions cover {} and {} items",
            a.len(),
            b.len()
        )));
    }
    let mut counts = vec![vec![0u64; b.k()]; a.k()];
    for (&i, &j) in a.assignment().iter().zip(b.assignment()) {
        counts[i - 1][j - 1] += 1;
    }
    Ok(ContingencyTable {
        counts,
        n: a.len() as u64,
    })
}

fn pairs(x: u64) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

impl ContingencyTable {
    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.n
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<u64> {
        let cols = self.counts.first().map_or(0, Vec::len);
        (0..cols)
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    /// (Σ C(n_ij,2), Σ C(a_i,2), Σ C(b_j,2), C(n,2)) as exact integers.
    fn pair_sums(&self) -> (u128, u128, u128, u128) {
        let joint = self.counts.iter().flatten().map(|&c| pairs(c)).sum();
        let rows = self.row_sums().into_iter().map(pairs).sum();
        let cols = self.column_sums().into_iter().map(pairs).sum();
        (joint, rows, cols, pairs(self.n))
    }

    /// Unadjusted Rand index: fraction of item pairs on which both
    /// partitions agree.
    pub fn rand_index(&self) -> f64 {
        let (joint, rows, cols, total) = self.pair_sums();
        if total == 0 {
            return 1.0;
        }
        let agreements = total + 2 * joint - rows - cols;
        agreements as f64 / total as f64
    }

    /// Adjusted Rand index; 0 when the denominator vanishes.
    pub fn adjusted_rand_index(&self) -> f64 {
        let (joint, rows, cols, total) = self.pair_sums();
        if total == 0 {
            return 0.0;
        }
        let (joint, rows, cols, total) = (joint as f64, rows as f64, cols as f64, total as f64);
        let expected = rows * cols / total;
        let max_index = 0.5 * (rows + cols);
        let denom = max_index - expected;
        if denom == 0.0 {
            0.0
        } else {
            (joint - expected) / denom
        }
    }

    /// Delimited counts with `A1..` row and `B1..` column labels.
    pub fn to_csv(&self) -> String {
        let cols = self.counts.first().map_or(0, Vec::len);
        let mut out = String::from("cluster");
        for j in 1..=cols {
            out.push_str(&format!(",B{j}"));
        }
        out.push('\n');
        for (i, row) in self.counts.iter().enumerate() {
            out.push_str(&format!("A{}", i + 1));
            for c in row {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn adjusted_rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    Ok(contingency(a, b)?.adjusted_rand_index())
}

pub fn rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    Ok(contingency(a, b)?.rand_index())
}
