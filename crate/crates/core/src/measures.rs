//! Partition-comparison measures: fraction of correctly classified nodes,
//! Rand index, adjusted Rand index and normalized mutual information.
//!
//! All of them work from the contingency table of the two partitions, so
//! the cost is linear in the node count rather than quadratic in pairs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::Partition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("partitions cover different node sets ({reference} vs {estimated} nodes)")]
    NodeSetMismatch { reference: usize, estimated: usize },
    #[error("pair-counting measures need at least two nodes, got {0}")]
    TooFewNodes(usize),
}

/// Co-membership counts between a reference and an estimated partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// Non-zero cells as `(reference community, estimated community, count)`,
    /// sorted by reference then estimated id.
    cells: Vec<(usize, usize, usize)>,
    row_sums: Vec<usize>,
    column_sums: Vec<usize>,
    total: usize,
}

impl ContingencyTable {
    pub fn new(reference: &Partition, estimated: &Partition) -> Result<Self, MeasureError> {
        if reference.node_count() != estimated.node_count() {
            return Err(MeasureError::NodeSetMismatch {
                reference: reference.node_count(),
                estimated: estimated.node_count(),
            });
        }
        let mut pairs: Vec<(usize, usize)> = reference
            .membership()
            .iter()
            .copied()
            .zip(estimated.membership().iter().copied())
            .collect();
        pairs.sort_unstable();
        let mut cells: Vec<(usize, usize, usize)> = Vec::new();
        for (r, e) in pairs {
            match cells.last_mut() {
                Some(last) if last.0 == r && last.1 == e => last.2 += 1,
                _ => cells.push((r, e, 1)),
            }
        }
        Ok(Self {
            cells,
            row_sums: reference.sizes(),
            column_sums: estimated.sizes(),
            total: reference.node_count(),
        })
    }

    pub fn cells(&self) -> &[(usize, usize, usize)] {
        &self.cells
    }

    /// Reference community sizes.
    pub fn row_sums(&self) -> &[usize] {
        &self.row_sums
    }

    /// Estimated community sizes.
    pub fn column_sums(&self) -> &[usize] {
        &self.column_sums
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Pair counts `(same/same, same/different, different/same,
    /// different/different)` with respect to (reference, estimated).
    pub fn pair_counts(&self) -> PairCounts {
        let both: f64 = self.cells.iter().map(|&(_, _, c)| choose2(c)).sum();
        let reference: f64 = self.row_sums.iter().map(|&c| choose2(c)).sum();
        let estimated: f64 = self.column_sums.iter().map(|&c| choose2(c)).sum();
        let total = choose2(self.total);
        PairCounts {
            together_in_both: both,
            together_in_reference_only: reference - both,
            together_in_estimated_only: estimated - both,
            apart_in_both: total - reference - estimated + both,
        }
    }
}

/// Node-pair agreement counts between two partitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCounts {
    pub together_in_both: f64,
    pub together_in_reference_only: f64,
    pub together_in_estimated_only: f64,
    pub apart_in_both: f64,
}

impl PairCounts {
    pub fn total(&self) -> f64 {
        self.together_in_both
            + self.together_in_reference_only
            + self.together_in_estimated_only
            + self.apart_in_both
    }
}

fn choose2(k: usize) -> f64 {
    let k = k as f64;
    k * (k - 1.0) / 2.0
}

pub fn rand_index(reference: &Partition, estimated: &Partition) -> Result<f64, MeasureError> {
    let table = ContingencyTable::new(reference, estimated)?;
    if table.total() < 2 {
        return Err(MeasureError::TooFewNodes(table.total()));
    }
    let pairs = table.pair_counts();
    Ok((pairs.together_in_both + pairs.apart_in_both) / pairs.total())
}

/// Components of the Hubert–Arabie adjustment: `ARI = (index - expected) /
/// (max - expected)` with `index` the same/same pair count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AriComponents {
    pub index: f64,
    pub expected: f64,
    pub max: f64,
}

impl AriComponents {
    pub fn from_table(table: &ContingencyTable) -> Self {
        let index: f64 = table.cells().iter().map(|&(_, _, c)| choose2(c)).sum();
        let a: f64 = table.row_sums().iter().map(|&c| choose2(c)).sum();
        let b: f64 = table.column_sums().iter().map(|&c| choose2(c)).sum();
        Self {
            index,
            expected: a * b / choose2(table.total()),
            max: (a + b) / 2.0,
        }
    }

    pub fn value(&self) -> f64 {
        let denominator = self.max - self.expected;
        // Zero only when both partitions are all-singletons or both are one
        // community, i.e. when they are identical.
        if denominator == 0.0 {
            1.0
        } else {
            (self.index - self.expected) / denominator
        }
    }
}

pub fn adjusted_rand_index(
    reference: &Partition,
    estimated: &Partition,
) -> Result<f64, MeasureError> {
    let table = ContingencyTable::new(reference, estimated)?;
    if table.total() < 2 {
        return Err(MeasureError::TooFewNodes(table.total()));
    }
    Ok(AriComponents::from_table(&table).value())
}

/// `2 I(R;E) / (H(R) + H(E))`, natural logarithms.
pub fn nmi(reference: &Partition, estimated: &Partition) -> Result<f64, MeasureError> {
    let table = ContingencyTable::new(reference, estimated)?;
    let n = table.total() as f64;
    if table.total() == 0 {
        return Ok(1.0);
    }
    let entropy = |sizes: &[usize]| -> f64 {
        sizes
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_ref = entropy(table.row_sums());
    let h_est = entropy(table.column_sums());
    if h_ref == 0.0 && h_est == 0.0 {
        return Ok(1.0);
    }
    if h_ref == 0.0 || h_est == 0.0 {
        return Ok(0.0);
    }
    let mutual: f64 = table
        .cells()
        .iter()
        .map(|&(r, e, c)| {
            let c = c as f64;
            let row = table.row_sums()[r] as f64;
            let col = table.column_sums()[e] as f64;
            (c / n) * (c * n / (row * col)).ln()
        })
        .sum();
    Ok((2.0 * mutual / (h_ref + h_est)).clamp(0.0, 1.0))
}

/// Fraction of correctly classified nodes.
///
/// Each reference community is matched with the estimated community holding
/// the plurality of its members (ties go to the lower estimated id). A node
/// is correct when it sits in the match of its reference community. When one
/// estimated community is the match of two or more reference communities,
/// it is treated as a merge and every node in it counts as misclassified.
///
/// The reference partition plays a distinguished role: the measure is not
/// symmetric in its arguments.
pub fn fcc(reference: &Partition, estimated: &Partition) -> Result<f64, MeasureError> {
    let table = ContingencyTable::new(reference, estimated)?;
    if table.total() == 0 {
        return Ok(1.0);
    }
    let mut best: Vec<Option<(usize, usize)>> = vec![None; table.row_sums().len()];
    for &(r, e, c) in table.cells() {
        // Cells are sorted by estimated id within a row, so strict `>` keeps
        // the lower id on ties.
        if best[r].is_none_or(|(_, count)| c > count) {
            best[r] = Some((e, c));
        }
    }
    let mut matched_by = vec![0usize; table.column_sums().len()];
    for &(e, _) in best.iter().flatten() {
        matched_by[e] += 1;
    }
    let correct: usize = best
        .iter()
        .flatten()
        .filter(|&&(e, _)| matched_by[e] == 1)
        .map(|&(_, count)| count)
        .sum();
    Ok(correct as f64 / table.total() as f64)
}

/// The four partition-comparison scores for one estimated partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionScores {
    pub fcc: f64,
    pub ri: f64,
    pub ari: f64,
    pub nmi: f64,
}

impl PartitionScores {
    pub fn compute(reference: &Partition, estimated: &Partition) -> Result<Self, MeasureError> {
        Ok(Self {
            fcc: fcc(reference, estimated)?,
            ri: rand_index(reference, estimated)?,
            ari: adjusted_rand_index(reference, estimated)?,
            nmi: nmi(reference, estimated)?,
        })
    }

    /// True when every score lies in its documented range.
    pub fn in_range(&self) -> bool {
        let unit = 0.0..=1.0;
        unit.contains(&self.fcc)
            && unit.contains(&self.ri)
            && unit.contains(&self.nmi)
            && (-1.0..=1.0).contains(&self.ari)
    }
}
