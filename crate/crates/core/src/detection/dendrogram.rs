use serde::{Deserialize, Serialize};

use crate::partition::Partition;

/// One agglomeration step. Communities are named after one of their
/// original nodes; after the merge `into` names the union and `absorbed`
/// is retired.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub into: usize,
    pub absorbed: usize,
    /// Modularity of the partition right after this merge.
    pub modularity: f64,
}

/// Merge history of an agglomerative method starting from singletons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub node_count: usize,
    /// Modularity of the all-singleton partition.
    pub initial_modularity: f64,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn new(node_count: usize, initial_modularity: f64) -> Self {
        Self {
            node_count,
            initial_modularity,
            merges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    /// Number of leading merges giving the highest modularity, earliest
    /// first on ties.
    pub fn best_cut(&self) -> (usize, f64) {
        let mut best = (0, self.initial_modularity);
        for (i, m) in self.merges.iter().enumerate() {
            if m.modularity > best.1 {
                best = (i + 1, m.modularity);
            }
        }
        best
    }

    /// Partition after applying the first `steps` merges.
    pub fn cut(&self, steps: usize) -> Partition {
        let mut parent: Vec<usize> = (0..self.node_count).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for m in &self.merges[..steps.min(self.merges.len())] {
            let a = find(&mut parent, m.into);
            let b = find(&mut parent, m.absorbed);
            parent[b] = a;
        }
        let labels: Vec<usize> = (0..self.node_count).map(|v| find(&mut parent, v)).collect();
        Partition::from_labels(&labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cuts_replay_merges() {
        let mut d = Dendrogram::new(4, -0.25);
        d.merges.push(Merge {
            into: 0,
            absorbed: 1,
            modularity: 0.1,
        });
        d.merges.push(Merge {
            into: 2,
            absorbed: 3,
            modularity: 0.3,
        });
        d.merges.push(Merge {
            into: 0,
            absorbed: 2,
            modularity: 0.0,
        });
        assert_eq!(d.cut(0), Partition::singletons(4));
        assert_eq!(d.cut(2), Partition::from_labels(&[0, 0, 1, 1]));
        assert_eq!(d.cut(3), Partition::whole(4));
        assert_eq!(d.best_cut(), (2, 0.3));
    }
}
