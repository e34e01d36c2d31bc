//! Non-overlapping community structures.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("node {node} is assigned to more than one community")]
    DuplicateNode { node: usize },
    #[error("node {node} is not assigned to any community")]
    MissingNode { node: usize },
    #[error("node {node} is out of range for {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
}

/// Assignment of every node to exactly one community.
///
/// Community ids are dense and canonical: they are numbered in order of
/// first appearance when scanning nodes `0..n`. Two partitions describing
/// the same node grouping therefore compare equal regardless of the labels
/// they were built from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    membership: Vec<usize>,
    community_count: usize,
}

impl Partition {
    /// Builds a partition from arbitrary per-node labels.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let mut membership = Vec::with_capacity(labels.len());
        for &label in labels {
            let next = remap.len();
            membership.push(*remap.entry(label).or_insert(next));
        }
        Self {
            community_count: remap.len(),
            membership,
        }
    }

    /// Builds a partition from explicit node groups covering `0..node_count`.
    pub fn from_communities(
        communities: &[Vec<usize>],
        node_count: usize,
    ) -> Result<Self, PartitionError> {
        let mut labels = vec![usize::MAX; node_count];
        for (c, members) in communities.iter().enumerate() {
            for &node in members {
                if node >= node_count {
                    return Err(PartitionError::NodeOutOfRange { node, node_count });
                }
                if labels[node] != usize::MAX {
                    return Err(PartitionError::DuplicateNode { node });
                }
                labels[node] = c;
            }
        }
        if let Some(node) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(PartitionError::MissingNode { node });
        }
        Ok(Self::from_labels(&labels))
    }

    /// Every node in its own community.
    pub fn singletons(node_count: usize) -> Self {
        Self {
            membership: (0..node_count).collect(),
            community_count: node_count,
        }
    }

    /// All nodes in one community.
    pub fn whole(node_count: usize) -> Self {
        Self {
            membership: vec![0; node_count],
            community_count: usize::from(node_count > 0),
        }
    }

    pub fn node_count(&self) -> usize {
        self.membership.len()
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.membership[node]
    }

    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    /// Member lists indexed by community id, each sorted ascending.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.community_count];
        for (node, &c) in self.membership.iter().enumerate() {
            groups[c].push(node);
        }
        groups
    }

    /// Community cardinalities indexed by community id.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.community_count];
        for &c in &self.membership {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn largest_community_size(&self) -> usize {
        self.sizes().into_iter().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_canonicalised() {
        let a = Partition::from_labels(&[7, 7, 3, 9, 3]);
        let b = Partition::from_labels(&[0, 0, 1, 2, 1]);
        assert_eq!(a, b);
        assert_eq!(a.community_count(), 3);
        assert_eq!(a.sizes(), vec![2, 2, 1]);
    }

    #[test]
    fn from_communities_rejects_gaps_and_duplicates() {
        assert_eq!(
            Partition::from_communities(&[vec![0, 1], vec![1, 2]], 3),
            Err(PartitionError::DuplicateNode { node: 1 })
        );
        assert_eq!(
            Partition::from_communities(&[vec![0, 2]], 3),
            Err(PartitionError::MissingNode { node: 1 })
        );
        let p = Partition::from_communities(&[vec![2], vec![0, 1]], 3).unwrap();
        assert_eq!(p.communities(), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn whole_and_singletons() {
        assert_eq!(Partition::whole(4).community_count(), 1);
        assert_eq!(Partition::singletons(4).sizes(), vec![1; 4]);
        assert_eq!(Partition::whole(0).community_count(), 0);
    }
}
