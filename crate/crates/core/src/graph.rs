//! Immutable undirected simple graphs and the traversal primitives built on
//! top of them.

use std::collections::VecDeque;

use thiserror::Error;

use crate::partition::Partition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node id {node} out of range for a graph of {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("node subset is empty")]
    EmptySubset,
    #[error("partition covers {partition} nodes but the graph has {graph}")]
    PartitionSize { partition: usize, graph: usize },
}

/// Undirected simple graph stored as compressed sorted adjacency lists.
///
/// Node ids are `0..node_count`. There are no self-loops and no parallel
/// edges, and adjacency is symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate pairs (in either
    /// orientation) collapse to a single edge.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut degree = vec![0usize; node_count];
        for &(u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(GraphError::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { node: u });
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..node_count].to_vec();
        let mut targets = vec![0usize; offsets[node_count]];
        for &(u, v) in edges {
            targets[cursor[u]] = v;
            cursor[u] += 1;
            targets[cursor[v]] = u;
            cursor[v] += 1;
        }

        // Sort and dedup every list, then compact.
        let mut compact_offsets = Vec::with_capacity(node_count + 1);
        compact_offsets.push(0);
        let mut write = 0;
        for node in 0..node_count {
            let (start, end) = (offsets[node], offsets[node + 1]);
            targets[start..end].sort_unstable();
            let mut last = None;
            for read in start..end {
                let t = targets[read];
                if last != Some(t) {
                    targets[write] = t;
                    write += 1;
                    last = Some(t);
                }
            }
            compact_offsets.push(write);
        }
        targets.truncate(write);
        Ok(Self {
            edge_count: write / 2,
            offsets: compact_offsets,
            targets,
        })
    }

    pub fn empty(node_count: usize) -> Self {
        Self {
            offsets: vec![0; node_count + 1],
            targets: Vec::new(),
            edge_count: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbor ids of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.degree(v)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (u, v))
        })
    }

    /// Subgraph induced by `nodes`, plus the table mapping local ids back to
    /// ids in `self` (local id `i` is `mapping[i]`).
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<(Graph, Vec<usize>), GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::EmptySubset);
        }
        let mut mapping = nodes.to_vec();
        mapping.sort_unstable();
        mapping.dedup();
        let node_count = self.node_count();
        if let Some(&node) = mapping.iter().find(|&&v| v >= node_count) {
            return Err(GraphError::NodeOutOfRange { node, node_count });
        }
        let mut offsets = Vec::with_capacity(mapping.len() + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for &global in &mapping {
            // Both lists are sorted, so a merge walk keeps local lists sorted.
            let neighbors = self.neighbors(global);
            let (mut i, mut j) = (0, 0);
            while i < neighbors.len() && j < mapping.len() {
                match neighbors[i].cmp(&mapping[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        targets.push(j);
                        i += 1;
                        j += 1;
                    }
                }
            }
            offsets.push(targets.len());
        }
        let edge_count = targets.len() / 2;
        Ok((
            Graph {
                offsets,
                targets,
                edge_count,
            },
            mapping,
        ))
    }

    /// Hop distances from `source`; `None` marks unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let next = dist[u].unwrap() + 1;
            for &v in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(next);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn connected_components(&self) -> Partition {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        Partition::from_labels(&label)
    }

    /// Collapses each community of `partition` into one weighted node.
    pub fn aggregate(&self, partition: &Partition) -> Result<WeightedAggregate, GraphError> {
        if partition.node_count() != self.node_count() {
            return Err(GraphError::PartitionSize {
                partition: partition.node_count(),
                graph: self.node_count(),
            });
        }
        Ok(WeightedAggregate::from_graph(self).aggregate(partition.membership()))
    }
}

/// Weighted graph whose nodes stand for groups of original nodes.
///
/// `adjacency` holds only links between distinct supernodes. The self-loop
/// weight of a supernode is **twice** the weight of the links it absorbed,
/// so the weighted degree of a supernode (cross weights plus self-loop)
/// equals the sum of the original degrees of its members, and the total
/// weighted degree stays `2m`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAggregate {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

impl WeightedAggregate {
    /// Unit-weight view of `graph` with no self-loops.
    pub fn from_graph(graph: &Graph) -> Self {
        let adjacency = (0..graph.node_count())
            .map(|u| graph.neighbors(u).iter().map(|&v| (v, 1.0)).collect())
            .collect();
        Self {
            adjacency,
            self_loops: vec![0.0; graph.node_count()],
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Links to other supernodes, sorted by target id.
    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    pub fn self_loop(&self, node: usize) -> f64 {
        self.self_loops[node]
    }

    pub fn weighted_degree(&self, node: usize) -> f64 {
        self.self_loops[node] + self.adjacency[node].iter().map(|&(_, w)| w).sum::<f64>()
    }

    /// Total link weight: cross links once each plus half of every self-loop.
    pub fn total_weight(&self) -> f64 {
        let cross: f64 = self
            .adjacency
            .iter()
            .flat_map(|list| list.iter().map(|&(_, w)| w))
            .sum::<f64>()
            / 2.0;
        cross + self.self_loops.iter().sum::<f64>() / 2.0
    }

    /// Collapses nodes sharing a label in `membership` (dense labels
    /// `0..k`) into one supernode each.
    pub fn aggregate(&self, membership: &[usize]) -> Self {
        let count = membership.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut self_loops = vec![0.0; count];
        let mut maps: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); count];
        for (u, list) in self.adjacency.iter().enumerate() {
            let cu = membership[u];
            self_loops[cu] += self.self_loops[u];
            for &(v, w) in list {
                let cv = membership[v];
                if cu == cv {
                    // Seen once from each endpoint, which yields the factor 2.
                    self_loops[cu] += w;
                } else {
                    *maps[cu].entry(cv).or_insert(0.0) += w;
                }
            }
        }
        Self {
            adjacency: maps.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn two_triangles_bridged() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
    }

    #[test]
    fn build_path_graph() {
        let g = path3();
        assert_eq!(g.degrees(), vec![1, 2, 1]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.neighbors(0), &[1]);
    }

    #[test]
    fn self_loop_and_range_rejected() {
        assert_eq!(
            Graph::from_edges(1, &[(0, 0)]),
            Err(GraphError::SelfLoop { node: 0 })
        );
        assert_eq!(
            Graph::from_edges(2, &[(0, 2)]),
            Err(GraphError::NodeOutOfRange {
                node: 2,
                node_count: 2
            })
        );
    }

    #[test]
    fn induced_triangle_from_triangle_with_pendant() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let (h, map) = g.induced_subgraph(&[0, 1, 2]).unwrap();
        assert_eq!(h.edge_count(), 3);
        assert_eq!(map, vec![0, 1, 2]);
    }

    #[test]
    fn induced_singleton_and_empty() {
        let g = cycle(5);
        let (h, _) = g.induced_subgraph(&[3]).unwrap();
        assert_eq!((h.node_count(), h.edge_count()), (1, 0));
        assert_eq!(g.induced_subgraph(&[]), Err(GraphError::EmptySubset));
    }

    #[test]
    fn induced_consecutive_cycle_nodes_form_path() {
        let g = cycle(5);
        let (h, map) = g.induced_subgraph(&[4, 0, 1]).unwrap();
        assert_eq!(map, vec![0, 1, 4]);
        // Expected edges by hand: 4-0 and 0-1, i.e. a path centred on node 0.
        let edges: Vec<_> = h.edges().map(|(a, b)| (map[a], map[b])).collect();
        assert_eq!(edges, vec![(0, 1), (0, 4)]);
    }

    #[test]
    fn bfs_examples() {
        assert_eq!(path3().bfs_distances(0), vec![Some(0), Some(1), Some(2)]);
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.bfs_distances(0)[2], None);
        let c = cycle(5);
        for s in 0..5 {
            let d = c.bfs_distances(s);
            let rotated: Vec<_> = (0..5).map(|k| d[(s + k) % 5].unwrap()).collect();
            assert_eq!(rotated, vec![0, 1, 2, 2, 1]);
        }
    }

    #[test]
    fn components() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(g.connected_components().sizes(), vec![3, 3]);
        assert_eq!(cycle(5).connected_components().community_count(), 1);
        assert_eq!(Graph::empty(4).connected_components().community_count(), 4);
    }

    #[test]
    fn aggregate_two_triangles() {
        let g = two_triangles_bridged();
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let agg = g.aggregate(&p).unwrap();
        assert_eq!(agg.node_count(), 2);
        assert_eq!(agg.neighbors(0), &[(1, 1.0)]);
        assert_eq!(agg.self_loop(0), 6.0);
        assert_eq!(agg.self_loop(1), 6.0);
        assert_eq!(agg.total_weight(), 7.0);
        assert_eq!(agg.weighted_degree(0), 7.0);
    }

    #[test]
    fn aggregate_singletons_and_whole() {
        let g = two_triangles_bridged();
        let agg = g.aggregate(&Partition::singletons(6)).unwrap();
        for u in 0..6 {
            let expected: Vec<_> = g.neighbors(u).iter().map(|&v| (v, 1.0)).collect();
            assert_eq!(agg.neighbors(u), expected.as_slice());
            assert_eq!(agg.self_loop(u), 0.0);
        }
        let whole = g.aggregate(&Partition::whole(6)).unwrap();
        assert_eq!(whole.node_count(), 1);
        assert_eq!(whole.self_loop(0), 14.0);
        assert_eq!(whole.total_weight(), 7.0);
    }
}
