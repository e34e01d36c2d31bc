//! Asynchronous single-label propagation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::partition::Partition;

#[derive(Debug, Clone)]
pub struct LabelPropagationOutcome {
    pub partition: Partition,
    pub sweeps: usize,
    /// False when the sweep cap was reached first.
    pub converged: bool,
}

/// Every node starts with its own label. In each sweep the nodes, in random
/// order, adopt the label most frequent among their neighbors. A node whose
/// label is already among the most frequent ones keeps it; otherwise ties
/// are broken uniformly at random. Stops after the first sweep at whose end
/// every node holds one of its most frequent neighbor labels.
pub fn label_propagation(graph: &Graph, seed: u64, max_sweeps: usize) -> LabelPropagationOutcome {
    let n = graph.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).filter(|&v| graph.degree(v) > 0).collect();
    let mut counts = vec![0usize; n];
    let mut seen: Vec<usize> = Vec::new();
    let mut best: Vec<usize> = Vec::new();

    let mut sweeps = 0;
    let mut converged = order.is_empty();
    while !converged && sweeps < max_sweeps {
        sweeps += 1;
        order.shuffle(&mut rng);
        for &v in &order {
            majority(graph, v, &labels, &mut counts, &mut seen, &mut best);
            if !best.contains(&labels[v]) {
                labels[v] = best[rng.random_range(0..best.len())];
            }
        }
        converged = order.iter().all(|&v| {
            majority(graph, v, &labels, &mut counts, &mut seen, &mut best);
            best.contains(&labels[v])
        });
    }
    LabelPropagationOutcome {
        partition: Partition::from_labels(&labels),
        sweeps,
        converged,
    }
}

/// Fills `best` with the most frequent neighbor labels of `v`, in order of
/// first appearance.
fn majority(
    graph: &Graph,
    v: usize,
    labels: &[usize],
    counts: &mut [usize],
    seen: &mut Vec<usize>,
    best: &mut Vec<usize>,
) {
    seen.clear();
    best.clear();
    let mut top = 0;
    for &u in graph.neighbors(v) {
        let l = labels[u];
        if counts[l] == 0 {
            seen.push(l);
        }
        counts[l] += 1;
        top = top.max(counts[l]);
    }
    for &l in seen.iter() {
        if counts[l] == top {
            best.push(l);
        }
        counts[l] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::tests::*;

    #[test]
    fn dumbbell_mostly_recovers_triangles() {
        let hits = (0..100)
            .filter(|&seed| label_propagation(&dumbbell(), seed, 100).partition == triangles())
            .count();
        assert!(hits >= 90, "{hits}/100");
    }

    #[test]
    fn clique_collapses_to_one_label() {
        let out = label_propagation(&clique(7), 1, 100);
        assert!(out.converged);
        assert_eq!(out.partition.community_count(), 1);
    }

    #[test]
    fn edgeless_graph_keeps_singletons() {
        let out = label_propagation(&Graph::empty(5), 0, 100);
        assert_eq!(out.partition, Partition::singletons(5));
        assert_eq!(out.sweeps, 0);
        assert!(out.converged);
    }

    #[test]
    fn converged_nodes_hold_a_majority_label() {
        let g = ring_of_cliques(6, 5);
        let out = label_propagation(&g, 9, 100);
        assert!(out.converged);
        let p = &out.partition;
        for v in 0..g.node_count() {
            let mut tally = std::collections::HashMap::new();
            for &u in g.neighbors(v) {
                *tally.entry(p.community_of(u)).or_insert(0) += 1;
            }
            let top = *tally.values().max().unwrap();
            assert_eq!(tally.get(&p.community_of(v)).copied().unwrap_or(0), top);
        }
    }
}
