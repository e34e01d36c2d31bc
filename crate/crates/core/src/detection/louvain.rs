//! Louvain modularity optimisation: local moves to a fixed point, then
//! aggregation of communities into supernodes, repeated.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, WeightedAggregate};
use crate::partition::Partition;

/// Gains closer than this are treated as equal, so a node stays put rather
/// than moving on round-off.
const GAIN_EPSILON: f64 = 1e-12;

pub fn louvain(graph: &Graph, seed: u64) -> Partition {
    louvain_with_levels(graph, seed).0
}

/// Also returns the number of aggregation levels that changed something.
pub fn louvain_with_levels(graph: &Graph, seed: u64) -> (Partition, usize) {
    let n = graph.node_count();
    if graph.edge_count() == 0 {
        return (Partition::singletons(n), 0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level_graph = WeightedAggregate::from_graph(graph);
    let mut membership: Vec<usize> = (0..n).collect();
    let mut levels = 0;
    let mut q = aggregate_modularity(&level_graph, &(0..n).collect::<Vec<_>>());
    loop {
        let Some(labels) = local_moves(&level_graph, &mut rng) else {
            break;
        };
        let new_q = aggregate_modularity(&level_graph, &labels);
        if new_q <= q + GAIN_EPSILON {
            break;
        }
        q = new_q;
        levels += 1;
        for c in membership.iter_mut() {
            *c = labels[*c];
        }
        level_graph = level_graph.aggregate(&labels);
    }
    (Partition::from_labels(&membership), levels)
}

/// One local-moving phase. Returns dense community labels, or `None` if no
/// node moved.
fn local_moves(g: &WeightedAggregate, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let n = g.node_count();
    let two_m = 2.0 * g.total_weight();
    let k: Vec<f64> = (0..n).map(|v| g.weighted_degree(v)).collect();
    let mut community: Vec<usize> = (0..n).collect();
    let mut total = k.clone();
    let mut weight_to = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut marked = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut any_move = false;
    loop {
        order.shuffle(rng);
        let mut moved = false;
        for &v in &order {
            let own = community[v];
            touched.clear();
            touched.push(own);
            marked[own] = true;
            for &(u, w) in g.neighbors(v) {
                let c = community[u];
                if !marked[c] {
                    marked[c] = true;
                    touched.push(c);
                }
                weight_to[c] += w;
            }
            total[own] -= k[v];
            let gain = |c: usize| weight_to[c] - total[c] * k[v] / two_m;
            let mut best = own;
            let mut best_gain = gain(own);
            for &c in &touched[1..] {
                let g = gain(c);
                if g > best_gain + GAIN_EPSILON {
                    best = c;
                    best_gain = g;
                }
            }
            total[best] += k[v];
            community[v] = best;
            if best != own {
                moved = true;
            }
            for &c in &touched {
                weight_to[c] = 0.0;
                marked[c] = false;
            }
        }
        if !moved {
            break;
        }
        any_move = true;
    }
    any_move.then(|| Partition::from_labels(&community).membership().to_vec())
}

fn aggregate_modularity(g: &WeightedAggregate, labels: &[usize]) -> f64 {
    let count = labels.iter().max().map_or(0, |&c| c + 1);
    let two_m = 2.0 * g.total_weight();
    let mut inside = vec![0.0; count];
    let mut total = vec![0.0; count];
    for v in 0..g.node_count() {
        let c = labels[v];
        total[c] += g.weighted_degree(v);
        inside[c] += g.self_loop(v);
        for &(u, w) in g.neighbors(v) {
            if labels[u] == c {
                inside[c] += w;
            }
        }
    }
    (0..count)
        .map(|c| inside[c] / two_m - (total[c] / two_m).powi(2))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::modularity;
    use crate::detection::tests::*;

    #[test]
    fn dumbbell_recovers_triangles() {
        for seed in 0..10 {
            assert_eq!(louvain(&dumbbell(), seed), triangles());
        }
    }

    #[test]
    fn ring_of_cliques_recovers_cliques() {
        let g = ring_of_cliques(4, 5);
        let expected = Partition::from_labels(&(0..20).map(|v| v / 5).collect::<Vec<_>>());
        for seed in 0..10 {
            assert_eq!(louvain(&g, seed), expected);
        }
        // The clique partition indeed beats merging neighbours.
        let merged = Partition::from_labels(&(0..20).map(|v| v / 10).collect::<Vec<_>>());
        assert!(modularity(&g, &expected).unwrap() > modularity(&g, &merged).unwrap());
    }

    #[test]
    fn aggregate_modularity_agrees_with_graph_modularity() {
        let g = ring_of_cliques(3, 4);
        let labels: Vec<usize> = (0..12).map(|v| (v / 3) % 3).collect();
        let direct = modularity(&g, &Partition::from_labels(&labels)).unwrap();
        let canonical = Partition::from_labels(&labels);
        let via = aggregate_modularity(&WeightedAggregate::from_graph(&g), canonical.membership());
        assert!((direct - via).abs() < 1e-12);
    }

    #[test]
    fn never_below_singletons() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let q = modularity(&g, &louvain(&g, 3)).unwrap();
        assert!(q >= modularity(&g, &Partition::singletons(5)).unwrap());
        assert_eq!(louvain(&Graph::empty(3), 0), Partition::singletons(3));
    }
}
