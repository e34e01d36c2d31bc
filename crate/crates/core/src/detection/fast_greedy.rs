//! Greedy modularity agglomeration (Clauset, Newman and Moore).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use super::dendrogram::{Dendrogram, Merge};
use crate::graph::Graph;
use crate::partition::Partition;

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    from: usize,
    to: usize,
    version: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.from.cmp(&self.from))
            .then_with(|| other.to.cmp(&self.to))
    }
}

/// Repeatedly merges the pair of linked communities with the largest
/// modularity gain (or smallest loss) until no linked pair is left, then
/// cuts the dendrogram where modularity peaks.
pub fn fast_greedy(graph: &Graph) -> (Partition, Dendrogram) {
    let n = graph.node_count();
    let m = graph.edge_count() as f64;
    if graph.edge_count() == 0 {
        return (Partition::singletons(n), Dendrogram::new(n, 0.0));
    }
    let mut share: Vec<f64> = (0..n).map(|v| graph.degree(v) as f64 / (2.0 * m)).collect();
    let mut links: Vec<BTreeMap<usize, f64>> = (0..n)
        .map(|v| graph.neighbors(v).iter().map(|&u| (u, 1.0)).collect())
        .collect();
    let mut alive = vec![true; n];
    let mut version = vec![0u32; n];
    let mut heap = BinaryHeap::new();

    let best_of = |c: usize, links: &[BTreeMap<usize, f64>], share: &[f64], version: &[u32]| {
        links[c]
            .iter()
            .map(|(&k, &w)| Candidate {
                gain: w / m - 2.0 * share[c] * share[k],
                from: c,
                to: k,
                version: version[c],
            })
            .max()
    };
    for v in 0..n {
        heap.extend(best_of(v, &links, &share, &version));
    }

    let mut q: f64 = -share.iter().map(|a| a * a).sum::<f64>();
    let mut dendrogram = Dendrogram::new(n, q);
    while let Some(c) = heap.pop() {
        if !alive[c.from] || version[c.from] != c.version || !alive[c.to] {
            continue;
        }
        // Keep the community with more neighbors to move fewer entries.
        let (keep, gone) = if links[c.from].len() >= links[c.to].len() {
            (c.from, c.to)
        } else {
            (c.to, c.from)
        };
        let moved = std::mem::take(&mut links[gone]);
        links[keep].remove(&gone);
        for (x, w) in moved {
            if x == keep {
                continue;
            }
            *links[keep].entry(x).or_insert(0.0) += w;
            links[x].remove(&gone);
            *links[x].entry(keep).or_insert(0.0) += w;
        }
        share[keep] += share[gone];
        alive[gone] = false;
        q += c.gain;
        dendrogram.merges.push(Merge {
            into: keep,
            absorbed: gone,
            modularity: q,
        });

        let touched: Vec<usize> = std::iter::once(keep)
            .chain(links[keep].keys().copied())
            .collect();
        for x in touched {
            version[x] += 1;
            heap.extend(best_of(x, &links, &share, &version));
        }
    }
    let (steps, _) = dendrogram.best_cut();
    (dendrogram.cut(steps), dendrogram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::modularity;
    use crate::detection::tests::*;

    #[test]
    fn dumbbell_recovers_triangles() {
        let (p, d) = fast_greedy(&dumbbell());
        assert_eq!(p, triangles());
        assert!((d.best_cut().1 - 5.0 / 14.0).abs() < 1e-12);
        assert_eq!(d.len(), 5);
    }

    #[test]
    fn dendrogram_modularity_matches_recomputation() {
        let g = ring_of_cliques(5, 4);
        let (_, d) = fast_greedy(&g);
        for steps in 0..=d.len() {
            let expected = if steps == 0 {
                d.initial_modularity
            } else {
                d.merges[steps - 1].modularity
            };
            let q = modularity(&g, &d.cut(steps)).unwrap();
            assert!((q - expected).abs() < 1e-12, "step {steps}");
        }
    }

    #[test]
    fn clique_and_edgeless() {
        let (p, _) = fast_greedy(&clique(6));
        assert_eq!(p.community_count(), 1);
        let (p, d) = fast_greedy(&Graph::empty(4));
        assert_eq!(p, Partition::singletons(4));
        assert!(d.is_empty());
    }

    #[test]
    fn components_stay_apart() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let (p, d) = fast_greedy(&g);
        assert_eq!(d.len(), 4);
        assert_eq!(p, Partition::from_labels(&[0, 0, 0, 1, 1, 1]));
    }
}
