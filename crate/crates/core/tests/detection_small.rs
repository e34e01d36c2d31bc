//! Exhaustive checks on graphs of at most 8 nodes.

use commbench::detection::{fast_greedy, modularity};
use commbench::{Graph, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                let next = p.iter().copied().max().map_or(0, |m| m + 1);
                (0..=next).map(move |l| {
                    let mut q = p.clone();
                    q.push(l);
                    q
                })
            })
            .collect();
    }
    out
}

#[test]
fn bell_numbers() {
    let counts: Vec<usize> = (1..=8).map(|n| all_partitions(n).len()).collect();
    assert_eq!(counts, vec![1, 2, 5, 15, 52, 203, 877, 4140]);
}

#[test]
fn fast_greedy_stays_close_to_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut tested = 0;
    while tested < 60 {
        let n = rng.random_range(3..=8);
        let density = rng.random_range(0.2..0.7);
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| rng.random_bool(density))
            .collect();
        if edges.is_empty() {
            continue;
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let best = all_partitions(n)
            .iter()
            .map(|l| modularity(&g, &Partition::from_labels(l)).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let q = modularity(&g, &fast_greedy(&g).0).unwrap();
        assert!(q <= best + 1e-12);
        assert!(best - q <= 0.15, "{edges:?}: greedy {q}, optimum {best}");
        tested += 1;
    }
}
