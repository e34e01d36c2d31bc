//! Configuration model with degree-preserving repair of self-loops and
//! parallel edges.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::GeneratorError;
use crate::graph::Graph;

const MATCHING_ATTEMPTS: usize = 5;
const REPAIR_ROUNDS: usize = 200;
const SWAPS_PER_BAD_EDGE: usize = 50;

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Random simple graph with exactly the given degree sequence.
///
/// Stubs are matched uniformly at random; every self-loop or parallel edge
/// is then swapped against a random other edge (`(u,v),(x,y) -> (u,x),(v,y)`)
/// until the graph is simple. If repair does not finish within its budget
/// the matching is redrawn a few times before giving up.
pub fn configuration_model<R: Rng + ?Sized>(
    degrees: &[usize],
    rng: &mut R,
) -> Result<Graph, GeneratorError> {
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(GeneratorError::OddDegreeSum(total));
    }
    let mut remaining = 0;
    for _ in 0..MATCHING_ATTEMPTS {
        let mut stubs: Vec<usize> = degrees
            .iter()
            .enumerate()
            .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
            .collect();
        stubs.shuffle(rng);
        let mut edges: Vec<(usize, usize)> = stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        remaining = repair(&mut edges, rng);
        if remaining == 0 {
            return Ok(Graph::from_edges(degrees.len(), &edges)
                .expect("repaired edges are simple and in range"));
        }
    }
    Err(GeneratorError::RepairFailed { remaining })
}

/// Returns the number of offending edges left.
fn repair<R: Rng + ?Sized>(edges: &mut [(usize, usize)], rng: &mut R) -> usize {
    let mut counts: HashMap<(usize, usize), u32> = HashMap::with_capacity(edges.len());
    for &(u, v) in edges.iter() {
        *counts.entry(key(u, v)).or_insert(0) += 1;
    }
    let is_bad = |e: (usize, usize), counts: &HashMap<(usize, usize), u32>| {
        e.0 == e.1 || counts[&key(e.0, e.1)] > 1
    };
    let m = edges.len();
    for _ in 0..REPAIR_ROUNDS {
        let bad: Vec<usize> = (0..m).filter(|&i| is_bad(edges[i], &counts)).collect();
        if bad.is_empty() {
            return 0;
        }
        if m < 2 {
            return bad.len();
        }
        for i in bad {
            if !is_bad(edges[i], &counts) {
                continue;
            }
            for _ in 0..SWAPS_PER_BAD_EDGE {
                let j = rng.random_range(0..m);
                if j == i {
                    continue;
                }
                let (u, v) = edges[i];
                let (mut x, mut y) = edges[j];
                if rng.random::<bool>() {
                    std::mem::swap(&mut x, &mut y);
                }
                let (a, b) = (key(u, x), key(v, y));
                if u == x || v == y || a == b {
                    continue;
                }
                if counts.get(&a).is_some_and(|&c| c > 0) || counts.get(&b).is_some_and(|&c| c > 0)
                {
                    continue;
                }
                for old in [key(u, v), key(x, y)] {
                    *counts.get_mut(&old).unwrap() -= 1;
                }
                *counts.entry(a).or_insert(0) += 1;
                *counts.entry(b).or_insert(0) += 1;
                edges[i] = (u, x);
                edges[j] = (v, y);
                break;
            }
        }
    }
    (0..m).filter(|&i| is_bad(edges[i], &counts)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn single_edge() {
        let g = configuration_model(&[1, 1], &mut rng(0)).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn triangle_is_the_only_realisation() {
        for seed in 0..20 {
            let g = configuration_model(&[2, 2, 2], &mut rng(seed)).unwrap();
            assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        }
    }

    #[test]
    fn k4_is_the_only_realisation() {
        // The simple graphs on 4 labelled nodes with all degrees 3: only K4,
        // since each node must be adjacent to all three others.
        for seed in 0..20 {
            let g = configuration_model(&[3, 3, 3, 3], &mut rng(seed)).unwrap();
            assert_eq!(g.edge_count(), 6);
            assert_eq!(g.degrees(), vec![3, 3, 3, 3]);
        }
    }

    #[test]
    fn degrees_are_exact_on_heavy_tailed_sequences() {
        let mut r = rng(7);
        let degrees =
            super::super::degrees::sample_powerlaw_degrees(3000, 8.0, 300, 2.5, &mut r).unwrap();
        let g = configuration_model(&degrees, &mut r).unwrap();
        assert_eq!(g.degrees(), degrees);
    }

    #[test]
    fn impossible_sequences_fail() {
        assert!(matches!(
            configuration_model(&[1, 1, 1], &mut rng(0)),
            Err(GeneratorError::OddDegreeSum(3))
        ));
        assert!(matches!(
            configuration_model(&[2, 0], &mut rng(0)),
            Err(GeneratorError::RepairFailed { .. })
        ));
    }
}
