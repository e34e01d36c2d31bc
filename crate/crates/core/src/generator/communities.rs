//! Community sizes and node-to-community assignment.

use rand::seq::SliceRandom;
use rand::Rng;

use super::GeneratorError;
use crate::partition::Partition;

const SIZE_DRAW_ATTEMPTS: usize = 100_000;

/// Power-law community sizes on `[min_size, max_size]` with exponent `beta`
/// summing to exactly `n`.
///
/// A draw is kept only if what is left afterwards is zero or can still hold
/// a community of at least `min_size`; otherwise it is redrawn.
pub fn sample_community_sizes<R: Rng + ?Sized>(
    n: usize,
    beta: f64,
    min_size: usize,
    max_size: usize,
    rng: &mut R,
) -> Result<Vec<usize>, GeneratorError> {
    if min_size == 0 || min_size > max_size || min_size > n {
        return Err(GeneratorError::InfeasibleSizeBounds {
            min_size,
            max_size,
            n,
        });
    }
    let mut cumulative = Vec::with_capacity(max_size - min_size + 1);
    let mut acc = 0.0;
    for s in min_size..=max_size {
        acc += (s as f64).powf(-beta);
        cumulative.push(acc);
    }
    let draw = |rng: &mut R| {
        let u = rng.random::<f64>() * acc;
        min_size
            + cumulative
                .partition_point(|&c| c <= u)
                .min(cumulative.len() - 1)
    };
    let mut sizes = Vec::new();
    let mut remaining = n;
    let mut attempts = 0;
    while remaining > 0 {
        attempts += 1;
        if attempts > SIZE_DRAW_ATTEMPTS {
            return Err(GeneratorError::InfeasibleSizeBounds {
                min_size,
                max_size,
                n,
            });
        }
        let s = draw(rng);
        if s == remaining || (s < remaining && remaining - s >= min_size) {
            sizes.push(s);
            remaining -= s;
        }
    }
    Ok(sizes)
}

/// Places every node in a community whose size is at least its internal
/// degree plus one, so the node and all its internal neighbors fit.
///
/// Nodes are placed most-constrained first (highest internal degree, ties in
/// random order), each into a random community that is large enough and
/// still has room, chosen with probability proportional to that room.
/// Because the admissible communities for a node always include those of
/// every node placed before it, this ordering fails only when no valid
/// assignment exists at all.
pub fn assign_nodes<R: Rng + ?Sized>(
    sizes: &[usize],
    internal_degrees: &[usize],
    rng: &mut R,
) -> Result<Partition, GeneratorError> {
    let n = internal_degrees.len();
    let total: usize = sizes.iter().sum();
    if total != n {
        return Err(GeneratorError::SizeSumMismatch { sizes: total, n });
    }
    // Community ids ordered by decreasing size: the admissible set for any
    // requirement is a prefix of this order.
    let mut by_size: Vec<usize> = (0..sizes.len()).collect();
    by_size.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut room: Vec<usize> = by_size.iter().map(|&c| sizes[c]).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.sort_by(|&a, &b| internal_degrees[b].cmp(&internal_degrees[a]));

    let mut labels = vec![0usize; n];
    for node in order {
        let need = internal_degrees[node] + 1;
        let admissible = by_size.partition_point(|&c| sizes[c] >= need);
        let free: usize = room[..admissible].iter().sum();
        if free == 0 {
            return Err(GeneratorError::AssignmentInfeasible {
                node,
                internal_degree: internal_degrees[node],
            });
        }
        let mut pick = rng.random_range(0..free);
        let slot = room[..admissible]
            .iter()
            .position(|&r| {
                if pick < r {
                    true
                } else {
                    pick -= r;
                    false
                }
            })
            .unwrap();
        room[slot] -= 1;
        labels[node] = by_size[slot];
    }
    Ok(Partition::from_labels(&labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn forced_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            sample_community_sizes(10, 2.0, 5, 5, &mut rng).unwrap(),
            vec![5, 5]
        );
    }

    #[test]
    fn sizes_sum_and_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sizes = sample_community_sizes(25_000, 2.0, 3, 2300, &mut rng).unwrap();
        assert_eq!(sizes.iter().sum::<usize>(), 25_000);
        assert!(sizes.iter().all(|&s| (3..=2300).contains(&s)));
        let max = *sizes.iter().max().unwrap();
        assert!(max > 230, "largest community {max}");
    }

    #[test]
    fn infeasible_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_community_sizes(5, 2.0, 6, 10, &mut rng).is_err());
        assert!(sample_community_sizes(7, 2.0, 5, 5, &mut rng).is_err());
    }

    #[test]
    fn zero_internal_degrees_fill_any_way() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = assign_nodes(&[3, 2, 5], &[0; 10], &mut rng).unwrap();
        let mut sizes = p.sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 3, 5]);
    }

    #[test]
    fn constrained_node_lands_in_only_feasible_community() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut kint = vec![0; 15];
            kint[7] = 9;
            let p = assign_nodes(&[5, 10], &kint, &mut rng).unwrap();
            let c = p.community_of(7);
            assert_eq!(p.sizes()[c], 10);
        }
    }

    #[test]
    fn infeasible_assignment_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // Two nodes both need a community of 4, but only one exists and the
        // other community is too small.
        let err = assign_nodes(&[4, 2], &[3, 3, 3, 3, 3, 0], &mut rng).unwrap_err();
        assert!(matches!(err, GeneratorError::AssignmentInfeasible { .. }));
        assert!(assign_nodes(&[4], &[0; 5], &mut rng).is_err());
    }
}
