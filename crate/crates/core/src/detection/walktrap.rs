//! WalkTrap (Pons and Latapy): agglomerative clustering on a random-walk
//! distance.
//!
//! Every node gets a self-loop, so `d(i) = k_i + 1`. The distance between
//! two communities is `r^2 = Σ_k (P^t_{C1 k} - P^t_{C2 k})^2 / d(k)` where
//! `P^t_C` is the distribution of a `t`-step walk started uniformly in `C`.
//! Linked communities are merged in order of the smallest increase
//! `Δσ = |C1||C2| / (|C1| + |C2|) · r^2 / n` and the dendrogram is cut
//! where modularity peaks.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use super::dendrogram::{Dendrogram, Merge};
use crate::graph::Graph;
use crate::partition::Partition;

/// Upper bound on memory held by cached walk distributions. Evicted
/// distributions are recomputed from the community's members on demand.
const CACHE_BYTES: usize = 1 << 30;

pub fn walktrap(graph: &Graph, steps: usize) -> (Partition, Dendrogram) {
    let n = graph.node_count();
    if graph.edge_count() == 0 {
        return (Partition::singletons(n), Dendrogram::new(n, 0.0));
    }
    let m = graph.edge_count() as f64;
    let walker = Walker::new(graph, steps);
    let mut cache = Cache::new(n);
    let mut members: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut share: Vec<f64> = (0..n).map(|v| graph.degree(v) as f64 / (2.0 * m)).collect();
    let mut alive = vec![true; n];
    // Per linked pair: merge cost and number of links between them.
    let mut links: Vec<BTreeMap<usize, (f64, f64)>> = vec![BTreeMap::new(); n];
    let mut heap = BinaryHeap::new();

    for u in 0..n {
        if graph.neighbors(u).iter().all(|&v| v < u) {
            continue;
        }
        let pu = cache.get(u, &members, &walker).clone();
        for &v in graph.neighbors(u) {
            if v < u {
                continue;
            }
            let r2 = pu.squared_distance(cache.get(v, &members, &walker));
            let cost = 0.5 * r2 / n as f64;
            links[u].insert(v, (cost, 1.0));
            links[v].insert(u, (cost, 1.0));
            heap.push(Pending { cost, a: u, b: v });
        }
    }

    let mut q: f64 = -share.iter().map(|a| a * a).sum::<f64>();
    let mut dendrogram = Dendrogram::new(n, q);
    while let Some(Pending { cost, a, b }) = heap.pop() {
        if !alive[a] || !alive[b] || links[a].get(&b).map(|e| e.0.to_bits()) != Some(cost.to_bits())
        {
            continue;
        }
        let (s1, s2) = (members[a].len() as f64, members[b].len() as f64);
        let s3 = s1 + s2;
        let (_, between) = links[a][&b];
        q += between / m - 2.0 * share[a] * share[b];

        let merged = match (cache.peek(a), cache.peek(b)) {
            (Some(pa), Some(pb)) => Some(ProbVector::mix(pa, s1 / s3, pb, s2 / s3, n)),
            _ => None,
        };
        let moved = std::mem::take(&mut members[b]);
        members[a].extend(moved);
        share[a] += share[b];
        alive[b] = false;
        cache.remove(b);
        cache.remove(a);
        if let Some(p) = merged {
            cache.insert(a, p);
        }
        dendrogram.merges.push(Merge {
            into: a,
            absorbed: b,
            modularity: q,
        });

        let from_a = std::mem::take(&mut links[a]);
        let from_b = std::mem::take(&mut links[b]);
        let mut neighbours: BTreeMap<usize, (Option<(f64, f64)>, Option<(f64, f64)>)> =
            BTreeMap::new();
        for (c, e) in from_a {
            if c != b {
                neighbours.entry(c).or_default().0 = Some(e);
            }
        }
        for (c, e) in from_b {
            if c != a {
                neighbours.entry(c).or_default().1 = Some(e);
            }
        }
        let d12 = cost;
        let mut pa: Option<ProbVector> = None;
        for (c, (ea, eb)) in neighbours {
            let sc = members[c].len() as f64;
            let (new_cost, new_links) = match (ea, eb) {
                (Some((d1, l1)), Some((d2, l2))) => (
                    ((s1 + sc) * d1 + (s2 + sc) * d2 - sc * d12) / (s3 + sc),
                    l1 + l2,
                ),
                (Some((_, l)), None) | (None, Some((_, l))) => {
                    let pa = pa.get_or_insert_with(|| cache.get(a, &members, &walker).clone());
                    let r2 = pa.squared_distance(cache.get(c, &members, &walker));
                    (s3 * sc / (s3 + sc) * r2 / n as f64, l)
                }
                (None, None) => unreachable!(),
            };
            links[c].remove(&a);
            links[c].remove(&b);
            links[c].insert(a, (new_cost, new_links));
            links[a].insert(c, (new_cost, new_links));
            let (x, y) = (a.min(c), a.max(c));
            heap.push(Pending {
                cost: new_cost,
                a: x,
                b: y,
            });
        }
    }
    let (best, _) = dendrogram.best_cut();
    (dendrogram.cut(best), dendrogram)
}

/// Random-walk distance `r` between nodes `u` and `v` after `steps` steps.
pub fn walktrap_distance(graph: &Graph, steps: usize, u: usize, v: usize) -> f64 {
    let walker = Walker::new(graph, steps);
    let pu = walker.walk(&[u]);
    pu.squared_distance(&walker.walk(&[v])).sqrt()
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    cost: f64,
    a: usize,
    b: usize,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    /// Reversed so the max-heap yields the cheapest merge, then the lowest
    /// ids.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.a.cmp(&self.a))
            .then_with(|| other.b.cmp(&self.b))
    }
}

struct Walker<'a> {
    graph: &'a Graph,
    steps: usize,
    weight: Vec<f64>,
}

impl<'a> Walker<'a> {
    fn new(graph: &'a Graph, steps: usize) -> Self {
        let weight = (0..graph.node_count())
            .map(|v| 1.0 / (graph.degree(v) + 1) as f64)
            .collect();
        Self {
            graph,
            steps,
            weight,
        }
    }

    /// `P^t` started uniformly on `start`, each entry scaled by
    /// `1 / sqrt(d(k))` so distances become plain Euclidean ones.
    fn walk(&self, start: &[usize]) -> ProbVector {
        let n = self.graph.node_count();
        let mut current = vec![0.0; n];
        let mut support: Vec<usize> = start.to_vec();
        for &v in start {
            current[v] = 1.0 / start.len() as f64;
        }
        let mut next = vec![0.0; n];
        let mut next_support = Vec::new();
        for _ in 0..self.steps {
            for &i in &support {
                let w = current[i] * self.weight[i];
                current[i] = 0.0;
                for &j in std::iter::once(&i).chain(self.graph.neighbors(i)) {
                    if next[j] == 0.0 {
                        next_support.push(j);
                    }
                    next[j] += w;
                }
            }
            std::mem::swap(&mut current, &mut next);
            std::mem::swap(&mut support, &mut next_support);
            next_support.clear();
            // A fixed visiting order makes the sums independent of where
            // the walk started.
            support.sort_unstable();
        }
        for &k in &support {
            current[k] *= self.weight[k].sqrt();
        }
        if support.len() * 2 > n {
            ProbVector::Dense(current.iter().map(|&x| x as f32).collect())
        } else {
            ProbVector::Sparse(
                support
                    .iter()
                    .map(|&k| (k as u32, current[k] as f32))
                    .collect(),
            )
        }
    }
}

/// Walk distribution stored sparse or dense, whichever is smaller.
#[derive(Debug, Clone)]
enum ProbVector {
    Sparse(Vec<(u32, f32)>),
    Dense(Vec<f32>),
}

impl ProbVector {
    fn bytes(&self) -> usize {
        match self {
            ProbVector::Sparse(v) => v.len() * 8,
            ProbVector::Dense(v) => v.len() * 4,
        }
    }

    fn squared_distance(&self, other: &ProbVector) -> f64 {
        use ProbVector::*;
        match (self, other) {
            (Dense(x), Dense(y)) => x
                .iter()
                .zip(y)
                .map(|(&a, &b)| {
                    let d = (a - b) as f64;
                    d * d
                })
                .sum(),
            (Dense(x), Sparse(y)) | (Sparse(y), Dense(x)) => {
                let mut total: f64 = x.iter().map(|&a| (a as f64) * (a as f64)).sum();
                for &(k, b) in y {
                    let a = x[k as usize] as f64;
                    let b = b as f64;
                    total += (a - b) * (a - b) - a * a;
                }
                total.max(0.0)
            }
            (Sparse(x), Sparse(y)) => {
                let (mut i, mut j, mut total) = (0, 0, 0.0f64);
                while i < x.len() || j < y.len() {
                    let d = match (x.get(i), y.get(j)) {
                        (Some(&(r, a)), Some(&(s, b))) if r == s => {
                            i += 1;
                            j += 1;
                            a as f64 - b as f64
                        }
                        (Some(&(r, a)), Some(&(s, _))) if r < s => {
                            i += 1;
                            a as f64
                        }
                        (Some(_), Some(&(_, b))) | (None, Some(&(_, b))) => {
                            j += 1;
                            b as f64
                        }
                        (Some(&(_, a)), None) => {
                            i += 1;
                            a as f64
                        }
                        (None, None) => unreachable!(),
                    };
                    total += d * d;
                }
                total
            }
        }
    }

    fn mix(x: &ProbVector, wx: f64, y: &ProbVector, wy: f64, n: usize) -> ProbVector {
        let mut dense = vec![0.0f64; n];
        let mut add = |p: &ProbVector, w: f64| match p {
            ProbVector::Dense(v) => {
                for (d, &a) in dense.iter_mut().zip(v) {
                    *d += w * a as f64;
                }
            }
            ProbVector::Sparse(v) => {
                for &(k, a) in v {
                    dense[k as usize] += w * a as f64;
                }
            }
        };
        add(x, wx);
        add(y, wy);
        let nnz = dense.iter().filter(|&&a| a != 0.0).count();
        if nnz * 2 > n {
            ProbVector::Dense(dense.into_iter().map(|a| a as f32).collect())
        } else {
            ProbVector::Sparse(
                dense
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a != 0.0)
                    .map(|(k, &a)| (k as u32, a as f32))
                    .collect(),
            )
        }
    }
}

/// Walk distributions per community with first-in first-out eviction.
struct Cache {
    slots: Vec<Option<ProbVector>>,
    order: VecDeque<usize>,
    bytes: usize,
}

impl Cache {
    fn new(n: usize) -> Self {
        Self {
            slots: vec![None; n],
            order: VecDeque::new(),
            bytes: 0,
        }
    }

    fn peek(&self, c: usize) -> Option<&ProbVector> {
        self.slots[c].as_ref()
    }

    fn remove(&mut self, c: usize) {
        if let Some(p) = self.slots[c].take() {
            self.bytes -= p.bytes();
        }
    }

    fn insert(&mut self, c: usize, p: ProbVector) {
        self.remove(c);
        self.bytes += p.bytes();
        self.slots[c] = Some(p);
        self.order.push_back(c);
        // Keep the newest entry even if it alone exceeds the budget.
        while self.bytes > CACHE_BYTES && self.order.len() > 1 {
            let old = self.order.pop_front().unwrap();
            if old != c {
                self.remove(old);
            } else {
                self.order.push_back(old);
            }
        }
        if self.order.len() > 4 * self.slots.len() {
            let slots = &self.slots;
            self.order.retain(|&x| slots[x].is_some());
        }
    }

    fn get(&mut self, c: usize, members: &[Vec<usize>], walker: &Walker) -> &ProbVector {
        if self.slots[c].is_none() {
            let p = walker.walk(&members[c]);
            self.insert(c, p);
        }
        self.slots[c].as_ref().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::modularity;
    use crate::detection::tests::*;

    #[test]
    fn dumbbell_recovers_triangles() {
        let (p, d) = walktrap(&dumbbell(), 4);
        assert_eq!(p, triangles());
        assert!((d.best_cut().1 - 5.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn clique_is_one_community() {
        assert_eq!(walktrap(&clique(6), 4).0.community_count(), 1);
    }

    #[test]
    fn ring_of_cliques_recovers_cliques() {
        let g = ring_of_cliques(5, 5);
        let expected = Partition::from_labels(&(0..25).map(|v| v / 5).collect::<Vec<_>>());
        assert_eq!(walktrap(&g, 4).0, expected);
    }

    #[test]
    fn structurally_equivalent_nodes_are_at_distance_zero() {
        // Nodes 1 and 2 are linked and share every other neighbor.
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        assert_eq!(walktrap_distance(&g, 4, 1, 2), 0.0);
        assert!(walktrap_distance(&g, 4, 0, 4) > 0.0);
    }

    #[test]
    fn distance_matches_dense_definition() {
        let g = ring_of_cliques(3, 4);
        let n = g.node_count();
        let d: Vec<f64> = (0..n).map(|v| (g.degree(v) + 1) as f64).collect();
        let step = |x: &[f64]| -> Vec<f64> {
            let mut y = vec![0.0; n];
            for i in 0..n {
                y[i] += x[i] / d[i];
                for &j in g.neighbors(i) {
                    y[j] += x[i] / d[i];
                }
            }
            y
        };
        let walk = |s: usize| {
            let mut x = vec![0.0; n];
            x[s] = 1.0;
            for _ in 0..3 {
                x = step(&x);
            }
            x
        };
        let (a, b) = (walk(0), walk(7));
        let r2: f64 = (0..n).map(|k| (a[k] - b[k]).powi(2) / d[k]).sum();
        assert!((walktrap_distance(&g, 3, 0, 7) - r2.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn dendrogram_modularities_are_exact() {
        let g = ring_of_cliques(4, 4);
        let (_, d) = walktrap(&g, 4);
        assert_eq!(d.len(), 15);
        for (i, merge) in d.merges.iter().enumerate() {
            let q = modularity(&g, &d.cut(i + 1)).unwrap();
            assert!((q - merge.modularity).abs() < 1e-12);
        }
    }
}
