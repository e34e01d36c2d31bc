//! Degree-preserving edge swaps that move each node's internal degree
//! toward its target.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mixing::internal_degree_targets;
use crate::graph::Graph;
use crate::partition::Partition;

/// Attempt budget per edge.
pub const ATTEMPTS_PER_EDGE: usize = 200;
/// Give up once this many consecutive attempts fail (and at least
/// `STALL_FACTOR` attempts per unsatisfied node).
const STALL_MIN: usize = 200_000;
const STALL_FACTOR: usize = 200;
/// Community members sampled when looking for a partner that also lacks
/// internal links.
const PARTNER_TRIES: usize = 8;
/// Chance of taking a swap that leaves the deviation unchanged. Such moves
/// let an unsatisfied node walk off a plateau where every single swap
/// would help one endpoint and hurt another.
const NEUTRAL_ACCEPTANCE: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct RewireOutcome {
    pub graph: Graph,
    pub internal_degrees: Vec<usize>,
    pub stats: RewireStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewireStats {
    pub accepted_swaps: usize,
    pub attempts: usize,
    /// Nodes whose internal degree still differs from its target.
    pub unsatisfied_nodes: usize,
    /// Mean over non-isolated nodes of `|k_int - target| / k`.
    pub mean_deviation: f64,
    pub converged: bool,
}

/// Rewires toward `round((1 - mu) k)` internal links per node.
pub fn rewire_to_mixing<R: Rng + ?Sized>(
    graph: &Graph,
    partition: &Partition,
    mixing: &[f64],
    rng: &mut R,
) -> RewireOutcome {
    let targets = internal_degree_targets(&graph.degrees(), mixing);
    rewire_to_internal_degrees(graph, partition, &targets, rng)
}

/// Greedy swaps `(a,b),(c,d) -> (a,c),(b,d)` or `(a,d),(c,b)` that never
/// create a self-loop or a parallel edge. A swap is taken when it lowers
/// the total `|k_int - target|`; one that leaves the total unchanged is
/// taken with probability one half. The stall counter only resets on
/// strict improvements.
///
/// Each attempt starts from a random unsatisfied node. A node lacking
/// internal links trades one of its external edges against an edge of a
/// random member of its own community; a node with too many trades one of
/// its internal edges against an edge of another random node.
pub fn rewire_to_internal_degrees<R: Rng + ?Sized>(
    graph: &Graph,
    partition: &Partition,
    targets: &[usize],
    rng: &mut R,
) -> RewireOutcome {
    let mut state = State::new(graph, partition, targets);
    let budget = ATTEMPTS_PER_EDGE * graph.edge_count();
    let mut attempts = 0;
    let mut accepted = 0;
    let mut since_success = 0;
    while !state.unsatisfied.is_empty() && attempts < budget {
        attempts += 1;
        let step = state.attempt(rng);
        if !matches!(step, Step::Rejected) {
            accepted += 1;
        }
        if matches!(step, Step::Improved) {
            since_success = 0;
        } else {
            since_success += 1;
            if since_success >= STALL_MIN.max(STALL_FACTOR * state.unsatisfied.len()) {
                break;
            }
        }
    }
    let stats = RewireStats {
        accepted_swaps: accepted,
        attempts,
        unsatisfied_nodes: state.unsatisfied.len(),
        mean_deviation: state.mean_deviation(),
        converged: state.unsatisfied.is_empty(),
    };
    RewireOutcome {
        graph: state.to_graph(),
        internal_degrees: state.internal,
        stats,
    }
}

enum Step {
    Improved,
    Neutral,
    Rejected,
}

struct State<'a> {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    edges: HashSet<u64>,
    community: &'a [usize],
    members: Vec<Vec<usize>>,
    internal: Vec<usize>,
    target: Vec<usize>,
    unsatisfied: Vec<usize>,
    position: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl<'a> State<'a> {
    fn new(graph: &Graph, partition: &'a Partition, targets: &[usize]) -> Self {
        let n = graph.node_count();
        let community = partition.membership();
        let adjacency: Vec<Vec<usize>> = (0..n).map(|v| graph.neighbors(v).to_vec()).collect();
        let edges = graph.edges().map(|(u, v)| (u * n + v) as u64).collect();
        let internal: Vec<usize> = (0..n)
            .map(|v| {
                graph
                    .neighbors(v)
                    .iter()
                    .filter(|&&u| community[u] == community[v])
                    .count()
            })
            .collect();
        let mut state = Self {
            n,
            adjacency,
            edges,
            community,
            members: partition.communities(),
            internal,
            target: targets.to_vec(),
            unsatisfied: Vec::new(),
            position: vec![ABSENT; n],
        };
        for v in 0..n {
            state.refresh(v);
        }
        state
    }

    fn key(&self, u: usize, v: usize) -> u64 {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        (a * self.n + b) as u64
    }

    fn linked(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&self.key(u, v))
    }

    fn same(&self, u: usize, v: usize) -> bool {
        self.community[u] == self.community[v]
    }

    fn deviation(&self, v: usize, delta: isize) -> usize {
        (self.internal[v] as isize + delta).abs_diff(self.target[v] as isize)
    }

    fn refresh(&mut self, v: usize) {
        let bad = self.internal[v] != self.target[v];
        let pos = self.position[v];
        if bad && pos == ABSENT {
            self.position[v] = self.unsatisfied.len();
            self.unsatisfied.push(v);
        } else if !bad && pos != ABSENT {
            let last = *self.unsatisfied.last().unwrap();
            self.unsatisfied.swap_remove(pos);
            if last != v {
                self.position[last] = pos;
            }
            self.position[v] = ABSENT;
        }
    }

    fn random_neighbor<R: Rng + ?Sized>(
        &self,
        v: usize,
        want_internal: bool,
        rng: &mut R,
    ) -> Option<usize> {
        let list = &self.adjacency[v];
        if list.is_empty() {
            return None;
        }
        for _ in 0..8 {
            let u = list[rng.random_range(0..list.len())];
            if self.same(u, v) == want_internal {
                return Some(u);
            }
        }
        let matching: Vec<usize> = list
            .iter()
            .copied()
            .filter(|&u| self.same(u, v) == want_internal)
            .collect();
        (!matching.is_empty()).then(|| matching[rng.random_range(0..matching.len())])
    }

    /// Change in total deviation when replacing edges `old` by `new`.
    fn gain(&self, old: [(usize, usize); 2], new: [(usize, usize); 2]) -> isize {
        let mut deltas: [(usize, isize); 4] = [(usize::MAX, 0); 4];
        let mut add = |v: usize, d: isize| {
            for slot in deltas.iter_mut() {
                if slot.0 == v {
                    slot.1 += d;
                    return;
                }
                if slot.0 == usize::MAX {
                    *slot = (v, d);
                    return;
                }
            }
        };
        for (u, v) in old {
            if self.same(u, v) {
                add(u, -1);
                add(v, -1);
            }
        }
        for (u, v) in new {
            if self.same(u, v) {
                add(u, 1);
                add(v, 1);
            }
        }
        deltas
            .iter()
            .filter(|s| s.0 != usize::MAX)
            .map(|&(v, d)| self.deviation(v, d) as isize - self.deviation(v, 0) as isize)
            .sum()
    }

    fn valid(&self, new: [(usize, usize); 2]) -> bool {
        let [(p, q), (r, s)] = new;
        p != q
            && r != s
            && self.key(p, q) != self.key(r, s)
            && !self.linked(p, q)
            && !self.linked(r, s)
    }

    fn attempt<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Step {
        let a = self.unsatisfied[rng.random_range(0..self.unsatisfied.len())];
        let (b, c, d) = if self.internal[a] < self.target[a] {
            let Some(b) = self.random_neighbor(a, false, rng) else {
                return Step::Rejected;
            };
            // Prefer a community mate that also lacks internal links: joining
            // two such nodes fixes both at once.
            let group = &self.members[self.community[a]];
            let mut c = a;
            for _ in 0..PARTNER_TRIES {
                c = group[rng.random_range(0..group.len())];
                if c != a && self.internal[c] < self.target[c] && !self.linked(a, c) {
                    break;
                }
            }
            if c == a {
                return Step::Rejected;
            }
            let want_internal = self.internal[c] >= self.target[c] && rng.random::<bool>();
            let Some(d) = self.random_neighbor(c, want_internal, rng) else {
                return Step::Rejected;
            };
            (b, c, d)
        } else {
            let Some(b) = self.random_neighbor(a, true, rng) else {
                return Step::Rejected;
            };
            let c = if rng.random::<bool>() {
                self.unsatisfied[rng.random_range(0..self.unsatisfied.len())]
            } else {
                rng.random_range(0..self.n)
            };
            let Some(d) = self.random_neighbor(c, rng.random::<bool>(), rng) else {
                return Step::Rejected;
            };
            (b, c, d)
        };
        if c == a || c == b || d == a || d == b {
            return Step::Rejected;
        }
        let old = [(a, b), (c, d)];
        let options = [[(a, c), (b, d)], [(a, d), (c, b)]];
        let mut best: Option<([(usize, usize); 2], isize)> = None;
        for new in options {
            if !self.valid(new) {
                continue;
            }
            let g = self.gain(old, new);
            if g <= 0 && best.is_none_or(|(_, bg)| g < bg) {
                best = Some((new, g));
            }
        }
        match best {
            Some((new, g)) if g < 0 => {
                self.apply(old, new);
                Step::Improved
            }
            Some((new, _)) if rng.random::<f64>() < NEUTRAL_ACCEPTANCE => {
                self.apply(old, new);
                Step::Neutral
            }
            _ => Step::Rejected,
        }
    }

    fn apply(&mut self, old: [(usize, usize); 2], new: [(usize, usize); 2]) {
        for (u, v) in old {
            let k = self.key(u, v);
            self.edges.remove(&k);
            for (x, y) in [(u, v), (v, u)] {
                let list = &mut self.adjacency[x];
                let pos = list.iter().position(|&w| w == y).unwrap();
                list.swap_remove(pos);
            }
            if self.same(u, v) {
                self.internal[u] -= 1;
                self.internal[v] -= 1;
            }
        }
        for (u, v) in new {
            let k = self.key(u, v);
            self.edges.insert(k);
            self.adjacency[u].push(v);
            self.adjacency[v].push(u);
            if self.same(u, v) {
                self.internal[u] += 1;
                self.internal[v] += 1;
            }
        }
        for (u, v) in old.into_iter().chain(new) {
            self.refresh(u);
            self.refresh(v);
        }
    }

    fn mean_deviation(&self) -> f64 {
        let (mut sum, mut count) = (0.0, 0usize);
        for v in 0..self.n {
            let k = self.adjacency[v].len();
            if k > 0 {
                sum += self.deviation(v, 0) as f64 / k as f64;
                count += 1;
            }
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }

    fn to_graph(&self) -> Graph {
        let edges: Vec<(usize, usize)> = (0..self.n)
            .flat_map(|u| {
                self.adjacency[u]
                    .iter()
                    .filter(move |&&v| v > u)
                    .map(move |&v| (u, v))
            })
            .collect();
        Graph::from_edges(self.n, &edges).expect("swaps keep the graph simple")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::configuration::configuration_model;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn satisfied_graph_is_unchanged() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5)]).unwrap();
        let p = g.connected_components();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = rewire_to_mixing(&g, &p, &[0.0; 6], &mut rng);
        assert_eq!(out.graph, g);
        assert!(out.stats.converged);
        assert_eq!(out.stats.attempts, 0);
    }

    #[test]
    fn half_mixing_on_degree_two_nodes() {
        // A 40-cycle relabelled so that consecutive nodes sit in different
        // communities; every node starts fully external.
        let n = 40;
        let order: Vec<usize> = (0..n).map(|i| (i * 7) % n).collect();
        let edges: Vec<_> = (0..n).map(|i| (order[i], order[(i + 1) % n])).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        let p = Partition::from_labels(&(0..n).map(|v| v / 8).collect::<Vec<_>>());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = rewire_to_mixing(&g, &p, &[0.5; 40], &mut rng);
        assert_eq!(out.graph.degrees(), g.degrees());
        // round(0.5 * 2) = 1 internal link per node.
        assert!(out.stats.converged, "{:?}", out.stats);
        assert!(out.internal_degrees.iter().all(|&k| k == 1));
    }

    #[test]
    fn degrees_preserved_and_deviation_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let degrees = vec![6; 600];
        let g = configuration_model(&degrees, &mut rng).unwrap();
        let p = Partition::from_labels(&(0..600).map(|v| v / 30).collect::<Vec<_>>());
        let out = rewire_to_mixing(&g, &p, &vec![0.3; 600], &mut rng);
        assert_eq!(out.graph.degrees(), degrees);
        assert!(out.stats.mean_deviation <= 0.05, "{:?}", out.stats);
        // Realised internal degrees agree with a recount on the output graph.
        for v in 0..600 {
            let recount = out
                .graph
                .neighbors(v)
                .iter()
                .filter(|&&u| p.community_of(u) == p.community_of(v))
                .count();
            assert_eq!(recount, out.internal_degrees[v]);
        }
    }
}
