//! Markov clustering (MCL) on sparse column-stochastic matrices.

use super::DetectionConfig;
use crate::graph::Graph;
use crate::partition::Partition;

const CONVERGENCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct MarkovOutcome {
    pub partition: Partition,
    pub iterations: usize,
    /// False when the iteration cap was reached first.
    pub converged: bool,
}

/// Sorted `(row, value)` entries of one column.
type Column = Vec<(usize, f64)>;

/// Alternates expansion (matrix power), inflation (entrywise power then
/// column normalisation) and pruning on the random-walk matrix of the graph
/// with a self-loop added to every node. Clusters are the connected
/// components of the support of the final matrix.
pub fn markov_cluster(graph: &Graph, config: &DetectionConfig) -> MarkovOutcome {
    let n = graph.node_count();
    let base: Vec<Column> = (0..n)
        .map(|j| {
            let mut col: Column = graph.neighbors(j).iter().map(|&i| (i, 1.0)).collect();
            let pos = col.partition_point(|&(i, _)| i < j);
            col.insert(pos, (j, 1.0));
            normalise(&mut col);
            col
        })
        .collect();

    let mut matrix = base;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.mcl_max_iterations {
        iterations += 1;
        let mut next = matrix.clone();
        for _ in 1..config.mcl_expansion {
            next = multiply(&next, &matrix);
        }
        for col in next.iter_mut() {
            inflate(col, config.mcl_inflation, config.mcl_prune_threshold);
        }
        let change = max_difference(&matrix, &next);
        matrix = next;
        if change < CONVERGENCE {
            converged = true;
            break;
        }
    }
    MarkovOutcome {
        partition: support_components(&matrix),
        iterations,
        converged,
    }
}

fn normalise(col: &mut Column) {
    let sum: f64 = col.iter().map(|e| e.1).sum();
    if sum > 0.0 {
        for e in col.iter_mut() {
            e.1 /= sum;
        }
    }
}

fn inflate(col: &mut Column, power: f64, threshold: f64) {
    for e in col.iter_mut() {
        e.1 = e.1.powf(power);
    }
    normalise(col);
    let before = col.len();
    col.retain(|e| e.1 >= threshold);
    if col.len() != before {
        normalise(col);
    }
}

/// `left * right`, column by column.
fn multiply(left: &[Column], right: &[Column]) -> Vec<Column> {
    let n = left.len();
    let column = |j: usize, acc: &mut Vec<f64>, rows: &mut Vec<usize>| -> Column {
        for &(k, w) in &right[j] {
            for &(i, v) in &left[k] {
                if acc[i] == 0.0 {
                    rows.push(i);
                }
                acc[i] += v * w;
            }
        }
        rows.sort_unstable();
        let col = rows.iter().map(|&i| (i, acc[i])).collect();
        for &i in rows.iter() {
            acc[i] = 0.0;
        }
        rows.clear();
        col
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map_init(
                || (vec![0.0; n], Vec::new()),
                |(acc, rows), j| column(j, acc, rows),
            )
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let (mut acc, mut rows) = (vec![0.0; n], Vec::new());
        (0..n).map(|j| column(j, &mut acc, &mut rows)).collect()
    }
}

fn max_difference(a: &[Column], b: &[Column]) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (mut i, mut j) = (0, 0);
        while i < x.len() || j < y.len() {
            let d = match (x.get(i), y.get(j)) {
                (Some(&(r, v)), Some(&(s, w))) if r == s => {
                    i += 1;
                    j += 1;
                    v - w
                }
                (Some(&(r, v)), Some(&(s, _))) if r < s => {
                    i += 1;
                    v
                }
                (Some(_), Some(&(_, w))) => {
                    j += 1;
                    w
                }
                (Some(&(_, v)), None) => {
                    i += 1;
                    v
                }
                (None, Some(&(_, w))) => {
                    j += 1;
                    w
                }
                (None, None) => unreachable!(),
            };
            worst = worst.max(d.abs());
        }
    }
    worst
}

fn support_components(matrix: &[Column]) -> Partition {
    let n = matrix.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for (j, col) in matrix.iter().enumerate() {
        for &(i, _) in col {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
    Partition::from_labels(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::tests::*;

    fn cfg() -> DetectionConfig {
        DetectionConfig::default()
    }

    /// Straightforward dense MCL used as an oracle on tiny graphs.
    fn dense_mcl(graph: &Graph, inflation: f64, threshold: f64) -> Partition {
        let n = graph.node_count();
        let mut m = vec![vec![0.0; n]; n];
        for j in 0..n {
            m[j][j] = 1.0;
            for &i in graph.neighbors(j) {
                m[i][j] = 1.0;
            }
        }
        let normalise = |m: &mut Vec<Vec<f64>>| {
            for j in 0..n {
                let s: f64 = (0..n).map(|i| m[i][j]).sum();
                for row in m.iter_mut() {
                    row[j] /= s;
                }
            }
        };
        normalise(&mut m);
        for _ in 0..100 {
            let mut e = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    e[i][j] = (0..n).map(|k| m[i][k] * m[k][j]).sum();
                }
            }
            for row in e.iter_mut() {
                for v in row.iter_mut() {
                    *v = v.powf(inflation);
                }
            }
            normalise(&mut e);
            for row in e.iter_mut() {
                for v in row.iter_mut() {
                    if *v < threshold {
                        *v = 0.0;
                    }
                }
            }
            normalise(&mut e);
            let diff = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| (e[i][j] - m[i][j]).abs())
                .fold(0.0, f64::max);
            m = e;
            if diff < CONVERGENCE {
                break;
            }
        }
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i < j && (m[i][j] > 0.0 || m[j][i] > 0.0))
            .collect();
        Graph::from_edges(n, &edges).unwrap().connected_components()
    }

    #[test]
    fn disjoint_triangles() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let out = markov_cluster(&g, &cfg());
        assert!(out.converged);
        assert_eq!(out.partition, triangles());
    }

    #[test]
    fn dumbbell_matches_dense_oracle() {
        let out = markov_cluster(&dumbbell(), &cfg());
        assert_eq!(out.partition, triangles());
        assert_eq!(out.partition, dense_mcl(&dumbbell(), 2.0, 1e-5));
    }

    #[test]
    fn sparse_and_dense_agree_on_small_graphs() {
        for g in [ring_of_cliques(3, 4), ring_of_cliques(5, 3), clique(5)] {
            assert_eq!(
                markov_cluster(&g, &cfg()).partition,
                dense_mcl(&g, 2.0, 1e-5)
            );
        }
    }

    #[test]
    fn higher_inflation_is_not_coarser() {
        let g = ring_of_cliques(6, 4);
        let coarse = markov_cluster(
            &g,
            &DetectionConfig {
                mcl_inflation: 1.4,
                ..cfg()
            },
        );
        let fine = markov_cluster(
            &g,
            &DetectionConfig {
                mcl_inflation: 4.0,
                ..cfg()
            },
        );
        assert!(fine.partition.community_count() >= coarse.partition.community_count());
    }

    #[test]
    fn isolated_nodes_are_singletons() {
        let g = Graph::from_edges(4, &[(0, 1)]).unwrap();
        assert_eq!(
            markov_cluster(&g, &cfg()).partition,
            Partition::from_labels(&[0, 0, 1, 2])
        );
    }
}
