//! Plain-text edge-list and membership formats.
//!
//! Edge lists hold one edge per line as two whitespace-separated decimal
//! node ids. Membership files hold one `node_id community_id` line per node.
//! In both formats blank lines and lines starting with `#` are ignored.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::partition::Partition;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("node {node} is listed more than once (line {line})")]
    DuplicateNode { node: usize, line: usize },
    #[error("node {node} has no community assignment")]
    MissingNode { node: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = (usize, io::Result<String>)> {
    reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => {
                let t = s.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        })
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize), FormatError> {
    let mut fields = text.split_whitespace();
    let mut next = |what: &str| -> Result<usize, FormatError> {
        let field = fields.next().ok_or_else(|| FormatError::Malformed {
            line,
            message: format!("missing {what}"),
        })?;
        field.parse().map_err(|_| FormatError::Malformed {
            line,
            message: format!("invalid {what} {field:?}"),
        })
    };
    let a = next("first id")?;
    let b = next("second id")?;
    if fields.next().is_some() {
        return Err(FormatError::Malformed {
            line,
            message: "expected exactly two fields".into(),
        });
    }
    Ok((a, b))
}

/// Reads an edge list. The node count is `max id + 1` unless `node_count`
/// is given.
pub fn read_edge_list<R: BufRead>(
    reader: R,
    node_count: Option<usize>,
) -> Result<Graph, FormatError> {
    let mut edges = Vec::new();
    for (line, text) in data_lines(reader) {
        edges.push(parse_pair(line, &text?)?);
    }
    let n =
        node_count.unwrap_or_else(|| edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0));
    Ok(Graph::from_edges(n, &edges)?)
}

pub fn write_edge_list<W: Write>(graph: &Graph, mut writer: W) -> io::Result<()> {
    for (u, v) in graph.edges() {
        writeln!(writer, "{u} {v}")?;
    }
    writer.flush()
}

/// Reads a membership file. Nodes must be exactly `0..n` where `n` is
/// `expected_nodes` if given, else the largest listed id plus one.
pub fn read_membership<R: BufRead>(
    reader: R,
    expected_nodes: Option<usize>,
) -> Result<Partition, FormatError> {
    let mut labels: Vec<Option<usize>> = Vec::new();
    for (line, text) in data_lines(reader) {
        let (node, community) = parse_pair(line, &text?)?;
        if node >= labels.len() {
            labels.resize(node + 1, None);
        }
        if labels[node].is_some() {
            return Err(FormatError::DuplicateNode { node, line });
        }
        labels[node] = Some(community);
    }
    let n = expected_nodes.unwrap_or(labels.len());
    if labels.len() > n {
        return Err(FormatError::Malformed {
            line: 0,
            message: format!("node {} exceeds the expected {n} nodes", labels.len() - 1),
        });
    }
    labels.resize(n, None);
    let mut dense = Vec::with_capacity(n);
    for (node, label) in labels.into_iter().enumerate() {
        dense.push(label.ok_or(FormatError::MissingNode { node })?);
    }
    Ok(Partition::from_labels(&dense))
}

pub fn write_membership<W: Write>(partition: &Partition, mut writer: W) -> io::Result<()> {
    for (node, c) in partition.membership().iter().enumerate() {
        writeln!(writer, "{node} {c}")?;
    }
    writer.flush()
}

pub fn load_edge_list(path: &Path, node_count: Option<usize>) -> Result<Graph, FormatError> {
    read_edge_list(BufReader::new(File::open(path)?), node_count)
}

pub fn save_edge_list(graph: &Graph, path: &Path) -> io::Result<()> {
    write_edge_list(graph, BufWriter::new(File::create(path)?))
}

pub fn save_membership(partition: &Partition, path: &Path) -> io::Result<()> {
    write_membership(partition, BufWriter::new(File::create(path)?))
}

/// Loads a partition computed elsewhere (for instance by an external
/// community detection tool) so it can enter the evaluation path.
pub fn load_external_partition(
    path: &Path,
    expected_nodes: Option<usize>,
) -> Result<Partition, FormatError> {
    read_membership(BufReader::new(File::open(path)?), expected_nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_skips_comments_and_infers_size() {
        let text = "# header\n0 1\n\n1\t2\n# trailing\n";
        let g = read_edge_list(text.as_bytes(), None).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        let g = read_edge_list(text.as_bytes(), Some(5)).unwrap();
        assert_eq!(g.node_count(), 5);
    }

    #[test]
    fn edge_list_errors() {
        assert!(matches!(
            read_edge_list("0 x\n".as_bytes(), None),
            Err(FormatError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            read_edge_list("0 1 2\n".as_bytes(), None),
            Err(FormatError::Malformed { .. })
        ));
        assert!(matches!(
            read_edge_list("3 3\n".as_bytes(), None),
            Err(FormatError::Graph(GraphError::SelfLoop { node: 3 }))
        ));
    }

    #[test]
    fn membership_well_formed() {
        let p = read_membership("0 5\n1 5\n2 9\n".as_bytes(), None).unwrap();
        assert_eq!(p.node_count(), 3);
        assert_eq!(p.sizes(), vec![2, 1]);
    }

    #[test]
    fn membership_missing_node_is_named() {
        let err = read_membership("0 1\n2 1\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, FormatError::MissingNode { node: 1 }));
        let err = read_membership("0 1\n1 1\n".as_bytes(), Some(3)).unwrap_err();
        assert!(matches!(err, FormatError::MissingNode { node: 2 }));
        assert!(err.to_string().contains("node 2"));
    }

    #[test]
    fn membership_duplicate_rejected() {
        let err = read_membership("0 1\n1 1\n0 2\n".as_bytes(), None).unwrap_err();
        assert!(matches!(
            err,
            FormatError::DuplicateNode { node: 0, line: 3 }
        ));
    }

    #[test]
    fn membership_round_trip() {
        let p = Partition::from_labels(&[3, 1, 3, 0, 1]);
        let mut buf = Vec::new();
        write_membership(&p, &mut buf).unwrap();
        assert_eq!(read_membership(buf.as_slice(), Some(5)).unwrap(), p);
    }
}
