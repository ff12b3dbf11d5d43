//! Graph and partition file formats.
//!
//! Files use 1-based node ids; internally nodes are `0..n`. Edge lists may
//! use arbitrary positive ids, which are compacted in ascending order and
//! kept in [`LoadedGraph::ids`] so results can be written back in the
//! caller's numbering.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::modmat::ModularityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Edgelist,
    Matrixmarket,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s.to_ascii_lowercase().as_str() {
            "edgelist" | "edges" => Ok(Format::Edgelist),
            "matrixmarket" | "mtx" => Ok(Format::Matrixmarket),
            other => Err(Error::InvalidParameter(format!("unknown graph format {other:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Edgelist => "edgelist",
            Format::Matrixmarket => "matrixmarket",
        })
    }
}

/// A graph together with the external id of every internal node.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub ids: Vec<u64>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_id(token: &str, line: usize) -> Result<u64> {
    match token.parse::<u64>() {
        Ok(0) => Err(parse_err(line, "node ids are 1-based; found 0")),
        Ok(id) => Ok(id),
        Err(_) => Err(parse_err(line, format!("invalid node id {token:?}"))),
    }
}

fn parse_weight(token: Option<&str>, line: usize) -> Result<f64> {
    let Some(token) = token else { return Ok(1.0) };
    let w: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid weight {token:?}")))?;
    if !w.is_finite() || w < 0.0 {
        return Err(parse_err(line, format!("weight must be finite and nonnegative, got {w}")));
    }
    Ok(w)
}

/// Whitespace-separated `i j [w]` lines; `#` starts a comment line.
pub fn parse_edge_list(text: &str) -> Result<LoadedGraph> {
    let mut raw = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(parse_err(lineno, "expected \"i j [w]\""));
        };
        let (i, j) = (parse_id(a, lineno)?, parse_id(b, lineno)?);
        let w = parse_weight(tokens.next(), lineno)?;
        if tokens.next().is_some() {
            return Err(parse_err(lineno, "too many fields"));
        }
        raw.push((i, j, w));
    }
    let ids: Vec<u64> = raw
        .iter()
        .flat_map(|&(i, j, _)| [i, j])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if ids.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let index: HashMap<u64, usize> = ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
    let graph = Graph::from_edges(ids.len(), raw.iter().map(|&(i, j, w)| (index[&i], index[&j], w)))?;
    Ok(LoadedGraph { graph, ids })
}

/// Matrix Market `coordinate` format with `symmetric` storage; `real`,
/// `integer` and `pattern` fields are accepted. Node `k` has id `k`.
pub fn parse_matrix_market(text: &str) -> Result<LoadedGraph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(parse_err(1, "expected \"%%MatrixMarket matrix coordinate <field> symmetric\""));
    }
    let pattern = match fields[3].as_str() {
        "real" | "integer" | "double" => false,
        "pattern" => true,
        other => return Err(parse_err(1, format!("unsupported field type {other:?}"))),
    };
    if fields[4] != "symmetric" {
        return Err(parse_err(1, format!("adjacency input must be symmetric, got {:?}", fields[4])));
    }
    let mut size: Option<(usize, usize)> = None;
    let mut entries = Vec::new();
    for (k, line) in lines {
        let lineno = k + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                let dims: Vec<usize> = tokens
                    .iter()
                    .map(|t| t.parse().map_err(|_| parse_err(lineno, format!("invalid size field {t:?}"))))
                    .collect::<Result<_>>()?;
                if dims.len() != 3 || dims[0] != dims[1] {
                    return Err(parse_err(lineno, "expected \"n n nnz\" for a square matrix"));
                }
                size = Some((dims[0], dims[2]));
            }
            Some((n, _)) => {
                let expected = if pattern { 2 } else { 3 };
                if tokens.len() != expected {
                    return Err(parse_err(lineno, format!("expected {expected} fields")));
                }
                let (i, j) = (parse_id(tokens[0], lineno)?, parse_id(tokens[1], lineno)?);
                if i as usize > n || j as usize > n {
                    return Err(parse_err(lineno, format!("entry ({i}, {j}) outside a {n}x{n} matrix")));
                }
                let w = parse_weight(tokens.get(2).copied(), lineno)?;
                entries.push((i as usize - 1, j as usize - 1, w));
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if entries.len() != nnz {
        return Err(parse_err(
            text.lines().count(),
            format!("size line declares {nnz} entries, found {}", entries.len()),
        ));
    }
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let graph = Graph::from_edges(n, entries)?;
    Ok(LoadedGraph {
        graph,
        ids: (1..=n as u64).collect(),
    })
}

pub fn parse_graph(text: &str, format: Format) -> Result<LoadedGraph> {
    match format {
        Format::Edgelist => parse_edge_list(text),
        Format::Matrixmarket => parse_matrix_market(text),
    }
}

pub fn read_graph(path: &Path, format: Format) -> Result<LoadedGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_graph(&text, format).map_err(|e| e.at(path.display().to_string()))
}

/// Reads `id community` lines (as written by
/// [`Dendrogram::flat_partition`](crate::partition::Dendrogram::flat_partition))
/// back into node sets. Every node in `ids` must be assigned exactly once;
/// communities are returned in order of first appearance.
pub fn parse_flat_partition(text: &str, ids: &[u64]) -> Result<Vec<NodeSet>> {
    let index: HashMap<u64, usize> = ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
    let mut assigned = vec![false; ids.len()];
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<usize>> = HashMap::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(parse_err(lineno, "expected \"node community\""));
        }
        let id = parse_id(tokens[0], lineno)?;
        let node = *index
            .get(&id)
            .ok_or_else(|| parse_err(lineno, format!("unknown node id {id}")))?;
        if std::mem::replace(&mut assigned[node], true) {
            return Err(parse_err(lineno, format!("node {id} assigned twice")));
        }
        let label = tokens[1].to_string();
        if !groups.contains_key(&label) {
            order.push(label.clone());
        }
        groups.entry(label).or_default().push(node);
    }
    if let Some(missing) = assigned.iter().position(|a| !a) {
        return Err(Error::InvalidParameter(format!("node {} has no community", ids[missing])));
    }
    order
        .into_iter()
        .map(|label| NodeSet::new(ids.len(), groups.remove(&label).unwrap_or_default()))
        .collect()
}

/// `Σ Q(S_i)` over the parts of a partition.
pub fn partition_modularity(m: &ModularityMatrix, parts: &[NodeSet]) -> Result<f64> {
    parts.iter().map(|s| m.modularity(s).map(|r| r.q_value)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_p3() {
        let g = parse_edge_list("# path\n1 2\n2 3 1.0\n\n").unwrap();
        assert_eq!(g.graph.n(), 3);
        assert_eq!(g.graph.volume(), 4.0);
        assert!(g.graph.is_connected());
        assert_eq!(g.ids, vec![1, 2, 3]);
    }

    #[test]
    fn edge_list_compacts_ids() {
        let g = parse_edge_list("10 30 2\n30 20\n").unwrap();
        assert_eq!(g.ids, vec![10, 20, 30]);
        assert_eq!(g.graph.weight(0, 2), 2.0);
        assert_eq!(g.graph.weight(1, 2), 1.0);
    }

    #[test]
    fn edge_list_errors_name_the_line() {
        let e = parse_edge_list("1 2\n2 3 -1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        assert!(matches!(parse_edge_list("0 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("1 x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("1 2 3 4\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("1\n"), Err(Error::Parse { line: 1, .. })));
        assert_eq!(parse_edge_list("# nothing\n"), Err(Error::EmptyGraph));
    }

    #[test]
    fn matrix_market_matches_edge_list() {
        let mm = "%%MatrixMarket matrix coordinate real symmetric\n% k2\n2 2 1\n2 1 1.0\n";
        let a = parse_matrix_market(mm).unwrap();
        let b = parse_edge_list("1 2\n").unwrap();
        assert_eq!(a, b);
        let pattern = "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n3 2\n";
        assert_eq!(parse_matrix_market(pattern).unwrap().graph.volume(), 4.0);
    }

    #[test]
    fn matrix_market_rejects_bad_input() {
        let general = "%%MatrixMarket matrix coordinate real general\n2 2 1\n2 1 1\n";
        assert!(matches!(parse_matrix_market(general), Err(Error::Parse { line: 1, .. })));
        let short = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n2 1 1\n";
        assert!(parse_matrix_market(short).is_err());
        let outside = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1\n";
        assert!(matches!(parse_matrix_market(outside), Err(Error::Parse { line: 3, .. })));
        let negative = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 -2\n";
        assert!(matches!(parse_matrix_market(negative), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn flat_partition_round_trip() {
        let ids = [5, 7, 9];
        let parts = parse_flat_partition("5\t1\n9\t1\n7\t2\n", &ids).unwrap();
        assert_eq!(parts[0].members(), &[0, 2]);
        assert_eq!(parts[1].members(), &[1]);
        assert!(parse_flat_partition("5 1\n", &ids).is_err());
        assert!(matches!(parse_flat_partition("5 1\n5 2\n", &ids), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_flat_partition("4 1\n", &ids), Err(Error::Parse { line: 1, .. })));
    }
}
