//! Weighted undirected graphs with loops, node subsets and connectivity.
//!
//! Adjacency is kept in a compressed-row layout with both orientations of
//! every off-diagonal edge present, so a row scan yields all neighbours of a
//! node. Loops appear once, on the diagonal. Entries are strictly positive:
//! a missing entry is an edge of weight zero.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric sparse matrix with nonnegative off-diagonal entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSparse {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymmetricSparse {
    /// Builds from canonical `(i, j, w)` triplets with `i <= j`. Duplicates
    /// must already be merged and zero weights removed.
    fn from_canonical(n: usize, pairs: &BTreeMap<(usize, usize), f64>) -> Self {
        let mut counts = vec![0usize; n];
        for &(i, j) in pairs.keys() {
            counts[i] += 1;
            if i != j {
                counts[j] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for c in &counts {
            offsets.push(offsets.last().unwrap() + c);
        }
        let nnz = *offsets.last().unwrap();
        let mut cols = vec![0usize; nnz];
        let mut vals = vec![0.0; nnz];
        let mut fill = offsets[..n].to_vec();
        // BTreeMap order is by (i, j): each row receives its lower-triangle
        // entries (as mirrored j's) before its own upper-triangle scan, so
        // columns end up sorted.
        for (&(i, j), &w) in pairs {
            cols[fill[i]] = j;
            vals[fill[i]] = w;
            fill[i] += 1;
            if i != j {
                cols[fill[j]] = i;
                vals[fill[j]] = w;
                fill[j] += 1;
            }
        }
        SymmetricSparse {
            n,
            offsets,
            cols,
            vals,
        }
    }

    /// Empty (all-zero) `n x n` matrix.
    pub fn zeros(n: usize) -> Self {
        SymmetricSparse {
            n,
            offsets: vec![0; n + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Builds from arbitrary triplets, summing duplicates and mirrored pairs.
    pub fn from_triplets(n: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, w) in entries {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight { i, j, weight: w });
            }
            for index in [i, j] {
                if index >= n {
                    return Err(Error::NodeOutOfRange { index, n });
                }
            }
            if w == 0.0 {
                continue;
            }
            *pairs.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
        }
        Ok(Self::from_canonical(n, &pairs))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries (each off-diagonal edge counted twice).
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// `(column, weight)` pairs of row `i`, columns ascending.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.offsets[i]..self.offsets[i + 1];
        match self.cols[range.clone()].binary_search(&j) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Row sums `A 1`.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, w)| w).sum()).collect()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, w)| w * x[j]).sum();
        }
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> f64 {
        self.vals.iter().map(|w| w * w).sum()
    }

    /// Principal submatrix on the sorted index list `keep`.
    pub fn principal(&self, keep: &[usize]) -> SymmetricSparse {
        let mut local = vec![usize::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            local[i] = k;
        }
        let mut offsets = Vec::with_capacity(keep.len() + 1);
        offsets.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for &i in keep {
            for (j, w) in self.row(i) {
                if local[j] != usize::MAX {
                    cols.push(local[j]);
                    vals.push(w);
                }
            }
            offsets.push(cols.len());
        }
        // `keep` is sorted, so local column order follows global order.
        SymmetricSparse {
            n: keep.len(),
            offsets,
            cols,
            vals,
        }
    }

    /// Same sparsity pattern with every entry mapped through `f(i, j, w)`.
    pub fn map_entries(&self, f: impl Fn(usize, usize, f64) -> f64) -> SymmetricSparse {
        let mut out = self.clone();
        for i in 0..self.n {
            for k in self.offsets[i]..self.offsets[i + 1] {
                out.vals[k] = f(i, self.cols[k], self.vals[k]);
            }
        }
        out
    }

    /// `1_Sᵀ A 1_T` where the sets are given as membership masks.
    pub fn bilinear_masks(&self, s: &[bool], t: &[bool]) -> f64 {
        let mut total = 0.0;
        for i in (0..self.n).filter(|&i| s[i]) {
            total += self.row(i).filter(|&(j, _)| t[j]).map(|(_, w)| w).sum::<f64>();
        }
        total
    }

    /// Labels of connected components under strictly positive off-diagonal
    /// entries, restricted to `mask`. Nodes outside the mask get `usize::MAX`.
    pub(crate) fn components_masked(&self, mask: &[bool]) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if !mask[start] || label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for (w, _) in self.row(u) {
                    if mask[w] && label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// True when the off-diagonal pattern is connected (irreducible).
    pub fn is_irreducible(&self) -> bool {
        self.n > 0 && self.components_masked(&vec![true; self.n]).1 == 1
    }
}

/// A subset of the nodes `{0, …, owner_n - 1}` of some graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeSet {
    members: Vec<usize>,
    owner_n: usize,
}

impl NodeSet {
    /// Validates, sorts and deduplicates `members`.
    pub fn new(owner_n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        if let Some(&index) = members.iter().find(|&&i| i >= owner_n) {
            return Err(Error::NodeOutOfRange { index, n: owner_n });
        }
        members.sort_unstable();
        members.dedup();
        Ok(NodeSet { members, owner_n })
    }

    pub fn full(owner_n: usize) -> Self {
        NodeSet {
            members: (0..owner_n).collect(),
            owner_n,
        }
    }

    pub fn empty(owner_n: usize) -> Self {
        NodeSet {
            members: Vec::new(),
            owner_n,
        }
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        NodeSet {
            members: mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect(),
            owner_n: mask.len(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn owner_n(&self) -> usize {
        self.owner_n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn complement(&self) -> NodeSet {
        let mask = self.mask();
        NodeSet {
            members: (0..self.owner_n).filter(|&i| !mask[i]).collect(),
            owner_n: self.owner_n,
        }
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.owner_n];
        for &i in &self.members {
            mask[i] = true;
        }
        mask
    }

    /// Characteristic vector `1_S`.
    pub fn indicator(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.owner_n];
        for &i in &self.members {
            x[i] = 1.0;
        }
        x
    }

    pub fn is_subset_of(&self, other: &NodeSet) -> bool {
        self.members.iter().all(|&i| other.contains(i))
    }

    /// First shared node, if any.
    pub fn first_overlap(&self, other: &NodeSet) -> Option<usize> {
        self.members.iter().copied().find(|&i| other.contains(i))
    }

    /// Maps a set of local indices of an induced subgraph back to ambient ids.
    pub fn lift(&self, local: &NodeSet) -> NodeSet {
        NodeSet {
            members: local.iter().map(|k| self.members[k]).collect(),
            owner_n: self.owner_n,
        }
    }

    pub(crate) fn check_owner(&self, n: usize) -> Result<()> {
        if self.owner_n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.owner_n,
            });
        }
        Ok(())
    }
}

/// Immutable weighted undirected graph, loops allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: SymmetricSparse,
    degrees: Vec<f64>,
    volume: f64,
}

impl Graph {
    /// Builds a graph whose node count is one past the largest index seen.
    ///
    /// Duplicate entries, including `(i, j)` together with `(j, i)`, are
    /// summed; `(i, i)` is a loop. Zero weights are dropped.
    pub fn from_edge_list(entries: &[(usize, usize, f64)]) -> Result<Graph> {
        let n = entries.iter().map(|&(i, j, _)| i.max(j) + 1).max().ok_or(Error::EmptyGraph)?;
        Graph::from_edges(n, entries.iter().copied())
    }

    /// Builds a graph on exactly `n` nodes; nodes without edges are isolated.
    pub fn from_edges(n: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Graph> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(Graph::from_adjacency(SymmetricSparse::from_triplets(n, entries)?))
    }

    pub(crate) fn from_adjacency(adjacency: SymmetricSparse) -> Graph {
        let degrees = adjacency.row_sums();
        let volume = degrees.iter().sum();
        Graph {
            adjacency,
            degrees,
            volume,
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.dim()
    }

    /// Number of undirected edges, loops included.
    pub fn edge_count(&self) -> usize {
        let loops = (0..self.n()).filter(|&i| self.adjacency.get(i, i) > 0.0).count();
        (self.adjacency.nnz() - loops) / 2 + loops
    }

    pub fn adjacency(&self) -> &SymmetricSparse {
        &self.adjacency
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adjacency.get(i, j)
    }

    /// Each undirected edge once, as `(i, j, w)` with `i <= j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |i| self.adjacency.row(i).filter(move |&(j, _)| j >= i).map(move |(j, w)| (i, j, w)))
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// `vol S = Σ_{i∈S} d_i`.
    pub fn volume_of(&self, s: &NodeSet) -> Result<f64> {
        s.check_owner(self.n())?;
        Ok(s.iter().map(|i| self.degrees[i]).sum())
    }

    /// `e_in(S) = 1_Sᵀ A 1_S`: off-diagonal pairs count twice, loops once.
    pub fn internal_weight(&self, s: &NodeSet) -> Result<f64> {
        s.check_owner(self.n())?;
        let mask = s.mask();
        Ok(self.adjacency.bilinear_masks(&mask, &mask))
    }

    /// Induced subgraph `G(S)` and the map from its nodes back to ours.
    pub fn induced_subgraph(&self, s: &NodeSet) -> Result<(Graph, Vec<usize>)> {
        s.check_owner(self.n())?;
        if s.is_empty() {
            return Err(Error::EmptySubset);
        }
        let sub = self.adjacency.principal(s.members());
        Ok((Graph::from_adjacency(sub), s.members().to_vec()))
    }

    /// Graph obtained by adding `delta` to the weight of edge `(i, j)`.
    pub fn with_added_weight(&self, i: usize, j: usize, delta: f64) -> Result<Graph> {
        let entries = self.edges().chain(std::iter::once((i, j, delta)));
        Graph::from_edges(self.n(), entries)
    }

    pub fn is_connected(&self) -> bool {
        self.adjacency.is_irreducible()
    }

    /// Whether `G(S)` is connected. The empty set counts as connected.
    pub fn is_connected_subset(&self, s: &NodeSet) -> Result<bool> {
        s.check_owner(self.n())?;
        if s.is_empty() {
            return Ok(true);
        }
        Ok(self.adjacency.components_masked(&s.mask()).1 == 1)
    }

    /// Connected components of `G(S)`, each sorted, ordered by smallest member.
    pub fn components_of(&self, s: &NodeSet) -> Result<Vec<NodeSet>> {
        s.check_owner(self.n())?;
        let (label, count) = self.adjacency.components_masked(&s.mask());
        let mut parts = vec![Vec::new(); count];
        for i in s.iter() {
            parts[label[i]].push(i);
        }
        Ok(parts
            .into_iter()
            .map(|members| NodeSet {
                members,
                owner_n: self.n(),
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Graph {
        Graph::from_edge_list(&[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn set(n: usize, m: &[usize]) -> NodeSet {
        NodeSet::new(n, m.iter().copied()).unwrap()
    }

    #[test]
    fn single_edge_is_k2() {
        let g = Graph::from_edge_list(&[(0, 1, 1.0)]).unwrap();
        assert_eq!(g.degrees(), &[1.0, 1.0]);
        assert_eq!(g.volume(), 2.0);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn path_degrees_match_row_sums() {
        let g = p3();
        assert_eq!(g.degrees(), &[1.0, 2.0, 1.0]);
        assert_eq!(g.volume(), 4.0);
    }

    #[test]
    fn loop_counts_once_in_degree() {
        let g = Graph::from_edge_list(&[(0, 0, 2.0)]).unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.degrees(), &[2.0]);
        assert_eq!(g.volume(), 2.0);
        assert_eq!(g.internal_weight(&NodeSet::full(1)).unwrap(), 2.0);
    }

    #[test]
    fn rejects_negative_and_empty() {
        let err = Graph::from_edge_list(&[(0, 1, 1.0), (1, 2, -0.5)]).unwrap_err();
        assert_eq!(err, Error::InvalidWeight { i: 1, j: 2, weight: -0.5 });
        assert_eq!(Graph::from_edge_list(&[]).unwrap_err(), Error::EmptyGraph);
        assert!(Graph::from_edge_list(&[(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn duplicates_sum_and_zero_weights_drop() {
        let g = Graph::from_edge_list(&[(0, 1, 1.0), (1, 0, 0.5), (1, 2, 0.0)]).unwrap();
        assert_eq!(g.weight(0, 1), 1.5);
        assert_eq!(g.weight(1, 2), 0.0);
        assert_eq!(g.n(), 3);
        assert!(!g.is_connected());
    }

    #[test]
    fn volumes() {
        let g = p3();
        assert_eq!(g.volume_of(&set(3, &[1])).unwrap(), 2.0);
        assert_eq!(g.volume_of(&NodeSet::full(3)).unwrap(), g.volume());
        assert_eq!(g.volume_of(&NodeSet::empty(3)).unwrap(), 0.0);
        assert!(g.volume_of(&NodeSet::full(4)).is_err());
        assert!(NodeSet::new(3, [3]).is_err());
    }

    #[test]
    fn internal_weights() {
        let k2 = Graph::from_edge_list(&[(0, 1, 1.0)]).unwrap();
        assert_eq!(k2.internal_weight(&NodeSet::full(2)).unwrap(), 2.0);
        assert_eq!(k2.internal_weight(&set(2, &[0])).unwrap(), 0.0);
    }

    #[test]
    fn induced_subgraphs() {
        let g = p3();
        let (k2, map) = g.induced_subgraph(&set(3, &[0, 1])).unwrap();
        assert_eq!(map, vec![0, 1]);
        assert_eq!(k2.degrees(), &[1.0, 1.0]);
        let (ends, _) = g.induced_subgraph(&set(3, &[0, 2])).unwrap();
        assert_eq!(ends.volume(), 0.0);
        assert!(!ends.is_connected());
        let (same, _) = g.induced_subgraph(&NodeSet::full(3)).unwrap();
        assert_eq!(same, g);
        assert_eq!(g.induced_subgraph(&NodeSet::empty(3)).unwrap_err(), Error::EmptySubset);
    }

    #[test]
    fn subset_connectivity() {
        let g = p3();
        assert!(!g.is_connected_subset(&set(3, &[0, 2])).unwrap());
        assert!(g.is_connected_subset(&NodeSet::full(3)).unwrap());
        assert!(g.is_connected_subset(&set(3, &[0])).unwrap());
        assert!(g.is_connected_subset(&NodeSet::empty(3)).unwrap());
        let comps = g.components_of(&set(3, &[0, 2])).unwrap();
        assert_eq!(comps.len(), 2);
    }

    #[test]
    fn subgraph_degree_is_local() {
        let g = p3();
        let (sub, _) = g.induced_subgraph(&set(3, &[1, 2])).unwrap();
        assert_eq!(sub.degrees(), &[1.0, 1.0]);
    }

    #[test]
    fn node_set_algebra() {
        let s = set(5, &[3, 1, 1]);
        assert_eq!(s.members(), &[1, 3]);
        assert_eq!(s.complement().members(), &[0, 2, 4]);
        assert_eq!(s.indicator(), vec![0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(s.first_overlap(&set(5, &[0, 3])), Some(3));
        let local = set(2, &[1]);
        assert_eq!(s.lift(&local).members(), &[3]);
    }
}
