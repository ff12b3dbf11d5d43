//! Spectral bipartition, shifted nodal domains and recursive bipartition.
//!
//! The positive part `{i : x_i ≥ 0}` of an oriented leading eigenvector
//! (`vᵀx ≥ 0`) always induces a connected subgraph; the negative part need
//! not. [`ssgb`] applies the split recursively, rebuilding the subset matrix
//! `M^S` at every level, until no positive eigenvalue remains.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::modmat::{Model, ModelTag, ModularityMatrix};
use crate::spectral::{leading_eigenpair, LeadingPair, SolverOptions};

/// Subsets larger than this have their two subtrees computed in parallel.
const PARALLEL_MIN: usize = 256;

/// A split of the node set by the sign of the leading eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bipartition {
    /// `{i : x_i ≥ 0}`, with entries within the zero tolerance counted as 0.
    pub positive: NodeSet,
    pub negative: NodeSet,
    pub leading: LeadingPair,
    pub positive_connected: bool,
    pub negative_connected: bool,
}

impl Bipartition {
    pub fn is_proper(&self) -> bool {
        !self.positive.is_empty() && !self.negative.is_empty()
    }
}

fn zero_threshold(x: &[f64], zero_tol: f64) -> f64 {
    zero_tol * x.iter().fold(0.0f64, |m, a| m.max(a.abs()))
}

/// Nonnegative support of `x`, treating `|x_i| ≤ zero_tol·‖x‖_∞` as zero.
pub fn nonnegative_part(x: &[f64], zero_tol: f64) -> NodeSet {
    let t = zero_threshold(x, zero_tol);
    NodeSet::from_mask(&x.iter().map(|&a| a >= -t).collect::<Vec<_>>())
}

/// Spectral bipartition of a connected graph.
///
/// Fails with [`Error::Consistency`] if the positive part comes out
/// disconnected, which can only happen through numerical error.
pub fn spectral_bipartition(m: &ModularityMatrix, g: &Graph, opts: &SolverOptions) -> Result<Bipartition> {
    if m.dim() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: m.dim(),
        });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let leading = leading_eigenpair(m, opts)?;
    bipartition_from_pair(g, leading, opts)
}

fn bipartition_from_pair(g: &Graph, leading: LeadingPair, opts: &SolverOptions) -> Result<Bipartition> {
    let positive = nonnegative_part(&leading.vector, opts.zero_tol);
    let negative = positive.complement();
    let positive_connected = g.is_connected_subset(&positive)?;
    if !positive_connected {
        return Err(Error::Consistency(format!(
            "positive part {:?} of the oriented leading eigenvector is disconnected",
            positive.members()
        )));
    }
    let negative_connected = g.is_connected_subset(&negative)?;
    Ok(Bipartition {
        positive,
        negative,
        leading,
        positive_connected,
        negative_connected,
    })
}

/// Inputs of a shifted nodal domain `{i : x_i + ε y_i ≥ 0}`.
#[derive(Debug, Clone, Copy)]
pub struct NodalDomainQuery<'a> {
    /// Oriented leading eigenvector.
    pub x: &'a [f64],
    /// Positive Perron vector of `A + W`.
    pub y: &'a [f64],
    pub epsilon: f64,
    /// Same zero tolerance as [`nonnegative_part`], relative to `‖x‖_∞`.
    pub zero_tol: f64,
}

pub fn nodal_domain(q: &NodalDomainQuery<'_>) -> Result<NodeSet> {
    if q.epsilon.is_nan() || q.epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon must be nonnegative, got {}", q.epsilon)));
    }
    if q.x.len() != q.y.len() {
        return Err(Error::DimensionMismatch {
            expected: q.x.len(),
            got: q.y.len(),
        });
    }
    if let Some(i) = q.y.iter().position(|&a| a.is_nan() || a <= 0.0) {
        return Err(Error::InvalidParameter(format!("shift vector is not positive at node {i}")));
    }
    let t = zero_threshold(q.x, q.zero_tol);
    let mask: Vec<bool> = q.x.iter().zip(q.y).map(|(a, b)| a + q.epsilon * b >= -t).collect();
    Ok(NodeSet::from_mask(&mask))
}

/// Knobs for [`ssgb`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsgbParams {
    pub solver: SolverOptions,
    /// Subsets with at most this many nodes are not split further.
    pub size_floor: usize,
    pub max_depth: Option<usize>,
    /// Refuse splits with `Q(P) + Q(N) < Q(S)`.
    pub greedy_q: bool,
}

impl Default for SsgbParams {
    fn default() -> Self {
        SsgbParams {
            solver: SolverOptions::default(),
            size_floor: 1,
            max_depth: None,
            greedy_q: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    NoPositiveEigenvalue,
    Singleton,
    SizeFloor,
    MaxDepth,
    /// `m_G > 0` but the eigenvector has a single sign on the subset.
    ImproperSplit,
    /// Greedy mode only.
    ModularityDecrease,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::NoPositiveEigenvalue => "no-positive-eigenvalue",
            StopReason::Singleton => "singleton",
            StopReason::SizeFloor => "size-floor",
            StopReason::MaxDepth => "max-depth",
            StopReason::ImproperSplit => "improper-split",
            StopReason::ModularityDecrease => "modularity-decrease",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    /// Sign split of the leading eigenvector of `M^S`.
    Spectral,
    /// `G(S)` was disconnected: one component is separated from the rest.
    Components,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    pub subset: NodeSet,
    pub stop_reason: StopReason,
    /// `Q(S)` under the root matrix.
    pub q: f64,
    pub connected: bool,
    /// Leading eigenpair of `M^S`, when one was computed.
    pub leading: Option<LeadingPair>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub subset: NodeSet,
    pub q: f64,
    pub kind: SplitKind,
    pub tag: ModelTag,
    /// Positive part, in ambient node ids.
    pub positive: NodeSet,
    pub negative: NodeSet,
    pub positive_connected: bool,
    pub negative_connected: bool,
    /// Eigenpair of `M^S` behind a spectral split (local indices).
    pub leading: Option<LeadingPair>,
    /// Children, smaller subset first.
    pub children: [DendrogramNode; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub enum DendrogramNode {
    Leaf(Leaf),
    Split(Box<Split>),
}

impl DendrogramNode {
    pub fn subset(&self) -> &NodeSet {
        match self {
            DendrogramNode::Leaf(l) => &l.subset,
            DendrogramNode::Split(s) => &s.subset,
        }
    }

    fn collect<'a>(&'a self, leaves: &mut Vec<&'a Leaf>, splits: &mut Vec<&'a Split>) {
        match self {
            DendrogramNode::Leaf(l) => leaves.push(l),
            DendrogramNode::Split(s) => {
                splits.push(s);
                for c in &s.children {
                    c.collect(leaves, splits);
                }
            }
        }
    }

    fn to_json(&self, ids: &[u64]) -> Value {
        let subset: Vec<u64> = self.subset().iter().map(|i| ids[i]).collect();
        match self {
            DendrogramNode::Leaf(l) => json!({
                "subset": subset,
                "q": l.q,
                "connected": l.connected,
                "stop_reason": l.stop_reason.as_str(),
                "m_g": l.leading.as_ref().map(|p| p.value),
                "simple": l.leading.as_ref().map(|p| p.simple),
            }),
            DendrogramNode::Split(s) => json!({
                "subset": subset,
                "q": s.q,
                "split": {
                    "kind": s.kind,
                    "matrix": s.tag,
                    "m_g": s.leading.as_ref().map(|p| p.value),
                    "gap": s.leading.as_ref().map(|p| p.gap),
                    "simple": s.leading.as_ref().map(|p| p.simple),
                    "orientation": s.leading.as_ref().map(|p| p.orientation),
                    "positive": s.positive.iter().map(|i| ids[i]).collect::<Vec<_>>(),
                    "positive_connected": s.positive_connected,
                    "negative_connected": s.negative_connected,
                },
                "children": [s.children[0].to_json(ids), s.children[1].to_json(ids)],
            }),
        }
    }
}

/// Output of [`ssgb`]: a binary tree whose leaves partition the node set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub root: DendrogramNode,
    pub model: Model,
    pub n: usize,
}

impl Dendrogram {
    /// Leaves in depth-first order.
    pub fn leaves(&self) -> Vec<&Leaf> {
        let (mut leaves, mut splits) = (Vec::new(), Vec::new());
        self.root.collect(&mut leaves, &mut splits);
        leaves
    }

    pub fn splits(&self) -> Vec<&Split> {
        let (mut leaves, mut splits) = (Vec::new(), Vec::new());
        self.root.collect(&mut leaves, &mut splits);
        splits
    }

    pub fn communities(&self) -> Vec<NodeSet> {
        self.leaves().into_iter().map(|l| l.subset.clone()).collect()
    }

    /// Community index (0-based, leaf order) of every node.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![usize::MAX; self.n];
        for (c, leaf) in self.leaves().iter().enumerate() {
            for i in leaf.subset.iter() {
                labels[i] = c;
            }
        }
        labels
    }

    /// `Σ Q(S_i)` over the leaves.
    pub fn total_modularity(&self) -> f64 {
        self.leaves().iter().map(|l| l.q).sum()
    }

    /// Nested JSON with subsets as sorted arrays of external ids
    /// (`ids[i]` for internal node `i`; pass `None` for `i + 1`).
    pub fn to_json(&self, ids: Option<&[u64]>) -> Value {
        let default: Vec<u64>;
        let ids = match ids {
            Some(ids) => ids,
            None => {
                default = (1..=self.n as u64).collect();
                &default
            }
        };
        json!({
            "model": self.model,
            "n": self.n,
            "node_ids": ids,
            "communities": self.leaves().len(),
            "modularity": self.total_modularity(),
            "root": self.root.to_json(ids),
        })
    }

    /// `node<TAB>community` lines, communities numbered from 1.
    pub fn flat_partition(&self, ids: Option<&[u64]>) -> String {
        let mut out = String::new();
        for (i, c) in self.labels().iter().enumerate() {
            let id = ids.map_or(i as u64 + 1, |ids| ids[i]);
            out.push_str(&format!("{id}\t{}\n", c + 1));
        }
        out
    }
}

struct Ssgb<'a> {
    g: &'a Graph,
    root: ModularityMatrix,
    params: SsgbParams,
}

fn smaller_first(a: NodeSet, b: NodeSet) -> [NodeSet; 2] {
    let key = |s: &NodeSet| (s.len(), s.members().first().copied());
    if key(&b) < key(&a) {
        [b, a]
    } else {
        [a, b]
    }
}

impl Ssgb<'_> {
    fn leaf(&self, subset: NodeSet, stop_reason: StopReason, q: f64, leading: Option<LeadingPair>) -> Result<DendrogramNode> {
        let connected = self.g.is_connected_subset(&subset)?;
        Ok(DendrogramNode::Leaf(Leaf {
            subset,
            stop_reason,
            q,
            connected,
            leading,
        }))
    }

    fn node(&self, subset: NodeSet, depth: usize) -> Result<DendrogramNode> {
        self.node_inner(&subset, depth).map_err(|e| match e {
            Error::At { .. } => e,
            e => e.at(format!("ssgb at depth {depth}, subset of {} nodes starting at {:?}", subset.len(), subset.members().first())),
        })
    }

    fn node_inner(&self, subset: &NodeSet, depth: usize) -> Result<DendrogramNode> {
        let q = self.root.modularity(subset)?.q_value;
        if subset.len() == 1 {
            return self.leaf(subset.clone(), StopReason::Singleton, q, None);
        }
        if subset.len() <= self.params.size_floor {
            return self.leaf(subset.clone(), StopReason::SizeFloor, q, None);
        }
        if self.params.max_depth.is_some_and(|d| depth >= d) {
            return self.leaf(subset.clone(), StopReason::MaxDepth, q, None);
        }
        let components = self.g.components_of(subset)?;
        let (kind, tag, positive, negative, leading) = if components.len() > 1 {
            let largest = components
                .iter()
                .enumerate()
                .max_by_key(|(k, c)| (c.len(), std::cmp::Reverse(*k)))
                .map(|(k, _)| k)
                .unwrap_or(0);
            let positive = components[largest].clone();
            let negative = NodeSet::new(subset.owner_n(), subset.iter().filter(|&i| !positive.contains(i)))?;
            (SplitKind::Components, self.root.tag(), positive, negative, None)
        } else {
            let ms = self.root.subgraph_matrix(self.g, subset)?;
            let (gs, _) = self.g.induced_subgraph(subset)?;
            let lp = leading_eigenpair(&ms, &self.params.solver)?;
            if lp.value <= self.params.solver.tol * lp.frobenius_norm {
                return self.leaf(subset.clone(), StopReason::NoPositiveEigenvalue, q, Some(lp));
            }
            let bip = bipartition_from_pair(&gs, lp, &self.params.solver)?;
            if !bip.is_proper() {
                return self.leaf(subset.clone(), StopReason::ImproperSplit, q, Some(bip.leading));
            }
            (
                SplitKind::Spectral,
                ms.tag(),
                subset.lift(&bip.positive),
                subset.lift(&bip.negative),
                Some(bip.leading),
            )
        };
        if self.params.greedy_q {
            let after = self.root.modularity(&positive)?.q_value + self.root.modularity(&negative)?.q_value;
            let scale = q.abs().max(after.abs()).max(1.0);
            if after < q - self.params.solver.tol * scale {
                return self.leaf(subset.clone(), StopReason::ModularityDecrease, q, leading);
            }
        }
        let positive_connected = self.g.is_connected_subset(&positive)?;
        let negative_connected = self.g.is_connected_subset(&negative)?;
        let [first, second] = smaller_first(positive.clone(), negative.clone());
        let (a, b) = if subset.len() >= PARALLEL_MIN {
            rayon::join(|| self.node(first, depth + 1), || self.node(second, depth + 1))
        } else {
            (self.node(first, depth + 1), self.node(second, depth + 1))
        };
        Ok(DendrogramNode::Split(Box::new(Split {
            subset: subset.clone(),
            q,
            kind,
            tag,
            positive,
            negative,
            positive_connected,
            negative_connected,
            leading,
            children: [a?, b?],
        })))
    }
}

/// Successive spectral graph bipartition of a connected graph.
///
/// Subsets inducing a disconnected subgraph are first split along
/// components; connected ones are split by the sign pattern of the leading
/// eigenvector of `M^S` until `M^S` has no eigenvalue above `τ‖M^S‖_F`.
pub fn ssgb(g: &Graph, model: Model, params: &SsgbParams) -> Result<Dendrogram> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let root = model.build(g)?;
    ssgb_with_matrix(g, root, model, params)
}

/// [`ssgb`] with an explicit root matrix built over `g`.
pub fn ssgb_with_matrix(g: &Graph, root: ModularityMatrix, model: Model, params: &SsgbParams) -> Result<Dendrogram> {
    if root.dim() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: root.dim(),
        });
    }
    let state = Ssgb {
        g,
        root,
        params: *params,
    };
    let root = state.node(NodeSet::full(g.n()), 0)?;
    Ok(Dendrogram { root, model, n: g.n() })
}

/// Findings of [`connectivity_audit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub splits: usize,
    pub spectral_splits: usize,
    pub positive_connected: usize,
    pub negative_connected: usize,
    pub leaves: usize,
    pub connected_leaves: usize,
    /// Connected positive parts over all parts produced by splits.
    pub guaranteed_fraction: Option<f64>,
    /// Subsets (ambient ids) of splits whose positive part is disconnected.
    pub failures: Vec<Vec<usize>>,
    pub passes: bool,
}

/// Rechecks every split of `d` against `g`: each positive part must be
/// connected, so at least half of all split-produced parts are connected.
pub fn connectivity_audit(d: &Dendrogram, g: &Graph) -> Result<AuditReport> {
    let splits = d.splits();
    let leaves = d.leaves();
    let mut positive_connected = 0;
    let mut negative_connected = 0;
    let mut failures = Vec::new();
    for s in &splits {
        if g.is_connected_subset(&s.positive)? {
            positive_connected += 1;
        } else {
            failures.push(s.subset.members().to_vec());
        }
        if g.is_connected_subset(&s.negative)? {
            negative_connected += 1;
        }
    }
    let mut connected_leaves = 0;
    for l in &leaves {
        if g.is_connected_subset(&l.subset)? {
            connected_leaves += 1;
        }
    }
    let guaranteed_fraction = (!splits.is_empty()).then(|| positive_connected as f64 / (2 * splits.len()) as f64);
    Ok(AuditReport {
        splits: splits.len(),
        spectral_splits: splits.iter().filter(|s| s.kind == SplitKind::Spectral).count(),
        positive_connected,
        negative_connected,
        leaves: leaves.len(),
        connected_leaves,
        guaranteed_fraction,
        passes: failures.is_empty() && guaranteed_fraction.is_none_or(|f| f >= 0.5),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn k2_does_not_split() {
        let g = generators::complete(2);
        let m = ModularityMatrix::ng(&g).unwrap();
        let b = spectral_bipartition(&m, &g, &opts()).unwrap();
        assert_eq!(b.positive, NodeSet::full(2));
        assert!(b.negative.is_empty());
        assert!(!b.is_proper());
    }

    #[test]
    fn barbell_splits_into_triangles() {
        let g = generators::barbell(3);
        let m = ModularityMatrix::ng(&g).unwrap();
        let b = spectral_bipartition(&m, &g, &opts()).unwrap();
        let mut parts = [b.positive.members().to_vec(), b.negative.members().to_vec()];
        parts.sort();
        assert_eq!(parts, [vec![0, 1, 2], vec![3, 4, 5]]);
        assert!(b.positive_connected && b.negative_connected);
    }

    #[test]
    fn star_positive_part_is_connected() {
        let g = generators::looped_star(4);
        let m = ModularityMatrix::ng(&g).unwrap();
        let b = spectral_bipartition(&m, &g, &opts()).unwrap();
        assert!(b.positive.contains(0), "zero center entry belongs to the positive part");
        assert!(b.positive_connected);
        assert!(!b.leading.simple);
    }

    #[test]
    fn rejects_disconnected_input() {
        let g = Graph::from_edge_list(&[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let m = ModularityMatrix::ng(&g).unwrap();
        assert_eq!(spectral_bipartition(&m, &g, &opts()).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn nodal_domain_edges() {
        let x = [0.5, -0.2, -0.7];
        let y = [0.3, 0.6, 0.1];
        let q = |epsilon| NodalDomainQuery {
            x: &x,
            y: &y,
            epsilon,
            zero_tol: 1e-10,
        };
        assert_eq!(nodal_domain(&q(0.0)).unwrap().members(), &[0]);
        assert_eq!(nodal_domain(&q(0.5)).unwrap().members(), &[0, 1]);
        assert_eq!(nodal_domain(&q(100.0)).unwrap(), NodeSet::full(3));
        assert!(nodal_domain(&q(-1.0)).is_err());
        let bad = NodalDomainQuery {
            x: &x,
            y: &[0.3, 0.0, 0.1],
            epsilon: 0.0,
            zero_tol: 0.0,
        };
        assert!(nodal_domain(&bad).is_err());
    }

    #[test]
    fn ssgb_k3_is_single_leaf() {
        let g = generators::complete(3);
        let d = ssgb(&g, Model::Ng, &SsgbParams::default()).unwrap();
        let leaves = d.leaves();
        assert_eq!(leaves.len(), 1);
        assert_eq!(leaves[0].stop_reason, StopReason::NoPositiveEigenvalue);
    }

    #[test]
    fn ssgb_barbell_two_triangles() {
        let g = generators::barbell(3);
        let d = ssgb(&g, Model::Ng, &SsgbParams::default()).unwrap();
        let mut comms: Vec<Vec<usize>> = d.communities().iter().map(|s| s.members().to_vec()).collect();
        comms.sort();
        assert_eq!(comms, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let audit = connectivity_audit(&d, &g).unwrap();
        assert!(audit.passes);
        assert_eq!(audit.connected_leaves, 2);
        assert_eq!(d.flat_partition(None).lines().count(), 6);
    }

    #[test]
    fn ssgb_respects_floor_and_depth() {
        let g = generators::barbell(3);
        let floor = SsgbParams {
            size_floor: 6,
            ..SsgbParams::default()
        };
        let d = ssgb(&g, Model::Ng, &floor).unwrap();
        assert_eq!(d.leaves()[0].stop_reason, StopReason::SizeFloor);
        let depth = SsgbParams {
            max_depth: Some(0),
            ..SsgbParams::default()
        };
        let d = ssgb(&g, Model::Ng, &depth).unwrap();
        assert_eq!(d.leaves()[0].stop_reason, StopReason::MaxDepth);
    }

    #[test]
    fn single_leaf_audit_is_vacuous() {
        let g = generators::complete(4);
        let d = ssgb(&g, Model::Ng, &SsgbParams::default()).unwrap();
        let audit = connectivity_audit(&d, &g).unwrap();
        assert!(audit.passes);
        assert_eq!(audit.guaranteed_fraction, None);
    }

    #[test]
    fn dendrogram_json_uses_external_ids() {
        let g = generators::barbell(3);
        let d = ssgb(&g, Model::Ng, &SsgbParams::default()).unwrap();
        let ids: Vec<u64> = (10..16).collect();
        let json = d.to_json(Some(&ids));
        assert_eq!(json["root"]["subset"], json!([10, 11, 12, 13, 14, 15]));
        assert_eq!(json["communities"], json!(2));
        assert!(d.flat_partition(Some(&ids)).starts_with("10\t"));
    }
}
