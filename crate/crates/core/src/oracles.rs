//! Executable checks of the spectral facts behind modularity-based
//! community detection, plus exhaustive ground truth for small graphs.
//!
//! Every check returns a typed report and can render a uniform [`Verdict`]
//! record. A failed conclusion is rerun once with tolerances tightened
//! by [`RETIGHTEN_FACTOR`] before it is reported, since a failure on a
//! proved statement points at the numerics first.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::modmat::{Model, ModularityMatrix};
use crate::partition::{nodal_domain, nonnegative_part, NodalDomainQuery};
use crate::spectral::{
    classify, eigen_decomposition, leading_eigenpair, perron_of_base, positive_eigenvalue_count, symmetric_eigenvalues,
    SolverOptions,
};

/// Divisor applied to tolerances when a failed check is rerun.
pub const RETIGHTEN_FACTOR: f64 = 1e3;

/// Relative slack on the sign-certificate inequality `lhs ≥ rhs`.
pub const CERTIFICATE_TOL: f64 = 1e-12;

/// Largest `n` accepted by the exhaustive subset enumerators.
pub const ENUMERATION_CAP: usize = 22;

/// Uniform record emitted by every oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub theorem: String,
    pub hypotheses_checked: bool,
    pub hypothesis_values: BTreeMap<String, Value>,
    pub conclusion_checked: bool,
    pub pass: bool,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn values(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn tolerances(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn require_connected(m: &ModularityMatrix, g: &Graph) -> Result<()> {
    if m.dim() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: m.dim(),
        });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Strict gap between m_G and λ₁(A + W)

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub m_g: f64,
    pub lambda1_base: f64,
    pub lambda2_base: Option<f64>,
    pub gap: f64,
    /// `tol·‖M‖_F` the gap had to exceed.
    pub threshold: f64,
    pub passes: bool,
    /// `λ₂(A + W) ≤ m_G + threshold`.
    pub sandwich_holds: bool,
    pub retightened: bool,
}

impl GapReport {
    pub fn verdict(&self) -> Verdict {
        Verdict {
            theorem: "strict-gap".into(),
            hypotheses_checked: true,
            hypothesis_values: values(&[
                ("m_g", json!(self.m_g)),
                ("lambda1_base", json!(self.lambda1_base)),
                ("lambda2_base", json!(self.lambda2_base)),
                ("gap", json!(self.gap)),
                ("sandwich_holds", json!(self.sandwich_holds)),
            ]),
            conclusion_checked: true,
            pass: self.passes && self.sandwich_holds,
            tolerances: tolerances(&[("threshold", self.threshold)]),
            warnings: if self.retightened {
                vec!["passed only after tightening tolerances".into()]
            } else {
                Vec::new()
            },
        }
    }
}

/// `m_G < λ₁(A + W)` and `λ₂(A + W) ≤ m_G` on a connected graph.
pub fn check_strict_gap(m: &ModularityMatrix, g: &Graph, opts: &SolverOptions) -> Result<GapReport> {
    require_connected(m, g)?;
    let perron = perron_of_base(m, opts)?;
    let norm = m.frobenius_norm();
    let m_g = perron.value - perron.modularity_gap;
    let evaluate = |tol: f64| {
        let threshold = tol * norm;
        let passes = perron.modularity_gap > threshold;
        let sandwich = perron.second.is_none_or(|l2| l2 <= m_g + threshold);
        (threshold, passes, sandwich)
    };
    let (mut threshold, mut passes, mut sandwich_holds) = evaluate(opts.tol);
    let mut retightened = false;
    if !(passes && sandwich_holds) {
        retightened = true;
        (threshold, passes, sandwich_holds) = evaluate(opts.tol / RETIGHTEN_FACTOR);
    }
    Ok(GapReport {
        m_g,
        lambda1_base: perron.value,
        lambda2_base: perron.second,
        gap: perron.modularity_gap,
        threshold,
        passes,
        sandwich_holds,
        retightened,
    })
}

// ---------------------------------------------------------------------------
// Connectivity of shifted nodal domains

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalCheck {
    pub epsilon: f64,
    pub size: usize,
    pub connected: bool,
    #[serde(skip)]
    pub set: Option<NodeSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalReport {
    pub checks: Vec<NodalCheck>,
    /// Sets grow with ε (in ascending-ε order).
    pub nested: bool,
    pub simple: bool,
    pub orientation: i8,
    pub pass: bool,
    pub retightened: bool,
}

impl NodalReport {
    pub fn verdict(&self) -> Verdict {
        let mut warnings = Vec::new();
        if !self.simple {
            warnings.push("leading eigenvalue is not simple; strict-positive sets carry no connectivity guarantee".into());
        }
        if self.retightened {
            warnings.push("passed only after tightening tolerances".into());
        }
        Verdict {
            theorem: "nodal-domain-connectivity".into(),
            hypotheses_checked: true,
            hypothesis_values: values(&[
                ("orientation", json!(self.orientation)),
                ("simple", json!(self.simple)),
            ]),
            conclusion_checked: true,
            pass: self.pass,
            tolerances: BTreeMap::new(),
            warnings,
        }
        .with_detail("checks", json!(self.checks))
        .with_detail("nested", json!(self.nested))
    }
}

impl Verdict {
    fn with_detail(mut self, key: &str, value: Value) -> Verdict {
        self.hypothesis_values.insert(key.to_string(), value);
        self
    }
}

/// For each ε, whether `{i : x_i + ε y_i ≥ 0}` induces a connected subgraph,
/// with `x` the oriented leading eigenvector and `y` the Perron vector of
/// `A + W`.
pub fn check_nodal_connectivity(
    m: &ModularityMatrix,
    g: &Graph,
    eps_list: &[f64],
    opts: &SolverOptions,
) -> Result<NodalReport> {
    require_connected(m, g)?;
    let leading = leading_eigenpair(m, opts)?;
    let perron = perron_of_base(m, opts)?;
    let mut eps: Vec<f64> = eps_list.to_vec();
    eps.sort_by(f64::total_cmp);
    let run = |zero_tol: f64| -> Result<(Vec<NodalCheck>, bool)> {
        let mut checks = Vec::with_capacity(eps.len());
        let mut nested = true;
        let mut previous: Option<NodeSet> = None;
        for &epsilon in &eps {
            let set = nodal_domain(&NodalDomainQuery {
                x: &leading.vector,
                y: &perron.vector,
                epsilon,
                zero_tol,
            })?;
            if let Some(p) = &previous {
                nested &= p.is_subset_of(&set);
            }
            checks.push(NodalCheck {
                epsilon,
                size: set.len(),
                connected: g.is_connected_subset(&set)?,
                set: Some(set.clone()),
            });
            previous = Some(set);
        }
        Ok((checks, nested))
    };
    let (mut checks, mut nested) = run(opts.zero_tol)?;
    let ok = |c: &[NodalCheck], nested: bool| nested && c.iter().all(|c| c.connected);
    let mut retightened = false;
    if !ok(&checks, nested) {
        retightened = true;
        (checks, nested) = run(opts.zero_tol / RETIGHTEN_FACTOR)?;
    }
    Ok(NodalReport {
        pass: ok(&checks, nested),
        checks,
        nested,
        simple: leading.simple,
        orientation: leading.orientation,
        retightened,
    })
}

// ---------------------------------------------------------------------------
// Sign-pattern certificate

/// Diagonal shift `α` used by [`sign_pattern_certificate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shift {
    Value(f64),
    /// `α = −trace(M)/n`, which minimizes `‖M + αI‖_F`.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCertificate {
    pub subset: NodeSet,
    pub alpha: f64,
    /// `Q(S) + Q(S̄) − 2Q(S, S̄)`.
    pub lhs: f64,
    /// `√((n−1)²+1)·‖M + αI‖_F − nα`.
    pub rhs: f64,
    pub holds: bool,
    /// `M + αI` vanishes, so both sides are zero and every eigenvalue is 0.
    /// The inequality then holds trivially while its conclusion fails for
    /// `n ≥ 2`.
    pub degenerate: bool,
    /// Whether `λ₁(M)` is simple; checked only when the inequality holds.
    pub simple: Option<bool>,
    /// `S = {i : x_i ≥ 0}` exactly, for one of the two signs of `x`.
    pub exact_pattern: Option<bool>,
    /// `x_i ≥ 0` on `S` and `x_i ≤ 0` off `S` (zeros allowed on either side).
    pub sign_compatible: Option<bool>,
    /// `simple && sign_compatible`.
    pub predicted_pattern_verified: Option<bool>,
}

impl SignCertificate {
    /// A certificate that holds but fails its conclusion is a finding.
    pub fn sound(&self) -> bool {
        !self.holds || self.predicted_pattern_verified == Some(true)
    }

    pub fn verdict(&self) -> Verdict {
        Verdict {
            theorem: "sign-pattern-certificate".into(),
            hypotheses_checked: true,
            hypothesis_values: values(&[
                ("subset", json!(self.subset.members())),
                ("alpha", json!(self.alpha)),
                ("lhs", json!(self.lhs)),
                ("rhs", json!(self.rhs)),
                ("holds", json!(self.holds)),
                ("degenerate", json!(self.degenerate)),
                ("simple", json!(self.simple)),
                ("exact_pattern", json!(self.exact_pattern)),
            ]),
            conclusion_checked: self.holds,
            pass: self.sound(),
            tolerances: tolerances(&[("certificate", CERTIFICATE_TOL)]),
            warnings: Vec::new(),
        }
    }
}

/// `‖M + αI‖_F` from the factored form: `‖M‖² + 2α tr M + nα²`.
pub fn shifted_frobenius(m: &ModularityMatrix, alpha: f64) -> f64 {
    let f = m.frobenius_norm();
    let sq = f * f + 2.0 * alpha * m.trace() + m.dim() as f64 * alpha * alpha;
    sq.max(0.0).sqrt()
}

/// Evaluates the sign-pattern inequality for `S` and, when it holds,
/// checks its conclusion against an independent eigendecomposition.
pub fn sign_pattern_certificate(
    m: &ModularityMatrix,
    s: &NodeSet,
    shift: Shift,
    opts: &SolverOptions,
) -> Result<SignCertificate> {
    s.check_owner(m.dim())?;
    let n = m.dim() as f64;
    let alpha = match shift {
        Shift::Value(a) => a,
        Shift::Auto => -m.trace() / n,
    };
    let complement = s.complement();
    let lhs = m.modularity(s)?.q_value + m.modularity(&complement)?.q_value
        - 2.0 * m.joint_modularity(s, &complement)?;
    let shifted = shifted_frobenius(m, alpha);
    let scaled = ((n - 1.0).powi(2) + 1.0).sqrt() * shifted;
    let rhs = scaled - n * alpha;
    let slack = CERTIFICATE_TOL * scaled.max((n * alpha).abs()).max(lhs.abs()).max(1.0);
    let holds = lhs >= rhs - slack;
    let mut cert = SignCertificate {
        subset: s.clone(),
        alpha,
        lhs,
        rhs,
        holds,
        degenerate: shifted <= CERTIFICATE_TOL * (m.frobenius_norm() + n * alpha.abs()),
        simple: None,
        exact_pattern: None,
        sign_compatible: None,
        predicted_pattern_verified: None,
    };
    if !holds {
        return Ok(cert);
    }
    let eig = eigen_decomposition(m, opts)?;
    let simple = eig.values.len() < 2 || eig.values[0] - eig.values[1] > opts.simple_tol * m.frobenius_norm();
    let x = &eig.vectors[0];
    let neg: Vec<f64> = x.iter().map(|a| -a).collect();
    let exact = [x.as_slice(), neg.as_slice()]
        .iter()
        .any(|y| nonnegative_part(y, opts.zero_tol) == *s);
    let t = opts.zero_tol * x.iter().fold(0.0f64, |acc, a| acc.max(a.abs()));
    let mask = s.mask();
    let compatible = [x.as_slice(), neg.as_slice()].iter().any(|y| {
        y.iter()
            .zip(&mask)
            .all(|(&a, &inside)| if inside { a >= -t } else { a <= t })
    });
    cert.simple = Some(simple);
    cert.exact_pattern = Some(exact);
    cert.sign_compatible = Some(compatible);
    cert.predicted_pattern_verified = Some(simple && compatible);
    Ok(cert)
}

// ---------------------------------------------------------------------------
// Edge perturbation

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub edge: (usize, usize),
    pub epsilon: f64,
    pub m_g: f64,
    pub m_g_perturbed: f64,
    /// `(m_{G_ε} − m_{G_0}) / ε`.
    pub mu: f64,
    /// `2 x_i x_j` (or `x_i²` for a loop).
    pub first_order: f64,
    pub cos_theta: f64,
    /// Smallest η with `‖E‖₂ ≤ ηε` for the diagonal relative perturbation
    /// of the rank-one factor; `None` when some `v_i = 0`.
    pub eta: Option<f64>,
    /// `2η|cos θ|·‖σvvᵀ‖₂`.
    pub error_bound: Option<f64>,
    /// `sign(μ) = sign(2 x_i x_j)`.
    pub sign_consistent: bool,
    /// `2|x_i x_j|` exceeds the error bound, so the sign law is predicted.
    pub bound_predicts_sign: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl PerturbationReport {
    pub fn verdict(&self) -> Verdict {
        let predicted = self.bound_predicts_sign == Some(true);
        Verdict {
            theorem: "perturbation-first-order".into(),
            hypotheses_checked: true,
            hypothesis_values: values(&[
                ("edge", json!([self.edge.0, self.edge.1])),
                ("epsilon", json!(self.epsilon)),
                ("mu", json!(self.mu)),
                ("first_order", json!(self.first_order)),
                ("cos_theta", json!(self.cos_theta)),
                ("eta", json!(self.eta)),
                ("error_bound", json!(self.error_bound)),
            ]),
            conclusion_checked: predicted,
            pass: !predicted || self.sign_consistent,
            tolerances: BTreeMap::new(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Rate of change of `m_G` when edge `(i, j)` gains weight `epsilon`, the
/// model matrix being rebuilt on the perturbed graph.
pub fn perturbation_rate(
    g: &Graph,
    model: Model,
    i: usize,
    j: usize,
    epsilon: f64,
    opts: &SolverOptions,
) -> Result<PerturbationReport> {
    for index in [i, j] {
        if index >= g.n() {
            return Err(Error::NodeOutOfRange { index, n: g.n() });
        }
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let m0 = model.build(g)?;
    let lp0 = leading_eigenpair(&m0, opts)?;
    if !lp0.simple {
        return Err(Error::NotSimple { gap: lp0.gap });
    }
    let perturbed = g.with_added_weight(i, j, epsilon)?;
    let m1 = model.build(&perturbed)?;
    let lp1 = leading_eigenpair(&m1, opts)?;
    let x = &lp0.vector;
    let first_order = if i == j { x[i] * x[i] } else { 2.0 * x[i] * x[j] };
    let v0 = m0.rank_one_vector();
    let vnorm = v0.iter().map(|a| a * a).sum::<f64>().sqrt();
    let cos_theta = x.iter().zip(v0).map(|(a, b)| a * b).sum::<f64>() / vnorm;
    let mut warnings = Vec::new();
    let eta = if v0.contains(&0.0) {
        warnings.push("v has zero entries: the diagonal relative perturbation E is undefined".into());
        None
    } else {
        let (s0, s1) = (m0.sigma().sqrt(), m1.sigma().sqrt());
        let worst = v0
            .iter()
            .zip(m1.rank_one_vector())
            .map(|(a, b)| ((s1 * b - s0 * a) / (s0 * a)).abs())
            .fold(0.0f64, f64::max);
        Some(worst / epsilon)
    };
    if m0.diag_weights() != m1.diag_weights() {
        warnings.push("diagonal weights change under the perturbation".into());
    }
    let error_bound = eta.map(|eta| 2.0 * eta * cos_theta.abs() * m0.sigma() * vnorm * vnorm);
    let mu = (lp1.value - lp0.value) / epsilon;
    Ok(PerturbationReport {
        edge: (i, j),
        epsilon,
        m_g: lp0.value,
        m_g_perturbed: lp1.value,
        mu,
        first_order,
        cos_theta,
        eta,
        error_bound,
        sign_consistent: mu.signum() == first_order.signum(),
        bound_predicts_sign: error_bound.map(|b| first_order.abs() > b),
        warnings,
    })
}

/// `|μ(ε) − 2x_ix_j| / |μ(ε/2) − 2x_ix_j|`, about 2 when the remainder is
/// linear in ε.
pub fn richardson_ratio(g: &Graph, model: Model, i: usize, j: usize, epsilon: f64, opts: &SolverOptions) -> Result<f64> {
    let a = perturbation_rate(g, model, i, j, epsilon, opts)?;
    let b = perturbation_rate(g, model, i, j, epsilon / 2.0, opts)?;
    Ok((a.mu - a.first_order).abs() / (b.mu - b.first_order).abs())
}

// ---------------------------------------------------------------------------
// Cluster matrices and eigenvalue-count bounds

/// `C = ZᵀMZ` and `B = Zᵀ(A + W)Z` for disjoint subsets `S_1 … S_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterMatrix {
    pub subsets: Vec<NodeSet>,
    pub c: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

impl ClusterMatrix {
    pub fn k(&self) -> usize {
        self.subsets.len()
    }

    pub fn c_matrix(&self) -> DMatrix<f64> {
        let k = self.k();
        DMatrix::from_fn(k, k, |i, j| self.c[i][j])
    }
}

pub fn cluster_matrix(m: &ModularityMatrix, subsets: &[NodeSet]) -> Result<ClusterMatrix> {
    for (a, s) in subsets.iter().enumerate() {
        s.check_owner(m.dim())?;
        if s.is_empty() {
            return Err(Error::EmptySubset);
        }
        for t in &subsets[a + 1..] {
            if let Some(node) = s.first_overlap(t) {
                return Err(Error::OverlappingSets { node });
            }
        }
    }
    let k = subsets.len();
    let masks: Vec<Vec<bool>> = subsets.iter().map(NodeSet::mask).collect();
    let mut c = vec![vec![0.0; k]; k];
    let mut b = vec![vec![0.0; k]; k];
    for i in 0..k {
        let report = m.modularity(&subsets[i])?;
        c[i][i] = report.q_value;
        b[i][i] = report.e_in + report.diag;
        for j in i + 1..k {
            let q = m.joint_modularity(&subsets[i], &subsets[j])?;
            let cross = m.base().bilinear_masks(&masks[i], &masks[j]);
            c[i][j] = q;
            c[j][i] = q;
            b[i][j] = cross;
            b[j][i] = cross;
        }
    }
    Ok(ClusterMatrix {
        subsets: subsets.to_vec(),
        c,
        b,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub theorem: String,
    pub applicable: bool,
    pub bound: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountBoundReport {
    /// Largest lower bound among the applicable results.
    pub k_positive_required: usize,
    pub which_theorem: Option<String>,
    pub spectrum_count: usize,
    pub passes: bool,
    pub checks: Vec<BoundCheck>,
    pub retightened: bool,
}

impl CountBoundReport {
    pub fn check(&self, theorem: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.theorem == theorem)
    }

    pub fn verdict(&self) -> Verdict {
        Verdict {
            theorem: "positive-eigenvalue-count".into(),
            hypotheses_checked: true,
            hypothesis_values: values(&[
                ("checks", json!(self.checks)),
                ("which_theorem", json!(self.which_theorem)),
                ("k_positive_required", json!(self.k_positive_required)),
                ("spectrum_count", json!(self.spectrum_count)),
            ]),
            conclusion_checked: self.which_theorem.is_some(),
            pass: self.passes,
            tolerances: BTreeMap::new(),
            warnings: if self.retightened {
                vec!["passed only after tightening tolerances".into()]
            } else {
                Vec::new()
            },
        }
    }
}

pub const BOUND_CLUSTER_INERTIA: &str = "cluster-inertia";
pub const BOUND_SEPARATED_MODULES: &str = "separated-modules";
pub const BOUND_ZERO_ROW_SUM_PARTITION: &str = "zero-row-sum-partition";
pub const BOUND_DIAGONALLY_DOMINANT: &str = "diagonally-dominant-blocks";

/// Lower bounds on the number of positive eigenvalues of `M` from a family
/// of disjoint subsets, each verified against the dense spectrum.
///
/// Checked in order: the inertia of `C` itself; `k` well-separated modules
/// (`Q(S_i) > 0`, `Q(S_i,S_j) < 0`, and positive weights `α` with
/// `α_i Q(S_i) > Σ_{j≠i} α_j |Q(S_i,S_j)|`); `p − 1` when the subsets
/// partition `V` and `M1 = 0`; `k − 1` when `B` is strictly diagonally
/// dominant.
pub fn module_count_bound(
    m: &ModularityMatrix,
    subsets: &[NodeSet],
    alpha: Option<&[f64]>,
    opts: &SolverOptions,
) -> Result<CountBoundReport> {
    let cm = cluster_matrix(m, subsets)?;
    let k = cm.k();
    if let Some(a) = alpha {
        if a.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: a.len() });
        }
    }
    let c = &cm.c;
    let c_norm = c.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let eps = opts.tol * c_norm.max(f64::MIN_POSITIVE);
    let mut checks = Vec::new();

    let c_spec = classify(symmetric_eigenvalues(cm.c_matrix()), c_norm, opts.tol);
    checks.push(BoundCheck {
        theorem: BOUND_CLUSTER_INERTIA.into(),
        applicable: true,
        bound: c_spec.positive_count,
        detail: format!("C has {} positive eigenvalues", c_spec.positive_count),
    });

    let modules = (0..k).all(|i| c[i][i] > eps);
    let separated = (0..k).all(|i| (0..k).all(|j| i == j || c[i][j] < -eps));
    let dominated = |w: &[f64]| {
        (0..k).all(|i| {
            let off: f64 = (0..k).filter(|&j| j != i).map(|j| w[j] * c[i][j].abs()).sum();
            w[i] * c[i][i] > off + eps
        })
    };
    let (applicable, detail) = if !(modules && separated) {
        (false, "requires Q(S_i) > 0 and Q(S_i, S_j) < 0".to_string())
    } else if let Some(a) = alpha {
        if a.iter().any(|&x| x.is_nan() || x <= 0.0) {
            (false, "supplied weights are not all positive".to_string())
        } else {
            (dominated(a), "weights supplied by caller".to_string())
        }
    } else if dominated(&vec![1.0; k]) {
        (true, "unit weights suffice".to_string())
    } else {
        // A symmetric Z-matrix admits α > 0 with Cα > 0 iff it is a
        // nonsingular M-matrix, i.e. positive definite.
        let comparison = DMatrix::from_fn(k, k, |i, j| if i == j { c[i][i] } else { -c[i][j].abs() });
        let smallest = symmetric_eigenvalues(comparison).last().copied().unwrap_or(0.0);
        (smallest > eps, format!("comparison matrix smallest eigenvalue {smallest:e}"))
    };
    checks.push(BoundCheck {
        theorem: BOUND_SEPARATED_MODULES.into(),
        applicable,
        bound: k,
        detail,
    });

    let covered: usize = subsets.iter().map(NodeSet::len).sum();
    let partition = covered == m.dim();
    let ones = m.apply(&vec![1.0; m.dim()])?;
    let row_sum = ones.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let zero_rows = row_sum <= 1e-12 * m.frobenius_norm().max(1.0);
    checks.push(BoundCheck {
        theorem: BOUND_ZERO_ROW_SUM_PARTITION.into(),
        applicable: partition && zero_rows && modules && separated && k >= 1,
        bound: k.saturating_sub(1),
        detail: format!("partition: {partition}, ‖M1‖∞ = {row_sum:e}"),
    });

    let b = &cm.b;
    let diag_dominant = (0..k).all(|i| {
        let off: f64 = (0..k).filter(|&j| j != i).map(|j| b[i][j]).sum();
        b[i][i] > off
    });
    checks.push(BoundCheck {
        theorem: BOUND_DIAGONALLY_DOMINANT.into(),
        applicable: diag_dominant,
        bound: k.saturating_sub(1),
        detail: "B_ii > Σ_{j≠i} B_ij".to_string(),
    });

    let best = checks.iter().filter(|c| c.applicable).max_by_key(|c| c.bound);
    let required = best.map_or(0, |c| c.bound);
    let which_theorem = best.map(|c| c.theorem.clone());
    let mut spectrum_count = positive_eigenvalue_count(m, opts)?;
    let mut retightened = false;
    if spectrum_count < required {
        retightened = true;
        spectrum_count = positive_eigenvalue_count(m, &opts.tightened(RETIGHTEN_FACTOR))?;
    }
    Ok(CountBoundReport {
        k_positive_required: required,
        which_theorem,
        spectrum_count,
        passes: spectrum_count >= required,
        checks,
        retightened,
    })
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

/// Calls `f(mask, Q(S))` for every subset `S` (bit `i` of `mask` set iff
/// `i ∈ S`), walking subsets in Gray-code order with O(n) updates.
pub fn for_each_subset_modularity(m: &ModularityMatrix, mut f: impl FnMut(u32, f64)) -> Result<()> {
    let n = m.dim();
    if n > ENUMERATION_CAP {
        return Err(Error::InvalidParameter(format!(
            "exhaustive enumeration is capped at {ENUMERATION_CAP} nodes, got {n}"
        )));
    }
    let dense = m.dense()?;
    let mut mx = vec![0.0; n];
    let mut mask = 0u32;
    let mut q = 0.0;
    f(0, 0.0);
    for step in 1u32..(1u32 << n) {
        let k = step.trailing_zeros() as usize;
        let bit = 1u32 << k;
        if mask & bit == 0 {
            q += 2.0 * mx[k] + dense[(k, k)];
            for (r, y) in mx.iter_mut().enumerate() {
                *y += dense[(r, k)];
            }
        } else {
            q -= 2.0 * mx[k] - dense[(k, k)];
            for (r, y) in mx.iter_mut().enumerate() {
                *y -= dense[(r, k)];
            }
        }
        mask ^= bit;
        f(mask, q);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceMax {
    pub subset: NodeSet,
    pub q: f64,
}

/// `Q* = max_S Q(S)` by exhaustive search (n ≤ [`ENUMERATION_CAP`]).
pub fn brute_force_max_modularity(m: &ModularityMatrix) -> Result<BruteForceMax> {
    let mut best = (0u32, 0.0f64);
    for_each_subset_modularity(m, |mask, q| {
        if q > best.1 {
            best = (mask, q);
        }
    })?;
    let n = m.dim();
    let subset = NodeSet::new(n, (0..n).filter(|i| best.0 & (1 << i) != 0))?;
    let q = m.modularity(&subset)?.q_value;
    Ok(BruteForceMax { subset, q })
}
