//! Modularity matrices in factored form `M = A + Diag(w) − σ v vᵀ`.
//!
//! Matrices are kept in factored form; [`ModularityMatrix::dense`] is only a
//! view. Every builder checks the structural requirements: `A` symmetric
//! with nonnegative entries, `σ > 0`, `v ≥ 0` and `v ≠ 0`.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet, SymmetricSparse};

/// Default largest dimension for which a dense view is produced.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// A modularity model that can be instantiated on any graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub enum Model {
    /// Newman–Girvan: `A − d dᵀ / vol G`.
    Ng,
    /// Degree-normalized Newman–Girvan: `D^{-1/2} M_NG D^{-1/2}`.
    Norm,
    /// Reichardt–Bornholdt: `A − (γ / vol G) d dᵀ`.
    Rb(f64),
    /// Ronhovde–Nussinov: `A − γ 1 1ᵀ`.
    Rn(f64),
    /// Arenas–Fernández–Gómez: Newman–Girvan after adding a loop of weight γ
    /// to every node.
    Afg(f64),
}

/// Wire form of [`Model`]: `{"name": "rb", "gamma": 2.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl Model {
    /// Parses a model name; parametrized models default to `γ = 1`.
    pub fn parse(name: &str, gamma: Option<f64>) -> Result<Model> {
        let g = gamma.unwrap_or(1.0);
        match name.to_ascii_lowercase().as_str() {
            "ng" => Ok(Model::Ng),
            "norm" => Ok(Model::Norm),
            "rb" => Ok(Model::Rb(g)),
            "rn" => Ok(Model::Rn(g)),
            "afg" => Ok(Model::Afg(g)),
            other => Err(Error::InvalidParameter(format!("unknown model '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Ng => "ng",
            Model::Norm => "norm",
            Model::Rb(_) => "rb",
            Model::Rn(_) => "rn",
            Model::Afg(_) => "afg",
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            Model::Ng | Model::Norm => None,
            Model::Rb(g) | Model::Rn(g) | Model::Afg(g) => Some(g),
        }
    }

    /// Same model family with a different resolution parameter. `ng`
    /// becomes `rb`, since the two coincide at `γ = 1`.
    pub fn with_gamma(&self, gamma: f64) -> Result<Model> {
        match self {
            Model::Ng | Model::Rb(_) => Ok(Model::Rb(gamma)),
            Model::Rn(_) => Ok(Model::Rn(gamma)),
            Model::Afg(_) => Ok(Model::Afg(gamma)),
            Model::Norm => Err(Error::InvalidParameter("model 'norm' has no resolution parameter".into())),
        }
    }

    pub fn build(&self, g: &Graph) -> Result<ModularityMatrix> {
        match *self {
            Model::Ng => ModularityMatrix::ng(g),
            Model::Norm => ModularityMatrix::norm(g),
            Model::Rb(gamma) => ModularityMatrix::rb(g, gamma),
            Model::Rn(gamma) => ModularityMatrix::rn(g, gamma),
            Model::Afg(gamma) => ModularityMatrix::afg(g, gamma),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.gamma() {
            Some(g) => write!(f, "{}(gamma={g})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

impl TryFrom<ModelSpec> for Model {
    type Error = Error;
    fn try_from(spec: ModelSpec) -> Result<Model> {
        Model::parse(&spec.name, spec.gamma)
    }
}

impl From<Model> for ModelSpec {
    fn from(m: Model) -> ModelSpec {
        ModelSpec {
            name: m.name().to_string(),
            gamma: m.gamma(),
        }
    }
}

/// Which construction produced a [`ModularityMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Ng,
    Norm,
    Rb,
    Rn,
    Afg,
    Submatrix,
    Custom,
}

/// `M = A + Diag(w) − σ v vᵀ` in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularityMatrix {
    base: SymmetricSparse,
    diag: Vec<f64>,
    sigma: f64,
    v: Vec<f64>,
    tag: ModelTag,
    gamma: Option<f64>,
}

/// `Q(S)` together with its three additive parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularityReport {
    #[serde(skip)]
    pub subset: Option<NodeSet>,
    #[serde(rename = "q")]
    pub q_value: f64,
    pub e_in: f64,
    pub diag: f64,
    pub penalty: f64,
}

fn require_positive_volume(g: &Graph) -> Result<()> {
    if g.volume() > 0.0 {
        Ok(())
    } else {
        Err(Error::ZeroVolume)
    }
}

fn require_positive_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("resolution parameter must be positive, got {gamma}")))
    }
}

impl ModularityMatrix {
    /// Checked constructor for arbitrary factors (`CUSTOM`).
    pub fn custom(base: SymmetricSparse, diag: Vec<f64>, sigma: f64, v: Vec<f64>) -> Result<Self> {
        Self::assemble(base, diag, sigma, v, ModelTag::Custom, None)
    }

    fn assemble(
        base: SymmetricSparse,
        diag: Vec<f64>,
        sigma: f64,
        v: Vec<f64>,
        tag: ModelTag,
        gamma: Option<f64>,
    ) -> Result<Self> {
        let n = base.dim();
        for len in [diag.len(), v.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        if v.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
            return Err(Error::InvalidParameter("rank-one vector must be nonnegative".into()));
        }
        if v.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidParameter("rank-one vector must be nonzero".into()));
        }
        if diag.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("diagonal weights must be finite".into()));
        }
        Ok(ModularityMatrix {
            base,
            diag,
            sigma,
            v,
            tag,
            gamma,
        })
    }

    /// Newman–Girvan matrix `A − d dᵀ / vol G`.
    pub fn ng(g: &Graph) -> Result<Self> {
        require_positive_volume(g)?;
        Self::assemble(
            g.adjacency().clone(),
            vec![0.0; g.n()],
            1.0 / g.volume(),
            g.degrees().to_vec(),
            ModelTag::Ng,
            None,
        )
    }

    /// `D^{-1/2} M_NG D^{-1/2}`: scaled adjacency with `v = D^{1/2} 1`.
    pub fn norm(g: &Graph) -> Result<Self> {
        if let Some(node) = g.degrees().iter().position(|&d| d <= 0.0) {
            return Err(Error::IsolatedNode { node });
        }
        let d = g.degrees();
        let base = g.adjacency().map_entries(|i, j, w| w / (d[i] * d[j]).sqrt());
        Self::assemble(
            base,
            vec![0.0; g.n()],
            1.0 / g.volume(),
            d.iter().map(|x| x.sqrt()).collect(),
            ModelTag::Norm,
            None,
        )
    }

    /// Reichardt–Bornholdt matrix `A − (γ / vol G) d dᵀ`.
    pub fn rb(g: &Graph, gamma: f64) -> Result<Self> {
        require_positive_gamma(gamma)?;
        require_positive_volume(g)?;
        Self::assemble(
            g.adjacency().clone(),
            vec![0.0; g.n()],
            gamma / g.volume(),
            g.degrees().to_vec(),
            ModelTag::Rb,
            Some(gamma),
        )
    }

    /// Ronhovde–Nussinov matrix `A − γ 1 1ᵀ`.
    pub fn rn(g: &Graph, gamma: f64) -> Result<Self> {
        require_positive_gamma(gamma)?;
        Self::assemble(
            g.adjacency().clone(),
            vec![0.0; g.n()],
            gamma,
            vec![1.0; g.n()],
            ModelTag::Rn,
            Some(gamma),
        )
    }

    /// Arenas–Fernández–Gómez matrix
    /// `A + γI − (d + γ1)(d + γ1)ᵀ / (γn + vol G)`.
    ///
    /// Negative `γ` is accepted down to `−min_i d_i`, so that `d + γ1` stays
    /// nonnegative.
    pub fn afg(g: &Graph, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must be finite, got {gamma}")));
        }
        let n = g.n() as f64;
        let denom = gamma * n + g.volume();
        if denom <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "AFG requires gamma*n + vol G > 0, got {denom}"
            )));
        }
        let min_degree = g.degrees().iter().copied().fold(f64::INFINITY, f64::min);
        if min_degree + gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "AFG requires d + gamma >= 0 componentwise (gamma >= {})",
                -min_degree
            )));
        }
        let v: Vec<f64> = g.degrees().iter().map(|d| d + gamma).collect();
        Self::assemble(g.adjacency().clone(), vec![gamma; g.n()], 1.0 / denom, v, ModelTag::Afg, Some(gamma))
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &SymmetricSparse {
        &self.base
    }

    pub fn diag_weights(&self) -> &[f64] {
        &self.diag
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rank_one_vector(&self) -> &[f64] {
        &self.v
    }

    pub fn tag(&self) -> ModelTag {
        self.tag
    }

    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    /// `y = M x` without dimension checks.
    pub(crate) fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.base.matvec(x, y);
        let vx: f64 = self.v.iter().zip(x).map(|(a, b)| a * b).sum();
        let scale = self.sigma * vx;
        for i in 0..y.len() {
            y[i] += self.diag[i] * x[i] - scale * self.v[i];
        }
    }

    /// `y = (A + W) x` without dimension checks.
    pub(crate) fn apply_base_into(&self, x: &[f64], y: &mut [f64]) {
        self.base.matvec(x, y);
        for i in 0..y.len() {
            y[i] += self.diag[i] * x[i];
        }
    }

    /// Factored matvec `A x + w∘x − σ (vᵀx) v`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut y = vec![0.0; x.len()];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    /// Dense `A + Diag(w) − σ v vᵀ`, capped at [`DEFAULT_DENSE_CAP`].
    pub fn dense(&self) -> Result<DMatrix<f64>> {
        self.dense_capped(DEFAULT_DENSE_CAP)
    }

    pub fn dense_capped(&self, cap: usize) -> Result<DMatrix<f64>> {
        let mut m = self.dense_base_capped(cap)?;
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] -= self.sigma * self.v[i] * self.v[j];
            }
        }
        Ok(m)
    }

    /// Dense `A + Diag(w)`.
    pub fn dense_base_capped(&self, cap: usize) -> Result<DMatrix<f64>> {
        let n = self.dim();
        if n > cap {
            return Err(Error::DenseCapExceeded { n, cap });
        }
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for (j, w) in self.base.row(i) {
                m[(i, j)] = w;
            }
            m[(i, i)] += self.diag[i];
        }
        Ok(m)
    }

    /// `‖M‖_F`, assembled from the factors as
    /// `‖A+W‖² − 2σ vᵀ(A+W)v + σ²‖v‖⁴`.
    pub fn frobenius_norm(&self) -> f64 {
        let base_diag = self.base.diagonal();
        let mut base_sq = self.base.frobenius_sq();
        for (a, w) in base_diag.iter().zip(&self.diag) {
            base_sq += (a + w) * (a + w) - a * a;
        }
        let mut bv = vec![0.0; self.dim()];
        self.apply_base_into(&self.v, &mut bv);
        let vbv: f64 = self.v.iter().zip(&bv).map(|(a, b)| a * b).sum();
        let vv: f64 = self.v.iter().map(|x| x * x).sum();
        let sq = base_sq - 2.0 * self.sigma * vbv + self.sigma * self.sigma * vv * vv;
        sq.max(0.0).sqrt()
    }

    pub fn trace(&self) -> f64 {
        let base_diag = self.base.diagonal();
        (0..self.dim())
            .map(|i| base_diag[i] + self.diag[i] - self.sigma * self.v[i] * self.v[i])
            .sum()
    }

    /// `Q(S) = 1_Sᵀ M 1_S = e_in(S) + Σ_S w_i − σ (Σ_S v_i)²`.
    pub fn modularity(&self, s: &NodeSet) -> Result<ModularityReport> {
        s.check_owner(self.dim())?;
        let mask = s.mask();
        let e_in = self.base.bilinear_masks(&mask, &mask);
        let diag: f64 = s.iter().map(|i| self.diag[i]).sum();
        let vs: f64 = s.iter().map(|i| self.v[i]).sum();
        let penalty = self.sigma * vs * vs;
        Ok(ModularityReport {
            subset: Some(s.clone()),
            q_value: e_in + diag - penalty,
            e_in,
            diag,
            penalty,
        })
    }

    /// Joint modularity `Q(S, T) = 1_Sᵀ M 1_T` of disjoint sets.
    pub fn joint_modularity(&self, s: &NodeSet, t: &NodeSet) -> Result<f64> {
        s.check_owner(self.dim())?;
        t.check_owner(self.dim())?;
        if let Some(node) = s.first_overlap(t) {
            return Err(Error::OverlappingSets { node });
        }
        let cross = self.base.bilinear_masks(&s.mask(), &t.mask());
        let vs: f64 = s.iter().map(|i| self.v[i]).sum();
        let vt: f64 = t.iter().map(|i| self.v[i]).sum();
        Ok(cross - self.sigma * vs * vt)
    }

    /// Principal submatrix `M(S)` in factored form.
    pub fn principal_submatrix(&self, s: &NodeSet) -> Result<Self> {
        s.check_owner(self.dim())?;
        if s.is_empty() {
            return Err(Error::EmptySubset);
        }
        let pick = |x: &[f64]| s.iter().map(|i| x[i]).collect::<Vec<_>>();
        let v = pick(&self.v);
        let tag = if self.tag == ModelTag::Rn {
            ModelTag::Rn
        } else {
            ModelTag::Submatrix
        };
        let gamma = if tag == ModelTag::Rn { self.gamma } else { None };
        if v.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidParameter(
                "rank-one vector vanishes on the subset; submatrix is not a valid modularity matrix".into(),
            ));
        }
        Self::assemble(self.base.principal(s.members()), pick(&self.diag), self.sigma, v, tag, gamma)
    }

    /// Matrix `M^S` used when recursing into `G(S)`.
    ///
    /// Newman–Girvan matrices get the subgraph-degree correction
    /// `M(S) − (D_{G(S)} − (vol S / vol G) D(S))`; `RN` is its own principal
    /// submatrix; everything else falls back to the principal submatrix and
    /// is tagged [`ModelTag::Submatrix`].
    pub fn subgraph_matrix(&self, g: &Graph, s: &NodeSet) -> Result<Self> {
        if g.n() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: g.n(),
            });
        }
        let sub = self.principal_submatrix(s)?;
        if self.tag != ModelTag::Ng {
            return Ok(sub);
        }
        let ratio = g.volume_of(s)? / g.volume();
        let local_degrees = sub.base.row_sums();
        let diag = s
            .iter()
            .zip(&local_degrees)
            .map(|(i, &local)| self.diag[i] - (local - ratio * g.degrees()[i]))
            .collect();
        Self::assemble(sub.base, diag, sub.sigma, sub.v, ModelTag::Ng, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn k2() -> Graph {
        Graph::from_edge_list(&[(0, 1, 1.0)]).unwrap()
    }

    fn p3() -> Graph {
        Graph::from_edge_list(&[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn set(n: usize, m: &[usize]) -> NodeSet {
        NodeSet::new(n, m.iter().copied()).unwrap()
    }

    fn assert_dense(m: &ModularityMatrix, expected: &[&[f64]]) {
        let d = m.dense().unwrap();
        for (i, row) in expected.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert_abs_diff_eq!(d[(i, j)], e, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn ng_on_path_and_k2() {
        let m = ModularityMatrix::ng(&p3()).unwrap();
        let d = m.dense().unwrap();
        assert_abs_diff_eq!(d[(0, 0)], -0.25);
        assert_abs_diff_eq!(d[(0, 1)], 0.5);
        assert_abs_diff_eq!(d[(1, 1)], -1.0);
        assert_abs_diff_eq!(d[(0, 2)], -0.25);
        assert_dense(&ModularityMatrix::ng(&k2()).unwrap(), &[&[-0.5, 0.5], &[0.5, -0.5]]);
        assert_eq!(m.apply(&[1.0; 3]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn ng_rejects_zero_volume() {
        let g = Graph::from_edges(2, std::iter::empty()).unwrap();
        assert_eq!(ModularityMatrix::ng(&g).unwrap_err(), Error::ZeroVolume);
    }

    #[test]
    fn norm_builder() {
        let k = k2();
        assert_eq!(ModularityMatrix::norm(&k).unwrap().dense().unwrap(), ModularityMatrix::ng(&k).unwrap().dense().unwrap());
        let g = p3();
        let m = ModularityMatrix::norm(&g).unwrap();
        let x: Vec<f64> = g.degrees().iter().map(|d| d.sqrt()).collect();
        for y in m.apply(&x).unwrap() {
            assert_abs_diff_eq!(y, 0.0, epsilon = 1e-15);
        }
        // Q_NG(S) = uᵀ M_norm u with u = D^{1/2} 1_S.
        let s = set(3, &[0, 1]);
        let u: Vec<f64> = (0..3).map(|i| if s.contains(i) { x[i] } else { 0.0 }).collect();
        let mu = m.apply(&u).unwrap();
        let quad: f64 = u.iter().zip(&mu).map(|(a, b)| a * b).sum();
        let q = ModularityMatrix::ng(&g).unwrap().modularity(&s).unwrap().q_value;
        assert_abs_diff_eq!(quad, q, epsilon = 1e-14);
        let isolated = Graph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        assert_eq!(ModularityMatrix::norm(&isolated).unwrap_err(), Error::IsolatedNode { node: 2 });
    }

    #[test]
    fn rb_builder() {
        let g = p3();
        assert_eq!(
            ModularityMatrix::rb(&g, 1.0).unwrap().dense().unwrap(),
            ModularityMatrix::ng(&g).unwrap().dense().unwrap()
        );
        assert_dense(&ModularityMatrix::rb(&k2(), 2.0).unwrap(), &[&[-1.0, 0.0], &[0.0, -1.0]]);
        let m = ModularityMatrix::rb(&g, 3.0).unwrap();
        let s = set(3, &[0, 1]);
        let r = m.modularity(&s).unwrap();
        assert_abs_diff_eq!(r.penalty, 3.0 / 4.0 * 9.0);
        assert!(ModularityMatrix::rb(&g, 0.0).is_err());
        assert!(ModularityMatrix::rb(&g, -1.0).is_err());
    }

    #[test]
    fn rn_builder() {
        let m = ModularityMatrix::rn(&k2(), 0.5).unwrap();
        assert_eq!(m.modularity(&NodeSet::full(2)).unwrap().q_value, 0.0);
        assert_eq!(m.modularity(&set(2, &[0])).unwrap().q_value, -0.5);
        assert!(ModularityMatrix::rn(&k2(), 0.0).is_err());
    }

    #[test]
    fn afg_builder() {
        let g = p3();
        assert_eq!(
            ModularityMatrix::afg(&g, 0.0).unwrap().dense().unwrap(),
            ModularityMatrix::ng(&g).unwrap().dense().unwrap()
        );
        let m = ModularityMatrix::afg(&k2(), 1.0).unwrap();
        assert_eq!(m.rank_one_vector(), &[2.0, 2.0]);
        assert_eq!(m.sigma(), 0.25);
        assert_dense(&m, &[&[0.0, 0.0], &[0.0, 0.0]]);
        // Smallest degree on P3 is 1.
        assert!(ModularityMatrix::afg(&g, -1.0).is_ok());
        assert!(ModularityMatrix::afg(&g, -1.5).is_err());
        for y in ModularityMatrix::afg(&g, 0.7).unwrap().apply(&[1.0; 3]).unwrap() {
            assert_abs_diff_eq!(y, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn custom_validation() {
        let base = SymmetricSparse::zeros(2);
        let m = ModularityMatrix::custom(base.clone(), vec![1.0, 2.0], 0.5, vec![1.0, 0.0]).unwrap();
        assert_dense(&m, &[&[0.5, 0.0], &[0.0, 2.0]]);
        assert!(ModularityMatrix::custom(base.clone(), vec![0.0; 2], 0.0, vec![1.0; 2]).is_err());
        assert!(ModularityMatrix::custom(base.clone(), vec![0.0; 2], 1.0, vec![0.0; 2]).is_err());
        assert!(ModularityMatrix::custom(base.clone(), vec![0.0; 2], 1.0, vec![-1.0, 1.0]).is_err());
        assert!(ModularityMatrix::custom(base, vec![0.0; 3], 1.0, vec![1.0; 2]).is_err());
    }

    #[test]
    fn dense_columns_match_apply_on_basis() {
        let m = ModularityMatrix::afg(&p3(), 0.3).unwrap();
        let d = m.dense().unwrap();
        for j in 0..3 {
            let mut e = vec![0.0; 3];
            e[j] = 1.0;
            let col = m.apply(&e).unwrap();
            for i in 0..3 {
                assert_abs_diff_eq!(col[i], d[(i, j)], epsilon = 1e-15);
            }
        }
        assert_eq!(m.apply(&[0.0; 3]).unwrap(), vec![0.0; 3]);
        assert!(m.apply(&[1.0; 2]).is_err());
        assert_eq!(m.dense_capped(2).unwrap_err(), Error::DenseCapExceeded { n: 3, cap: 2 });
    }

    #[test]
    fn factored_frobenius_matches_dense() {
        let m = ModularityMatrix::afg(&p3(), 0.3).unwrap();
        assert_abs_diff_eq!(m.frobenius_norm(), m.dense().unwrap().norm(), epsilon = 1e-13);
    }

    #[test]
    fn modularity_values() {
        let m = ModularityMatrix::ng(&k2()).unwrap();
        assert_eq!(m.modularity(&set(2, &[0])).unwrap().q_value, -0.5);
        assert_eq!(m.modularity(&NodeSet::full(2)).unwrap().q_value, 0.0);
        assert_eq!(m.modularity(&NodeSet::empty(2)).unwrap().q_value, 0.0);
        assert_eq!(m.joint_modularity(&set(2, &[0]), &set(2, &[1])).unwrap(), 0.5);
        assert_eq!(
            m.joint_modularity(&set(2, &[0]), &set(2, &[0, 1])).unwrap_err(),
            Error::OverlappingSets { node: 0 }
        );
    }

    #[test]
    fn joint_modularity_across_components_is_penalty_only() {
        let g = Graph::from_edge_list(&[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let m = ModularityMatrix::ng(&g).unwrap();
        let q = m.joint_modularity(&set(4, &[0]), &set(4, &[2, 3])).unwrap();
        assert_abs_diff_eq!(q, -(1.0 / 4.0) * 1.0 * 2.0);
    }

    #[test]
    fn report_serializes_with_short_field_names() {
        let m = ModularityMatrix::ng(&k2()).unwrap();
        let json = serde_json::to_value(m.modularity(&set(2, &[0])).unwrap()).unwrap();
        assert_eq!(json, serde_json::json!({"q": -0.5, "e_in": 0.0, "diag": 0.0, "penalty": 0.5}));
    }

    #[test]
    fn ng_subgraph_matrix_on_path() {
        let g = p3();
        let m = ModularityMatrix::ng(&g).unwrap();
        let sub = m.subgraph_matrix(&g, &set(3, &[0, 1])).unwrap();
        assert_eq!(sub.diag_weights(), &[-0.25, 0.5]);
        assert_eq!(sub.tag(), ModelTag::Ng);
        let full = m.subgraph_matrix(&g, &NodeSet::full(3)).unwrap();
        assert_eq!(full.dense().unwrap(), m.dense().unwrap());
        // Row sums of M^S vanish.
        for y in sub.apply(&[1.0, 1.0]).unwrap() {
            assert_abs_diff_eq!(y, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn other_models_use_principal_submatrix() {
        let g = p3();
        let s = set(3, &[1, 2]);
        let rn = ModularityMatrix::rn(&g, 0.4).unwrap();
        let sub = rn.subgraph_matrix(&g, &s).unwrap();
        assert_eq!(sub.tag(), ModelTag::Rn);
        let (gs, _) = g.induced_subgraph(&s).unwrap();
        assert_eq!(sub.dense().unwrap(), ModularityMatrix::rn(&gs, 0.4).unwrap().dense().unwrap());
        let rb = ModularityMatrix::rb(&g, 2.0).unwrap();
        let sub = rb.subgraph_matrix(&g, &s).unwrap();
        assert_eq!(sub.tag(), ModelTag::Submatrix);
        let full = rb.dense().unwrap();
        let d = sub.dense().unwrap();
        for (a, &i) in s.members().iter().enumerate() {
            for (b, &j) in s.members().iter().enumerate() {
                assert_abs_diff_eq!(d[(a, b)], full[(i, j)], epsilon = 1e-15);
            }
        }
        assert_eq!(rb.subgraph_matrix(&g, &NodeSet::empty(3)).unwrap_err(), Error::EmptySubset);
    }

    #[test]
    fn model_spec_round_trip() {
        let m: Model = serde_json::from_str(r#"{"name":"rb","gamma":2.0}"#).unwrap();
        assert_eq!(m, Model::Rb(2.0));
        assert_eq!(serde_json::to_string(&Model::Ng).unwrap(), r#"{"name":"ng"}"#);
        assert_eq!(Model::parse("afg", None).unwrap(), Model::Afg(1.0));
        assert!(Model::parse("louvain", None).is_err());
    }
}
