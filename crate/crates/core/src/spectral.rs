//! Eigencomputations for factored modularity matrices.
//!
//! Matrices up to [`SolverOptions::dense_cap`] go through a dense symmetric
//! eigendecomposition; larger ones use restarted Lanczos on the factored
//! matvec with a seeded start vector. Both paths are deterministic.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lanczos::{self, LanczosParams, SymmetricOperator};
use crate::modmat::{ModularityMatrix, DEFAULT_DENSE_CAP};

/// Tolerances and solver limits shared by every spectral routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Sign tolerance τ relative to `‖M‖_F`: an eigenvalue counts as
    /// positive when it exceeds `τ‖M‖_F`.
    pub tol: f64,
    /// `m_G` is reported simple when `λ₁ − λ₂ > simple_tol·‖M‖_F`.
    pub simple_tol: f64,
    /// Lanczos stops once `‖Mx − θx‖ ≤ residual_tol·‖M‖_F`.
    pub residual_tol: f64,
    /// Eigenvector entries with `|x_i| ≤ zero_tol·‖x‖_∞` count as zero.
    pub zero_tol: f64,
    pub dense_cap: usize,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            simple_tol: 1e-8,
            residual_tol: 1e-10,
            zero_tol: 1e-10,
            dense_cap: DEFAULT_DENSE_CAP,
            krylov_dim: 64,
            max_restarts: 5000,
            seed: 42,
        }
    }
}

impl SolverOptions {
    /// Copy with every comparison tolerance divided by `factor`.
    pub fn tightened(&self, factor: f64) -> SolverOptions {
        SolverOptions {
            tol: self.tol / factor,
            simple_tol: self.simple_tol / factor,
            zero_tol: self.zero_tol / factor,
            ..*self
        }
    }

    fn lanczos(&self, norm: f64) -> LanczosParams {
        LanczosParams {
            krylov_dim: self.krylov_dim,
            max_restarts: self.max_restarts,
            residual_target: self.residual_tol * norm.max(f64::MIN_POSITIVE),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Dense,
    Lanczos,
}

/// How an eigenpair was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub solver: SolverKind,
    pub iterations: usize,
    /// `‖Mx − λx‖₂` of the returned pair.
    pub residual: f64,
}

/// Rightmost eigenpair `(m_G, x)` of a modularity matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadingPair {
    pub value: f64,
    /// Unit eigenvector, oriented so that `vᵀx ≥ 0`.
    pub vector: Vec<f64>,
    /// λ₂, or `None` for 1×1 matrices.
    pub second: Option<f64>,
    pub gap: f64,
    pub simple: bool,
    /// 1 when `vᵀx > 0`; 0 when `vᵀx` vanished within tolerance and the
    /// largest-magnitude entry was made positive instead.
    pub orientation: i8,
    pub frobenius_norm: f64,
    pub diagnostics: Diagnostics,
}

/// All eigenvalues in descending order plus tolerance-classified counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub positive_count: usize,
    pub nonnegative_count: usize,
    pub tolerance: f64,
    /// Absolute threshold `τ‖M‖_F` used for the counts.
    pub threshold: f64,
}

/// Eigenvalues (descending) with matching unit eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Perron eigenpair of `A + W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronData {
    pub value: f64,
    /// Strictly positive unit eigenvector.
    pub vector: Vec<f64>,
    /// λ₂(A + W), when computed.
    pub second: Option<f64>,
    /// `λ₁(A + W) − m_G`, strictly positive in exact arithmetic.
    pub modularity_gap: f64,
    pub diagnostics: Diagnostics,
}

impl SymmetricOperator for ModularityMatrix {
    fn dim(&self) -> usize {
        ModularityMatrix::dim(self)
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_into(x, y)
    }
}

/// The `A + W` part of a modularity matrix as an operator.
pub struct BaseOperator<'a>(pub &'a ModularityMatrix);

impl SymmetricOperator for BaseOperator<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply_base_into(x, y)
    }
}

/// Eigendecomposition of a dense symmetric matrix, sorted descending.
pub fn symmetric_eigen(m: DMatrix<f64>) -> EigenDecomposition {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    EigenDecomposition {
        values: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        vectors: order.iter().map(|&k| eig.eigenvectors.column(k).iter().copied().collect()).collect(),
    }
}

/// Eigenvalues of a dense symmetric matrix, sorted descending.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

fn residual_of<O: SymmetricOperator + ?Sized>(op: &O, value: f64, x: &[f64]) -> f64 {
    let mut y = vec![0.0; x.len()];
    op.apply(x, &mut y);
    y.iter().zip(x).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt()
}

/// Top two eigenvalues and the top eigenvector of `op`.
fn top_two<O: SymmetricOperator + ?Sized>(
    op: &O,
    dense: impl FnOnce() -> Result<DMatrix<f64>>,
    norm: f64,
    opts: &SolverOptions,
) -> Result<(f64, Vec<f64>, Option<f64>, Diagnostics)> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if n <= opts.dense_cap {
        let eig = symmetric_eigen(dense()?);
        let x = eig.vectors[0].clone();
        let residual = residual_of(op, eig.values[0], &x);
        let diag = Diagnostics {
            solver: SolverKind::Dense,
            iterations: 0,
            residual,
        };
        return Ok((eig.values[0], x, eig.values.get(1).copied(), diag));
    }
    let params = opts.lanczos(norm);
    let first = lanczos::rightmost(op, &[], &params)?;
    let second = lanczos::rightmost(op, std::slice::from_ref(&first.vector), &params)?;
    let diag = Diagnostics {
        solver: SolverKind::Lanczos,
        iterations: first.matvecs + second.matvecs,
        residual: first.residual,
    };
    Ok((first.value, first.vector, Some(second.value), diag))
}

/// Flips `x` so that `vᵀx ≥ 0`. When `vᵀx` vanishes within tolerance the
/// largest-magnitude entry (lowest index on ties) is made positive and 0 is
/// returned.
pub fn orient(x: &mut [f64], v: &[f64], tol: f64) -> i8 {
    let vx: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
    let xn = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let vn = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let flip;
    let orientation;
    if vx.abs() > tol * xn * vn {
        flip = vx < 0.0;
        orientation = 1;
    } else {
        let max = x.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let k = x.iter().position(|a| a.abs() >= max * (1.0 - 1e-12)).unwrap_or(0);
        flip = x[k] < 0.0;
        orientation = 0;
    }
    if flip {
        for a in x.iter_mut() {
            *a = -*a;
        }
    }
    orientation
}

/// Rightmost eigenpair, oriented so that `vᵀx ≥ 0`, with simplicity flag.
pub fn leading_eigenpair(m: &ModularityMatrix, opts: &SolverOptions) -> Result<LeadingPair> {
    let norm = m.frobenius_norm();
    let (value, mut vector, second, diagnostics) = top_two(m, || m.dense_capped(opts.dense_cap), norm, opts)?;
    let orientation = orient(&mut vector, m.rank_one_vector(), opts.tol);
    let gap = second.map_or(f64::INFINITY, |s| value - s);
    Ok(LeadingPair {
        value,
        vector,
        second,
        gap,
        simple: gap > opts.simple_tol * norm,
        orientation,
        frobenius_norm: norm,
        diagnostics,
    })
}

/// Full eigendecomposition through the dense path.
pub fn eigen_decomposition(m: &ModularityMatrix, opts: &SolverOptions) -> Result<EigenDecomposition> {
    Ok(symmetric_eigen(m.dense_capped(opts.dense_cap)?))
}

/// All eigenvalues with sign counts under threshold `τ‖M‖_F`.
pub fn full_spectrum(m: &ModularityMatrix, opts: &SolverOptions) -> Result<Spectrum> {
    let eigenvalues = symmetric_eigenvalues(m.dense_capped(opts.dense_cap)?);
    Ok(classify(eigenvalues, m.frobenius_norm(), opts.tol))
}

/// Sign classification of a descending eigenvalue list.
pub fn classify(eigenvalues: Vec<f64>, norm: f64, tol: f64) -> Spectrum {
    let threshold = tol * norm;
    Spectrum {
        positive_count: eigenvalues.iter().filter(|&&l| l > threshold).count(),
        nonnegative_count: eigenvalues.iter().filter(|&&l| l >= -threshold).count(),
        eigenvalues,
        tolerance: tol,
        threshold,
    }
}

pub fn positive_eigenvalue_count(m: &ModularityMatrix, opts: &SolverOptions) -> Result<usize> {
    Ok(full_spectrum(m, opts)?.positive_count)
}

/// Perron eigenpair of `A + W`, which requires `A` irreducible.
pub fn perron_of_base(m: &ModularityMatrix, opts: &SolverOptions) -> Result<PerronData> {
    if !m.base().is_irreducible() {
        return Err(Error::Disconnected);
    }
    let base = BaseOperator(m);
    let norm = m.frobenius_norm();
    let (value, mut vector, second, diagnostics) =
        top_two(&base, || m.dense_base_capped(opts.dense_cap), norm, opts)?;
    if vector.iter().sum::<f64>() < 0.0 {
        for a in &mut vector {
            *a = -*a;
        }
    }
    if let Some(node) = vector.iter().position(|&a| a <= 0.0) {
        return Err(Error::Consistency(format!(
            "Perron vector of A + W is not positive at node {node} ({:e})",
            vector[node]
        )));
    }
    let leading = leading_eigenpair(m, opts)?;
    let modularity_gap = value - leading.value;
    if modularity_gap < -opts.tol * norm {
        return Err(Error::Consistency(format!(
            "m_G = {} exceeds λ₁(A + W) = {value}",
            leading.value
        )));
    }
    Ok(PerronData {
        value,
        vector,
        second,
        modularity_gap,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use approx::assert_abs_diff_eq;

    fn k(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j, 1.0));
            }
        }
        Graph::from_edge_list(&e).unwrap()
    }

    fn star(m: usize) -> Graph {
        let r = (m as f64).sqrt();
        let mut e: Vec<_> = (1..=m).map(|i| (0, i, 1.0)).collect();
        e.extend((0..=m).map(|i| (i, i, r)));
        Graph::from_edge_list(&e).unwrap()
    }

    fn lanczos_opts() -> SolverOptions {
        SolverOptions {
            dense_cap: 0,
            krylov_dim: 8,
            ..SolverOptions::default()
        }
    }

    #[test]
    fn k2_leading_pair() {
        let m = ModularityMatrix::ng(&k(2)).unwrap();
        let lp = leading_eigenpair(&m, &SolverOptions::default()).unwrap();
        assert_abs_diff_eq!(lp.value, 0.0, epsilon = 1e-15);
        let s = 0.5f64.sqrt();
        assert_abs_diff_eq!(lp.vector[0], s, epsilon = 1e-14);
        assert_abs_diff_eq!(lp.vector[1], s, epsilon = 1e-14);
        assert_abs_diff_eq!(lp.second.unwrap(), -1.0, epsilon = 1e-14);
        assert!(lp.simple);
        assert_eq!(lp.orientation, 1);
    }

    #[test]
    fn k3_spectrum() {
        let m = ModularityMatrix::ng(&k(3)).unwrap();
        let sp = full_spectrum(&m, &SolverOptions::default()).unwrap();
        for (a, b) in sp.eigenvalues.iter().zip([0.0, -1.0, -1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        assert_eq!(sp.positive_count, 0);
        assert_eq!(sp.nonnegative_count, 1);
    }

    #[test]
    fn star_has_repeated_leading_eigenvalue() {
        let m = ModularityMatrix::ng(&star(4)).unwrap();
        let opts = SolverOptions::default();
        let lp = leading_eigenpair(&m, &opts).unwrap();
        assert_abs_diff_eq!(lp.value, 2.0, epsilon = 1e-12);
        assert!(!lp.simple);
        assert_eq!(lp.orientation, 0);
        let sp = full_spectrum(&m, &opts).unwrap();
        assert_eq!(sp.eigenvalues.iter().filter(|l| (*l - 2.0).abs() < 1e-8).count(), 3);
        assert_eq!(sp.positive_count, 3);
        let lz = leading_eigenpair(&m, &lanczos_opts()).unwrap();
        assert_eq!(lz.diagnostics.solver, SolverKind::Lanczos);
        assert_abs_diff_eq!(lz.value, 2.0, epsilon = 1e-9);
        assert!(!lz.simple);
    }

    #[test]
    fn perron_of_small_graphs() {
        let m = ModularityMatrix::ng(&k(2)).unwrap();
        let p = perron_of_base(&m, &SolverOptions::default()).unwrap();
        assert_abs_diff_eq!(p.value, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.vector[0], 0.5f64.sqrt(), epsilon = 1e-14);
        let p3 = Graph::from_edge_list(&[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let p = perron_of_base(&ModularityMatrix::ng(&p3).unwrap(), &SolverOptions::default()).unwrap();
        assert_abs_diff_eq!(p.value, 2f64.sqrt(), epsilon = 1e-14);
        assert!(p.modularity_gap > 0.0);
        let pl = perron_of_base(&ModularityMatrix::ng(&p3).unwrap(), &lanczos_opts()).unwrap();
        assert_abs_diff_eq!(pl.value, 2f64.sqrt(), epsilon = 1e-10);
        let split = Graph::from_edge_list(&[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(
            perron_of_base(&ModularityMatrix::ng(&split).unwrap(), &SolverOptions::default()).unwrap_err(),
            Error::Disconnected
        );
    }

    #[test]
    fn dense_cap_applies_to_full_spectrum() {
        let m = ModularityMatrix::ng(&k(5)).unwrap();
        let opts = SolverOptions {
            dense_cap: 3,
            ..SolverOptions::default()
        };
        assert!(matches!(full_spectrum(&m, &opts), Err(Error::DenseCapExceeded { .. })));
    }

    #[test]
    fn orientation_tie_break() {
        let mut x = vec![0.5, -0.5, 0.0];
        assert_eq!(orient(&mut x, &[1.0, 1.0, 1.0], 1e-10), 0);
        assert_eq!(x, vec![0.5, -0.5, 0.0]);
        let mut x = vec![-0.5, 0.5, 0.0];
        orient(&mut x, &[1.0, 1.0, 1.0], 1e-10);
        assert_eq!(x, vec![0.5, -0.5, 0.0]);
        let mut x = vec![-1.0, 0.2];
        assert_eq!(orient(&mut x, &[1.0, 1.0], 1e-10), 1);
        assert_eq!(x, vec![1.0, -0.2]);
    }
}
