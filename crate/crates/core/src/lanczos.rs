//! Explicitly restarted Lanczos with full reorthogonalization.
//!
//! Used for the rightmost eigenpair of matrices too large for the dense
//! path. A second eigenvalue is obtained by rerunning with the first
//! eigenvector deflated, which also detects repeated eigenvalues.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Anything that can multiply a vector by a symmetric matrix.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

pub(crate) struct LanczosParams {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Absolute residual target `‖Ax − θx‖₂`.
    pub residual_target: f64,
    pub seed: u64,
}

pub(crate) struct RitzPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub matvecs: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn project_out(w: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(b, w);
        for (wi, bi) in w.iter_mut().zip(b) {
            *wi -= c * bi;
        }
    }
}

/// Rightmost eigenpair of `op` restricted to the orthogonal complement of
/// `deflate` (an orthonormal set).
pub(crate) fn rightmost<O: SymmetricOperator + ?Sized>(
    op: &O,
    deflate: &[Vec<f64>],
    params: &LanczosParams,
) -> Result<RitzPair> {
    let n = op.dim();
    let free = n.saturating_sub(deflate.len());
    if free == 0 {
        return Err(Error::InvalidParameter("nothing left after deflation".into()));
    }
    // A fresh stream per deflation level: reusing the first start vector would
    // leave no component in the rest of a repeated eigenspace.
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(deflate.len() as u64));
    let mut start: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    project_out(&mut start, deflate);
    project_out(&mut start, deflate);
    let s = norm(&start);
    for x in &mut start {
        *x /= s;
    }

    let kdim = params.krylov_dim.clamp(1, free);
    let mut matvecs = 0;
    let mut best = RitzPair {
        value: f64::NAN,
        vector: start.clone(),
        matvecs: 0,
        residual: f64::INFINITY,
    };
    let mut w = vec![0.0; n];
    for _ in 0..params.max_restarts {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alphas = Vec::with_capacity(kdim);
        let mut betas: Vec<f64> = Vec::with_capacity(kdim);
        let mut invariant = false;
        let mut scale = f64::MIN_POSITIVE;
        for k in 0..kdim {
            op.apply(&basis[k], &mut w);
            matvecs += 1;
            project_out(&mut w, deflate);
            let alpha = dot(&basis[k], &w);
            alphas.push(alpha);
            // Two passes of classical Gram–Schmidt keep the basis orthogonal
            // to working precision.
            project_out(&mut w, &basis);
            project_out(&mut w, &basis);
            project_out(&mut w, deflate);
            let beta = norm(&w);
            scale = scale.max(alpha.abs()).max(beta);
            if k + 1 == kdim {
                break;
            }
            if beta <= 1e-12 * scale {
                invariant = true;
                break;
            }
            betas.push(beta);
            basis.push(w.iter().map(|x| x / beta).collect());
        }
        let m = alphas.len();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alphas[i];
            if i + 1 < m {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let top = (0..m)
            .max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
            .expect("nonempty tridiagonal");
        let theta = eig.eigenvalues[top];
        let mut x = vec![0.0; n];
        for (k, b) in basis.iter().enumerate().take(m) {
            let c = eig.eigenvectors[(k, top)];
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        project_out(&mut x, deflate);
        let xn = norm(&x);
        for xi in &mut x {
            *xi /= xn;
        }
        op.apply(&x, &mut w);
        matvecs += 1;
        project_out(&mut w, deflate);
        let residual = w.iter().zip(&x).map(|(a, b)| (a - theta * b).powi(2)).sum::<f64>().sqrt();
        if residual < best.residual {
            best = RitzPair {
                value: theta,
                vector: x.clone(),
                matvecs,
                residual,
            };
        }
        if residual <= params.residual_target || invariant {
            best.matvecs = matvecs;
            return Ok(best);
        }
        start = x;
    }
    Err(Error::NoConvergence {
        iterations: matvecs,
        residual: best.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Diagonal(Vec<f64>);

    impl SymmetricOperator for Diagonal {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..x.len() {
                y[i] = self.0[i] * x[i];
            }
        }
    }

    fn params() -> LanczosParams {
        LanczosParams {
            krylov_dim: 20,
            max_restarts: 500,
            residual_target: 1e-10,
            seed: 7,
        }
    }

    #[test]
    fn finds_top_of_diagonal() {
        let op = Diagonal((0..200).map(|i| (i as f64 * 0.37).sin()).collect());
        let expected = op.0.iter().copied().fold(f64::MIN, f64::max);
        let r = rightmost(&op, &[], &params()).unwrap();
        assert!((r.value - expected).abs() < 1e-9);
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn deflation_exposes_repeated_eigenvalue() {
        let mut d = vec![0.0; 50];
        d[3] = 5.0;
        d[17] = 5.0;
        d[20] = 4.0;
        let op = Diagonal(d);
        let first = rightmost(&op, &[], &params()).unwrap();
        assert!((first.value - 5.0).abs() < 1e-12);
        let second = rightmost(&op, &[first.vector], &params()).unwrap();
        assert!((second.value - 5.0).abs() < 1e-9, "{} {}", second.value, second.residual);
    }
}
