//! Smallest singular value of a sparse matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::rayleigh::SolveMethod;
use super::sparse::{conjugate_gradient, dot, norm, CsrMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdOptions {
    /// dense SVD when `max(rows, cols)` is at most this
    pub dense_threshold: usize,
    /// stop when `‖BᵀBx - θx‖ ≤ tol·‖B‖²_F`
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            dense_threshold: 500,
            tol: 1e-10,
            max_iter: 500,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularEstimate {
    pub value: f64,
    pub method: SolveMethod,
    pub iterations: usize,
}

/// `σ_min(B)` as a map on `R^cols`, i.e. `sqrt(λ_min(BᵀB))`. A matrix with
/// fewer rows than columns has `σ_min = 0`.
pub fn smallest_singular_value(b: &CsrMatrix, opts: &SvdOptions) -> Result<SingularEstimate> {
    if b.nnz() == 0 {
        return Err(Error::BadParameter("matrix has no nonzero entries".into()));
    }
    if b.nrows().max(b.ncols()) <= opts.dense_threshold {
        return Ok(SingularEstimate {
            value: dense_smallest(b),
            method: SolveMethod::Dense,
            iterations: 0,
        });
    }
    inverse_iteration(b, opts)
}

fn dense_smallest(b: &CsrMatrix) -> f64 {
    if b.nrows() < b.ncols() {
        return 0.0;
    }
    let svd = b.to_dense().svd(false, false);
    svd.singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Inverse iteration on `BᵀB`, accelerated by building the Krylov space of
/// `(BᵀB)⁻¹` (Lanczos with full reorthogonalization). Every application of
/// the inverse is a conjugate-gradient solve. Plain inverse iteration
/// stalls when the bottom of the spectrum is clustered; the Ritz values of
/// the Krylov space do not.
pub fn inverse_iteration(b: &CsrMatrix, opts: &SvdOptions) -> Result<SingularEstimate> {
    let n = b.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nq = norm(&q);
    q.iter_mut().for_each(|v| *v /= nq);
    let scale = b.frobenius_norm().powi(2);
    let inner_cap = 20 * n + 100;
    let steps = opts.max_iter.min(n).max(1);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut best = (f64::INFINITY, f64::INFINITY);
    for it in 1..=steps {
        let mut w = conjugate_gradient(|v| b.normal_matvec(v), &q, 1e-14, inner_cap).x;
        if !w.iter().all(|v| v.is_finite()) {
            break;
        }
        let a = dot(&q, &w);
        basis.push(q.clone());
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bnext = norm(&w);

        // largest Ritz value of the inverse ↔ smallest eigenvalue of BᵀB
        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let top = eig.eigenvalues.imax();
        let theta = eig.eigenvalues[top];
        if theta > 0.0 {
            let s = eig.eigenvectors.column(top);
            let mut x = vec![0.0; n];
            for (v, &c) in basis.iter().zip(s.iter()) {
                x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += c * vi);
            }
            let nx = norm(&x);
            x.iter_mut().for_each(|v| *v /= nx);
            let ax = b.normal_matvec(&x);
            let lambda = dot(&x, &ax);
            let resid = ax
                .iter()
                .zip(&x)
                .map(|(a, v)| (a - lambda * v).powi(2))
                .sum::<f64>()
                .sqrt();
            if resid < best.1 {
                best = (lambda, resid);
            }
            if resid <= opts.tol * scale {
                return Ok(SingularEstimate {
                    value: lambda.max(0.0).sqrt(),
                    method: SolveMethod::Iterative,
                    iterations: it,
                });
            }
        }
        if bnext <= 1e-14 * a.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        beta.push(bnext);
        q = w.iter().map(|v| v / bnext).collect();
    }
    let (est, resid) = best;
    let est = if est.is_finite() { est.max(0.0) } else { 0.0 };
    Err(Error::NoConvergence {
        iterations: alpha.len(),
        estimate: est.sqrt(),
        lower: (est - resid).max(0.0).sqrt(),
        upper: (est + resid).sqrt(),
    })
}
