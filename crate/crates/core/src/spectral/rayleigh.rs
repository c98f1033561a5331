//! `min σᵀAσ` subject to `‖σ‖²_U = 1`.
//!
//! The coordinates off `U` are eliminated by minimizing over them, which
//! leaves the Schur complement `S = A_uu - A_uo A_oo⁺ A_ou`; the answer is
//! the smallest eigenvalue of the pencil `(S, W_U)`. For positive
//! semidefinite `A` the range of `A_ou` lies in the range of `A_oo`, so the
//! pseudo-inverse is exact. The problem splits over the connected
//! components of the sparsity graph of `A` and the minimum is taken over the
//! components meeting `U`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::gram::{ConstraintMask, QuadraticForm};
use super::sparse::{conjugate_gradient, CsrMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// components with more coordinates use conjugate gradients
    pub dense_threshold: usize,
    /// relative rank cut for the pseudo-inverse and for zero modes
    pub zero_tol: f64,
    pub cg_tol: f64,
    /// iteration cap per solve; `None` means `10·n + 100`
    pub cg_max_iter: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dense_threshold: 500,
            zero_tol: 1e-10,
            cg_tol: 1e-14,
            cg_max_iter: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Serialize)]
pub struct RayleighResult {
    /// minimum, with zero modes reported as exactly 0
    pub value: f64,
    /// minimum as computed
    pub raw_value: f64,
    /// minimizer in local coordinates, `‖witness‖²_U = 1`
    pub witness: Vec<f64>,
    pub zero_mode: bool,
    /// reduced-pencil eigenvalues under the zero tolerance, over all components
    pub numeric_kernel_dim: usize,
    pub method: SolveMethod,
    /// `|witnessᵀ A witness - raw_value|`
    pub residual: f64,
    pub components: usize,
    /// worst relative residual of the inner solves (iterative path)
    pub inner_residual: f64,
}

fn components(q: &QuadraticForm) -> Vec<Vec<usize>> {
    let n = q.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..q.m.nrows() {
        let mut first = None;
        for (j, _) in q.m.row(i) {
            match first {
                None => first = Some(j),
                Some(f) => {
                    let (a, b) = (find(&mut parent, f), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

struct ComponentSolution {
    raw: f64,
    local: Vec<f64>,
    kernel: usize,
    inner_residual: f64,
}

/// Smallest eigenpair of `(S, diag(w))`, eigenvalues ascending.
fn reduced_pencil(s: &DMatrix<f64>, w: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let k = w.len();
    let inv: Vec<f64> = w.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            t[(i, j)] = 0.5 * (s[(i, j)] + s[(j, i)]) * inv[i] * inv[j];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(k, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(k, k);
    for (c, &i) in order.iter().enumerate() {
        for r in 0..k {
            vecs[(r, c)] = eig.eigenvectors[(r, i)] * inv[r];
        }
    }
    (vals, vecs)
}

fn solve_dense(
    a: &DMatrix<f64>,
    u_pos: &[usize],
    w: &[f64],
    o_pos: &[usize],
    zero: f64,
    pinv_tol: f64,
) -> ComponentSolution {
    let ku = u_pos.len();
    let ko = o_pos.len();
    let auu = DMatrix::from_fn(ku, ku, |i, j| a[(u_pos[i], u_pos[j])]);
    let (s, coupling) = if ko == 0 {
        (auu, None)
    } else {
        let aoo = DMatrix::from_fn(ko, ko, |i, j| a[(o_pos[i], o_pos[j])]);
        let aou = DMatrix::from_fn(ko, ku, |i, j| a[(o_pos[i], u_pos[j])]);
        let eig = SymmetricEigen::new(aoo);
        let mut inv_vals = eig.eigenvalues.clone();
        for v in inv_vals.iter_mut() {
            *v = if *v > pinv_tol { 1.0 / *v } else { 0.0 };
        }
        let q = &eig.eigenvectors;
        let pinv = q * DMatrix::from_diagonal(&inv_vals) * q.transpose();
        let x = &pinv * &aou;
        (auu - aou.transpose() * &x, Some(x))
    };
    let (vals, vecs) = reduced_pencil(&s, w);
    let v = vecs.column(0).into_owned();
    let mut local = vec![0.0; ku + ko];
    for (i, &p) in u_pos.iter().enumerate() {
        local[p] = v[i];
    }
    if let Some(x) = coupling {
        let o = -(x * &v);
        for (i, &p) in o_pos.iter().enumerate() {
            local[p] = o[i];
        }
    }
    ComponentSolution {
        raw: vals[0],
        local,
        kernel: vals.iter().filter(|&&l| l <= zero).count(),
        inner_residual: 0.0,
    }
}

fn solve_iterative(
    m: &CsrMatrix,
    u_pos: &[usize],
    w: &[f64],
    o_pos: &[usize],
    zero: f64,
    opts: &SolverOptions,
) -> ComponentSolution {
    let ku = u_pos.len();
    let mo = m.select_columns(o_pos);
    let mu = m.select_columns(u_pos);
    let max_iter = opts.cg_max_iter.unwrap_or(10 * o_pos.len() + 100);
    let mut s = DMatrix::zeros(ku, ku);
    let mut xs = Vec::with_capacity(ku);
    let mut worst: f64 = 0.0;
    let mut unit = vec![0.0; ku];
    let mut mu_cols = Vec::with_capacity(ku);
    for j in 0..ku {
        unit.iter_mut().for_each(|v| *v = 0.0);
        unit[j] = 1.0;
        mu_cols.push(mu.matvec(&unit));
    }
    for j in 0..ku {
        // A_oj = M_oᵀ M_u e_j
        let rhs = mo.matvec_transpose(&mu_cols[j]);
        let out = conjugate_gradient(|x| mo.normal_matvec(x), &rhs, opts.cg_tol, max_iter);
        worst = worst.max(out.relative_residual);
        let mx = mo.matvec(&out.x);
        for i in 0..ku {
            // S_ij = A_ij - A_io x_j = (M_u e_i)ᵀ (M_u e_j - M_o x_j)
            s[(i, j)] = mu_cols[i]
                .iter()
                .zip(mu_cols[j].iter().zip(&mx))
                .map(|(a, (b, c))| a * (b - c))
                .sum();
        }
        xs.push(out.x);
    }
    let (vals, vecs) = reduced_pencil(&s, w);
    let v = vecs.column(0);
    let mut local = vec![0.0; ku + o_pos.len()];
    for (i, &p) in u_pos.iter().enumerate() {
        local[p] = v[i];
    }
    for (j, x) in xs.iter().enumerate() {
        for (i, &p) in o_pos.iter().enumerate() {
            local[p] -= v[j] * x[i];
        }
    }
    ComponentSolution {
        raw: vals[0],
        local,
        kernel: vals.iter().filter(|&&l| l <= zero).count(),
        inner_residual: worst,
    }
}

/// `C² = min { σᵀAσ : ‖σ‖²_U = 1 }`.
pub fn min_rayleigh_constrained(
    q: &QuadraticForm,
    u: &ConstraintMask,
    opts: &SolverOptions,
) -> Result<RayleighResult> {
    if u.indices.is_empty() {
        return Err(Error::EmptyConstraint);
    }
    if let Some(&bad) = u.indices.iter().find(|&&i| i >= q.dim()) {
        return Err(Error::InvalidRegion(format!(
            "constraint coordinate {bad} outside the form ({} coordinates)",
            q.dim()
        )));
    }
    let n = q.dim();
    let mut u_weight = vec![0.0; n];
    for (&i, &w) in u.indices.iter().zip(&u.weights) {
        u_weight[i] = w;
    }
    let scale = q.m.frobenius_norm().powi(2).max(f64::MIN_POSITIVE);
    let wmin = u.weights.iter().copied().fold(f64::INFINITY, f64::min);
    let zero = opts.zero_tol * scale / wmin;
    let pinv_tol = opts.zero_tol * scale;

    let groups = components(q);
    let touching: Vec<&Vec<usize>> = groups
        .iter()
        .filter(|c| c.iter().any(|&i| u_weight[i] > 0.0))
        .collect();

    let mut best: Option<(ComponentSolution, &Vec<usize>)> = None;
    let mut kernel = 0;
    let mut worst_inner: f64 = 0.0;
    let mut any_iterative = false;
    for comp in &touching {
        let mut u_pos = Vec::new();
        let mut o_pos = Vec::new();
        let mut w = Vec::new();
        for (p, &i) in comp.iter().enumerate() {
            if u_weight[i] > 0.0 {
                u_pos.push(p);
                w.push(u_weight[i]);
            } else {
                o_pos.push(p);
            }
        }
        let sub = q.m.select_columns(comp).compress_rows();
        let sol = if comp.len() <= opts.dense_threshold {
            let md = sub.to_dense();
            let a = md.transpose() * md;
            solve_dense(&a, &u_pos, &w, &o_pos, zero, pinv_tol)
        } else {
            any_iterative = true;
            solve_iterative(&sub, &u_pos, &w, &o_pos, zero, opts)
        };
        if !sol.raw.is_finite() {
            return Err(Error::SolverBreakdown(format!(
                "non-finite reduced eigenvalue on a component of {} coordinates",
                comp.len()
            )));
        }
        kernel += sol.kernel;
        worst_inner = worst_inner.max(sol.inner_residual);
        if best.as_ref().is_none_or(|(b, _)| sol.raw < b.raw) {
            best = Some((sol, comp));
        }
    }
    let (sol, comp) = best.expect("U meets at least one component");
    if any_iterative && worst_inner > 1e-6 {
        return Err(Error::SolverBreakdown(format!(
            "inner conjugate gradient stalled at relative residual {worst_inner:.3e}"
        )));
    }
    let mut witness = vec![0.0; n];
    for (p, &i) in comp.iter().enumerate() {
        witness[i] = sol.local[p];
    }
    let norm_u = u.seminorm_squared(&witness);
    if norm_u > 0.0 {
        let s = 1.0 / norm_u.sqrt();
        witness.iter_mut().for_each(|v| *v *= s);
    }
    let raw = sol.raw.max(0.0);
    let zero_mode = sol.raw <= zero;
    let residual = (q.energy(&witness) - raw).abs();
    Ok(RayleighResult {
        value: if zero_mode { 0.0 } else { raw },
        raw_value: sol.raw,
        witness,
        zero_mode,
        numeric_kernel_dim: kernel,
        method: if any_iterative {
            SolveMethod::Iterative
        } else {
            SolveMethod::Dense
        },
        residual,
        components: touching.len(),
        inner_residual: worst_inner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_pencil() {
        let q = QuadraticForm::from_factor(CsrMatrix::identity(4), vec![1.0; 4]).unwrap();
        let u = ConstraintMask::everything(&q);
        let r = min_rayleigh_constrained(&q, &u, &SolverOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        assert!((u.seminorm_squared(&r.witness) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_and_iterative_agree() {
        // path Laplacian factor: rows x_i - x_{i+1}, plus an anchor
        let n = 30;
        let mut t: Vec<_> = (0..n - 1)
            .flat_map(|i| [(i, i, 1.0), (i, i + 1, -1.0)])
            .collect();
        t.push((n - 1, 0, 1.0));
        let m = CsrMatrix::from_triplets(n, n, &t);
        let q = QuadraticForm::from_factor(m, vec![1.0; n]).unwrap();
        let u = ConstraintMask::new(vec![n - 1], vec![1.0]).unwrap();
        let dense = min_rayleigh_constrained(&q, &u, &SolverOptions::default()).unwrap();
        let opts = SolverOptions {
            dense_threshold: 0,
            ..Default::default()
        };
        let iter = min_rayleigh_constrained(&q, &u, &opts).unwrap();
        // anchored at 0, the cheapest profile to x_{n-1} = 1 is linear: 1/n
        assert!((dense.value - 1.0 / n as f64).abs() < 1e-12);
        assert!((iter.value - dense.value).abs() < 1e-12);
        assert_eq!(iter.method, SolveMethod::Iterative);
    }

    #[test]
    fn free_coordinate_is_a_zero_mode() {
        let m = CsrMatrix::from_triplets(1, 2, &[(0, 0, 1.0)]);
        let q = QuadraticForm::from_factor(m, vec![1.0, 1.0]).unwrap();
        let u = ConstraintMask::new(vec![1], vec![1.0]).unwrap();
        let r = min_rayleigh_constrained(&q, &u, &SolverOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.zero_mode);
    }

    #[test]
    fn empty_constraint() {
        assert!(matches!(
            ConstraintMask::new(vec![], vec![]),
            Err(Error::EmptyConstraint)
        ));
    }
}
