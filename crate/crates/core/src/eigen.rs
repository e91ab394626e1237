//! Lowest-eigenpair solvers: dense for small sectors, Lanczos above.
//!
//! The Lanczos path is matrix-free with full reorthogonalization. Both paths
//! validate the returned pair against the residual ‖Hx − E₀x‖ and fix the
//! eigenvector sign so the largest-magnitude entry is positive.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Dimension at or below which sectors are diagonalized densely.
pub const DENSE_THRESHOLD: usize = 128;

/// Hard cap on Lanczos iterations.
pub const LANCZOS_ITERATION_CAP: usize = 5000;

/// Residual tolerance ‖Hx − E₀x‖ required of a converged eigenpair.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Makes the largest-magnitude entry positive.
pub fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

/// Lowest eigenpair of a dense symmetric matrix, polished by a few
/// Rayleigh-quotient iterations (the QL pass alone can leave residuals near
/// 1e-9 on larger-norm matrices).
pub fn dense_ground_state(mat: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = mat.clone().symmetric_eigen();
    let mut lowest = 0usize;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[lowest] {
            lowest = i;
        }
    }
    let vec: Vec<f64> = eig.eigenvectors.column(lowest).iter().copied().collect();
    let (e0, mut vec) = refine_eigenpair(mat, eig.eigenvalues[lowest], vec);
    fix_sign(&mut vec);
    normalize(&mut vec);
    (e0, vec)
}

/// Shifted inverse iteration toward the eigenpair nearest `e0`.
fn refine_eigenpair(mat: &DMatrix<f64>, e0: f64, x: Vec<f64>) -> (f64, Vec<f64>) {
    let dim = x.len();
    let scale = mat.abs().max().max(1.0);
    let mut x = nalgebra::DVector::from_vec(x);
    x.normalize_mut();
    let mut rayleigh = e0;
    for _ in 0..3 {
        // Tiny offset keeps the shifted matrix invertible at convergence.
        let mut shifted = mat.clone();
        for i in 0..dim {
            shifted[(i, i)] -= rayleigh - 1e-13 * scale;
        }
        match shifted.lu().solve(&x) {
            Some(next) if next.norm() > 0.0 => x = next.normalize(),
            _ => break,
        }
        rayleigh = x.dot(&(mat * &x));
    }
    (rayleigh, x.data.into())
}

/// All eigenvalues of a dense symmetric matrix, ascending.
pub fn dense_eigenvalues(mat: &DMatrix<f64>) -> Vec<f64> {
    let eig = mat.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Lowest eigenpair of a symmetric operator given only its action.
///
/// Starts from a strictly positive vector (the sector Hamiltonians here have
/// non-positive off-diagonal entries and a connected flip graph, so the
/// ground vector is non-negative and the start overlaps it). Converges when
/// the Ritz value stabilizes, then checks the true residual.
pub fn lanczos_ground_state<F>(dim: usize, matvec: F, context: &str) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64], &mut [f64]),
{
    assert!(dim > 0);
    let cap = LANCZOS_ITERATION_CAP.min(dim);

    let mut q_vecs: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    let mut q = vec![0.0; dim];
    for (i, x) in q.iter_mut().enumerate() {
        // Positive with a deterministic modulation so no symmetry axis is hit.
        *x = 1.0 + 0.1 * (((i as f64 + 1.0) * 0.618033988749895).fract() - 0.5);
    }
    normalize(&mut q);
    q_vecs.push(q);

    let mut w = vec![0.0; dim];
    let mut prev_ritz = f64::MAX;

    for j in 0..cap {
        matvec(&q_vecs[j], &mut w);
        let a = dot(&q_vecs[j], &w);
        alpha.push(a);
        axpy(&mut w, -a, &q_vecs[j]);
        if j > 0 {
            let b_prev = beta[j - 1];
            axpy(&mut w, -b_prev, &q_vecs[j - 1]);
        }
        // Full reorthogonalization.
        for qv in &q_vecs {
            let overlap = dot(qv, &w);
            if overlap != 0.0 {
                axpy(&mut w, -overlap, qv);
            }
        }
        let b = dot(&w, &w).sqrt();

        let exhausted = b < 1e-14 || j + 1 == cap;
        if (j + 1) % 8 == 0 || exhausted {
            let ritz = lowest_tridiag_eigenvalue(&alpha, &beta);
            if (ritz - prev_ritz).abs() < 1e-13 * (1.0 + ritz.abs()) || exhausted {
                let (e0, mut x) = tridiag_ground_pair(&alpha, &beta, &q_vecs, dim);
                fix_sign(&mut x);
                normalize(&mut x);
                let mut hx = vec![0.0; dim];
                matvec(&x, &mut hx);
                let residual = residual_norm(&hx, e0, &x);
                if residual <= RESIDUAL_TOL {
                    return Ok((e0, x));
                }
                if exhausted {
                    return Err(Error::numerical(format!(
                        "Lanczos failed: {context}, dim {dim}, {iters} iterations, \
                         residual {residual:.3e} > {RESIDUAL_TOL:.1e}",
                        iters = j + 1
                    )));
                }
            }
            prev_ritz = ritz;
        }
        if b < 1e-14 {
            // Invariant subspace that did not meet the residual above.
            return Err(Error::numerical(format!(
                "Lanczos breakdown without convergence: {context}, dim {dim}, iteration {}",
                j + 1
            )));
        }
        beta.push(b);
        let mut q_next = w.clone();
        normalize(&mut q_next);
        q_vecs.push(q_next);
    }

    Err(Error::numerical(format!(
        "Lanczos did not converge within {cap} iterations: {context}, dim {dim}"
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn residual_norm(hx: &[f64], e0: f64, x: &[f64]) -> f64 {
    hx.iter()
        .zip(x)
        .map(|(h, xi)| {
            let r = h - e0 * xi;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

fn tridiag_dense(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i > 0 {
            t[(i, i - 1)] = beta[i - 1];
            t[(i - 1, i)] = beta[i - 1];
        }
    }
    t
}

fn lowest_tridiag_eigenvalue(alpha: &[f64], beta: &[f64]) -> f64 {
    let eig = tridiag_dense(alpha, beta).symmetric_eigen();
    eig.eigenvalues.iter().copied().fold(f64::MAX, f64::min)
}

fn tridiag_ground_pair(
    alpha: &[f64],
    beta: &[f64],
    q_vecs: &[Vec<f64>],
    dim: usize,
) -> (f64, Vec<f64>) {
    let eig = tridiag_dense(alpha, beta).symmetric_eigen();
    let mut lowest = 0usize;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[lowest] {
            lowest = i;
        }
    }
    let m = alpha.len();
    let mut x = vec![0.0; dim];
    for (j, qv) in q_vecs.iter().take(m).enumerate() {
        axpy(&mut x, eig.eigenvectors[(j, lowest)], qv);
    }
    (eig.eigenvalues[lowest], x)
}
