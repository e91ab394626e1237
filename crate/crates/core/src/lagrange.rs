//! Multiplier method for p = 2, N ≥ 8: the stationarity conditions couple
//! consecutive gap amplitudes a₂ … a_{⌊N/2⌋} through a tridiagonal system
//! whose characteristic polynomial in the multiplier λ has the stationary
//! concurrences as roots via C = −4λ/N. The optimum is the most negative λ,
//! and back-substitution recovers the amplitudes.
//!
//! Even N ends with a √2 coupling into the period-deficient half-half gap;
//! odd N ends with a unit self-coupling. Below N = 8 the adjacent-pair
//! amplitude a₁ no longer vanishes and the method does not apply.

use crate::basis::SymmetricBasis;
use crate::error::{Error, Result};
use crate::rdm::AmplitudeVector;
use nalgebra::DMatrix;
use std::sync::Arc;

/// Residual allowed on the stationarity system at the returned solution.
pub const SYSTEM_RESIDUAL_TOL: f64 = 1e-10;

/// Multiplier solution for (N, p = 2).
#[derive(Debug, Clone)]
pub struct LagrangeSolution {
    n: u32,
    lambda: f64,
    c: f64,
    coefficients: Vec<f64>,
    amplitudes: AmplitudeVector,
}

impl LagrangeSolution {
    pub fn sites(&self) -> u32 {
        self.n
    }

    /// The selected (most negative) multiplier root.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// C = −4λ/N.
    pub fn concurrence(&self) -> f64 {
        self.c
    }

    /// a₂ … a_{⌊N/2⌋}, unit norm, all positive.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// The same state over the sector basis, with a₁ = 0 in front.
    pub fn amplitudes(&self) -> &AmplitudeVector {
        &self.amplitudes
    }
}

fn check_n(n: u32) -> Result<()> {
    if n < 8 {
        return Err(Error::unsupported(format!(
            "multiplier method needs N >= 8 (a₁ = 0 regime), got {n}"
        )));
    }
    if n > 32 {
        return Err(Error::domain(format!("site count {n} outside 2..=32")));
    }
    Ok(())
}

/// Tridiagonal system matrix T with T a = −2λ a: zero diagonal except a unit
/// last entry for odd N; off-diagonal ones except a √2 last coupling for
/// even N.
fn tridiagonal(n: u32) -> (Vec<f64>, Vec<f64>) {
    let m = if n.is_multiple_of(2) {
        (n / 2 - 1) as usize
    } else {
        ((n - 3) / 2) as usize
    };
    let mut diag = vec![0.0; m];
    let mut off = vec![1.0; m - 1];
    if n.is_multiple_of(2) {
        off[m - 2] = 2f64.sqrt();
    } else {
        diag[m - 1] = 1.0;
    }
    (diag, off)
}

/// Characteristic polynomial of the system in λ (coefficients ascending),
/// built by the successive-substitution recurrence. Degree N/2 − 1 for even
/// N, (N − 3)/2 for odd N.
pub fn lagrange_polynomial(n: u32) -> Result<Vec<f64>> {
    check_n(n)?;
    let (diag, off) = tridiagonal(n);
    // q_k(λ) = (t_kk + 2λ)·q_{k−1}(λ) − b_{k−1}²·q_{k−2}(λ), q_0 = 1.
    let mut prev: Vec<f64> = vec![1.0];
    let mut cur: Vec<f64> = vec![diag[0], 2.0];
    for k in 1..diag.len() {
        let mut next = vec![0.0; cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i] += diag[k] * c;
            next[i + 1] += 2.0 * c;
        }
        let b2 = off[k - 1] * off[k - 1];
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= b2 * c;
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Finds the most negative multiplier root and the optimal amplitudes.
///
/// Roots come from the symmetric tridiagonal eigenproblem (λ_k = −ν_k/2),
/// which is numerically stable and shares its spectrum with the pair-free
/// block of the flip form.
pub fn lagrange_solve(n: u32) -> Result<LagrangeSolution> {
    check_n(n)?;
    let (diag, off) = tridiagonal(n);
    let m = diag.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = diag[i];
        if i > 0 {
            t[(i, i - 1)] = off[i - 1];
            t[(i - 1, i)] = off[i - 1];
        }
    }
    let eig = t.clone().symmetric_eigen();
    let mut top = 0usize;
    for i in 1..m {
        if eig.eigenvalues[i] > eig.eigenvalues[top] {
            top = i;
        }
    }
    let nu = eig.eigenvalues[top];
    let lambda = -nu / 2.0;
    let mut coeffs: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    crate::eigen::fix_sign(&mut coeffs);
    let norm: f64 = coeffs.iter().map(|a| a * a).sum::<f64>().sqrt();
    for a in &mut coeffs {
        *a /= norm;
    }
    if coeffs.iter().any(|&a| a <= 0.0) {
        return Err(Error::numerical(format!(
            "selected root ν = {nu} does not yield positive amplitudes for N = {n}"
        )));
    }
    // Residual of the stationarity system T a + 2λ a = 0.
    let mut residual: f64 = 0.0;
    for i in 0..m {
        let mut row = diag[i] * coeffs[i] + 2.0 * lambda * coeffs[i];
        if i > 0 {
            row += off[i - 1] * coeffs[i - 1];
        }
        if i + 1 < m {
            row += off[i] * coeffs[i + 1];
        }
        residual += row * row;
    }
    let residual = residual.sqrt();
    if residual > SYSTEM_RESIDUAL_TOL {
        let poly = lagrange_polynomial(n)?;
        return Err(Error::numerical(format!(
            "stationarity residual {residual:.3e} for N = {n}; polynomial {poly:?}"
        )));
    }

    let basis = Arc::new(SymmetricBasis::build(n, 2)?);
    debug_assert_eq!(basis.len(), m + 1);
    let mut values = vec![0.0; basis.len()];
    values[1..].copy_from_slice(&coeffs);
    let amplitudes = AmplitudeVector::new(basis, values)?;
    Ok(LagrangeSolution {
        n,
        lambda,
        c: -4.0 * lambda / n as f64,
        coefficients: coeffs,
        amplitudes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::NecklaceBasis;
    use crate::eigen;
    use crate::quadratic;

    fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    #[test]
    fn n8_polynomial_is_the_cubic() {
        // 4λ³ − 3λ up to overall scale.
        let poly = lagrange_polynomial(8).unwrap();
        assert_eq!(poly.len(), 4);
        let scale = poly[3] / 4.0;
        let want = [0.0, -3.0 * scale, 0.0, 4.0 * scale];
        for (c, w) in poly.iter().zip(want) {
            assert!((c - w).abs() < 1e-12, "{poly:?}");
        }
        // Degree checks: N/2 − 1 even, (N − 3)/2 odd.
        assert_eq!(lagrange_polynomial(12).unwrap().len() - 1, 5);
        assert_eq!(lagrange_polynomial(9).unwrap().len() - 1, 3);
        assert_eq!(lagrange_polynomial(11).unwrap().len() - 1, 4);
    }

    #[test]
    fn n8_solution_is_exact() {
        let sol = lagrange_solve(8).unwrap();
        assert!((sol.lambda() + 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((sol.concurrence() - 3f64.sqrt() / 4.0).abs() < 1e-12);
        let want = [(1f64 / 6.0).sqrt(), 0.5f64.sqrt(), (1f64 / 3.0).sqrt()];
        for (a, w) in sol.coefficients().iter().zip(want) {
            assert!((a - w).abs() < 1e-12);
        }
        // a₁ = 0 in the embedded amplitude vector.
        assert_eq!(sol.amplitudes().values()[0], 0.0);
    }

    #[test]
    fn odd_n_closed_forms() {
        let sol9 = lagrange_solve(9).unwrap();
        let want9 = 4.0 * (std::f64::consts::PI / 7.0).cos() / 9.0;
        assert!((sol9.concurrence() - want9).abs() < 1e-12);

        let sol11 = lagrange_solve(11).unwrap();
        let want11 = 4.0 * (std::f64::consts::PI / 9.0).cos() / 11.0;
        assert!((sol11.concurrence() - want11).abs() < 1e-12);
        let printed = [0.228, 0.429, 0.577, 0.657];
        for (a, w) in sol11.coefficients().iter().zip(printed) {
            assert!((a - w).abs() < 5e-3, "{a} vs {w}");
        }
    }

    #[test]
    fn even_n_closed_forms() {
        let sol10 = lagrange_solve(10).unwrap();
        assert!((sol10.concurrence() - (2.0 + 2f64.sqrt()).sqrt() / 5.0).abs() < 1e-12);
        let w10 = [
            (1.0 - 1.0 / 2f64.sqrt()) * (2.0 + 2f64.sqrt()).sqrt() / 2.0,
            0.5,
            ((2.0 + 2f64.sqrt()) / 8.0).sqrt(),
            0.5,
        ];
        for (a, w) in sol10.coefficients().iter().zip(w10) {
            assert!((a - w).abs() < 1e-12, "{a} vs {w}");
        }

        let sol12 = lagrange_solve(12).unwrap();
        let root5 = 5f64.sqrt();
        assert!((sol12.concurrence() - ((5.0 + root5) / 2.0).sqrt() / 6.0).abs() < 1e-12);
        let denom = 5.0 + root5;
        let w12 = [
            2f64.sqrt() / denom,
            1.0 / denom.sqrt(),
            (3.0 + root5) / (2f64.sqrt() * denom),
            (1.0 + root5) / (2.0 * denom.sqrt()),
            (1.0 + root5) / denom,
        ];
        for (a, w) in sol12.coefficients().iter().zip(w12) {
            assert!((a - w).abs() < 1e-12, "{a} vs {w}");
        }
    }

    #[test]
    fn polynomial_roots_match_the_eigenvalues() {
        for n in 8..=20u32 {
            let poly = lagrange_polynomial(n).unwrap();
            let sol = lagrange_solve(n).unwrap();
            let at_root = eval_poly(&poly, sol.lambda());
            // Normalize by the largest coefficient to make the scale fair.
            let scale = poly.iter().fold(0f64, |m, c| m.max(c.abs()));
            assert!(
                (at_root / scale).abs() < 1e-9,
                "N={n}: p(λ*) = {at_root:.3e}"
            );
        }
    }

    #[test]
    fn spectrum_matches_the_pair_free_block() {
        // The multiplier system is the eigenproblem of the pair-free flip
        // block; stationary concurrences −4λ/N = 2ν/N must agree.
        for n in [8u32, 9, 13, 16] {
            let basis = NecklaceBasis::build(n, 2).unwrap();
            let pair_free = basis.group(0);
            let z00 = quadratic::flip_form_dense(&basis, 1, &pair_free);
            let block = eigen::dense_eigenvalues(&(z00 * n as f64));
            let (diag, off) = tridiagonal(n);
            let m = diag.len();
            let mut t = DMatrix::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = diag[i];
                if i > 0 {
                    t[(i, i - 1)] = off[i - 1];
                    t[(i - 1, i)] = off[i - 1];
                }
            }
            let system = eigen::dense_eigenvalues(&t);
            assert_eq!(block.len(), system.len());
            for (a, b) in block.iter().zip(&system) {
                assert!((a - b).abs() < 1e-9, "N={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn other_roots_fail_positivity() {
        for n in [8u32, 9, 10, 11, 12] {
            let (diag, off) = tridiagonal(n);
            let m = diag.len();
            let mut t = DMatrix::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = diag[i];
                if i > 0 {
                    t[(i, i - 1)] = off[i - 1];
                    t[(i - 1, i)] = off[i - 1];
                }
            }
            let eig = t.symmetric_eigen();
            let mut top = 0usize;
            for i in 1..m {
                if eig.eigenvalues[i] > eig.eigenvalues[top] {
                    top = i;
                }
            }
            for k in 0..m {
                if k == top {
                    continue;
                }
                let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
                eigen::fix_sign(&mut v);
                assert!(
                    v.iter().any(|&a| a < -1e-9),
                    "N={n}: non-top root {k} unexpectedly positive"
                );
            }
        }
    }

    #[test]
    fn rejects_small_rings() {
        assert!(matches!(lagrange_solve(7), Err(Error::Unsupported(_))));
        assert!(matches!(lagrange_polynomial(6), Err(Error::Unsupported(_))));
    }
}
