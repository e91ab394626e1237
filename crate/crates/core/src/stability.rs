//! First-order test of whether the restricted optimum survives when adjacent
//! up-spins are allowed.
//!
//! Perturbing the pair-free solution w₀ by a unit direction u in the
//! single-pair group changes the objective by 2ε(2 uᵀZ₁₀w₀ − √(v(w)·y(u))),
//! and y(u) = 1/N for unit u in that group. The gain is therefore beaten by
//! the √(vy) penalty exactly when
//!
//!   2·|Z₁₀w₀| < √(v(w)/N) = √((1 − 2p/N)/N).
//!
//! Uniform configuration normalization is required for y(u) = 1/N, hence the
//! gcd(p, N) = 1 restriction; other fillings are rejected, not extrapolated.

use crate::basis::{gcd, NecklaceBasis};
use crate::error::{Error, Result};
use crate::ow;
use crate::quadratic;

/// Tolerance below which the margin is reported as marginal rather than as a
/// verdict.
pub const MARGINAL_TOL: f64 = 1e-10;

/// Outcome of the first-order comparison at one (N, p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub n: u32,
    pub p: u32,
    /// 2·‖Z₁₀ w₀‖, the best first-order gain direction.
    pub lhs: f64,
    /// √(v(w)/N) = √((1 − 2p/N)/N), the penalty slope on the restricted
    /// solution.
    pub rhs: f64,
    /// rhs − lhs.
    pub margin: f64,
    /// lhs < rhs: no first-order improvement exists.
    pub locally_optimal: bool,
    /// |margin| ≤ [`MARGINAL_TOL`]: too close to call.
    pub marginal: bool,
}

/// Runs the first-order inequality for gcd(p, N) = 1, 2 ≤ p ≤ N/2.
pub fn stability_test(n: u32, p: u32) -> Result<StabilityVerdict> {
    if p < 2 || 2 * p > n {
        return Err(Error::domain(format!(
            "stability probe needs 2 <= p <= N/2, got N={n} p={p}"
        )));
    }
    if gcd(n, p) != 1 {
        return Err(Error::unsupported(format!(
            "gcd(p, N) = {} != 1: configuration normalizations are not uniform",
            gcd(n, p)
        )));
    }
    let solution = ow::ow_solve(n, p)?;
    let basis = NecklaceBasis::build(n, p)?;
    let pair_free = basis.group(0);
    let one_pair = basis.group(1);
    debug_assert_eq!(pair_free.len(), solution.amplitudes().len());
    let coupled =
        quadratic::flip_apply_subset(&basis, 1, &pair_free, solution.amplitudes(), &one_pair);
    let lhs = 2.0 * coupled.iter().map(|x| x * x).sum::<f64>().sqrt();
    let rhs = ((1.0 - 2.0 * p as f64 / n as f64) / n as f64).sqrt();
    let margin = rhs - lhs;
    Ok(StabilityVerdict {
        n,
        p,
        lhs,
        rhs,
        margin,
        locally_optimal: lhs < rhs,
        marginal: margin.abs() <= MARGINAL_TOL,
    })
}
