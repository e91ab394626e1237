//! The restricted problem: no two adjacent up-spins.
//!
//! With the up-up population forced to zero the concurrence reduces to 2z,
//! a quadratic form in the amplitudes, so the maximum is twice the top
//! eigenvalue of the flip form restricted to pair-free necklaces. The closed
//! form 2·sin(pπ/(N−p)) / (N·sin(π/(N−p))) gives the same number.

use crate::basis::{Necklace, NecklaceBasis, SymmetricBasis};
use crate::eigen;
use crate::error::{Error, Result};
use crate::quadratic;
use crate::rdm::AmplitudeVector;
use std::f64::consts::PI;
use std::sync::Arc;

/// Solution of the restricted problem: value and pair-free amplitudes.
#[derive(Debug, Clone)]
pub struct OwSolution {
    n: u32,
    p: u32,
    c: f64,
    necklaces: Vec<Necklace>,
    amplitudes: Vec<f64>,
}

impl OwSolution {
    pub fn sites(&self) -> u32 {
        self.n
    }

    pub fn ups(&self) -> u32 {
        self.p
    }

    /// Maximal concurrence under the no-adjacent-up-spins restriction.
    pub fn concurrence(&self) -> f64 {
        self.c
    }

    /// The pair-free necklaces carrying the solution, ascending by
    /// representative.
    pub fn necklaces(&self) -> &[Necklace] {
        &self.necklaces
    }

    /// Non-negative unit-norm amplitudes aligned with [`Self::necklaces`].
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Re-expresses the solution over the reflection-even basis of the
    /// sector. Mirror members μ, μ̄ with equal weight a merge into one even
    /// coordinate a√2; each member contributes a/√2 so a slightly asymmetric
    /// eigenvector is symmetrized on the way.
    pub fn to_symmetric_amplitudes(&self) -> Result<AmplitudeVector> {
        let basis = Arc::new(SymmetricBasis::build(self.n, self.p)?);
        let mut values = vec![0.0; basis.len()];
        for (neck, &a) in self.necklaces.iter().zip(&self.amplitudes) {
            let elem = basis.element_of_mask(neck.representative().bits());
            if basis.elements()[elem].members().len() == 2 {
                values[elem] += a / 2f64.sqrt();
            } else {
                values[elem] += a;
            }
        }
        AmplitudeVector::normalized(basis, values)
    }
}

fn check_args(n: u32, p: u32) -> Result<()> {
    if p == 0 {
        return Err(Error::domain(
            "restricted problem needs at least one up-spin",
        ));
    }
    if 2 * p > n {
        return Err(Error::domain(format!(
            "p = {p} exceeds N/2 = {n}/2; use the complement p → N − p"
        )));
    }
    Ok(())
}

/// Closed-form value 2·sin(pπ/(N−p)) / (N·sin(π/(N−p))).
///
/// The p = 1 case is taken as the cancelled limit 2/N, which also covers
/// N = 2 where numerator and denominator vanish together.
pub fn ow_closed_form(n: u32, p: u32) -> Result<f64> {
    check_args(n, p)?;
    if p == 1 {
        return Ok(2.0 / n as f64);
    }
    let m = (n - p) as f64;
    Ok(2.0 * (p as f64 * PI / m).sin() / (n as f64 * (PI / m).sin()))
}

/// Solves the restricted problem as an eigenproblem on the pair-free block.
pub fn ow_solve(n: u32, p: u32) -> Result<OwSolution> {
    check_args(n, p)?;
    let basis = NecklaceBasis::build(n, p)?;
    let pair_free = basis.group(0);
    if pair_free.is_empty() {
        return Err(Error::domain(format!(
            "no pair-free configurations for N = {n}, p = {p}"
        )));
    }
    let dim = pair_free.len();
    let (top, mut vec) = if dim <= eigen::DENSE_THRESHOLD {
        let z00 = quadratic::flip_form_dense(&basis, 1, &pair_free);
        let (low, vec) = eigen::dense_ground_state(&(-z00));
        (-low, vec)
    } else {
        let mut position = vec![usize::MAX; basis.len()];
        for (pos, &idx) in pair_free.iter().enumerate() {
            position[idx] = pos;
        }
        let (low, vec) = eigen::lanczos_ground_state(
            dim,
            |x, out| {
                out.iter_mut().for_each(|o| *o = 0.0);
                for (pos, &col) in pair_free.iter().enumerate() {
                    let xc = x[pos];
                    if xc == 0.0 {
                        continue;
                    }
                    quadratic::for_each_flip_entry(&basis, 1, col, |row, val| {
                        if position[row] != usize::MAX {
                            out[position[row]] -= val * xc;
                        }
                    });
                }
            },
            &format!("restricted block N={n} p={p}"),
        )?;
        (-low, vec)
    };
    eigen::fix_sign(&mut vec);
    let worst = vec.iter().cloned().fold(f64::MAX, f64::min);
    if worst < -1e-8 {
        return Err(Error::numerical(format!(
            "restricted eigenvector not non-negative (min entry {worst:.3e}) for N={n} p={p}"
        )));
    }
    let necklaces: Vec<Necklace> = pair_free
        .iter()
        .map(|&i| basis.necklaces()[i].clone())
        .collect();
    Ok(OwSolution {
        n,
        p,
        c: 2.0 * top + 0.0, // normalizes -0.0 at the p = N/2 node
        necklaces,
        amplitudes: vec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert!((ow_closed_form(6, 2).unwrap() - 2f64.sqrt() / 3.0).abs() < 1e-15);
        for n in [2u32, 3, 5, 12, 31] {
            assert!((ow_closed_form(n, 1).unwrap() - 2.0 / n as f64).abs() < 1e-15);
        }
        assert!((ow_closed_form(8, 3).unwrap() - 0.4045084971874737).abs() < 1e-12);
    }

    #[test]
    fn eigen_route_reproduces_table_rows() {
        let sol = ow_solve(8, 2).unwrap();
        assert!((sol.concurrence() - 3f64.sqrt() / 4.0).abs() < 1e-12);
        let want = [(1f64 / 6.0).sqrt(), 0.5f64.sqrt(), (1f64 / 3.0).sqrt()];
        for (a, w) in sol.amplitudes().iter().zip(want) {
            assert!((a - w).abs() < 1e-10, "{a} vs {w}");
        }

        let sol12 = ow_solve(12, 2).unwrap();
        let want12 = ((5.0 + 5f64.sqrt()) / 2.0).sqrt() / 6.0;
        assert!((sol12.concurrence() - want12).abs() < 1e-12);

        for n in [2u32, 5, 9] {
            let sol = ow_solve(n, 1).unwrap();
            assert!((sol.concurrence() - 2.0 / n as f64).abs() < 1e-12);
            assert_eq!(sol.amplitudes().len(), 1);
            assert!((sol.amplitudes()[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eigen_route_matches_closed_form() {
        for n in 2..=16u32 {
            for p in 1..=n / 2 {
                let closed = ow_closed_form(n, p).unwrap();
                let solved = ow_solve(n, p).unwrap().concurrence();
                assert!(
                    (closed - solved).abs() < 1e-9,
                    "N={n} p={p}: closed {closed} vs eigen {solved}"
                );
            }
        }
    }

    #[test]
    fn solution_lives_on_pair_free_necklaces() {
        let sol = ow_solve(10, 3).unwrap();
        assert!(sol.necklaces().iter().all(|k| k.pair_count() == 0));
        let norm: f64 = sol.amplitudes().iter().map(|a| a * a).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_conversion_preserves_the_state() {
        use crate::rdm::{concurrence, two_site_rdm};
        for (n, p) in [(8u32, 2u32), (9, 3), (11, 4), (12, 5)] {
            let sol = ow_solve(n, p).unwrap();
            let amps = sol.to_symmetric_amplitudes().unwrap();
            let rdm = two_site_rdm(&amps, 1).unwrap();
            assert!(rdm.y.abs() < 1e-12, "pair-free state has y = 0");
            assert!(
                (concurrence(&rdm) - sol.concurrence()).abs() < 1e-9,
                "N={n} p={p} ({} vs {})",
                concurrence(&rdm),
                sol.concurrence()
            );
        }
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(ow_closed_form(6, 4).is_err());
        assert!(ow_closed_form(6, 0).is_err());
        assert!(ow_solve(5, 3).is_err());
    }
}
