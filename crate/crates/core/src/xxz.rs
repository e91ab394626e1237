//! Exact maximization via ground states of an XXZ family.
//!
//! Replacing the concurrence penalty √(vy) by its tangent sy + v/s turns the
//! objective into C(s) = 2z − sy − v/s, the negated expectation value of an
//! XXZ Hamiltonian with anisotropy Δ(s) = (s + 1/s)/2 and field B(s) = s − 1/s:
//!
//!   H(s) = (1/2N) Σ_i [ −σˣσˣ − σʸσʸ + Δ(s)(σᶻσᶻ + 1) + B(s)σᶻ ].
//!
//! Within a fixed-p sector the field term is constant, the σᶻσᶻ part is
//! diagonal in the up-up pair count, and the flip part is the (−2×) pair-flip
//! form, so the operator is assembled once per sector and rescaled per s.
//! Maximizing −E₀(s) over s > 0 recovers the exact optimum; the s → ∞
//! endpoint is the restricted (pair-free) solution and is handled
//! analytically as a separate candidate.

use crate::basis::SymmetricBasis;
use crate::eigen;
use crate::error::{Error, Result};
use crate::ow;
use crate::quadratic::FlipCsr;
use crate::rdm::{concurrence, two_site_rdm, AmplitudeVector, TwoSiteRdm};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::sync::Arc;

/// s-independent parts of the sector Hamiltonian, assembled once.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    basis: Arc<SymmetricBasis>,
    flips: FlipCsr,
    pair_counts: Vec<f64>,
}

impl SectorOperator {
    pub fn new(basis: Arc<SymmetricBasis>) -> Self {
        let flips = FlipCsr::assemble(basis.as_ref(), 1);
        let pair_counts = basis
            .elements()
            .iter()
            .map(|e| e.pair_count() as f64)
            .collect();
        SectorOperator {
            basis,
            flips,
            pair_counts,
        }
    }

    pub fn basis(&self) -> &Arc<SymmetricBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// H(s) on one fixed-(N, p), momentum-0, reflection-even sector.
#[derive(Debug, Clone)]
pub struct HamiltonianSector {
    op: Arc<SectorOperator>,
    s: f64,
    delta: f64,
    b_field: f64,
}

impl HamiltonianSector {
    pub fn new(op: Arc<SectorOperator>, s: f64) -> Result<Self> {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::domain(format!("s must be positive, got {s}")));
        }
        Ok(HamiltonianSector {
            op,
            s,
            delta: 0.5 * (s + 1.0 / s),
            b_field: s - 1.0 / s,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Anisotropy Δ(s) = (s + 1/s)/2.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Field B(s) = s − 1/s.
    pub fn b_field(&self) -> f64 {
        self.b_field
    }

    pub fn basis(&self) -> &Arc<SymmetricBasis> {
        self.op.basis()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    fn diagonal(&self, idx: usize) -> f64 {
        let n = self.basis().sites() as f64;
        let p = self.basis().ups() as f64;
        let pairs = self.op.pair_counts[idx];
        (self.delta * (4.0 * pairs + 2.0 * n - 4.0 * p) + self.b_field * (2.0 * p - n)) / (2.0 * n)
    }

    /// out = H(s) x, matrix-free.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (idx, o) in out.iter_mut().enumerate() {
            *o = self.diagonal(idx) * x[idx];
        }
        self.op.flips.accumulate(-2.0, x, out);
    }

    /// Dense matrix form, for small sectors.
    pub fn dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut h = DMatrix::zeros(dim, dim);
        for row in 0..dim {
            h[(row, row)] = self.diagonal(row);
            for (col, val) in self.op.flips.row_entries(row) {
                h[(row, col)] += -2.0 * val;
            }
        }
        h
    }
}

/// Builds the sector operator and binds the linearization parameter.
pub fn build_sector_hamiltonian(n: u32, p: u32, s: f64) -> Result<HamiltonianSector> {
    let basis = Arc::new(SymmetricBasis::build(n, p)?);
    HamiltonianSector::new(Arc::new(SectorOperator::new(basis)), s)
}

/// Lowest eigenpair of the sector Hamiltonian: dense below
/// [`eigen::DENSE_THRESHOLD`], Lanczos above. The eigenvector is returned
/// sign-fixed and unit-norm, with residual ≤ [`eigen::RESIDUAL_TOL`].
pub fn ground_state(sector: &HamiltonianSector) -> Result<(f64, AmplitudeVector)> {
    let dim = sector.dim();
    if dim == 0 {
        return Err(Error::domain("empty sector"));
    }
    let (e0, vec) = if dim <= eigen::DENSE_THRESHOLD {
        let (e0, vec) = eigen::dense_ground_state(&sector.dense());
        let mut hx = vec![0.0; dim];
        sector.apply(&vec, &mut hx);
        let residual: f64 = hx
            .iter()
            .zip(&vec)
            .map(|(h, x)| (h - e0 * x) * (h - e0 * x))
            .sum::<f64>()
            .sqrt();
        if residual > eigen::RESIDUAL_TOL {
            return Err(Error::numerical(format!(
                "dense eigensolve residual {residual:.3e} at N={} p={} s={}",
                sector.basis().sites(),
                sector.basis().ups(),
                sector.s()
            )));
        }
        (e0, vec)
    } else {
        eigen::lanczos_ground_state(
            dim,
            |x, out| sector.apply(x, out),
            &format!(
                "XXZ sector N={} p={} s={}",
                sector.basis().sites(),
                sector.basis().ups(),
                sector.s()
            ),
        )?
    };
    let amps = AmplitudeVector::normalized(Arc::clone(sector.basis()), vec)?;
    Ok((e0, amps))
}

/// Logarithmic s-grid plus golden-section refinement control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    pub s_min: f64,
    pub s_max: f64,
    pub points: usize,
    /// Refinement stops when the log-s bracket is narrower than this.
    pub refine_tol_log: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            s_min: 0.02,
            s_max: 50.0,
            points: 64,
            refine_tol_log: 1e-4,
        }
    }
}

impl SweepGrid {
    fn validate(&self) -> Result<()> {
        if !(self.s_min > 0.0 && self.s_max > self.s_min) || self.points < 2 {
            return Err(Error::domain(format!(
                "bad s-grid: [{}, {}] with {} points",
                self.s_min, self.s_max, self.points
            )));
        }
        Ok(())
    }

    fn values(&self) -> Vec<f64> {
        let lo = self.s_min.ln();
        let hi = self.s_max.ln();
        (0..self.points)
            .map(|i| (lo + (hi - lo) * i as f64 / (self.points - 1) as f64).exp())
            .collect()
    }
}

/// One evaluated s: ground energy, linearized value, and the true two-site
/// state of the ground vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub s: f64,
    pub ground_energy: f64,
    /// C(s) = −E₀(s) = 2z − sy − v/s on the ground state.
    pub linearized: f64,
    pub rdm: TwoSiteRdm,
    /// Concurrence of the ground state itself (a certified lower bound).
    pub concurrence: f64,
}

/// Outcome of the s-sweep for one (N, p).
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub n: u32,
    pub p: u32,
    /// All evaluated points (grid and refinement), ascending in s.
    pub points: Vec<SweepPoint>,
    /// Argmax of the linearized value −E₀(s). The ground state itself is
    /// even under s ↔ 1/s (it sees only Δ(s)), so this — not the argmax of
    /// the ground-state concurrence — is the meaningful optimal s; it
    /// saturates at the grid cap when the optimum runs to s → ∞.
    pub s_opt: f64,
    /// max(ow_limit, best point concurrence).
    pub c_max: f64,
    pub optimal_amplitudes: AmplitudeVector,
    /// The restricted (pair-free) value: the s → ∞ candidate.
    pub ow_limit: f64,
    /// True when the restricted candidate beats every finite-s point.
    pub ow_is_best: bool,
}

fn evaluate(op: &Arc<SectorOperator>, s: f64) -> Result<(SweepPoint, AmplitudeVector)> {
    let sector = HamiltonianSector::new(Arc::clone(op), s)?;
    let (e0, amps) = ground_state(&sector)?;
    let rdm = two_site_rdm(&amps, 1)?;
    Ok((
        SweepPoint {
            s,
            ground_energy: e0,
            linearized: -e0,
            rdm,
            concurrence: concurrence(&rdm),
        },
        amps,
    ))
}

/// Sweeps −E₀(s) over the grid, refines the best bracket by golden section,
/// reads the concurrence of every ground state, and compares against the
/// restricted candidate.
pub fn sweep(n: u32, p: u32, grid: &SweepGrid) -> Result<SweepResult> {
    if p == 0 || 2 * p > n {
        return Err(Error::domain(format!(
            "sweep needs 1 <= p <= N/2, got N={n} p={p}"
        )));
    }
    grid.validate()?;
    let basis = Arc::new(SymmetricBasis::build(n, p)?);
    let op = Arc::new(SectorOperator::new(basis));

    let s_values = grid.values();
    let mut evaluated: Vec<(SweepPoint, AmplitudeVector)> = s_values
        .par_iter()
        .map(|&s| evaluate(&op, s))
        .collect::<Result<Vec<_>>>()?;

    // Bracket the best linearized value and refine in log s.
    let mut best_idx = 0;
    for (i, (pt, _)) in evaluated.iter().enumerate() {
        if pt.linearized > evaluated[best_idx].0.linearized {
            best_idx = i;
        }
    }
    let lo = s_values[best_idx.saturating_sub(1)].ln();
    let hi = s_values[(best_idx + 1).min(s_values.len() - 1)].ln();
    golden_refine(&op, lo, hi, grid.refine_tol_log, &mut evaluated)?;

    evaluated.sort_by(|a, b| a.0.s.partial_cmp(&b.0.s).unwrap());

    let ow_solution = ow::ow_solve(n, p)?;
    let ow_limit = ow_solution.concurrence();

    let mut best_linearized = 0usize;
    let mut best_conc = 0usize;
    for (i, (pt, _)) in evaluated.iter().enumerate() {
        if pt.linearized > evaluated[best_linearized].0.linearized {
            best_linearized = i;
        }
        if pt.concurrence > evaluated[best_conc].0.concurrence {
            best_conc = i;
        }
    }
    let best_point = evaluated[best_conc].0;
    let ow_is_best = ow_limit > best_point.concurrence;
    let (c_max, optimal_amplitudes) = if ow_is_best {
        (ow_limit, ow_solution.to_symmetric_amplitudes()?)
    } else {
        (best_point.concurrence, evaluated[best_conc].1.clone())
    };

    Ok(SweepResult {
        n,
        p,
        s_opt: evaluated[best_linearized].0.s,
        points: evaluated.into_iter().map(|(pt, _)| pt).collect(),
        c_max,
        optimal_amplitudes,
        ow_limit,
        ow_is_best,
    })
}

/// Golden-section maximization of −E₀ over log s in [lo, hi]; every
/// evaluation is appended to `evaluated`.
fn golden_refine(
    op: &Arc<SectorOperator>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    evaluated: &mut Vec<(SweepPoint, AmplitudeVector)>,
) -> Result<()> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if hi - lo <= tol {
        return Ok(());
    }
    let eval_at = |x: f64, store: &mut Vec<(SweepPoint, AmplitudeVector)>| -> Result<f64> {
        let out = evaluate(op, x.exp())?;
        let value = out.0.linearized;
        store.push(out);
        Ok(value)
    };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval_at(x1, evaluated)?;
    let mut f2 = eval_at(x2, evaluated)?;
    let mut budget = 200usize;
    while hi - lo > tol && budget > 0 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval_at(x1, evaluated)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval_at(x2, evaluated)?;
        }
        budget -= 1;
    }
    Ok(())
}

/// Maximal nearest-neighbor concurrence at (N, p); complements p > N/2.
pub fn cmax_exact(n: u32, p: u32) -> Result<f64> {
    if p > n {
        return Err(Error::domain(format!("p = {p} exceeds N = {n}")));
    }
    let p = p.min(n - p);
    if p == 0 {
        return Ok(0.0);
    }
    Ok(sweep(n, p, &SweepGrid::default())?.c_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn one_dimensional_sector_is_fully_entangled() {
        let sector = build_sector_hamiltonian(2, 1, 1.0).unwrap();
        assert_eq!(sector.dim(), 1);
        let (e0, _) = ground_state(&sector).unwrap();
        assert!((e0 + 1.0).abs() < 1e-14, "E0 = {e0}");
        // C(s) = 1 for every s: y = v = 0 for the single configuration.
        for s in [0.1, 1.0, 7.5] {
            let sector = build_sector_hamiltonian(2, 1, s).unwrap();
            let (e0, _) = ground_state(&sector).unwrap();
            assert!((e0 + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn four_two_ground_energy_hits_the_table_value() {
        let sector = build_sector_hamiltonian(4, 2, 1.0).unwrap();
        let (e0, amps) = ground_state(&sector).unwrap();
        assert!((e0 + 0.5).abs() < 1e-12, "E0 = {e0}");
        let want = [(1f64 / 3.0).sqrt(), (2f64 / 3.0).sqrt()];
        for (a, w) in amps.values().iter().zip(want) {
            assert!((a - w).abs() < 1e-10);
        }
    }

    #[test]
    fn expectation_matches_linearized_concurrence() {
        // ⟨a|H(s)|a⟩ = −(2z − sy − v/s) for random states in random sectors.
        let mut rng = SplitMix64::new(20260808);
        let cases = [(5u32, 2u32), (6, 3), (7, 2), (8, 4), (9, 3)];
        for &(n, p) in &cases {
            let basis = Arc::new(SymmetricBasis::build(n, p).unwrap());
            let op = Arc::new(SectorOperator::new(Arc::clone(&basis)));
            for _ in 0..40 {
                let s = (rng.uniform() * 4.0 - 2.0).exp();
                let sector = HamiltonianSector::new(Arc::clone(&op), s).unwrap();
                let values: Vec<f64> = (0..basis.len()).map(|_| rng.symmetric()).collect();
                let state = AmplitudeVector::normalized(Arc::clone(&basis), values).unwrap();
                let mut hx = vec![0.0; basis.len()];
                sector.apply(state.values(), &mut hx);
                let expectation: f64 = state.values().iter().zip(&hx).map(|(a, h)| a * h).sum();
                let rdm = two_site_rdm(&state, 1).unwrap();
                let linearized = 2.0 * rdm.z - s * rdm.y - rdm.v / s;
                assert!(
                    (expectation + linearized).abs() < 1e-12,
                    "N={n} p={p} s={s}: ⟨H⟩={expectation} C(s)={linearized}"
                );
            }
        }
    }

    #[test]
    fn sweep_five_two_beats_the_restricted_value() {
        let result = sweep(5, 2, &SweepGrid::default()).unwrap();
        assert!((result.c_max - 0.468).abs() < 5e-3, "C = {}", result.c_max);
        assert!(!result.ow_is_best);
        // Ground state carries weight on the adjacent-pair necklace.
        let a1 = result.optimal_amplitudes.values()[0];
        assert!((a1 - 0.298).abs() < 5e-3, "a1 = {a1}");
        // Stationarity: s_opt ≈ √(v/y) of the optimal state.
        let rdm = two_site_rdm(&result.optimal_amplitudes, 1).unwrap();
        let stationary = (rdm.v / rdm.y).sqrt();
        assert!(
            (result.s_opt.ln() - stationary.ln()).abs() < 2e-2,
            "s_opt {} vs √(v/y) {stationary}",
            result.s_opt
        );
    }

    #[test]
    fn sweep_eight_two_is_won_by_the_restricted_candidate() {
        let result = sweep(8, 2, &SweepGrid::default()).unwrap();
        assert!(result.ow_is_best);
        assert!((result.c_max - 3f64.sqrt() / 4.0).abs() < 1e-9);
        // Optimal amplitudes have no weight on the adjacent-pair necklace.
        assert!(result.optimal_amplitudes.values()[0].abs() < 1e-12);
    }

    #[test]
    fn half_filling_has_unit_optimal_s() {
        for n in [4u32, 6] {
            let result = sweep(n, n / 2, &SweepGrid::default()).unwrap();
            assert!(
                result.s_opt.ln().abs() < 1e-3,
                "N={n}: s_opt = {}",
                result.s_opt
            );
        }
    }

    #[test]
    fn linearized_values_never_exceed_the_maximum() {
        let result = sweep(6, 2, &SweepGrid::default()).unwrap();
        for pt in &result.points {
            assert!(pt.linearized <= result.c_max + 1e-8, "s = {}", pt.s);
            assert!(pt.linearized <= pt.concurrence + 1e-8, "s = {}", pt.s);
            let from_rdm = 2.0 * pt.rdm.z - pt.s * pt.rdm.y - pt.rdm.v / pt.s;
            assert!((pt.linearized - from_rdm).abs() < 1e-8, "s = {}", pt.s);
        }
        assert!((result.c_max - 2f64.sqrt() / 3.0).abs() < 1e-9);
    }

    #[test]
    fn cmax_handles_complements_and_trivial_fillings() {
        assert_eq!(cmax_exact(6, 0).unwrap(), 0.0);
        assert_eq!(cmax_exact(6, 6).unwrap(), 0.0);
        let direct = cmax_exact(7, 2).unwrap();
        let complement = cmax_exact(7, 5).unwrap();
        assert!((direct - complement).abs() < 1e-12);
        assert!((direct - (1.0 + 5f64.sqrt()) / 7.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_sector_hamiltonian(6, 2, 0.0).is_err());
        assert!(build_sector_hamiltonian(6, 2, -1.0).is_err());
        assert!(sweep(6, 4, &SweepGrid::default()).is_err());
        assert!(sweep(
            6,
            2,
            &SweepGrid {
                s_min: 0.0,
                ..SweepGrid::default()
            }
        )
        .is_err());
    }
}
