//! Entanglement between spins separated by q sites, reduced to
//! nearest-neighbor problems on smaller rings.
//!
//! Stepping around the ring in hops of q splits it into gcd(N, q) subrings of
//! N/gcd(N, q) sites each, on which former qth neighbors are adjacent. The
//! optimum is attained by a tensor product of identical optimal subring
//! states, so C^max(N, q) = C^max(N/gcd(N, q), 1), where the nearest-neighbor
//! value is maximized over the subring filling (the filling is not held fixed
//! here). A brute-force verifier checks the reduction on small instances.

use crate::basis::{self, binomial, SectorBasis};
use crate::error::{Error, Result};
use crate::oracle::{optimize_direct, OracleOptions};
use crate::rdm::{concurrence, two_site_rdm_full, AmplitudeVector};
use crate::xxz::{sweep, SweepGrid};

/// Geometry of the subring decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionPlan {
    pub n: u32,
    pub q: u32,
    /// gcd(N, q) subrings...
    pub subring_count: u32,
    /// ...of N/gcd(N, q) sites each.
    pub subring_size: u32,
}

/// Maximal qth-neighbor concurrence and the witness that attains it.
#[derive(Debug, Clone)]
pub struct QthNeighborMax {
    pub plan: ReductionPlan,
    pub c: f64,
    /// Optimal filling of each subring.
    pub subring_ups: u32,
    /// Optimal nearest-neighbor state of one subring; the witness is this
    /// state repeated on every subring.
    pub subring_amplitudes: AmplitudeVector,
}

/// C^max(N, q) via the subring reduction.
pub fn qth_neighbor_max(n: u32, q: u32) -> Result<QthNeighborMax> {
    if q == 0 || q >= n {
        return Err(Error::domain(format!("separation {q} outside 1..{n}")));
    }
    let g = basis::gcd(n, q);
    let subring = n / g;
    let plan = ReductionPlan {
        n,
        q,
        subring_count: g,
        subring_size: subring,
    };
    let mut best: Option<(f64, u32, AmplitudeVector)> = None;
    for ups in 1..=subring / 2 {
        let result = sweep(subring, ups, &SweepGrid::default())?;
        let better = match &best {
            Some((c, _, _)) => result.c_max > *c,
            None => true,
        };
        if better {
            best = Some((result.c_max, ups, result.optimal_amplitudes));
        }
    }
    let (c, subring_ups, subring_amplitudes) = best.expect("subring has at least the filling 1");
    Ok(QthNeighborMax {
        plan,
        c,
        subring_ups,
        subring_amplitudes,
    })
}

/// Expands the tensor-product witness into the big ring's fixed-p sector
/// (p = subring_count · subring_ups). Site (j + k·q) mod N is position k of
/// subring j.
pub fn witness_vector(witness: &QthNeighborMax) -> Result<(SectorBasis, Vec<f64>)> {
    let plan = witness.plan;
    let p = plan.subring_count * witness.subring_ups;
    if binomial(plan.n, p) > 2_000_000 {
        return Err(Error::domain(format!(
            "witness sector C({}, {p}) too large to materialize",
            plan.n
        )));
    }
    let sub_sector = SectorBasis::new(plan.subring_size, witness.subring_ups)?;
    let sub_state = witness.subring_amplitudes.expand(&sub_sector);
    let sector = SectorBasis::new(plan.n, p)?;
    let mut out = vec![0.0; sector.len()];
    for (idx, &mask) in sector.masks().iter().enumerate() {
        let mut amp = 1.0;
        for j in 0..plan.subring_count {
            let mut sub_mask = 0u64;
            for k in 0..plan.subring_size {
                let site = (j + k * plan.q) % plan.n;
                if mask >> site & 1 == 1 {
                    sub_mask |= 1 << k;
                }
            }
            if sub_mask.count_ones() != witness.subring_ups {
                amp = 0.0;
                break;
            }
            amp *= sub_state[sub_sector.index_of(sub_mask)];
        }
        out[idx] = amp;
    }
    Ok((sector, out))
}

/// Checks the reduction against the direct q-separation oracle on a small
/// (N, q, p) instance. Returns false if any inequality is violated.
pub fn verify_reduction(n: u32, q: u32, p: u32) -> Result<bool> {
    if binomial(n, p) > 10_000 {
        return Err(Error::domain(format!(
            "verify_reduction is limited to C(N, p) <= 10^4, got C({n}, {p}) = {}",
            binomial(n, p)
        )));
    }
    let reduction = qth_neighbor_max(n, q)?;
    let (c_direct, _) = optimize_direct(n, p, q, &OracleOptions::default())?;
    // The fixed-p direct optimum can never beat the unconstrained reduction.
    if c_direct > reduction.c + 1e-6 {
        return Ok(false);
    }
    if p == reduction.plan.subring_count * reduction.subring_ups {
        // The tensor-product witness must attain the bound, stay
        // translationally invariant, and be matched by the direct oracle.
        let (sector, psi) = witness_vector(&reduction)?;
        let norm: f64 = psi.iter().map(|a| a * a).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Ok(false);
        }
        for (idx, &mask) in sector.masks().iter().enumerate() {
            let shifted = sector.index_of(shift_mask(mask, n));
            if (psi[idx] - psi[shifted]).abs() > 1e-12 {
                return Ok(false);
            }
        }
        let rdm = two_site_rdm_full(sector.masks(), &psi, n, 0, q);
        if (concurrence(&rdm) - reduction.c).abs() > 1e-6 {
            return Ok(false);
        }
        if c_direct < reduction.c - 1e-6 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn shift_mask(mask: u64, n: u32) -> u64 {
    ((mask << 1) | (mask >> (n - 1))) & ((1u64 << n) - 1)
}
