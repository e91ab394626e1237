//! Translationally invariant basis construction for rings of qubits.
//!
//! A configuration of `N` sites with `p` up-spins is a bitmask (bit i set ⇔
//! site i up). Cyclic translation partitions the fixed-p layer into necklaces;
//! adding reflection yields the dihedral orbits that carry the momentum-0,
//! reflection-even sector in which every optimization in this crate runs.
//!
//! Normalization bookkeeping: a necklace with period `Ñ` expands into `Ñ`
//! distinct masks, each with coefficient `1/√Ñ`; a reflection-even element of
//! orbit size `L` expands into `L` masks with coefficient `1/√L`.

use crate::error::{Error, Result};

/// A single ring configuration: a bitmask of width `sites` (bit i ⇔ site i up).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    bits: u64,
    sites: u32,
}

impl BasisState {
    /// Validates `2 <= sites <= 32` and `bits < 2^sites`.
    pub fn new(bits: u64, sites: u32) -> Result<Self> {
        if !(2..=32).contains(&sites) {
            return Err(Error::domain(format!("site count {sites} outside 2..=32")));
        }
        if bits >> sites != 0 {
            return Err(Error::domain(format!(
                "bitmask {bits:#b} wider than {sites} sites"
            )));
        }
        Ok(BasisState { bits, sites })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn sites(&self) -> u32 {
        self.sites
    }

    /// Number of up-spins.
    pub fn ups(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Translation by one site (site i -> site i + 1 mod N).
    pub fn translated(&self) -> Self {
        BasisState {
            bits: rotate(self.bits, self.sites),
            sites: self.sites,
        }
    }

    /// Reflection about the ring (site i -> site N - 1 - i).
    pub fn reflected(&self) -> Self {
        BasisState {
            bits: reflect(self.bits, self.sites),
            sites: self.sites,
        }
    }
}

/// One-site cyclic shift of a width-`n` mask.
pub(crate) fn rotate(bits: u64, n: u32) -> u64 {
    ((bits << 1) | (bits >> (n - 1))) & low_mask(n)
}

/// Reverses the bit order of a width-`n` mask.
pub(crate) fn reflect(bits: u64, n: u32) -> u64 {
    let mut out = 0u64;
    for i in 0..n {
        if bits >> i & 1 == 1 {
            out |= 1 << (n - 1 - i);
        }
    }
    out
}

fn low_mask(n: u32) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Smallest mask among all cyclic rotations.
pub(crate) fn canonical_mask(bits: u64, n: u32) -> u64 {
    let mut best = bits;
    let mut cur = bits;
    for _ in 1..n {
        cur = rotate(cur, n);
        if cur < best {
            best = cur;
        }
    }
    best
}

/// Smallest mask among all rotations and reflected rotations.
pub(crate) fn canonical_dihedral_mask(bits: u64, n: u32) -> u64 {
    canonical_mask(bits, n).min(canonical_mask(reflect(bits, n), n))
}

/// Smallest j > 0 with the j-fold translation fixing the mask. Divides `n`.
pub(crate) fn mask_period(bits: u64, n: u32) -> u32 {
    let mut cur = bits;
    for j in 1..=n {
        cur = rotate(cur, n);
        if cur == bits {
            return j;
        }
    }
    unreachable!("n-fold rotation is the identity")
}

/// Lexicographically smallest cyclic rotation of a state.
pub fn canonical_rotation(state: BasisState) -> BasisState {
    BasisState {
        bits: canonical_mask(state.bits(), state.sites()),
        sites: state.sites(),
    }
}

/// Number of cyclically adjacent up-up pairs (the group index π).
pub fn pair_count(state: BasisState) -> u32 {
    (state.bits() & rotate(state.bits(), state.sites())).count_ones()
}

/// Up-up pairs at cyclic distance `q` (π generalizes to q-separated bonds).
pub(crate) fn pair_count_at(bits: u64, n: u32, q: u32) -> u32 {
    let mut shifted = bits;
    for _ in 0..q {
        shifted = rotate(shifted, n);
    }
    (bits & shifted).count_ones()
}

/// Down-down pairs at cyclic distance `q`.
pub(crate) fn hole_pair_count_at(bits: u64, n: u32, q: u32) -> u32 {
    pair_count_at(!bits & low_mask(n), n, q)
}

/// A translation orbit of basis states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Necklace {
    representative: BasisState,
    period: u32,
    pair_count: u32,
    gap_signature: Vec<u32>,
}

impl Necklace {
    /// Classifies the orbit of an arbitrary member state.
    pub fn from_state(state: BasisState) -> Self {
        let rep = canonical_rotation(state);
        let period = mask_period(rep.bits(), rep.sites());
        Necklace {
            representative: rep,
            period,
            pair_count: pair_count(rep),
            gap_signature: gap_signature(rep),
        }
    }

    pub fn representative(&self) -> BasisState {
        self.representative
    }

    /// Smallest j > 0 with T^j fixing the configuration; divides N.
    pub fn period(&self) -> u32 {
        self.period
    }

    pub fn pair_count(&self) -> u32 {
        self.pair_count
    }

    /// Cyclic gap sequence between consecutive up-spins, rotated to its
    /// lexicographically smallest form (first entry is the smallest gap).
    pub fn gap_signature(&self) -> &[u32] {
        &self.gap_signature
    }

    /// Normalization factor √Ñ / N of the symmetrized momentum-0 state.
    pub fn norm(&self) -> f64 {
        (self.period as f64).sqrt() / self.representative.sites() as f64
    }

    /// The `period` distinct masks of the orbit, starting at the representative.
    pub fn orbit_masks(&self) -> impl Iterator<Item = u64> + '_ {
        let n = self.representative.sites();
        let mut cur = self.representative.bits();
        let mut emitted = 0u32;
        let period = self.period;
        std::iter::from_fn(move || {
            if emitted == period {
                return None;
            }
            let out = cur;
            cur = rotate(cur, n);
            emitted += 1;
            Some(out)
        })
    }
}

/// Gap vector of a configuration: distances from each up-spin to the next,
/// canonicalized to the lexicographically smallest cyclic rotation.
fn gap_signature(state: BasisState) -> Vec<u32> {
    let n = state.sites();
    let positions: Vec<u32> = (0..n).filter(|i| state.bits() >> i & 1 == 1).collect();
    let p = positions.len();
    if p == 0 {
        return Vec::new();
    }
    let mut gaps: Vec<u32> = (0..p)
        .map(|k| {
            if k + 1 < p {
                positions[k + 1] - positions[k]
            } else {
                n - positions[p - 1] + positions[0]
            }
        })
        .collect();
    let best = (0..p)
        .map(|shift| {
            let mut rotated = gaps.clone();
            rotated.rotate_left(shift);
            rotated
        })
        .min()
        .expect("non-empty gap list");
    gaps = best;
    gaps
}

fn check_sector(n: u32, p: u32) -> Result<()> {
    if !(2..=32).contains(&n) {
        return Err(Error::domain(format!("site count {n} outside 2..=32")));
    }
    if p > n {
        return Err(Error::domain(format!("up count {p} exceeds {n} sites")));
    }
    Ok(())
}

/// All distinct necklaces of `n` sites with `p` up-spins, ordered by
/// representative bitmask ascending.
pub fn enumerate_necklaces(n: u32, p: u32) -> Result<Vec<Necklace>> {
    check_sector(n, p)?;
    let mut out = Vec::new();
    for mask in FixedWeightMasks::new(n, p) {
        if canonical_mask(mask, n) == mask {
            out.push(Necklace::from_state(BasisState {
                bits: mask,
                sites: n,
            }));
        }
    }
    Ok(out)
}

/// Ascending iterator over all width-`n` masks of popcount `p` (Gosper's hack).
pub(crate) struct FixedWeightMasks {
    next: Option<u64>,
    limit: u64,
}

impl FixedWeightMasks {
    pub(crate) fn new(n: u32, p: u32) -> Self {
        let limit = low_mask(n);
        let first = if p == 0 { 0 } else { low_mask(p) };
        FixedWeightMasks {
            next: (first <= limit).then_some(first),
            limit,
        }
    }
}

impl Iterator for FixedWeightMasks {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let succ = (((r ^ cur) >> 2) / c) | r;
            (succ <= self.limit && succ > cur).then_some(succ)
        };
        Some(cur)
    }
}

/// Binomial coefficient, exact in u64 for the desk-scale range used here.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc as u64
}

/// One reflection-even combination of necklaces: either a self-symmetric
/// necklace or the normalized even sum of a mirror pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricElement {
    members: Vec<usize>,
    representative: u64,
    orbit_size: u32,
    pair_count: u32,
}

impl SymmetricElement {
    /// Indices into [`SymmetricBasis::necklaces`]: one entry for a
    /// self-symmetric necklace, two for a mirror pair.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Smallest mask of the dihedral orbit.
    pub fn representative(&self) -> u64 {
        self.representative
    }

    /// Number of distinct masks in the dihedral orbit.
    pub fn orbit_size(&self) -> u32 {
        self.orbit_size
    }

    /// Adjacent up-up pairs (orbit invariant).
    pub fn pair_count(&self) -> u32 {
        self.pair_count
    }
}

/// The momentum-0, reflection-even basis of the fixed-(N, p) sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBasis {
    sites: u32,
    ups: u32,
    necklaces: Vec<Necklace>,
    elements: Vec<SymmetricElement>,
}

impl SymmetricBasis {
    /// Builds the reflection-even basis; pairing is found by reflecting each
    /// representative and canonicalizing.
    pub fn build(n: u32, p: u32) -> Result<Self> {
        let necklaces = enumerate_necklaces(n, p)?;
        let find = |mask: u64| -> usize {
            necklaces
                .binary_search_by(|neck| neck.representative().bits().cmp(&mask))
                .expect("reflected representative is itself a representative")
        };
        let mut elements = Vec::new();
        for (idx, neck) in necklaces.iter().enumerate() {
            let mirror = find(canonical_mask(reflect(neck.representative().bits(), n), n));
            if mirror == idx {
                elements.push(SymmetricElement {
                    members: vec![idx],
                    representative: neck.representative().bits(),
                    orbit_size: neck.period(),
                    pair_count: neck.pair_count(),
                });
            } else if mirror > idx {
                elements.push(SymmetricElement {
                    members: vec![idx, mirror],
                    representative: neck.representative().bits(),
                    orbit_size: neck.period() + necklaces[mirror].period(),
                    pair_count: neck.pair_count(),
                });
            }
        }
        Ok(SymmetricBasis {
            sites: n,
            ups: p,
            necklaces,
            elements,
        })
    }

    pub fn sites(&self) -> u32 {
        self.sites
    }

    pub fn ups(&self) -> u32 {
        self.ups
    }

    /// Basis dimension (number of reflection-even elements).
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[SymmetricElement] {
        &self.elements
    }

    /// All necklaces of the sector, ordered by representative ascending.
    pub fn necklaces(&self) -> &[Necklace] {
        &self.necklaces
    }

    /// Index of the element whose dihedral orbit contains `mask`.
    pub fn element_of_mask(&self, mask: u64) -> usize {
        let canon = canonical_dihedral_mask(mask, self.sites);
        self.elements
            .binary_search_by(|e| e.representative.cmp(&canon))
            .expect("mask popcount matches the sector")
    }

    /// Expansion coefficient of each mask in an element: `1/√orbit_size`.
    pub fn element_mask_coeff(&self, element: usize) -> f64 {
        1.0 / (self.elements[element].orbit_size as f64).sqrt()
    }

    /// Writes the full-sector expansion of symmetric amplitudes into `out`,
    /// indexed by `sector` positions. `out` must be zeroed by the caller.
    pub fn expand_into(&self, values: &[f64], sector: &SectorBasis, out: &mut [f64]) {
        assert_eq!(values.len(), self.elements.len());
        assert_eq!(out.len(), sector.len());
        for (elem, &a) in self.elements.iter().zip(values) {
            let coeff = a / (elem.orbit_size as f64).sqrt();
            for &member in &elem.members {
                for mask in self.necklaces[member].orbit_masks() {
                    out[sector.index_of(mask)] = coeff;
                }
            }
        }
    }
}

/// Free-function form of [`SymmetricBasis::build`].
pub fn build_symmetric_basis(n: u32, p: u32) -> Result<SymmetricBasis> {
    SymmetricBasis::build(n, p)
}

/// The momentum-0 necklace basis without reflection reduction.
///
/// This is the coordinate system of the a_μ amplitudes as usually written;
/// the restricted (no adjacent up-spins) problem and its perturbation live
/// here because the up-up grouping π indexes necklaces, not mirror pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct NecklaceBasis {
    sites: u32,
    ups: u32,
    necklaces: Vec<Necklace>,
}

impl NecklaceBasis {
    pub fn build(n: u32, p: u32) -> Result<Self> {
        Ok(NecklaceBasis {
            sites: n,
            ups: p,
            necklaces: enumerate_necklaces(n, p)?,
        })
    }

    pub fn sites(&self) -> u32 {
        self.sites
    }

    pub fn ups(&self) -> u32 {
        self.ups
    }

    pub fn len(&self) -> usize {
        self.necklaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.necklaces.is_empty()
    }

    pub fn necklaces(&self) -> &[Necklace] {
        &self.necklaces
    }

    /// Index of the necklace containing `mask`.
    pub fn necklace_of_mask(&self, mask: u64) -> usize {
        let canon = canonical_mask(mask, self.sites);
        self.necklaces
            .binary_search_by(|k| k.representative().bits().cmp(&canon))
            .expect("mask popcount matches the sector")
    }

    /// Indices of necklaces with a given up-up pair count.
    pub fn group(&self, pair_count: u32) -> Vec<usize> {
        (0..self.necklaces.len())
            .filter(|&i| self.necklaces[i].pair_count() == pair_count)
            .collect()
    }
}

/// Common view of an orbit-symmetrized basis: every element is the uniform
/// superposition of its orbit masks with coefficient `1/√orbit_size`.
pub trait OrbitBasis {
    fn sites(&self) -> u32;
    fn ups(&self) -> u32;
    fn dim(&self) -> usize;
    fn representative_mask(&self, idx: usize) -> u64;
    fn orbit_size(&self, idx: usize) -> u32;
    fn index_of_mask(&self, mask: u64) -> usize;
}

impl OrbitBasis for NecklaceBasis {
    fn sites(&self) -> u32 {
        self.sites
    }

    fn ups(&self) -> u32 {
        self.ups
    }

    fn dim(&self) -> usize {
        self.necklaces.len()
    }

    fn representative_mask(&self, idx: usize) -> u64 {
        self.necklaces[idx].representative().bits()
    }

    fn orbit_size(&self, idx: usize) -> u32 {
        self.necklaces[idx].period()
    }

    fn index_of_mask(&self, mask: u64) -> usize {
        self.necklace_of_mask(mask)
    }
}

impl OrbitBasis for SymmetricBasis {
    fn sites(&self) -> u32 {
        self.sites
    }

    fn ups(&self) -> u32 {
        self.ups
    }

    fn dim(&self) -> usize {
        self.elements.len()
    }

    fn representative_mask(&self, idx: usize) -> u64 {
        self.elements[idx].representative
    }

    fn orbit_size(&self, idx: usize) -> u32 {
        self.elements[idx].orbit_size
    }

    fn index_of_mask(&self, mask: u64) -> usize {
        self.element_of_mask(mask)
    }
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The plain fixed-(N, p) computational basis: all masks, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    sites: u32,
    ups: u32,
    masks: Vec<u64>,
}

impl SectorBasis {
    pub fn new(n: u32, p: u32) -> Result<Self> {
        check_sector(n, p)?;
        Ok(SectorBasis {
            sites: n,
            ups: p,
            masks: FixedWeightMasks::new(n, p).collect(),
        })
    }

    pub fn sites(&self) -> u32 {
        self.sites
    }

    pub fn ups(&self) -> u32 {
        self.ups
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn index_of(&self, mask: u64) -> usize {
        self.masks
            .binary_search(&mask)
            .expect("mask popcount matches the sector")
    }
}
