//! Quadratic forms of the two-site matrix elements on orbit bases.
//!
//! For a real amplitude vector a over an orbit basis, the separation-q matrix
//! elements of the two-site reduced state are quadratic forms:
//!
//!   z(a) = aᵀ S a,    y(a) = Σ_μ Y_μ a_μ²,    v(a) = Σ_μ V_μ a_μ²,
//!
//! where S is the translation-averaged pair flip and Y, V count up-up and
//! down-down pairs at distance q in the orbit representative. Entries are
//! assembled by flipping bonds of each representative and projecting back
//! onto orbits, which handles period-deficient necklaces without hand-derived
//! cross normalization: a hit from orbit α landing in orbit β contributes
//! √(L_α/L_β) times the bare amplitude.

use crate::basis::{self, OrbitBasis};
use nalgebra::DMatrix;

/// Calls `emit(row, value)` for every nonzero of column `col` of the
/// symmetrized flip form S at separation `q` (coefficient 1/(2N) per bond
/// orientation).
pub fn for_each_flip_entry<B: OrbitBasis>(
    basis: &B,
    q: u32,
    col: usize,
    mut emit: impl FnMut(usize, f64),
) {
    let n = basis.sites();
    let rep = basis.representative_mask(col);
    let l_col = basis.orbit_size(col) as f64;
    let half = 0.5 / n as f64;
    for i in 0..n {
        let j = (i + q) % n;
        let bi = rep >> i & 1;
        let bj = rep >> j & 1;
        if bi != bj {
            let target = rep ^ (1 << i) ^ (1 << j);
            let row = basis.index_of_mask(target);
            let l_row = basis.orbit_size(row) as f64;
            emit(row, half * (l_col / l_row).sqrt());
        }
    }
}

/// Like [`for_each_flip_entry`] but for the one-sided flip (down at i, up at
/// i+q → up at i, down at i+q), coefficient 1/N. Needed to split the form
/// into symmetric and antisymmetric parts for complex amplitudes.
pub fn for_each_one_sided_flip_entry<B: OrbitBasis>(
    basis: &B,
    q: u32,
    col: usize,
    mut emit: impl FnMut(usize, f64),
) {
    let n = basis.sites();
    let rep = basis.representative_mask(col);
    let l_col = basis.orbit_size(col) as f64;
    let scale = 1.0 / n as f64;
    for i in 0..n {
        let j = (i + q) % n;
        if rep >> i & 1 == 0 && rep >> j & 1 == 1 {
            let flipped = (rep | 1 << i) & !(1 << j);
            let row = basis.index_of_mask(flipped);
            let l_row = basis.orbit_size(row) as f64;
            emit(row, scale * (l_col / l_row).sqrt());
        }
    }
}

/// Dense symmetrized flip form on a subset of orbits (rows = cols = subset).
pub fn flip_form_dense<B: OrbitBasis>(basis: &B, q: u32, subset: &[usize]) -> DMatrix<f64> {
    let mut position = vec![usize::MAX; basis.dim()];
    for (pos, &idx) in subset.iter().enumerate() {
        position[idx] = pos;
    }
    let m = subset.len();
    let mut out = DMatrix::zeros(m, m);
    for (pos, &col) in subset.iter().enumerate() {
        for_each_flip_entry(basis, q, col, |row, val| {
            if position[row] != usize::MAX {
                out[(position[row], pos)] += val;
            }
        });
    }
    out
}

/// Dense one-sided flip form over the whole basis.
pub fn one_sided_flip_form_dense<B: OrbitBasis>(basis: &B, q: u32) -> DMatrix<f64> {
    let m = basis.dim();
    let mut out = DMatrix::zeros(m, m);
    for col in 0..m {
        for_each_one_sided_flip_entry(basis, q, col, |row, val| {
            out[(row, col)] += val;
        });
    }
    out
}

/// Applies the symmetrized flip form to a vector supported on `cols` and
/// returns the components on `rows`.
pub fn flip_apply_subset<B: OrbitBasis>(
    basis: &B,
    q: u32,
    cols: &[usize],
    x: &[f64],
    rows: &[usize],
) -> Vec<f64> {
    assert_eq!(cols.len(), x.len());
    let mut position = vec![usize::MAX; basis.dim()];
    for (pos, &idx) in rows.iter().enumerate() {
        position[idx] = pos;
    }
    let mut out = vec![0.0; rows.len()];
    for (&col, &xc) in cols.iter().zip(x) {
        if xc == 0.0 {
            continue;
        }
        for_each_flip_entry(basis, q, col, |row, val| {
            if position[row] != usize::MAX {
                out[position[row]] += val * xc;
            }
        });
    }
    out
}

/// Diagonal of the up-up pair density at separation q: y(a) = Σ Y_μ a_μ².
pub fn up_pair_diagonal<B: OrbitBasis>(basis: &B, q: u32) -> Vec<f64> {
    let n = basis.sites();
    (0..basis.dim())
        .map(|idx| basis::pair_count_at(basis.representative_mask(idx), n, q) as f64 / n as f64)
        .collect()
}

/// Diagonal of the down-down pair density at separation q: v(a) = Σ V_μ a_μ².
pub fn down_pair_diagonal<B: OrbitBasis>(basis: &B, q: u32) -> Vec<f64> {
    let n = basis.sites();
    (0..basis.dim())
        .map(|idx| {
            basis::hole_pair_count_at(basis.representative_mask(idx), n, q) as f64 / n as f64
        })
        .collect()
}

/// Compressed rows of the symmetrized flip form over the full basis.
#[derive(Debug, Clone)]
pub struct FlipCsr {
    offsets: Vec<usize>,
    columns: Vec<u32>,
    values: Vec<f64>,
}

impl FlipCsr {
    /// Assembles S (symmetric, so rows can be built from column hits).
    pub fn assemble<B: OrbitBasis>(basis: &B, q: u32) -> Self {
        let dim = basis.dim();
        let mut offsets = Vec::with_capacity(dim + 1);
        let mut columns = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for col in 0..dim {
            scratch.clear();
            for_each_flip_entry(basis, q, col, |row, val| scratch.push((row, val)));
            scratch.sort_by_key(|&(row, _)| row);
            let mut i = 0;
            while i < scratch.len() {
                let (row, mut val) = scratch[i];
                let mut j = i + 1;
                while j < scratch.len() && scratch[j].0 == row {
                    val += scratch[j].1;
                    j += 1;
                }
                columns.push(row as u32);
                values.push(val);
                i = j;
            }
            offsets.push(columns.len());
        }
        FlipCsr {
            offsets,
            columns,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.offsets.len() - 1
    }

    /// out += scale * S x
    pub fn accumulate(&self, scale: f64, x: &[f64], out: &mut [f64]) {
        for (row, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.offsets[row]..self.offsets[row + 1] {
                acc += self.values[k] * x[self.columns[k] as usize];
            }
            *o += scale * acc;
        }
    }

    /// (column, value) pairs of one row.
    pub fn row_entries(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.offsets[row]..self.offsets[row + 1])
            .map(move |k| (self.columns[k] as usize, self.values[k]))
    }

    pub fn quadratic(&self, a: &[f64]) -> f64 {
        let mut total = 0.0;
        for row in 0..self.dim() {
            let mut acc = 0.0;
            for k in self.offsets[row]..self.offsets[row + 1] {
                acc += self.values[k] * a[self.columns[k] as usize];
            }
            total += a[row] * acc;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{NecklaceBasis, SymmetricBasis};

    #[test]
    fn flip_form_is_symmetric() {
        for (n, p) in [(5u32, 2u32), (6, 3), (8, 3), (9, 4), (7, 3)] {
            let basis = SymmetricBasis::build(n, p).unwrap();
            let all: Vec<usize> = (0..basis.len()).collect();
            for q in 1..n {
                let s = flip_form_dense(&basis, q, &all);
                let asym = (&s - s.transpose()).abs().max();
                assert!(asym < 1e-14, "N={n} p={p} q={q}: asym={asym}");
            }
        }
    }

    #[test]
    fn one_sided_form_symmetrizes_to_flip_form() {
        for (n, p) in [(5u32, 2u32), (7, 3), (8, 3)] {
            let basis = NecklaceBasis::build(n, p).unwrap();
            let all: Vec<usize> = (0..basis.len()).collect();
            let s = flip_form_dense(&basis, 1, &all);
            let m = one_sided_flip_form_dense(&basis, 1);
            let sym = (&m + m.transpose()) * 0.5;
            assert!((&s - &sym).abs().max() < 1e-14);
        }
    }

    #[test]
    fn known_p2_block_structure() {
        // For (8, 2) the π=0 block over gaps (2,6),(3,5),(4,4) is tridiagonal
        // with couplings 1/N and √2/N; the period-4 necklace (4,4) carries √2.
        let basis = NecklaceBasis::build(8, 2).unwrap();
        let pi0 = basis.group(0);
        assert_eq!(pi0.len(), 3);
        let z00 = flip_form_dense(&basis, 1, &pi0);
        let expect = DMatrix::from_row_slice(
            3,
            3,
            &[
                0.0,
                1.0 / 8.0,
                0.0,
                1.0 / 8.0,
                0.0,
                2f64.sqrt() / 8.0,
                0.0,
                2f64.sqrt() / 8.0,
                0.0,
            ],
        );
        assert!((&z00 - &expect).abs().max() < 1e-15);
    }

    #[test]
    fn csr_matches_dense() {
        let basis = SymmetricBasis::build(9, 4).unwrap();
        let all: Vec<usize> = (0..basis.len()).collect();
        let dense = flip_form_dense(&basis, 1, &all);
        let csr = FlipCsr::assemble(&basis, 1);
        let dim = basis.len();
        let x: Vec<f64> = (0..dim).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut out = vec![0.0; dim];
        csr.accumulate(1.0, &x, &mut out);
        for i in 0..dim {
            let want: f64 = (0..dim).map(|j| dense[(i, j)] * x[j]).sum();
            assert!((out[i] - want).abs() < 1e-13);
        }
    }
}
