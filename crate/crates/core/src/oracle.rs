//! Direct nonlinear maximization of the concurrence on the amplitude sphere.
//!
//! Independent of the linearized route: the objective 2(z − √(yv)) is
//! evaluated through the quadratic forms and climbed by projected ascent with
//! non-negativity, multiple seeded starts, and a pair-free eigenvector start
//! for the boundary branch. The objective is not differentiable where y
//! vanishes, so the ascent switches to one-sided slopes there instead of
//! trusting the smooth gradient.

use crate::basis::{NecklaceBasis, SymmetricBasis};
use crate::error::{Error, Result};
use crate::quadratic;
use crate::rdm::AmplitudeVector;
use crate::rng::SplitMix64;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

/// Dimension wall for the real oracle.
pub const DIRECT_DIMENSION_WALL: usize = 500;

/// Dimension wall for the complex validation oracle.
pub const COMPLEX_DIMENSION_WALL: usize = 60;

/// Multistart controls. Defaults reproduce every tabulated optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_steps: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            restarts: 64,
            seed: 0,
            max_steps: 4000,
        }
    }
}

struct RealProblem {
    s: DMatrix<f64>,
    y_diag: Vec<f64>,
    v_diag: Vec<f64>,
}

impl RealProblem {
    fn dim(&self) -> usize {
        self.y_diag.len()
    }

    fn forms(&self, a: &[f64]) -> (f64, f64, f64) {
        let dim = self.dim();
        let mut z = 0.0;
        for i in 0..dim {
            let mut acc = 0.0;
            for (j, &aj) in a.iter().enumerate() {
                acc += self.s[(i, j)] * aj;
            }
            z += a[i] * acc;
        }
        let y: f64 = (0..dim).map(|i| self.y_diag[i] * a[i] * a[i]).sum();
        let v: f64 = (0..dim).map(|i| self.v_diag[i] * a[i] * a[i]).sum();
        (z, y, v)
    }

    fn objective(&self, a: &[f64]) -> f64 {
        let (z, y, v) = self.forms(a);
        2.0 * (z - (y * v).sqrt())
    }

    /// Ascent direction: smooth gradient in the interior, one-sided slopes
    /// where y (or v) vanishes.
    fn direction(&self, a: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        let (_, y, v) = self.forms(a);
        let mut sa = vec![0.0; dim];
        for (i, si) in sa.iter_mut().enumerate() {
            for (j, &aj) in a.iter().enumerate() {
                *si += self.s[(i, j)] * aj;
            }
        }
        let mut g = vec![0.0; dim];
        let smooth = y > 1e-12 && v > 1e-12;
        for j in 0..dim {
            let z_part = 4.0 * sa[j];
            let penalty = if smooth {
                2.0 * ((v / y).sqrt() * self.y_diag[j] + (y / v).sqrt() * self.v_diag[j]) * a[j]
            } else {
                // Moving into coordinate j grows √(yv) linearly with slope
                // √(Y_j v) + √(V_j y).
                2.0 * ((self.y_diag[j] * v).sqrt() + (self.v_diag[j] * y).sqrt())
            };
            g[j] = z_part - penalty;
        }
        g
    }
}

fn normalize_clamped(a: &mut [f64]) {
    for x in a.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in a.iter_mut() {
            *x /= norm;
        }
    }
}

fn ascend_real(problem: &RealProblem, start: Vec<f64>, max_steps: usize) -> (f64, Vec<f64>) {
    let dim = problem.dim();
    let mut a = start;
    normalize_clamped(&mut a);
    let mut f = problem.objective(&a);
    for _ in 0..max_steps {
        let mut g = problem.direction(&a);
        let overlap: f64 = g.iter().zip(&a).map(|(gi, ai)| gi * ai).sum();
        for (gi, &ai) in g.iter_mut().zip(&a) {
            *gi -= overlap * ai;
            if ai == 0.0 && *gi < 0.0 {
                *gi = 0.0;
            }
        }
        let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gnorm < 1e-14 {
            break;
        }
        let mut t = 0.5;
        let mut improved = false;
        while t > 1e-14 {
            let mut cand: Vec<f64> = (0..dim).map(|j| a[j] + t * g[j] / gnorm).collect();
            normalize_clamped(&mut cand);
            let fc = problem.objective(&cand);
            if fc > f + 1e-16 * (1.0 + f.abs()) {
                a = cand;
                f = fc;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (f, a)
}

/// Maximizes the separation-q concurrence over the reflection-even amplitude
/// sphere by multistart projected ascent. Deterministic for a fixed seed.
pub fn optimize_direct(
    n: u32,
    p: u32,
    separation: u32,
    opts: &OracleOptions,
) -> Result<(f64, AmplitudeVector)> {
    if separation == 0 || separation >= n {
        return Err(Error::domain(format!(
            "separation {separation} outside 1..{n}"
        )));
    }
    let basis = Arc::new(SymmetricBasis::build(n, p)?);
    let dim = basis.len();
    if dim > DIRECT_DIMENSION_WALL {
        return Err(Error::domain(format!(
            "symmetric dimension {dim} exceeds the direct-oracle wall \
             {DIRECT_DIMENSION_WALL}; use the exact sweep"
        )));
    }
    let all: Vec<usize> = (0..dim).collect();
    let problem = RealProblem {
        s: quadratic::flip_form_dense(basis.as_ref(), separation, &all),
        y_diag: quadratic::up_pair_diagonal(basis.as_ref(), separation),
        v_diag: quadratic::down_pair_diagonal(basis.as_ref(), separation),
    };

    // Boundary branch: top eigenvector of the flip form restricted to
    // pair-free-at-distance-q coordinates, when that block exists.
    let pair_free: Vec<usize> = (0..dim).filter(|&j| problem.y_diag[j] == 0.0).collect();
    let boundary_start = if pair_free.is_empty() {
        None
    } else {
        let block = quadratic::flip_form_dense(basis.as_ref(), separation, &pair_free);
        let (_, vec) = crate::eigen::dense_ground_state(&(-block));
        let mut start = vec![0.0; dim];
        for (pos, &j) in pair_free.iter().enumerate() {
            start[j] = vec[pos].max(0.0);
        }
        Some(start)
    };

    let runs: Vec<(usize, f64, Vec<f64>)> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|idx| {
            let start = match (&boundary_start, idx) {
                (Some(b), 0) => b.clone(),
                _ => {
                    let mut rng =
                        SplitMix64::new(opts.seed ^ (idx as u64).wrapping_mul(0x9e3779b97f4a7c15));
                    (0..dim).map(|_| rng.uniform() + 1e-3).collect()
                }
            };
            let (f, a) = ascend_real(&problem, start, opts.max_steps);
            (idx, f, a)
        })
        .collect();

    let mut best = &runs[0];
    for run in &runs[1..] {
        if run.1 > best.1 {
            best = run;
        }
    }
    let c = best.1.max(0.0);
    let amplitudes = AmplitudeVector::normalized(basis, best.2.clone())?;
    Ok((c, amplitudes))
}

struct ComplexProblem {
    s: DMatrix<f64>,
    a_form: DMatrix<f64>,
    y_diag: Vec<f64>,
    v_diag: Vec<f64>,
}

impl ComplexProblem {
    fn dim(&self) -> usize {
        self.y_diag.len()
    }

    /// (z_re, z_im, y, v) at the packed point (x₀..x_{d−1}, y₀..y_{d−1}).
    fn forms(&self, xs: &[f64]) -> (f64, f64, f64, f64) {
        let d = self.dim();
        let (re, im) = xs.split_at(d);
        let quad = |m: &DMatrix<f64>, u: &[f64], w: &[f64]| -> f64 {
            let mut acc = 0.0;
            for i in 0..d {
                let mut row = 0.0;
                for j in 0..d {
                    row += m[(i, j)] * w[j];
                }
                acc += u[i] * row;
            }
            acc
        };
        let z_re = quad(&self.s, re, re) + quad(&self.s, im, im);
        let z_im = 2.0 * quad(&self.a_form, re, im);
        let mut y = 0.0;
        let mut v = 0.0;
        for j in 0..d {
            let w = re[j] * re[j] + im[j] * im[j];
            y += self.y_diag[j] * w;
            v += self.v_diag[j] * w;
        }
        (z_re, z_im, y, v)
    }

    fn objective(&self, xs: &[f64]) -> f64 {
        let (z_re, z_im, y, v) = self.forms(xs);
        2.0 * ((z_re * z_re + z_im * z_im).sqrt() - (y * v).sqrt())
    }

    fn direction(&self, xs: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let (re, im) = xs.split_at(d);
        let (z_re, z_im, y, v) = self.forms(xs);
        let z_abs = (z_re * z_re + z_im * z_im).sqrt().max(1e-300);
        let mat_vec = |m: &DMatrix<f64>, w: &[f64], transpose: bool| -> Vec<f64> {
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| if transpose { m[(j, i)] } else { m[(i, j)] } * w[j])
                        .sum()
                })
                .collect()
        };
        let s_re = mat_vec(&self.s, re, false);
        let s_im = mat_vec(&self.s, im, false);
        let a_im = mat_vec(&self.a_form, im, false);
        let a_re_t = mat_vec(&self.a_form, re, true);
        let mut g = vec![0.0; 2 * d];
        let smooth = y > 1e-12 && v > 1e-12;
        for j in 0..d {
            // ∇|z| = (z_re ∇z_re + z_im ∇z_im)/|z|.
            let dz_re_x = 2.0 * s_re[j];
            let dz_re_y = 2.0 * s_im[j];
            let dz_im_x = 2.0 * a_im[j];
            let dz_im_y = 2.0 * a_re_t[j];
            let zg_x = (z_re * dz_re_x + z_im * dz_im_x) / z_abs;
            let zg_y = (z_re * dz_re_y + z_im * dz_im_y) / z_abs;
            if smooth {
                let pen = (v / y).sqrt() * self.y_diag[j] + (y / v).sqrt() * self.v_diag[j];
                g[j] = 2.0 * zg_x - 2.0 * pen * re[j];
                g[d + j] = 2.0 * zg_y - 2.0 * pen * im[j];
            } else {
                let slope = 2.0 * ((self.y_diag[j] * v).sqrt() + (self.v_diag[j] * y).sqrt());
                let one_sided = |zg: f64| -> f64 {
                    let gain = 2.0 * zg;
                    if gain.abs() > slope {
                        gain - slope * gain.signum()
                    } else {
                        0.0
                    }
                };
                g[j] = one_sided(zg_x);
                g[d + j] = one_sided(zg_y);
            }
        }
        g
    }
}

fn ascend_complex(problem: &ComplexProblem, start: Vec<f64>, max_steps: usize) -> (f64, Vec<f64>) {
    let mut xs = start;
    let norm = xs.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut xs {
        *x /= norm;
    }
    let mut f = problem.objective(&xs);
    for _ in 0..max_steps {
        let mut g = problem.direction(&xs);
        let overlap: f64 = g.iter().zip(&xs).map(|(gi, xi)| gi * xi).sum();
        for (gi, &xi) in g.iter_mut().zip(&xs) {
            *gi -= overlap * xi;
        }
        let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gnorm < 1e-14 {
            break;
        }
        let mut t = 0.5;
        let mut improved = false;
        while t > 1e-14 {
            let mut cand: Vec<f64> = xs
                .iter()
                .zip(&g)
                .map(|(xi, gi)| xi + t * gi / gnorm)
                .collect();
            let norm = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in &mut cand {
                *x /= norm;
            }
            let fc = problem.objective(&cand);
            if fc > f + 1e-16 * (1.0 + f.abs()) {
                xs = cand;
                f = fc;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (f, xs)
}

/// Validation-only: maximizes over complex amplitudes in the full momentum-0
/// necklace space (no reflection restriction). Confirms the real even-parity
/// optimum cannot be improved.
pub fn optimize_direct_complex(
    n: u32,
    p: u32,
    opts: &OracleOptions,
) -> Result<(f64, Vec<Complex64>)> {
    let basis = NecklaceBasis::build(n, p)?;
    let dim = basis.len();
    if dim > COMPLEX_DIMENSION_WALL {
        return Err(Error::domain(format!(
            "necklace dimension {dim} exceeds the complex-oracle wall \
             {COMPLEX_DIMENSION_WALL}"
        )));
    }
    let one_sided = quadratic::one_sided_flip_form_dense(&basis, 1);
    let s = (&one_sided + one_sided.transpose()) * 0.5;
    let a_form = (&one_sided - one_sided.transpose()) * 0.5;
    let problem = ComplexProblem {
        s,
        a_form,
        y_diag: quadratic::up_pair_diagonal(&basis, 1),
        v_diag: quadratic::down_pair_diagonal(&basis, 1),
    };

    let runs: Vec<(usize, f64, Vec<f64>)> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|idx| {
            let mut rng =
                SplitMix64::new(opts.seed ^ (idx as u64).wrapping_mul(0xd1342543de82ef95));
            let start: Vec<f64> = (0..2 * dim).map(|_| rng.symmetric()).collect();
            let (f, xs) = ascend_complex(&problem, start, opts.max_steps);
            (idx, f, xs)
        })
        .collect();

    let mut best = &runs[0];
    for run in &runs[1..] {
        if run.1 > best.1 {
            best = run;
        }
    }
    let (re, im) = best.2.split_at(dim);
    let amplitudes: Vec<Complex64> = re
        .iter()
        .zip(im)
        .map(|(&r, &i)| Complex64::new(r, i))
        .collect();
    Ok((best.1.max(0.0), amplitudes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_small_ring_optima() {
        let opts = OracleOptions {
            restarts: 16,
            ..OracleOptions::default()
        };
        let (c4, amps4) = optimize_direct(4, 2, 1, &opts).unwrap();
        assert!((c4 - 0.5).abs() < 1e-8, "C(4,2) = {c4}");
        assert!((amps4.values()[0] - (1f64 / 3.0).sqrt()).abs() < 1e-4);
        assert!((amps4.values()[1] - (2f64 / 3.0).sqrt()).abs() < 1e-4);

        let (c5, amps5) = optimize_direct(5, 2, 1, &opts).unwrap();
        assert!((c5 - 0.468).abs() < 5e-4, "C(5,2) = {c5}");
        assert!((amps5.values()[0] - 0.298).abs() < 5e-3);
        assert!((amps5.values()[1] - 0.955).abs() < 5e-3);

        let (c7, amps7) = optimize_direct(7, 2, 1, &opts).unwrap();
        assert!(
            (c7 - (1.0 + 5f64.sqrt()) / 7.0).abs() < 1e-7,
            "C(7,2) = {c7}"
        );
        assert!(amps7.values()[0].abs() < 1e-5, "a1 = {}", amps7.values()[0]);
        assert!((amps7.values()[1] - ((5.0 - 5f64.sqrt()) / 10.0).sqrt()).abs() < 1e-4);
        assert!((amps7.values()[2] - ((5.0 + 5f64.sqrt()) / 10.0).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn deterministic_given_a_seed() {
        let opts = OracleOptions {
            restarts: 8,
            seed: 1234,
            ..OracleOptions::default()
        };
        let (c1, a1) = optimize_direct(6, 2, 1, &opts).unwrap();
        let (c2, a2) = optimize_direct(6, 2, 1, &opts).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(a1.values(), a2.values());
    }

    #[test]
    fn stationary_point_matches_the_sweep_parameter() {
        // When the optimum has y > 0, √(v/y) of the returned state is the
        // linearization parameter the sweep lands on.
        use crate::rdm::two_site_rdm;
        use crate::xxz::{sweep, SweepGrid};
        let (_, amps) = optimize_direct(5, 2, 1, &OracleOptions::default()).unwrap();
        let rdm = two_site_rdm(&amps, 1).unwrap();
        assert!(rdm.y > 0.0);
        let stationary = (rdm.v / rdm.y).sqrt();
        let s_opt = sweep(5, 2, &SweepGrid::default()).unwrap().s_opt;
        assert!(
            (stationary.ln() - s_opt.ln()).abs() < 2e-2,
            "oracle √(v/y) = {stationary} vs sweep s_opt = {s_opt}"
        );
    }

    #[test]
    fn complex_route_matches_real_optimum() {
        let opts = OracleOptions {
            restarts: 24,
            ..OracleOptions::default()
        };
        let (c_complex, _) = optimize_direct_complex(4, 1, &opts).unwrap();
        assert!(
            (c_complex - 0.5).abs() < 1e-6,
            "C(4,1) complex = {c_complex}"
        );

        let (c_real, _) = optimize_direct(6, 2, 1, &opts).unwrap();
        let (c_cmplx, _) = optimize_direct_complex(6, 2, &opts).unwrap();
        assert!(
            c_cmplx <= c_real + 1e-6,
            "complex {c_cmplx} exceeds real {c_real}"
        );
        assert!(
            c_cmplx >= c_real - 1e-4,
            "complex {c_cmplx} far below real {c_real}"
        );
    }

    #[test]
    fn refuses_oversized_problems() {
        assert!(optimize_direct(24, 12, 1, &OracleOptions::default()).is_err());
        assert!(optimize_direct_complex(20, 10, &OracleOptions::default()).is_err());
        assert!(optimize_direct(6, 2, 0, &OracleOptions::default()).is_err());
        assert!(optimize_direct(6, 2, 6, &OracleOptions::default()).is_err());
    }
}
