//! Self-contained cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! One rotation annihilates one off-diagonal entry: for the pivot `(p, q)`
//! with `a_pq = |a| e^{iφ}`, the unitary
//!
//! ```text
//! R[p][p] = c          R[p][q] = s e^{iφ}
//! R[q][p] = -s e^{-iφ} R[q][q] = c
//! ```
//!
//! with `tan θ` the smaller root of `t² + 2τt - 1 = 0`, `τ = (a_qq - a_pp)/(2|a|)`,
//! zeroes the pivot and keeps the matrix Hermitian. Sweeping all pivots
//! cyclically converges quadratically; matrices here are `m x m` with
//! `m <= 64`, far below where Jacobi's O(m³)-per-sweep cost matters.

use crate::error::{Error, Result};
use num_complex::Complex64;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix.
pub struct HermitianEigen {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Column-major eigenvectors aligned with `values`; `None` unless
    /// requested.
    pub vectors: Option<Vec<Complex64>>,
}

/// Diagonalizes the dense row-major Hermitian `a` (`dim x dim`). The
/// off-diagonal threshold is `1e-14 ‖A‖_F`.
pub fn hermitian_eigen(a: &[Complex64], dim: usize, want_vectors: bool) -> Result<HermitianEigen> {
    assert_eq!(a.len(), dim * dim, "matrix shape");
    assert!((1..=64).contains(&dim), "supported sizes are 1..=64");

    let mut work = a.to_vec();
    let mut q = if want_vectors {
        let mut id = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            id[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Some(id)
    } else {
        None
    };

    let norm: f64 = work.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = 1e-14 * norm.max(f64::MIN_POSITIVE);

    let idx = |r: usize, c: usize| r * dim + c;
    let mut converged = dim < 2;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..dim {
            for qq in p + 1..dim {
                let apq = work[idx(p, qq)];
                let mag = apq.norm();
                if mag <= threshold {
                    continue;
                }
                rotated = true;

                let phase = apq / mag; // e^{iφ}
                let app = work[idx(p, p)].re;
                let aqq = work[idx(qq, qq)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_fwd = phase * s; // s e^{iφ}
                let s_bwd = phase.conj() * s; // s e^{-iφ}

                // rows/columns k != p, q
                for k in 0..dim {
                    if k == p || k == qq {
                        continue;
                    }
                    let akp = work[idx(k, p)];
                    let akq = work[idx(k, qq)];
                    let new_kp = c * akp - s_bwd * akq;
                    let new_kq = s_fwd * akp + c * akq;
                    work[idx(k, p)] = new_kp;
                    work[idx(k, qq)] = new_kq;
                    work[idx(p, k)] = new_kp.conj();
                    work[idx(qq, k)] = new_kq.conj();
                }
                work[idx(p, p)] = Complex64::new(app - t * mag, 0.0);
                work[idx(qq, qq)] = Complex64::new(aqq + t * mag, 0.0);
                work[idx(p, qq)] = Complex64::new(0.0, 0.0);
                work[idx(qq, p)] = Complex64::new(0.0, 0.0);

                if let Some(vecs) = q.as_mut() {
                    for k in 0..dim {
                        let qkp = vecs[idx(k, p)];
                        let qkq = vecs[idx(k, qq)];
                        vecs[idx(k, p)] = c * qkp - s_bwd * qkq;
                        vecs[idx(k, qq)] = s_fwd * qkp + c * qkq;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::EigenNonConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| work[idx(i, i)].re.total_cmp(&work[idx(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| work[idx(i, i)].re).collect();
    let vectors = q.map(|vecs| {
        let mut sorted = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..dim {
                sorted[r * dim + new_col] = vecs[r * dim + old_col];
            }
        }
        sorted
    });
    Ok(HermitianEigen { values, vectors })
}
