//! Euclidean projection onto `{x : A x = 0, x ≥ lower}` by a primal
//! active-set method. `lower` must be nonpositive so that `x = 0` is a
//! feasible start.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenvalues of `A Aᵀ` below this fraction of the largest are treated as zero.
const RANK_EPS: f64 = 1e-10;

/// `(A Aᵀ)⁺` from a symmetric eigendecomposition. nalgebra's SVD-based
/// pseudo-inverse is unreliable on the rank-deficient 0/1 matrices used here.
pub(crate) fn gram_pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = (a * a.transpose()).symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = RANK_EPS * top.max(1.0);
    let inv = eig.eigenvalues.map(|v| if v > cut { 1.0 / v } else { 0.0 });
    &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose()
}

/// Moore-Penrose pseudo-inverse `Aᵀ (A Aᵀ)⁺`.
fn pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.transpose() * gram_pinv(a)
}

/// Orthogonal projector onto the null space of a constraint matrix.
#[derive(Clone, Debug)]
pub struct NullSpaceProjector {
    projector: DMatrix<f64>,
}

impl NullSpaceProjector {
    pub fn new(a: &DMatrix<f64>) -> Self {
        let n = a.ncols();
        let projector = if a.nrows() == 0 || n == 0 {
            DMatrix::identity(n, n)
        } else {
            DMatrix::identity(n, n) - pinv(a) * a
        };
        NullSpaceProjector { projector }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let out = &self.projector * DVector::from_column_slice(v);
        out.iter().copied().collect()
    }
}

fn select_columns(a: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), cols.len(), |r, c| a[(r, cols[c])])
}

/// Minimizes `‖x − v‖²` subject to `A x = 0` and `x ≥ lower`.
pub fn project(a: &DMatrix<f64>, v: &[f64], lower: &[f64]) -> Result<Vec<f64>> {
    let n = v.len();
    debug_assert_eq!(a.ncols(), n);
    debug_assert!(lower.iter().all(|l| *l <= 0.0));
    let scale = 1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let mut x = vec![0.0; n];
    let mut active: Vec<bool> = lower.iter().map(|l| *l == 0.0).collect();
    let max_iter = 20 * n + 100;

    let mut at_face_minimum = false;

    for _ in 0..max_iter {
        let free: Vec<usize> = (0..n).filter(|&i| !active[i]).collect();
        let a_free = select_columns(a, &free);
        let resid = DVector::from_iterator(free.len(), free.iter().map(|&i| v[i] - x[i]));

        if !at_face_minimum {
            // Step within the face: null-space projection of the residual.
            let step = if free.is_empty() {
                DVector::zeros(0)
            } else if a_free.nrows() == 0 {
                resid.clone()
            } else {
                &resid - pinv(&a_free) * (&a_free * &resid)
            };
            let step_norm = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));

            if step_norm > 1e-13 * scale {
                let mut alpha = 1.0;
                let mut blocking = None;
                for (k, &i) in free.iter().enumerate() {
                    let p = step[k];
                    if p < 0.0 {
                        let ratio = (lower[i] - x[i]) / p;
                        if ratio < alpha {
                            alpha = ratio.max(0.0);
                            blocking = Some(i);
                        }
                    }
                }
                for (k, &i) in free.iter().enumerate() {
                    x[i] += alpha * step[k];
                }
                match blocking {
                    Some(i) => {
                        x[i] = lower[i];
                        active[i] = true;
                    }
                    None => at_face_minimum = true,
                }
                continue;
            }
        }
        at_face_minimum = false;

        // Stationary on this face: check the bound multipliers.
        let lambda = if free.is_empty() || a_free.nrows() == 0 {
            DVector::zeros(a.nrows())
        } else {
            gram_pinv(&a_free) * (&a_free * &resid)
        };
        let at_lambda = a.transpose() * &lambda;
        let mut worst: Option<(usize, f64)> = None;
        for i in (0..n).filter(|&i| active[i]) {
            let mu = x[i] - v[i] + at_lambda[i];
            if mu < -1e-12 * scale && worst.is_none_or(|(_, w)| mu < w) {
                worst = Some((i, mu));
            }
        }
        match worst {
            Some((i, _)) => active[i] = false,
            None => return Ok(x),
        }
    }
    Err(Error::NotConverged { iterations: max_iter })
}
