//! Small dense linear-algebra helpers used by the simplex solver.
//!
//! The finite-difference estimates divide tiny optimal values by steps on the
//! order of 1e-6, so vertex solutions have to be recovered well below the
//! usual tableau accuracy. Basic systems are therefore re-solved from the
//! original column data with LU plus iterative refinement, with residuals
//! accumulated in compensated (error-free transformation) arithmetic.

use crate::scalar::Scalar;

/// Error-free sum: returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e`.
#[inline]
pub(crate) fn two_sum<S: Scalar>(a: S, b: S) -> (S, S) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free product via fused multiply-add: `a * b = p + e`.
#[inline]
pub(crate) fn two_prod<S: Scalar>(a: S, b: S) -> (S, S) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Dot product with compensated accumulation (Ogita-Rump-Oishi `Dot2`).
pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut s = S::zero();
    let mut c = S::zero();
    for (&x, &y) in a.iter().zip(b.iter()) {
        let (p, pe) = two_prod(x, y);
        let (t, se) = two_sum(s, p);
        s = t;
        c += se + pe;
    }
    s + c
}

/// Dense LU factorization with partial pivoting of a square matrix given by
/// columns. Solves `A x = b` and `A^T y = c`.
pub(crate) struct Lu<S: Scalar> {
    n: usize,
    /// Packed LU factors, row-major; unit lower triangle implied.
    lu: Vec<S>,
    /// Row permutation: `perm[k]` is the original row in position `k`.
    perm: Vec<usize>,
}

pub(crate) struct Singular;

impl<S: Scalar> Lu<S> {
    /// Factor the matrix whose j-th column is `cols[j]`.
    pub(crate) fn factor(cols: &[&[S]]) -> Result<Self, Singular> {
        let n = cols.len();
        let mut lu = vec![S::zero(); n * n];
        for (j, col) in cols.iter().enumerate() {
            debug_assert_eq!(col.len(), n);
            for i in 0..n {
                lu[i * n + j] = col[i];
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            // Partial pivot: largest magnitude in column k at or below row k.
            let mut pivot_row = k;
            let mut pivot_mag = lu[k * n + k].abs();
            for i in k + 1..n {
                let mag = lu[i * n + k].abs();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = i;
                }
            }
            if pivot_mag == S::zero() || !pivot_mag.is_finite() {
                return Err(Singular);
            }
            if pivot_row != k {
                perm.swap(k, pivot_row);
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
            }
            let inv = S::one() / lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] * inv;
                lu[i * n + k] = factor;
                for j in k + 1..n {
                    let delta = factor * lu[k * n + j];
                    lu[i * n + j] -= delta;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    /// Solve `A x = b`.
    pub(crate) fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.n;
        let mut x: Vec<S> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc / self.lu[i * n + i];
        }
        x
    }

    /// Solve `A^T y = c` using the same factors (`A^T = U^T L^T P`).
    pub(crate) fn solve_transposed(&self, c: &[S]) -> Vec<S> {
        let n = self.n;
        let mut z = c.to_vec();
        // U^T z' = c (forward, U^T is lower triangular).
        for i in 0..n {
            let mut acc = z[i];
            for j in 0..i {
                acc -= self.lu[j * n + i] * z[j];
            }
            z[i] = acc / self.lu[i * n + i];
        }
        // L^T w = z' (backward, unit diagonal).
        for i in (0..n).rev() {
            let mut acc = z[i];
            for j in i + 1..n {
                acc -= self.lu[j * n + i] * z[j];
            }
            z[i] = acc;
        }
        // y = P^T w: w[k] corresponds to original row perm[k].
        let mut y = vec![S::zero(); n];
        for k in 0..n {
            y[self.perm[k]] = z[k];
        }
        y
    }

    /// Refined solve of `A x = b`: LU solve plus `iters` rounds of iterative
    /// refinement with compensated residuals.
    pub(crate) fn solve_refined(&self, cols: &[&[S]], b: &[S], iters: usize) -> Vec<S> {
        let mut x = self.solve(b);
        for _ in 0..iters {
            let r = residual(cols, &x, b);
            let d = self.solve(&r);
            for (xi, di) in x.iter_mut().zip(d.iter()) {
                *xi += *di;
            }
        }
        x
    }

    /// Refined solve of `A^T y = c`.
    pub(crate) fn solve_transposed_refined(&self, cols: &[&[S]], c: &[S], iters: usize) -> Vec<S> {
        let mut y = self.solve_transposed(c);
        for _ in 0..iters {
            // residual_k = c_k - cols[k] . y
            let r: Vec<S> = cols
                .iter()
                .zip(c.iter())
                .map(|(col, &ck)| ck - dot(col, &y))
                .collect();
            let d = self.solve_transposed(&r);
            for (yi, di) in y.iter_mut().zip(d.iter()) {
                *yi += *di;
            }
        }
        y
    }
}

/// Compensated residual `b - A x` for a column-major matrix.
pub(crate) fn residual<S: Scalar>(cols: &[&[S]], x: &[S], b: &[S]) -> Vec<S> {
    let n = b.len();
    let mut s = vec![S::zero(); n];
    let mut comp = vec![S::zero(); n];
    for (col, &xj) in cols.iter().zip(x.iter()) {
        for i in 0..n {
            let (p, pe) = two_prod(col[i], xj);
            let (t, se) = two_sum(s[i], p);
            s[i] = t;
            comp[i] += se + pe;
        }
    }
    (0..n).map(|i| b[i] - s[i] - comp[i]).collect()
}
