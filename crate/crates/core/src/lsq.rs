//! Small dense least-squares solvers: minimum-norm LS via one-sided Jacobi SVD
//! and Lawson–Hanson nonnegative least squares built on top of it.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::domain("ragged matrix rows"));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * x[c]).sum())
            .collect()
    }

    fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    fn select_columns(&self, keep: &[usize]) -> Matrix<T> {
        let mut data = Vec::with_capacity(self.rows * keep.len());
        for r in 0..self.rows {
            data.extend(keep.iter().map(|&c| self.get(r, c)));
        }
        Matrix {
            rows: self.rows,
            cols: keep.len(),
            data,
        }
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Residual `b - A x` and its Euclidean norm.
pub fn residual<T: Scalar>(a: &Matrix<T>, x: &[T], b: &[T]) -> (Vec<T>, T) {
    let r: Vec<T> = a.mul_vec(x).iter().zip(b).map(|(ax, b)| *b - *ax).collect();
    let n = norm(&r);
    (r, n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstsqSolution<T> {
    pub x: Vec<T>,
    pub residual_norm: T,
    /// Numerical rank of `A`.
    pub rank: usize,
}

/// Minimum-norm solution of `min ||A x - b||`.
pub fn lstsq<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<LstsqSolution<T>> {
    if b.len() != a.rows {
        return Err(Error::domain(format!(
            "right-hand side has {} rows, matrix has {}",
            b.len(),
            a.rows
        )));
    }
    let n = a.cols;
    // columns of A, orthogonalised in place: A V = W
    let mut w: Vec<Vec<T>> = (0..n).map(|c| a.column(c)).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if alpha == T::zero()
                    || beta == T::zero()
                    || gamma.abs() <= eps * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                #[allow(clippy::needless_range_loop)]
                for k in 0..a.rows {
                    let (wp, wq) = (w[p][k], w[q][k]);
                    w[p][k] = c * wp - s * wq;
                    w[q][k] = s * wp + c * wq;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<T> = w.iter().map(|col| norm(col)).collect();
    let sigma_max = sigma.iter().copied().fold(T::zero(), T::max);
    let cutoff = T::from_count(a.rows.max(n) as u64) * eps * sigma_max;
    let mut x = vec![T::zero(); n];
    let mut rank = 0;
    for j in 0..n {
        if sigma[j] > cutoff && sigma[j] > T::zero() {
            rank += 1;
            let coef = dot(&w[j], b) / (sigma[j] * sigma[j]);
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = *xi + v[i][j] * coef;
            }
        }
    }
    let (_, residual_norm) = residual(a, &x, b);
    Ok(LstsqSolution {
        x,
        residual_norm,
        rank,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution<T> {
    pub x: Vec<T>,
    pub residual_norm: T,
}

/// `min ||A x - b||` subject to `x >= 0` (Lawson–Hanson active set).
///
/// Every returned component is `>= 0`. Ties among optimal solutions lean toward
/// the minimum-norm one through the inner minimum-norm solves.
pub fn nnls<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<NnlsSolution<T>> {
    if b.len() != a.rows {
        return Err(Error::domain(format!(
            "right-hand side has {} rows, matrix has {}",
            b.len(),
            a.rows
        )));
    }
    let n = a.cols;
    let mut x = vec![T::zero(); n];
    let mut passive = vec![false; n];
    let a_norm = norm(&a.data);
    let tol = T::lit(10.0)
        * T::from_count(a.rows.max(n).max(1) as u64)
        * T::epsilon()
        * a_norm
        * norm(b).max(T::one());
    let gradient = |x: &[T]| -> Vec<T> {
        let (r, _) = residual(a, x, b);
        (0..n).map(|c| dot(&a.column(c), &r)).collect()
    };
    let mut blocked = vec![false; n];
    let max_outer = 3 * n + 10;
    for _ in 0..max_outer {
        let w = gradient(&x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && !blocked[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].partial_cmp(&w[j]).expect("finite gradient"));
        let Some(j) = candidate else { break };
        passive[j] = true;
        let mut first = true;
        let mut changed = false;
        for _ in 0..(3 * n + 10) {
            let keep: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let sub = lstsq(&a.select_columns(&keep), b)?;
            let mut z = vec![T::zero(); n];
            for (k, &i) in keep.iter().enumerate() {
                z[i] = sub.x[k];
            }
            if keep.iter().all(|&i| z[i] > T::zero()) {
                x = z;
                changed = true;
                break;
            }
            if first && z[j] <= T::zero() {
                // the entering variable cannot move; try another one
                passive[j] = false;
                blocked[j] = true;
                break;
            }
            first = false;
            let mut alpha = T::one();
            for &i in &keep {
                if z[i] <= T::zero() {
                    let step = x[i] / (x[i] - z[i]);
                    if step < alpha {
                        alpha = step;
                    }
                }
            }
            for i in 0..n {
                x[i] = x[i] + alpha * (z[i] - x[i]);
            }
            for &i in &keep {
                if x[i] <= T::zero() || (z[i] <= T::zero() && x[i] <= tol) {
                    x[i] = T::zero();
                    passive[i] = false;
                }
            }
            changed = true;
        }
        if changed {
            blocked.iter_mut().for_each(|b| *b = false);
        }
    }
    for xi in x.iter_mut() {
        if *xi < T::zero() {
            *xi = T::zero();
        }
    }
    let (_, residual_norm) = residual(a, &x, b);
    Ok(NnlsSolution { x, residual_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn square_system() {
        let a = m(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let s = lstsq(&a, &[3.0, 5.0]).unwrap();
        assert_relative_eq!(s.x[0], 0.8, max_relative = 1e-12);
        assert_relative_eq!(s.x[1], 1.4, max_relative = 1e-12);
        assert_eq!(s.rank, 2);
    }

    #[test]
    fn rank_deficient_min_norm() {
        // two identical columns: min-norm splits the weight evenly
        let a = m(&[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]]);
        let s = lstsq(&a, &[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(s.rank, 1);
        assert_relative_eq!(s.x[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(s.x[1], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn underdetermined_min_norm() {
        let a = m(&[&[1.0, 1.0]]);
        let s = lstsq(&a, &[2.0]).unwrap();
        assert_relative_eq!(s.x[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(s.x[1], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn nnls_clamps_infeasible_direction() {
        // b = c0 - 0.5 c1 with independent columns
        let a = m(&[&[1.0, 0.2], &[0.5, 1.0], &[0.3, 0.1], &[0.9, 0.7]]);
        let b: Vec<f64> = (0..4).map(|r| a.get(r, 0) - 0.5 * a.get(r, 1)).collect();
        let s = nnls(&a, &b).unwrap();
        assert!(s.x.iter().all(|v| *v >= 0.0));
        assert_eq!(s.x[1], 0.0);
        assert!(s.residual_norm > 1e-3);
    }

    /// Best feasible solution over every support subset, via normal equations.
    fn brute_force(a: &Matrix<f64>, b: &[f64]) -> f64 {
        let n = a.cols();
        let mut best = super::norm(b);
        for mask in 1u32..(1 << n) {
            let keep: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let k = keep.len();
            let mut g = vec![vec![0.0; k + 1]; k];
            for (p, &i) in keep.iter().enumerate() {
                for (q, &j) in keep.iter().enumerate() {
                    g[p][q] = (0..a.rows()).map(|r| a.get(r, i) * a.get(r, j)).sum();
                }
                g[p][k] = (0..a.rows()).map(|r| a.get(r, i) * b[r]).sum();
            }
            // Gaussian elimination with partial pivoting
            let mut ok = true;
            for col in 0..k {
                let piv = (col..k)
                    .max_by(|&x, &y| g[x][col].abs().partial_cmp(&g[y][col].abs()).unwrap())
                    .unwrap();
                if g[piv][col].abs() < 1e-12 {
                    ok = false;
                    break;
                }
                g.swap(col, piv);
                for r in 0..k {
                    if r != col {
                        let f = g[r][col] / g[col][col];
                        #[allow(clippy::needless_range_loop)]
                        for c in col..=k {
                            g[r][c] -= f * g[col][c];
                        }
                    }
                }
            }
            if !ok {
                continue;
            }
            let z: Vec<f64> = (0..k).map(|p| g[p][k] / g[p][p]).collect();
            if z.iter().any(|v| *v < 0.0) {
                continue;
            }
            let mut x = vec![0.0; n];
            for (p, &i) in keep.iter().enumerate() {
                x[i] = z[p];
            }
            best = best.min(residual(a, &x, b).1);
        }
        best
    }

    proptest! {
        #[test]
        fn nnls_matches_brute_force(
            rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 4..9),
            b in prop::collection::vec(-5.0f64..5.0, 9),
        ) {
            let a = Matrix::from_rows(&rows).unwrap();
            let b = &b[..a.rows()];
            let s = nnls(&a, b).unwrap();
            prop_assert!(s.x.iter().all(|v| *v >= 0.0));
            let oracle = brute_force(&a, b);
            prop_assert!(s.residual_norm <= oracle + 1e-9 * (1.0 + oracle), "{} vs {}", s.residual_norm, oracle);
        }

        #[test]
        fn lstsq_residual_is_orthogonal(
            rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 3..8),
            b in prop::collection::vec(-5.0f64..5.0, 8),
        ) {
            let a = Matrix::from_rows(&rows).unwrap();
            let b = &b[..a.rows()];
            let s = lstsq(&a, b).unwrap();
            let (r, _) = residual(&a, &s.x, b);
            for c in 0..a.cols() {
                let g: f64 = (0..a.rows()).map(|k| a.get(k, c) * r[k]).sum();
                prop_assert!(g.abs() < 1e-9);
            }
        }
    }
}
