//! Dense real matrices, a cyclic Jacobi eigensolver, and deterministic
//! pairwise summation. Everything here runs on desk-scale problems
//! (N ≤ a dozen rows), so the implementations favor reproducibility over
//! asymptotic speed.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// y = M x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    /// xᵀ M x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mx = self.matvec(x);
        x.iter().zip(&mx).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn max_offdiag_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    m = m.max(self[(i, j)].abs());
                }
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(u, lambda)` with rows of `u` the eigenvectors, eigenvalues
/// sorted ascending, and each row sign-normalized so that its first
/// largest-magnitude entry is positive. `u * m * uᵀ = diag(lambda)`.
///
/// Convergence: sweeps until every off-diagonal magnitude falls below
/// `1e-14 *` Frobenius norm of the input.
pub fn symmetric_eigen(m: &Matrix) -> Result<(Matrix, Vec<f64>)> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::invalid("eigen: matrix not square"));
    }
    let fro = m.frobenius_norm();
    if !m.is_symmetric(1e-12 * fro.max(1.0)) {
        return Err(Error::invalid("eigen: matrix not symmetric"));
    }

    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let threshold = 1e-14 * fro;

    // Cyclic sweeps over the upper triangle.
    for _sweep in 0..200 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[(i, j)].abs());
            }
        }
        if off <= threshold || n < 2 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= threshold * 1e-2 {
                    continue;
                }
                // Classic Jacobi rotation annihilating a[p][q].
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vpk = v[(p, k)];
                    let vqk = v[(q, k)];
                    v[(p, k)] = c * vpk - s * vqk;
                    v[(q, k)] = s * vpk + c * vqk;
                }
            }
        }
    }

    // Sort ascending by eigenvalue, then fix row signs.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());

    let mut u = Matrix::zeros(n, n);
    let mut lambda = vec![0.0; n];
    for (row, &k) in order.iter().enumerate() {
        lambda[row] = a[(k, k)];
        for col in 0..n {
            u[(row, col)] = v[(k, col)];
        }
        let mut imax = 0;
        let mut vmax = 0.0f64;
        for col in 0..n {
            if u[(row, col)].abs() > vmax {
                vmax = u[(row, col)].abs();
                imax = col;
            }
        }
        if u[(row, imax)] < 0.0 {
            for col in 0..n {
                u[(row, col)] = -u[(row, col)];
            }
        }
    }
    Ok((u, lambda))
}

/// Invert a square complex matrix by Gauss-Jordan elimination with partial
/// pivoting. Fails with `SingularMatrix` when a pivot falls below
/// `1e-13 * max |entry|`.
pub fn invert_complex(m: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(Error::invalid("invert: matrix not square"));
        }
    }
    let scale = m
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut a: Vec<Vec<Complex64>> = m.to_vec();
    let mut inv: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())
            .unwrap();
        let pivot = a[pivot_row][col];
        if pivot.norm() < 1e-13 * scale {
            return Err(Error::SingularMatrix { pivot: pivot.norm() });
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);

        let inv_pivot = 1.0 / pivot;
        for j in 0..n {
            a[col][j] *= inv_pivot;
            inv[col][j] *= inv_pivot;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = a[i][col];
            if factor.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                let acj = a[col][j];
                let icj = inv[col][j];
                a[i][j] -= factor * acj;
                inv[i][j] -= factor * icj;
            }
        }
    }
    Ok(inv)
}

/// Pairwise (fixed-topology tree) summation. The reduction tree depends only
/// on the slice length, never on thread count, so results are bit-stable.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        n if n <= 8 => values.iter().sum(),
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}
