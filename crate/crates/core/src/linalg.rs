//! Dense symmetric linear algebra: correlation matrices and a cyclic Jacobi
//! eigensolver.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::ingest::IndicatorTable;

/// Default relative off-diagonal tolerance for [`jacobi_eigen`].
pub const DEFAULT_JACOBI_TOL: f64 = 1e-12;
/// Sweep cap for [`jacobi_eigen`].
pub const MAX_SWEEPS: usize = 100;

/// Row-major dense matrix.
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
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// First `k` columns.
    pub fn leading_columns(&self, k: usize) -> Matrix {
        Matrix::from_fn(self.rows, k, |i, j| self[(i, j)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
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
        Ok(out)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// A square matrix whose entries are exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    inner: Matrix,
}

impl SymMatrix {
    /// Validates exact symmetry of a full square grid.
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows() != m.cols() || m.rows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "symmetric matrix must be square and non-empty, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        for i in 0..m.rows() {
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::InvalidArgument(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if m.data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("symmetric matrix entry".into()));
        }
        Ok(SymMatrix { inner: m })
    }

    /// Builds from the upper triangle (`i <= j`) of `f`, mirrored below.
    pub fn from_upper(order: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(order, order);
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix { inner: m }
    }

    pub fn order(&self) -> usize {
        self.inner.rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.order()).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Eigenvalues sorted descending with unit eigenvectors as matching columns.
///
/// Each eigenvector is sign-normalized so that its entry of largest absolute
/// value is positive (ties go to the lowest row index).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, j: usize) -> Vec<f64> {
        self.eigenvectors.column(j)
    }

    /// V · diag(λ) · Vᵀ.
    pub fn reconstruct(&self) -> Matrix {
        let p = self.order();
        let v = &self.eigenvectors;
        Matrix::from_fn(p, p, |i, j| {
            (0..p)
                .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)])
                .sum()
        })
    }
}

/// Sample correlation matrix of a standardized table.
///
/// Entry (i, j) is Σ z_i·z_j / (n − 1) over regions; the diagonal is set to
/// exactly 1.
pub fn correlation_matrix(table: &IndicatorTable) -> Result<SymMatrix> {
    if !table.is_standardized() {
        return Err(Error::NotStandardized);
    }
    let n = table.n_regions();
    let p = table.n_indicators();
    let columns = (0..p)
        .map(|j| table.column(j))
        .collect::<Result<Vec<_>>>()?;
    let denom = (n - 1) as f64;
    Ok(SymMatrix::from_upper(p, |i, j| {
        if i == j {
            1.0
        } else {
            columns[i]
                .iter()
                .zip(&columns[j])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / denom
        }
    }))
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Applies the rotation in the (p, q) plane that annihilates `a[p][q]`,
/// accumulating it into `v`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let n = a.rows();
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
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
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn normalize_sign(v: &mut Matrix, col: usize) {
    let mut best = 0;
    for i in 1..v.rows() {
        if v[(i, col)].abs() > v[(best, col)].abs() {
            best = i;
        }
    }
    if v[(best, col)] < 0.0 {
        for i in 0..v.rows() {
            v[(i, col)] = -v[(i, col)];
        }
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps visit every (p, q) pair with p < q in row order and stop once the
/// off-diagonal Frobenius norm drops to `tol` times the Frobenius norm of `m`.
/// Fails with [`Error::NoConvergence`] after [`MAX_SWEEPS`] sweeps.
pub fn jacobi_eigen(m: &SymMatrix, tol: f64) -> Result<EigenDecomposition> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = m.order();
    let mut a = m.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let threshold = tol * m.frobenius_norm();

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: exact ties keep the solver's output order
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let mut eigenvectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    for col in 0..n {
        normalize_sign(&mut eigenvectors, col);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}
