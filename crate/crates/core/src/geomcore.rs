//! Small dense linear algebra: matrices, metric Gram–Schmidt, a Jacobi
//! eigensolver for symmetric matrices, and least squares.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("rank deficient input: column {column} has residual norm {residual:e} (scale {scale:e})")]
    RankDeficient {
        column: usize,
        residual: f64,
        scale: f64,
    },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
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

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<f64>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            m.set_col(j, col);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `uᵀ · self · v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        let mv = self.mul_vec(v);
        u.iter().zip(&mv).map(|(a, b)| a * b).sum()
    }

    /// Extracts rows and columns listed in `idx`.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn scaled(&self, k: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    /// Determinant by partial-pivot elimination.
    pub fn determinant(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[(x, k)].abs().total_cmp(&a[(y, k)].abs()))
                .unwrap_or(k);
            if a[(p, k)] == 0.0 {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                }
                det = -det;
            }
            det *= a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        det
    }

    /// Inverse of a symmetric positive definite matrix via Cholesky.
    pub fn spd_inverse(&self) -> Result<Matrix, GeomError> {
        if !self.is_square() {
            return Err(GeomError::Dimension("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return Err(GeomError::NotPositiveDefinite);
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        let mut inv = Matrix::zeros(n, n);
        for c in 0..n {
            // forward then backward substitution on unit vector c
            let mut y = vec![0.0; n];
            for i in 0..n {
                let mut s = if i == c { 1.0 } else { 0.0 };
                for k in 0..i {
                    s -= l[(i, k)] * y[k];
                }
                y[i] = s / l[(i, i)];
            }
            let mut x = vec![0.0; n];
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in i + 1..n {
                    s -= l[(k, i)] * x[k];
                }
                x[i] = s / l[(i, i)];
            }
            inv.set_col(c, &x);
        }
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                inv[(i, j)] = v;
                inv[(j, i)] = v;
            }
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Columns of `vectors` are orthonormal under `metric`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub vectors: Matrix,
    pub metric: Matrix,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.vectors.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.cols() == 0
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.vectors.col(j)
    }

    /// max |Vᵀ M V − I|.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = &(&self.vectors.transpose() * &self.metric) * &self.vectors;
        gram.max_abs_diff(&Matrix::identity(self.len()))
    }
}

const RANK_TOL: f64 = 1e-12;

/// Modified Gram–Schmidt with one reorthogonalization pass under `metric`.
///
/// The metric only needs to be positive on the span of the input columns;
/// an indefinite (e.g. Lorentzian) metric is accepted as long as every pivot
/// stays positive.
pub fn gram_schmidt(vectors: &Matrix, metric: &Matrix) -> Result<Frame, GeomError> {
    let dim = vectors.rows();
    if metric.rows() != dim || metric.cols() != dim {
        return Err(GeomError::Dimension(format!(
            "metric is {}x{} but vectors have {} rows",
            metric.rows(),
            metric.cols(),
            dim
        )));
    }
    let asym = metric.asymmetry();
    if asym > 1e-12 * (1.0 + metric.max_abs()) {
        return Err(GeomError::NotSymmetric(asym));
    }
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.cols());
    for k in 0..vectors.cols() {
        let mut v = vectors.col(k);
        let scale = metric.bilinear(&v, &v).abs().sqrt();
        for _pass in 0..2 {
            for q in &out {
                let p = metric.bilinear(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
            }
        }
        let nrm2 = metric.bilinear(&v, &v);
        let nrm = nrm2.max(0.0).sqrt();
        if !(nrm2 > 0.0) || nrm < RANK_TOL * scale || scale == 0.0 {
            return Err(GeomError::RankDeficient {
                column: k,
                residual: nrm,
                scale,
            });
        }
        v.iter_mut().for_each(|x| *x /= nrm);
        out.push(v);
    }
    let mut m = Matrix::zeros(dim, out.len());
    for (j, v) in out.iter().enumerate() {
        m.set_col(j, v);
    }
    Ok(Frame {
        vectors: m,
        metric: metric.clone(),
    })
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns.
pub fn sym_eigen(m: &Matrix) -> Result<(Vec<f64>, Matrix), GeomError> {
    if !m.is_square() {
        return Err(GeomError::Dimension("eigen-decomposition of non-square matrix".into()));
    }
    let asym = m.asymmetry();
    if asym > 1e-12 * (1.0 + m.max_abs()) {
        return Err(GeomError::NotSymmetric(asym));
    }
    let n = m.rows();
    let mut a = m.clone();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let mut v = Matrix::identity(n);
    let norm = a.frobenius();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= 1e-17 * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
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
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Least-squares solution of `a · x ≈ b` through a thin QR factorization.
pub fn least_squares(a: &Matrix, b: &[f64]) -> Result<Vec<f64>, GeomError> {
    if b.len() != a.rows() {
        return Err(GeomError::Dimension("right-hand side length".into()));
    }
    let q = gram_schmidt(a, &Matrix::identity(a.rows()))?.vectors;
    let r = &q.transpose() * a;
    let qtb = q.transpose().mul_vec(b);
    let n = a.cols();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = qtb[i];
        for k in i + 1..n {
            s -= r[(i, k)] * x[k];
        }
        x[i] = s / r[(i, i)];
    }
    Ok(x)
}
