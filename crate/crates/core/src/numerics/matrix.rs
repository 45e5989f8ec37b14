use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

/// A dense square matrix of dimension 1..=8, stored row-major in a fixed buffer.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: [f64; MAX_DIM * MAX_DIM],
}

impl SquareMatrix {
    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn new(dim: usize, entries: &[f64]) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Dimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::EntryCount { expected: dim * dim, got: entries.len() });
        }
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * MAX_DIM + j] = entries[i * dim + j];
            }
        }
        Ok(m)
    }

    /// Builds a matrix from rows; every row must have length `rows.len()`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Dimension(dim));
        }
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::EntryCount { expected: dim * dim, got: dim * (dim - 1) + row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                m.data[i * MAX_DIM + j] = v;
            }
        }
        Ok(m)
    }

    /// Integer rows, the usual way toral matrices are written down.
    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let float_rows: Vec<Vec<f64>> =
            rows.iter().map(|r| r.as_ref().iter().map(|&v| v as f64).collect()).collect();
        Self::from_rows(&float_rows)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Self { dim, data: [0.0; MAX_DIM * MAX_DIM] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * MAX_DIM + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() || values.len() > MAX_DIM {
            return Err(Error::Dimension(values.len()));
        }
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * MAX_DIM + i] = v;
        }
        Ok(m)
    }

    /// diag(a, b) as one block-diagonal matrix.
    pub fn block_diagonal(a: &Self, b: &Self) -> Result<Self> {
        let dim = a.dim + b.dim;
        if dim > MAX_DIM {
            return Err(Error::Dimension(dim));
        }
        let mut m = Self::zeros(dim);
        for i in 0..a.dim {
            for j in 0..a.dim {
                m.set(i, j, a.get(i, j));
            }
        }
        for i in 0..b.dim {
            for j in 0..b.dim {
                m.set(a.dim + i, a.dim + j, b.get(i, j));
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.dim && j < self.dim);
        self.data[i * MAX_DIM + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.dim && j < self.dim);
        self.data[i * MAX_DIM + j] = v;
    }

    /// Row-major entries, `dim * dim` of them.
    pub fn entries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            out.extend_from_slice(&self.data[i * MAX_DIM..i * MAX_DIM + self.dim]);
        }
        out
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.data[i * MAX_DIM..i * MAX_DIM + self.dim].to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Matrix product; panics on a dimension mismatch.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * MAX_DIM + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `self * v` for the first `dim` coordinates of `v`.
    #[inline]
    pub fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.dim {
            let mut s = 0.0;
            for j in 0..self.dim {
                s += self.data[i * MAX_DIM + j] * v[j];
            }
            out[i] = s;
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.data[i * MAX_DIM + j] *= c;
            }
        }
        out
    }

    /// True when every entry is an integer small enough to be exact in f64.
    pub fn is_integer(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let v = self.get(i, j);
                v.is_finite() && libm::trunc(v) == v && v.abs() < 9.007_199_254_740_992e15
            })
        })
    }

    fn integer_entries(&self) -> Option<[[i128; MAX_DIM]; MAX_DIM]> {
        if !self.is_integer() {
            return None;
        }
        let mut a = [[0i128; MAX_DIM]; MAX_DIM];
        for (i, row) in a.iter_mut().enumerate().take(self.dim) {
            for (j, v) in row.iter_mut().enumerate().take(self.dim) {
                *v = self.get(i, j) as i128;
            }
        }
        Some(a)
    }

    /// Exact integer determinant (fraction-free elimination), if the matrix is
    /// integral and no intermediate overflows.
    pub fn integer_determinant(&self) -> Option<i128> {
        let mut a = self.integer_entries()?;
        bareiss(&mut a, self.dim)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Adjugate (transposed cofactor matrix), exact for integer input.
    pub fn adjugate(&self) -> Self {
        let n = self.dim;
        let mut adj = Self::zeros(n);
        if n == 1 {
            adj.set(0, 0, 1.0);
            return adj;
        }
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(i, j);
                let c = determinant(&minor);
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                adj.set(j, i, sign * c);
            }
        }
        adj
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n - 1);
        let mut r = 0;
        for i in 0..n {
            if i == row {
                continue;
            }
            let mut c = 0;
            for j in 0..n {
                if j == col {
                    continue;
                }
                m.set(r, c, self.get(i, j));
                c += 1;
            }
            r += 1;
        }
        m
    }

    /// Inverse through the adjugate; `None` for a singular matrix.
    pub fn inverse(&self) -> Option<Self> {
        let det = determinant(self);
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(self.adjugate().scale(1.0 / det))
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

fn bareiss(a: &mut [[i128; MAX_DIM]; MAX_DIM], n: usize) -> Option<i128> {
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return Some(0);
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j].checked_mul(a[k][k])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = t / prev;
            }
        }
        prev = a[k][k];
    }
    Some(sign * a[n - 1][n - 1])
}

/// Determinant. Integer matrices are handled exactly by fraction-free
/// elimination in 128-bit arithmetic; other inputs use partial-pivot LU.
pub fn determinant(m: &SquareMatrix) -> f64 {
    if let Some(a) = m.integer_entries() {
        let mut work = a;
        if let Some(d) = bareiss(&mut work, m.dim) {
            return d as f64;
        }
    }
    lu_determinant(m)
}

fn lu_determinant(m: &SquareMatrix) -> f64 {
    let n = m.dim;
    let mut a = [[0.0f64; MAX_DIM]; MAX_DIM];
    for (i, row) in a.iter_mut().enumerate().take(n) {
        for (j, v) in row.iter_mut().enumerate().take(n) {
            *v = m.get(i, j);
        }
    }
    let mut det = 1.0;
    for k in 0..n {
        let mut p = k;
        for r in k + 1..n {
            if a[r][k].abs() > a[p][k].abs() {
                p = r;
            }
        }
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for r in k + 1..n {
            let factor = a[r][k] / a[k][k];
            for c in k + 1..n {
                a[r][c] -= factor * a[k][c];
            }
        }
    }
    det
}

/// Householder QR of a square matrix: returns (Q, R) with Q orthogonal and R
/// upper triangular. Diagonal signs of R are not normalised.
pub fn qr_decompose(m: &SquareMatrix) -> (SquareMatrix, SquareMatrix) {
    let n = m.dim;
    let mut r = m.clone();
    let mut q = SquareMatrix::identity(n);
    for k in 0..n.saturating_sub(1) {
        let mut norm = 0.0;
        for i in k..n {
            norm = libm::hypot(norm, r.get(i, k));
        }
        if norm == 0.0 {
            continue;
        }
        let alpha = if r.get(k, k) > 0.0 { -norm } else { norm };
        let mut v = [0.0f64; MAX_DIM];
        for i in k..n {
            v[i] = r.get(i, k);
        }
        v[k] -= alpha;
        let vnorm2: f64 = (k..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in 0..n {
            let s: f64 = (k..n).map(|i| v[i] * r.get(i, j)).sum::<f64>() * 2.0 / vnorm2;
            for i in k..n {
                let x = r.get(i, j) - s * v[i];
                r.set(i, j, x);
            }
        }
        for i in 0..n {
            let s: f64 = (k..n).map(|j| q.get(i, j) * v[j]).sum::<f64>() * 2.0 / vnorm2;
            for j in k..n {
                let x = q.get(i, j) - s * v[j];
                q.set(i, j, x);
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            r.set(i, j, 0.0);
        }
    }
    (q, r)
}
