use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Square complex sparse matrix in compressed-row form.
///
/// Entries are canonical: column indices strictly increase within a row and
/// no stored value is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseOperator {
    /// Build from coordinate entries; duplicates are summed, zeros dropped.
    ///
    /// Panics if an index is out of range.
    pub fn from_triplets(dim: usize, mut trips: Vec<(usize, usize, C64)>) -> Self {
        trips.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(trips.len());
        let mut values: Vec<C64> = Vec::with_capacity(trips.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(trips.len());
        for (r, c, v) in trips {
            assert!(r < dim && c < dim, "entry ({r}, {c}) out of range for dim {dim}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                rows.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_c = Vec::with_capacity(col_idx.len());
        let mut keep_v = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(col_idx).zip(values) {
            if v != C64::new(0.0, 0.0) {
                row_ptr[r + 1] += 1;
                keep_c.push(c);
                keep_v.push(v);
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self { dim, row_ptr, col_idx: keep_c, values: keep_v }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, C64::new(1.0, 0.0))).collect())
    }

    /// Diagonal operator.
    pub fn diagonal(values: &[C64]) -> Self {
        Self::from_triplets(values.len(), values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    /// Sparse copy of a dense matrix, dropping entries with `|v| <= tol`.
    pub fn from_dense(m: &DMatrix<C64>, tol: f64) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operators are square");
        let mut trips = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)].norm() > tol {
                    trips.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), trips)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Entries `(col, value)` of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    /// All entries `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    /// Entry `(r, c)`, zero if not stored.
    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    /// `Σ_i c_i O_i` over operators of a common dimension.
    pub fn linear_combination(dim: usize, terms: &[(C64, &SparseOperator)]) -> Result<Self> {
        let mut trips = Vec::new();
        for (coef, op) in terms {
            if op.dim != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: op.dim });
            }
            trips.extend(op.entries().map(|(r, c, v)| (r, c, *coef * v)));
        }
        Ok(Self::from_triplets(dim, trips))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::linear_combination(self.dim, &[(C64::new(1.0, 0.0), self), (C64::new(1.0, 0.0), other)])
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::linear_combination(self.dim, &[(C64::new(1.0, 0.0), self), (C64::new(-1.0, 0.0), other)])
    }

    pub fn scale(&self, s: C64) -> Self {
        if s == C64::new(0.0, 0.0) {
            return Self::zeros(self.dim);
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut acc = vec![C64::new(0.0, 0.0); n];
        let mut mark = vec![usize::MAX; n];
        let mut cols = Vec::new();
        let mut trips = Vec::new();
        for r in 0..n {
            cols.clear();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = C64::new(0.0, 0.0);
                        cols.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &cols {
                trips.push((r, c, acc[c]));
            }
        }
        Ok(Self::from_triplets(n, trips))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (c, r, v.conj())).collect())
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        (0..self.dim).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Largest entrywise difference `max |A_ij − B_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.values.iter().map(|v| v.norm()).fold(0.0, f64::max))
    }

    /// `max |A − A†|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint()).unwrap_or(f64::INFINITY)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Compress rows and columns onto the index set `keep` (in that order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> DMatrix<C64> {
        let mut col_pos = vec![usize::MAX; self.dim];
        for (p, &c) in cols.iter().enumerate() {
            col_pos[c] = p;
        }
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for (pr, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                if col_pos[c] != usize::MAX {
                    m[(pr, col_pos[c])] = v;
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn canonicalization_merges_and_drops() {
        let op = SparseOperator::from_triplets(
            3,
            vec![(2, 0, c(1.0, 0.0)), (0, 1, c(2.0, 0.0)), (2, 0, c(0.5, 1.0)), (1, 1, c(1.0, 0.0)), (1, 1, c(-1.0, 0.0))],
        );
        assert_eq!(op.nnz(), 2);
        assert_eq!(op.get(2, 0), c(1.5, 1.0));
        assert_eq!(op.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn dense_round_trip_and_algebra() {
        let a = SparseOperator::from_triplets(3, vec![(0, 1, c(1.0, 2.0)), (2, 2, c(-1.0, 0.0)), (1, 0, c(0.0, 1.0))]);
        let b = SparseOperator::from_triplets(3, vec![(1, 2, c(3.0, 0.0)), (0, 0, c(1.0, -1.0))]);
        let ad = a.to_dense();
        let bd = b.to_dense();
        assert_eq!(SparseOperator::from_dense(&ad, 0.0), a);
        assert!((a.mul(&b).unwrap().to_dense() - &ad * &bd).norm() < 1e-14);
        assert!((a.add(&b).unwrap().to_dense() - (&ad + &bd)).norm() < 1e-14);
        assert!((a.adjoint().to_dense() - ad.adjoint()).norm() < 1e-14);
        assert!((a.scale(c(0.0, 2.0)).to_dense() - ad.map(|v| v * c(0.0, 2.0))).norm() < 1e-14);
        let x = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)];
        let y = a.apply(&x);
        let yd = &ad * nalgebra::DVector::from_vec(x);
        for i in 0..3 {
            assert!((y[i] - yd[i]).norm() < 1e-14);
        }
        assert_eq!(a.scale(c(0.0, 0.0)).nnz(), 0);
        assert!(a.add(&SparseOperator::zeros(4)).is_err());
    }

    #[test]
    fn submatrix_extracts_block() {
        let a = SparseOperator::from_triplets(4, vec![(0, 3, c(1.0, 0.0)), (2, 1, c(2.0, 0.0))]);
        let m = a.submatrix(&[0, 2], &[1, 3]);
        assert_eq!(m[(0, 1)], c(1.0, 0.0));
        assert_eq!(m[(1, 0)], c(2.0, 0.0));
    }
}
