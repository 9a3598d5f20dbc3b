//! Compressed sparse row complex matrices.
//!
//! Collective-spin operators are at most tridiagonal in the Dicke basis and
//! the cavity operators are bidiagonal in the Fock basis, so CSR keeps both
//! the N+1-dimensional atomic sector at large N and the tensor-product
//! space of the full model cheap to store and apply.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Square sparse matrix in CSR form with complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn zeros(dim: usize) -> Self {
        CsrMatrix {
            dim,
            row_ptr: vec![0; dim + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal_fn(dim, |_| Complex64::new(1.0, 0.0))
    }

    pub fn from_diagonal(values: &[Complex64]) -> Self {
        let dim = values.len();
        CsrMatrix {
            dim,
            row_ptr: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            values: values.to_vec(),
        }
    }

    pub fn from_diagonal_fn(dim: usize, f: impl Fn(usize) -> Complex64) -> Self {
        CsrMatrix {
            dim,
            row_ptr: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            values: (0..dim).map(f).collect(),
        }
    }

    /// Build from (row, col, value) triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, Complex64)]) -> Self {
        let mut sorted: Vec<(usize, usize, Complex64)> = triplets
            .iter()
            .copied()
            .inspect(|(r, c, _)| debug_assert!(*r < dim && *c < dim))
            .filter(|(_, _, v)| v.norm_sqr() != 0.0)
            .collect();
        sorted.sort_unstable_by_key(|t| (t.0, t.1));

        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(sorted.len());
        for (r, c, v) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|t| t.2.norm_sqr() != 0.0);

        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            dim,
            row_ptr,
            col_idx: merged.iter().map(|t| t.1).collect(),
            values: merged.iter().map(|t| t.2).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let (lo, hi) = (self.row_ptr[row], self.row_ptr[row + 1]);
        for k in lo..hi {
            if self.col_idx[k] == col {
                return self.values[k];
            }
        }
        Complex64::new(0.0, 0.0)
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    /// y = A x
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
    }

    /// y += scale * A x
    pub fn matvec_add_scaled(&self, x: &[Complex64], scale: Complex64, y: &mut [Complex64]) {
        for r in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] += scale * acc;
        }
    }

    /// B = A ρ for a dense row-major square matrix ρ.
    pub fn mul_dense(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        debug_assert_eq!(rho.len(), d * d);
        debug_assert_eq!(out.len(), d * d);
        out.fill(Complex64::new(0.0, 0.0));
        for r in 0..d {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let a = self.values[k];
                let c = self.col_idx[k];
                let src = &rho[c * d..(c + 1) * d];
                let dst = &mut out[r * d..(r + 1) * d];
                for (o, s) in dst.iter_mut().zip(src.iter()) {
                    *o += a * s;
                }
            }
        }
    }

    /// Tr(A ρ) for dense row-major ρ.
    pub fn trace_product_dense(&self, rho: &[Complex64]) -> Complex64 {
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..d {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * rho[self.col_idx[k] * d + r];
            }
        }
        acc
    }

    pub fn dagger(&self) -> CsrMatrix {
        let triplets: Vec<_> = self
            .iter_entries()
            .map(|(r, c, v)| (c, r, v.conj()))
            .collect();
        CsrMatrix::from_triplets(self.dim, &triplets)
    }

    pub fn scaled(&self, scale: Complex64) -> CsrMatrix {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= scale;
        }
        out
    }

    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        debug_assert_eq!(self.dim, other.dim);
        let mut triplets: Vec<_> = self.iter_entries().collect();
        triplets.extend(other.iter_entries());
        CsrMatrix::from_triplets(self.dim, &triplets)
    }

    /// C = A B with a dense accumulator row.
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut acc = vec![Complex64::new(0.0, 0.0); d];
        let mut touched: Vec<usize> = Vec::new();
        let mut triplets = Vec::new();
        for r in 0..d {
            touched.clear();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let a = self.values[k];
                let mid = self.col_idx[k];
                for k2 in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    let c = other.col_idx[k2];
                    if acc[c].norm_sqr() == 0.0 {
                        touched.push(c);
                    }
                    acc[c] += a * other.values[k2];
                }
            }
            for &c in &touched {
                if acc[c].norm_sqr() != 0.0 {
                    triplets.push((r, c, acc[c]));
                }
                acc[c] = Complex64::new(0.0, 0.0);
            }
        }
        CsrMatrix::from_triplets(d, &triplets)
    }

    /// Kronecker product; row index of the result is `a_row * b.dim + b_row`.
    pub fn kron(&self, other: &CsrMatrix) -> CsrMatrix {
        let dim = self.dim * other.dim;
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (ra, ca, va) in self.iter_entries() {
            for (rb, cb, vb) in other.iter_entries() {
                triplets.push((ra * other.dim + rb, ca * other.dim + cb, va * vb));
            }
        }
        CsrMatrix::from_triplets(dim, &triplets)
    }

    /// True when every stored entry sits on the main diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.iter_entries().all(|(r, c, _)| r == c)
    }

    /// Dense main diagonal.
    pub fn diagonal(&self) -> Vec<Complex64> {
        let mut d = vec![Complex64::new(0.0, 0.0); self.dim];
        for (r, c, v) in self.iter_entries() {
            if r == c {
                d[r] = v;
            }
        }
        d
    }

    /// Row-major dense copy (test and small-system use).
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for (r, c, v) in self.iter_entries() {
            out[r * self.dim + c] += v;
        }
        out
    }

    /// max_ij |A_ij - conj(A_ji)|
    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for (r, c, v) in self.iter_entries() {
            let diff = (v - self.get(c, r).conj()).norm();
            if diff > err {
                err = diff;
            }
        }
        err
    }

    /// max_ij |A_ij|
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Infinity-norm of the elementwise difference.
pub fn max_abs_diff(a: &CsrMatrix, b: &CsrMatrix) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    let mut err: f64 = 0.0;
    for (r, c, v) in a.iter_entries() {
        err = err.max((v - b.get(r, c)).norm());
    }
    for (r, c, v) in b.iter_entries() {
        err = err.max((a.get(r, c) - v).norm());
    }
    err
}
