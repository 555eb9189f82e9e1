//! Complex sparse matrices and the dense routines built on nalgebra.
//!
//! Every operator in a lattice triple is either diagonal, a permutation, or
//! has a handful of entries per row, so the working representation is a
//! row-wise ordered map. Dense conversion is used only for eigenvalue and
//! singular value work.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type DenseMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square complex matrix stored as one ordered map per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<BTreeMap<usize, Complex64>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![BTreeMap::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.rows[i].insert(i, v);
        }
        m
    }

    pub fn from_triplets<I>(dim: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut m = Self::zeros(dim);
        for (i, j, v) in triplets {
            m.add_to(i, j, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored entries (explicit zeros included).
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i].get(&j).copied().unwrap_or(ZERO)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(
            i < self.dim && j < self.dim,
            "index ({i}, {j}) out of range"
        );
        self.rows[i].insert(j, v);
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(
            i < self.dim && j < self.dim,
            "index ({i}, {j}) out of range"
        );
        *self.rows[i].entry(j).or_insert(ZERO) += v;
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.rows[i].iter().map(|(&j, &v)| (j, v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(&j, &v)| (i, j, v)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn conj(&self) -> Self {
        self.map_entries(|_, _, v| v.conj())
    }

    /// Same sparsity pattern, entries replaced by `f(i, j, v)`.
    pub fn map_entries<F>(&self, f: F) -> Self
    where
        F: Fn(usize, usize, Complex64) -> Complex64,
    {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().map(|(&j, &v)| (j, f(i, j, v))).collect())
            .collect();
        Self {
            dim: self.dim,
            rows,
        }
    }

    /// `P A Pᵀ` for the permutation sending basis index `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim);
        Self::from_triplets(self.dim, self.iter().map(|(i, j, v)| (perm[i], perm[j], v)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_entries(|_, _, v| v * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (i, j, v) in other.iter() {
            out.add_to(i, j, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (i, j, v) in other.iter() {
            out.add_to(i, j, -v);
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zeros(self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            let acc = &mut out.rows[i];
            for (&k, &a) in row {
                for (&j, &b) in &other.rows[k] {
                    *acc.entry(j).or_insert(ZERO) += a * b;
                }
            }
        }
        out
    }

    /// `diag(d) · A`
    pub fn mul_diag_left(&self, d: &[Complex64]) -> Self {
        assert_eq!(d.len(), self.dim);
        self.map_entries(|i, _, v| d[i] * v)
    }

    /// `A · diag(d)`
    pub fn mul_diag_right(&self, d: &[Complex64]) -> Self {
        assert_eq!(d.len(), self.dim);
        self.map_entries(|_, j, v| v * d[j])
    }

    /// `[A, diag(d)] = A·diag(d) − diag(d)·A`, entrywise `A_ij (d_j − d_i)`.
    pub fn commutator_with_diagonal(&self, d: &[Complex64]) -> Self {
        assert_eq!(d.len(), self.dim);
        self.map_entries(|i, j, v| v * d[j] - d[i] * v)
    }

    /// `max |[A, diag(d)]_ij|` without materializing the commutator.
    pub fn max_abs_commutator_with_diagonal(&self, d: &[Complex64]) -> f64 {
        assert_eq!(d.len(), self.dim);
        self.iter()
            .map(|(i, j, v)| (v * d[j] - d[i] * v).norm())
            .fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.matmul(other).add(&other.matmul(self))
    }

    /// Kronecker product with factor-major indexing `i₁·d₂ + i₂`.
    pub fn kron(&self, other: &Self) -> Self {
        let d2 = other.dim;
        let mut out = Self::zeros(self.dim * d2);
        for (i1, j1, a) in self.iter() {
            for (i2, j2, b) in other.iter() {
                out.rows[i1 * d2 + i2].insert(j1 * d2 + j2, a * b);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        self.rows
            .iter()
            .map(|r| r.iter().map(|(&j, &a)| a * v[j]).sum())
            .collect()
    }

    /// Largest entry modulus, zero for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    /// Dense restriction to rows and columns `idx`, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> DenseMatrix {
        DenseMatrix::from_fn(idx.len(), idx.len(), |r, c| self.get(idx[r], idx[c]))
    }
}

/// Kronecker product of dense matrices, factor-major.
pub fn dense_kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.kronecker(b)
}

pub fn max_abs_dense(m: &DenseMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Sorted eigenvalues of a hermitian matrix.
pub fn hermitian_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Singular values in descending order.
pub fn singular_values(m: &DenseMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Orthonormal basis of the right null space: right singular vectors whose
/// singular value is at most `tol`.
pub fn null_space(m: &DenseMatrix, tol: f64) -> Vec<Vec<Complex64>> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol)
        .map(|(k, _)| v_t.row(k).iter().map(|z| z.conj()).collect())
        .collect()
}

pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}
