//! Dense complex matrices and the linear-algebra kernels used by the
//! compressor: SVD, Hermitian eigendecomposition, Kronecker products and
//! deterministic isometry completion.
//!
//! Matrices are stored row-major. Singular values and eigenvalues are
//! always returned sorted descending, with ties keeping the backend's
//! column order, so downstream Schmidt bases are deterministic.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqcError};

/// Relative threshold below which a singular value counts as zero.
pub const RANK_TOLERANCE: f64 = 1e-9;

/// Default cap on any matrix dimension produced by `kron`.
pub const DEFAULT_DIM_CAP: usize = 1 << 14;

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Build from row-major data, rejecting NaN/Inf entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(SqcError::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        for (i, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(SqcError::NonFinite { index: i });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Matrix with the listed columns of `self`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |r, c| self.get(r, cols[c]))
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(SqcError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(SqcError::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            out[r] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(SqcError::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm of `self† self − I`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.adjoint().mul(self).expect("dims agree");
        gram.sub(&Self::identity(self.cols))
            .expect("square")
            .frobenius_norm()
    }

    /// Frobenius norm of `self − self†` (zero for Hermitian matrices).
    pub fn hermiticity_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut sum = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                sum += (self.get(r, c) - self.get(c, r).conj()).norm_sqr();
            }
        }
        sum.sqrt()
    }
}

fn to_nalgebra(m: &ComplexMatrix) -> nalgebra::DMatrix<C64> {
    nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c))
}


/// Thin singular value decomposition `M = U Σ V†`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Left singular vectors as columns, `rows × min(rows, cols)`.
    pub u: ComplexMatrix,
    /// Singular values, sorted descending.
    pub singular_values: Vec<f64>,
    /// Conjugate-transposed right singular vectors, `min(rows, cols) × cols`.
    pub v_dagger: ComplexMatrix,
}

impl Svd {
    /// Number of singular values above `RANK_TOLERANCE` relative to the largest.
    pub fn numerical_rank(&self) -> usize {
        let max = self.singular_values.first().copied().unwrap_or(0.0);
        if max == 0.0 {
            return 0;
        }
        self.singular_values
            .iter()
            .filter(|&&s| s >= RANK_TOLERANCE * max)
            .count()
    }

    /// Reassemble `U Σ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let scaled = ComplexMatrix::from_fn(self.u.rows(), k, |r, c| {
            self.u.get(r, c) * C64::new(self.singular_values[c], 0.0)
        });
        scaled.mul(&self.v_dagger).expect("dims agree")
    }
}

const SVD_MAX_ITERATIONS: usize = 10_000;

/// Thin SVD with singular values sorted descending (stable under ties).
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    let na = to_nalgebra(m);
    let svd = nalgebra::SVD::try_new(na, true, true, f64::EPSILON, SVD_MAX_ITERATIONS)
        .ok_or(SqcError::SvdConvergence {
            iterations: SVD_MAX_ITERATIONS,
        })?;
    let u = svd.u.as_ref().expect("requested");
    let v_t = svd.v_t.as_ref().expect("requested");
    let k = svd.singular_values.len();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("finite")
            .then(a.cmp(&b))
    });
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = ComplexMatrix::from_fn(u.nrows(), k, |r, c| u[(r, order[c])]);
    let v_dagger = ComplexMatrix::from_fn(k, v_t.ncols(), |r, c| v_t[(order[r], c)]);
    Ok(Svd {
        u: u_sorted,
        singular_values,
        v_dagger,
    })
}

/// Tolerance on the symmetry defect accepted by [`hermitian_eig`].
pub const HERMITICITY_TOLERANCE: f64 = 1e-8;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues sorted descending and the matching unit eigenvectors
/// as columns. Inputs with symmetry defect above `HERMITICITY_TOLERANCE`
/// are rejected; below it, the Hermitian part `(H + H†)/2` is decomposed.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if h.rows() != h.cols() {
        return Err(SqcError::DimensionMismatch {
            expected: h.rows(),
            got: h.cols(),
        });
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITICITY_TOLERANCE {
        return Err(SqcError::NotHermitian { defect });
    }
    let n = h.rows();
    let sym = ComplexMatrix::from_fn(n, n, |r, c| {
        (h.get(r, c) + h.get(c, r).conj()) * C64::new(0.5, 0.0)
    });
    let eig = nalgebra::SymmetricEigen::new(to_nalgebra(&sym));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite")
            .then(a.cmp(&b))
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Kronecker product with the default dimension cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_cap(a, b, DEFAULT_DIM_CAP)
}

/// Kronecker product, rejecting results whose row or column count exceeds `cap`.
pub fn kron_with_cap(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows()).unwrap_or(usize::MAX);
    let cols = a.cols().checked_mul(b.cols()).unwrap_or(usize::MAX);
    if rows > cap || cols > cap {
        return Err(SqcError::DimensionCap {
            dim: rows.max(cols),
            cap,
        });
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows() {
        for ac in 0..a.cols() {
            let av = a.get(ar, ac);
            if av == C64::new(0.0, 0.0) {
                continue;
            }
            for br in 0..b.rows() {
                for bc in 0..b.cols() {
                    out.set(ar * b.rows() + br, ac * b.cols() + bc, av * b.get(br, bc));
                }
            }
        }
    }
    Ok(out)
}

/// Threshold below which a Gram-Schmidt candidate counts as linearly dependent.
const COMPLETION_TOLERANCE: f64 = 1e-8;

/// Extend a matrix with orthonormal columns to `target_cols` columns by
/// orthogonalizing canonical basis vectors against the existing columns in
/// index order. The completion is deterministic, so the behavior of every
/// unitary built from an isometry is reproducible.
pub fn complete_isometry(w: &ComplexMatrix, target_cols: usize) -> Result<ComplexMatrix> {
    let rows = w.rows();
    let start = w.cols();
    if target_cols < start || target_cols > rows {
        return Err(SqcError::DimensionMismatch {
            expected: target_cols,
            got: start,
        });
    }
    let gram_defect = {
        let gram = w.adjoint().mul(w)?;
        gram.sub(&ComplexMatrix::identity(start))?.frobenius_norm()
    };
    if gram_defect > 1e-10 {
        return Err(SqcError::RankDeficient {
            defect: gram_defect,
        });
    }

    let mut cols: Vec<Vec<C64>> = (0..start).map(|c| w.column(c)).collect();
    for e in 0..rows {
        if cols.len() == target_cols {
            break;
        }
        let mut v = vec![C64::new(0.0, 0.0); rows];
        v[e] = C64::new(1.0, 0.0);
        // Two orthogonalization passes keep the result unitary to ~1e-15.
        for _ in 0..2 {
            for c in cols.iter() {
                let overlap: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= overlap * ci;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > COMPLETION_TOLERANCE {
            for vi in v.iter_mut() {
                *vi /= C64::new(norm, 0.0);
            }
            cols.push(v);
        }
    }
    if cols.len() < target_cols {
        return Err(SqcError::RankDeficient { defect: 0.0 });
    }
    Ok(ComplexMatrix::from_fn(rows, target_cols, |r, c| cols[c][r]))
}
