//! Pure states and density matrices over qubit registers.
//!
//! Convention used everywhere in this crate: qubit 0 is the *most
//! significant* bit of the amplitude index, so for a 2-qubit register the
//! basis order is |00⟩, |01⟩, |10⟩, |11⟩ with the first bit belonging to
//! qubit 0.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqcError};
use crate::matrix::{hermitian_eig, ComplexMatrix};

/// Tolerance on the norm of a pure state and on density-matrix invariants.
pub const STATE_TOLERANCE: f64 = 1e-10;

/// Normalized pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Build from amplitudes; the length must be a power of two and the
    /// L2 norm must be 1 within `STATE_TOLERANCE`.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SqcError::NotPowerOfTwo { len });
        }
        for (i, z) in amplitudes.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(SqcError::NonFinite { index: i });
            }
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOLERANCE {
            return Err(SqcError::NotNormalized { norm });
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Build from real amplitudes after L2 normalization.
    pub fn from_real_normalized(values: &[f64]) -> Result<Self> {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(SqcError::NotNormalized { norm: 0.0 });
        }
        Self::new(values.iter().map(|v| C64::new(v / norm, 0.0)).collect())
    }

    /// Computational basis state |index⟩ of an `n`-qubit register.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes,
        }
    }

    /// Reduced density matrix over the qubits in `keep` (result qubit `j`
    /// corresponds to `keep[j]`), tracing out the rest. Computed directly
    /// from the amplitudes without materializing |ψ⟩⟨ψ|.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let maps = trace_index_maps(self.num_qubits, keep)?;
        let dim_keep = 1 << keep.len();
        let dim_rest = 1 << (self.num_qubits - keep.len());
        let mut entries = ComplexMatrix::zeros(dim_keep, dim_keep);
        for a in 0..dim_keep {
            for b in 0..dim_keep {
                let mut sum = C64::new(0.0, 0.0);
                for t in 0..dim_rest {
                    let ia = maps.assemble(a, t);
                    let ib = maps.assemble(b, t);
                    sum += self.amplitudes[ia] * self.amplitudes[ib].conj();
                }
                entries.set(a, b, sum);
            }
        }
        DensityMatrix::new(keep.len(), entries)
    }

    /// ⟨ψ|ρ|ψ⟩ as (real value, imaginary residual).
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<(f64, f64)> {
        if rho.dim() != self.dim() {
            return Err(SqcError::DimensionMismatch {
                expected: self.dim(),
                got: rho.dim(),
            });
        }
        let rv = rho.entries().matvec(&self.amplitudes)?;
        let val: C64 = self
            .amplitudes
            .iter()
            .zip(&rv)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok((val.re, val.im))
    }
}

/// Density matrix of an `n`-qubit register: Hermitian, unit trace.
///
/// Positive semidefiniteness is not enforced at construction (it needs an
/// eigendecomposition); call [`DensityMatrix::min_eigenvalue`] to audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(num_qubits: usize, entries: ComplexMatrix) -> Result<Self> {
        let dim = 1 << num_qubits;
        if entries.rows() != dim || entries.cols() != dim {
            return Err(SqcError::DimensionMismatch {
                expected: dim,
                got: entries.rows(),
            });
        }
        let defect = entries.hermiticity_defect();
        if defect > STATE_TOLERANCE {
            return Err(SqcError::NotHermitian { defect });
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > STATE_TOLERANCE || trace.im.abs() > STATE_TOLERANCE {
            return Err(SqcError::NotNormalized { norm: trace.re });
        }
        Ok(Self {
            num_qubits,
            entries,
        })
    }

    pub fn from_pure(state: &PureState) -> Self {
        let entries = ComplexMatrix::from_fn(state.dim(), state.dim(), |r, c| {
            state.amplitudes()[r] * state.amplitudes()[c].conj()
        });
        Self {
            num_qubits: state.num_qubits(),
            entries,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.entries
            .data()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
    }

    /// Smallest eigenvalue; values above `-1e-10` certify positive
    /// semidefiniteness at working precision.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = hermitian_eig(&self.entries)?;
        Ok(vals.last().copied().unwrap_or(0.0))
    }

    /// Eigenvalues descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.entries)?.0)
    }

    /// Unit eigenvector of the largest eigenvalue.
    pub fn top_eigenvector(&self) -> Result<PureState> {
        let (_, vecs) = hermitian_eig(&self.entries)?;
        let mut col = vecs.column(0);
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in col.iter_mut() {
            *z /= C64::new(norm, 0.0);
        }
        PureState::new(col)
    }

    /// Kronecker product with another density matrix (self on the more
    /// significant qubits).
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let entries = crate::matrix::kron(&self.entries, &other.entries)?;
        Self::new(self.num_qubits + other.num_qubits, entries)
    }
}

/// Partial trace keeping the qubits listed in `keep` (result qubit `j`
/// corresponds to `keep[j]`); the rest are traced out.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let maps = trace_index_maps(rho.num_qubits(), keep)?;
    let dim_keep = 1 << keep.len();
    let dim_rest = 1 << (rho.num_qubits() - keep.len());
    let mut entries = ComplexMatrix::zeros(dim_keep, dim_keep);
    for a in 0..dim_keep {
        for b in 0..dim_keep {
            let mut sum = C64::new(0.0, 0.0);
            for t in 0..dim_rest {
                sum += rho.entries().get(maps.assemble(a, t), maps.assemble(b, t));
            }
            entries.set(a, b, sum);
        }
    }
    DensityMatrix::new(keep.len(), entries)
}

/// Relabel qubits: qubit `i` of the input becomes qubit `perm[i]` of the
/// output. Amplitudes are moved bit-exactly, so composing with the inverse
/// permutation restores the input exactly.
pub fn permute_qubits(state: &PureState, perm: &[usize]) -> Result<PureState> {
    let n = state.num_qubits();
    validate_permutation(perm, n)?;
    let mut out = vec![C64::new(0.0, 0.0); state.dim()];
    for (x, amp) in state.amplitudes().iter().enumerate() {
        let mut y = 0usize;
        for (q, &target) in perm.iter().enumerate() {
            let bit = (x >> (n - 1 - q)) & 1;
            y |= bit << (n - 1 - target);
        }
        out[y] = *amp;
    }
    Ok(PureState {
        num_qubits: n,
        amplitudes: out,
    })
}

/// Inverse of a qubit permutation.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(SqcError::InvalidPermutation {
            reason: format!("length {} for {n} qubits", perm.len()),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(SqcError::InvalidPermutation {
                reason: format!("target {p} repeated or out of range"),
            });
        }
        seen[p] = true;
    }
    Ok(())
}

/// Bit-assembly helper for partial traces: splits a register into kept and
/// traced qubit positions.
struct TraceIndexMaps {
    keep_shifts: Vec<usize>,
    rest_shifts: Vec<usize>,
}

impl TraceIndexMaps {
    /// Full register index with the bits of `kept` at the kept positions
    /// (in `keep` order) and the bits of `rest` at the traced positions.
    #[inline]
    fn assemble(&self, kept: usize, rest: usize) -> usize {
        let mut idx = 0usize;
        for (j, &shift) in self.keep_shifts.iter().enumerate() {
            idx |= ((kept >> (self.keep_shifts.len() - 1 - j)) & 1) << shift;
        }
        for (j, &shift) in self.rest_shifts.iter().enumerate() {
            idx |= ((rest >> (self.rest_shifts.len() - 1 - j)) & 1) << shift;
        }
        idx
    }
}

fn trace_index_maps(num_qubits: usize, keep: &[usize]) -> Result<TraceIndexMaps> {
    if keep.is_empty() || keep.len() > num_qubits {
        return Err(SqcError::InvalidKeepSet);
    }
    let mut seen = vec![false; num_qubits];
    for &q in keep {
        if q >= num_qubits || seen[q] {
            return Err(SqcError::InvalidKeepSet);
        }
        seen[q] = true;
    }
    let keep_shifts = keep.iter().map(|&q| num_qubits - 1 - q).collect();
    let rest_shifts = (0..num_qubits)
        .filter(|q| !seen[*q])
        .map(|q| num_qubits - 1 - q)
        .collect();
    Ok(TraceIndexMaps {
        keep_shifts,
        rest_shifts,
    })
}
