//! The Schmidt compressor: a deterministic unitary built from a typical
//! state that disentangles a register into a latent block and a trash
//! block, plus the simulated compress/decompress roundtrip with
//! configurable reference-state policies.
//!
//! The compressor is `C = (∏ CNOTᵢ) (U ⊗ V*)⁻¹ P`, where `U`, `V` come
//! from the Schmidt decomposition of the typical state, the CNOT layer
//! pairs the entangled qubits of the two blocks, and `P` relabels qubits
//! so block A occupies the leading positions. Acting on the typical state
//! itself, `C` yields the Schmidt spectrum on block A and |0…0⟩ on block
//! B, so the roundtrip is lossless there; nearby states reconstruct with
//! fidelity set by their overlap with the typical state.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqcError};
use crate::matrix::{complete_isometry, kron, ComplexMatrix};
use crate::schmidt::{schmidt_decompose, Bipartition, SchmidtForm};
use crate::state::{DensityMatrix, PureState};

/// Largest register for which the compressor matrix is materialized densely.
pub const MAX_DENSE_QUBITS: usize = 12;

/// How the reference state injected into the trash register is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferencePolicy {
    /// |0…0⟩⟨0…0| on the trash block.
    Zero,
    /// Top eigenvector of the full trash state (optimization 1).
    TopEigenvector,
    /// Tensor product of per-qubit top eigenvectors (optimization 2).
    PerQubitEigenvector,
}

impl std::str::FromStr for ReferencePolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "zero" => Ok(Self::Zero),
            "opt1" => Ok(Self::TopEigenvector),
            "opt2" => Ok(Self::PerQubitEigenvector),
            other => Err(format!("unknown policy '{other}' (expected zero|opt1|opt2)")),
        }
    }
}

impl std::fmt::Display for ReferencePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Zero => "zero",
            Self::TopEigenvector => "opt1",
            Self::PerQubitEigenvector => "opt2",
        })
    }
}

/// Whether trash-state tomography is analytic or sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TomographyMode {
    Exact,
    /// Per-qubit Pauli expectations estimated from binomial counts.
    Shots { shots: u64, seed: u64 },
}

/// Outcome of one compress/decompress roundtrip.
#[derive(Debug, Clone)]
pub struct RoundtripResult {
    /// Latent state Tr_B(C ρ C†).
    pub rho_l: DensityMatrix,
    /// Trash state Tr_A(C ρ C†).
    pub rho_t: DensityMatrix,
    /// Reconstructed state C†(ρ_l ⊗ ρ_ref)C.
    pub rho_f: DensityMatrix,
    /// ⟨x|ρ_f|x⟩, clamped to [0, 1] for reporting.
    pub fidelity: f64,
}

/// The compressor built from a typical state and a bipartition.
#[derive(Debug, Clone)]
pub struct CompressorModel {
    typical_state: PureState,
    bipartition: Bipartition,
    schmidt: SchmidtForm,
    /// Completed U†, acting on block A.
    u_inv: ComplexMatrix,
    /// Completed (V*)† = Vᵀ, acting on block B.
    v_inv: ComplexMatrix,
    /// Entangling pairs as (control qubit in A, target qubit in B),
    /// using the original qubit labels.
    cnot_pairs: Vec<(usize, usize)>,
    full_matrix_c: ComplexMatrix,
}

impl CompressorModel {
    /// Build the compressor from a typical state (Schmidt-decompose,
    /// complete the isometries deterministically, lay down the CNOT pairs,
    /// and cache the dense circuit matrix).
    pub fn build(typical: &PureState, part: &Bipartition) -> Result<Self> {
        let n = typical.num_qubits();
        if part.num_qubits() != n {
            return Err(SqcError::InvalidBipartition {
                reason: format!("bipartition for {} qubits, state has {n}", part.num_qubits()),
            });
        }
        if n > MAX_DENSE_QUBITS {
            return Err(SqcError::DimensionCap {
                dim: 1 << n,
                cap: 1 << MAX_DENSE_QUBITS,
            });
        }
        let schmidt = schmidt_decompose(typical, part)?;
        let (n_a, n_b, m) = (part.n_a(), part.n_b(), schmidt.measure);

        let u_full = complete_isometry(&schmidt.u, 1 << n_a)?;
        let v_star_full = complete_isometry(&schmidt.v.conj(), 1 << n_b)?;
        let u_inv = u_full.adjoint();
        let v_inv = v_star_full.adjoint();

        // Pair the least significant m qubits of each block; those carry
        // the binary index of the Schmidt modes.
        let cnot_pairs: Vec<(usize, usize)> = (0..m)
            .map(|t| {
                (
                    part.block_a()[n_a - m + t],
                    part.block_b()[n_b - m + t],
                )
            })
            .collect();

        let full_matrix_c = assemble_circuit(&u_inv, &v_inv, part, m)?;
        Ok(Self {
            typical_state: typical.clone(),
            bipartition: part.clone(),
            schmidt,
            u_inv,
            v_inv,
            cnot_pairs,
            full_matrix_c,
        })
    }

    pub fn typical_state(&self) -> &PureState {
        &self.typical_state
    }

    pub fn bipartition(&self) -> &Bipartition {
        &self.bipartition
    }

    pub fn schmidt(&self) -> &SchmidtForm {
        &self.schmidt
    }

    pub fn u_inv(&self) -> &ComplexMatrix {
        &self.u_inv
    }

    pub fn v_inv(&self) -> &ComplexMatrix {
        &self.v_inv
    }

    pub fn cnot_pairs(&self) -> &[(usize, usize)] {
        &self.cnot_pairs
    }

    /// The dense 2ⁿ × 2ⁿ compressor matrix (including the block
    /// relabeling), mapping original-register states to canonical
    /// latent-then-trash ordering.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.full_matrix_c
    }

    pub fn num_qubits(&self) -> usize {
        self.typical_state.num_qubits()
    }

    /// C|x⟩ in canonical block ordering.
    pub fn apply(&self, input: &PureState) -> Result<PureState> {
        if input.num_qubits() != self.num_qubits() {
            return Err(SqcError::DimensionMismatch {
                expected: self.num_qubits(),
                got: input.num_qubits(),
            });
        }
        let amps = self.full_matrix_c.matvec(input.amplitudes())?;
        PureState::new(amps)
    }

    /// Compress: returns (latent state ρ_l, trash state ρ_t).
    pub fn compress(&self, input: &PureState) -> Result<(DensityMatrix, DensityMatrix)> {
        let compressed = self.apply(input)?;
        let n_a = self.bipartition.n_a();
        let n = self.num_qubits();
        let latent: Vec<usize> = (0..n_a).collect();
        let trash: Vec<usize> = (n_a..n).collect();
        Ok((
            compressed.reduced_density(&latent)?,
            compressed.reduced_density(&trash)?,
        ))
    }

    /// Full roundtrip with analytic (exact) tomography for the
    /// eigenvector-based policies.
    pub fn roundtrip(&self, input: &PureState, policy: ReferencePolicy) -> Result<RoundtripResult> {
        self.roundtrip_with_tomography(input, policy, TomographyMode::Exact)
    }

    /// Full roundtrip; `mode` controls how the trash state feeding the
    /// eigenvector policies is estimated.
    pub fn roundtrip_with_tomography(
        &self,
        input: &PureState,
        policy: ReferencePolicy,
        mode: TomographyMode,
    ) -> Result<RoundtripResult> {
        let compressed = self.apply(input)?;
        let n_a = self.bipartition.n_a();
        let n = self.num_qubits();
        let rho_l = compressed.reduced_density(&(0..n_a).collect::<Vec<_>>())?;
        let rho_t = compressed.reduced_density(&(n_a..n).collect::<Vec<_>>())?;
        let rho_ref = self.reference_state(&compressed, &rho_t, policy, mode)?;

        let assembled = rho_l.tensor(&rho_ref)?;
        let (fid_re, fid_im) = compressed.expectation(&assembled)?;
        assert!(
            fid_im.abs() <= 1e-10,
            "imaginary fidelity residual {fid_im:e}"
        );
        assert!(
            (-1e-10..=1.0 + 1e-10).contains(&fid_re),
            "fidelity {fid_re} outside [0,1] tolerance"
        );
        let c_dag = self.full_matrix_c.adjoint();
        let rho_f_entries = c_dag
            .mul(assembled.entries())?
            .mul(&self.full_matrix_c)?;
        let rho_f = DensityMatrix::new(n, rho_f_entries)?;
        Ok(RoundtripResult {
            rho_l,
            rho_t,
            rho_f,
            fidelity: fid_re.clamp(0.0, 1.0),
        })
    }

    fn reference_state(
        &self,
        compressed: &PureState,
        rho_t_exact: &DensityMatrix,
        policy: ReferencePolicy,
        mode: TomographyMode,
    ) -> Result<DensityMatrix> {
        let n_b = self.bipartition.n_b();
        match policy {
            ReferencePolicy::Zero => {
                Ok(DensityMatrix::from_pure(&PureState::basis_state(n_b, 0)))
            }
            ReferencePolicy::TopEigenvector => {
                let rho_t = match mode {
                    TomographyMode::Exact => rho_t_exact.clone(),
                    TomographyMode::Shots { .. } => {
                        self.trash_tomography_from(compressed, mode)?.0
                    }
                };
                Ok(DensityMatrix::from_pure(&rho_t.top_eigenvector()?))
            }
            ReferencePolicy::PerQubitEigenvector => {
                let per_qubit = match mode {
                    TomographyMode::Exact => single_qubit_reductions(rho_t_exact)?,
                    TomographyMode::Shots { .. } => {
                        self.trash_tomography_from(compressed, mode)?.1
                    }
                };
                let mut reference = DensityMatrix::from_pure(&per_qubit[0].top_eigenvector()?);
                for rho_q in &per_qubit[1..] {
                    reference = reference.tensor(&DensityMatrix::from_pure(
                        &rho_q.top_eigenvector()?,
                    ))?;
                }
                Ok(reference)
            }
        }
    }

    /// Tomography of the trash register for a given input: the full trash
    /// state plus its single-qubit reductions, in block-B qubit order.
    ///
    /// In exact mode both come from partial traces. In shot mode each
    /// qubit's Pauli expectations ⟨X⟩, ⟨Y⟩, ⟨Z⟩ are estimated from
    /// binomial counts and the reconstructed 2×2 matrix is projected back
    /// to a physical state (negative eigenvalues clipped, trace
    /// renormalized); the full-register estimate is then the tensor
    /// product of the per-qubit estimates, which carries no inter-qubit
    /// correlations.
    pub fn tomography_trash(
        &self,
        input: &PureState,
        mode: TomographyMode,
    ) -> Result<(DensityMatrix, Vec<DensityMatrix>)> {
        let compressed = self.apply(input)?;
        self.trash_tomography_from(&compressed, mode)
    }

    fn trash_tomography_from(
        &self,
        compressed: &PureState,
        mode: TomographyMode,
    ) -> Result<(DensityMatrix, Vec<DensityMatrix>)> {
        let n_a = self.bipartition.n_a();
        let n = self.num_qubits();
        let rho_t = compressed.reduced_density(&(n_a..n).collect::<Vec<_>>())?;
        match mode {
            TomographyMode::Exact => {
                let per_qubit = single_qubit_reductions(&rho_t)?;
                Ok((rho_t, per_qubit))
            }
            TomographyMode::Shots { shots, seed } => {
                if shots == 0 {
                    return Err(SqcError::ZeroShots);
                }
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let exact = single_qubit_reductions(&rho_t)?;
                let estimates: Vec<DensityMatrix> = exact
                    .iter()
                    .map(|rho_q| sample_single_qubit(rho_q, shots, &mut rng))
                    .collect::<Result<_>>()?;
                let mut full = estimates[0].clone();
                for est in &estimates[1..] {
                    full = full.tensor(est)?;
                }
                Ok((full, estimates))
            }
        }
    }

    /// Serialize the model (plus a chosen default policy) as JSON. All
    /// complex entries round-trip exactly at binary64 precision.
    pub fn to_json(&self, policy: ReferencePolicy) -> Result<String> {
        let saved = SavedCompressor {
            format: FORMAT_TAG.to_string(),
            num_qubits: self.num_qubits(),
            bipartition: self.bipartition.clone(),
            typical_state: self.typical_state.clone(),
            lambdas: self.schmidt.lambdas.clone(),
            measure: self.schmidt.measure,
            rank: self.schmidt.rank,
            u_inv: self.u_inv.clone(),
            v_inv: self.v_inv.clone(),
            cnot_pairs: self.cnot_pairs.clone(),
            policy,
        };
        Ok(serde_json::to_string_pretty(&saved)?)
    }

    /// Deserialize a model written by [`CompressorModel::to_json`],
    /// rebuilding the cached circuit matrix and validating unitarity.
    pub fn from_json(text: &str) -> Result<(Self, ReferencePolicy)> {
        let saved: SavedCompressor = serde_json::from_str(text)?;
        let part = saved.bipartition;
        let keep = 1 << saved.measure;
        let cols: Vec<usize> = (0..keep).collect();
        let u = saved.u_inv.adjoint().select_columns(&cols);
        let v = saved.v_inv.adjoint().conj().select_columns(&cols);
        let schmidt = SchmidtForm {
            u,
            v,
            lambdas: saved.lambdas,
            rank: saved.rank,
            measure: saved.measure,
            bipartition: part.clone(),
        };
        let full_matrix_c = assemble_circuit(&saved.u_inv, &saved.v_inv, &part, saved.measure)?;
        if full_matrix_c.unitarity_defect() > 1e-10 {
            return Err(SqcError::RankDeficient {
                defect: full_matrix_c.unitarity_defect(),
            });
        }
        let model = Self {
            typical_state: saved.typical_state,
            bipartition: part,
            schmidt,
            u_inv: saved.u_inv,
            v_inv: saved.v_inv,
            cnot_pairs: saved.cnot_pairs,
            full_matrix_c,
        };
        Ok((model, saved.policy))
    }
}

const FORMAT_TAG: &str = "sqc-compressor-v1";

#[derive(Serialize, Deserialize)]
struct SavedCompressor {
    format: String,
    num_qubits: usize,
    bipartition: Bipartition,
    typical_state: PureState,
    lambdas: Vec<f64>,
    measure: usize,
    rank: usize,
    u_inv: ComplexMatrix,
    v_inv: ComplexMatrix,
    cnot_pairs: Vec<(usize, usize)>,
    policy: ReferencePolicy,
}

/// Index image of the CNOT layer in canonical ordering: the low m bits of
/// the A block are XORed into the low m bits of the B block.
#[inline]
fn cnot_image(index: usize, n_b: usize, m: usize) -> usize {
    let a = index >> n_b;
    let b = index & ((1 << n_b) - 1);
    let mask = (1 << m) - 1;
    (a << n_b) | (b ^ (a & mask))
}

/// C = K · (u_inv ⊗ v_inv) · P assembled without multiplying permutation
/// matrices: K and P act as index maps on rows and columns.
fn assemble_circuit(
    u_inv: &ComplexMatrix,
    v_inv: &ComplexMatrix,
    part: &Bipartition,
    m: usize,
) -> Result<ComplexMatrix> {
    let (n_a, n_b) = (part.n_a(), part.n_b());
    let n = n_a + n_b;
    let local = kron(u_inv, v_inv)?;
    let perm = part.canonical_permutation();
    let mut col_map = vec![0usize; 1 << n];
    for (j, slot) in col_map.iter_mut().enumerate() {
        let mut p = 0usize;
        for (q, &target) in perm.iter().enumerate() {
            p |= ((j >> (n - 1 - q)) & 1) << (n - 1 - target);
        }
        *slot = p;
    }
    Ok(ComplexMatrix::from_fn(1 << n, 1 << n, |r, c| {
        local.get(cnot_image(r, n_b, m), col_map[c])
    }))
}

/// Single-qubit reductions of a trash-register state, in block order.
pub fn single_qubit_reductions(rho: &DensityMatrix) -> Result<Vec<DensityMatrix>> {
    (0..rho.num_qubits())
        .map(|q| crate::state::partial_trace(rho, &[q]))
        .collect()
}

fn sample_single_qubit(
    rho: &DensityMatrix,
    shots: u64,
    rng: &mut ChaCha12Rng,
) -> Result<DensityMatrix> {
    let e = rho.entries();
    let exact = [
        2.0 * e.get(0, 1).re,  // <X>
        -2.0 * e.get(0, 1).im, // <Y>
        e.get(0, 0).re - e.get(1, 1).re, // <Z>
    ];
    let mut estimate = [0.0f64; 3];
    for (est, expectation) in estimate.iter_mut().zip(exact) {
        let p = ((1.0 + expectation) / 2.0).clamp(0.0, 1.0);
        let dist = rand_distr::Binomial::new(shots, p).expect("p in [0,1]");
        let ones = dist.sample(rng) as f64;
        *est = 2.0 * ones / shots as f64 - 1.0;
    }
    let [ex, ey, ez] = estimate;
    let raw = ComplexMatrix::new(
        2,
        2,
        vec![
            C64::new((1.0 + ez) / 2.0, 0.0),
            C64::new(ex / 2.0, -ey / 2.0),
            C64::new(ex / 2.0, ey / 2.0),
            C64::new((1.0 - ez) / 2.0, 0.0),
        ],
    )?;
    // Project back to a physical state: clip negative eigenvalues and
    // renormalize the trace.
    let (vals, vecs) = crate::matrix::hermitian_eig(&raw)?;
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let mut entries = ComplexMatrix::zeros(2, 2);
    for (k, &val) in clipped.iter().enumerate() {
        let col = vecs.column(k);
        for r in 0..2 {
            for c in 0..2 {
                let add = col[r] * col[c].conj() * C64::new(val / total, 0.0);
                entries.set(r, c, entries.get(r, c) + add);
            }
        }
    }
    DensityMatrix::new(1, entries)
}

/// Full state-preparation circuit for a state: a unitary whose action on
/// |0…0⟩ reproduces the state. Built as C† · (Λ ⊗ I_B) where Λ is any
/// unitary on block A loading the Schmidt coefficients into the first
/// column (completed deterministically).
pub fn state_preparation(typical: &PureState, part: &Bipartition) -> Result<ComplexMatrix> {
    let model = CompressorModel::build(typical, part)?;
    let n_a = part.n_a();
    let dim_a = 1 << n_a;
    let mut lambda_col = ComplexMatrix::zeros(dim_a, 1);
    for (i, &l) in model.schmidt.lambdas.iter().enumerate() {
        lambda_col.set(i, 0, C64::new(l, 0.0));
    }
    let loader = complete_isometry(&lambda_col, dim_a)?;
    let loader_full = kron(&loader, &ComplexMatrix::identity(1 << part.n_b()))?;
    model.full_matrix_c.adjoint().mul(&loader_full)
}
