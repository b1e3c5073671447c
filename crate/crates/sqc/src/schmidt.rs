//! Schmidt decomposition of pure states across arbitrary qubit
//! bipartitions, low-rank truncation of the Schmidt spectrum, and an
//! exhaustive search for the bipartition with minimal bond dimension.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqcError};
use crate::matrix::{svd, ComplexMatrix};
use crate::state::{permute_qubits, PureState};

/// Ordered split of a register into block A (latent) and block B (trash).
///
/// Blocks need not be contiguous. After canonicalization block A is never
/// smaller than block B; `swapped` records whether the constructor had to
/// exchange the blocks to enforce that.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    block_a: Vec<usize>,
    block_b: Vec<usize>,
    swapped: bool,
}

impl Bipartition {
    pub fn new(block_a: Vec<usize>, block_b: Vec<usize>) -> Result<Self> {
        let n = block_a.len() + block_b.len();
        if block_a.is_empty() || block_b.is_empty() {
            return Err(SqcError::InvalidBipartition {
                reason: "both blocks must be nonempty".into(),
            });
        }
        let mut seen = vec![false; n];
        for &q in block_a.iter().chain(&block_b) {
            if q >= n || seen[q] {
                return Err(SqcError::InvalidBipartition {
                    reason: format!("qubit {q} repeated or out of range for n={n}"),
                });
            }
            seen[q] = true;
        }
        if block_a.len() >= block_b.len() {
            Ok(Self {
                block_a,
                block_b,
                swapped: false,
            })
        } else {
            Ok(Self {
                block_a: block_b,
                block_b: block_a,
                swapped: true,
            })
        }
    }

    /// Block B = the trailing `n_b` qubits, block A = the rest.
    pub fn trailing(num_qubits: usize, n_b: usize) -> Result<Self> {
        if n_b == 0 || n_b >= num_qubits {
            return Err(SqcError::InvalidBipartition {
                reason: format!("trash size {n_b} invalid for n={num_qubits}"),
            });
        }
        Self::new(
            (0..num_qubits - n_b).collect(),
            (num_qubits - n_b..num_qubits).collect(),
        )
    }

    /// Block B from an explicit index set, block A = ascending complement.
    pub fn from_block_b(num_qubits: usize, block_b: Vec<usize>) -> Result<Self> {
        let in_b = |q: &usize| block_b.contains(q);
        let block_a: Vec<usize> = (0..num_qubits).filter(|q| !in_b(q)).collect();
        Self::new(block_a, block_b)
    }

    pub fn block_a(&self) -> &[usize] {
        &self.block_a
    }

    pub fn block_b(&self) -> &[usize] {
        &self.block_b
    }

    pub fn n_a(&self) -> usize {
        self.block_a.len()
    }

    pub fn n_b(&self) -> usize {
        self.block_b.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.block_a.len() + self.block_b.len()
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// Permutation moving block A (in order) onto the leading qubit
    /// positions and block B onto the trailing ones: `perm[q]` is the new
    /// position of qubit `q`.
    pub fn canonical_permutation(&self) -> Vec<usize> {
        let n = self.num_qubits();
        let mut perm = vec![0usize; n];
        for (pos, &q) in self.block_a.iter().enumerate() {
            perm[q] = pos;
        }
        for (pos, &q) in self.block_b.iter().enumerate() {
            perm[q] = self.n_a() + pos;
        }
        perm
    }
}

/// Schmidt form of a pure state across a bipartition.
///
/// `u` holds the block-A Schmidt basis as columns; `v` holds the right
/// singular vectors, so the block-B Schmidt vectors satisfying
/// ψ = Σ λᵢ |uᵢ⟩|vᵢ*⟩ are the columns of `v` conjugated (identical for
/// real states). Both are truncated (or padded from the SVD output) to
/// `2^measure` columns so the entangling CNOT layer addresses whole qubit
/// pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchmidtForm {
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub lambdas: Vec<f64>,
    pub rank: usize,
    pub measure: usize,
    pub bipartition: Bipartition,
}

impl SchmidtForm {
    /// Number of stored Schmidt columns, `2^measure`.
    pub fn num_columns(&self) -> usize {
        1 << self.measure
    }

    /// Rebuild the state (in canonical block order) as Σ λᵢ |uᵢ⟩|vᵢ*⟩.
    pub fn reconstruct_canonical(&self) -> PureState {
        let dim_a = self.u.rows();
        let dim_b = self.v.rows();
        let mut amps = vec![C64::new(0.0, 0.0); dim_a * dim_b];
        for i in 0..self.num_columns() {
            let l = C64::new(self.lambdas[i], 0.0);
            if l.norm_sqr() == 0.0 {
                continue;
            }
            for a in 0..dim_a {
                let ua = self.u.get(a, i) * l;
                for b in 0..dim_b {
                    amps[a * dim_b + b] += ua * self.v.get(b, i).conj();
                }
            }
        }
        PureState::new(amps).expect("Schmidt reconstruction is normalized")
    }
}

/// Reshape a state into the `2^n_A × 2^n_B` coefficient matrix of the
/// bipartition: entry (a, b) is the amplitude whose block-A bits spell `a`
/// and block-B bits spell `b`.
pub fn reshape_state(state: &PureState, part: &Bipartition) -> Result<ComplexMatrix> {
    if part.num_qubits() != state.num_qubits() {
        return Err(SqcError::InvalidBipartition {
            reason: format!(
                "bipartition covers {} qubits, state has {}",
                part.num_qubits(),
                state.num_qubits()
            ),
        });
    }
    let permuted = permute_qubits(state, &part.canonical_permutation())?;
    let (rows, cols) = (1 << part.n_a(), 1 << part.n_b());
    ComplexMatrix::new(rows, cols, permuted.amplitudes().to_vec())
}

/// Schmidt decomposition via SVD of the reshaped state.
pub fn schmidt_decompose(state: &PureState, part: &Bipartition) -> Result<SchmidtForm> {
    let m = reshape_state(state, part)?;
    let decomp = svd(&m)?;
    let rank = decomp.numerical_rank().max(1);
    let measure = rank.next_power_of_two().trailing_zeros() as usize;
    let keep = 1 << measure;
    let cols: Vec<usize> = (0..keep).collect();
    Ok(SchmidtForm {
        u: decomp.u.select_columns(&cols),
        v: decomp.v_dagger.adjoint().select_columns(&cols),
        lambdas: decomp.singular_values[..keep].to_vec(),
        rank,
        measure,
        bipartition: part.clone(),
    })
}

/// Keep the top `r` Schmidt coefficients, renormalizing the retained
/// spectrum. Returns the reduced form together with the fidelity loss
/// `Σ_{i>r} λᵢ²` of the original form.
pub fn truncate(form: &SchmidtForm, r: usize) -> Result<(SchmidtForm, f64)> {
    if r == 0 || r > form.rank {
        return Err(SqcError::TruncationRank { r, k: form.rank });
    }
    let loss: f64 = form.lambdas[r..].iter().map(|l| l * l).sum();
    let measure = r.next_power_of_two().trailing_zeros() as usize;
    let keep = 1 << measure;
    let retained: f64 = form.lambdas[..r].iter().map(|l| l * l).sum();
    let scale = retained.sqrt();
    let mut lambdas = vec![0.0; keep];
    for i in 0..r {
        lambdas[i] = form.lambdas[i] / scale;
    }
    let cols: Vec<usize> = (0..keep).collect();
    Ok((
        SchmidtForm {
            u: form.u.select_columns(&cols),
            v: form.v.select_columns(&cols),
            lambdas,
            rank: r,
            measure,
            bipartition: form.bipartition.clone(),
        },
        loss,
    ))
}

/// Exhaustively search all `C(n, n_b)` trash blocks for the bipartition
/// with minimal numerical rank. Ties resolve to the lexicographically
/// smallest block-B index set.
pub fn search_min_bond(state: &PureState, n_b: usize) -> Result<(Bipartition, usize)> {
    let n = state.num_qubits();
    if n_b == 0 || n_b > n / 2 {
        return Err(SqcError::TrashSize { n_b, max: n / 2 });
    }
    let mut best: Option<(Bipartition, usize)> = None;
    for combo in itertools::Itertools::combinations((0..n).collect::<Vec<_>>().into_iter(), n_b) {
        let part = Bipartition::from_block_b(n, combo)?;
        let rank = schmidt_decompose(state, &part)?.rank;
        match &best {
            Some((_, r)) if *r <= rank => {}
            _ => best = Some((part, rank)),
        }
        if matches!(&best, Some((_, 1))) {
            // rank 1 cannot be beaten, but keep scanning order deterministic
        }
    }
    Ok(best.expect("at least one bipartition"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{invert_permutation, DensityMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_state(rng: &mut impl Rng, n: usize) -> PureState {
        let dim = 1 << n;
        let raw: Vec<C64> = (0..dim)
            .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        PureState::new(raw.into_iter().map(|z| z / norm).collect()).unwrap()
    }

    fn bell() -> PureState {
        let v = 1.0 / 2.0_f64.sqrt();
        PureState::new(vec![c(v, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(v, 0.0)]).unwrap()
    }

    fn ghz(n: usize) -> PureState {
        let v = 1.0 / 2.0_f64.sqrt();
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[0] = c(v, 0.0);
        amps[(1 << n) - 1] = c(v, 0.0);
        PureState::new(amps).unwrap()
    }

    #[test]
    fn bipartition_canonicalizes_block_sizes() {
        let p = Bipartition::new(vec![2], vec![0, 1]).unwrap();
        assert_eq!(p.block_a(), &[0, 1]);
        assert_eq!(p.block_b(), &[2]);
        assert!(p.swapped());
        let q = Bipartition::new(vec![0, 1], vec![2]).unwrap();
        assert!(!q.swapped());
    }

    #[test]
    fn bipartition_rejects_overlap_and_gaps() {
        assert!(Bipartition::new(vec![0, 1], vec![1]).is_err());
        assert!(Bipartition::new(vec![0], vec![2]).is_err());
        assert!(Bipartition::new(vec![], vec![0]).is_err());
    }

    #[test]
    fn reshape_bell_and_basis_states() {
        let p = Bipartition::new(vec![0], vec![1]).unwrap();
        let m = reshape_state(&bell(), &p).unwrap();
        let v = 1.0 / 2.0_f64.sqrt();
        assert!((m.get(0, 0) - c(v, 0.0)).norm() < 1e-12);
        assert!((m.get(1, 1) - c(v, 0.0)).norm() < 1e-12);
        assert!(m.get(0, 1).norm() < 1e-12 && m.get(1, 0).norm() < 1e-12);

        let m01 = reshape_state(&PureState::basis_state(2, 0b01), &p).unwrap();
        assert!((m01.get(0, 1) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn reshape_roundtrip_through_permutation() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let state = random_state(&mut rng, 4);
        let part = Bipartition::new(vec![1, 3], vec![0, 2]).unwrap();
        let m = reshape_state(&state, &part).unwrap();
        let flat = PureState::new(m.data().to_vec()).unwrap();
        let back = permute_qubits(&flat, &invert_permutation(&part.canonical_permutation()))
            .unwrap();
        assert_eq!(back.amplitudes(), state.amplitudes());
    }

    #[test]
    fn product_state_has_rank_one() {
        let v = 1.0 / 2.0_f64.sqrt();
        let plus = PureState::new(vec![c(v, 0.0), c(v, 0.0)]).unwrap();
        let state = PureState::basis_state(1, 0).tensor(&plus);
        let part = Bipartition::new(vec![0], vec![1]).unwrap();
        let form = schmidt_decompose(&state, &part).unwrap();
        assert_eq!((form.rank, form.measure), (1, 0));
        assert!((form.lambdas[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_has_flat_spectrum() {
        let part = Bipartition::new(vec![0], vec![1]).unwrap();
        let form = schmidt_decompose(&bell(), &part).unwrap();
        assert_eq!((form.rank, form.measure), (2, 1));
        let v = 1.0 / 2.0_f64.sqrt();
        assert!((form.lambdas[0] - v).abs() < 1e-12);
        assert!((form.lambdas[1] - v).abs() < 1e-12);
    }

    #[test]
    fn ghz_rank_matches_reduced_spectrum() {
        let part = Bipartition::new(vec![0, 1], vec![2, 3]).unwrap();
        let form = schmidt_decompose(&ghz(4), &part).unwrap();
        assert_eq!((form.rank, form.measure), (2, 1));
        let reduced = ghz(4).reduced_density(&[0, 1]).unwrap();
        let eigs = reduced.eigenvalues().unwrap();
        for (l, e) in form.lambdas.iter().zip(&eigs) {
            assert!((l * l - e).abs() < 1e-10);
        }
    }

    #[test]
    fn decomposition_reconstructs_the_permuted_state() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..20 {
            let state = random_state(&mut rng, 5);
            let part = Bipartition::new(vec![0, 2, 4], vec![1, 3]).unwrap();
            let form = schmidt_decompose(&state, &part).unwrap();
            let permuted = permute_qubits(&state, &part.canonical_permutation()).unwrap();
            let rebuilt = form.reconstruct_canonical();
            let overlap = rebuilt.inner(&permuted).norm();
            assert!(overlap > 1.0 - 1e-10, "overlap {overlap}");
            let sq: f64 = form.lambdas.iter().map(|l| l * l).sum();
            assert!((sq - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn truncate_trivial_and_forced_cases() {
        let part = Bipartition::new(vec![0], vec![1]).unwrap();
        let form = schmidt_decompose(&bell(), &part).unwrap();
        let (one, loss) = truncate(&form, 2).unwrap();
        assert!(loss.abs() < 1e-12);
        assert_eq!(one.rank, 2);

        // spectrum (0.8, 0.6): dropping the second coefficient loses 0.36
        let state = PureState::new(vec![c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0)])
            .unwrap();
        let form = schmidt_decompose(&state, &part).unwrap();
        let (trunc, loss) = truncate(&form, 1).unwrap();
        assert!((loss - 0.36).abs() < 1e-12);
        assert_eq!(trunc.measure, 0);
        assert!((trunc.lambdas[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncate_rejects_out_of_range() {
        let part = Bipartition::new(vec![0], vec![1]).unwrap();
        let form = schmidt_decompose(&bell(), &part).unwrap();
        assert!(truncate(&form, 0).is_err());
        assert!(truncate(&form, 3).is_err());
    }

    #[test]
    fn truncation_loss_matches_reconstruction_overlap() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        for _ in 0..20 {
            let state = random_state(&mut rng, 6);
            let part = Bipartition::trailing(6, 3).unwrap();
            let form = schmidt_decompose(&state, &part).unwrap();
            let r = 2;
            let (_, loss) = truncate(&form, r).unwrap();
            // overlap of the un-renormalized truncated expansion
            let permuted = permute_qubits(&state, &part.canonical_permutation()).unwrap();
            let mut partial = vec![C64::new(0.0, 0.0); permuted.dim()];
            for i in 0..r {
                for a in 0..form.u.rows() {
                    for b in 0..form.v.rows() {
                        partial[a * form.v.rows() + b] += C64::new(form.lambdas[i], 0.0)
                            * form.u.get(a, i)
                            * form.v.get(b, i).conj();
                    }
                }
            }
            // pre-renormalization overlap: <psi|psi_r> = sum_{i<=r} l_i^2,
            // and the loss is 1 minus that; squaring the overlap of the
            // *renormalized* truncation gives the same value
            let overlap: C64 = permuted
                .amplitudes()
                .iter()
                .zip(&partial)
                .map(|(p, q)| p.conj() * q)
                .sum();
            assert!(overlap.im.abs() < 1e-12);
            let direct = 1.0 - overlap.re;
            assert!((direct - loss).abs() < 1e-12, "loss {loss} vs {direct}");
            let partial_norm_sqr: f64 = partial.iter().map(|z| z.norm_sqr()).sum();
            let renormalized = 1.0 - overlap.norm_sqr() / partial_norm_sqr;
            assert!((renormalized - loss).abs() < 1e-12);
        }
    }

    #[test]
    fn search_prefers_the_product_factor() {
        let v = 1.0 / 2.0_f64.sqrt();
        let single = PureState::new(vec![c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let entangled = PureState::new(vec![c(v, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(v, 0.0)])
            .unwrap();
        let state = single.tensor(&entangled);
        let (part, rank) = search_min_bond(&state, 1).unwrap();
        assert_eq!(rank, 1);
        assert_eq!(part.block_b(), &[0]);
    }

    #[test]
    fn search_tie_break_is_lexicographic() {
        let (part, rank) = search_min_bond(&ghz(4), 2).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(part.block_b(), &[0, 1]);
    }

    #[test]
    fn search_on_product_state_reports_rank_one() {
        let q = PureState::new(vec![c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let state = q.tensor(&q).tensor(&q).tensor(&q);
        let (_, rank) = search_min_bond(&state, 2).unwrap();
        assert_eq!(rank, 1);
    }

    #[test]
    fn search_never_exceeds_any_enumerated_rank() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        for n in [4usize, 5, 6] {
            let state = random_state(&mut rng, n);
            for n_b in 1..=n / 2 {
                let (_, best) = search_min_bond(&state, n_b).unwrap();
                for combo in
                    itertools::Itertools::combinations((0..n).collect::<Vec<_>>().into_iter(), n_b)
                {
                    let part = Bipartition::from_block_b(n, combo).unwrap();
                    let rank = schmidt_decompose(&state, &part).unwrap().rank;
                    assert!(best <= rank);
                }
            }
        }
    }

    #[test]
    fn spectrum_agrees_with_reduced_density_matrix() {
        let mut rng = ChaCha12Rng::seed_from_u64(37);
        for _ in 0..10 {
            let state = random_state(&mut rng, 3);
            let part = Bipartition::new(vec![0, 1], vec![2]).unwrap();
            let form = schmidt_decompose(&state, &part).unwrap();
            let rho = DensityMatrix::from_pure(&state);
            let reduced = crate::state::partial_trace(&rho, &[0, 1]).unwrap();
            let eigs = reduced.eigenvalues().unwrap();
            for (i, l) in form.lambdas.iter().enumerate() {
                assert!((l * l - eigs[i]).abs() < 1e-10);
            }
        }
    }
}
