//! Analytic CNOT-count estimate for the compressor circuit.
//!
//! The count splits into the decompositions of the two block operators
//! plus the entangling layer. Depending on how the Schmidt measure `m`
//! compares to the block sizes, each block operator is either an
//! isometry (2^m-to-2^{n_j} columns) or a full unitary:
//!
//! * `0 ≤ m < n_B`: both blocks are isometries,
//!   `2^{m+n_j} − 2^{n_j}/24` CNOTs each, plus `m` entangling CNOTs.
//! * `m = n_B < n_A`: block A stays an isometry (`2^n − 2^{n_A}/24`),
//!   block B is a unitary (`23·2^{2n_B}/48 − 3·2^{n_B}/2 + 4/3`), plus
//!   `n_B` entangling CNOTs.
//! * `m = n_B = n_A`: both blocks are unitaries, plus `n_B` CNOTs.
//!
//! The isometry bound's lower-order `O(n_j²)·2^m` correction carries no
//! known constant and is omitted, so isometry-case counts are slight
//! underestimates. Fractional values are kept as reals and ceiled only in
//! the reported total.

use serde::{Deserialize, Serialize};

use crate::compressor::CompressorModel;
use crate::error::{Result, SqcError};

/// Which complexity regime a (n_A, n_B, m) triple falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostCase {
    /// Both block operators are isometries (m < n_B).
    IsoIso,
    /// Block A isometry, block B unitary (m = n_B < n_A).
    IsoUni,
    /// Both blocks unitaries (m = n_B = n_A).
    UniUni,
}

/// CNOT budget of a compressor circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub case: CostCase,
    /// Leading-term CNOT count of the block-A operator.
    pub cnot_a: f64,
    /// Leading-term CNOT count of the block-B operator.
    pub cnot_b: f64,
    /// Entangling CNOTs between the blocks.
    pub cnot_entangle: usize,
    /// ⌈cnot_a⌉ + ⌈cnot_b⌉ + cnot_entangle.
    pub total_ceil: u64,
}

fn isometry_cnots(m: usize, s: usize) -> f64 {
    2f64.powi((m + s) as i32) - 2f64.powi(s as i32) / 24.0
}

fn unitary_cnots(s: usize) -> f64 {
    23.0 / 48.0 * 2f64.powi(2 * s as i32) - 1.5 * 2f64.powi(s as i32) + 4.0 / 3.0
}

/// CNOT count for block sizes `n_a ≥ n_b ≥ 1` and Schmidt measure
/// `0 ≤ m ≤ n_b`.
pub fn cnot_count(n_a: usize, n_b: usize, m: usize) -> Result<CostReport> {
    if n_a == 0 || n_b == 0 || n_b > n_a || m > n_b {
        return Err(SqcError::CostDomain { n_a, n_b, m });
    }
    let (case, cnot_a, cnot_b, cnot_entangle) = if m < n_b {
        (
            CostCase::IsoIso,
            isometry_cnots(m, n_a),
            isometry_cnots(m, n_b),
            m,
        )
    } else if n_b < n_a {
        (
            CostCase::IsoUni,
            isometry_cnots(m, n_a),
            unitary_cnots(n_b),
            n_b,
        )
    } else {
        (CostCase::UniUni, unitary_cnots(n_a), unitary_cnots(n_b), n_b)
    };
    Ok(CostReport {
        case,
        cnot_a,
        cnot_b,
        cnot_entangle,
        total_ceil: cnot_a.ceil() as u64 + cnot_b.ceil() as u64 + cnot_entangle as u64,
    })
}

/// Cost of a built model, using its bipartition sizes and Schmidt measure.
pub fn cost_of_model(model: &CompressorModel) -> CostReport {
    cnot_count(
        model.bipartition().n_a(),
        model.bipartition().n_b(),
        model.schmidt().measure,
    )
    .expect("model dimensions are always in the valid domain")
}
