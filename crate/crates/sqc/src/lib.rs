//! A deterministic quantum-data-compression toolkit built on the Schmidt
//! decomposition.
//!
//! Given a "typical state" summarizing a family of quantum states, the
//! toolkit constructs a compressor unitary that rotates the register into
//! the typical state's Schmidt basis and disentangles a latent block from
//! a trash block. States close to the typical state compress with high
//! roundtrip fidelity; the trash register left behind doubles as a
//! feature space for one-class classification.
//!
//! Modules:
//! * [`matrix`] / [`state`] — dense complex linear algebra and qubit
//!   register operations (SVD, Hermitian eigen, partial trace, qubit
//!   permutations, deterministic isometry completion).
//! * [`schmidt`] — Schmidt decomposition over arbitrary bipartitions,
//!   spectrum truncation, minimal-bond-dimension search.
//! * [`compressor`] — the compressor circuit, roundtrip simulation with
//!   reference-state policies, trash tomography, model serialization.
//! * [`cost`] — analytic CNOT-count estimates for the circuit.
//! * [`dataio`] — dataset ingestion, scaling, splits, typical states.
//! * [`classifier`] — one-class classification from trash features.
//! * [`qae`] / [`optim`] — the variational autoencoder baseline and its
//!   derivative-free optimizers.
//! * [`experiments`] — reproducible benchmark orchestration.

pub mod classifier;
pub mod compressor;
pub mod cost;
pub mod dataio;
pub mod error;
pub mod experiments;
pub mod matrix;
pub mod optim;
pub mod qae;
pub mod schmidt;
pub mod state;

pub use compressor::{CompressorModel, ReferencePolicy, RoundtripResult, TomographyMode};
pub use error::{Result, SqcError};
pub use matrix::{complete_isometry, hermitian_eig, kron, svd, ComplexMatrix};
pub use schmidt::{schmidt_decompose, search_min_bond, Bipartition, SchmidtForm};
pub use state::{partial_trace, permute_qubits, DensityMatrix, PureState};
