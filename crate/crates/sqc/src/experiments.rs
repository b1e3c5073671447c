//! Benchmark orchestration: turns a raw dataset into the per-label
//! fidelity tables, the one-class classification table, and the
//! autoencoder-baseline comparison. All randomness flows from a single
//! root seed, split deterministically per repetition, so every run is
//! reproducible byte for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{
    evaluate_confusion, extract_features, phi_coefficient, train, ConfusionCounts, FeatureVector,
    TrainConfig,
};
use crate::compressor::{CompressorModel, ReferencePolicy, TomographyMode};
use crate::dataio::{preprocess, typical_state, PreprocessConfig, Sample, NUM_CLASSES};
use crate::error::Result;
use crate::qae::{
    qae_roundtrip_fidelity, train_qae, AnsatzLayout, Entangler, QaeTrainConfig, TrainState,
};
use crate::schmidt::Bipartition;

/// Derive `count` child seeds from a root seed.
pub fn derive_seeds(root: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha12Rng::seed_from_u64(root);
    (0..count).map(|_| rng.gen()).collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Configuration of the fidelity benchmark (reconstruction tables).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FidelityBenchConfig {
    pub root_seed: u64,
    pub num_seeds: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub trash_qubits: usize,
    pub policies: Vec<ReferencePolicy>,
    pub tomography: TomographyMode,
}

impl Default for FidelityBenchConfig {
    fn default() -> Self {
        Self {
            root_seed: 7,
            num_seeds: 5,
            train_per_class: 150,
            test_per_class: 20,
            trash_qubits: 3,
            policies: vec![
                ReferencePolicy::Zero,
                ReferencePolicy::TopEigenvector,
                ReferencePolicy::PerQubitEigenvector,
            ],
            tomography: TomographyMode::Exact,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyFidelity {
    pub policy: ReferencePolicy,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelFidelityReport {
    pub label: u8,
    pub policies: Vec<PolicyFidelity>,
}

/// Per-label mean/std of the roundtrip fidelity on held-out test states,
/// pooled over the split seeds, for each reference policy.
pub fn run_fidelity_bench(
    samples: &[Sample],
    config: &FidelityBenchConfig,
) -> Result<Vec<LabelFidelityReport>> {
    let seeds = derive_seeds(config.root_seed, config.num_seeds);
    let part = Bipartition::trailing(6, config.trash_qubits)?;
    let mut per_label: Vec<Vec<Vec<f64>>> =
        vec![vec![Vec::new(); config.policies.len()]; NUM_CLASSES];

    for &seed in &seeds {
        let sets = preprocess(
            samples,
            &PreprocessConfig {
                seed,
                train_per_class: config.train_per_class,
                test_per_class: config.test_per_class,
            },
        )?;
        for set in &sets {
            let typical = typical_state(&set.train)?;
            let model = CompressorModel::build(&typical, &part)?;
            for input in &set.test {
                for (pi, &policy) in config.policies.iter().enumerate() {
                    let result =
                        model.roundtrip_with_tomography(input, policy, config.tomography)?;
                    per_label[set.class_label as usize][pi].push(result.fidelity);
                }
            }
        }
    }

    Ok((0..NUM_CLASSES)
        .map(|label| LabelFidelityReport {
            label: label as u8,
            policies: config
                .policies
                .iter()
                .enumerate()
                .map(|(pi, &policy)| {
                    let values = &per_label[label][pi];
                    let (mean, std) = mean_std(values);
                    PolicyFidelity {
                        policy,
                        mean,
                        std,
                        count: values.len(),
                    }
                })
                .collect(),
        })
        .collect())
}

/// Configuration of the one-class classification benchmark.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyBenchConfig {
    pub root_seed: u64,
    pub repetitions: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub trash_qubits: usize,
    /// Explicit trash-qubit indices; `None` uses the trailing
    /// `trash_qubits` positions.
    pub trash_block: Option<Vec<usize>>,
    pub threshold: f64,
    pub train: TrainConfig,
    pub tomography_shots: Option<u64>,
}

impl Default for ClassifyBenchConfig {
    fn default() -> Self {
        Self {
            root_seed: 7,
            repetitions: 10,
            train_per_class: 150,
            test_per_class: 20,
            trash_qubits: 2,
            trash_block: None,
            threshold: 0.5,
            train: TrainConfig {
                learning_rate: 0.05,
                ..TrainConfig::default()
            },
            tomography_shots: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelPhiReport {
    pub label: u8,
    pub mean: f64,
    pub std: f64,
    pub per_repetition: Vec<f64>,
    pub confusions: Vec<ConfusionCounts>,
}

/// One-class classification of a single target label for one repetition
/// seed: split, build the target-class compressor, extract trash features
/// for a balanced pool (target states replicated to match the other nine
/// classes), train, and report the test confusion matrix.
pub fn one_class_repetition(
    samples: &[Sample],
    target: u8,
    seed: u64,
    config: &ClassifyBenchConfig,
) -> Result<ConfusionCounts> {
    let sets = preprocess(
        samples,
        &PreprocessConfig {
            seed,
            train_per_class: config.train_per_class,
            test_per_class: config.test_per_class,
        },
    )?;
    let part = match &config.trash_block {
        Some(block) => Bipartition::from_block_b(6, block.clone())?,
        None => Bipartition::trailing(6, config.trash_qubits)?,
    };
    let typical = typical_state(&sets[target as usize].train)?;
    let model = CompressorModel::build(&typical, &part)?;
    let mode = match config.tomography_shots {
        None => TomographyMode::Exact,
        Some(shots) => TomographyMode::Shots { shots, seed },
    };

    let replication = NUM_CLASSES - 1;
    let mut pool: Vec<(FeatureVector, bool)> = Vec::new();
    for set in &sets {
        let positive = set.class_label == target;
        for state in &set.train {
            let features = extract_features(&model, state, mode)?;
            if positive {
                for _ in 0..replication {
                    pool.push((features.clone(), true));
                }
            } else {
                pool.push((features, false));
            }
        }
    }

    let (classifier, _) = train(
        &pool,
        TrainConfig {
            seed,
            ..config.train
        },
    )?;

    let mut test_set: Vec<(FeatureVector, bool)> = Vec::new();
    for set in &sets {
        for state in &set.test {
            test_set.push((
                extract_features(&model, state, mode)?,
                set.class_label == target,
            ));
        }
    }
    Ok(evaluate_confusion(&classifier, &test_set, config.threshold))
}

/// Phi statistics for every label across reseeded repetitions.
pub fn run_classify_bench(
    samples: &[Sample],
    config: &ClassifyBenchConfig,
) -> Result<Vec<LabelPhiReport>> {
    let seeds = derive_seeds(config.root_seed, config.repetitions);
    let mut reports = Vec::with_capacity(NUM_CLASSES);
    for label in 0..NUM_CLASSES as u8 {
        let mut phis = Vec::with_capacity(config.repetitions);
        let mut confusions = Vec::with_capacity(config.repetitions);
        for &seed in &seeds {
            let counts = one_class_repetition(samples, label, seed, config)?;
            phis.push(phi_coefficient(&counts));
            confusions.push(counts);
        }
        let (mean, std) = mean_std(&phis);
        reports.push(LabelPhiReport {
            label,
            mean,
            std,
            per_repetition: phis,
            confusions,
        });
    }
    Ok(reports)
}

/// Configuration of the autoencoder-baseline comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QaeBenchConfig {
    pub root_seed: u64,
    pub num_seeds: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub trash_qubits: usize,
    pub entangling_layers: usize,
    pub train: QaeTrainConfig,
}

impl Default for QaeBenchConfig {
    fn default() -> Self {
        Self {
            root_seed: 7,
            num_seeds: 1,
            train_per_class: 150,
            test_per_class: 20,
            trash_qubits: 3,
            entangling_layers: 9,
            train: QaeTrainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelQaeReport {
    pub label: u8,
    pub qae_mean: f64,
    pub qae_std: f64,
    pub sqc_mean: f64,
    pub sqc_std: f64,
    pub final_objective: f64,
    pub evaluations: usize,
}

/// Train the autoencoder per class and compare its roundtrip fidelity on
/// the test split with the compressor's (zero reference policy).
///
/// The ansatz acts on the original register with the trash block leading
/// (per the training-circuit layout); the compressor uses its default
/// trailing-trash bipartition.
pub fn run_qae_bench(samples: &[Sample], config: &QaeBenchConfig) -> Result<Vec<LabelQaeReport>> {
    let seeds = derive_seeds(config.root_seed, config.num_seeds);
    let layout = AnsatzLayout::hardware_efficient(6, config.entangling_layers, Entangler::Cnot);
    // trash = first qubits for the autoencoder
    let qae_part = Bipartition::new(
        (config.trash_qubits..6).collect(),
        (0..config.trash_qubits).collect(),
    )?;
    let sqc_part = Bipartition::trailing(6, config.trash_qubits)?;

    let mut qae_fids: Vec<Vec<f64>> = vec![Vec::new(); NUM_CLASSES];
    let mut sqc_fids: Vec<Vec<f64>> = vec![Vec::new(); NUM_CLASSES];
    let mut last_train: Vec<Option<TrainState>> = vec![None; NUM_CLASSES];

    for &seed in &seeds {
        let sets = preprocess(
            samples,
            &PreprocessConfig {
                seed,
                train_per_class: config.train_per_class,
                test_per_class: config.test_per_class,
            },
        )?;
        for set in &sets {
            let label = set.class_label as usize;
            let trained = train_qae(
                &set.train,
                &layout,
                &qae_part,
                QaeTrainConfig {
                    seed,
                    ..config.train
                },
            )?;
            let typical = typical_state(&set.train)?;
            let model = CompressorModel::build(&typical, &sqc_part)?;
            for input in &set.test {
                qae_fids[label]
                    .push(qae_roundtrip_fidelity(&layout, &trained.theta, &qae_part, input)?);
                sqc_fids[label].push(model.roundtrip(input, ReferencePolicy::Zero)?.fidelity);
            }
            last_train[label] = Some(trained);
        }
    }

    Ok((0..NUM_CLASSES)
        .map(|label| {
            let (qae_mean, qae_std) = mean_std(&qae_fids[label]);
            let (sqc_mean, sqc_std) = mean_std(&sqc_fids[label]);
            let trained = last_train[label].as_ref().expect("trained above");
            LabelQaeReport {
                label: label as u8,
                qae_mean,
                qae_std,
                sqc_mean,
                sqc_std,
                final_objective: trained.objective_trace.last().copied().unwrap_or(f64::NAN),
                evaluations: trained.evaluations,
            }
        })
        .collect())
}
