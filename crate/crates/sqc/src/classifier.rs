//! One-class classification from trash-space tomography features: a
//! single-layer sigmoid network trained with Adam on cross-entropy loss,
//! evaluated with the phi (Matthews) correlation coefficient.
//!
//! Inputs never reach the classifier directly; each sample is compressed
//! by the target class's compressor and only the per-qubit density
//! matrices of the trash register are kept. States that belong to the
//! class leave the trash near |0…0⟩, everything else leaves a signature
//! the linear layer can separate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::compressor::{CompressorModel, TomographyMode};
use crate::error::{Result, SqcError};
use crate::state::PureState;

/// Flattened per-qubit trash tomography: 8 reals per trash qubit
/// (real and imaginary parts of the four 2×2 density-matrix entries,
/// row-major), in block-B qubit order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

pub const FEATURES_PER_QUBIT: usize = 8;

/// Extract the trash-space feature vector of one input.
pub fn extract_features(
    model: &CompressorModel,
    input: &PureState,
    mode: TomographyMode,
) -> Result<FeatureVector> {
    let (_, per_qubit) = model.tomography_trash(input, mode)?;
    let mut values = Vec::with_capacity(per_qubit.len() * FEATURES_PER_QUBIT);
    for rho_q in &per_qubit {
        for r in 0..2 {
            for c in 0..2 {
                let z = rho_q.entries().get(r, c);
                values.push(z.re);
                values.push(z.im);
            }
        }
    }
    Ok(FeatureVector { values })
}

/// Adam + cross-entropy training configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 25,
            iterations: 1000,
            seed: 0,
        }
    }
}

/// Trained single-layer sigmoid classifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub config: TrainConfig,
}

impl ClassifierModel {
    /// σ(w·y + b).
    pub fn predict(&self, features: &FeatureVector) -> f64 {
        let z: f64 = self
            .weights
            .iter()
            .zip(&features.values)
            .map(|(w, y)| w * y)
            .sum::<f64>()
            + self.bias;
        sigmoid(z)
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Mean cross-entropy loss and its gradient over a batch.
///
/// Exposed for the finite-difference gradient check.
pub fn loss_and_gradient(
    weights: &[f64],
    bias: f64,
    batch: &[(&FeatureVector, bool)],
) -> (f64, Vec<f64>, f64) {
    let n = batch.len() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (fv, label) in batch {
        let z: f64 = weights
            .iter()
            .zip(&fv.values)
            .map(|(w, y)| w * y)
            .sum::<f64>()
            + bias;
        let p = sigmoid(z);
        let y = if *label { 1.0 } else { 0.0 };
        let p_safe = p.clamp(1e-12, 1.0 - 1e-12);
        loss += -(y * p_safe.ln() + (1.0 - y) * (1.0 - p_safe).ln());
        let err = p - y;
        for (g, v) in grad_w.iter_mut().zip(&fv.values) {
            *g += err * v;
        }
        grad_b += err;
    }
    (
        loss / n,
        grad_w.iter().map(|g| g / n).collect(),
        grad_b / n,
    )
}

/// Train on labeled feature vectors; deterministic for a given seed.
/// Returns the model and the per-iteration batch-loss trace.
pub fn train(data: &[(FeatureVector, bool)], config: TrainConfig) -> Result<(ClassifierModel, Vec<f64>)> {
    if data.is_empty() {
        return Err(SqcError::InsufficientSamples {
            label: 0,
            available: 0,
            needed: 1,
        });
    }
    let dim = data[0].0.values.len();
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut weights = vec![0.0f64; dim];
    let mut bias = 0.0f64;
    let mut m_w = vec![0.0f64; dim];
    let mut v_w = vec![0.0f64; dim];
    let (mut m_b, mut v_b) = (0.0f64, 0.0f64);
    let mut trace = Vec::with_capacity(config.iterations);

    for t in 1..=config.iterations {
        let batch: Vec<(&FeatureVector, bool)> = (0..config.batch_size)
            .map(|_| {
                let (fv, label) = &data[rng.gen_range(0..data.len())];
                (fv, *label)
            })
            .collect();
        let (loss, grad_w, grad_b) = loss_and_gradient(&weights, bias, &batch);
        trace.push(loss);

        let bc1 = 1.0 - config.beta1.powi(t as i32);
        let bc2 = 1.0 - config.beta2.powi(t as i32);
        for j in 0..dim {
            m_w[j] = config.beta1 * m_w[j] + (1.0 - config.beta1) * grad_w[j];
            v_w[j] = config.beta2 * v_w[j] + (1.0 - config.beta2) * grad_w[j] * grad_w[j];
            weights[j] -=
                config.learning_rate * (m_w[j] / bc1) / ((v_w[j] / bc2).sqrt() + config.epsilon);
        }
        m_b = config.beta1 * m_b + (1.0 - config.beta1) * grad_b;
        v_b = config.beta2 * v_b + (1.0 - config.beta2) * grad_b * grad_b;
        bias -= config.learning_rate * (m_b / bc1) / ((v_b / bc2).sqrt() + config.epsilon);
    }
    Ok((
        ClassifierModel {
            weights,
            bias,
            config,
        },
        trace,
    ))
}

/// Binary confusion counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn record(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Phi (Matthews) correlation coefficient. Returns 0 when any marginal of
/// the confusion matrix is empty.
pub fn phi_coefficient(c: &ConfusionCounts) -> f64 {
    let (tp, fp, tn, fn_) = (c.tp as f64, c.fp as f64, c.tn as f64, c.fn_ as f64);
    let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    if denom == 0.0 {
        return 0.0;
    }
    (tp * tn - fp * fn_) / denom.sqrt()
}

/// Confusion counts of a model over labeled features at a decision threshold.
pub fn evaluate_confusion(
    model: &ClassifierModel,
    data: &[(FeatureVector, bool)],
    threshold: f64,
) -> ConfusionCounts {
    let mut counts = ConfusionCounts::default();
    for (fv, actual) in data {
        counts.record(model.predict(fv) > threshold, *actual);
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schmidt::Bipartition;

    fn fv(values: Vec<f64>) -> FeatureVector {
        FeatureVector { values }
    }

    #[test]
    fn phi_of_perfect_and_chance_classifiers() {
        let perfect = ConfusionCounts {
            tp: 10,
            fp: 0,
            tn: 10,
            fn_: 0,
        };
        assert!((phi_coefficient(&perfect) - 1.0).abs() < 1e-15);

        let inverted = ConfusionCounts {
            tp: 0,
            fp: 10,
            tn: 0,
            fn_: 10,
        };
        assert!((phi_coefficient(&inverted) + 1.0).abs() < 1e-15);

        let chance = ConfusionCounts {
            tp: 5,
            fp: 5,
            tn: 5,
            fn_: 5,
        };
        assert!(phi_coefficient(&chance).abs() < 1e-15);
    }

    #[test]
    fn phi_degenerate_marginals_are_zero() {
        let all_negative = ConfusionCounts {
            tp: 0,
            fp: 0,
            tn: 20,
            fn_: 5,
        };
        assert_eq!(phi_coefficient(&all_negative), 0.0);
    }

    #[test]
    fn phi_matches_direct_arithmetic() {
        let c = ConfusionCounts {
            tp: 8,
            fp: 3,
            tn: 17,
            fn_: 2,
        };
        let expected = (8.0 * 17.0 - 3.0 * 2.0) / ((11.0f64) * 10.0 * 20.0 * 19.0).sqrt();
        assert!((phi_coefficient(&c) - expected).abs() < 1e-15);
    }

    #[test]
    fn training_separates_linearly_separable_features() {
        let mut data = Vec::new();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x: f64 = rng.gen::<f64>();
            data.push((fv(vec![x + 1.0, 0.5]), true));
            data.push((fv(vec![x - 1.0, 0.5]), false));
        }
        let config = TrainConfig {
            learning_rate: 0.05,
            ..TrainConfig::default()
        };
        let (model, trace) = train(&data, config).unwrap();
        assert_eq!(trace.len(), 1000);
        let counts = evaluate_confusion(&model, &data, 0.5);
        let accuracy = (counts.tp + counts.tn) as f64 / counts.total() as f64;
        assert!(accuracy >= 0.99, "accuracy {accuracy}");
    }

    #[test]
    fn identical_features_predict_the_class_prior() {
        let data: Vec<(FeatureVector, bool)> = (0..100)
            .map(|i| (fv(vec![0.3, 0.7]), i % 4 == 0))
            .collect();
        let (model, _) = train(&data, TrainConfig::default()).unwrap();
        let p = model.predict(&fv(vec![0.3, 0.7]));
        assert!((p - 0.25).abs() < 0.1, "prediction {p} should be near prior 0.25");
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let data: Vec<(FeatureVector, bool)> = (0..50)
            .map(|i| (fv(vec![i as f64 / 50.0, 1.0 - i as f64 / 50.0]), i % 2 == 0))
            .collect();
        let (a, _) = train(&data, TrainConfig::default()).unwrap();
        let (b, _) = train(&data, TrainConfig::default()).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.bias, b.bias);
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..10 {
            let batch_owned: Vec<(FeatureVector, bool)> = (0..25)
                .map(|_| {
                    (
                        fv((0..16).map(|_| rng.gen::<f64>() - 0.5).collect()),
                        rng.gen::<bool>(),
                    )
                })
                .collect();
            let batch: Vec<(&FeatureVector, bool)> =
                batch_owned.iter().map(|(f, l)| (f, *l)).collect();
            let weights: Vec<f64> = (0..16).map(|_| rng.gen::<f64>() - 0.5).collect();
            let bias: f64 = rng.gen::<f64>() - 0.5;
            let (_, grad_w, grad_b) = loss_and_gradient(&weights, bias, &batch);

            let h = 1e-6;
            for j in 0..16 {
                let mut wp = weights.clone();
                wp[j] += h;
                let mut wm = weights.clone();
                wm[j] -= h;
                let fd = (loss_and_gradient(&wp, bias, &batch).0
                    - loss_and_gradient(&wm, bias, &batch).0)
                    / (2.0 * h);
                let scale = grad_w[j].abs().max(1.0);
                assert!(
                    (fd - grad_w[j]).abs() / scale < 1e-6,
                    "dw[{j}]: {fd} vs {}",
                    grad_w[j]
                );
            }
            let fd_b = (loss_and_gradient(&weights, bias + h, &batch).0
                - loss_and_gradient(&weights, bias - h, &batch).0)
                / (2.0 * h);
            assert!((fd_b - grad_b).abs() / grad_b.abs().max(1.0) < 1e-6);
        }
    }

    #[test]
    fn features_of_typical_state_are_zero_projectors() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let raw: Vec<f64> = (0..64).map(|_| rng.gen::<f64>()).collect();
        let typical = PureState::from_real_normalized(&raw).unwrap();
        let part = Bipartition::trailing(6, 2).unwrap();
        let model = CompressorModel::build(&typical, &part).unwrap();
        let features = extract_features(&model, &typical, TomographyMode::Exact).unwrap();
        assert_eq!(features.values.len(), 16);
        for q in 0..2 {
            let block = &features.values[q * 8..(q + 1) * 8];
            let expected = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
            for (v, e) in block.iter().zip(expected) {
                assert!((v - e).abs() < 1e-10, "block {q}: {block:?}");
            }
        }
    }

    #[test]
    fn feature_blocks_decode_to_unit_trace_hermitian_matrices() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let raw: Vec<f64> = (0..64).map(|_| rng.gen::<f64>()).collect();
        let typical = PureState::from_real_normalized(&raw).unwrap();
        let part = Bipartition::trailing(6, 2).unwrap();
        let model = CompressorModel::build(&typical, &part).unwrap();
        for _ in 0..10 {
            let raw: Vec<f64> = (0..64).map(|_| rng.gen::<f64>()).collect();
            let input = PureState::from_real_normalized(&raw).unwrap();
            let features = extract_features(&model, &input, TomographyMode::Exact).unwrap();
            for q in 0..2 {
                let b = &features.values[q * 8..(q + 1) * 8];
                let trace = b[0] + b[6];
                assert!((trace - 1.0).abs() < 1e-10);
                // off-diagonals conjugate: re01 == re10, im01 == -im10
                assert!((b[2] - b[4]).abs() < 1e-10);
                assert!((b[3] + b[5]).abs() < 1e-10);
            }
        }
    }
}
