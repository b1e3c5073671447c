//! Dataset ingestion and preparation for the handwritten-digits
//! experiments: CSV parsing, feature scaling, per-class train/test
//! splits, and typical-state computation.
//!
//! The scaling pipeline mirrors the benchmark setup: per-feature
//! standardization to zero mean and unit variance, per-feature min-max
//! rescale into [0, 1], then per-sample L2 normalization. Both statistics
//! are fitted over the full dataset before any splitting; constant
//! features pass through as 0. The resulting amplitude vectors are real
//! and nonnegative, which is what makes the renormalized average of a
//! class a well-defined typical state.

use std::io::BufRead;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqcError};
use crate::state::PureState;

pub const NUM_FEATURES: usize = 64;
pub const NUM_CLASSES: usize = 10;

/// One raw dataset row: 64 pixel intensities in 0..=16 and a digit label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: u8,
}

/// Read an optdigits-style CSV: 65 comma-separated integers per line,
/// the last being the label. Malformed rows are rejected with their line
/// number.
pub fn ingest(path: impl AsRef<Path>) -> Result<Vec<Sample>> {
    let file = std::fs::File::open(path)?;
    ingest_reader(std::io::BufReader::new(file))
}

/// Same as [`ingest`] but from any buffered reader (used for embedded
/// datasets and tests).
pub fn ingest_reader(reader: impl BufRead) -> Result<Vec<Sample>> {
    let mut samples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != NUM_FEATURES + 1 {
            return Err(SqcError::Parse {
                line: lineno,
                reason: format!("expected 65 fields, found {}", fields.len()),
            });
        }
        let mut features = Vec::with_capacity(NUM_FEATURES);
        for f in &fields[..NUM_FEATURES] {
            let v: i64 = f.trim().parse().map_err(|_| SqcError::Parse {
                line: lineno,
                reason: format!("invalid feature value '{f}'"),
            })?;
            if v < 0 {
                return Err(SqcError::Parse {
                    line: lineno,
                    reason: format!("negative feature value {v}"),
                });
            }
            features.push(v as f64);
        }
        let label: u8 = fields[NUM_FEATURES].trim().parse().map_err(|_| SqcError::Parse {
            line: lineno,
            reason: format!("invalid label '{}'", fields[NUM_FEATURES]),
        })?;
        if label as usize >= NUM_CLASSES {
            return Err(SqcError::Parse {
                line: lineno,
                reason: format!("label {label} out of range 0..=9"),
            });
        }
        samples.push(Sample { features, label });
    }
    Ok(samples)
}

/// Split sizes and seed for dataset preparation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub seed: u64,
    pub train_per_class: usize,
    pub test_per_class: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            train_per_class: 160,
            test_per_class: 20,
        }
    }
}

/// Per-feature statistics fitted during preprocessing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Per-feature min of the standardized matrix (0 for constant features).
    pub min: Vec<f64>,
    /// Per-feature max of the standardized matrix (0 for constant features).
    pub max: Vec<f64>,
}

/// Prepared per-class data: normalized quantum states split into train
/// and test sets, with the statistics that produced them.
#[derive(Debug, Clone)]
pub struct PreparedSet {
    pub class_label: u8,
    pub train: Vec<PureState>,
    pub test: Vec<PureState>,
    pub stats: FeatureStats,
    pub seed: u64,
}

impl PreparedSet {
    /// JSON export with states as arrays of binary64 reals.
    pub fn to_json(&self) -> Result<String> {
        let as_reals = |states: &[PureState]| -> Vec<Vec<f64>> {
            states
                .iter()
                .map(|s| s.amplitudes().iter().map(|z| z.re).collect())
                .collect()
        };
        let shadow = PreparedSetJson {
            class_label: self.class_label,
            train: as_reals(&self.train),
            test: as_reals(&self.test),
            stats: self.stats.clone(),
            seed: self.seed,
        };
        Ok(serde_json::to_string_pretty(&shadow)?)
    }
}

#[derive(Serialize, Deserialize)]
struct PreparedSetJson {
    class_label: u8,
    train: Vec<Vec<f64>>,
    test: Vec<Vec<f64>>,
    stats: FeatureStats,
    seed: u64,
}

/// Scale all samples and split every class into train/test sets.
///
/// Deterministic: the same (samples, config) always produces the same
/// splits. Each class is shuffled with its own stream seeded from
/// `config.seed` and the class label.
pub fn preprocess(samples: &[Sample], config: &PreprocessConfig) -> Result<Vec<PreparedSet>> {
    let stats = fit_stats(samples);
    let scaled: Vec<(u8, Vec<f64>)> = samples
        .iter()
        .map(|s| (s.label, apply_stats(&s.features, &stats)))
        .collect();

    let mut sets = Vec::with_capacity(NUM_CLASSES);
    for label in 0..NUM_CLASSES as u8 {
        let class_rows: Vec<&Vec<f64>> = scaled
            .iter()
            .filter(|(l, _)| *l == label)
            .map(|(_, v)| v)
            .collect();
        let needed = config.train_per_class + config.test_per_class;
        if class_rows.len() < needed {
            return Err(SqcError::InsufficientSamples {
                label,
                available: class_rows.len(),
                needed,
            });
        }
        let mut order: Vec<usize> = (0..class_rows.len()).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed ^ (0x9e3779b97f4a7c15u64).wrapping_mul(label as u64 + 1));
        order.shuffle(&mut rng);

        let to_states = |indices: &[usize]| -> Result<Vec<PureState>> {
            indices
                .iter()
                .map(|&i| PureState::from_real_normalized(class_rows[i]))
                .collect()
        };
        let train = to_states(&order[..config.train_per_class])?;
        let test =
            to_states(&order[config.train_per_class..config.train_per_class + config.test_per_class])?;
        sets.push(PreparedSet {
            class_label: label,
            train,
            test,
            stats: stats.clone(),
            seed: config.seed,
        });
    }
    Ok(sets)
}

fn fit_stats(samples: &[Sample]) -> FeatureStats {
    let n = samples.len() as f64;
    let mut mean = vec![0.0; NUM_FEATURES];
    for s in samples {
        for (m, &v) in mean.iter_mut().zip(&s.features) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    let mut var = vec![0.0; NUM_FEATURES];
    for s in samples {
        for ((v, &x), m) in var.iter_mut().zip(&s.features).zip(&mean) {
            let d = x - m;
            *v += d * d;
        }
    }
    let std: Vec<f64> = var.iter().map(|v| (v / n).sqrt()).collect();

    let mut min = vec![f64::INFINITY; NUM_FEATURES];
    let mut max = vec![f64::NEG_INFINITY; NUM_FEATURES];
    for s in samples {
        for j in 0..NUM_FEATURES {
            if std[j] == 0.0 {
                continue;
            }
            let z = (s.features[j] - mean[j]) / std[j];
            min[j] = min[j].min(z);
            max[j] = max[j].max(z);
        }
    }
    for j in 0..NUM_FEATURES {
        if std[j] == 0.0 {
            min[j] = 0.0;
            max[j] = 0.0;
        }
    }
    FeatureStats {
        mean,
        std,
        min,
        max,
    }
}

fn apply_stats(features: &[f64], stats: &FeatureStats) -> Vec<f64> {
    features
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            if stats.std[j] == 0.0 {
                return 0.0;
            }
            let z = (x - stats.mean[j]) / stats.std[j];
            let range = stats.max[j] - stats.min[j];
            if range == 0.0 {
                0.0
            } else {
                ((z - stats.min[j]) / range).clamp(0.0, 1.0)
            }
        })
        .collect()
}

/// Renormalized component-wise mean of a set of nonnegative real states.
pub fn typical_state(train: &[PureState]) -> Result<PureState> {
    if train.is_empty() {
        return Err(SqcError::ZeroTypicalState);
    }
    let dim = train[0].dim();
    let mut mean = vec![0.0f64; dim];
    for state in train {
        if state.dim() != dim {
            return Err(SqcError::DimensionMismatch {
                expected: dim,
                got: state.dim(),
            });
        }
        for (m, a) in mean.iter_mut().zip(state.amplitudes()) {
            debug_assert!(a.im.abs() < 1e-12 && a.re >= -1e-12);
            *m += a.re;
        }
    }
    let norm = mean.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(SqcError::ZeroTypicalState);
    }
    PureState::from_real_normalized(&mean)
}

/// Running (pre-normalization) mean of a stream of states, updated as
/// `avg' = (M·avg + x) / (M + 1)`; `typical()` renormalizes. Matches the
/// batch computation to floating-point accuracy.
#[derive(Debug, Clone, Default)]
pub struct RunningMean {
    mean: Vec<f64>,
    count: usize,
}

impl RunningMean {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn push(&mut self, state: &PureState) -> Result<()> {
        if self.count == 0 {
            self.mean = state.amplitudes().iter().map(|z| z.re).collect();
            self.count = 1;
            return Ok(());
        }
        if self.mean.len() != state.dim() {
            return Err(SqcError::DimensionMismatch {
                expected: self.mean.len(),
                got: state.dim(),
            });
        }
        let m = self.count as f64;
        for (avg, a) in self.mean.iter_mut().zip(state.amplitudes()) {
            *avg = (m * *avg + a.re) / (m + 1.0);
        }
        self.count += 1;
        Ok(())
    }

    pub fn typical(&self) -> Result<PureState> {
        if self.count == 0 {
            return Err(SqcError::ZeroTypicalState);
        }
        PureState::from_real_normalized(&self.mean)
    }
}

/// One incremental-average step: given the pre-normalization mean of `m`
/// states, fold in one more and return the new mean plus its renormalized
/// typical state.
pub fn incremental_update(
    mean: &[f64],
    m: usize,
    new_state: &PureState,
) -> Result<(Vec<f64>, PureState)> {
    if mean.len() != new_state.dim() {
        return Err(SqcError::DimensionMismatch {
            expected: mean.len(),
            got: new_state.dim(),
        });
    }
    let mf = m as f64;
    let updated: Vec<f64> = mean
        .iter()
        .zip(new_state.amplitudes())
        .map(|(avg, a)| (mf * avg + a.re) / (mf + 1.0))
        .collect();
    let typical = PureState::from_real_normalized(&updated)?;
    Ok((updated, typical))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn sample_line(label: u8) -> String {
        let mut fields: Vec<String> = (0..NUM_FEATURES).map(|i| ((i * 3) % 17).to_string()).collect();
        fields.push(label.to_string());
        fields.join(",")
    }

    #[test]
    fn ingest_parses_well_formed_rows() {
        let text = format!("{}\n{}\n", sample_line(0), sample_line(6));
        let samples = ingest_reader(text.as_bytes()).unwrap();
        assert_eq!(samples.len(), 2);
        assert_eq!(samples[1].label, 6);
        assert_eq!(samples[0].features.len(), 64);
    }

    #[test]
    fn ingest_reports_line_numbers() {
        let text = format!("{}\n1,2,3\n", sample_line(0));
        match ingest_reader(text.as_bytes()) {
            Err(SqcError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn ingest_rejects_bad_labels() {
        let mut fields: Vec<String> = (0..NUM_FEATURES).map(|_| "1".to_string()).collect();
        fields.push("12".to_string());
        let text = fields.join(",");
        assert!(ingest_reader(text.as_bytes()).is_err());
    }

    fn synthetic_samples(per_class: usize) -> Vec<Sample> {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(99);
        let mut out = Vec::new();
        for label in 0..NUM_CLASSES as u8 {
            for _ in 0..per_class {
                let features: Vec<f64> = (0..NUM_FEATURES)
                    .map(|j| {
                        if j == 0 {
                            0.0 // constant column
                        } else {
                            (rng.gen_range(0..=16) as f64 + label as f64).min(16.0)
                        }
                    })
                    .collect();
                out.push(Sample { features, label });
            }
        }
        out
    }

    #[test]
    fn constant_features_stay_zero_and_states_are_unit_nonneg() {
        let samples = synthetic_samples(30);
        let config = PreprocessConfig {
            seed: 7,
            train_per_class: 20,
            test_per_class: 5,
        };
        let sets = preprocess(&samples, &config).unwrap();
        assert_eq!(sets.len(), NUM_CLASSES);
        for set in &sets {
            assert_eq!(set.train.len(), 20);
            assert_eq!(set.test.len(), 5);
            for state in set.train.iter().chain(&set.test) {
                let norm: f64 = state.amplitudes().iter().map(|z| z.norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-12);
                assert!(state.amplitudes()[0].re.abs() < 1e-15); // constant column
                for a in state.amplitudes() {
                    assert!(a.re >= -1e-12 && a.im == 0.0);
                }
            }
        }
    }

    #[test]
    fn preprocess_is_deterministic() {
        let samples = synthetic_samples(30);
        let config = PreprocessConfig {
            seed: 7,
            train_per_class: 20,
            test_per_class: 5,
        };
        let a = preprocess(&samples, &config).unwrap();
        let b = preprocess(&samples, &config).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for (s, t) in x.train.iter().zip(&y.train) {
                assert_eq!(s.amplitudes(), t.amplitudes());
            }
            for (s, t) in x.test.iter().zip(&y.test) {
                assert_eq!(s.amplitudes(), t.amplitudes());
            }
        }
    }

    #[test]
    fn preprocess_rejects_undersized_classes() {
        let samples = synthetic_samples(10);
        let config = PreprocessConfig {
            seed: 1,
            train_per_class: 20,
            test_per_class: 5,
        };
        assert!(matches!(
            preprocess(&samples, &config),
            Err(SqcError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn typical_state_basics() {
        let s = PureState::from_real_normalized(&[3.0, 4.0]).unwrap();
        let t = typical_state(std::slice::from_ref(&s)).unwrap();
        assert_eq!(t.amplitudes(), s.amplitudes());
        let t2 = typical_state(&[s.clone(), s.clone()]).unwrap();
        assert_eq!(t2.amplitudes(), s.amplitudes());

        let zero = PureState::basis_state(1, 0);
        let one = PureState::basis_state(1, 1);
        let sym = typical_state(&[zero, one]).unwrap();
        let v = 1.0 / 2.0_f64.sqrt();
        assert!((sym.amplitudes()[0].re - v).abs() < 1e-12);
        assert!((sym.amplitudes()[1].re - v).abs() < 1e-12);
    }

    #[test]
    fn incremental_update_matches_batch() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let states: Vec<PureState> = (0..50)
            .map(|_| {
                let raw: Vec<f64> = (0..8).map(|_| rng.gen::<f64>()).collect();
                PureState::from_real_normalized(&raw).unwrap()
            })
            .collect();
        let mut running = RunningMean::new();
        for s in &states {
            running.push(s).unwrap();
        }
        let incremental = running.typical().unwrap();
        let batch = typical_state(&states).unwrap();
        for (a, b) in incremental.amplitudes().iter().zip(batch.amplitudes()) {
            assert!((a.re - b.re).abs() < 1e-12);
        }
    }

    #[test]
    fn incremental_update_with_same_state_keeps_direction() {
        let s = PureState::from_real_normalized(&[1.0, 2.0, 2.0, 0.0]).unwrap();
        let mean: Vec<f64> = s.amplitudes().iter().map(|z| z.re).collect();
        let (_, typical) = incremental_update(&mean, 10, &s).unwrap();
        for (a, b) in typical.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a.re - b.re).abs() < 1e-12);
        }
    }

    #[test]
    fn average_minimizes_total_squared_distance() {
        // D(psi) = sum_i ||x_i - psi||^2 is minimized by the unnormalized
        // mean; any epsilon-perturbation can only increase it.
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(13);
        for _ in 0..20 {
            let states: Vec<Vec<f64>> = (0..12)
                .map(|_| (0..8).map(|_| rng.gen::<f64>()).collect())
                .collect();
            let mean: Vec<f64> = (0..8)
                .map(|j| states.iter().map(|s| s[j]).sum::<f64>() / states.len() as f64)
                .collect();
            let total = |point: &[f64]| -> f64 {
                states
                    .iter()
                    .map(|s| s.iter().zip(point).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                    .sum()
            };
            let base = total(&mean);
            for _ in 0..10 {
                let dir: Vec<f64> = (0..8).map(|_| rng.gen::<f64>() - 0.5).collect();
                let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                let perturbed: Vec<f64> = mean
                    .iter()
                    .zip(&dir)
                    .map(|(m, d)| m + 1e-3 * d / norm)
                    .collect();
                assert!(total(&perturbed) >= base);
            }
        }
    }
}
