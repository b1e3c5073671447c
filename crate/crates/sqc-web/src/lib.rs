//! Single-page browser demo of the Schmidt compressor.
//!
//! Three interactive operations are exported, all speaking JSON strings
//! so the page needs no binding layer:
//!
//! * [`analyze_state`] — Schmidt spectrum, measure, truncation-loss curve
//!   and best bipartitions of a drawn 8×8 image.
//! * [`CompressorDemo`] — a compressor built from one digit class of the
//!   embedded dataset; roundtrips drawn images through compression and
//!   reports the reconstruction and trash tomography.
//! * [`cnot_cost`] — the analytic circuit-cost explorer.
//!
//! A small slice of the handwritten-digits dataset (60 samples per class)
//! is embedded so the demo runs fully offline.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use sqc::classifier::extract_features;
use sqc::compressor::{CompressorModel, ReferencePolicy, TomographyMode};
use sqc::cost::{cnot_count, cost_of_model, CostReport};
use sqc::dataio::{ingest_reader, preprocess, typical_state, PreprocessConfig, Sample};
use sqc::schmidt::{schmidt_decompose, search_min_bond, truncate, Bipartition};
use sqc::state::PureState;

const EMBEDDED_CSV: &str = include_str!("../data/digits_subset.csv");
const NUM_QUBITS: usize = 6;

fn embedded_samples() -> Vec<Sample> {
    ingest_reader(EMBEDDED_CSV.as_bytes()).expect("embedded dataset parses")
}

fn state_from_pixels(pixels: &[f64]) -> Result<PureState, String> {
    if pixels.len() != 64 {
        return Err(format!("expected 64 pixel values, got {}", pixels.len()));
    }
    if pixels.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err("pixel values must be finite and nonnegative".into());
    }
    PureState::from_real_normalized(pixels).map_err(|e| e.to_string())
}

fn parse_pixels(json: &str) -> Result<Vec<f64>, String> {
    serde_json::from_str::<Vec<f64>>(json).map_err(|e| format!("bad pixel array: {e}"))
}

fn real_amplitudes(state: &PureState) -> Vec<f64> {
    state.amplitudes().iter().map(|z| z.re).collect()
}

#[derive(Serialize)]
struct SpectrumReport {
    lambdas: Vec<f64>,
    rank: usize,
    measure: usize,
    /// loss[r-1] = fidelity loss when keeping r coefficients
    truncation_loss: Vec<f64>,
    /// best bipartition (block B indices and rank) for each trash size
    best_blocks: Vec<BestBlock>,
    cost: CostReport,
}

#[derive(Serialize)]
struct BestBlock {
    trash_qubits: usize,
    block_b: Vec<usize>,
    rank: usize,
}

/// Schmidt analysis of a 64-pixel image state across the trailing
/// bipartition with `trash_qubits` trash qubits.
#[wasm_bindgen]
pub fn analyze_state(pixels_json: &str, trash_qubits: usize) -> Result<String, JsError> {
    analyze_state_impl(pixels_json, trash_qubits).map_err(|e| JsError::new(&e))
}

fn analyze_state_impl(pixels_json: &str, trash_qubits: usize) -> Result<String, String> {
    let pixels = parse_pixels(pixels_json)?;
    let state = state_from_pixels(&pixels)?;
    let part =
        Bipartition::trailing(NUM_QUBITS, trash_qubits).map_err(|e| e.to_string())?;
    let form = schmidt_decompose(&state, &part).map_err(|e| e.to_string())?;
    let truncation_loss: Vec<f64> = (1..=form.rank)
        .map(|r| truncate(&form, r).map(|(_, loss)| loss))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let best_blocks = (1..=NUM_QUBITS / 2)
        .map(|n_b| {
            search_min_bond(&state, n_b).map(|(p, rank)| BestBlock {
                trash_qubits: n_b,
                block_b: p.block_b().to_vec(),
                rank,
            })
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let cost = cnot_count(part.n_a(), part.n_b(), form.measure).map_err(|e| e.to_string())?;
    let report = SpectrumReport {
        lambdas: form.lambdas.clone(),
        rank: form.rank,
        measure: form.measure,
        truncation_loss,
        best_blocks,
        cost,
    };
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// Analytic CNOT count for block sizes and Schmidt measure.
#[wasm_bindgen]
pub fn cnot_cost(n_a: usize, n_b: usize, m: usize) -> Result<String, JsError> {
    let report = cnot_count(n_a, n_b, m).map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&report).map_err(|e| JsError::new(&e.to_string()))
}

/// A raw sample image from the embedded dataset (64 values in 0..=16).
#[wasm_bindgen]
pub fn sample_pixels(label: u8, index: usize) -> Result<String, JsError> {
    let samples = embedded_samples();
    let of_class: Vec<&Sample> = samples.iter().filter(|s| s.label == label).collect();
    if of_class.is_empty() {
        return Err(JsError::new(&format!("no samples with label {label}")));
    }
    let sample = of_class[index % of_class.len()];
    serde_json::to_string(&sample.features).map_err(|e| JsError::new(&e.to_string()))
}

#[derive(Serialize)]
struct RoundtripReport {
    fidelity: f64,
    /// normalized input amplitudes (the image the register actually holds)
    input_image: Vec<f64>,
    /// sqrt of the diagonal of the reconstructed density matrix
    reconstructed_image: Vec<f64>,
    /// per-trash-qubit tomography features (8 reals per qubit)
    trash_features: Vec<f64>,
    /// probability that the trash register reads |0...0>
    trash_zero_probability: f64,
}

/// Compressor built from the embedded samples of one digit class.
#[wasm_bindgen]
pub struct CompressorDemo {
    model: CompressorModel,
    class_label: u8,
}

#[wasm_bindgen]
impl CompressorDemo {
    /// Build from the class's typical state (mean of its prepared
    /// training samples) with the trailing `trash_qubits` qubits as trash.
    #[wasm_bindgen(constructor)]
    pub fn new(class_label: u8, trash_qubits: usize) -> Result<CompressorDemo, JsError> {
        Self::build(class_label, trash_qubits).map_err(JsError::from)
    }

    fn build(class_label: u8, trash_qubits: usize) -> Result<CompressorDemo, sqc::SqcError> {
        let samples = embedded_samples();
        let sets = preprocess(
            &samples,
            &PreprocessConfig {
                seed: 7,
                train_per_class: 50,
                test_per_class: 10,
            },
        )?;
        let typical = typical_state(&sets[class_label as usize].train)?;
        let part = Bipartition::trailing(NUM_QUBITS, trash_qubits)?;
        let model = CompressorModel::build(&typical, &part)?;
        Ok(CompressorDemo { model, class_label })
    }

    pub fn class_label(&self) -> u8 {
        self.class_label
    }

    /// The class prototype as a 64-value image.
    pub fn typical_image(&self) -> String {
        serde_json::to_string(&real_amplitudes(self.model.typical_state()))
            .expect("vector serializes")
    }

    /// Number of entangling CNOT pairs in the circuit.
    pub fn entangling_pairs(&self) -> usize {
        self.model.cnot_pairs().len()
    }

    /// Analytic CNOT cost of this compressor.
    pub fn cost(&self) -> String {
        serde_json::to_string(&cost_of_model(&self.model)).expect("report serializes")
    }

    /// Compress and decompress a drawn image under a reference policy
    /// ("zero", "opt1" or "opt2"); reports fidelity, the reconstructed
    /// image, and the trash tomography.
    pub fn roundtrip(&self, pixels_json: &str, policy: &str) -> Result<String, JsError> {
        self.roundtrip_impl(pixels_json, policy)
            .map_err(|e| JsError::new(&e))
    }

    fn roundtrip_impl(&self, pixels_json: &str, policy: &str) -> Result<String, String> {
        let pixels = parse_pixels(pixels_json)?;
        let input = state_from_pixels(&pixels)?;
        let policy: ReferencePolicy = policy.parse()?;
        let result = self
            .model
            .roundtrip(&input, policy)
            .map_err(|e| e.to_string())?;
        let reconstructed_image: Vec<f64> = (0..input.dim())
            .map(|i| result.rho_f.entries().get(i, i).re.max(0.0).sqrt())
            .collect();
        let features = extract_features(&self.model, &input, TomographyMode::Exact)
            .map_err(|e| e.to_string())?;
        let trash_zero_probability = result.rho_t.entries().get(0, 0).re;
        let report = RoundtripReport {
            fidelity: result.fidelity,
            input_image: real_amplitudes(&input),
            reconstructed_image,
            trash_features: features.values,
            trash_zero_probability,
        };
        serde_json::to_string(&report).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class_pixels(label: u8) -> Vec<f64> {
        let samples = embedded_samples();
        samples
            .iter()
            .find(|s| s.label == label)
            .unwrap()
            .features
            .clone()
    }

    #[test]
    fn embedded_dataset_parses() {
        let samples = embedded_samples();
        assert_eq!(samples.len(), 600);
        for label in 0..10u8 {
            assert_eq!(samples.iter().filter(|s| s.label == label).count(), 60);
        }
    }

    #[test]
    fn analyze_reports_full_spectrum_shape() {
        let pixels = serde_json::to_string(&class_pixels(0)).unwrap();
        let report: serde_json::Value =
            serde_json::from_str(&analyze_state_impl(&pixels, 3).unwrap()).unwrap();
        let lambdas = report["lambdas"].as_array().unwrap();
        assert_eq!(lambdas.len(), 8);
        let sq: f64 = lambdas
            .iter()
            .map(|l| l.as_f64().unwrap().powi(2))
            .sum();
        assert!((sq - 1.0).abs() < 1e-10);
        assert_eq!(report["best_blocks"].as_array().unwrap().len(), 3);
        let losses = report["truncation_loss"].as_array().unwrap();
        for pair in losses.windows(2) {
            assert!(pair[1].as_f64().unwrap() <= pair[0].as_f64().unwrap() + 1e-15);
        }
    }

    #[test]
    fn analyze_rejects_bad_input() {
        assert!(analyze_state_impl("[1, 2]", 3).is_err());
        assert!(analyze_state_impl("not json", 3).is_err());
        let zeros = serde_json::to_string(&vec![0.0; 64]).unwrap();
        assert!(analyze_state_impl(&zeros, 3).is_err());
    }

    #[test]
    fn demo_roundtrip_of_same_class_has_high_fidelity() {
        let demo = CompressorDemo::build(3, 3).unwrap();
        let typical: Vec<f64> =
            serde_json::from_str(&demo.typical_image()).unwrap();
        let report: serde_json::Value = serde_json::from_str(
            &demo
                .roundtrip_impl(&serde_json::to_string(&typical).unwrap(), "zero")
                .unwrap(),
        )
        .unwrap();
        assert!(report["fidelity"].as_f64().unwrap() >= 1.0 - 1e-10);
        assert!(report["trash_zero_probability"].as_f64().unwrap() >= 1.0 - 1e-10);

        let sample = serde_json::to_string(&class_pixels(3)).unwrap();
        let report: serde_json::Value =
            serde_json::from_str(&demo.roundtrip_impl(&sample, "opt1").unwrap()).unwrap();
        let fidelity = report["fidelity"].as_f64().unwrap();
        assert!(fidelity > 0.3, "fidelity {fidelity}");
        assert_eq!(report["reconstructed_image"].as_array().unwrap().len(), 64);
        assert_eq!(report["trash_features"].as_array().unwrap().len(), 24);
    }

    #[test]
    fn cost_explorer_matches_library() {
        let text = cnot_cost(3, 3, 3).unwrap();
        let report: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(report["total_ceil"], 43);
    }

    #[test]
    fn sample_pixels_returns_valid_images() {
        let text = sample_pixels(7, 2).unwrap();
        let pixels: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(pixels.len(), 64);
        assert!(pixels.iter().all(|p| (0.0..=16.0).contains(p)));
    }
}
