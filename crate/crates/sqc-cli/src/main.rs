//! Command-line driver for the compressor benchmarks.
//!
//! Every experiment writes three artifacts into the output directory: a
//! CSV table, the same data as JSON, and the fully resolved configuration
//! (`config.json`). Runs are deterministic: the same configuration
//! produces byte-identical outputs.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use sqc::classifier::TrainConfig;
use sqc::compressor::{ReferencePolicy, TomographyMode};
use sqc::cost::{cnot_count, cost_of_model, CostReport};
use sqc::dataio::{ingest, Sample};
use sqc::experiments::{
    derive_seeds, run_fidelity_bench, run_qae_bench, ClassifyBenchConfig, FidelityBenchConfig,
    LabelPhiReport, QaeBenchConfig,
};
use sqc::qae::{OptimizerKind, QaeTrainConfig, ThetaInit};
use sqc::schmidt::search_min_bond;
use sqc::state::PureState;
use sqc::CompressorModel;

#[derive(Parser)]
#[command(
    name = "sqc",
    about = "Schmidt quantum compressor: fidelity benchmarks, one-class classification, CNOT cost model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Roundtrip-fidelity table per digit class and reference policy.
    FidelityBench(FidelityArgs),
    /// One-class classification phi table over reseeded repetitions.
    Classify(ClassifyArgs),
    /// Analytic CNOT count for block sizes (n_a, n_b) and measure m.
    Cost(CostArgs),
    /// Verify state preparation for a state file: bipartition search,
    /// reconstruction fidelity, and circuit cost.
    PrepVerify(PrepVerifyArgs),
    /// Autoencoder baseline vs compressor fidelity table.
    QaeBench(QaeArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Path to the optdigits-style CSV (65 comma-separated integers per row).
    #[arg(long, default_value = "data/optdigits.csv")]
    dataset: PathBuf,
    /// Root seed; all per-repetition seeds derive from it.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Training samples per class.
    #[arg(long, default_value_t = 150)]
    train_per_class: usize,
    /// Test samples per class.
    #[arg(long, default_value_t = 20)]
    test_per_class: usize,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct FidelityArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of train/test splits to average over.
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    /// Trash-block size (trailing qubits).
    #[arg(long, default_value_t = 3)]
    trash_qubits: usize,
    /// Reference policy: zero, opt1, opt2, or all.
    #[arg(long, default_value = "all")]
    policy: String,
    /// Estimate trash tomography from this many shots per Pauli basis
    /// instead of analytically.
    #[arg(long)]
    shots: Option<u64>,
    /// Also train and report the autoencoder baseline columns.
    #[arg(long)]
    with_qae: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Reseeded split/train repetitions per label.
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
    /// Trash-block size (trailing qubits).
    #[arg(long, default_value_t = 2)]
    trash_qubits: usize,
    /// Explicit comma-separated trash-qubit indices, e.g. "4,5";
    /// overrides --trash-qubits.
    #[arg(long, value_delimiter = ',')]
    trash_block: Option<Vec<usize>>,
    /// Adam learning rate.
    #[arg(long, default_value_t = 0.05)]
    learning_rate: f64,
    /// Adam iterations.
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    /// Batch size.
    #[arg(long, default_value_t = 25)]
    batch: usize,
    /// Decision threshold on the sigmoid output.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Estimate tomography features from shots instead of analytically.
    #[arg(long)]
    shots: Option<u64>,
}

#[derive(Args)]
struct CostArgs {
    /// Latent block size in qubits.
    #[arg(long)]
    na: usize,
    /// Trash block size in qubits.
    #[arg(long)]
    nb: usize,
    /// Schmidt measure.
    #[arg(long)]
    m: usize,
    /// Optional directory to also write cost.json into.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PrepVerifyArgs {
    /// JSON file holding the amplitude vector: an array of reals or of
    /// [re, im] pairs, normalized.
    #[arg(long)]
    state: PathBuf,
    /// Trash-block size to search over.
    #[arg(long, default_value_t = 1)]
    trash_qubits: usize,
    /// Optional directory to also write prep-verify.json into.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QaeArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of train/test splits.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    /// Trash-block size.
    #[arg(long, default_value_t = 3)]
    trash_qubits: usize,
    /// Entangling layers in the ansatz (9 gives 60 rotations / 45 CNOTs
    /// on 6 qubits).
    #[arg(long, default_value_t = 9)]
    entangling_layers: usize,
    /// Objective evaluation budget.
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    /// Optimizer: rotosolve or nelder-mead.
    #[arg(long, default_value = "rotosolve")]
    optimizer: OptimizerKind,
    /// Initial angles: zero or uniform.
    #[arg(long, default_value = "zero")]
    init: ThetaInit,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::FidelityBench(args) => fidelity_bench(args),
        Command::Classify(args) => classify(args),
        Command::Cost(args) => cost(args),
        Command::PrepVerify(args) => prep_verify(args),
        Command::QaeBench(args) => qae_bench(args),
    }
}

fn load_dataset(path: &Path) -> Result<Vec<Sample>> {
    ingest(path).with_context(|| {
        format!(
            "cannot read dataset at '{}'; pass --dataset or regenerate it with tools/make_dataset.py",
            path.display()
        )
    })
}

fn write_artifacts<T: Serialize, C: Serialize>(
    out: &Path,
    csv_name: &str,
    csv: &str,
    json_name: &str,
    data: &T,
    config: &C,
) -> Result<()> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory '{}'", out.display()))?;
    std::fs::write(out.join(csv_name), csv)?;
    std::fs::write(
        out.join(json_name),
        serde_json::to_string_pretty(data)? + "\n",
    )?;
    std::fs::write(
        out.join("config.json"),
        serde_json::to_string_pretty(config)? + "\n",
    )?;
    Ok(())
}

fn parse_policies(value: &str) -> Result<Vec<ReferencePolicy>> {
    if value == "all" {
        return Ok(vec![
            ReferencePolicy::Zero,
            ReferencePolicy::TopEigenvector,
            ReferencePolicy::PerQubitEigenvector,
        ]);
    }
    value.parse::<ReferencePolicy>()
        .map(|p| vec![p])
        .map_err(|e| anyhow::anyhow!(e))
}

fn policy_header(policy: ReferencePolicy) -> &'static str {
    match policy {
        ReferencePolicy::Zero => "Zero",
        ReferencePolicy::TopEigenvector => "Opt1",
        ReferencePolicy::PerQubitEigenvector => "Opt2",
    }
}

fn fidelity_bench(args: FidelityArgs) -> Result<()> {
    let samples = load_dataset(&args.data.dataset)?;
    let config = FidelityBenchConfig {
        root_seed: args.data.seed,
        num_seeds: args.seeds,
        train_per_class: args.data.train_per_class,
        test_per_class: args.data.test_per_class,
        trash_qubits: args.trash_qubits,
        policies: parse_policies(&args.policy)?,
        tomography: match args.shots {
            None => TomographyMode::Exact,
            Some(shots) => TomographyMode::Shots {
                shots,
                seed: args.data.seed,
            },
        },
    };
    let reports = run_fidelity_bench(&samples, &config)?;

    let qae_reports = if args.with_qae {
        let qae_config = QaeBenchConfig {
            root_seed: args.data.seed,
            num_seeds: 1,
            train_per_class: args.data.train_per_class,
            test_per_class: args.data.test_per_class,
            trash_qubits: args.trash_qubits,
            entangling_layers: 9,
            train: QaeTrainConfig::default(),
        };
        Some(run_qae_bench(&samples, &qae_config)?)
    } else {
        None
    };

    let mut csv = String::from("Label");
    for p in &config.policies {
        let name = policy_header(*p);
        csv.push_str(&format!(",{name} Avg,{name} Std"));
    }
    if qae_reports.is_some() {
        csv.push_str(",QAE Avg,QAE Std");
    }
    csv.push('\n');
    for report in &reports {
        csv.push_str(&report.label.to_string());
        for stat in &report.policies {
            csv.push_str(&format!(",{:.6},{:.6}", stat.mean, stat.std));
        }
        if let Some(qae) = &qae_reports {
            let q = &qae[report.label as usize];
            csv.push_str(&format!(",{:.6},{:.6}", q.qae_mean, q.qae_std));
        }
        csv.push('\n');
    }

    #[derive(Serialize)]
    struct Output<'a> {
        fidelity: &'a [sqc::experiments::LabelFidelityReport],
        #[serde(skip_serializing_if = "Option::is_none")]
        qae: Option<&'a [sqc::experiments::LabelQaeReport]>,
    }
    write_artifacts(
        &args.data.out,
        "fidelity.csv",
        &csv,
        "fidelity.json",
        &Output {
            fidelity: &reports,
            qae: qae_reports.as_deref(),
        },
        &config,
    )?;
    print!("{csv}");
    Ok(())
}

fn classify(args: ClassifyArgs) -> Result<()> {
    let samples = load_dataset(&args.data.dataset)?;
    let config = ClassifyBenchConfig {
        root_seed: args.data.seed,
        repetitions: args.repetitions,
        train_per_class: args.data.train_per_class,
        test_per_class: args.data.test_per_class,
        trash_qubits: args
            .trash_block
            .as_ref()
            .map_or(args.trash_qubits, Vec::len),
        trash_block: args.trash_block,
        threshold: args.threshold,
        train: TrainConfig {
            learning_rate: args.learning_rate,
            iterations: args.iterations,
            batch_size: args.batch,
            ..TrainConfig::default()
        },
        tomography_shots: args.shots,
    };

    // labels are independent; run them on the worker pool and gather in
    // label order
    let seeds = derive_seeds(config.root_seed, config.repetitions);
    let reports = (0..sqc::dataio::NUM_CLASSES as u8)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&label| -> Result<LabelPhiReport> {
            let mut phis = Vec::new();
            let mut confusions = Vec::new();
            for &seed in &seeds {
                let counts =
                    sqc::experiments::one_class_repetition(&samples, label, seed, &config)?;
                phis.push(sqc::classifier::phi_coefficient(&counts));
                confusions.push(counts);
            }
            let n = phis.len() as f64;
            let mean = phis.iter().sum::<f64>() / n;
            let std =
                (phis.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / n).sqrt();
            Ok(LabelPhiReport {
                label,
                mean,
                std,
                per_repetition: phis,
                confusions,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv = String::from("Label,Avg,Std\n");
    for report in &reports {
        csv.push_str(&format!(
            "{},{:.6},{:.6}\n",
            report.label, report.mean, report.std
        ));
    }
    write_artifacts(
        &args.data.out,
        "classify.csv",
        &csv,
        "classify.json",
        &reports,
        &config,
    )?;
    print!("{csv}");
    Ok(())
}

fn cost(args: CostArgs) -> Result<()> {
    let report = cnot_count(args.na, args.nb, args.m)?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        std::fs::write(out.join("cost.json"), &text)?;
    }
    print!("{text}");
    Ok(())
}

fn read_state_file(path: &Path) -> Result<PureState> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read state file '{}'", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let array = value
        .as_array()
        .context("state file must hold a JSON array")?;
    let mut amplitudes = Vec::with_capacity(array.len());
    for entry in array {
        let amp = match entry {
            serde_json::Value::Number(n) => num_complex::Complex64::new(
                n.as_f64().context("non-finite amplitude")?,
                0.0,
            ),
            serde_json::Value::Array(pair) if pair.len() == 2 => num_complex::Complex64::new(
                pair[0].as_f64().context("non-finite amplitude")?,
                pair[1].as_f64().context("non-finite amplitude")?,
            ),
            other => bail!("amplitude entries must be numbers or [re, im] pairs, got {other}"),
        };
        amplitudes.push(amp);
    }
    let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    PureState::new(amplitudes)
        .with_context(|| format!("state vector rejected (norm = {norm:.12})"))
}

#[derive(Serialize)]
struct PrepVerifyReport {
    num_qubits: usize,
    trash_qubits: usize,
    block_a: Vec<usize>,
    block_b: Vec<usize>,
    rank: usize,
    measure: usize,
    reconstruction_fidelity: f64,
    cost: CostReport,
}

fn prep_verify(args: PrepVerifyArgs) -> Result<()> {
    let state = read_state_file(&args.state)?;
    let (part, rank) = search_min_bond(&state, args.trash_qubits)?;
    let model = CompressorModel::build(&state, &part)?;
    let prep = sqc::compressor::state_preparation(&state, &part)?;
    let zero = PureState::basis_state(state.num_qubits(), 0);
    let prepared = prep.matvec(zero.amplitudes())?;
    let overlap: num_complex::Complex64 = state
        .amplitudes()
        .iter()
        .zip(&prepared)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let report = PrepVerifyReport {
        num_qubits: state.num_qubits(),
        trash_qubits: args.trash_qubits,
        block_a: part.block_a().to_vec(),
        block_b: part.block_b().to_vec(),
        rank,
        measure: model.schmidt().measure,
        reconstruction_fidelity: overlap.norm_sqr(),
        cost: cost_of_model(&model),
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        std::fs::write(out.join("prep-verify.json"), &text)?;
    }
    print!("{text}");
    Ok(())
}

fn qae_bench(args: QaeArgs) -> Result<()> {
    let samples = load_dataset(&args.data.dataset)?;
    let config = QaeBenchConfig {
        root_seed: args.data.seed,
        num_seeds: args.seeds,
        train_per_class: args.data.train_per_class,
        test_per_class: args.data.test_per_class,
        trash_qubits: args.trash_qubits,
        entangling_layers: args.entangling_layers,
        train: QaeTrainConfig {
            budget: args.budget,
            optimizer: args.optimizer,
            init: args.init,
            seed: args.data.seed,
        },
    };
    let reports = run_qae_bench(&samples, &config)?;

    let mut csv = String::from("Label,QAE Avg,QAE Std,SQC Avg,SQC Std\n");
    for report in &reports {
        csv.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6}\n",
            report.label, report.qae_mean, report.qae_std, report.sqc_mean, report.sqc_std
        ));
    }
    write_artifacts(
        &args.data.out,
        "qae.csv",
        &csv,
        "qae.json",
        &reports,
        &config,
    )?;
    print!("{csv}");
    Ok(())
}
