//! End-to-end runs on a labeled dataset: subsample → split → preprocess →
//! kernel → QUBO → anneal → evaluate, with JSON-serializable reports.
//!
//! Every report is a pure function of the input data and the configuration
//! (including its seed) once wall-clock fields are suppressed.

use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;

use crate::anneal::AnnealSchedule;
use crate::data::{prime_seeds, split, subsample, Dataset, Preprocessor};
use crate::error::{Error, Result};
use crate::featuremaps::{FeatureMapConfig, FeatureMapKind};
use crate::kernel::{default_gamma, kta, KernelConfig, KernelMatrix};
use crate::qubo::{bits_for, build_qubo};
use crate::simulator::{Simulator, DEFAULT_MAX_QUBITS};
use crate::svm::{fit_dual, train, Metrics, Solver, StageTimings, SvmModel, TrainConfig};

/// Kernel family selected on the command line; resolved against a qubit
/// count by [`KernelChoice::resolve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum KernelChoice {
    Quantum {
        feature_map: FeatureMapKind,
        repetitions: usize,
    },
    Linear,
    /// `gamma = None` uses `1 / q`.
    Rbf { gamma: Option<f64> },
}

impl KernelChoice {
    pub fn resolve(&self, qubits: usize) -> Result<KernelConfig> {
        Ok(match *self {
            KernelChoice::Quantum {
                feature_map,
                repetitions,
            } => KernelConfig::quantum(FeatureMapConfig::new(feature_map, qubits, repetitions)?),
            KernelChoice::Linear => KernelConfig::Linear,
            KernelChoice::Rbf { gamma } => KernelConfig::Rbf {
                gamma: gamma.unwrap_or_else(|| default_gamma(qubits)),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub subsample_size: usize,
    pub seeds_count: usize,
    pub seed: u64,
    pub test_fraction: f64,
    /// Qubits for quantum kernels; PCA components for every kernel.
    pub qubits: usize,
    pub kernel: KernelChoice,
    pub c_value: u64,
    pub penalty: f64,
    pub use_bias: bool,
    pub schedule: AnnealSchedule,
    pub max_qubits: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            subsample_size: 140,
            seeds_count: 10_000,
            seed: 42,
            test_fraction: 0.25,
            qubits: 8,
            kernel: KernelChoice::Quantum {
                feature_map: FeatureMapKind::Z,
                repetitions: 2,
            },
            c_value: 63,
            penalty: 1.0,
            use_bias: true,
            schedule: AnnealSchedule::default().with_seed(42),
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        bits_for(self.c_value)?;
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::argument(format!(
                "test fraction {} must lie in (0, 1)",
                self.test_fraction
            )));
        }
        if self.qubits == 0 {
            return Err(Error::argument("at least one qubit / component is required"));
        }
        if matches!(self.kernel, KernelChoice::Quantum { .. }) && self.qubits > self.max_qubits {
            return Err(Error::Resource(format!(
                "{} qubits exceed the cap of {} (pass --allow-large to lift it)",
                self.qubits, self.max_qubits
            )));
        }
        if self.seeds_count == 0 {
            return Err(Error::argument("seeds count must be at least 1"));
        }
        if !(self.penalty >= 0.0 && self.penalty.is_finite()) {
            return Err(Error::argument(format!("penalty {} must be >= 0", self.penalty)));
        }
        self.schedule.validate()
    }

    pub fn simulator(&self) -> Simulator {
        Simulator::with_max_qubits(self.max_qubits)
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        Ok(TrainConfig {
            kernel: self.kernel.resolve(self.qubits)?,
            components: self.qubits,
            c_value: self.c_value,
            penalty: self.penalty,
            use_bias: self.use_bias,
            solver: Solver::Anneal(self.schedule),
            simulator: self.simulator(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataSummary {
    pub rows_total: usize,
    pub subsample_size: usize,
    /// Prime seed of the chosen subsample; `None` when the full data was used.
    pub subsample_seed: Option<u64>,
    pub subsample_score: f64,
    pub train_size: usize,
    pub test_size: usize,
    pub train_positive: usize,
    pub test_positive: usize,
}

/// Train/test data derived from a full dataset.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train: Dataset,
    pub test: Dataset,
    pub summary: DataSummary,
}

/// Subsamples (when `subsample_size` is below the row count) with prime
/// seeds, then splits stratified by `seed`.
pub fn prepare_data(full: &Dataset, cfg: &ExperimentConfig) -> Result<PreparedData> {
    let (sample, seed, score) = if cfg.subsample_size < full.len() {
        let s = subsample(full, cfg.subsample_size, &prime_seeds(cfg.seeds_count))?;
        (s.dataset, Some(s.seed), s.score)
    } else {
        (full.clone(), None, 0.0)
    };
    let (train, test) = split(&sample, cfg.test_fraction, cfg.seed)?;
    let summary = DataSummary {
        rows_total: full.len(),
        subsample_size: sample.len(),
        subsample_seed: seed,
        subsample_score: score,
        train_size: train.len(),
        test_size: test.len(),
        train_positive: train.class_counts().0,
        test_positive: test.class_counts().0,
    };
    Ok(PreparedData {
        train,
        test,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    pub config: ExperimentConfig,
    pub kernel: KernelConfig,
    pub data: DataSummary,
    pub kta: f64,
    pub qubo_vars: usize,
    pub bits_per_alpha: u32,
    pub solver_energy: f64,
    pub energy_recomputed: f64,
    pub constraint_residual: f64,
    pub support_vectors: usize,
    pub bias: f64,
    pub train_metrics: Metrics,
    pub test_metrics: Metrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<StageTimings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
}

/// Trains on the prepared split and evaluates on both sides.
/// `wall_clock = false` leaves timing and timestamp fields out of the report.
pub fn run_train(
    full: &Dataset,
    cfg: &ExperimentConfig,
    wall_clock: bool,
) -> Result<(SvmModel, TrainReport)> {
    cfg.validate()?;
    let data = prepare_data(full, cfg)?;
    train_and_report(&data, cfg, wall_clock)
}

/// Like [`run_train`] on an explicit train/test pair, skipping subsampling.
pub fn run_train_split(
    train: &Dataset,
    test: &Dataset,
    cfg: &ExperimentConfig,
    wall_clock: bool,
) -> Result<(SvmModel, TrainReport)> {
    cfg.validate()?;
    let data = PreparedData {
        summary: DataSummary {
            rows_total: train.len() + test.len(),
            subsample_size: train.len() + test.len(),
            subsample_seed: None,
            subsample_score: 0.0,
            train_size: train.len(),
            test_size: test.len(),
            train_positive: train.class_counts().0,
            test_positive: test.class_counts().0,
        },
        train: train.clone(),
        test: test.clone(),
    };
    train_and_report(&data, cfg, wall_clock)
}

fn train_and_report(
    data: &PreparedData,
    cfg: &ExperimentConfig,
    wall_clock: bool,
) -> Result<(SvmModel, TrainReport)> {
    let tc = cfg.train_config()?;
    let out = train(&data.train, &tc)?;

    let problem = build_qubo(
        &out.gram,
        data.train.labels(),
        cfg.c_value,
        if cfg.use_bias { cfg.penalty } else { 0.0 },
    )?;
    let energy_recomputed = problem.energy(&out.fit.solution.bits)?;

    let report = TrainReport {
        config: cfg.clone(),
        kernel: tc.kernel,
        data: data.summary.clone(),
        kta: out.kta,
        qubo_vars: out.fit.num_vars,
        bits_per_alpha: bits_for(cfg.c_value)?,
        solver_energy: out.fit.solution.energy,
        energy_recomputed,
        constraint_residual: out.fit.residual,
        support_vectors: out.model.num_support(),
        bias: out.model.bias,
        train_metrics: out.model.evaluate(&data.train)?,
        test_metrics: out.model.evaluate(&data.test)?,
        timings: wall_clock.then_some(out.timings),
        generated_unix: wall_clock.then(unix_now),
    };
    Ok((out.model, report))
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Status of one sweep cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum CellStatus {
    Ok,
    SkippedResource,
    Failed(String),
}

impl From<CellStatus> for String {
    fn from(s: CellStatus) -> String {
        match s {
            CellStatus::Ok => "ok".into(),
            CellStatus::SkippedResource => "skipped: resource".into(),
            CellStatus::Failed(msg) => format!("failed: {msg}"),
        }
    }
}

impl CellStatus {
    fn from_error(e: &Error) -> Self {
        match e {
            Error::Resource(_) => CellStatus::SkippedResource,
            other => CellStatus::Failed(other.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        *self == CellStatus::Ok
    }
}

/// A kernel configuration in a sweep: qubit count plus kernel family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelCell {
    pub qubits: usize,
    pub kernel: KernelChoice,
}

impl KernelCell {
    /// Cartesian product `qubits × maps × repetitions` of quantum kernels.
    pub fn quantum_grid(qubits: &[usize], maps: &[FeatureMapKind], reps: &[usize]) -> Vec<Self> {
        let mut cells = Vec::new();
        for &q in qubits {
            for &m in maps {
                for &r in reps {
                    cells.push(KernelCell {
                        qubits: q,
                        kernel: KernelChoice::Quantum {
                            feature_map: m,
                            repetitions: r,
                        },
                    });
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KtaRow {
    pub qubits: usize,
    pub kernel: KernelChoice,
    pub kta: Option<f64>,
    pub status: CellStatus,
}

fn training_kernel(
    train: &Dataset,
    cell: &KernelCell,
    cfg: &ExperimentConfig,
) -> Result<(KernelConfig, KernelMatrix)> {
    let kernel = cell.kernel.resolve(cell.qubits)?;
    if kernel.num_qubits().is_some() {
        cfg.simulator().check_qubits(cell.qubits)?;
    }
    let pre = Preprocessor::fit(train, cell.qubits)?;
    let x = pre.transform(train.features().view())?;
    let gram = kernel.gram(x.view(), &cfg.simulator())?;
    Ok((kernel, gram))
}

/// KTA of every kernel cell on the training split, highest first; failed
/// cells follow in input order.
pub fn rank_kernels(full: &Dataset, cfg: &ExperimentConfig, cells: &[KernelCell]) -> Result<(DataSummary, Vec<KtaRow>)> {
    let data = prepare_data(full, cfg)?;
    let mut rows: Vec<KtaRow> = cells
        .iter()
        .map(|cell| {
            let result = training_kernel(&data.train, cell, cfg)
                .and_then(|(_, gram)| kta(&gram, data.train.labels()));
            match result {
                Ok(a) => KtaRow {
                    qubits: cell.qubits,
                    kernel: cell.kernel,
                    kta: Some(a),
                    status: CellStatus::Ok,
                },
                Err(e) => KtaRow {
                    qubits: cell.qubits,
                    kernel: cell.kernel,
                    kta: None,
                    status: CellStatus::from_error(&e),
                },
            }
        })
        .collect();
    rows.sort_by(|a, b| match (a.kta, b.kta) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    Ok((data.summary, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub qubits: usize,
    pub kernel: KernelChoice,
    pub c_value: u64,
    pub qubo_vars: usize,
    pub kta: Option<f64>,
    pub macro_f1: Option<f64>,
    pub accuracy: Option<f64>,
    pub energy: Option<f64>,
    pub constraint_residual: Option<f64>,
    pub status: CellStatus,
}

/// Trains and evaluates every `(kernel cell, C)` pair. Rows are sorted by
/// macro F1 descending, ties by smaller QUBO size; failed cells sort last.
/// One cell failing does not stop the sweep.
pub fn run_grid(
    full: &Dataset,
    cfg: &ExperimentConfig,
    cells: &[KernelCell],
    c_values: &[u64],
) -> Result<(DataSummary, Vec<GridRow>)> {
    if cells.is_empty() || c_values.is_empty() {
        return Err(Error::argument("grid ranges must be nonempty"));
    }
    for &c in c_values {
        bits_for(c)?;
    }
    let data = prepare_data(full, cfg)?;
    let n_train = data.train.len();
    let mut rows = Vec::with_capacity(cells.len() * c_values.len());

    for cell in cells {
        let failed = |c: u64, status: CellStatus| GridRow {
            qubits: cell.qubits,
            kernel: cell.kernel,
            c_value: c,
            qubo_vars: n_train * bits_for(c).unwrap_or(0) as usize,
            kta: None,
            macro_f1: None,
            accuracy: None,
            energy: None,
            constraint_residual: None,
            status,
        };
        let prepared = training_kernel(&data.train, cell, cfg).and_then(|(kernel, gram)| {
            let alignment = kta(&gram, data.train.labels())?;
            Ok((kernel, gram, alignment, Preprocessor::fit(&data.train, cell.qubits)?))
        });
        let (kernel, gram, alignment, pre) = match prepared {
            Ok(p) => p,
            Err(e) => {
                let status = CellStatus::from_error(&e);
                rows.extend(c_values.iter().map(|&c| failed(c, status.clone())));
                continue;
            }
        };
        let cell_rows: Vec<GridRow> = c_values
            .par_iter()
            .map(|&c| {
                let result = fit_dual(
                    &gram,
                    data.train.labels(),
                    c,
                    cfg.penalty,
                    cfg.use_bias,
                    &Solver::Anneal(cfg.schedule),
                )
                .and_then(|fit| {
                    let model = SvmModel::from_parts(
                        kernel,
                        pre.clone(),
                        &data.train,
                        &fit.alphas,
                        fit.bias,
                        c,
                        cfg.penalty,
                    )?;
                    Ok((fit, model.evaluate(&data.test)?))
                });
                match result {
                    Ok((fit, metrics)) => GridRow {
                        qubits: cell.qubits,
                        kernel: cell.kernel,
                        c_value: c,
                        qubo_vars: fit.num_vars,
                        kta: Some(alignment),
                        macro_f1: Some(metrics.macro_f1),
                        accuracy: Some(metrics.accuracy),
                        energy: Some(fit.solution.energy),
                        constraint_residual: Some(fit.residual),
                        status: CellStatus::Ok,
                    },
                    Err(e) => failed(c, CellStatus::from_error(&e)),
                }
            })
            .collect();
        rows.extend(cell_rows);
    }

    rows.sort_by(|a, b| {
        let key = |r: &GridRow| r.macro_f1.unwrap_or(f64::NEG_INFINITY);
        key(b)
            .total_cmp(&key(a))
            .then(a.qubo_vars.cmp(&b.qubo_vars))
    });
    Ok((data.summary, rows))
}
