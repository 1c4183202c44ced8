//! Kernel SVM classifiers trained through the QUBO route.
//!
//! Training runs kernel → QUBO → solver → decoded integer multipliers →
//! bias. The decision function is `f(x) = Σ_i α_i y_i k(x, x_i) + b`, and a
//! prediction is `+1` when `f(x) ≥ 0`.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::anneal::{brute_force, solve_sa, AnnealSchedule};
use crate::data::{AngleScaler, Dataset, PcaModel, Preprocessor, Standardizer, NEGATIVE, POSITIVE};
use crate::error::{Error, Result};
use crate::kernel::{kta, KernelConfig, KernelMatrix};
use crate::qubo::{build_qubo, constraint_residual, BinarySolution};
use crate::simulator::{Simulator, DEFAULT_MAX_QUBITS};

/// Model file format version written by [`SvmModel::to_json`].
pub const MODEL_VERSION: u32 = 1;

/// `b = mean_{j∈S} (y_j − Σ_i α_i y_i K_ij)` over margin vectors
/// `S = {0 < α_j < C}`, falling back to all support vectors, then to 0.
pub fn compute_bias(alphas: &[u64], y: &[i8], k: &KernelMatrix, c_value: u64) -> f64 {
    let margin: Vec<usize> = (0..alphas.len())
        .filter(|&j| alphas[j] > 0 && alphas[j] < c_value)
        .collect();
    let anchors = if margin.is_empty() {
        (0..alphas.len()).filter(|&j| alphas[j] > 0).collect()
    } else {
        margin
    };
    if anchors.is_empty() {
        return 0.0;
    }
    let total: f64 = anchors
        .iter()
        .map(|&j| {
            let f: f64 = (0..alphas.len())
                .map(|i| alphas[i] as f64 * f64::from(y[i]) * k.get(i, j))
                .sum();
            f64::from(y[j]) - f
        })
        .sum();
    total / anchors.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Solver {
    Anneal(AnnealSchedule),
    BruteForce,
}

impl Solver {
    pub fn solve(&self, problem: &crate::qubo::QuboProblem) -> Result<BinarySolution> {
        match self {
            Solver::Anneal(s) => solve_sa(problem, s),
            Solver::BruteForce => brute_force(problem),
        }
    }
}

/// Solution of the dual on a fixed Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFit {
    pub alphas: Vec<u64>,
    pub bias: f64,
    pub solution: BinarySolution,
    pub num_vars: usize,
    /// `Σ_i α_i y_i`
    pub residual: f64,
    pub solve_time: Duration,
}

/// Compiles and solves the dual for `gram`. With `use_bias = false` the
/// equality penalty is dropped (λ = 0) and the bias is fixed at 0.
pub fn fit_dual(
    gram: &KernelMatrix,
    y: &[i8],
    c_value: u64,
    penalty: f64,
    use_bias: bool,
    solver: &Solver,
) -> Result<DualFit> {
    let lambda = if use_bias { penalty } else { 0.0 };
    let problem = build_qubo(gram, y, c_value, lambda)?;
    let start = Instant::now();
    let solution = solver.solve(&problem)?;
    let solve_time = start.elapsed();
    let alphas = problem.decode(&solution)?;
    let bias = if use_bias {
        compute_bias(&alphas, y, gram, c_value)
    } else {
        0.0
    };
    let as_f64: Vec<f64> = alphas.iter().map(|&a| a as f64).collect();
    Ok(DualFit {
        residual: constraint_residual(&as_f64, y),
        alphas,
        bias,
        solution,
        num_vars: problem.num_vars(),
        solve_time,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub kernel: KernelConfig,
    /// PCA components kept; equals the qubit count for quantum kernels.
    pub components: usize,
    pub c_value: u64,
    pub penalty: f64,
    pub use_bias: bool,
    pub solver: Solver,
    pub simulator: Simulator,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub preprocess_s: f64,
    pub kernel_s: f64,
    pub qubo_solve_s: f64,
}

/// A trained model plus what the training run learned about itself.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: SvmModel,
    pub gram: KernelMatrix,
    pub kta: f64,
    pub fit: DualFit,
    pub timings: StageTimings,
}

/// Fits preprocessing on `train`, builds the training kernel, and solves the
/// QUBO dual.
pub fn train(train: &Dataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    train.ensure_trainable()?;
    if let Some(q) = cfg.kernel.num_qubits() {
        if q != cfg.components {
            return Err(Error::argument(format!(
                "a {q}-qubit feature map needs {q} input components, got {}",
                cfg.components
            )));
        }
    }
    let t0 = Instant::now();
    let preprocessing = Preprocessor::fit(train, cfg.components)?;
    let x = preprocessing.transform(train.features().view())?;
    let t1 = Instant::now();
    let gram = cfg.kernel.gram(x.view(), &cfg.simulator)?;
    let alignment = kta(&gram, train.labels())?;
    let t2 = Instant::now();
    let fit = fit_dual(
        &gram,
        train.labels(),
        cfg.c_value,
        cfg.penalty,
        cfg.use_bias,
        &cfg.solver,
    )?;
    let t3 = Instant::now();

    let model = SvmModel::from_parts(
        cfg.kernel,
        preprocessing,
        train,
        &fit.alphas,
        fit.bias,
        cfg.c_value,
        cfg.penalty,
    )?;
    Ok(TrainOutcome {
        model,
        gram,
        kta: alignment,
        timings: StageTimings {
            preprocess_s: (t1 - t0).as_secs_f64(),
            kernel_s: (t2 - t1).as_secs_f64(),
            qubo_solve_s: (t3 - t2).as_secs_f64(),
        },
        fit,
    })
}

/// A self-contained classifier: raw-space support vectors plus the fitted
/// preprocessing needed to embed new inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub kernel: KernelConfig,
    pub c_value: u64,
    pub penalty: f64,
    pub alphas: Vec<u64>,
    pub bias: f64,
    /// Raw rows with `α_i > 0`, in training order.
    pub support_vectors: Array2<f64>,
    pub support_labels: Vec<i8>,
    pub preprocessing: Preprocessor,
    embedded_support: Array2<f64>,
}

impl SvmModel {
    pub fn from_parts(
        kernel: KernelConfig,
        preprocessing: Preprocessor,
        train: &Dataset,
        alphas: &[u64],
        bias: f64,
        c_value: u64,
        penalty: f64,
    ) -> Result<Self> {
        if alphas.len() != train.len() {
            return Err(Error::DimensionMismatch {
                expected: train.len(),
                found: alphas.len(),
            });
        }
        let support: Vec<usize> = (0..alphas.len()).filter(|&i| alphas[i] > 0).collect();
        let sv = train.select(&support);
        Self::assemble(
            kernel,
            preprocessing,
            alphas.to_vec(),
            bias,
            sv.features().clone(),
            sv.labels().to_vec(),
            c_value,
            penalty,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kernel: KernelConfig,
        preprocessing: Preprocessor,
        alphas: Vec<u64>,
        bias: f64,
        support_vectors: Array2<f64>,
        support_labels: Vec<i8>,
        c_value: u64,
        penalty: f64,
    ) -> Result<Self> {
        let n_support = alphas.iter().filter(|&&a| a > 0).count();
        if support_vectors.nrows() != n_support || support_labels.len() != n_support {
            return Err(Error::Model(format!(
                "{n_support} nonzero alphas but {} support vectors and {} labels",
                support_vectors.nrows(),
                support_labels.len()
            )));
        }
        if let Some(a) = alphas.iter().find(|&&a| a > c_value) {
            return Err(Error::Model(format!("alpha {a} exceeds C = {c_value}")));
        }
        if support_labels.iter().any(|&l| l != POSITIVE && l != NEGATIVE) {
            return Err(Error::Model("support labels must be -1 or +1".into()));
        }
        if support_vectors.ncols() != preprocessing.input_dim() {
            return Err(Error::Model(format!(
                "support vectors have {} features, preprocessing expects {}",
                support_vectors.ncols(),
                preprocessing.input_dim()
            )));
        }
        let embedded_support = preprocessing.transform(support_vectors.view())?;
        Ok(Self {
            kernel,
            c_value,
            penalty,
            alphas,
            bias,
            support_vectors,
            support_labels,
            preprocessing,
            embedded_support,
        })
    }

    fn simulator(&self) -> Simulator {
        let q = self.kernel.num_qubits().unwrap_or(0);
        Simulator::with_max_qubits(q.max(DEFAULT_MAX_QUBITS))
    }

    pub fn num_support(&self) -> usize {
        self.support_labels.len()
    }

    /// `f(x)` for every raw row of `x`.
    pub fn decision_values(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.preprocessing.input_dim() {
            return Err(Error::Model(format!(
                "input has {} features, model expects {}",
                x.ncols(),
                self.preprocessing.input_dim()
            )));
        }
        let weights: Vec<f64> = self
            .alphas
            .iter()
            .filter(|&&a| a > 0)
            .zip(&self.support_labels)
            .map(|(&a, &l)| a as f64 * f64::from(l))
            .collect();
        if weights.is_empty() {
            return Ok(vec![self.bias; x.nrows()]);
        }
        let embedded = self.preprocessing.transform(x)?;
        let k = self
            .kernel
            .cross(embedded.view(), self.embedded_support.view(), &self.simulator())?;
        Ok(k
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(&weights).map(|(k, w)| k * w).sum::<f64>() + self.bias)
            .collect())
    }

    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        let row = ArrayView2::from_shape((1, x.len()), x).expect("contiguous slice");
        Ok(self.decision_values(row)?[0])
    }

    pub fn predict(&self, x: &[f64]) -> Result<i8> {
        Ok(sign(self.decision_value(x)?))
    }

    pub fn predict_many(&self, x: ArrayView2<f64>) -> Result<Vec<i8>> {
        Ok(self.decision_values(x)?.into_iter().map(sign).collect())
    }

    pub fn evaluate(&self, test: &Dataset) -> Result<Metrics> {
        let predicted = self.predict_many(test.features().view())?;
        Ok(Metrics::from_predictions(test.labels(), &predicted))
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            version: MODEL_VERSION,
            kernel_config: self.kernel,
            c_value: self.c_value,
            penalty: self.penalty,
            alphas: self.alphas.clone(),
            bias: self.bias,
            support_vectors: rows(&self.support_vectors),
            support_labels: self.support_labels.clone(),
            preprocessing: PreprocessingFile {
                mean: self.preprocessing.standardizer.mean.clone(),
                std: self.preprocessing.standardizer.std.clone(),
                pca_mean: self.preprocessing.pca.mean.clone(),
                pca_components: rows(&self.preprocessing.pca.components),
                explained_variance_ratio: self.preprocessing.pca.explained_variance_ratio.clone(),
                angle_min: self.preprocessing.angles.min.clone(),
                angle_max: self.preprocessing.angles.max.clone(),
                angle_lo: self.preprocessing.angles.lo,
                angle_hi: self.preprocessing.angles.hi,
            },
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        let version = value
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Model("missing version field".into()))?;
        if version != u64::from(MODEL_VERSION) {
            return Err(Error::Version {
                found: version as u32,
                expected: MODEL_VERSION,
            });
        }
        let file: ModelFile =
            serde_json::from_value(value).map_err(|e| Error::Model(e.to_string()))?;
        let p = file.preprocessing;
        let preprocessing = Preprocessor {
            standardizer: Standardizer {
                mean: p.mean,
                std: p.std,
            },
            pca: PcaModel {
                mean: p.pca_mean,
                components: matrix(&p.pca_components, "pca_components")?,
                explained_variance_ratio: p.explained_variance_ratio,
            },
            angles: AngleScaler {
                min: p.angle_min,
                max: p.angle_max,
                lo: p.angle_lo,
                hi: p.angle_hi,
            },
        };
        let d = preprocessing.input_dim();
        let q = preprocessing.output_dim();
        if preprocessing.standardizer.std.len() != d
            || preprocessing.pca.mean.len() != d
            || preprocessing.pca.components.ncols() != d
            || preprocessing.angles.min.len() != q
            || preprocessing.angles.max.len() != q
        {
            return Err(Error::Model("preprocessing dimensions are inconsistent".into()));
        }
        let support_vectors = if file.support_vectors.is_empty() {
            Array2::zeros((0, d))
        } else {
            matrix(&file.support_vectors, "support_vectors")?
        };
        Self::assemble(
            file.kernel_config,
            preprocessing,
            file.alphas,
            file.bias,
            support_vectors,
            file.support_labels,
            file.c_value,
            file.penalty,
        )
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// `+1` for `f ≥ 0` (ties go to the positive class), `−1` otherwise.
pub fn sign(f: f64) -> i8 {
    if f >= 0.0 {
        POSITIVE
    } else {
        NEGATIVE
    }
}

fn rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<Array2<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Model(format!("{what} rows have unequal lengths")));
    }
    Array2::from_shape_vec((rows.len(), ncols), rows.concat())
        .map_err(|e| Error::Model(format!("{what}: {e}")))
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    kernel_config: KernelConfig,
    c_value: u64,
    penalty: f64,
    alphas: Vec<u64>,
    bias: f64,
    support_vectors: Vec<Vec<f64>>,
    support_labels: Vec<i8>,
    preprocessing: PreprocessingFile,
}

#[derive(Serialize, Deserialize)]
struct PreprocessingFile {
    mean: Vec<f64>,
    std: Vec<f64>,
    pca_mean: Vec<f64>,
    pca_components: Vec<Vec<f64>>,
    #[serde(default)]
    explained_variance_ratio: Vec<f64>,
    angle_min: Vec<f64>,
    angle_max: Vec<f64>,
    #[serde(default)]
    angle_lo: f64,
    #[serde(default = "pi")]
    angle_hi: f64,
}

fn pi() -> f64 {
    std::f64::consts::PI
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub true_positive: usize,
    pub false_positive: usize,
    pub false_negative: usize,
    pub true_negative: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.true_positive + self.false_positive + self.false_negative + self.true_negative
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ClassMetrics {
    fn from_counts(hit: usize, false_alarm: usize, miss: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(hit, hit + false_alarm);
        let recall = ratio(hit, hit + miss);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            precision,
            recall,
            f1,
        }
    }
}

/// Binary classification metrics with `+1` as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub confusion: Confusion,
    pub positive: ClassMetrics,
    pub negative: ClassMetrics,
    pub macro_f1: f64,
    pub accuracy: f64,
}

impl Metrics {
    pub fn from_confusion(confusion: Confusion) -> Self {
        let Confusion {
            true_positive: tp,
            false_positive: fp,
            false_negative: fn_,
            true_negative: tn,
        } = confusion;
        let positive = ClassMetrics::from_counts(tp, fp, fn_);
        let negative = ClassMetrics::from_counts(tn, fn_, fp);
        let total = confusion.total();
        Self {
            confusion,
            positive,
            negative,
            macro_f1: 0.5 * (positive.f1 + negative.f1),
            accuracy: if total == 0 {
                0.0
            } else {
                (tp + tn) as f64 / total as f64
            },
        }
    }

    pub fn from_predictions(truth: &[i8], predicted: &[i8]) -> Self {
        let mut c = Confusion {
            true_positive: 0,
            false_positive: 0,
            false_negative: 0,
            true_negative: 0,
        };
        for (&t, &p) in truth.iter().zip(predicted) {
            match (t == POSITIVE, p == POSITIVE) {
                (true, true) => c.true_positive += 1,
                (false, true) => c.false_positive += 1,
                (true, false) => c.false_negative += 1,
                (false, false) => c.true_negative += 1,
            }
        }
        Self::from_confusion(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featuremaps::{FeatureMapConfig, FeatureMapKind};
    use ndarray::{array, Array2};

    fn km(v: Array2<f64>) -> KernelMatrix {
        KernelMatrix::new(v, "t").unwrap()
    }

    #[test]
    fn bias_examples() {
        assert_eq!(compute_bias(&[1], &[1], &km(array![[1.0]]), 3), 0.0);
        assert_eq!(compute_bias(&[0, 0], &[1, -1], &km(Array2::eye(2)), 3), 0.0);
        assert_eq!(compute_bias(&[1, 1], &[1, -1], &km(Array2::eye(2)), 3), 0.0);
        // Only bound vectors (α = C): falls back to all support vectors.
        let b = compute_bias(&[3, 0], &[1, -1], &km(array![[0.5, 0.0], [0.0, 1.0]]), 3);
        assert_eq!(b, 1.0 - 1.5);
    }

    #[test]
    fn metrics_formulae() {
        let m = Metrics::from_confusion(Confusion {
            true_positive: 4,
            false_positive: 1,
            false_negative: 2,
            true_negative: 3,
        });
        assert!((m.positive.precision - 0.8).abs() < 1e-15);
        assert!((m.positive.recall - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.positive.f1 - 8.0 / 11.0).abs() < 1e-15);
        assert!((m.negative.precision - 0.6).abs() < 1e-15);
        assert!((m.negative.recall - 0.75).abs() < 1e-15);
        assert_eq!(m.confusion.total(), 10);

        let truth = [1, -1, 1, -1];
        assert_eq!(Metrics::from_predictions(&truth, &truth).macro_f1, 1.0);
        let wrong = [-1, 1, -1, 1];
        assert_eq!(Metrics::from_predictions(&truth, &wrong).macro_f1, 0.0);
    }

    #[test]
    fn sign_tie_rule() {
        assert_eq!(sign(2.3), 1);
        assert_eq!(sign(-0.1), -1);
        assert_eq!(sign(0.0), 1);
    }

    fn toy() -> Dataset {
        let x = array![
            [0.0, 0.1],
            [0.3, 0.2],
            [0.6, 0.7],
            [2.0, 2.1],
            [2.3, 2.2],
            [2.6, 2.7]
        ];
        Dataset::new(x, vec![-1, -1, -1, 1, 1, 1]).unwrap()
    }

    fn linear_cfg(solver: Solver) -> TrainConfig {
        TrainConfig {
            kernel: KernelConfig::Linear,
            components: 1,
            c_value: 3,
            penalty: 1.0,
            use_bias: true,
            solver,
            simulator: Simulator::default(),
        }
    }

    #[test]
    fn zero_alphas_give_constant_bias() {
        let ds = toy();
        let pre = Preprocessor::fit(&ds, 2).unwrap();
        let m = SvmModel::from_parts(KernelConfig::Linear, pre, &ds, &[0; 6], 0.25, 3, 1.0).unwrap();
        for row in ds.features().rows() {
            assert_eq!(m.decision_value(&row.to_vec()).unwrap(), 0.25);
        }
    }

    #[test]
    fn decision_value_is_linear_in_parameters() {
        let ds = toy();
        let pre = Preprocessor::fit(&ds, 2).unwrap();
        let a = [1, 0, 2, 0, 1, 3];
        let m1 = SvmModel::from_parts(KernelConfig::Linear, pre.clone(), &ds, &a, 0.3, 7, 1.0).unwrap();
        let doubled: Vec<u64> = a.iter().map(|x| 2 * x).collect();
        let m2 = SvmModel::from_parts(KernelConfig::Linear, pre, &ds, &doubled, 0.6, 7, 1.0).unwrap();
        let probe = [1.5, 0.7];
        let f1 = m1.decision_value(&probe).unwrap();
        let f2 = m2.decision_value(&probe).unwrap();
        assert!((f2 - 2.0 * f1).abs() < 1e-12);
        assert_eq!(m1.predict(&probe).unwrap(), sign(f1));
    }

    #[test]
    fn trains_on_separable_toy() {
        let ds = toy();
        let out = train(&ds, &linear_cfg(Solver::BruteForce)).unwrap();
        let m = out.model.evaluate(&ds).unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert!(out.kta > 0.0);
    }

    #[test]
    fn single_class_rejected() {
        let ds = Dataset::new(array![[0.0, 1.0], [1.0, 0.0]], vec![1, 1]).unwrap();
        assert!(train(&ds, &linear_cfg(Solver::BruteForce)).is_err());
    }

    #[test]
    fn qubit_count_must_match_components() {
        let mut cfg = linear_cfg(Solver::BruteForce);
        cfg.kernel = KernelConfig::quantum(FeatureMapConfig::new(FeatureMapKind::Z, 3, 1).unwrap());
        assert!(train(&toy(), &cfg).is_err());
    }

    #[test]
    fn sa_energy_bounded_by_brute_force() {
        let ds = toy().select(&[0, 1, 3, 4]);
        let exact = train(&ds, &linear_cfg(Solver::BruteForce)).unwrap();
        let sa = train(
            &ds,
            &linear_cfg(Solver::Anneal(AnnealSchedule {
                sweeps: 100,
                ..Default::default()
            })),
        )
        .unwrap();
        assert!(exact.fit.solution.energy <= sa.fit.solution.energy + 1e-9);
    }

    #[test]
    fn model_json_round_trip_preserves_predictions() {
        let ds = toy();
        let mut cfg = linear_cfg(Solver::BruteForce);
        cfg.kernel = KernelConfig::quantum(FeatureMapConfig::new(FeatureMapKind::Zz, 2, 2).unwrap());
        cfg.components = 2;
        let m = train(&ds, &cfg).unwrap().model;
        let back = SvmModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let probes = Array2::from_shape_fn((25, 2), |(i, j)| (i as f64 * 0.17 + j as f64 * 0.9) % 3.5);
        assert_eq!(
            back.decision_values(probes.view()).unwrap(),
            m.decision_values(probes.view()).unwrap()
        );
    }

    #[test]
    fn model_json_errors() {
        let ds = toy();
        let m = train(&ds, &linear_cfg(Solver::BruteForce)).unwrap().model;
        let text = m.to_json().replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(matches!(
            SvmModel::from_json(&text),
            Err(Error::Version { found: 2, expected: 1 })
        ));
        assert!(matches!(SvmModel::from_json("{"), Err(Error::Model(_))));
        let mut v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        v["support_labels"] = serde_json::json!([]);
        assert!(matches!(
            SvmModel::from_json(&v.to_string()),
            Err(Error::Model(_))
        ));
        assert!(m.decision_value(&[1.0, 2.0, 3.0]).is_err());
    }
}
