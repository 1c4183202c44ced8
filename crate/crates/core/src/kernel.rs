//! Gram matrices: fidelity kernels `K_ij = |⟨φ(x_i)|φ(x_j)⟩|²` from
//! simulated feature-map states, classical reference kernels, and
//! kernel-target alignment.

use std::fmt::Write as _;
use std::fmt;

use ndarray::{Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featuremaps::FeatureMapConfig;
use crate::simulator::{Simulator, StateVector};

/// Cached statevectors for one Gram matrix may use at most this many bytes;
/// beyond it states are rebuilt pairwise instead of held in memory.
pub const STATE_CACHE_BYTES: u128 = 2 << 30;

/// Shift used by the positive-semidefiniteness check.
pub const PSD_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub values: Array2<f64>,
    pub provenance: String,
}

impl KernelMatrix {
    pub fn new(values: Array2<f64>, provenance: impl Into<String>) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(Error::DimensionMismatch {
                expected: values.nrows(),
                found: values.ncols(),
            });
        }
        Ok(Self {
            values,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.len();
        (0..n).all(|i| (i + 1..n).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// True when `K + tol·I` admits a Cholesky factorization, i.e. the
    /// smallest eigenvalue is above `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        let n = self.len();
        let mut l = Array2::<f64>::zeros((n, n));
        for j in 0..n {
            let mut d = self.get(j, j) + tol;
            for k in 0..j {
                d -= l[[j, k]] * l[[j, k]];
            }
            if d <= 0.0 || !d.is_finite() {
                return false;
            }
            let d = d.sqrt();
            l[[j, j]] = d;
            for i in j + 1..n {
                let mut s = 0.5 * (self.get(i, j) + self.get(j, i));
                for k in 0..j {
                    s -= l[[i, k]] * l[[j, k]];
                }
                l[[i, j]] = s / d;
            }
        }
        true
    }

    /// CSV, one row per line, shortest round-trip decimal for every entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.values.rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}

/// Kernel choice stored alongside a trained model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum KernelConfig {
    Quantum { feature_map: FeatureMapConfig },
    Linear,
    Rbf { gamma: f64 },
}

impl fmt::Display for KernelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelConfig::Quantum { feature_map } => write!(f, "quantum {feature_map}"),
            KernelConfig::Linear => f.write_str("linear"),
            KernelConfig::Rbf { gamma } => write!(f, "rbf(gamma={gamma})"),
        }
    }
}

impl KernelConfig {
    pub fn quantum(feature_map: FeatureMapConfig) -> Self {
        KernelConfig::Quantum { feature_map }
    }

    /// Gram matrix over the rows of `x`.
    pub fn gram(&self, x: ArrayView2<f64>, sim: &Simulator) -> Result<KernelMatrix> {
        match *self {
            KernelConfig::Quantum { feature_map } => gram_matrix(x, &feature_map, sim),
            KernelConfig::Linear => classical_kernel(ClassicalKernel::Linear, x),
            KernelConfig::Rbf { gamma } => classical_kernel(ClassicalKernel::Rbf { gamma }, x),
        }
    }

    /// `rows(a) × rows(b)` kernel block.
    pub fn cross(&self, a: ArrayView2<f64>, b: ArrayView2<f64>, sim: &Simulator) -> Result<Array2<f64>> {
        if a.ncols() != b.ncols() {
            return Err(Error::DimensionMismatch {
                expected: b.ncols(),
                found: a.ncols(),
            });
        }
        match *self {
            KernelConfig::Quantum { feature_map } => cross_fidelity(a, b, &feature_map, sim),
            KernelConfig::Linear => Ok(a.dot(&b.t())),
            KernelConfig::Rbf { gamma } => {
                check_gamma(gamma)?;
                Ok(Array2::from_shape_fn((a.nrows(), b.nrows()), |(i, j)| {
                    rbf(a.row(i), b.row(j), gamma)
                }))
            }
        }
    }

    pub fn num_qubits(&self) -> Option<usize> {
        match self {
            KernelConfig::Quantum { feature_map } => Some(feature_map.num_qubits),
            _ => None,
        }
    }
}

/// Statevector `|φ(x)⟩` for every row of `x`.
pub fn encode_rows(
    x: ArrayView2<f64>,
    cfg: &FeatureMapConfig,
    sim: &Simulator,
) -> Result<Vec<StateVector>> {
    sim.check_qubits(cfg.num_qubits)?;
    (0..x.nrows())
        .into_par_iter()
        .map(|i| sim.run(&cfg.build(&x.row(i).to_vec())?))
        .collect()
}

fn overlap(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

/// `|⟨φ(x_j)|φ(x_i)⟩|²`, clamped to `[0, 1]`.
pub fn fidelity(xi: &[f64], xj: &[f64], cfg: &FeatureMapConfig, sim: &Simulator) -> Result<f64> {
    let a = sim.run(&cfg.build(xi)?)?;
    let b = sim.run(&cfg.build(xj)?)?;
    overlap(&b, &a)
}

/// Squared all-zero amplitude after `φ(x_i)` followed by `φ(x_j)⁻¹`; the
/// circuit-level route to the same fidelity.
pub fn composite_fidelity(
    xi: &[f64],
    xj: &[f64],
    cfg: &FeatureMapConfig,
    sim: &Simulator,
) -> Result<f64> {
    let circuit = cfg.build(xi)?.then(&cfg.build(xj)?.inverse())?;
    Ok(sim.run(&circuit)?.amplitudes()[0].norm_sqr())
}

/// Fidelity Gram matrix. Each row's state is simulated once; only the upper
/// triangle is evaluated and mirrored, so the result is exactly symmetric.
pub fn gram_matrix(
    x: ArrayView2<f64>,
    cfg: &FeatureMapConfig,
    sim: &Simulator,
) -> Result<KernelMatrix> {
    gram_with_cache_limit(x, cfg, sim, STATE_CACHE_BYTES)
}

fn gram_with_cache_limit(
    x: ArrayView2<f64>,
    cfg: &FeatureMapConfig,
    sim: &Simulator,
    cache_bytes: u128,
) -> Result<KernelMatrix> {
    let n = x.nrows();
    sim.check_qubits(cfg.num_qubits)?;
    let cache_fits = (n as u128) * (16u128 << cfg.num_qubits) <= cache_bytes;
    let upper: Vec<Vec<f64>> = if cache_fits {
        let states = encode_rows(x, cfg, sim)?;
        (0..n)
            .into_par_iter()
            .map(|i| (i..n).map(|j| overlap(&states[i], &states[j])).collect())
            .collect::<Result<_>>()?
    } else {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let si = sim.run(&cfg.build(&x.row(i).to_vec())?)?;
                (i..n)
                    .map(|j| {
                        let sj = sim.run(&cfg.build(&x.row(j).to_vec())?)?;
                        overlap(&si, &sj)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?
    };
    let mut values = Array2::zeros((n, n));
    for (i, row) in upper.iter().enumerate() {
        for (offset, &v) in row.iter().enumerate() {
            values[[i, i + offset]] = v;
            values[[i + offset, i]] = v;
        }
    }
    KernelMatrix::new(values, format!("fidelity {cfg}"))
}

fn cross_fidelity(
    a: ArrayView2<f64>,
    b: ArrayView2<f64>,
    cfg: &FeatureMapConfig,
    sim: &Simulator,
) -> Result<Array2<f64>> {
    let sb = encode_rows(b, cfg, sim)?;
    let rows: Vec<Vec<f64>> = (0..a.nrows())
        .into_par_iter()
        .map(|i| {
            let sa = sim.run(&cfg.build(&a.row(i).to_vec())?)?;
            sb.iter().map(|s| overlap(&sa, s)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(Array2::from_shape_fn((a.nrows(), b.nrows()), |(i, j)| rows[i][j]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicalKernel {
    Linear,
    Rbf { gamma: f64 },
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::argument(format!("rbf gamma must be positive, got {gamma}")))
    }
}

fn rbf(a: ArrayView1<f64>, b: ArrayView1<f64>, gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// `⟨x_i, x_j⟩` or `exp(−γ‖x_i − x_j‖²)`.
pub fn classical_kernel(kind: ClassicalKernel, x: ArrayView2<f64>) -> Result<KernelMatrix> {
    match kind {
        ClassicalKernel::Linear => KernelMatrix::new(x.dot(&x.t()), "linear"),
        ClassicalKernel::Rbf { gamma } => {
            check_gamma(gamma)?;
            let n = x.nrows();
            let mut k = Array2::zeros((n, n));
            for i in 0..n {
                k[[i, i]] = 1.0;
                for j in i + 1..n {
                    let v = rbf(x.row(i), x.row(j), gamma);
                    k[[i, j]] = v;
                    k[[j, i]] = v;
                }
            }
            KernelMatrix::new(k, format!("rbf(gamma={gamma})"))
        }
    }
}

/// Default RBF width for `q` input features.
pub fn default_gamma(q: usize) -> f64 {
    1.0 / q.max(1) as f64
}

/// Kernel-target alignment `yᵀKy / (‖K‖_F · n)`.
pub fn kta(k: &KernelMatrix, y: &[i8]) -> Result<f64> {
    let n = k.len();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    let norm = k.frobenius_norm();
    if norm == 0.0 || n == 0 {
        return Err(Error::UndefinedAlignment);
    }
    let mut quad = 0.0;
    for i in 0..n {
        let yi = y[i] as f64;
        for j in 0..n {
            quad += yi * k.get(i, j) * y[j] as f64;
        }
    }
    Ok(quad / (norm * n as f64))
}
