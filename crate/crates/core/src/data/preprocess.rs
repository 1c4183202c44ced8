use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Columns whose population standard deviation falls below this are treated
/// as constant and divided by 1.
pub const CONSTANT_FEATURE_STD: f64 = 1e-12;

/// Per-feature centering and scaling with population statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(train: &Dataset) -> Result<Self> {
        Self::fit_matrix(train.features().view())
    }

    pub fn fit_matrix(x: ArrayView2<f64>) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::argument("cannot fit a standardizer on zero rows"));
        }
        let mean = x.mean_axis(Axis(0)).expect("nonempty");
        let std = x.std_axis(Axis(0), 0.0);
        Ok(Self {
            mean: mean.to_vec(),
            std: std.to_vec(),
        })
    }

    pub fn transform(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        check_width(x, self.mean.len())?;
        let mut out = x.to_owned();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let div = if self.std[j] < CONSTANT_FEATURE_STD {
                1.0
            } else {
                self.std[j]
            };
            col.mapv_inplace(|v| (v - self.mean[j]) / div);
        }
        Ok(out)
    }

    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        ds.with_features(
            self.transform(ds.features().view())?,
            ds.feature_names().to_vec(),
        )
    }
}

/// Principal axes of the training covariance, strongest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `q × d`, orthonormal rows.
    pub components: Array2<f64>,
    pub explained_variance_ratio: Vec<f64>,
}

impl PcaModel {
    /// Fits the top `q` eigenvectors of the (population) covariance matrix.
    /// Each component is signed so that its largest-magnitude entry is positive.
    pub fn fit(train: &Dataset, q: usize) -> Result<Self> {
        Self::fit_matrix(train.features().view(), q)
    }

    pub fn fit_matrix(x: ArrayView2<f64>, q: usize) -> Result<Self> {
        let (n, d) = x.dim();
        if q == 0 || q > d {
            return Err(Error::argument(format!(
                "cannot keep {q} principal components of {d} features"
            )));
        }
        if n == 0 {
            return Err(Error::argument("cannot fit PCA on zero rows"));
        }
        let mean = x.mean_axis(Axis(0)).expect("nonempty");
        let centered = &x - &mean;
        let cov = centered.t().dot(&centered) / n as f64;

        let (values, vectors) = jacobi_eigen(&cov);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

        let total: f64 = values.iter().map(|v| v.max(0.0)).sum();
        let mut components = Array2::zeros((q, d));
        let mut ratio = Vec::with_capacity(q);
        for (row, &k) in order.iter().take(q).enumerate() {
            let mut v = vectors.column(k).to_owned();
            let pivot = v
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |(bi, bv), (i, &x)| {
                    if x.abs() > bv.abs() {
                        (i, x)
                    } else {
                        (bi, bv)
                    }
                })
                .0;
            if v[pivot] < 0.0 {
                v.mapv_inplace(|x| -x);
            }
            components.row_mut(row).assign(&v);
            ratio.push(if total > 0.0 {
                values[k].max(0.0) / total
            } else {
                0.0
            });
        }
        Ok(Self {
            mean: mean.to_vec(),
            components,
            explained_variance_ratio: ratio,
        })
    }

    pub fn num_components(&self) -> usize {
        self.components.nrows()
    }

    /// `(x − mean) · componentsᵀ`
    pub fn transform(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        check_width(x, self.mean.len())?;
        let mean = Array1::from(self.mean.clone());
        Ok((&x - &mean).dot(&self.components.t()))
    }

    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        let names = (0..self.num_components()).map(|k| format!("pc{k}")).collect();
        ds.with_features(self.transform(ds.features().view())?, names)
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvector `k` in column `k`;
/// no particular order.
pub fn jacobi_eigen(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "jacobi_eigen needs a square matrix");
    let mut m = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let scale: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[[i, j]] * m[[i, j]])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[[i, i]]).collect(), v)
}

/// Min-max scaling into a radian interval, `[0, π]` by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl AngleScaler {
    pub fn fit(train: &Dataset) -> Result<Self> {
        Self::fit_matrix(train.features().view())
    }

    pub fn fit_matrix(x: ArrayView2<f64>) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::argument("cannot fit an angle scaler on zero rows"));
        }
        let min = x
            .axis_iter(Axis(1))
            .map(|c| c.iter().cloned().fold(f64::INFINITY, f64::min))
            .collect();
        let max = x
            .axis_iter(Axis(1))
            .map(|c| c.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        Ok(Self {
            min,
            max,
            lo: 0.0,
            hi: PI,
        })
    }

    /// Out-of-range values are clipped; a degenerate feature (min = max)
    /// maps to the interval midpoint.
    pub fn transform(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        check_width(x, self.min.len())?;
        let mut out = x.to_owned();
        let width = self.hi - self.lo;
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let (lo, hi) = (self.min[j], self.max[j]);
            if hi > lo {
                col.mapv_inplace(|v| {
                    (self.lo + width * (v - lo) / (hi - lo)).clamp(self.lo, self.hi)
                });
            } else {
                col.fill(self.lo + 0.5 * width);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        ds.with_features(
            self.transform(ds.features().view())?,
            ds.feature_names().to_vec(),
        )
    }
}

/// The full fitted chain: standardize → PCA → angle scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub standardizer: Standardizer,
    pub pca: PcaModel,
    pub angles: AngleScaler,
}

impl Preprocessor {
    pub fn fit(train: &Dataset, components: usize) -> Result<Self> {
        let standardizer = Standardizer::fit(train)?;
        let z = standardizer.transform(train.features().view())?;
        let pca = PcaModel::fit_matrix(z.view(), components)?;
        let projected = pca.transform(z.view())?;
        let angles = AngleScaler::fit_matrix(projected.view())?;
        Ok(Self {
            standardizer,
            pca,
            angles,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.standardizer.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.pca.num_components()
    }

    pub fn transform(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        let z = self.standardizer.transform(x)?;
        let p = self.pca.transform(z.view())?;
        self.angles.transform(p.view())
    }

    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        let names = (0..self.output_dim()).map(|k| format!("angle{k}")).collect();
        ds.with_features(self.transform(ds.features().view())?, names)
    }
}

fn check_width(x: ArrayView2<f64>, expected: usize) -> Result<()> {
    if x.ncols() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: x.ncols(),
        });
    }
    Ok(())
}
