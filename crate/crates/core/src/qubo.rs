//! Compiling the kernel SVM dual into a QUBO.
//!
//! Each multiplier is an integer `α_i = Σ_k 2^k a_{i,k}` over `b` bits, so
//! `C = 2^b − 1` and every bit pattern is a valid `α_i ∈ [0, C]`. The
//! objective minimized is
//!
//! ```text
//! E(α) = ½ Σ_ij α_i α_j y_i y_j K_ij − Σ_i α_i + λ (Σ_i α_i y_i)²
//! ```
//!
//! where the last term replaces the equality constraint `Σ α_i y_i = 0`.
//! Variable `p = i·b + k` holds bit `k` of `α_i`. Coefficients are stored
//! upper-triangular (`p ≤ p'`), with off-diagonal terms of the symmetric form
//! folded in by doubling:
//!
//! ```text
//! Q_pp' = 2^{k+l} y_i y_j (K_ij + 2λ)          p < p'
//! Q_pp  = 2^{2k} (½ K_ii + λ) − 2^k
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;

/// Shape of the binary expansion: `n` multipliers of `bits` bits each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    pub n: usize,
    pub bits: u32,
    pub c_value: u64,
}

impl Encoding {
    pub fn new(n: usize, c_value: u64) -> Result<Self> {
        Ok(Self {
            n,
            bits: bits_for(c_value)?,
            c_value,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.n * self.bits as usize
    }

    pub fn var(&self, i: usize, k: u32) -> usize {
        i * self.bits as usize + k as usize
    }

    pub fn encode(&self, alphas: &[u64]) -> Result<Vec<u8>> {
        if alphas.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: alphas.len(),
            });
        }
        if let Some(a) = alphas.iter().find(|&&a| a > self.c_value) {
            return Err(Error::argument(format!("alpha {a} exceeds C = {}", self.c_value)));
        }
        Ok(alphas
            .iter()
            .flat_map(|&a| (0..self.bits).map(move |k| ((a >> k) & 1) as u8))
            .collect())
    }

    pub fn decode(&self, bits: &[u8]) -> Result<Vec<u64>> {
        if bits.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                found: bits.len(),
            });
        }
        Ok(bits
            .chunks(self.bits as usize)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .map(|(k, &b)| u64::from(b != 0) << k)
                    .sum()
            })
            .collect())
    }
}

/// Number of bits `b` with `C = 2^b − 1`.
pub fn bits_for(c_value: u64) -> Result<u32> {
    match c_value.checked_add(1) {
        Some(m) if c_value > 0 && m.is_power_of_two() => Ok(m.trailing_zeros()),
        _ => Err(Error::argument(format!(
            "C = {c_value} is not of the form 2^b - 1 with b >= 1"
        ))),
    }
}

/// Upper-triangular QUBO `Σ_{p ≤ q} Q_pq x_p x_q` plus the decode metadata of
/// the SVM instance it came from (if any).
#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    num_vars: usize,
    coefficients: BTreeMap<(usize, usize), f64>,
    pub encoding: Option<Encoding>,
    pub penalty: f64,
    pub labels: Vec<i8>,
}

impl QuboProblem {
    /// A bare QUBO. Keys are normalized to `p ≤ q`; duplicates add up.
    pub fn from_coefficients(
        num_vars: usize,
        entries: impl IntoIterator<Item = ((usize, usize), f64)>,
    ) -> Result<Self> {
        let mut coefficients = BTreeMap::new();
        for ((p, q), v) in entries {
            let key = (p.min(q), p.max(q));
            if key.1 >= num_vars {
                return Err(Error::argument(format!(
                    "coefficient ({p}, {q}) outside {num_vars} variables"
                )));
            }
            if !v.is_finite() {
                return Err(Error::argument(format!("coefficient ({p}, {q}) is not finite")));
            }
            *coefficients.entry(key).or_insert(0.0) += v;
        }
        Ok(Self {
            num_vars,
            coefficients,
            encoding: None,
            penalty: 0.0,
            labels: Vec::new(),
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn coefficients(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.coefficients
    }

    pub fn get(&self, p: usize, q: usize) -> f64 {
        self.coefficients
            .get(&(p.min(q), p.max(q)))
            .copied()
            .unwrap_or(0.0)
    }

    /// `Σ_{p≤q} Q_pq x_p x_q`.
    pub fn energy(&self, bits: &[u8]) -> Result<f64> {
        if bits.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                found: bits.len(),
            });
        }
        Ok(self
            .coefficients
            .iter()
            .filter(|((p, q), _)| bits[*p] != 0 && bits[*q] != 0)
            .map(|(_, v)| v)
            .sum())
    }

    pub fn solution(&self, bits: Vec<u8>) -> Result<BinarySolution> {
        let energy = self.energy(&bits)?;
        Ok(BinarySolution { bits, energy })
    }

    /// Integer multipliers `α_i` from a solution of an SVM-derived QUBO.
    pub fn decode(&self, solution: &BinarySolution) -> Result<Vec<u64>> {
        self.encoding
            .ok_or_else(|| Error::argument("QUBO carries no binary-expansion metadata"))?
            .decode(&solution.bits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySolution {
    pub bits: Vec<u8>,
    pub energy: f64,
}

pub fn energy(problem: &QuboProblem, bits: &[u8]) -> Result<f64> {
    problem.energy(bits)
}

pub fn decode(problem: &QuboProblem, solution: &BinarySolution) -> Result<Vec<u64>> {
    problem.decode(solution)
}

/// Builds the penalized dual QUBO for kernel `k`, labels `y`, box bound
/// `c_value = 2^b − 1`, and equality-penalty weight `penalty ≥ 0`.
pub fn build_qubo(k: &KernelMatrix, y: &[i8], c_value: u64, penalty: f64) -> Result<QuboProblem> {
    let n = k.len();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    if !(penalty >= 0.0 && penalty.is_finite()) {
        return Err(Error::argument(format!("penalty {penalty} must be finite and >= 0")));
    }
    let enc = Encoding::new(n, c_value)?;
    let b = enc.bits;

    let mut coefficients = BTreeMap::new();
    for i in 0..n {
        for k_bit in 0..b {
            let p = enc.var(i, k_bit);
            let w = (1u64 << k_bit) as f64;
            let diag = w * w * (0.5 * k.get(i, i) + penalty) - w;
            if diag != 0.0 {
                coefficients.insert((p, p), diag);
            }
            for j in i..n {
                let yy = f64::from(y[i] * y[j]);
                let pair = k.get(i, j) + 2.0 * penalty;
                let l_start = if j == i { k_bit + 1 } else { 0 };
                for l_bit in l_start..b {
                    let v = ((1u64 << (k_bit + l_bit)) as f64) * yy * pair;
                    if v != 0.0 {
                        coefficients.insert((p, enc.var(j, l_bit)), v);
                    }
                }
            }
        }
    }
    Ok(QuboProblem {
        num_vars: enc.num_vars(),
        coefficients,
        encoding: Some(enc),
        penalty,
        labels: y.to_vec(),
    })
}

/// The penalized dual objective `E(α)` evaluated directly from `K`, without
/// the binary expansion.
pub fn dual_objective(k: &KernelMatrix, y: &[i8], alphas: &[f64], penalty: f64) -> f64 {
    let n = alphas.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alphas[i] * alphas[j] * f64::from(y[i] * y[j]) * k.get(i, j);
        }
    }
    let linear: f64 = alphas.iter().sum();
    let residual = constraint_residual(alphas, y);
    0.5 * quad - linear + penalty * residual * residual
}

/// `Σ_i α_i y_i`
pub fn constraint_residual(alphas: &[f64], y: &[i8]) -> f64 {
    alphas.iter().zip(y).map(|(a, &l)| a * f64::from(l)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn km(values: Array2<f64>) -> KernelMatrix {
        KernelMatrix::new(values, "test").unwrap()
    }

    /// Exhaustive minimum over all bit strings.
    fn enumerate_min(p: &QuboProblem) -> (Vec<u8>, f64) {
        let m = p.num_vars();
        (0..1u32 << m)
            .map(|mask| {
                let bits: Vec<u8> = (0..m).map(|v| ((mask >> v) & 1) as u8).collect();
                let e = p.energy(&bits).unwrap();
                (bits, e)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    }

    #[test]
    fn bits_for_powers() {
        assert_eq!(bits_for(3).unwrap(), 2);
        assert_eq!(bits_for(255).unwrap(), 8);
        assert_eq!(bits_for(4095).unwrap(), 12);
        assert_eq!(bits_for(1).unwrap(), 1);
        assert!(bits_for(4).is_err());
        assert!(bits_for(0).is_err());
        assert!(bits_for(u64::MAX).is_err());
    }

    #[test]
    fn single_variable_instance() {
        let q = build_qubo(&km(array![[1.0]]), &[1], 1, 0.0).unwrap();
        assert_eq!(q.coefficients().len(), 1);
        assert_eq!(q.get(0, 0), -0.5);
        let (bits, e) = enumerate_min(&q);
        assert_eq!(bits, vec![1]);
        assert_eq!(e, -0.5);
    }

    #[test]
    fn two_variable_instance() {
        let q = build_qubo(&km(Array2::eye(2)), &[1, -1], 1, 1.0).unwrap();
        assert_eq!(q.energy(&[0, 0]).unwrap(), 0.0);
        assert_eq!(q.energy(&[1, 0]).unwrap(), 0.5);
        assert_eq!(q.energy(&[0, 1]).unwrap(), 0.5);
        assert_eq!(q.energy(&[1, 1]).unwrap(), -1.0);
        let (bits, e) = enumerate_min(&q);
        assert_eq!((bits, e), (vec![1, 1], -1.0));
    }

    #[test]
    fn energy_of_simple_assignments() {
        let q = QuboProblem::from_coefficients(3, [((0, 0), 1.5), ((2, 0), -2.0), ((2, 2), 0.25)])
            .unwrap();
        assert_eq!(q.energy(&[0, 0, 0]).unwrap(), 0.0);
        assert_eq!(q.energy(&[0, 0, 1]).unwrap(), 0.25);
        assert_eq!(q.energy(&[1, 0, 1]).unwrap(), 1.5 + 0.25 - 2.0);
        assert!(q.energy(&[1, 0]).is_err());
        assert!(QuboProblem::from_coefficients(2, [((0, 2), 1.0)]).is_err());
    }

    #[test]
    fn decode_binary_expansion() {
        let enc = Encoding::new(1, 7).unwrap();
        assert_eq!(enc.decode(&[1, 0, 1]).unwrap(), vec![5]);
        let enc = Encoding::new(2, 7).unwrap();
        assert_eq!(enc.decode(&[1; 6]).unwrap(), vec![7, 7]);
        assert_eq!(enc.decode(&[0; 6]).unwrap(), vec![0, 0]);
        assert_eq!(enc.encode(&[5, 2]).unwrap(), vec![1, 0, 1, 0, 1, 0]);
        assert!(enc.encode(&[8, 0]).is_err());
    }

    #[test]
    fn dimension_and_penalty_checks() {
        assert!(build_qubo(&km(Array2::eye(2)), &[1], 3, 1.0).is_err());
        assert!(build_qubo(&km(Array2::eye(2)), &[1, -1], 3, -1.0).is_err());
        assert!(build_qubo(&km(Array2::eye(2)), &[1, -1], 4, 1.0).is_err());
    }

    #[test]
    fn all_zero_energy_is_zero() {
        let k = km(array![[1.0, 0.3, 0.2], [0.3, 1.0, 0.7], [0.2, 0.7, 1.0]]);
        let q = build_qubo(&k, &[1, -1, 1], 15, 2.5).unwrap();
        assert_eq!(q.energy(&vec![0; q.num_vars()]).unwrap(), 0.0);
        assert!(q.coefficients().keys().all(|&(p, r)| p <= r && r < q.num_vars()));
    }

    #[test]
    fn larger_penalty_never_increases_violation() {
        let k = km(array![[1.0, 0.4, 0.1], [0.4, 1.0, 0.6], [0.1, 0.6, 1.0]]);
        let y = [1, 1, -1];
        let mut last = f64::INFINITY;
        for lambda in [10.0, 100.0, 1000.0] {
            let q = build_qubo(&k, &y, 3, lambda).unwrap();
            let (bits, _) = enumerate_min(&q);
            let alphas: Vec<f64> = q
                .encoding
                .unwrap()
                .decode(&bits)
                .unwrap()
                .iter()
                .map(|&a| a as f64)
                .collect();
            let violation = constraint_residual(&alphas, &y).abs();
            assert!(violation <= last);
            last = violation;
        }
    }
}
