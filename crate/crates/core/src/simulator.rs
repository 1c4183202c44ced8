//! Dense statevector simulation for the small gate alphabet used by the
//! feature maps.
//!
//! Qubit `k` is bit `k` of the amplitude index (little-endian): on two qubits
//! the amplitude of `|q1 q0⟩ = |10⟩` lives at index 2.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on simulated qubits: 2^24 amplitudes, 256 MiB.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Below this many amplitudes a gate is applied on one thread.
const PARALLEL_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Rx,
    Ry,
    Rz,
    /// Phase gate `diag(1, e^{iθ})`.
    P,
    /// Controlled NOT, `targets = [control, target]`.
    Cx,
    Cz,
}

impl GateKind {
    fn arity(self) -> usize {
        match self {
            GateKind::Cx | GateKind::Cz => 2,
            _ => 1,
        }
    }

    fn has_angle(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::P)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    targets: [usize; 2],
    pub angle: f64,
}

impl Gate {
    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q, 0.0)
    }
    pub fn x(q: usize) -> Self {
        Self::single(GateKind::X, q, 0.0)
    }
    pub fn rx(theta: f64, q: usize) -> Self {
        Self::single(GateKind::Rx, q, theta)
    }
    pub fn ry(theta: f64, q: usize) -> Self {
        Self::single(GateKind::Ry, q, theta)
    }
    pub fn rz(theta: f64, q: usize) -> Self {
        Self::single(GateKind::Rz, q, theta)
    }
    pub fn p(theta: f64, q: usize) -> Self {
        Self::single(GateKind::P, q, theta)
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cx,
            targets: [control, target],
            angle: 0.0,
        }
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self {
            kind: GateKind::Cz,
            targets: [a, b],
            angle: 0.0,
        }
    }

    fn single(kind: GateKind, q: usize, angle: f64) -> Self {
        Self {
            kind,
            targets: [q, q],
            angle,
        }
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets[..self.kind.arity()]
    }

    pub fn adjoint(&self) -> Self {
        let mut g = *self;
        if g.kind.has_angle() {
            g.angle = -g.angle;
        }
        g
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        let t = self.targets();
        if let Some(&bad) = t.iter().find(|&&q| q >= num_qubits) {
            return Err(Error::argument(format!(
                "{:?} acts on qubit {bad} of a {num_qubits}-qubit register",
                self.kind
            )));
        }
        if t.len() == 2 && t[0] == t[1] {
            return Err(Error::argument(format!(
                "{:?} needs two distinct qubits, got {} twice",
                self.kind, t[0]
            )));
        }
        if !self.angle.is_finite() {
            return Err(Error::argument(format!("{:?} angle is not finite", self.kind)));
        }
        Ok(())
    }
}

/// An ordered gate list on a fixed register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
}

impl CircuitSpec {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(self.num_qubits))
    }

    /// Reversed gate order with every gate replaced by its adjoint.
    pub fn inverse(&self) -> CircuitSpec {
        CircuitSpec {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &CircuitSpec) -> Result<CircuitSpec> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Ok(CircuitSpec {
            num_qubits: self.num_qubits,
            gates,
        })
    }
}

pub fn invert_circuit(c: &CircuitSpec) -> CircuitSpec {
    c.inverse()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩ = Σ_k conj(self_k)·other_k`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Text dump, one `index real imag` line per amplitude above 1e-12 in magnitude.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() > 1e-12 {
                let _ = writeln!(out, "{i} {} {}", a.re, a.im);
            }
        }
        out
    }

    pub fn apply(&mut self, gate: &Gate) {
        let t = gate.targets();
        match gate.kind {
            GateKind::Cx => self.apply_cx(t[0], t[1]),
            GateKind::Cz => self.apply_cz(t[0], t[1]),
            kind => self.apply_single(t[0], single_qubit_matrix(kind, gate.angle)),
        }
    }

    fn apply_single(&mut self, q: usize, [[m00, m01], [m10, m11]]: [[Complex64; 2]; 2]) {
        let stride = 1usize << q;
        // Each chunk of 2·stride amplitudes holds `stride` independent pairs
        // (i, i + stride) differing only in bit q.
        let update = |chunk: &mut [Complex64]| {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m00 * x + m01 * y;
                *b = m10 * x + m11 * y;
            }
        };
        if self.amplitudes.len() >= PARALLEL_THRESHOLD {
            self.amplitudes.par_chunks_mut(2 * stride).for_each(update);
        } else {
            self.amplitudes.chunks_mut(2 * stride).for_each(update);
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let (cbit, tbit) = (1usize << control, 1usize << target);
        let amps = &mut self.amplitudes;
        for i in 0..amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                amps.swap(i, i | tbit);
            }
        }
    }

    fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }
}

fn single_qubit_matrix(kind: GateKind, theta: f64) -> [[Complex64; 2]; 2] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    match kind {
        GateKind::H => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
        }
        GateKind::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        GateKind::Rx => [[c(cos, 0.0), c(0.0, -sin)], [c(0.0, -sin), c(cos, 0.0)]],
        GateKind::Ry => [[c(cos, 0.0), c(-sin, 0.0)], [c(sin, 0.0), c(cos, 0.0)]],
        GateKind::Rz => [[c(cos, -sin), c(0.0, 0.0)], [c(0.0, 0.0), c(cos, sin)]],
        GateKind::P => [
            [c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), Complex64::from_polar(1.0, theta)],
        ],
        GateKind::Cx | GateKind::Cz => unreachable!("two-qubit gate"),
    }
}

/// Runs circuits from `|0…0⟩` under a qubit ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Simulator {
    max_qubits: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Self {
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl Simulator {
    pub fn with_max_qubits(max_qubits: usize) -> Self {
        Self { max_qubits }
    }

    pub fn max_qubits(&self) -> usize {
        self.max_qubits
    }

    pub fn check_qubits(&self, num_qubits: usize) -> Result<()> {
        if num_qubits > self.max_qubits {
            return Err(Error::Resource(format!(
                "{num_qubits} qubits exceed the simulator cap of {} ({} bytes of amplitudes)",
                self.max_qubits,
                (1u128 << num_qubits) * 16
            )));
        }
        Ok(())
    }

    pub fn run(&self, circuit: &CircuitSpec) -> Result<StateVector> {
        self.check_qubits(circuit.num_qubits)?;
        circuit.validate()?;
        let mut state = StateVector::zero(circuit.num_qubits);
        for gate in &circuit.gates {
            state.apply(gate);
        }
        Ok(state)
    }
}

/// [`Simulator::run`] under the default cap.
pub fn run_circuit(c: &CircuitSpec) -> Result<StateVector> {
    Simulator::default().run(c)
}

pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.inner(b)
}
