//! Simulated annealing over QUBO instances, an exhaustive oracle for small
//! ones, and a plain-text exchange format for external solvers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{BinarySolution, Encoding, QuboProblem};

/// Largest instance [`brute_force`] accepts.
pub const BRUTE_FORCE_MAX_VARS: usize = 24;

/// Cadence (in accepted flips) of the debug-build consistency check on the
/// incrementally tracked energy.
const ENERGY_CHECK_INTERVAL: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    /// Full passes over all variables per restart.
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            sweeps: 2000,
            beta_start: 0.1,
            beta_end: 10.0,
            restarts: 8,
            seed: 0,
        }
    }
}

impl AnnealSchedule {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 || self.restarts == 0 {
            return Err(Error::argument("annealing needs at least one sweep and one restart"));
        }
        if !(self.beta_start > 0.0 && self.beta_start <= self.beta_end && self.beta_end.is_finite()) {
            return Err(Error::argument(format!(
                "inverse temperatures must satisfy 0 < beta_start <= beta_end (got {} -> {})",
                self.beta_start, self.beta_end
            )));
        }
        Ok(())
    }

    /// Geometric interpolation from `beta_start` to `beta_end`.
    pub fn beta(&self, sweep: usize) -> f64 {
        if self.sweeps == 1 {
            return self.beta_end;
        }
        let t = sweep as f64 / (self.sweeps - 1) as f64;
        self.beta_start * (self.beta_end / self.beta_start).powf(t)
    }
}

/// Linear terms and symmetric neighbor lists of a QUBO.
struct Couplings {
    linear: Vec<f64>,
    neighbors: Vec<Vec<(usize, f64)>>,
    scale: f64,
}

impl Couplings {
    fn new(problem: &QuboProblem) -> Self {
        let n = problem.num_vars();
        let mut linear = vec![0.0; n];
        let mut neighbors = vec![Vec::new(); n];
        let mut scale = 0.0;
        for (&(p, q), &v) in problem.coefficients() {
            scale += v.abs();
            if p == q {
                linear[p] += v;
            } else {
                neighbors[p].push((q, v));
                neighbors[q].push((p, v));
            }
        }
        Self {
            linear,
            neighbors,
            scale,
        }
    }
}

/// Single-bit-flip state with cached local fields `Σ_q Q_pq x_q`.
struct FlipState<'a> {
    couplings: &'a Couplings,
    bits: Vec<u8>,
    field: Vec<f64>,
    energy: f64,
}

impl<'a> FlipState<'a> {
    fn new(couplings: &'a Couplings, bits: Vec<u8>) -> Self {
        let n = bits.len();
        let mut field = vec![0.0; n];
        let mut energy = 0.0;
        for p in 0..n {
            if bits[p] == 0 {
                continue;
            }
            energy += couplings.linear[p];
            for &(q, w) in &couplings.neighbors[p] {
                field[q] += w;
                if q < p && bits[q] != 0 {
                    energy += w;
                }
            }
        }
        Self {
            couplings,
            bits,
            field,
            energy,
        }
    }

    fn delta(&self, p: usize) -> f64 {
        let d = self.couplings.linear[p] + self.field[p];
        if self.bits[p] == 0 {
            d
        } else {
            -d
        }
    }

    fn flip(&mut self, p: usize, delta: f64) {
        self.bits[p] ^= 1;
        let sign = if self.bits[p] == 1 { 1.0 } else { -1.0 };
        for &(q, w) in &self.couplings.neighbors[p] {
            self.field[q] += sign * w;
        }
        self.energy += delta;
    }
}

fn anneal_once(problem: &QuboProblem, couplings: &Couplings, sched: &AnnealSchedule, restart: usize) -> Vec<u8> {
    let n = problem.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(sched.seed.wrapping_add(restart as u64));
    let bits = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    let mut state = FlipState::new(couplings, bits);
    let mut best_bits = state.bits.clone();
    let mut best_energy = state.energy;
    let mut order: Vec<usize> = (0..n).collect();
    let mut accepted: u64 = 0;

    for sweep in 0..sched.sweeps {
        let beta = sched.beta(sweep);
        order.shuffle(&mut rng);
        for &p in &order {
            let delta = state.delta(p);
            if delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp() {
                state.flip(p, delta);
                accepted += 1;
                if cfg!(debug_assertions) && accepted.is_multiple_of(ENERGY_CHECK_INTERVAL) {
                    let full = problem.energy(&state.bits).expect("length matches");
                    debug_assert!(
                        (full - state.energy).abs() <= 1e-9 * (1.0 + couplings.scale),
                        "cached energy {} drifted from {full}",
                        state.energy
                    );
                }
                if state.energy < best_energy {
                    best_energy = state.energy;
                    best_bits.copy_from_slice(&state.bits);
                }
            }
        }
    }
    best_bits
}

/// Restart-based simulated annealing. Restart `r` draws from a stream seeded
/// with `seed + r`; restarts run in parallel and the best is chosen in
/// restart order, so the result does not depend on scheduling.
pub fn solve_sa(problem: &QuboProblem, sched: &AnnealSchedule) -> Result<BinarySolution> {
    sched.validate()?;
    if problem.num_vars() == 0 {
        return problem.solution(Vec::new());
    }
    let couplings = Couplings::new(problem);
    let candidates: Vec<BinarySolution> = (0..sched.restarts)
        .into_par_iter()
        .map(|r| problem.solution(anneal_once(problem, &couplings, sched, r)))
        .collect::<Result<_>>()?;
    Ok(candidates
        .into_iter()
        .reduce(|best, c| if c.energy < best.energy { c } else { best })
        .expect("at least one restart"))
}

/// Global minimum by Gray-code enumeration. Among assignments whose energies
/// agree to within rounding, the lexicographically smallest bit string wins.
pub fn brute_force(problem: &QuboProblem) -> Result<BinarySolution> {
    let n = problem.num_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(Error::Resource(format!(
            "brute force is limited to {BRUTE_FORCE_MAX_VARS} variables, instance has {n}"
        )));
    }
    let couplings = Couplings::new(problem);
    let tie = 1e-12 * (1.0 + couplings.scale);
    let mut state = FlipState::new(&couplings, vec![0; n]);
    let mut best_bits = state.bits.clone();
    let mut best_energy = 0.0;

    for step in 1u64..(1u64 << n) {
        let p = step.trailing_zeros() as usize;
        let delta = state.delta(p);
        state.flip(p, delta);
        if step % 4096 == 0 {
            state.energy = problem.energy(&state.bits)?;
        }
        let e = state.energy;
        if e < best_energy - tie || (e <= best_energy + tie && state.bits < best_bits) {
            best_energy = e;
            best_bits.copy_from_slice(&state.bits);
        }
    }
    problem.solution(best_bits)
}

/// Coordinate-list text: `#` header lines with the encoding, then
/// `i j value` per nonzero coefficient in ascending `(i, j)` order.
pub fn format_qubo(problem: &QuboProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# num_vars {}", problem.num_vars());
    if let Some(enc) = problem.encoding {
        let _ = writeln!(out, "# n {}", enc.n);
        let _ = writeln!(out, "# b {}", enc.bits);
        let _ = writeln!(out, "# C {}", enc.c_value);
    }
    let _ = writeln!(out, "# lambda {}", problem.penalty);
    if !problem.labels.is_empty() {
        let labels: Vec<String> = problem.labels.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(out, "# labels {}", labels.join(" "));
    }
    for (&(i, j), &v) in problem.coefficients() {
        if v != 0.0 {
            let _ = writeln!(out, "{i} {j} {v}");
        }
    }
    out
}

pub fn export_qubo(problem: &QuboProblem, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_qubo(problem)).map_err(|e| Error::io(path, e))
}

pub fn parse_qubo(text: &str, origin: impl AsRef<Path>) -> Result<QuboProblem> {
    let origin = origin.as_ref();
    let err = |row: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        row,
        message,
    };
    let mut header: BTreeMap<String, String> = BTreeMap::new();
    let mut entries = Vec::new();
    let mut max_index = None;
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut parts = comment.trim().splitn(2, ' ');
            if let (Some(k), Some(v)) = (parts.next(), parts.next()) {
                header.insert(k.to_string(), v.trim().to_string());
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(row, format!("expected `i j value`, found {line:?}")));
        }
        let p: usize = fields[0].parse().map_err(|_| err(row, format!("bad index {:?}", fields[0])))?;
        let q: usize = fields[1].parse().map_err(|_| err(row, format!("bad index {:?}", fields[1])))?;
        let v: f64 = fields[2].parse().map_err(|_| err(row, format!("bad value {:?}", fields[2])))?;
        if p > q {
            return Err(err(row, format!("entry ({p}, {q}) is below the diagonal")));
        }
        max_index = max_index.max(Some(q));
        entries.push(((p, q), v));
    }

    let field = |key: &str| -> Result<Option<u64>> {
        header
            .get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| err(0, format!("header {key} has bad value {v:?}")))
            })
            .transpose()
    };
    let num_vars = match field("num_vars")? {
        Some(n) => n as usize,
        None => max_index.map_or(0, |m| m + 1),
    };
    let mut problem = QuboProblem::from_coefficients(num_vars, entries)?;
    if let (Some(n), Some(c)) = (field("n")?, field("C")?) {
        let enc = Encoding::new(n as usize, c)?;
        if enc.num_vars() != num_vars {
            return Err(err(0, format!("n·b = {} disagrees with num_vars {num_vars}", enc.num_vars())));
        }
        problem.encoding = Some(enc);
    }
    if let Some(l) = header.get("lambda") {
        problem.penalty = l
            .parse()
            .map_err(|_| err(0, format!("header lambda has bad value {l:?}")))?;
    }
    if let Some(labels) = header.get("labels") {
        problem.labels = labels
            .split_whitespace()
            .map(|t| t.parse::<i8>().map_err(|_| err(0, format!("bad label {t:?}"))))
            .collect::<Result<_>>()?;
    }
    Ok(problem)
}

pub fn import_qubo(path: impl AsRef<Path>) -> Result<QuboProblem> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_qubo(&text, path)
}
