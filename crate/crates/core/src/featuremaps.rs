//! Encoding circuits `φ(x)` that load a length-`q` angle vector into `q` qubits.
//!
//! Every map repeats one layer `r` times:
//!
//! | kind    | layer                                                                  |
//! |---------|------------------------------------------------------------------------|
//! | `Z`     | `H` on every qubit, then `P(2·x_i)` on qubit `i`                       |
//! | `ZZ`    | the `Z` layer, then for every pair `i < j`: `CX(i→j) · P(2(π−x_i)(π−x_j)) on j · CX(i→j)` |
//! | `SU2HR` | `H` on every qubit, `RY(x_i)` on qubit `i`, then `CX(i→i+1)` chain     |
//! | `SU2RR` | `RY(x_i)` then `RZ(x_i)` on qubit `i`, then `CX(i→i+1)` chain          |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::{CircuitSpec, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMapKind {
    Z,
    Zz,
    Su2hr,
    Su2rr,
}

impl FeatureMapKind {
    pub const ALL: [FeatureMapKind; 4] = [
        FeatureMapKind::Z,
        FeatureMapKind::Zz,
        FeatureMapKind::Su2hr,
        FeatureMapKind::Su2rr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureMapKind::Z => "z",
            FeatureMapKind::Zz => "zz",
            FeatureMapKind::Su2hr => "su2hr",
            FeatureMapKind::Su2rr => "su2rr",
        }
    }
}

impl fmt::Display for FeatureMapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureMapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z" | "zmap" => Ok(FeatureMapKind::Z),
            "zz" => Ok(FeatureMapKind::Zz),
            "su2hr" => Ok(FeatureMapKind::Su2hr),
            "su2rr" => Ok(FeatureMapKind::Su2rr),
            _ => Err(Error::argument(format!(
                "unknown feature map {s:?} (expected z, zz, su2hr or su2rr)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureMapConfig {
    pub kind: FeatureMapKind,
    pub num_qubits: usize,
    pub repetitions: usize,
}

impl FeatureMapConfig {
    pub fn new(kind: FeatureMapKind, num_qubits: usize, repetitions: usize) -> Result<Self> {
        if num_qubits == 0 || repetitions == 0 {
            return Err(Error::argument(format!(
                "feature map needs at least one qubit and one repetition (got q={num_qubits}, r={repetitions})"
            )));
        }
        Ok(Self {
            kind,
            num_qubits,
            repetitions,
        })
    }

    /// Gate count of one built circuit.
    pub fn gate_count(&self) -> usize {
        let q = self.num_qubits;
        let chain = q.saturating_sub(1);
        let layer = match self.kind {
            FeatureMapKind::Z => 2 * q,
            FeatureMapKind::Zz => 2 * q + 3 * q * (q - 1) / 2,
            FeatureMapKind::Su2hr | FeatureMapKind::Su2rr => 2 * q + chain,
        };
        layer * self.repetitions
    }

    pub fn build(&self, x: &[f64]) -> Result<CircuitSpec> {
        build_feature_map(self, x)
    }
}

impl fmt::Display for FeatureMapConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(q={}, r={})", self.kind, self.num_qubits, self.repetitions)
    }
}

pub fn build_feature_map(cfg: &FeatureMapConfig, x: &[f64]) -> Result<CircuitSpec> {
    let q = cfg.num_qubits;
    if x.len() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            found: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::argument("feature map input is not finite"));
    }

    let mut c = CircuitSpec::new(q);
    c.gates.reserve(cfg.gate_count());
    for _ in 0..cfg.repetitions {
        match cfg.kind {
            FeatureMapKind::Z => z_layer(&mut c, x),
            FeatureMapKind::Zz => {
                z_layer(&mut c, x);
                for i in 0..q {
                    for j in i + 1..q {
                        c.push(Gate::cx(i, j))
                            .push(Gate::p(2.0 * (PI - x[i]) * (PI - x[j]), j))
                            .push(Gate::cx(i, j));
                    }
                }
            }
            FeatureMapKind::Su2hr => {
                for i in 0..q {
                    c.push(Gate::h(i));
                }
                for (i, &xi) in x.iter().enumerate() {
                    c.push(Gate::ry(xi, i));
                }
                cx_chain(&mut c);
            }
            FeatureMapKind::Su2rr => {
                for (i, &xi) in x.iter().enumerate() {
                    c.push(Gate::ry(xi, i)).push(Gate::rz(xi, i));
                }
                cx_chain(&mut c);
            }
        }
    }
    Ok(c)
}

fn z_layer(c: &mut CircuitSpec, x: &[f64]) {
    for i in 0..x.len() {
        c.push(Gate::h(i));
    }
    for (i, &xi) in x.iter().enumerate() {
        c.push(Gate::p(2.0 * xi, i));
    }
}

fn cx_chain(c: &mut CircuitSpec) {
    for i in 0..c.num_qubits.saturating_sub(1) {
        c.push(Gate::cx(i, i + 1));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::run_circuit;

    fn cfg(kind: FeatureMapKind, q: usize, r: usize) -> FeatureMapConfig {
        FeatureMapConfig::new(kind, q, r).unwrap()
    }

    #[test]
    fn z_single_qubit_expansion() {
        let c = build_feature_map(&cfg(FeatureMapKind::Z, 1, 1), &[0.3]).unwrap();
        assert_eq!(c.gates, vec![Gate::h(0), Gate::p(0.6, 0)]);
    }

    #[test]
    fn su2hr_two_qubit_expansion() {
        let (a, b) = (0.4, 1.3);
        let c = build_feature_map(&cfg(FeatureMapKind::Su2hr, 2, 1), &[a, b]).unwrap();
        assert_eq!(
            c.gates,
            vec![Gate::h(0), Gate::h(1), Gate::ry(a, 0), Gate::ry(b, 1), Gate::cx(0, 1)]
        );
    }

    #[test]
    fn su2rr_two_qubit_expansion() {
        let c = build_feature_map(&cfg(FeatureMapKind::Su2rr, 2, 1), &[0.1, 0.2]).unwrap();
        assert_eq!(
            c.gates,
            vec![
                Gate::ry(0.1, 0),
                Gate::rz(0.1, 0),
                Gate::ry(0.2, 1),
                Gate::rz(0.2, 1),
                Gate::cx(0, 1)
            ]
        );
    }

    #[test]
    fn zz_two_qubits_two_reps() {
        let x = [0.5, 2.0];
        let c = build_feature_map(&cfg(FeatureMapKind::Zz, 2, 2), &x).unwrap();
        // (2 H + 2 P + CX·P·CX) per repetition
        assert_eq!(c.gates.len(), 14);
        let phase = 2.0 * (PI - 0.5) * (PI - 2.0);
        assert_eq!(&c.gates[4..7], &[Gate::cx(0, 1), Gate::p(phase, 1), Gate::cx(0, 1)]);
        assert_eq!(c.gates[..7], c.gates[7..]);
    }

    #[test]
    fn gate_counts_follow_construction_rule() {
        for q in 1..=5 {
            for r in 1..=2 {
                let pairs = q * (q - 1) / 2;
                let expected = [
                    (FeatureMapKind::Z, r * 2 * q),
                    (FeatureMapKind::Zz, r * (2 * q + 3 * pairs)),
                    (FeatureMapKind::Su2hr, r * (2 * q + q - 1)),
                    (FeatureMapKind::Su2rr, r * (2 * q + q - 1)),
                ];
                let x = vec![0.25; q];
                for (kind, n) in expected {
                    let c = build_feature_map(&cfg(kind, q, r), &x).unwrap();
                    assert_eq!(c.gates.len(), n, "{kind} q={q} r={r}");
                    assert_eq!(cfg(kind, q, r).gate_count(), n);
                    c.validate().unwrap();
                }
            }
        }
    }

    #[test]
    fn deterministic_and_normalized() {
        let x = [0.3, 1.7, 2.9];
        for kind in FeatureMapKind::ALL {
            let c = cfg(kind, 3, 2);
            assert_eq!(c.build(&x).unwrap(), c.build(&x).unwrap());
            let s = run_circuit(&c.build(&x).unwrap()).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let c = cfg(FeatureMapKind::Z, 2, 1);
        assert!(matches!(
            c.build(&[0.1]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(c.build(&[0.1, f64::INFINITY]).is_err());
        assert!(FeatureMapConfig::new(FeatureMapKind::Z, 0, 1).is_err());
        assert!(FeatureMapConfig::new(FeatureMapKind::Z, 1, 0).is_err());
    }

    #[test]
    fn parses_cli_names() {
        assert_eq!("ZZ".parse::<FeatureMapKind>().unwrap(), FeatureMapKind::Zz);
        assert_eq!("SU2rr".parse::<FeatureMapKind>().unwrap(), FeatureMapKind::Su2rr);
        assert_eq!("ZMAP".parse::<FeatureMapKind>().unwrap(), FeatureMapKind::Z);
        assert!("pauli".parse::<FeatureMapKind>().is_err());
        for k in FeatureMapKind::ALL {
            assert_eq!(k.name().parse::<FeatureMapKind>().unwrap(), k);
        }
    }
}
