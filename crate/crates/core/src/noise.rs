//! Biased Pauli noise and its attachment to circuit locations.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::circuit::{prep_flip_letter, Circuit, Op};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// Dephasing bias `eta = p_Z / (p_X + p_Y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Eta {
    Finite(f64),
    Infinite,
}

impl Eta {
    pub const DEPOLARIZING: Eta = Eta::Finite(0.5);

    pub fn is_valid(self) -> bool {
        match self {
            Eta::Finite(e) => e.is_finite() && e > 0.0,
            Eta::Infinite => true,
        }
    }
}

impl fmt::Display for Eta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eta::Finite(e) => write!(f, "{e}"),
            Eta::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Eta {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Eta::Infinite);
        }
        let e: f64 = s.parse().map_err(|_| Error::InvalidArgument(format!("bad bias {s:?}")))?;
        let eta = Eta::Finite(e);
        if !eta.is_valid() {
            return Err(Error::InvalidArgument(format!("bias must be positive or inf, got {s}")));
        }
        Ok(eta)
    }
}

impl Serialize for Eta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Eta {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(p_X, p_Y, p_Z)` with `p_X = p_Y = p / (2 (eta + 1))` and `p_Z = p eta / (eta + 1)`.
pub fn pauli_rates(p: f64, eta: Eta) -> Result<(f64, f64, f64)> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("physical error rate must be in [0, 1), got {p}")));
    }
    if !eta.is_valid() {
        return Err(Error::InvalidArgument(format!("invalid bias {eta}")));
    }
    Ok(match eta {
        Eta::Infinite => (0.0, 0.0, p),
        Eta::Finite(e) => {
            let pxy = p / (2.0 * (e + 1.0));
            (pxy, pxy, p * e / (e + 1.0))
        }
    })
}

/// Where the data-qubit idle channel is applied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdleMode {
    /// After every `Tick`, i.e. once per group-measurement cycle.
    #[default]
    PerCycle,
    /// Only at the first `Tick` of each round.
    PerRound,
}

impl FromStr for IdleMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "per-cycle" => Ok(IdleMode::PerCycle),
            "per-round" => Ok(IdleMode::PerRound),
            other => Err(Error::InvalidArgument(format!("idle mode must be per-cycle or per-round, got {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasedNoise {
    pub p: f64,
    pub eta: Eta,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub idle: IdleMode,
}

impl BiasedNoise {
    pub fn new(p: f64, eta: Eta) -> Result<Self> {
        let (px, py, pz) = pauli_rates(p, eta)?;
        Ok(BiasedNoise { p, eta, px, py, pz, idle: IdleMode::PerCycle })
    }

    pub fn with_idle(mut self, idle: IdleMode) -> Self {
        self.idle = idle;
        self
    }

    fn pauli1(&self, q: usize) -> Op {
        Op::Pauli1 { q, px: self.px, py: self.py, pz: self.pz }
    }
}

/// Return a copy of `circuit` with noise instructions inserted:
/// single-qubit gates get a biased Pauli channel, two-qubit gates a uniform
/// 15-Pauli channel of total weight `p`, preparations and measurements a
/// flip with probability `p_X + p_Y`, and data qubits an idle channel after
/// each cycle marker. Existing noise instructions are dropped first.
pub fn apply_noise(circuit: &Circuit, model: &BiasedNoise) -> Circuit {
    let flip = model.px + model.py;
    let ticks = circuit.num_ticks();
    let ticks_per_round = if circuit.rounds > 0 && ticks % circuit.rounds == 0 { ticks / circuit.rounds } else { 1 };
    let mut ops = Vec::with_capacity(circuit.ops.len() * 2);
    let mut tick = 0usize;
    for op in circuit.ops.iter().filter(|op| !op.is_noise()) {
        ops.push(*op);
        match *op {
            Op::H(q) => ops.push(model.pauli1(q)),
            Op::CX(a, b) | Op::CY(a, b) => ops.push(Op::Pauli2 { a, b, p: model.p }),
            Op::PrepZ(q) => ops.push(Op::PrepFlip { q, p: flip, flip: prep_flip_letter(Pauli::Z) }),
            Op::PrepX(q) => ops.push(Op::PrepFlip { q, p: flip, flip: prep_flip_letter(Pauli::X) }),
            Op::PrepY(q) => ops.push(Op::PrepFlip { q, p: flip, flip: prep_flip_letter(Pauli::Y) }),
            Op::MeasZ(q) | Op::MeasX(q) | Op::MeasY(q) => ops.push(Op::MeasFlip { q, p: flip }),
            Op::Tick => {
                let idle = match model.idle {
                    IdleMode::PerCycle => true,
                    IdleMode::PerRound => tick % ticks_per_round == 0,
                };
                if idle {
                    ops.extend(circuit.data_qubits.iter().map(|&q| model.pauli1(q)));
                }
                tick += 1;
            }
            _ => {}
        }
    }
    Circuit { ops, ..circuit.clone() }
}

/// Counts of each noise-instruction kind: `(pauli1, pauli2, prep, meas)`.
pub fn noise_census(circuit: &Circuit) -> (usize, usize, usize, usize) {
    let mut c = (0, 0, 0, 0);
    for op in &circuit.ops {
        match op {
            Op::Pauli1 { .. } => c.0 += 1,
            Op::Pauli2 { .. } => c.1 += 1,
            Op::PrepFlip { .. } => c.2 += 1,
            Op::MeasFlip { .. } => c.3 += 1,
            _ => {}
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates() {
        let (x, y, z) = pauli_rates(0.003, Eta::DEPOLARIZING).unwrap();
        assert!((x - 0.001).abs() < 1e-15 && (y - 0.001).abs() < 1e-15 && (z - 0.001).abs() < 1e-15);
        assert_eq!(pauli_rates(0.004, Eta::Infinite).unwrap(), (0.0, 0.0, 0.004));
        assert_eq!(pauli_rates(0.0, Eta::Finite(10.0)).unwrap(), (0.0, 0.0, 0.0));
        assert!(pauli_rates(1.0, Eta::DEPOLARIZING).is_err());
        assert!(pauli_rates(-0.1, Eta::DEPOLARIZING).is_err());
        assert!(pauli_rates(0.1, Eta::Finite(0.0)).is_err());
    }

    #[test]
    fn eta_tokens() {
        assert_eq!("inf".parse::<Eta>().unwrap(), Eta::Infinite);
        assert_eq!("100".parse::<Eta>().unwrap(), Eta::Finite(100.0));
        assert_eq!(Eta::Infinite.to_string(), "inf");
        assert!("-1".parse::<Eta>().is_err());
        let json = serde_json::to_string(&Eta::Infinite).unwrap();
        assert_eq!(serde_json::from_str::<Eta>(&json).unwrap(), Eta::Infinite);
    }

    #[test]
    fn single_cx_gets_one_uniform_event() {
        let mut c = Circuit::new(2);
        c.ops = vec![Op::CX(0, 1)];
        let noisy = apply_noise(&c, &BiasedNoise::new(0.0015, Eta::DEPOLARIZING).unwrap());
        assert_eq!(noisy.ops, vec![Op::CX(0, 1), Op::Pauli2 { a: 0, b: 1, p: 0.0015 }]);
    }
}
