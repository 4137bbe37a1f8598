//! Clifford circuits with detectors and observables, the stabilizer patch
//! and memory-experiment compilers, and exact single-fault propagation.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::layout::{CodeLayout, StabGroup, StabilizerSpec, Structure};
use crate::pauli::{Pauli, PauliString};

/// One circuit instruction. Noise events are ordinary instructions so that a
/// noisy circuit is still a single ordered program.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Op {
    PrepZ(usize),
    PrepX(usize),
    PrepY(usize),
    H(usize),
    CX(usize, usize),
    CY(usize, usize),
    MeasZ(usize),
    MeasX(usize),
    MeasY(usize),
    Tick,
    /// Independent X/Y/Z with the given probabilities (mutually exclusive).
    Pauli1 { q: usize, px: f64, py: f64, pz: f64 },
    /// Each of the 15 non-identity two-qubit Paulis with probability `p / 15`.
    Pauli2 { a: usize, b: usize, p: f64 },
    /// Applies `flip` with probability `p` after a preparation.
    PrepFlip { q: usize, p: f64, flip: Pauli },
    /// Flips the most recent measurement result of `q` with probability `p`.
    MeasFlip { q: usize, p: f64 },
}

impl Op {
    pub fn is_noise(&self) -> bool {
        matches!(self, Op::Pauli1 { .. } | Op::Pauli2 { .. } | Op::PrepFlip { .. } | Op::MeasFlip { .. })
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Op::MeasZ(_) | Op::MeasX(_) | Op::MeasY(_))
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Op::PrepZ(q)
            | Op::PrepX(q)
            | Op::PrepY(q)
            | Op::H(q)
            | Op::MeasZ(q)
            | Op::MeasX(q)
            | Op::MeasY(q)
            | Op::Pauli1 { q, .. }
            | Op::PrepFlip { q, .. }
            | Op::MeasFlip { q, .. } => vec![q],
            Op::CX(a, b) | Op::CY(a, b) | Op::Pauli2 { a, b, .. } => vec![a, b],
            Op::Tick => vec![],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorTag {
    pub group: StabGroup,
    /// Index into the layout's stabilizer list.
    pub stabilizer: usize,
    /// Detector layer: 0 for the first round, `rounds` for the final readout.
    pub layer: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detector {
    pub measurements: Vec<usize>,
    pub tag: Option<DetectorTag>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub ops: Vec<Op>,
    pub detectors: Vec<Detector>,
    pub observables: Vec<Vec<usize>>,
    /// Qubits that receive idle noise after each `Tick`.
    pub data_qubits: Vec<usize>,
    pub flag_qubits: Vec<usize>,
    pub rounds: usize,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit { num_qubits, ..Default::default() }
    }

    pub fn num_measurements(&self) -> usize {
        self.ops.iter().filter(|op| op.is_measurement()).count()
    }

    pub fn num_ticks(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Op::Tick)).count()
    }

    /// Qubit measured by each measurement index, with its basis.
    pub fn measurement_targets(&self) -> Vec<(usize, Pauli)> {
        self.ops
            .iter()
            .filter_map(|op| match *op {
                Op::MeasZ(q) => Some((q, Pauli::Z)),
                Op::MeasX(q) => Some((q, Pauli::X)),
                Op::MeasY(q) => Some((q, Pauli::Y)),
                _ => None,
            })
            .collect()
    }

    /// Check operand ranges, measurement references and noise attachment.
    pub fn validate(&self) -> Result<()> {
        let mut measured = vec![false; self.num_qubits];
        let mut count = 0;
        for (i, op) in self.ops.iter().enumerate() {
            let qs = op.qubits();
            if let Some(&q) = qs.iter().find(|&&q| q >= self.num_qubits) {
                return Err(Error::InvalidArgument(format!("op {i} touches qubit {q} >= {}", self.num_qubits)));
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(Error::InvalidArgument(format!("op {i} uses qubit {} twice", qs[0])));
            }
            match *op {
                Op::MeasZ(q) | Op::MeasX(q) | Op::MeasY(q) => {
                    measured[q] = true;
                    count += 1;
                }
                Op::MeasFlip { q, .. } if !measured[q] => {
                    return Err(Error::InvalidArgument(format!("op {i} flips qubit {q} before any measurement")));
                }
                _ => {}
            }
            let probs = match *op {
                Op::Pauli1 { px, py, pz, .. } => vec![px, py, pz, px + py + pz],
                Op::Pauli2 { p, .. } | Op::PrepFlip { p, .. } | Op::MeasFlip { p, .. } => vec![p],
                _ => vec![],
            };
            if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::InvalidArgument(format!("op {i} has a probability outside [0, 1]")));
            }
        }
        for (k, det) in self.detectors.iter().enumerate() {
            if let Some(&m) = det.measurements.iter().find(|&&m| m >= count) {
                return Err(Error::InvalidArgument(format!("detector {k} references measurement {m}")));
            }
        }
        for (k, obs) in self.observables.iter().enumerate() {
            if let Some(&m) = obs.iter().find(|&&m| m >= count) {
                return Err(Error::InvalidArgument(format!("observable {k} references measurement {m}")));
            }
        }
        Ok(())
    }

    /// The same circuit with every noise instruction removed.
    pub fn without_noise(&self) -> Circuit {
        Circuit { ops: self.ops.iter().filter(|op| !op.is_noise()).copied().collect(), ..self.clone() }
    }

    /// For every measurement, the detectors and observables containing it.
    pub fn measurement_consumers(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out = vec![(Vec::new(), Vec::new()); self.num_measurements()];
        for (d, det) in self.detectors.iter().enumerate() {
            for &m in &det.measurements {
                out[m].0.push(d);
            }
        }
        for (k, obs) in self.observables.iter().enumerate() {
            for &m in obs {
                out[m].1.push(k);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// patch circuits

/// A single stabilizer measurement on local qubits: data `0..w`, then the
/// flags, then the syndrome qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchCircuit {
    pub circuit: Circuit,
    pub letters: Vec<Pauli>,
    pub data: Vec<usize>,
    pub flags: Vec<usize>,
    pub syndrome: usize,
    pub syndrome_measurement: usize,
    pub flag_measurements: Vec<usize>,
}

fn check_template(stab: &StabilizerSpec) -> Result<()> {
    if !(3..=4).contains(&stab.weight()) || stab.letters.len() != stab.weight() {
        return Err(Error::Unsupported(format!("stabilizer weight {}", stab.weight())));
    }
    let uniform = stab.letters.iter().all(|&p| p == stab.letters[0]);
    let xz_only = stab.letters.iter().all(|&p| matches!(p, Pauli::X | Pauli::Z));
    if stab.letters.contains(&Pauli::I) || !(uniform || xz_only) {
        let s: String = stab.letters.iter().map(|p| p.as_char()).collect();
        return Err(Error::Unsupported(format!("no patch template for letters {s}")));
    }
    Ok(())
}

/// Steps of one heavy-hex patch on global ids; ops within a step touch
/// disjoint qubits, so steps of disjoint patches can be merged.
fn flag_patch_steps(stab: &StabilizerSpec) -> Vec<Vec<Op>> {
    let syn = stab.syndrome_id;
    let mut steps: Vec<Vec<Op>> = Vec::new();
    let mut prep = vec![Op::PrepX(syn)];
    prep.extend(stab.flag_ids.iter().map(|&f| Op::PrepZ(f)));
    steps.push(prep);

    let mut entangle: Vec<Vec<Op>> = stab.branches.iter().map(|b| vec![Op::CX(syn, b.flags[0])]).collect();
    let depth = stab.branches.iter().map(|b| b.flags.len()).max().unwrap_or(0);
    for i in 1..depth {
        entangle.push(
            stab.branches.iter().filter(|b| b.flags.len() > i).map(|b| Op::CX(b.flags[i - 1], b.flags[i])).collect(),
        );
    }

    let mut couple: Vec<Vec<Op>> = Vec::new();
    for (&d, &letter) in stab.data_ids.iter().zip(&stab.letters) {
        let f = stab
            .branches
            .iter()
            .find_map(|b| b.attachments.iter().find(|a| a.1 == d).map(|a| b.flags[a.0]))
            .expect("every data qubit is attached to a flag");
        match letter {
            Pauli::X => couple.push(vec![Op::CX(f, d)]),
            Pauli::Y => couple.push(vec![Op::CY(f, d)]),
            Pauli::Z => {
                couple.push(vec![Op::H(f)]);
                couple.push(vec![Op::CX(d, f)]);
                couple.push(vec![Op::H(f)]);
            }
            Pauli::I => unreachable!(),
        }
    }

    steps.extend(entangle.iter().cloned());
    steps.extend(couple);
    steps.extend(entangle.into_iter().rev());
    let mut meas = vec![Op::MeasX(syn)];
    meas.extend(stab.flag_ids.iter().map(|&f| Op::MeasZ(f)));
    steps.push(meas);
    steps
}

/// Direct syndrome-data interactions for one lattice stabilizer, one entry
/// per data qubit in `data_ids` order. The syndrome switches between an
/// X-type frame (controls X/Y interactions) and a Z-type frame (collects Z
/// parity) with Hadamards.
fn lattice_interactions(syn: usize, d: usize, letter: Pauli, frame_z: &mut bool) -> Vec<Op> {
    let want_z = letter == Pauli::Z;
    let mut ops = Vec::new();
    if want_z != *frame_z {
        ops.push(Op::H(syn));
        *frame_z = want_z;
    }
    ops.push(match letter {
        Pauli::X => Op::CX(syn, d),
        Pauli::Y => Op::CY(syn, d),
        Pauli::Z => Op::CX(d, syn),
        Pauli::I => unreachable!(),
    });
    ops
}

fn lattice_patch_steps(stab: &StabilizerSpec) -> Vec<Vec<Op>> {
    let syn = stab.syndrome_id;
    let mut frame_z = stab.letters[0] == Pauli::Z;
    let mut steps = vec![vec![if frame_z { Op::PrepZ(syn) } else { Op::PrepX(syn) }]];
    for (&d, &letter) in stab.data_ids.iter().zip(&stab.letters) {
        steps.push(lattice_interactions(syn, d, letter, &mut frame_z));
    }
    steps.push(vec![if frame_z { Op::MeasZ(syn) } else { Op::MeasX(syn) }]);
    steps
}

/// Compile the standalone measurement circuit of one stabilizer.
pub fn build_patch_circuit(stab: &StabilizerSpec, structure: Structure) -> Result<PatchCircuit> {
    check_template(stab)?;
    let w = stab.weight();
    let mut local: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &d) in stab.data_ids.iter().enumerate() {
        local.insert(d, i);
    }
    let flags = if structure == Structure::HeavyHex { stab.flag_ids.clone() } else { Vec::new() };
    if structure == Structure::HeavyHex && flags.is_empty() {
        return Err(Error::Unsupported("heavy-hex patch without flags".into()));
    }
    for (i, &f) in flags.iter().enumerate() {
        local.insert(f, w + i);
    }
    let syndrome = w + flags.len();
    local.insert(stab.syndrome_id, syndrome);
    let relabel = |q: usize| local[&q];
    let remapped = StabilizerSpec {
        group: stab.group,
        letters: stab.letters.clone(),
        data_ids: (0..w).collect(),
        syndrome_id: syndrome,
        flag_ids: flags.iter().map(|&f| relabel(f)).collect(),
        branches: stab
            .branches
            .iter()
            .map(|b| crate::layout::Branch {
                flags: b.flags.iter().map(|&f| relabel(f)).collect(),
                attachments: b.attachments.iter().map(|&(k, d)| (k, relabel(d))).collect(),
            })
            .collect(),
        position: stab.position,
    };
    let steps = match structure {
        Structure::HeavyHex => flag_patch_steps(&remapped),
        Structure::Lattice => lattice_patch_steps(&remapped),
    };
    let mut circuit = Circuit::new(syndrome + 1);
    circuit.data_qubits = (0..w).collect();
    circuit.flag_qubits = remapped.flag_ids.clone();
    circuit.ops = steps.into_iter().flatten().collect();
    let targets = circuit.measurement_targets();
    let syndrome_measurement = targets.iter().position(|t| t.0 == syndrome).unwrap();
    let flag_measurements = remapped
        .flag_ids
        .iter()
        .map(|&f| targets.iter().position(|t| t.0 == f).unwrap())
        .collect();
    Ok(PatchCircuit {
        circuit,
        letters: stab.letters.clone(),
        data: (0..w).collect(),
        flags: remapped.flag_ids,
        syndrome,
        syndrome_measurement,
        flag_measurements,
    })
}

fn merge_steps(patches: Vec<Vec<Vec<Op>>>) -> Vec<Op> {
    let depth = patches.iter().map(|p| p.len()).max().unwrap_or(0);
    let mut out = Vec::new();
    for i in 0..depth {
        for p in &patches {
            if let Some(step) = p.get(i) {
                out.extend_from_slice(step);
            }
        }
    }
    out
}

fn prep_op(letter: Pauli, q: usize) -> Op {
    match letter {
        Pauli::X => Op::PrepX(q),
        Pauli::Y => Op::PrepY(q),
        _ => Op::PrepZ(q),
    }
}

fn meas_op(letter: Pauli, q: usize) -> Op {
    match letter {
        Pauli::X => Op::MeasX(q),
        Pauli::Y => Op::MeasY(q),
        _ => Op::MeasZ(q),
    }
}

/// Which logical operator a memory experiment protects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    L1,
    L2,
}

impl Basis {
    pub fn index(self) -> usize {
        match self {
            Basis::L1 => 0,
            Basis::L2 => 1,
        }
    }
}

impl std::str::FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" => Ok(Basis::L1),
            "l2" => Ok(Basis::L2),
            other => Err(Error::InvalidArgument(format!("basis must be l1 or l2, got {other:?}"))),
        }
    }
}

/// Compile a `rounds`-round memory experiment of the chosen logical operator.
pub fn build_memory_circuit(layout: &CodeLayout, rounds: usize, basis: Basis) -> Result<Circuit> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    let (owner, letters) = layout.memory_basis(basis.index())?;
    let mut c = Circuit::new(layout.num_qubits());
    c.data_qubits = layout.data_ids();
    c.flag_qubits = layout.ids_with_role(crate::layout::QubitRole::Flag);
    c.rounds = rounds;
    for (&q, &p) in &letters {
        c.ops.push(prep_op(p, q));
    }

    let ns = layout.stabilizers.len();
    let cycles: Vec<Vec<usize>> = match layout.structure {
        Structure::HeavyHex => [StabGroup::S1, StabGroup::S2]
            .iter()
            .map(|&g| layout.group(g).map(|(i, _)| i).collect())
            .collect(),
        Structure::Lattice => vec![(0..ns).collect()],
    };
    let mut syndrome_meas = vec![vec![0usize; ns]; rounds];
    let mut count = 0usize;
    for round in syndrome_meas.iter_mut() {
        for members in &cycles {
            c.ops.push(Op::Tick);
            let ops = match layout.structure {
                Structure::HeavyHex => {
                    merge_steps(members.iter().map(|&i| flag_patch_steps(&layout.stabilizers[i])).collect())
                }
                Structure::Lattice => lattice_cycle(layout, members),
            };
            for op in ops {
                if op.is_measurement() {
                    if let Some(&i) =
                        members.iter().find(|&&i| op.qubits()[0] == layout.stabilizers[i].syndrome_id)
                    {
                        round[i] = count;
                    }
                    count += 1;
                }
                c.ops.push(op);
            }
        }
    }

    let mut data_meas = BTreeMap::new();
    for (&q, &p) in &letters {
        data_meas.insert(q, count);
        c.ops.push(meas_op(p, q));
        count += 1;
    }

    for layer in 0..=rounds {
        for (i, s) in layout.stabilizers.iter().enumerate() {
            let tag = DetectorTag { group: s.group, stabilizer: i, layer };
            let measurements = if layer == 0 {
                if s.group != owner {
                    continue;
                }
                vec![syndrome_meas[0][i]]
            } else if layer < rounds {
                vec![syndrome_meas[layer - 1][i], syndrome_meas[layer][i]]
            } else {
                if s.group != owner {
                    continue;
                }
                let mut m = vec![syndrome_meas[rounds - 1][i]];
                m.extend(s.data_ids.iter().map(|q| data_meas[q]));
                m
            };
            c.detectors.push(Detector { measurements, tag: Some(tag) });
        }
    }
    c.observables.push(layout.logical_ops[basis.index()].support().map(|q| data_meas[&q]).collect());
    Ok(c)
}

/// One interleaved lattice cycle: every stabilizer visits its N, W, E, S
/// neighbours in lock step.
fn lattice_cycle(layout: &CodeLayout, members: &[usize]) -> Vec<Op> {
    let coord = |q: usize| (layout.qubits[q].row, layout.qubits[q].col);
    let mut frames: Vec<bool> = members.iter().map(|&i| first_letter_in_order(layout, i) == Pauli::Z).collect();
    let mut ops: Vec<Op> = members
        .iter()
        .zip(&frames)
        .map(|(&i, &z)| {
            let syn = layout.stabilizers[i].syndrome_id;
            if z {
                Op::PrepZ(syn)
            } else {
                Op::PrepX(syn)
            }
        })
        .collect();
    for step in 0..4 {
        for (k, &i) in members.iter().enumerate() {
            let s = &layout.stabilizers[i];
            let (sr, sc) = coord(s.syndrome_id);
            let target = match step {
                0 => (sr.wrapping_sub(1), sc),
                1 => (sr, sc.wrapping_sub(1)),
                2 => (sr, sc + 1),
                _ => (sr + 1, sc),
            };
            if let Some(j) = s.data_ids.iter().position(|&d| coord(d) == target) {
                ops.extend(lattice_interactions(s.syndrome_id, s.data_ids[j], s.letters[j], &mut frames[k]));
            }
        }
    }
    for (k, &i) in members.iter().enumerate() {
        let syn = layout.stabilizers[i].syndrome_id;
        ops.push(if frames[k] { Op::MeasZ(syn) } else { Op::MeasX(syn) });
    }
    ops
}

fn first_letter_in_order(layout: &CodeLayout, i: usize) -> Pauli {
    // data_ids are ascending, which is N, W, E, S order on the planar grid
    layout.stabilizers[i].letters[0]
}

/// Two-round memory experiment on a single stabilizer patch, small enough
/// for dense simulation. Data start in the eigenbasis of their letters; the
/// observable is the first data qubit.
pub fn patch_memory_circuit(patch: &PatchCircuit, rounds: usize) -> Result<Circuit> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    let base = &patch.circuit;
    let mut c = Circuit::new(base.num_qubits);
    c.data_qubits = patch.data.clone();
    c.flag_qubits = patch.flags.clone();
    c.rounds = rounds;
    for (&q, &p) in patch.data.iter().zip(&patch.letters) {
        c.ops.push(prep_op(p, q));
    }
    let per_round = base.num_measurements();
    let mut syn = Vec::new();
    for r in 0..rounds {
        c.ops.push(Op::Tick);
        c.ops.extend_from_slice(&base.ops);
        syn.push(r * per_round + patch.syndrome_measurement);
    }
    let mut data_meas = Vec::new();
    for (&q, &p) in patch.data.iter().zip(&patch.letters) {
        data_meas.push(rounds * per_round + data_meas.len());
        c.ops.push(meas_op(p, q));
    }
    let tag = |layer| Some(DetectorTag { group: StabGroup::S1, stabilizer: 0, layer });
    c.detectors.push(Detector { measurements: vec![syn[0]], tag: tag(0) });
    for r in 1..rounds {
        c.detectors.push(Detector { measurements: vec![syn[r - 1], syn[r]], tag: tag(r) });
    }
    let mut last = vec![syn[rounds - 1]];
    last.extend_from_slice(&data_meas);
    c.detectors.push(Detector { measurements: last, tag: tag(rounds) });
    c.observables.push(vec![data_meas[0]]);
    Ok(c)
}

// ---------------------------------------------------------------------------
// Pauli propagation

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Propagation {
    pub measurements: Vec<usize>,
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
}

/// Insert `fault` immediately before instruction `location` (use
/// `ops.len()` for the end) and push it through the rest of the circuit.
/// Noise instructions are ignored.
pub fn propagate_pauli(circuit: &Circuit, location: usize, fault: &PauliString) -> Result<Propagation> {
    if location > circuit.ops.len() {
        return Err(Error::InvalidArgument(format!("fault location {location} beyond {} ops", circuit.ops.len())));
    }
    let n = circuit.num_qubits;
    let mut x = vec![false; n];
    let mut z = vec![false; n];
    for &(q, p) in fault.terms() {
        if q >= n {
            return Err(Error::InvalidArgument(format!("fault on qubit {q} outside the circuit")));
        }
        (x[q], z[q]) = p.xz();
    }
    let mut meas_index = circuit.ops[..location].iter().filter(|op| op.is_measurement()).count();
    let mut flipped = Vec::new();
    for op in &circuit.ops[location..] {
        match *op {
            Op::PrepZ(q) | Op::PrepX(q) | Op::PrepY(q) => {
                x[q] = false;
                z[q] = false;
            }
            Op::H(q) => std::mem::swap(&mut x[q], &mut z[q]),
            Op::CX(c, t) => {
                x[t] ^= x[c];
                z[c] ^= z[t];
            }
            Op::CY(c, t) => {
                z[c] ^= x[t] ^ z[t];
                x[t] ^= x[c];
                z[t] ^= x[c];
            }
            Op::MeasZ(q) | Op::MeasX(q) | Op::MeasY(q) => {
                let flip = match op {
                    Op::MeasZ(_) => x[q],
                    Op::MeasX(_) => z[q],
                    _ => x[q] ^ z[q],
                };
                if flip {
                    flipped.push(meas_index);
                }
                meas_index += 1;
            }
            _ => {}
        }
    }
    let mut mask = vec![false; meas_index];
    for &m in &flipped {
        mask[m] = true;
    }
    let parity = |ms: &[usize]| ms.iter().filter(|&&m| mask[m]).count() % 2 == 1;
    Ok(Propagation {
        detectors: circuit.detectors.iter().enumerate().filter(|(_, d)| parity(&d.measurements)).map(|(i, _)| i).collect(),
        observables: circuit.observables.iter().enumerate().filter(|(_, o)| parity(o)).map(|(i, _)| i).collect(),
        measurements: flipped,
    })
}

// ---------------------------------------------------------------------------
// text format

fn fmt_prob(p: f64) -> String {
    format!("{p:e}")
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QUBITS {}", self.num_qubits)?;
        if self.rounds > 0 {
            writeln!(f, "ROUNDS {}", self.rounds)?;
        }
        let list = |qs: &[usize]| qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
        if !self.data_qubits.is_empty() {
            writeln!(f, "DATA {}", list(&self.data_qubits))?;
        }
        if !self.flag_qubits.is_empty() {
            writeln!(f, "FLAG {}", list(&self.flag_qubits))?;
        }
        for op in &self.ops {
            match *op {
                Op::PrepZ(q) => writeln!(f, "PZ {q}")?,
                Op::PrepX(q) => writeln!(f, "PX {q}")?,
                Op::PrepY(q) => writeln!(f, "PY {q}")?,
                Op::H(q) => writeln!(f, "H {q}")?,
                Op::CX(c, t) => writeln!(f, "CX {c} {t}")?,
                Op::CY(c, t) => writeln!(f, "CY {c} {t}")?,
                Op::MeasZ(q) => writeln!(f, "MZ {q}")?,
                Op::MeasX(q) => writeln!(f, "MX {q}")?,
                Op::MeasY(q) => writeln!(f, "MY {q}")?,
                Op::Tick => writeln!(f, "TICK")?,
                Op::Pauli1 { q, px, py, pz } => {
                    writeln!(f, "E1 {} {} {} {q}", fmt_prob(px), fmt_prob(py), fmt_prob(pz))?
                }
                Op::Pauli2 { a, b, p } => writeln!(f, "E2 {} {a} {b}", fmt_prob(p))?,
                Op::PrepFlip { q, p, .. } => writeln!(f, "EPREP {} {q}", fmt_prob(p))?,
                Op::MeasFlip { q, p } => writeln!(f, "EMEAS {} {q}", fmt_prob(p))?,
            }
        }
        for det in &self.detectors {
            let mut line = String::from("DETECTOR");
            for m in &det.measurements {
                write!(line, " m{m}")?;
            }
            if let Some(t) = det.tag {
                write!(line, " g{} s{} r{}", t.group.index() + 1, t.stabilizer, t.layer)?;
            }
            writeln!(f, "{line}")?;
        }
        for (k, obs) in self.observables.iter().enumerate() {
            let ms: Vec<String> = obs.iter().map(|m| format!("m{m}")).collect();
            writeln!(f, "OBSERVABLE {k} {}", ms.join(" "))?;
        }
        Ok(())
    }
}

impl Circuit {
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Circuit> {
        let mut c = Circuit::default();
        let mut seen_qubits = false;
        // basis of the latest preparation, for EPREP
        let mut last_prep: BTreeMap<usize, Pauli> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap().to_ascii_uppercase();
            let rest: Vec<&str> = tokens.collect();
            let uint = |s: &str| s.parse::<usize>().map_err(|_| err(format!("expected an integer, got {s:?}")));
            let prob = |s: &str| s.parse::<f64>().map_err(|_| err(format!("expected a probability, got {s:?}")));
            let meas_ref = |s: &str| {
                s.strip_prefix('m')
                    .ok_or_else(|| err(format!("expected m<index>, got {s:?}")))
                    .and_then(|v| v.parse::<usize>().map_err(|_| err(format!("bad measurement reference {s:?}"))))
            };
            let qubits = |rest: &[&str]| -> Result<Vec<usize>> {
                if rest.is_empty() {
                    return Err(err(format!("{head} needs at least one qubit")));
                }
                rest.iter().map(|s| uint(s)).collect()
            };
            let pairs = |rest: &[&str]| -> Result<Vec<(usize, usize)>> {
                if rest.is_empty() || rest.len() % 2 != 0 {
                    return Err(err(format!("{head} needs control/target pairs")));
                }
                let v: Vec<usize> = rest.iter().map(|s| uint(s)).collect::<Result<_>>()?;
                Ok(v.chunks(2).map(|p| (p[0], p[1])).collect())
            };
            let arity = |k: usize| {
                if rest.len() != k {
                    Err(err(format!("{head} takes {k} arguments, got {}", rest.len())))
                } else {
                    Ok(())
                }
            };
            match head.as_str() {
                "QUBITS" => {
                    arity(1)?;
                    c.num_qubits = uint(rest[0])?;
                    seen_qubits = true;
                }
                "ROUNDS" => {
                    arity(1)?;
                    c.rounds = uint(rest[0])?;
                }
                "DATA" => c.data_qubits.extend(qubits(&rest)?),
                "FLAG" => c.flag_qubits.extend(qubits(&rest)?),
                "PZ" | "PX" | "PY" | "H" | "MZ" | "MX" | "MY" => {
                    for q in qubits(&rest)? {
                        c.ops.push(match head.as_str() {
                            "PZ" => {
                                last_prep.insert(q, Pauli::Z);
                                Op::PrepZ(q)
                            }
                            "PX" => {
                                last_prep.insert(q, Pauli::X);
                                Op::PrepX(q)
                            }
                            "PY" => {
                                last_prep.insert(q, Pauli::Y);
                                Op::PrepY(q)
                            }
                            "H" => Op::H(q),
                            "MZ" => Op::MeasZ(q),
                            "MX" => Op::MeasX(q),
                            _ => Op::MeasY(q),
                        });
                    }
                }
                "CX" | "CY" => {
                    for (a, b) in pairs(&rest)? {
                        c.ops.push(if head == "CX" { Op::CX(a, b) } else { Op::CY(a, b) });
                    }
                }
                "TICK" => {
                    arity(0)?;
                    c.ops.push(Op::Tick);
                }
                "E1" => {
                    arity(4)?;
                    c.ops.push(Op::Pauli1 { px: prob(rest[0])?, py: prob(rest[1])?, pz: prob(rest[2])?, q: uint(rest[3])? });
                }
                "E2" => {
                    arity(3)?;
                    c.ops.push(Op::Pauli2 { p: prob(rest[0])?, a: uint(rest[1])?, b: uint(rest[2])? });
                }
                "EPREP" => {
                    arity(2)?;
                    let q = uint(rest[1])?;
                    let basis = *last_prep.get(&q).ok_or_else(|| err(format!("EPREP on unprepared qubit {q}")))?;
                    c.ops.push(Op::PrepFlip { p: prob(rest[0])?, q, flip: prep_flip_letter(basis) });
                }
                "EMEAS" => {
                    arity(2)?;
                    c.ops.push(Op::MeasFlip { p: prob(rest[0])?, q: uint(rest[1])? });
                }
                "DETECTOR" => {
                    let mut det = Detector { measurements: Vec::new(), tag: None };
                    let (mut g, mut s, mut r) = (None, None, None);
                    for tok in &rest {
                        let (kind, val) = tok.split_at(1);
                        match kind {
                            "m" => det.measurements.push(meas_ref(tok)?),
                            "g" => g = Some(uint(val)?),
                            "s" => s = Some(uint(val)?),
                            "r" => r = Some(uint(val)?),
                            _ => return Err(err(format!("unexpected detector token {tok:?}"))),
                        }
                    }
                    det.tag = match (g, s, r) {
                        (Some(g), Some(stabilizer), Some(layer)) => Some(DetectorTag {
                            group: g
                                .checked_sub(1)
                                .and_then(StabGroup::from_index)
                                .ok_or_else(|| err(format!("group must be 1 or 2, got {g}")))?,
                            stabilizer,
                            layer,
                        }),
                        (None, None, None) => None,
                        _ => return Err(err("detector tag needs g, s and r".into())),
                    };
                    c.detectors.push(det);
                }
                "OBSERVABLE" => {
                    if rest.is_empty() {
                        return Err(err("OBSERVABLE needs an index".into()));
                    }
                    let k = uint(rest[0])?;
                    if c.observables.len() <= k {
                        c.observables.resize(k + 1, Vec::new());
                    }
                    for tok in &rest[1..] {
                        c.observables[k].push(meas_ref(tok)?);
                    }
                }
                other => return Err(err(format!("unknown instruction {other:?}"))),
            }
        }
        if !seen_qubits {
            c.num_qubits = c.ops.iter().flat_map(|op| op.qubits()).max().map_or(0, |q| q + 1);
        }
        c.validate()?;
        Ok(c)
    }
}

/// The Pauli that maps a preparation of `basis` to its orthogonal state.
pub fn prep_flip_letter(basis: Pauli) -> Pauli {
    match basis {
        Pauli::Z => Pauli::X,
        _ => Pauli::Z,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{build_layout, Family};

    #[test]
    fn memory_circuit_detector_census() {
        for structure in [Structure::Lattice, Structure::HeavyHex] {
            let l = build_layout(Family::Surface, structure, 3).unwrap();
            let c = build_memory_circuit(&l, 3, Basis::L1).unwrap();
            // 6 first-layer, 12 in each of 2 middle layers, 6 final
            assert_eq!(c.detectors.len(), 6 + 24 + 6);
            assert_eq!(c.observables[0].len(), 3);
            c.validate().unwrap();
        }
    }

    #[test]
    fn syndrome_measurements_per_round() {
        let l = build_layout(Family::Tailored, Structure::HeavyHex, 3).unwrap();
        let c = build_memory_circuit(&l, 1, Basis::L2).unwrap();
        let syn: Vec<usize> = l.ids_with_role(crate::layout::QubitRole::Syndrome);
        let count = c.ops.iter().filter(|op| op.is_measurement() && syn.contains(&op.qubits()[0])).count();
        assert_eq!(count, 12);
    }

    #[test]
    fn text_round_trip() {
        let l = build_layout(Family::Xzzx, Structure::HeavyHex, 3).unwrap();
        let c = build_memory_circuit(&l, 2, Basis::L1).unwrap();
        let parsed = Circuit::parse(&c.to_text()).unwrap();
        assert_eq!(parsed, c);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(Circuit::parse("QUBITS 2\nFOO 1"), Err(Error::Parse { line: 2, .. })));
        assert!(Circuit::parse("QUBITS 1\nCX 0 1").is_err());
        assert!(Circuit::parse("QUBITS 1\nMZ 0\nDETECTOR m3").is_err());
        assert!(Circuit::parse("QUBITS 1\nEMEAS 0.1 0").is_err());
    }

    #[test]
    fn cy_propagation_rules() {
        let mut c = Circuit::new(2);
        c.ops = vec![Op::CY(0, 1), Op::MeasX(0), Op::MeasZ(1), Op::MeasX(1)];
        let run = |p: PauliString| propagate_pauli(&c, 0, &p).unwrap().measurements;
        // X on control picks up Y on target
        assert_eq!(run(PauliString::single(0, Pauli::X)), vec![1, 2]);
        // X on target kicks Z back to control
        assert_eq!(run(PauliString::single(1, Pauli::X)), vec![0, 1]);
        assert_eq!(run(PauliString::single(1, Pauli::Y)), vec![1, 2]);
    }
}
