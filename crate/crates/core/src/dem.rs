//! Detector error models: extraction from noisy circuits, the per-group
//! split used for independent matching, and a plain-text format.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::circuit::{Circuit, Op};
use crate::error::{Error, Result};
use crate::layout::StabGroup;

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorMechanism {
    pub probability: f64,
    /// Ascending detector indices.
    pub detectors: Vec<usize>,
    /// Bit `k` set when observable `k` flips.
    pub observables: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DetectorErrorModel {
    pub num_detectors: usize,
    pub num_observables: usize,
    pub mechanisms: Vec<ErrorMechanism>,
    /// Merged probability mass of mechanisms that flip observables but no detector.
    pub undetectable: Vec<ErrorMechanism>,
}

/// Combined probability of an odd number of two independent events.
pub fn merge_probability(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

type Signature = Vec<u64>;

struct Accumulator {
    num_detectors: usize,
    merged: HashMap<Signature, f64>,
    order: Vec<Signature>,
}

impl Accumulator {
    fn add(&mut self, sig: &[u64], p: f64) {
        if p <= 0.0 || sig.iter().all(|&w| w == 0) {
            return;
        }
        match self.merged.get_mut(sig) {
            Some(q) => *q = merge_probability(*q, p),
            None => {
                self.merged.insert(sig.to_vec(), p);
                self.order.push(sig.to_vec());
            }
        }
    }

    fn decode(&self, sig: &[u64]) -> (Vec<usize>, u64) {
        let mut dets = Vec::new();
        let mut obs = 0u64;
        for (k, &w) in sig.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = k * 64 + w.trailing_zeros() as usize;
                if b < self.num_detectors {
                    dets.push(b);
                } else {
                    obs |= 1 << (b - self.num_detectors);
                }
                w &= w - 1;
            }
        }
        (dets, obs)
    }
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (a, b) in dst.iter_mut().zip(src) {
        *a ^= b;
    }
}

/// Extract every error mechanism of a noisy circuit by sweeping detector
/// sensitivities backwards through the Clifford gates. Each outcome of each
/// noise channel becomes one mechanism; mechanisms with identical
/// signatures are merged.
pub fn extract_dem(circuit: &Circuit) -> Result<DetectorErrorModel> {
    circuit.validate()?;
    let nd = circuit.detectors.len();
    let no = circuit.observables.len();
    if no > 64 {
        return Err(Error::Unsupported(format!("{no} observables; at most 64 are supported")));
    }
    let words = (nd + no).div_ceil(64).max(1);
    let n = circuit.num_qubits;

    // sensitivity of each measurement outcome
    let consumers = circuit.measurement_consumers();
    let meas_sig: Vec<Signature> = consumers
        .iter()
        .map(|(dets, obs)| {
            let mut s = vec![0u64; words];
            for &d in dets {
                s[d / 64] ^= 1 << (d % 64);
            }
            for &o in obs {
                let b = nd + o;
                s[b / 64] ^= 1 << (b % 64);
            }
            s
        })
        .collect();
    // measurement index for every measurement and MeasFlip instruction
    let mut meas_at = vec![usize::MAX; circuit.ops.len()];
    let mut last = vec![usize::MAX; n];
    let mut m = 0;
    for (i, op) in circuit.ops.iter().enumerate() {
        match *op {
            Op::MeasZ(q) | Op::MeasX(q) | Op::MeasY(q) => {
                meas_at[i] = m;
                last[q] = m;
                m += 1;
            }
            Op::MeasFlip { q, .. } => meas_at[i] = last[q],
            _ => {}
        }
    }

    let mut sx = vec![0u64; n * words];
    let mut sz = vec![0u64; n * words];
    let row = |q: usize| q * words..(q + 1) * words;
    let mut acc = Accumulator { num_detectors: nd, merged: HashMap::new(), order: Vec::new() };
    let mut tmp = vec![0u64; words];

    for (i, op) in circuit.ops.iter().enumerate().rev() {
        match *op {
            Op::PrepZ(q) | Op::PrepX(q) | Op::PrepY(q) => {
                sx[row(q)].fill(0);
                sz[row(q)].fill(0);
            }
            Op::H(q) => {
                for k in row(q) {
                    std::mem::swap(&mut sx[k], &mut sz[k]);
                }
            }
            Op::CX(c, t) => {
                for k in 0..words {
                    sx[c * words + k] ^= sx[t * words + k];
                    sz[t * words + k] ^= sz[c * words + k];
                }
            }
            Op::CY(c, t) => {
                for k in 0..words {
                    let (xt, zt, zc) = (sx[t * words + k], sz[t * words + k], sz[c * words + k]);
                    sx[c * words + k] ^= xt ^ zt;
                    sx[t * words + k] = xt ^ zc;
                    sz[t * words + k] = zt ^ zc;
                }
            }
            Op::MeasZ(q) => xor_into(&mut sx[row(q)], &meas_sig[meas_at[i]]),
            Op::MeasX(q) => xor_into(&mut sz[row(q)], &meas_sig[meas_at[i]]),
            Op::MeasY(q) => {
                xor_into(&mut sx[row(q)], &meas_sig[meas_at[i]]);
                xor_into(&mut sz[row(q)], &meas_sig[meas_at[i]]);
            }
            Op::Tick => {}
            Op::Pauli1 { q, px, py, pz } => {
                acc.add(&sx[row(q)], px);
                tmp.copy_from_slice(&sx[row(q)]);
                xor_into(&mut tmp, &sz[row(q)]);
                acc.add(&tmp, py);
                acc.add(&sz[row(q)], pz);
            }
            Op::Pauli2 { a, b, p } => {
                for k in 1..16usize {
                    tmp.fill(0);
                    for (qubit, bits) in [(a, k >> 2), (b, k & 3)] {
                        // 1 = X, 2 = Y, 3 = Z
                        if bits == 1 || bits == 2 {
                            xor_into(&mut tmp, &sx[row(qubit)]);
                        }
                        if bits == 2 || bits == 3 {
                            xor_into(&mut tmp, &sz[row(qubit)]);
                        }
                    }
                    acc.add(&tmp, p / 15.0);
                }
            }
            Op::PrepFlip { q, p, flip } => {
                let (bx, bz) = flip.xz();
                tmp.fill(0);
                if bx {
                    xor_into(&mut tmp, &sx[row(q)]);
                }
                if bz {
                    xor_into(&mut tmp, &sz[row(q)]);
                }
                acc.add(&tmp, p);
            }
            Op::MeasFlip { p, .. } => acc.add(&meas_sig[meas_at[i]], p),
        }
    }

    let mut dem = DetectorErrorModel { num_detectors: nd, num_observables: no, ..Default::default() };
    for sig in &acc.order {
        let (detectors, observables) = acc.decode(sig);
        let mech = ErrorMechanism { probability: acc.merged[sig], detectors, observables };
        if mech.detectors.is_empty() {
            dem.undetectable.push(mech);
        } else {
            dem.mechanisms.push(mech);
        }
    }
    dem.mechanisms.sort_by(|a, b| a.detectors.cmp(&b.detectors).then(a.observables.cmp(&b.observables)));
    Ok(dem)
}

/// Mechanisms restricted to one stabilizer group, re-indexed onto that
/// group's detectors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroupDem {
    pub group: Option<StabGroup>,
    /// Global detector index of each local detector.
    pub detectors: Vec<usize>,
    pub num_observables: usize,
    /// Every mechanism touches one or two local detectors.
    pub mechanisms: Vec<ErrorMechanism>,
    /// Hyperedges that could not be decomposed and were discarded.
    pub dropped: usize,
    pub dropped_probability: f64,
}

/// Project a circuit-level model onto the two stabilizer groups.
///
/// A mechanism touching both groups contributes an independent copy, with
/// the same probability, to each. Observable flips are attributed only to
/// the group that owns the logical: the group with detectors in the first
/// layer (the deterministic one under the chosen preparation). Components
/// with more than two detectors are decomposed into existing one- and
/// two-detector signatures of the same group, preferring decompositions
/// that reproduce the observable mask; otherwise they are dropped.
pub fn split_dem(dem: &DetectorErrorModel, circuit: &Circuit) -> Result<(GroupDem, GroupDem)> {
    if circuit.detectors.len() != dem.num_detectors {
        return Err(Error::InvalidArgument("model and circuit disagree on detector count".into()));
    }
    let mut group_of = Vec::with_capacity(dem.num_detectors);
    for (i, d) in circuit.detectors.iter().enumerate() {
        let tag = d.tag.ok_or_else(|| Error::InvalidArgument(format!("detector {i} has no group tag")))?;
        group_of.push(tag.group);
    }
    let owner = circuit
        .detectors
        .iter()
        .filter_map(|d| d.tag)
        .find(|t| t.layer == 0)
        .map(|t| t.group)
        .unwrap_or(StabGroup::S1);

    let mut out = [StabGroup::S1, StabGroup::S2].map(|g| {
        let detectors: Vec<usize> = (0..dem.num_detectors).filter(|&i| group_of[i] == g).collect();
        GroupDem { group: Some(g), detectors, num_observables: dem.num_observables, ..Default::default() }
    });
    let local: Vec<usize> = {
        let mut v = vec![0; dem.num_detectors];
        for g in &out {
            for (k, &d) in g.detectors.iter().enumerate() {
                v[d] = k;
            }
        }
        v
    };

    for (gi, g) in [StabGroup::S1, StabGroup::S2].into_iter().enumerate() {
        let mut simple: Vec<ErrorMechanism> = Vec::new();
        let mut hyper: Vec<ErrorMechanism> = Vec::new();
        for mech in &dem.mechanisms {
            let dets: Vec<usize> = mech.detectors.iter().filter(|&&d| group_of[d] == g).map(|&d| local[d]).collect();
            if dets.is_empty() {
                continue;
            }
            let obs = if g == owner { mech.observables } else { 0 };
            let m = ErrorMechanism { probability: mech.probability, detectors: dets, observables: obs };
            if m.detectors.len() <= 2 {
                simple.push(m);
            } else {
                hyper.push(m);
            }
        }
        let known: BTreeMap<Vec<usize>, BTreeSet<u64>> = simple.iter().fold(BTreeMap::new(), |mut acc, m| {
            acc.entry(m.detectors.clone()).or_default().insert(m.observables);
            acc
        });
        let target = &mut out[gi];
        for h in hyper {
            match decompose(&h.detectors, h.observables, &known) {
                Some(parts) => {
                    for (dets, obs) in parts {
                        simple.push(ErrorMechanism { probability: h.probability, detectors: dets, observables: obs });
                    }
                }
                None => {
                    target.dropped += 1;
                    target.dropped_probability += h.probability;
                }
            }
        }
        target.mechanisms = simple;
    }
    let [a, b] = out;
    Ok((a, b))
}

/// Split `dets` (ascending) into known signatures whose observable masks
/// XOR to `obs`; if none matches the mask, accept any split.
fn decompose(dets: &[usize], obs: u64, known: &BTreeMap<Vec<usize>, BTreeSet<u64>>) -> Option<Vec<(Vec<usize>, u64)>> {
    fn search(
        rest: &[usize],
        want: Option<u64>,
        acc: u64,
        known: &BTreeMap<Vec<usize>, BTreeSet<u64>>,
        parts: &mut Vec<(Vec<usize>, u64)>,
    ) -> bool {
        let Some((&first, tail)) = rest.split_first() else {
            return want.is_none_or(|w| w == acc);
        };
        let mut options: Vec<Vec<usize>> = vec![vec![first]];
        options.extend(tail.iter().map(|&d| vec![first, d]));
        for sig in options {
            let Some(masks) = known.get(&sig) else { continue };
            let remaining: Vec<usize> = tail.iter().copied().filter(|d| !sig.contains(d)).collect();
            for &mask in masks {
                parts.push((sig.clone(), mask));
                if search(&remaining, want, acc ^ mask, known, parts) {
                    return true;
                }
                parts.pop();
            }
        }
        false
    }
    if dets.len() > 12 {
        return None;
    }
    let mut parts = Vec::new();
    if search(dets, Some(obs), 0, known, &mut parts) {
        return Some(parts);
    }
    parts.clear();
    search(dets, None, 0, known, &mut parts).then_some(parts)
}

impl fmt::Display for DetectorErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# detectors {} observables {}", self.num_detectors, self.num_observables)?;
        for m in self.mechanisms.iter().chain(&self.undetectable) {
            write!(f, "error {:e}", m.probability)?;
            for d in &m.detectors {
                write!(f, " D{d}")?;
            }
            for k in 0..64 {
                if m.observables >> k & 1 == 1 {
                    write!(f, " L{k}")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl DetectorErrorModel {
    pub fn parse(text: &str) -> Result<Self> {
        let mut dem = DetectorErrorModel::default();
        for (i, line) in text.lines().enumerate() {
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let line = line.trim();
            if let Some(header) = line.strip_prefix('#') {
                let t: Vec<&str> = header.split_whitespace().collect();
                if t.len() == 4 && t[0] == "detectors" && t[2] == "observables" {
                    dem.num_detectors = t[1].parse().map_err(|_| err("bad detector count".into()))?;
                    dem.num_observables = t[3].parse().map_err(|_| err("bad observable count".into()))?;
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            if tok.next() != Some("error") {
                return Err(err("expected `error`".into()));
            }
            let p: f64 = tok
                .next()
                .and_then(|t| t.parse().ok())
                .filter(|p: &f64| (0.0..=1.0).contains(p))
                .ok_or_else(|| err("missing or invalid probability".into()))?;
            let mut m = ErrorMechanism { probability: p, detectors: Vec::new(), observables: 0 };
            for t in tok {
                if let Some(d) = t.strip_prefix('D') {
                    let d: usize = d.parse().map_err(|_| err(format!("bad detector {t:?}")))?;
                    dem.num_detectors = dem.num_detectors.max(d + 1);
                    m.detectors.push(d);
                } else if let Some(k) = t.strip_prefix('L') {
                    let k: usize = k.parse().ok().filter(|&k| k < 64).ok_or_else(|| err(format!("bad observable {t:?}")))?;
                    dem.num_observables = dem.num_observables.max(k + 1);
                    m.observables ^= 1 << k;
                } else {
                    return Err(err(format!("unexpected token {t:?}")));
                }
            }
            m.detectors.sort_unstable();
            if m.detectors.is_empty() {
                dem.undetectable.push(m);
            } else {
                dem.mechanisms.push(m);
            }
        }
        Ok(dem)
    }
}
