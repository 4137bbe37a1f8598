//! Dense state-vector simulation for circuits of at most
//! [`DENSE_QUBIT_LIMIT`] qubits: trajectory sampling of noisy circuits and
//! an exact check that a patch circuit measures its stabilizer.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{evaluate_record, BitMatrix, SampleBatch};
use crate::circuit::{Circuit, Op, PatchCircuit};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

pub const DENSE_QUBIT_LIMIT: usize = 16;

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Result<Self> {
        if n > DENSE_QUBIT_LIMIT {
            return Err(Error::TooManyQubits(n, DENSE_QUBIT_LIMIT));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn add_scaled(&mut self, other: &StateVector, k: Complex64) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += k * b;
        }
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        let bit = 1usize << q;
        let i = Complex64::new(0.0, 1.0);
        match p {
            Pauli::I => {}
            Pauli::Z => {
                for (k, a) in self.amps.iter_mut().enumerate() {
                    if k & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Pauli::X | Pauli::Y => {
                for k in 0..self.amps.len() {
                    if k & bit == 0 {
                        let (a0, a1) = (self.amps[k], self.amps[k | bit]);
                        if p == Pauli::X {
                            self.amps[k] = a1;
                            self.amps[k | bit] = a0;
                        } else {
                            // Y = [[0, -i], [i, 0]]
                            self.amps[k] = -i * a1;
                            self.amps[k | bit] = i * a0;
                        }
                    }
                }
            }
        }
    }

    pub fn h(&mut self, q: usize) {
        let bit = 1usize << q;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for k in 0..self.amps.len() {
            if k & bit == 0 {
                let (a0, a1) = (self.amps[k], self.amps[k | bit]);
                self.amps[k] = (a0 + a1) * s;
                self.amps[k | bit] = (a0 - a1) * s;
            }
        }
    }

    fn phase_one(&mut self, q: usize, ph: Complex64) {
        let bit = 1usize << q;
        for (k, a) in self.amps.iter_mut().enumerate() {
            if k & bit != 0 {
                *a *= ph;
            }
        }
    }

    pub fn s(&mut self, q: usize) {
        self.phase_one(q, Complex64::new(0.0, 1.0));
    }

    pub fn s_dag(&mut self, q: usize) {
        self.phase_one(q, Complex64::new(0.0, -1.0));
    }

    /// Controlled-`p` with control `c` and target `t`.
    pub fn controlled(&mut self, c: usize, t: usize, p: Pauli) {
        let (cb, tb) = (1usize << c, 1usize << t);
        let i = Complex64::new(0.0, 1.0);
        for k in 0..self.amps.len() {
            if k & cb == 0 {
                continue;
            }
            match p {
                Pauli::I => {}
                Pauli::Z => {
                    if k & tb != 0 {
                        self.amps[k] = -self.amps[k];
                    }
                }
                Pauli::X | Pauli::Y if k & tb == 0 => {
                    let (a0, a1) = (self.amps[k], self.amps[k | tb]);
                    if p == Pauli::X {
                        self.amps[k] = a1;
                        self.amps[k | tb] = a0;
                    } else {
                        self.amps[k] = -i * a1;
                        self.amps[k | tb] = i * a0;
                    }
                }
                _ => {}
            }
        }
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps.iter().enumerate().filter(|(k, _)| k & bit != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Project `q` onto `outcome` and renormalise.
    pub fn collapse(&mut self, q: usize, outcome: bool) {
        let bit = 1usize << q;
        for (k, a) in self.amps.iter_mut().enumerate() {
            if (k & bit != 0) != outcome {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        self.normalize();
    }

    pub fn measure_z(&mut self, q: usize, rng: &mut impl Rng) -> bool {
        let p1 = self.prob_one(q);
        let outcome = rng.random::<f64>() < p1;
        self.collapse(q, outcome);
        outcome
    }

    fn to_z_basis(&mut self, q: usize, basis: Pauli) {
        match basis {
            Pauli::X => self.h(q),
            Pauli::Y => {
                self.s_dag(q);
                self.h(q);
            }
            _ => {}
        }
    }

    fn from_z_basis(&mut self, q: usize, basis: Pauli) {
        match basis {
            Pauli::X => self.h(q),
            Pauli::Y => {
                self.h(q);
                self.s(q);
            }
            _ => {}
        }
    }

    /// Probability that measuring `q` in `basis` gives 1.
    pub fn prob_one_in(&mut self, q: usize, basis: Pauli) -> f64 {
        self.to_z_basis(q, basis);
        let p = self.prob_one(q);
        self.from_z_basis(q, basis);
        p
    }

    pub fn measure(&mut self, q: usize, basis: Pauli, rng: &mut impl Rng) -> bool {
        self.to_z_basis(q, basis);
        let r = self.measure_z(q, rng);
        self.from_z_basis(q, basis);
        r
    }

    pub fn prepare(&mut self, q: usize, basis: Pauli, rng: &mut impl Rng) {
        if self.measure_z(q, rng) {
            self.apply_pauli(q, Pauli::X);
        }
        self.from_z_basis(q, basis);
    }
}

/// Run `circuit` along one trajectory. With `noisy`, noise instructions are
/// sampled; otherwise they are skipped.
fn run_trajectory(circuit: &Circuit, noisy: bool, rng: &mut ChaCha8Rng) -> Result<Vec<bool>> {
    let mut psi = StateVector::zero(circuit.num_qubits)?;
    let mut out: Vec<bool> = Vec::new();
    let mut last = vec![usize::MAX; circuit.num_qubits];
    for op in &circuit.ops {
        match *op {
            Op::PrepZ(q) => psi.prepare(q, Pauli::Z, rng),
            Op::PrepX(q) => psi.prepare(q, Pauli::X, rng),
            Op::PrepY(q) => psi.prepare(q, Pauli::Y, rng),
            Op::H(q) => psi.h(q),
            Op::CX(c, t) => psi.controlled(c, t, Pauli::X),
            Op::CY(c, t) => psi.controlled(c, t, Pauli::Y),
            Op::MeasZ(q) | Op::MeasX(q) | Op::MeasY(q) => {
                let basis = match op {
                    Op::MeasZ(_) => Pauli::Z,
                    Op::MeasX(_) => Pauli::X,
                    _ => Pauli::Y,
                };
                last[q] = out.len();
                out.push(psi.measure(q, basis, rng));
            }
            Op::Tick => {}
            _ if !noisy => {}
            Op::Pauli1 { q, px, py, pz } => {
                let u: f64 = rng.random();
                let p = if u < px {
                    Pauli::X
                } else if u < px + py {
                    Pauli::Y
                } else if u < px + py + pz {
                    Pauli::Z
                } else {
                    Pauli::I
                };
                psi.apply_pauli(q, p);
            }
            Op::Pauli2 { a, b, p } => {
                if rng.random::<f64>() < p {
                    let k = rng.random_range(1..16usize);
                    psi.apply_pauli(a, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k >> 2]);
                    psi.apply_pauli(b, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k & 3]);
                }
            }
            Op::PrepFlip { q, p, flip } => {
                if rng.random::<f64>() < p {
                    psi.apply_pauli(q, flip);
                }
            }
            Op::MeasFlip { q, p } => {
                if rng.random::<f64>() < p {
                    out[last[q]] ^= true;
                }
            }
        }
    }
    Ok(out)
}

/// Sample detector/observable flips by explicit state-vector trajectories.
/// Flips are taken relative to a noiseless run of the same circuit.
pub fn dense_oracle(circuit: &Circuit, shots: usize, seed: u64) -> Result<SampleBatch> {
    if circuit.num_qubits > DENSE_QUBIT_LIMIT {
        return Err(Error::TooManyQubits(circuit.num_qubits, DENSE_QUBIT_LIMIT));
    }
    circuit.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let (ref_det, ref_obs) = evaluate_record(circuit, &run_trajectory(circuit, false, &mut rng)?);

    const CHUNK: usize = 256;
    let chunks: Vec<Result<Vec<(Vec<bool>, Vec<bool>)>>> = (0..shots.div_ceil(CHUNK))
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let n = CHUNK.min(shots - k * CHUNK);
            (0..n).map(|_| Ok(evaluate_record(circuit, &run_trajectory(circuit, true, &mut rng)?))).collect()
        })
        .collect();
    let mut detectors = BitMatrix::zeros(shots, circuit.detectors.len());
    let mut observables = BitMatrix::zeros(shots, circuit.observables.len());
    let mut s = 0;
    for chunk in chunks {
        for (d, o) in chunk? {
            for (j, (&v, &r)) in d.iter().zip(&ref_det).enumerate() {
                detectors.set(s, j, v != r);
            }
            for (j, (&v, &r)) in o.iter().zip(&ref_obs).enumerate() {
                observables.set(s, j, v != r);
            }
            s += 1;
        }
    }
    Ok(SampleBatch { shots, detectors, observables, flags: None })
}

/// Execute a patch circuit from `input` (data register only; ancillas
/// start in |0>) and return, for each measurement, the probability of
/// outcome 1 at the moment it is taken, collapsing onto the more likely
/// branch. Returns the final state as well.
fn run_patch(patch: &PatchCircuit, input: &StateVector) -> Result<(Vec<f64>, StateVector)> {
    let n = patch.circuit.num_qubits;
    let mut psi = StateVector::zero(n)?;
    // embed the data register (local qubits 0..w are the low bits)
    for a in &mut psi.amps {
        *a = Complex64::new(0.0, 0.0);
    }
    psi.amps[..input.amps.len()].copy_from_slice(&input.amps);
    let mut probs = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for op in &patch.circuit.ops {
        match *op {
            Op::PrepZ(q) | Op::PrepX(q) | Op::PrepY(q) => {
                if psi.prob_one(q) > TOL {
                    return Err(Error::InvalidArgument(format!("qubit {q} reused before reset")));
                }
                let basis = match op {
                    Op::PrepZ(_) => Pauli::Z,
                    Op::PrepX(_) => Pauli::X,
                    _ => Pauli::Y,
                };
                psi.prepare(q, basis, &mut rng);
            }
            Op::H(q) => psi.h(q),
            Op::CX(c, t) => psi.controlled(c, t, Pauli::X),
            Op::CY(c, t) => psi.controlled(c, t, Pauli::Y),
            Op::MeasZ(q) | Op::MeasX(q) | Op::MeasY(q) => {
                let basis = match op {
                    Op::MeasZ(_) => Pauli::Z,
                    Op::MeasX(_) => Pauli::X,
                    _ => Pauli::Y,
                };
                let p1 = psi.prob_one_in(q, basis);
                probs.push(p1);
                psi.to_z_basis(q, basis);
                psi.collapse(q, p1 > 0.5);
                psi.from_z_basis(q, basis);
            }
            _ => {}
        }
    }
    Ok((probs, psi))
}

/// Overlap of the data register of `psi` with `target`, maximised over the
/// (classical) ancilla configuration.
fn data_fidelity(psi: &StateVector, target: &StateVector) -> f64 {
    let w = target.n;
    let mask = (1usize << w) - 1;
    let mut by_anc: std::collections::BTreeMap<usize, Complex64> = Default::default();
    for (k, a) in psi.amps.iter().enumerate() {
        *by_anc.entry(k >> w).or_default() += target.amps[k & mask].conj() * a;
    }
    by_anc.values().map(|v| v.norm_sqr()).sum()
}

fn stabilizer_projection(w: usize, letters: &[Pauli], basis_state: usize, sign: f64) -> Result<Option<StateVector>> {
    let mut base = StateVector::zero(w)?;
    base.amps.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
    base.amps[basis_state] = Complex64::new(1.0, 0.0);
    let mut image = base.clone();
    for (q, &p) in letters.iter().enumerate() {
        image.apply_pauli(q, p);
    }
    base.add_scaled(&image, Complex64::new(sign, 0.0));
    if base.norm_sqr() < TOL {
        return Ok(None);
    }
    base.normalize();
    Ok(Some(base))
}

/// Decide by exact simulation whether `patch` projectively measures the
/// stabilizer `letters` on its data qubits: +1/-1 eigenstates give outcome
/// 0/1 with certainty and are left unchanged, every single data-qubit Pauli
/// flips the outcome exactly when it anticommutes with the stabilizer, and
/// flag outcomes stay 0 throughout.
pub fn verify_patch(patch: &PatchCircuit, letters: &[Pauli]) -> Result<bool> {
    let n = patch.circuit.num_qubits;
    if n > DENSE_QUBIT_LIMIT {
        return Err(Error::TooManyQubits(n, DENSE_QUBIT_LIMIT));
    }
    let w = patch.data.len();
    if patch.circuit.ops.is_empty() || letters.len() != w || w == 0 {
        return Ok(false);
    }
    if patch.data.iter().enumerate().any(|(i, &q)| i != q) {
        return Err(Error::InvalidArgument("patch data qubits must be the low local ids".into()));
    }
    let nmeas = patch.circuit.num_measurements();
    if patch.syndrome_measurement >= nmeas || patch.flag_measurements.iter().any(|&m| m >= nmeas) {
        return Ok(false);
    }
    let certain = |p: f64, want: bool| if want { p > 1.0 - TOL } else { p < TOL };
    let flags_quiet = |probs: &[f64]| patch.flag_measurements.iter().all(|&m| probs[m] < TOL);

    for b in 0..1usize << w {
        for (sign, outcome) in [(1.0, false), (-1.0, true)] {
            let Some(psi) = stabilizer_projection(w, letters, b, sign)? else { continue };
            let (probs, out) = match run_patch(patch, &psi) {
                Ok(v) => v,
                Err(_) => return Ok(false),
            };
            if !certain(probs[patch.syndrome_measurement], outcome) || !flags_quiet(&probs) {
                return Ok(false);
            }
            if (data_fidelity(&out, &psi) - 1.0).abs() > 1e-6 {
                return Ok(false);
            }
            if outcome {
                continue;
            }
            for q in 0..w {
                for p in Pauli::NON_IDENTITY {
                    let mut err = psi.clone();
                    err.apply_pauli(q, p);
                    let (probs, _) = run_patch(patch, &err)?;
                    if !certain(probs[patch.syndrome_measurement], p.anticommutes(letters[q])) || !flags_quiet(&probs) {
                        return Ok(false);
                    }
                }
            }
        }
    }

    // an equal superposition of the two eigenspaces must collapse onto one
    let plus = (0..1usize << w).find_map(|b| stabilizer_projection(w, letters, b, 1.0).ok().flatten());
    let minus = (0..1usize << w).find_map(|b| stabilizer_projection(w, letters, b, -1.0).ok().flatten());
    if let (Some(plus), Some(minus)) = (plus, minus) {
        let mut mix = plus.clone();
        mix.add_scaled(&minus, Complex64::new(1.0, 0.0));
        mix.normalize();
        let (probs, out) = run_patch_sampled(patch, &mix)?;
        if (probs - 0.5).abs() > 1e-6 {
            return Ok(false);
        }
        let branch = if out.1 { &minus } else { &plus };
        if (data_fidelity(&out.0, branch) - 1.0).abs() > 1e-6 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Like `run_patch`, but collapses the syndrome onto outcome 0 and returns
/// its pre-measurement probability of 1.
fn run_patch_sampled(patch: &PatchCircuit, input: &StateVector) -> Result<(f64, (StateVector, bool))> {
    let n = patch.circuit.num_qubits;
    let mut psi = StateVector::zero(n)?;
    psi.amps.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
    psi.amps[..input.amps.len()].copy_from_slice(&input.amps);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut p_syn = 0.0;
    let mut m = 0;
    for op in &patch.circuit.ops {
        match *op {
            Op::PrepZ(q) => psi.prepare(q, Pauli::Z, &mut rng),
            Op::PrepX(q) => psi.prepare(q, Pauli::X, &mut rng),
            Op::PrepY(q) => psi.prepare(q, Pauli::Y, &mut rng),
            Op::H(q) => psi.h(q),
            Op::CX(c, t) => psi.controlled(c, t, Pauli::X),
            Op::CY(c, t) => psi.controlled(c, t, Pauli::Y),
            Op::MeasZ(q) | Op::MeasX(q) | Op::MeasY(q) => {
                let basis = match op {
                    Op::MeasZ(_) => Pauli::Z,
                    Op::MeasX(_) => Pauli::X,
                    _ => Pauli::Y,
                };
                let p1 = psi.prob_one_in(q, basis);
                let outcome = if m == patch.syndrome_measurement {
                    p_syn = p1;
                    false
                } else {
                    p1 > 0.5
                };
                psi.to_z_basis(q, basis);
                psi.collapse(q, outcome);
                psi.from_z_basis(q, basis);
                m += 1;
            }
            _ => {}
        }
    }
    Ok((p_syn, (psi, false)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = StateVector::zero(1).unwrap();
        s.prepare(0, Pauli::Y, &mut rng);
        assert!(s.prob_one_in(0, Pauli::Y) < TOL);
        s.apply_pauli(0, Pauli::Z);
        assert!(s.prob_one_in(0, Pauli::Y) > 1.0 - TOL);
        assert!((s.prob_one_in(0, Pauli::X) - 0.5).abs() < TOL);
    }

    #[test]
    fn controlled_y_kickback() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = StateVector::zero(2).unwrap();
        s.prepare(0, Pauli::X, &mut rng);
        s.prepare(1, Pauli::Y, &mut rng);
        s.apply_pauli(1, Pauli::X);
        s.controlled(0, 1, Pauli::Y);
        assert!(s.prob_one_in(0, Pauli::X) > 1.0 - TOL);
    }

    #[test]
    fn too_many_qubits() {
        assert!(matches!(StateVector::zero(17), Err(Error::TooManyQubits(17, 16))));
    }
}
