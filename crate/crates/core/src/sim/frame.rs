//! Bit-packed Pauli-frame sampling.
//!
//! Shots are processed in fixed blocks of [`BLOCK_SHOTS`]; block `b` draws
//! from ChaCha8 stream `b` of the master seed, so the output depends only on
//! `(circuit, shots, seed)` and not on how blocks are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{BitMatrix, SampleBatch};
use crate::circuit::{Circuit, Op};
use crate::error::Result;
use crate::pauli::Pauli;

pub const BLOCK_SHOTS: usize = 1024;

/// Circuit preprocessed for repeated block sampling.
pub struct FrameSampler<'a> {
    circuit: &'a Circuit,
    /// Measurement index flipped by each `MeasFlip`, in program order.
    meas_flip_targets: Vec<usize>,
    num_measurements: usize,
    flag_measurements: Vec<usize>,
    record_flags: bool,
}

impl<'a> FrameSampler<'a> {
    pub fn new(circuit: &'a Circuit) -> Result<Self> {
        circuit.validate()?;
        let mut last = vec![usize::MAX; circuit.num_qubits];
        let mut targets = Vec::new();
        let mut flag_measurements = Vec::new();
        let mut m = 0;
        for op in &circuit.ops {
            match *op {
                Op::MeasZ(q) | Op::MeasX(q) | Op::MeasY(q) => {
                    last[q] = m;
                    if circuit.flag_qubits.contains(&q) {
                        flag_measurements.push(m);
                    }
                    m += 1;
                }
                Op::MeasFlip { q, .. } => targets.push(last[q]),
                _ => {}
            }
        }
        Ok(FrameSampler {
            circuit,
            meas_flip_targets: targets,
            num_measurements: m,
            flag_measurements,
            record_flags: false,
        })
    }

    /// Also return raw flag-measurement flips.
    pub fn with_flags(mut self) -> Self {
        self.record_flags = true;
        self
    }

    pub fn num_blocks(shots: usize) -> usize {
        shots.div_ceil(BLOCK_SHOTS)
    }

    /// Sample block `block` of a run of `total_shots`.
    pub fn sample_block(&self, seed: u64, block: usize, total_shots: usize) -> SampleBatch {
        let start = block * BLOCK_SHOTS;
        let shots = BLOCK_SHOTS.min(total_shots.saturating_sub(start));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block as u64);
        self.run(shots, &mut rng)
    }

    fn run(&self, shots: usize, rng: &mut ChaCha8Rng) -> SampleBatch {
        let c = self.circuit;
        let w = shots.div_ceil(64);
        let mut x = vec![0u64; c.num_qubits * w];
        let mut z = vec![0u64; c.num_qubits * w];
        let mut rec = vec![0u64; self.num_measurements * w];
        let mut m = 0usize;
        let mut flip_k = 0usize;

        let row = |q: usize| q * w..(q + 1) * w;
        fn apply(x: &mut [u64], z: &mut [u64], w: usize, q: usize, shot: usize, p: Pauli) {
            let (bx, bz) = p.xz();
            let (i, bit) = (q * w + shot / 64, 1u64 << (shot % 64));
            if bx {
                x[i] ^= bit;
            }
            if bz {
                z[i] ^= bit;
            }
        }

        for op in &c.ops {
            match *op {
                Op::PrepZ(q) | Op::PrepX(q) | Op::PrepY(q) => {
                    x[row(q)].fill(0);
                    z[row(q)].fill(0);
                }
                Op::H(q) => {
                    let r = row(q);
                    for k in r {
                        std::mem::swap(&mut x[k], &mut z[k]);
                    }
                }
                Op::CX(a, b) => {
                    for k in 0..w {
                        x[b * w + k] ^= x[a * w + k];
                        z[a * w + k] ^= z[b * w + k];
                    }
                }
                Op::CY(a, b) => {
                    for k in 0..w {
                        let (xa, xb, zb) = (x[a * w + k], x[b * w + k], z[b * w + k]);
                        z[a * w + k] ^= xb ^ zb;
                        x[b * w + k] = xb ^ xa;
                        z[b * w + k] = zb ^ xa;
                    }
                }
                Op::MeasZ(q) | Op::MeasX(q) | Op::MeasY(q) => {
                    for k in 0..w {
                        rec[m * w + k] = match op {
                            Op::MeasZ(_) => x[q * w + k],
                            Op::MeasX(_) => z[q * w + k],
                            _ => x[q * w + k] ^ z[q * w + k],
                        };
                    }
                    m += 1;
                }
                Op::Tick => {}
                Op::Pauli1 { q, px, py, pz } => {
                    let total = px + py + pz;
                    for_each_hit(rng, total, shots, |rng, s| {
                        let u = rng.random::<f64>() * total;
                        let p = if u < px {
                            Pauli::X
                        } else if u < px + py {
                            Pauli::Y
                        } else {
                            Pauli::Z
                        };
                        apply(&mut x, &mut z, w, q, s, p);
                    });
                }
                Op::Pauli2 { a, b, p } => {
                    for_each_hit(rng, p, shots, |rng, s| {
                        let k = rng.random_range(1..16u8);
                        apply(&mut x, &mut z, w, a, s, PAULIS[(k >> 2) as usize]);
                        apply(&mut x, &mut z, w, b, s, PAULIS[(k & 3) as usize]);
                    });
                }
                Op::PrepFlip { q, p, flip } => {
                    for_each_hit(rng, p, shots, |_, s| apply(&mut x, &mut z, w, q, s, flip));
                }
                Op::MeasFlip { p, .. } => {
                    let target = self.meas_flip_targets[flip_k];
                    flip_k += 1;
                    for_each_hit(rng, p, shots, |_, s| rec[target * w + s / 64] ^= 1u64 << (s % 64));
                }
            }
        }

        let nd = c.detectors.len();
        let no = c.observables.len();
        let mut detectors = BitMatrix::zeros(shots, nd);
        let mut observables = BitMatrix::zeros(shots, no);
        let mut acc = vec![0u64; w];
        let mut scatter = |ms: &[usize], out: &mut BitMatrix, col: usize| {
            acc.fill(0);
            for &mi in ms {
                for k in 0..w {
                    acc[k] ^= rec[mi * w + k];
                }
            }
            for (k, &word) in acc.iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let s = k * 64 + word.trailing_zeros() as usize;
                    if s < shots {
                        out.set(s, col, true);
                    }
                    word &= word - 1;
                }
            }
        };
        for (j, d) in c.detectors.iter().enumerate() {
            scatter(&d.measurements, &mut detectors, j);
        }
        for (j, o) in c.observables.iter().enumerate() {
            scatter(o, &mut observables, j);
        }
        let flags = self.record_flags.then(|| {
            let mut f = BitMatrix::zeros(shots, self.flag_measurements.len());
            for (j, &mi) in self.flag_measurements.iter().enumerate() {
                scatter(&[mi], &mut f, j);
            }
            f
        });
        SampleBatch { shots, detectors, observables, flags }
    }
}

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// Call `f` for every shot in `0..shots` that an event of probability `p`
/// hits, drawing the gaps between hits geometrically.
fn for_each_hit(rng: &mut ChaCha8Rng, p: f64, shots: usize, mut f: impl FnMut(&mut ChaCha8Rng, usize)) {
    if p <= 0.0 || shots == 0 {
        return;
    }
    if p >= 1.0 {
        for s in 0..shots {
            f(rng, s);
        }
        return;
    }
    let log_q = (-p).ln_1p();
    let mut s = 0usize;
    loop {
        let u: f64 = rng.random();
        let gap = ((-u).ln_1p() / log_q).floor();
        if gap >= (shots - s) as f64 {
            return;
        }
        s += gap as usize;
        f(rng, s);
        s += 1;
        if s >= shots {
            return;
        }
    }
}

/// Sample `shots` shots of `circuit`, parallel over blocks.
pub fn sample(circuit: &Circuit, shots: usize, seed: u64) -> Result<SampleBatch> {
    let sampler = FrameSampler::new(circuit)?;
    let blocks: Vec<SampleBatch> = (0..FrameSampler::num_blocks(shots))
        .into_par_iter()
        .map(|b| sampler.sample_block(seed, b, shots))
        .collect();
    let mut out = SampleBatch::empty(circuit.detectors.len(), circuit.observables.len());
    for b in &blocks {
        out.extend(b);
    }
    Ok(out)
}

/// Sample block by block and reduce each block with `f` without keeping the
/// raw samples; results come back in block order.
pub fn sample_blocks<T, F>(circuit: &Circuit, shots: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &SampleBatch) -> T + Sync,
{
    let sampler = FrameSampler::new(circuit)?;
    Ok((0..FrameSampler::num_blocks(shots))
        .into_par_iter()
        .map(|b| f(b, &sampler.sample_block(seed, b, shots)))
        .collect())
}
