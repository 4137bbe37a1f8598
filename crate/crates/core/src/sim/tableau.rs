//! Aaronson-Gottesman stabilizer tableau with bit-packed rows.
//!
//! Used to check that detectors are deterministic and observables are fixed
//! in noiseless circuits, independently of the frame sampler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Op};

#[derive(Clone, Debug)]
pub struct Tableau {
    n: usize,
    words: usize,
    /// Rows `0..n` are destabilizers, `n..2n` stabilizers, `2n` is scratch.
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
}

impl Tableau {
    /// The all-zero state on `n` qubits.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut t = Tableau { n, words, x: vec![0; rows * words], z: vec![0; rows * words], r: vec![false; rows] };
        for i in 0..n {
            t.x[i * words + i / 64] |= 1 << (i % 64);
            t.z[(n + i) * words + i / 64] |= 1 << (i % 64);
        }
        t
    }

    #[inline]
    fn bit(v: &[u64], words: usize, row: usize, q: usize) -> bool {
        v[row * words + q / 64] >> (q % 64) & 1 == 1
    }

    fn for_rows(&mut self, q: usize, mut f: impl FnMut(&mut bool, &mut bool, &mut bool)) {
        let (wi, mask) = (q / 64, 1u64 << (q % 64));
        for row in 0..2 * self.n {
            let i = row * self.words + wi;
            let mut xb = self.x[i] & mask != 0;
            let mut zb = self.z[i] & mask != 0;
            f(&mut xb, &mut zb, &mut self.r[row]);
            self.x[i] = if xb { self.x[i] | mask } else { self.x[i] & !mask };
            self.z[i] = if zb { self.z[i] | mask } else { self.z[i] & !mask };
        }
    }

    pub fn h(&mut self, q: usize) {
        self.for_rows(q, |x, z, r| {
            *r ^= *x && *z;
            std::mem::swap(x, z);
        });
    }

    pub fn s(&mut self, q: usize) {
        self.for_rows(q, |x, z, r| {
            *r ^= *x && *z;
            *z ^= *x;
        });
    }

    pub fn s_dag(&mut self, q: usize) {
        self.for_rows(q, |x, z, r| {
            *r ^= *x && !*z;
            *z ^= *x;
        });
    }

    pub fn pauli_x(&mut self, q: usize) {
        self.for_rows(q, |_, z, r| *r ^= *z);
    }

    pub fn pauli_z(&mut self, q: usize) {
        self.for_rows(q, |x, _, r| *r ^= *x);
    }

    pub fn cx(&mut self, a: usize, b: usize) {
        let w = self.words;
        let (ai, am) = (a / 64, 1u64 << (a % 64));
        let (bi, bm) = (b / 64, 1u64 << (b % 64));
        for row in 0..2 * self.n {
            let base = row * w;
            let xa = self.x[base + ai] & am != 0;
            let za = self.z[base + ai] & am != 0;
            let xb = self.x[base + bi] & bm != 0;
            let zb = self.z[base + bi] & bm != 0;
            self.r[row] ^= xa && zb && (xb == za);
            if xa {
                self.x[base + bi] ^= bm;
            }
            if zb {
                self.z[base + ai] ^= am;
            }
        }
    }

    pub fn cy(&mut self, a: usize, b: usize) {
        self.s_dag(b);
        self.cx(a, b);
        self.s(b);
    }

    /// Phase exponent contribution when multiplying row `i` into row `h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.words;
        let (mut plus, mut minus) = (0u32, 0u32);
        for k in 0..w {
            let (x1, z1) = (self.x[i * w + k], self.z[i * w + k]);
            let (x2, z2) = (self.x[h * w + k], self.z[h * w + k]);
            let p = (x1 & z1 & !x2 & z2) | (x1 & !z1 & x2 & z2) | (!x1 & z1 & x2 & !z2);
            let m = (x1 & z1 & x2 & !z2) | (x1 & !z1 & !x2 & z2) | (!x1 & z1 & x2 & z2);
            plus += p.count_ones();
            minus += m.count_ones();
            self.x[h * w + k] = x2 ^ x1;
            self.z[h * w + k] = z2 ^ z1;
        }
        let total = 2 * (self.r[h] as i64) + 2 * (self.r[i] as i64) + plus as i64 - minus as i64;
        self.r[h] = total.rem_euclid(4) == 2;
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        self.x.copy_within(src * w..(src + 1) * w, dst * w);
        self.z.copy_within(src * w..(src + 1) * w, dst * w);
        self.r[dst] = self.r[src];
    }

    fn clear_row(&mut self, row: usize) {
        let w = self.words;
        self.x[row * w..(row + 1) * w].fill(0);
        self.z[row * w..(row + 1) * w].fill(0);
        self.r[row] = false;
    }

    /// Measure `q` in the Z basis. Returns `(outcome, was_random)`.
    pub fn measure_z(&mut self, q: usize, rng: &mut impl Rng) -> (bool, bool) {
        let n = self.n;
        let w = self.words;
        if let Some(p) = (n..2 * n).find(|&row| Self::bit(&self.x, w, row, q)) {
            for row in 0..2 * n {
                if row != p && Self::bit(&self.x, w, row, q) {
                    self.rowsum(row, p);
                }
            }
            self.copy_row(p - n, p);
            self.clear_row(p);
            self.z[p * w + q / 64] |= 1 << (q % 64);
            let outcome = rng.random::<bool>();
            self.r[p] = outcome;
            (outcome, true)
        } else {
            let scratch = 2 * n;
            self.clear_row(scratch);
            for i in 0..n {
                if Self::bit(&self.x, w, i, q) {
                    self.rowsum(scratch, i + n);
                }
            }
            (self.r[scratch], false)
        }
    }

    pub fn reset(&mut self, q: usize, rng: &mut impl Rng) {
        if self.measure_z(q, rng).0 {
            self.pauli_x(q);
        }
    }
}

/// Run a circuit on the tableau, ignoring noise instructions, and return
/// the measurement record. Random outcomes are drawn from `seed`.
pub fn run_tableau(circuit: &Circuit, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tableau::new(circuit.num_qubits);
    let mut out = Vec::new();
    for op in &circuit.ops {
        match *op {
            Op::PrepZ(q) => t.reset(q, &mut rng),
            Op::PrepX(q) => {
                t.reset(q, &mut rng);
                t.h(q);
            }
            Op::PrepY(q) => {
                t.reset(q, &mut rng);
                t.h(q);
                t.s(q);
            }
            Op::H(q) => t.h(q),
            Op::CX(a, b) => t.cx(a, b),
            Op::CY(a, b) => t.cy(a, b),
            Op::MeasZ(q) => out.push(t.measure_z(q, &mut rng).0),
            Op::MeasX(q) => {
                t.h(q);
                out.push(t.measure_z(q, &mut rng).0);
                t.h(q);
            }
            Op::MeasY(q) => {
                t.s_dag(q);
                t.h(q);
                out.push(t.measure_z(q, &mut rng).0);
                t.h(q);
                t.s(q);
            }
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_pair_correlated() {
        for seed in 0..20 {
            let mut c = Circuit::new(2);
            c.ops = vec![Op::PrepX(0), Op::PrepZ(1), Op::CX(0, 1), Op::MeasZ(0), Op::MeasZ(1)];
            let r = run_tableau(&c, seed);
            assert_eq!(r[0], r[1]);
        }
    }

    #[test]
    fn y_eigenstates() {
        let mut c = Circuit::new(1);
        c.ops = vec![Op::PrepY(0), Op::MeasY(0), Op::MeasY(0)];
        for seed in 0..10 {
            assert_eq!(run_tableau(&c, seed), vec![false, false]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut t = Tableau::new(1);
        t.h(0);
        t.s(0);
        t.pauli_x(0);
        t.s_dag(0);
        t.h(0);
        assert_eq!(t.measure_z(0, &mut rng), (true, false));
    }

    #[test]
    fn cy_phase_kickback() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for minus in [false, true] {
            let mut t = Tableau::new(2);
            t.h(0);
            t.h(1);
            t.s(1);
            if minus {
                t.pauli_z(1);
            }
            t.cy(0, 1);
            t.h(0);
            assert_eq!(t.measure_z(0, &mut rng), (minus, false));
        }
    }
}
