//! Circuit simulators: a bit-packed Pauli-frame sampler for production
//! runs, plus a stabilizer tableau and a dense state vector used as oracles.

pub mod dense;
pub mod frame;
pub mod tableau;

pub use dense::{dense_oracle, verify_patch, StateVector, DENSE_QUBIT_LIMIT};
pub use frame::{sample, sample_blocks, FrameSampler, BLOCK_SHOTS};
pub use tableau::{run_tableau, Tableau};

use crate::circuit::Circuit;

/// Dense row-major bit matrix, rows packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BitMatrix { rows, cols, stride, words: vec![0; rows * stride] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.words[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.words[r * self.stride + c / 64];
        let bit = 1u64 << (c % 64);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        self.words[r * self.stride + c / 64] ^= 1u64 << (c % 64);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    /// Column indices of the set bits in row `r`, ascending.
    pub fn row_ones(&self, r: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &w) in self.row_words(r).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(k * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    pub fn row_is_zero(&self, r: usize) -> bool {
        self.row_words(r).iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of set bits in each column.
    pub fn column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.cols];
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                counts[c] += 1;
            }
        }
        counts
    }

    /// Append the rows of `other` (same column count).
    pub fn extend(&mut self, other: &BitMatrix) {
        assert_eq!(self.cols, other.cols, "column mismatch");
        self.words.extend_from_slice(&other.words);
        self.rows += other.rows;
    }
}

/// Detector and observable flips for a batch of shots, relative to the
/// noiseless reference execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleBatch {
    pub shots: usize,
    pub detectors: BitMatrix,
    pub observables: BitMatrix,
    /// Raw flag-qubit measurement flips, when requested.
    pub flags: Option<BitMatrix>,
}

impl SampleBatch {
    pub fn empty(num_detectors: usize, num_observables: usize) -> Self {
        SampleBatch {
            shots: 0,
            detectors: BitMatrix::zeros(0, num_detectors),
            observables: BitMatrix::zeros(0, num_observables),
            flags: None,
        }
    }

    pub fn extend(&mut self, other: &SampleBatch) {
        self.shots += other.shots;
        self.detectors.extend(&other.detectors);
        self.observables.extend(&other.observables);
        match (&mut self.flags, &other.flags) {
            (Some(a), Some(b)) => a.extend(b),
            (None, Some(b)) if self.shots == other.shots => self.flags = Some(b.clone()),
            _ => {}
        }
    }

    /// `shots detectors observables` header followed by one `01` row per shot
    /// (detector bits, a space, observable bits).
    pub fn to_text(&self) -> String {
        let (nd, no) = (self.detectors.cols(), self.observables.cols());
        let mut s = String::with_capacity(self.shots * (nd + no + 2) + 32);
        s.push_str(&format!("{} {} {}\n", self.shots, nd, no));
        for r in 0..self.shots {
            for c in 0..nd {
                s.push(if self.detectors.get(r, c) { '1' } else { '0' });
            }
            s.push(' ');
            for c in 0..no {
                s.push(if self.observables.get(r, c) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> crate::Result<SampleBatch> {
        let perr = |line: usize, msg: &str| crate::Error::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| perr(1, "missing header"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| perr(1, "header must be `shots detectors observables`")))
            .collect::<crate::Result<_>>()?;
        if dims.len() != 3 {
            return Err(perr(1, "header must be `shots detectors observables`"));
        }
        let (shots, nd, no) = (dims[0], dims[1], dims[2]);
        let mut batch = SampleBatch {
            shots,
            detectors: BitMatrix::zeros(shots, nd),
            observables: BitMatrix::zeros(shots, no),
            flags: None,
        };
        let mut r = 0;
        for (i, line) in lines {
            if r == shots {
                return Err(perr(i + 1, "more rows than the header declares"));
            }
            let bits: Vec<char> = line.chars().filter(|c| !c.is_whitespace()).collect();
            if bits.len() != nd + no {
                return Err(perr(i + 1, "row width does not match the header"));
            }
            for (c, &b) in bits.iter().enumerate() {
                let v = match b {
                    '0' => false,
                    '1' => true,
                    _ => return Err(perr(i + 1, "rows may contain only 0 and 1")),
                };
                if c < nd {
                    batch.detectors.set(r, c, v);
                } else {
                    batch.observables.set(r, c - nd, v);
                }
            }
            r += 1;
        }
        if r != shots {
            return Err(crate::Error::ShotMismatch { expected: shots, got: r });
        }
        Ok(batch)
    }
}

/// XOR of the listed measurement outcomes.
pub(crate) fn parity(outcomes: &[bool], ms: &[usize]) -> bool {
    ms.iter().fold(false, |acc, &m| acc ^ outcomes[m])
}

/// Detector and observable values from a full measurement record.
pub fn evaluate_record(circuit: &Circuit, outcomes: &[bool]) -> (Vec<bool>, Vec<bool>) {
    (
        circuit.detectors.iter().map(|d| parity(outcomes, &d.measurements)).collect(),
        circuit.observables.iter().map(|o| parity(outcomes, o)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitmatrix_basics() {
        let mut m = BitMatrix::zeros(3, 70);
        m.set(1, 69, true);
        m.toggle(1, 3);
        assert!(m.get(1, 69) && m.get(1, 3) && !m.get(0, 3));
        assert_eq!(m.row_ones(1), vec![3, 69]);
        assert_eq!(m.count_ones(), 2);
        assert!(m.row_is_zero(2));
        let c = m.column_counts();
        assert_eq!((c[3], c[69], c[0]), (1, 1, 0));
    }

    #[test]
    fn text_round_trip() {
        let mut b = SampleBatch::empty(3, 1);
        b.shots = 2;
        b.detectors = BitMatrix::zeros(2, 3);
        b.observables = BitMatrix::zeros(2, 1);
        b.detectors.set(0, 2, true);
        b.observables.set(1, 0, true);
        let t = b.to_text();
        assert_eq!(t, "2 3 1\n001 0\n000 1\n");
        assert_eq!(SampleBatch::from_text(&t).unwrap(), b);
        assert!(SampleBatch::from_text("3 3 1\n001 0\n").is_err());
    }
}
