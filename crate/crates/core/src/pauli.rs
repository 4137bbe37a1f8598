use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Single-qubit Pauli operator, ignoring global phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// Symplectic bits `(x, z)`.
    pub fn xz(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_xz(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Product up to phase.
    pub fn mul(self, other: Pauli) -> Pauli {
        let (a, b) = self.xz();
        let (c, d) = other.xz();
        Pauli::from_xz(a ^ c, b ^ d)
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        let (a, b) = self.xz();
        let (c, d) = other.xz();
        (a & d) ^ (b & c)
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Pauli> {
        match c.to_ascii_uppercase() {
            'I' | '_' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidArgument(format!("not a Pauli letter: {other:?}"))),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Sparse multi-qubit Pauli operator: sorted `(qubit, letter)` terms with no identities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    terms: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn new(terms: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        let mut s = PauliString::default();
        for (q, p) in terms {
            s.mul_assign_term(q, p);
        }
        s
    }

    pub fn single(qubit: usize, letter: Pauli) -> Self {
        Self::new([(qubit, letter)])
    }

    pub fn terms(&self) -> &[(usize, Pauli)] {
        &self.terms
    }

    pub fn weight(&self) -> usize {
        self.terms.len()
    }

    pub fn is_identity(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        match self.terms.binary_search_by_key(&qubit, |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => Pauli::I,
        }
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().map(|t| t.0)
    }

    fn mul_assign_term(&mut self, qubit: usize, letter: Pauli) {
        match self.terms.binary_search_by_key(&qubit, |t| t.0) {
            Ok(i) => {
                let p = self.terms[i].1.mul(letter);
                if p == Pauli::I {
                    self.terms.remove(i);
                } else {
                    self.terms[i].1 = p;
                }
            }
            Err(i) => {
                if letter != Pauli::I {
                    self.terms.insert(i, (qubit, letter));
                }
            }
        }
    }

    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut out = self.clone();
        for &(q, p) in &other.terms {
            out.mul_assign_term(q, p);
        }
        out
    }

    /// Symplectic inner product: true iff the two operators anticommute.
    pub fn anticommutes(&self, other: &PauliString) -> bool {
        let (mut i, mut j) = (0, 0);
        let mut parity = false;
        while i < self.terms.len() && j < other.terms.len() {
            let (qa, pa) = self.terms[i];
            let (qb, pb) = other.terms[j];
            match qa.cmp(&qb) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    parity ^= pa.anticommutes(pb);
                    i += 1;
                    j += 1;
                }
            }
        }
        parity
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        !self.anticommutes(other)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "I");
        }
        for (k, (q, p)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p}{q}")?;
        }
        Ok(())
    }
}
