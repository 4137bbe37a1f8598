//! Qubit layouts for the surface, tailored-surface and XZZX codes.
//!
//! All three families share one planar (unrotated) geometry on a
//! `(2d-1) x (2d-1)` grid: data qubits sit where `row + col` is even and
//! stabilizers where it is odd. Stabilizers on odd rows form group `S1`,
//! those on even rows form `S2`.
//!
//! On the heavy-hexagon structure every stabilizer reaches its data qubits
//! through flag qubits. The two anti-diagonal sides of each plaquette are
//! three-flag paths (`end - mid - end`) shared by the `S1` and `S2` patch
//! on either side of that edge; the syndrome qubit hangs off the end flag
//! nearest its west (resp. east) data qubit. Boundary plaquettes replace a
//! missing side with a short private chain: one flag for top/bottom patches,
//! two flags (through a bridge position) for left/right patches. This gives
//! `6 d (d-1)` flags and keeps every qubit at degree three or less.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Surface,
    Tailored,
    Xzzx,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Surface, Family::Tailored, Family::Xzzx];

    pub fn name(self) -> &'static str {
        match self {
            Family::Surface => "surface",
            Family::Tailored => "tailored",
            Family::Xzzx => "xzzx",
        }
    }

    /// Letter a stabilizer of `group` applies to its neighbour in direction `dir`.
    pub fn letter(self, group: StabGroup, dir: Direction) -> Pauli {
        match (self, group) {
            (Family::Surface, StabGroup::S1) => Pauli::Z,
            (Family::Tailored, StabGroup::S1) => Pauli::Y,
            (Family::Surface | Family::Tailored, StabGroup::S2) => Pauli::X,
            (Family::Xzzx, _) => match dir {
                Direction::North | Direction::South => Pauli::X,
                Direction::West | Direction::East => Pauli::Z,
            },
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "surface" => Ok(Family::Surface),
            "tailored" => Ok(Family::Tailored),
            "xzzx" => Ok(Family::Xzzx),
            other => Err(Error::InvalidArgument(format!("unknown code family {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Structure {
    #[serde(rename = "lattice")]
    Lattice,
    #[serde(rename = "heavy-hex")]
    HeavyHex,
}

impl Structure {
    pub fn name(self) -> &'static str {
        match self {
            Structure::Lattice => "lattice",
            Structure::HeavyHex => "heavy-hex",
        }
    }

    pub fn max_degree(self) -> usize {
        match self {
            Structure::Lattice => 4,
            Structure::HeavyHex => 3,
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Structure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lattice" => Ok(Structure::Lattice),
            "heavy-hex" | "heavyhex" | "heavy_hex" => Ok(Structure::HeavyHex),
            other => Err(Error::InvalidArgument(format!("unknown structure {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitRole {
    Data,
    Flag,
    Syndrome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StabGroup {
    S1,
    S2,
}

impl StabGroup {
    pub fn index(self) -> usize {
        match self {
            StabGroup::S1 => 0,
            StabGroup::S2 => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<StabGroup> {
        match i {
            0 => Some(StabGroup::S1),
            1 => Some(StabGroup::S2),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    North,
    West,
    East,
    South,
}

impl Direction {
    pub const ORDER: [Direction; 4] =
        [Direction::North, Direction::West, Direction::East, Direction::South];

    fn offset(self) -> (i64, i64) {
        match self {
            Direction::North => (-1, 0),
            Direction::West => (0, -1),
            Direction::East => (0, 1),
            Direction::South => (1, 0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qubit {
    pub id: usize,
    pub role: QubitRole,
    pub row: usize,
    pub col: usize,
}

/// A flag path hanging off a syndrome qubit. `flags[0]` couples to the
/// syndrome; each attachment couples `flags[index]` to a data qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub flags: Vec<usize>,
    pub attachments: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerSpec {
    pub group: StabGroup,
    /// One letter per entry of `data_ids`.
    pub letters: Vec<Pauli>,
    /// Data qubits in ascending id order.
    pub data_ids: Vec<usize>,
    pub syndrome_id: usize,
    /// Flags in branch order; empty on the lattice structure.
    pub flag_ids: Vec<usize>,
    pub branches: Vec<Branch>,
    /// Plaquette position on the planar grid.
    pub position: (usize, usize),
}

impl StabilizerSpec {
    pub fn weight(&self) -> usize {
        self.data_ids.len()
    }

    pub fn pauli(&self) -> PauliString {
        PauliString::new(self.data_ids.iter().copied().zip(self.letters.iter().copied()))
    }

    pub fn letter_on(&self, data: usize) -> Option<Pauli> {
        self.data_ids.iter().position(|&q| q == data).map(|i| self.letters[i])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeLayout {
    pub family: Family,
    pub structure: Structure,
    pub distance: usize,
    pub qubits: Vec<Qubit>,
    /// `S1` stabilizers first, then `S2`, each in row-major plaquette order.
    pub stabilizers: Vec<StabilizerSpec>,
    /// `[L1, L2]`: the column-0 chain and the row-0 chain.
    pub logical_ops: [PauliString; 2],
    /// Coupling graph, `(a, b)` with `a < b`.
    pub edges: Vec<(usize, usize)>,
}

fn check_distance(distance: usize) -> Result<()> {
    if distance < 3 || distance % 2 == 0 {
        return Err(Error::InvalidDistance(distance));
    }
    Ok(())
}

struct Plaquette {
    pos: (usize, usize),
    group: StabGroup,
    neighbors: Vec<(Direction, (usize, usize))>,
}

fn plaquettes(distance: usize) -> Vec<Plaquette> {
    let n = 2 * distance - 1;
    let mut out = Vec::new();
    for group in [StabGroup::S1, StabGroup::S2] {
        for r in 0..n {
            for c in 0..n {
                if (r + c) % 2 == 0 {
                    continue;
                }
                let g = if r % 2 == 1 { StabGroup::S1 } else { StabGroup::S2 };
                if g != group {
                    continue;
                }
                let neighbors = Direction::ORDER
                    .iter()
                    .filter_map(|&dir| {
                        let (dr, dc) = dir.offset();
                        let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                        (nr >= 0 && nc >= 0 && (nr as usize) < n && (nc as usize) < n)
                            .then_some((dir, (nr as usize, nc as usize)))
                    })
                    .collect();
                out.push(Plaquette { pos: (r, c), group, neighbors });
            }
        }
    }
    out
}

type Coord = (usize, usize);

/// Fine-grid coordinates of heavy-hex qubits, before id assignment.
struct HexBranch {
    flags: Vec<Coord>,
    attachments: Vec<(usize, Coord)>,
}

fn hex_data(p: Coord) -> Coord {
    (2 * p.0, 2 * p.1 + 1)
}

fn hex_branches(pl: &Plaquette, distance: usize) -> Vec<HexBranch> {
    let (r, c) = pl.pos;
    let has = |d: Direction| pl.neighbors.iter().find(|n| n.0 == d).map(|n| n.1);
    let (north, west, east, south) =
        (has(Direction::North), has(Direction::West), has(Direction::East), has(Direction::South));
    let mut branches = Vec::new();
    // Top-left side N-W: path from the end next to W up to the end next to N.
    if let (Some(n), Some(w)) = (north, west) {
        branches.push(HexBranch {
            flags: vec![(2 * r, 2 * c), (2 * r - 1, 2 * c), (2 * r - 2, 2 * c)],
            attachments: vec![(0, hex_data(w)), (2, hex_data(n))],
        });
    } else if north.is_none() {
        // top boundary: private flag towards W
        let w = west.expect("top plaquette has a west neighbour");
        branches.push(HexBranch { flags: vec![(0, 2 * c)], attachments: vec![(0, hex_data(w))] });
    } else {
        // left boundary: two-flag chain up to N
        let n = north.unwrap();
        branches.push(HexBranch {
            flags: vec![(2 * r, 0), (2 * r - 1, 0)],
            attachments: vec![(1, hex_data(n))],
        });
    }
    if let (Some(e), Some(s)) = (east, south) {
        branches.push(HexBranch {
            flags: vec![(2 * r, 2 * c + 2), (2 * r + 1, 2 * c + 2), (2 * r + 2, 2 * c + 2)],
            attachments: vec![(0, hex_data(e)), (2, hex_data(s))],
        });
    } else if south.is_none() {
        let e = east.expect("bottom plaquette has an east neighbour");
        branches.push(HexBranch {
            flags: vec![(4 * distance - 4, 2 * c + 2)],
            attachments: vec![(0, hex_data(e))],
        });
    } else {
        let s = south.unwrap();
        branches.push(HexBranch {
            flags: vec![(2 * r, 4 * distance - 2), (2 * r + 1, 4 * distance - 2)],
            attachments: vec![(1, hex_data(s))],
        });
    }
    branches
}

/// Build the layout for `(family, structure, distance)`.
pub fn build_layout(family: Family, structure: Structure, distance: usize) -> Result<CodeLayout> {
    check_distance(distance)?;
    let n = 2 * distance - 1;
    let plaqs = plaquettes(distance);

    let place = |p: Coord| match structure {
        Structure::Lattice => p,
        Structure::HeavyHex => hex_data(p),
    };

    let mut roles: BTreeMap<Coord, QubitRole> = BTreeMap::new();
    for r in 0..n {
        for c in 0..n {
            let role = if (r + c) % 2 == 0 { QubitRole::Data } else { QubitRole::Syndrome };
            roles.insert(place((r, c)), role);
        }
    }
    let hex: Vec<Vec<HexBranch>> = match structure {
        Structure::Lattice => plaqs.iter().map(|_| Vec::new()).collect(),
        Structure::HeavyHex => plaqs.iter().map(|pl| hex_branches(pl, distance)).collect(),
    };
    for branches in &hex {
        for b in branches {
            for &f in &b.flags {
                let prev = roles.insert(f, QubitRole::Flag);
                debug_assert!(matches!(prev, None | Some(QubitRole::Flag)), "flag clobbers {f:?}");
            }
        }
    }

    // ids are row-major by coordinate
    let ids: BTreeMap<Coord, usize> = roles.keys().enumerate().map(|(i, &c)| (c, i)).collect();
    let qubits: Vec<Qubit> = roles
        .iter()
        .enumerate()
        .map(|(id, (&(row, col), &role))| Qubit { id, role, row, col })
        .collect();

    let mut edges = BTreeSet::new();
    let mut link = |a: usize, b: usize| {
        edges.insert((a.min(b), a.max(b)));
    };
    let mut stabilizers = Vec::with_capacity(plaqs.len());
    for (pl, branches) in plaqs.iter().zip(&hex) {
        let syndrome_id = ids[&place(pl.pos)];
        let mut data: Vec<(usize, Pauli)> = pl
            .neighbors
            .iter()
            .map(|&(dir, p)| (ids[&place(p)], family.letter(pl.group, dir)))
            .collect();
        data.sort_by_key(|t| t.0);
        let mut out_branches = Vec::new();
        let mut flag_ids = Vec::new();
        for b in branches {
            let flags: Vec<usize> = b.flags.iter().map(|f| ids[f]).collect();
            let attachments: Vec<(usize, usize)> =
                b.attachments.iter().map(|&(k, d)| (k, ids[&d])).collect();
            link(syndrome_id, flags[0]);
            for w in flags.windows(2) {
                link(w[0], w[1]);
            }
            for &(k, d) in &attachments {
                link(flags[k], d);
            }
            flag_ids.extend_from_slice(&flags);
            out_branches.push(Branch { flags, attachments });
        }
        if structure == Structure::Lattice {
            for &(d, _) in &data {
                link(syndrome_id, d);
            }
        }
        out_branches.sort_by_key(|b| b.attachments.iter().map(|a| a.1).min());
        let flag_ids = if out_branches.is_empty() {
            flag_ids
        } else {
            out_branches.iter().flat_map(|b| b.flags.iter().copied()).collect()
        };
        stabilizers.push(StabilizerSpec {
            group: pl.group,
            letters: data.iter().map(|t| t.1).collect(),
            data_ids: data.iter().map(|t| t.0).collect(),
            syndrome_id,
            flag_ids,
            branches: out_branches,
            position: pl.pos,
        });
    }

    let column: Vec<usize> = (0..n).step_by(2).map(|r| ids[&place((r, 0))]).collect();
    let row: Vec<usize> = (0..n).step_by(2).map(|c| ids[&place((0, c))]).collect();
    let logical_ops = [chain_operator(&stabilizers, &column)?, chain_operator(&stabilizers, &row)?];

    Ok(CodeLayout {
        family,
        structure,
        distance,
        qubits,
        stabilizers,
        logical_ops,
        edges: edges.into_iter().collect(),
    })
}

/// Letters for a boundary chain: on each chain qubit, copy the letter of a
/// stabilizer that meets the chain only there.
fn chain_operator(stabs: &[StabilizerSpec], chain: &[usize]) -> Result<PauliString> {
    let mut terms = Vec::with_capacity(chain.len());
    for &q in chain {
        let letter = stabs
            .iter()
            .filter(|s| s.data_ids.iter().filter(|d| chain.contains(d)).count() == 1)
            .find_map(|s| s.letter_on(q))
            .ok_or_else(|| Error::Unsupported(format!("no boundary stabilizer fixes qubit {q}")))?;
        terms.push((q, letter));
    }
    Ok(PauliString::new(terms))
}

impl CodeLayout {
    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn ids_with_role(&self, role: QubitRole) -> Vec<usize> {
        self.qubits.iter().filter(|q| q.role == role).map(|q| q.id).collect()
    }

    pub fn data_ids(&self) -> Vec<usize> {
        self.ids_with_role(QubitRole::Data)
    }

    pub fn role_counts(&self) -> (usize, usize, usize) {
        let count = |r| self.qubits.iter().filter(|q| q.role == r).count();
        (count(QubitRole::Data), count(QubitRole::Flag), count(QubitRole::Syndrome))
    }

    pub fn group(&self, group: StabGroup) -> impl Iterator<Item = (usize, &StabilizerSpec)> {
        self.stabilizers.iter().enumerate().filter(move |(_, s)| s.group == group)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.qubits.len()];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Per-data-qubit measurement basis for a memory experiment of logical
    /// `which` (0 = L1, 1 = L2), and the stabilizer group made
    /// deterministic by that product state.
    ///
    /// The group is the one whose letters agree with the logical on its
    /// support and assign a single letter to every data qubit.
    pub fn memory_basis(&self, which: usize) -> Result<(StabGroup, BTreeMap<usize, Pauli>)> {
        let logical = self
            .logical_ops
            .get(which)
            .ok_or_else(|| Error::InvalidArgument(format!("no logical operator L{}", which + 1)))?;
        'groups: for group in [StabGroup::S1, StabGroup::S2] {
            let mut basis = BTreeMap::new();
            for (_, s) in self.group(group) {
                for (&q, &p) in s.data_ids.iter().zip(&s.letters) {
                    if *basis.entry(q).or_insert(p) != p {
                        continue 'groups;
                    }
                }
            }
            if basis.len() != self.data_ids().len() {
                continue;
            }
            if logical.terms().iter().all(|&(q, p)| basis.get(&q) == Some(&p)) {
                return Ok((group, basis));
            }
        }
        Err(Error::Unsupported(format!(
            "logical L{} is not a product of single-letter data measurements",
            which + 1
        )))
    }

    pub fn to_document(&self, ithaca: bool) -> Result<LayoutDocument> {
        let map: Vec<usize> =
            if ithaca { ithaca_index_map(self)? } else { (0..self.qubits.len()).collect() };
        let m = |q: usize| map[q];
        let mut qubits: Vec<QubitEntry> = self
            .qubits
            .iter()
            .map(|q| QubitEntry { id: m(q.id), role: q.role, row: q.row, col: q.col })
            .collect();
        qubits.sort_by_key(|q| q.id);
        Ok(LayoutDocument {
            family: self.family,
            structure: self.structure,
            d: self.distance,
            qubits,
            stabilizers: self
                .stabilizers
                .iter()
                .map(|s| StabilizerEntry {
                    group: s.group,
                    letters: s.letters.iter().map(|p| p.as_char()).collect(),
                    data: s.data_ids.iter().map(|&q| m(q)).collect(),
                    flags: s.flag_ids.iter().map(|&q| m(q)).collect(),
                    syndrome: m(s.syndrome_id),
                })
                .collect(),
            logicals: self
                .logical_ops
                .iter()
                .map(|l| l.terms().iter().map(|&(q, p)| format!("{p}{}", m(q))).collect::<Vec<_>>().join(" "))
                .collect(),
        })
    }
}

/// JSON shape emitted by `hexqec layout`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LayoutDocument {
    pub family: Family,
    pub structure: Structure,
    pub d: usize,
    pub qubits: Vec<QubitEntry>,
    pub stabilizers: Vec<StabilizerEntry>,
    pub logicals: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QubitEntry {
    pub id: usize,
    pub role: QubitRole,
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilizerEntry {
    pub group: StabGroup,
    pub letters: String,
    pub data: Vec<usize>,
    pub flags: Vec<usize>,
    pub syndrome: usize,
}

/// `(S1, S2)` stabilizers.
pub fn stabilizer_groups(layout: &CodeLayout) -> (Vec<StabilizerSpec>, Vec<StabilizerSpec>) {
    layout.stabilizers.iter().cloned().partition(|s| s.group == StabGroup::S1)
}

pub fn logical_operators(layout: &CodeLayout) -> (PauliString, PauliString) {
    (layout.logical_ops[0].clone(), layout.logical_ops[1].clone())
}

/// Map internal ids of the d=3 heavy-hex layout onto the indices of the
/// 65-qubit Ithaca device. Four device qubits (0, 27, 37, 64) stay unused.
pub fn ithaca_index_map(layout: &CodeLayout) -> Result<Vec<usize>> {
    if layout.distance != 3 || layout.structure != Structure::HeavyHex {
        return Err(Error::Unsupported(format!(
            "Ithaca index map exists only for d=3 heavy-hex, got d={} {}",
            layout.distance, layout.structure
        )));
    }
    const ROW_BASE: [usize; 5] = [0, 13, 27, 41, 55];
    const BRIDGES: [[(usize, usize); 3]; 4] =
        [[(0, 10), (4, 11), (8, 12)], [(2, 24), (6, 25), (10, 26)], [(0, 38), (4, 39), (8, 40)], [
            (2, 52),
            (6, 53),
            (10, 54),
        ]];
    layout
        .qubits
        .iter()
        .map(|q| {
            if q.row % 2 == 0 {
                let k = q.row / 2;
                // the last device row starts one column in
                let offset = if k == 4 { q.col.checked_sub(1) } else { Some(q.col) };
                offset.map(|o| ROW_BASE[k] + o)
            } else {
                BRIDGES[q.row / 2].iter().find(|b| b.0 == q.col).map(|b| b.1)
            }
            .ok_or_else(|| Error::Unsupported(format!("qubit {} at {:?} has no device site", q.id, (q.row, q.col))))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    IdsNotDense,
    DuplicateCoord(usize, usize),
    DataCount { expected: usize, got: usize },
    StabilizerCount { expected: usize, got: usize },
    GroupImbalance { s1: usize, s2: usize },
    BadWeight { stabilizer: usize, weight: usize },
    LetterMismatch { stabilizer: usize },
    NonCommuting { a: usize, b: usize },
    LogicalAnticommutes { logical: usize, stabilizer: usize },
    LogicalsCommute,
    DegreeExceeded { qubit: usize, degree: usize, bound: usize },
    Disconnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IdsNotDense => write!(f, "qubit ids are not dense 0..N-1"),
            Violation::DuplicateCoord(a, b) => write!(f, "qubits {a} and {b} share a coordinate"),
            Violation::DataCount { expected, got } => {
                write!(f, "data-qubit count {got}, expected {expected}")
            }
            Violation::StabilizerCount { expected, got } => {
                write!(f, "stabilizer count {got}, expected {expected}")
            }
            Violation::GroupImbalance { s1, s2 } => write!(f, "group sizes differ: S1={s1} S2={s2}"),
            Violation::BadWeight { stabilizer, weight } => {
                write!(f, "stabilizer {stabilizer} has weight {weight}")
            }
            Violation::LetterMismatch { stabilizer } => {
                write!(f, "stabilizer {stabilizer} letters do not match the code family")
            }
            Violation::NonCommuting { a, b } => write!(f, "stabilizers {a} and {b} anticommute"),
            Violation::LogicalAnticommutes { logical, stabilizer } => {
                write!(f, "L{} anticommutes with stabilizer {stabilizer}", logical + 1)
            }
            Violation::LogicalsCommute => write!(f, "L1 and L2 commute"),
            Violation::DegreeExceeded { qubit, degree, bound } => {
                write!(f, "qubit {qubit} has degree {degree} > {bound}")
            }
            Violation::Disconnected => write!(f, "coupling graph is disconnected"),
        }
    }
}

/// Check every layout invariant; an empty report means the layout is valid.
pub fn validate_layout(layout: &CodeLayout) -> Vec<Violation> {
    let mut out = Vec::new();
    if layout.qubits.iter().enumerate().any(|(i, q)| q.id != i) {
        out.push(Violation::IdsNotDense);
    }
    let mut seen: BTreeMap<Coord, usize> = BTreeMap::new();
    for q in &layout.qubits {
        if let Some(&other) = seen.get(&(q.row, q.col)) {
            out.push(Violation::DuplicateCoord(other, q.id));
        }
        seen.insert((q.row, q.col), q.id);
    }
    let d = layout.distance;
    let expected_data = d * d + (d - 1) * (d - 1);
    let (data, _, _) = layout.role_counts();
    if data != expected_data {
        out.push(Violation::DataCount { expected: expected_data, got: data });
    }
    if layout.stabilizers.len() != expected_data - 1 {
        out.push(Violation::StabilizerCount { expected: expected_data - 1, got: layout.stabilizers.len() });
    }
    let s1 = layout.group(StabGroup::S1).count();
    let s2 = layout.group(StabGroup::S2).count();
    if s1 != s2 {
        out.push(Violation::GroupImbalance { s1, s2 });
    }

    let paulis: Vec<PauliString> = layout.stabilizers.iter().map(|s| s.pauli()).collect();
    for (i, s) in layout.stabilizers.iter().enumerate() {
        if !(3..=4).contains(&s.weight()) || s.letters.len() != s.data_ids.len() {
            out.push(Violation::BadWeight { stabilizer: i, weight: s.weight() });
        }
        if !letters_match_family(layout, s) {
            out.push(Violation::LetterMismatch { stabilizer: i });
        }
    }
    for a in 0..paulis.len() {
        for b in a + 1..paulis.len() {
            if paulis[a].anticommutes(&paulis[b]) {
                out.push(Violation::NonCommuting { a, b });
            }
        }
    }
    for (l, op) in layout.logical_ops.iter().enumerate() {
        for (i, s) in paulis.iter().enumerate() {
            if op.anticommutes(s) {
                out.push(Violation::LogicalAnticommutes { logical: l, stabilizer: i });
            }
        }
    }
    if !layout.logical_ops[0].anticommutes(&layout.logical_ops[1]) {
        out.push(Violation::LogicalsCommute);
    }

    let bound = layout.structure.max_degree();
    for (q, &deg) in layout.degrees().iter().enumerate() {
        if deg > bound {
            out.push(Violation::DegreeExceeded { qubit: q, degree: deg, bound });
        }
    }
    if !is_connected(layout) {
        out.push(Violation::Disconnected);
    }
    out
}

fn letters_match_family(layout: &CodeLayout, s: &StabilizerSpec) -> bool {
    let coord = |q: usize| {
        let qb = &layout.qubits[q];
        (qb.row as i64, qb.col as i64)
    };
    let (sr, sc) = coord(s.syndrome_id);
    s.data_ids.iter().zip(&s.letters).all(|(&q, &p)| {
        let (r, c) = coord(q);
        let dir = if r < sr {
            Direction::North
        } else if r > sr {
            Direction::South
        } else if c < sc {
            Direction::West
        } else {
            Direction::East
        };
        layout.family.letter(s.group, dir) == p
    })
}

fn is_connected(layout: &CodeLayout) -> bool {
    let n = layout.qubits.len();
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &layout.edges {
        if a < n && b < n {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_distances() {
        for d in [0, 1, 2, 4, 6] {
            assert!(matches!(
                build_layout(Family::Surface, Structure::Lattice, d),
                Err(Error::InvalidDistance(_))
            ));
        }
    }

    #[test]
    fn heavy_hex_d3_counts() {
        let l = build_layout(Family::Tailored, Structure::HeavyHex, 3).unwrap();
        assert_eq!(l.role_counts(), (13, 36, 12));
        let l = build_layout(Family::Surface, Structure::Lattice, 3).unwrap();
        assert_eq!(l.role_counts(), (13, 0, 12));
    }

    #[test]
    fn heavy_hex_flag_count_formula() {
        for d in [3, 5, 7, 9, 11] {
            let l = build_layout(Family::Surface, Structure::HeavyHex, d).unwrap();
            let data = d * d + (d - 1) * (d - 1);
            assert_eq!(l.role_counts(), (data, 6 * d * (d - 1), data - 1), "d={d}");
        }
    }

    #[test]
    fn generated_layouts_validate() {
        for family in Family::ALL {
            for structure in [Structure::Lattice, Structure::HeavyHex] {
                for d in [3, 5, 7, 9, 11] {
                    let l = build_layout(family, structure, d).unwrap();
                    let report = validate_layout(&l);
                    assert!(report.is_empty(), "{family} {structure} d={d}: {report:?}");
                }
            }
        }
    }

    #[test]
    fn weight_four_patches_use_six_flags() {
        let l = build_layout(Family::Xzzx, Structure::HeavyHex, 5).unwrap();
        for s in &l.stabilizers {
            let expected = match (s.weight(), s.position.0 % 2) {
                (4, _) => 6,
                (3, 0) => 4, // top/bottom boundary
                (3, _) => 5, // left/right boundary
                _ => unreachable!(),
            };
            assert_eq!(s.flag_ids.len(), expected, "{:?}", s.position);
        }
    }

    #[test]
    fn side_flags_shared_between_groups() {
        let l = build_layout(Family::Surface, Structure::HeavyHex, 3).unwrap();
        let mut owners: BTreeMap<usize, Vec<StabGroup>> = BTreeMap::new();
        for s in &l.stabilizers {
            for &f in &s.flag_ids {
                owners.entry(f).or_default().push(s.group);
            }
        }
        let shared = owners.values().filter(|g| g.len() == 2).count();
        assert_eq!(shared, 24);
        assert!(owners.values().all(|g| g.len() == 1 || g[0] != g[1]));
    }

    #[test]
    fn families_share_positions() {
        for structure in [Structure::Lattice, Structure::HeavyHex] {
            let a = build_layout(Family::Surface, structure, 5).unwrap();
            for family in [Family::Tailored, Family::Xzzx] {
                let b = build_layout(family, structure, 5).unwrap();
                assert_eq!(a.qubits, b.qubits);
                assert_eq!(a.edges, b.edges);
            }
        }
    }

    #[test]
    fn logical_letters_per_family() {
        let letters = |f| {
            let l = build_layout(f, Structure::Lattice, 3).unwrap();
            let ops = logical_operators(&l);
            (ops.0.terms()[0].1, ops.1.terms()[0].1, ops.0.weight(), ops.1.weight())
        };
        assert_eq!(letters(Family::Surface), (Pauli::X, Pauli::Z, 3, 3));
        assert_eq!(letters(Family::Tailored), (Pauli::X, Pauli::Y, 3, 3));
        assert_eq!(letters(Family::Xzzx), (Pauli::Z, Pauli::X, 3, 3));
    }

    #[test]
    fn flipped_letter_breaks_commutation() {
        let mut l = build_layout(Family::Tailored, Structure::HeavyHex, 3).unwrap();
        let (i, s) = l.group(StabGroup::S1).find(|(_, s)| s.weight() == 4).unwrap();
        assert_eq!(s.letters[0], Pauli::Y);
        l.stabilizers[i].letters[0] = Pauli::X;
        let report = validate_layout(&l);
        assert!(report.iter().any(|v| matches!(v, Violation::NonCommuting { .. })));
        assert!(report.contains(&Violation::LetterMismatch { stabilizer: i }));
    }

    #[test]
    fn injected_degree_four_node_flagged() {
        let mut l = build_layout(Family::Surface, Structure::HeavyHex, 3).unwrap();
        let deg = l.degrees();
        let hub = (0..deg.len()).find(|&q| deg[q] == 3).unwrap();
        let other = (0..deg.len()).find(|&q| q != hub && !l.edges.contains(&(q.min(hub), q.max(hub)))).unwrap();
        l.edges.push((hub.min(other), hub.max(other)));
        let report = validate_layout(&l);
        assert!(report.iter().any(|v| matches!(v, Violation::DegreeExceeded { qubit, .. } if *qubit == hub)));
    }

    #[test]
    fn memory_bases() {
        let l = build_layout(Family::Xzzx, Structure::HeavyHex, 3).unwrap();
        let (g1, b1) = l.memory_basis(0).unwrap();
        let (g2, b2) = l.memory_basis(1).unwrap();
        assert_ne!(g1, g2);
        assert_eq!(b1.len(), 13);
        assert!(b1.iter().all(|(q, p)| b2[q] != *p));
        let t = build_layout(Family::Tailored, Structure::Lattice, 3).unwrap();
        let (g, b) = t.memory_basis(1).unwrap();
        assert_eq!(g, StabGroup::S1);
        assert!(b.values().all(|&p| p == Pauli::Y));
        assert!(t.memory_basis(2).is_err());
    }
}
