//! Matching graphs and the per-group MWPM decoder.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use crate::circuit::Circuit;
use crate::dem::{extract_dem, merge_probability, split_dem, GroupDem};
use crate::error::{Error, Result};
use crate::layout::StabGroup;
use crate::matching::mwpm;

/// Probabilities below this are floored so that weights stay finite.
pub const MIN_PROBABILITY: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct MatchingEdge {
    pub u: usize,
    /// `v == boundary` for edges to the boundary.
    pub v: usize,
    pub probability: f64,
    pub weight: f64,
    pub observables: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchingGraph {
    pub group: Option<StabGroup>,
    pub num_detectors: usize,
    /// Global detector index of each node below `boundary`.
    pub detectors: Vec<usize>,
    pub edges: Vec<MatchingEdge>,
    /// Edges with `q >= 1/2`, clamped to weight 0.
    pub clamped: usize,
}

impl MatchingGraph {
    pub fn boundary(&self) -> usize {
        self.num_detectors
    }
}

/// `ln((1 - q) / q)` with `q` floored at [`MIN_PROBABILITY`].
pub fn edge_weight(q: f64) -> f64 {
    let q = q.max(MIN_PROBABILITY);
    if q >= 0.5 {
        return 0.0;
    }
    ((1.0 - q) / q).ln()
}

/// Build the matching graph of one group: two-detector mechanisms become
/// edges, one-detector mechanisms edges to the boundary. Parallel edges are
/// merged by probability and keep the observable mask of the likelier one.
pub fn build_matching_graph(dem: &GroupDem) -> Result<MatchingGraph> {
    let nd = dem.detectors.len();
    // (u, v) -> (merged q, best single q, its mask)
    let mut merged: BTreeMap<(usize, usize), (f64, f64, u64)> = BTreeMap::new();
    for m in &dem.mechanisms {
        let (u, v) = match m.detectors.as_slice() {
            [a] => (*a, nd),
            [a, b] => ((*a).min(*b), (*a).max(*b)),
            _ => {
                return Err(Error::MalformedGraph(format!(
                    "mechanism with {} detectors reached graph construction",
                    m.detectors.len()
                )))
            }
        };
        if u >= nd || (v > nd) || u == v {
            return Err(Error::MalformedGraph(format!("edge ({u}, {v}) outside {nd} detectors")));
        }
        let e = merged.entry((u, v)).or_insert((0.0, 0.0, m.observables));
        e.0 = merge_probability(e.0, m.probability);
        if m.probability > e.1 {
            e.1 = m.probability;
            e.2 = m.observables;
        }
    }
    let mut clamped = 0;
    let edges = merged
        .into_iter()
        .map(|((u, v), (q, _, obs))| {
            if q >= 0.5 {
                clamped += 1;
            }
            MatchingEdge { u, v, probability: q, weight: edge_weight(q), observables: obs }
        })
        .collect();
    Ok(MatchingGraph { group: dem.group, num_detectors: nd, detectors: dem.detectors.clone(), edges, clamped })
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (distance, node)
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All-pairs shortest paths over a matching graph, with the observable
/// parity of each chosen path.
#[derive(Clone, Debug)]
pub struct MatchingDecoder {
    nodes: usize,
    boundary: usize,
    dist: Vec<f64>,
    parity: Vec<u64>,
}

impl MatchingDecoder {
    pub fn new(graph: &MatchingGraph) -> Self {
        let nodes = graph.num_detectors + 1;
        let mut adj: Vec<Vec<(usize, f64, u64)>> = vec![Vec::new(); nodes];
        for e in &graph.edges {
            adj[e.u].push((e.v, e.weight, e.observables));
            adj[e.v].push((e.u, e.weight, e.observables));
        }
        for a in &mut adj {
            a.sort_by_key(|t| t.0);
        }
        let mut dist = vec![f64::INFINITY; nodes * nodes];
        let mut parity = vec![0u64; nodes * nodes];
        for s in 0..nodes {
            let d = &mut dist[s * nodes..(s + 1) * nodes];
            let par = &mut parity[s * nodes..(s + 1) * nodes];
            let mut done = vec![false; nodes];
            let mut heap = BinaryHeap::new();
            d[s] = 0.0;
            heap.push(HeapItem(0.0, s));
            while let Some(HeapItem(du, u)) = heap.pop() {
                if done[u] {
                    continue;
                }
                done[u] = true;
                for &(v, w, obs) in &adj[u] {
                    let nd = du + w;
                    if nd < d[v] {
                        d[v] = nd;
                        par[v] = par[u] ^ obs;
                        heap.push(HeapItem(nd, v));
                    }
                }
            }
        }
        MatchingDecoder { nodes, boundary: graph.num_detectors, dist, parity }
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.nodes + b]
    }

    pub fn path_parity(&self, a: usize, b: usize) -> u64 {
        self.parity[a * self.nodes + b]
    }

    /// Predicted observable flips for the given fired detectors (local
    /// indices).
    pub fn decode(&self, defects: &[usize]) -> Result<u64> {
        let k = defects.len();
        if k == 0 {
            return Ok(0);
        }
        if let Some(&bad) = defects.iter().find(|&&d| d >= self.boundary) {
            return Err(Error::InvalidArgument(format!("detector {bad} outside the graph")));
        }
        let b = self.boundary;
        let n = k + k % 2;
        // pair cost: directly, or both defects to the boundary
        let pair = |i: usize, j: usize| -> (f64, u64) {
            if i >= k || j >= k {
                let d = defects[i.min(j)];
                return (self.distance(d, b), self.path_parity(d, b));
            }
            let (di, dj) = (defects[i], defects[j]);
            let direct = self.distance(di, dj);
            let via = self.distance(di, b) + self.distance(dj, b);
            if direct <= via {
                (direct, self.path_parity(di, dj))
            } else {
                (via, self.path_parity(di, b) ^ self.path_parity(dj, b))
            }
        };
        let matching = mwpm(n, |i, j| pair(i, j).0)
            .map_err(|e| Error::MalformedGraph(format!("no perfect matching of {k} defects: {e}")))?;
        Ok(matching.iter().fold(0, |acc, &(i, j)| acc ^ pair(i, j).1))
    }
}

/// Decoder for a whole memory circuit: one matching graph per stabilizer
/// group, decoded independently; predictions are XORed.
#[derive(Clone, Debug)]
pub struct CircuitDecoder {
    groups: Vec<(Vec<usize>, MatchingDecoder)>,
    /// local index of each global detector within its group
    local: Vec<usize>,
    group_of: Vec<usize>,
    pub graphs: Vec<MatchingGraph>,
    pub dropped_hyperedges: usize,
}

impl CircuitDecoder {
    pub fn from_circuit(noisy: &Circuit) -> Result<Self> {
        let dem = extract_dem(noisy)?;
        let (g1, g2) = split_dem(&dem, noisy)?;
        let mut local = vec![0; dem.num_detectors];
        let mut group_of = vec![0; dem.num_detectors];
        let mut groups = Vec::new();
        let mut graphs = Vec::new();
        let dropped = g1.dropped + g2.dropped;
        for (gi, g) in [g1, g2].into_iter().enumerate() {
            for (k, &d) in g.detectors.iter().enumerate() {
                local[d] = k;
                group_of[d] = gi;
            }
            let graph = build_matching_graph(&g)?;
            groups.push((g.detectors.clone(), MatchingDecoder::new(&graph)));
            graphs.push(graph);
        }
        Ok(CircuitDecoder { groups, local, group_of, graphs, dropped_hyperedges: dropped })
    }

    pub fn num_detectors(&self) -> usize {
        self.local.len()
    }

    /// Predicted observable flips from the fired (global) detectors.
    pub fn decode(&self, fired: &[usize]) -> Result<u64> {
        let mut per_group: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for &d in fired {
            if d >= self.local.len() {
                return Err(Error::InvalidArgument(format!("detector {d} outside the circuit")));
            }
            per_group[self.group_of[d]].push(self.local[d]);
        }
        let mut out = 0;
        for (g, defects) in per_group.iter().enumerate() {
            out ^= self.groups[g].1.decode(defects)?;
        }
        Ok(out)
    }
}
