use hexqec_core::circuit::{build_memory_circuit, propagate_pauli, Basis, Circuit, Op};
use hexqec_core::decoder::{build_matching_graph, CircuitDecoder, MatchingDecoder};
use hexqec_core::dem::{extract_dem, split_dem};
use hexqec_core::matching::mwpm;
use proptest::prelude::*;
use hexqec_core::noise::{apply_noise, BiasedNoise, Eta};
use hexqec_core::{build_layout, Family, Pauli, PauliString, Structure};

/// Every single fault of every noise instruction, as (detectors, observable mask).
fn single_faults(c: &Circuit) -> Vec<(usize, Vec<usize>, u64)> {
    let mut out = Vec::new();
    let mut meas = 0usize;
    let mut last_meas = vec![0usize; c.num_qubits];
    for (i, op) in c.ops.iter().enumerate() {
        let faults: Vec<PauliString> = match *op {
            Op::Pauli1 { q, px, py, pz } => [(Pauli::X, px), (Pauli::Y, py), (Pauli::Z, pz)]
                .into_iter()
                .filter(|&(_, p)| p > 0.0)
                .map(|(l, _)| PauliString::single(q, l))
                .collect(),
            Op::Pauli2 { a, b, .. } => {
                let mut v = Vec::new();
                for la in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                    for lb in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                        if la != Pauli::I || lb != Pauli::I {
                            v.push(PauliString::new([(a, la), (b, lb)]));
                        }
                    }
                }
                v
            }
            Op::PrepFlip { q, flip, .. } => vec![PauliString::single(q, flip)],
            Op::MeasFlip { q, .. } => {
                let m = last_meas[q];
                let dets: Vec<usize> =
                    c.detectors.iter().enumerate().filter(|(_, d)| d.measurements.contains(&m)).map(|(k, _)| k).collect();
                let obs = c.observables.iter().enumerate().filter(|(_, o)| o.contains(&m)).fold(0, |a, (k, _)| a | 1 << k);
                out.push((i, dets, obs));
                Vec::new()
            }
            _ => Vec::new(),
        };
        if op.is_measurement() {
            for q in op.qubits() {
                last_meas[q] = meas;
            }
            meas += 1;
        }
        for f in faults {
            let p = propagate_pauli(c, i, &f).unwrap();
            let obs = p.observables.iter().fold(0u64, |a, &k| a | 1 << k);
            out.push((i, p.detectors, obs));
        }
    }
    out
}

fn failures(family: Family, structure: Structure, d: usize, eta: Eta) -> usize {
    let layout = build_layout(family, structure, d).unwrap();
    let mut bad = 0;
    for basis in [Basis::L1, Basis::L2] {
        let c = apply_noise(&build_memory_circuit(&layout, d, basis).unwrap(), &BiasedNoise::new(1e-3, eta).unwrap());
        let dec = CircuitDecoder::from_circuit(&c).unwrap();
        for (i, dets, obs) in single_faults(&c) {
            if dec.decode(&dets).unwrap() != obs {
                bad += 1;
                if bad < 4 {
                    eprintln!("{family:?} {structure:?} {basis:?}: fault at op {i} ({:?}) dets {dets:?} obs {obs}", c.ops[i]);
                }
            }
        }
    }
    bad
}

#[test]
fn lattice_single_faults_are_corrected() {
    for family in Family::ALL {
        assert_eq!(failures(family, Structure::Lattice, 3, Eta::Finite(0.5)), 0, "{family:?}");
    }
}

#[test]
fn heavy_hex_single_faults_are_corrected() {
    for family in Family::ALL {
        assert_eq!(failures(family, Structure::HeavyHex, 3, Eta::Finite(0.5)), 0, "{family:?}");
    }
}

#[test]
fn infinite_bias_single_faults_are_corrected() {
    for family in Family::ALL {
        assert_eq!(failures(family, Structure::HeavyHex, 3, Eta::Infinite), 0, "{family:?}");
    }
}

#[test]
fn graph_edges_reproduce_their_own_masks() {
    let layout = build_layout(Family::Tailored, Structure::HeavyHex, 3).unwrap();
    let c = apply_noise(&build_memory_circuit(&layout, 3, Basis::L1).unwrap(), &BiasedNoise::new(2e-3, Eta::Finite(0.5)).unwrap());
    let dem = extract_dem(&c).unwrap();
    let (g1, g2) = split_dem(&dem, &c).unwrap();
    assert_eq!(g1.detectors.len() + g2.detectors.len(), dem.num_detectors);
    for g in [g1, g2] {
        let graph = build_matching_graph(&g).unwrap();
        let dec = MatchingDecoder::new(&graph);
        for e in &graph.edges {
            let defects: Vec<usize> = if e.v == graph.boundary() { vec![e.u] } else { vec![e.u, e.v] };
            // a lone edge is its own shortest path unless a parallel route is cheaper
            let pred = dec.decode(&defects).unwrap();
            let direct = dec.distance(e.u, e.v);
            if (direct - e.weight).abs() < 1e-12 {
                assert_eq!(pred, e.observables, "edge {e:?}");
            }
        }
    }
}

/// Minimum perfect matching cost by exhaustive recursion.
fn brute_force(n: usize, w: &[Vec<f64>]) -> f64 {
    fn go(left: &mut Vec<usize>, w: &[Vec<f64>]) -> f64 {
        if left.is_empty() {
            return 0.0;
        }
        let a = left.remove(0);
        let mut best = f64::INFINITY;
        for k in 0..left.len() {
            let b = left.remove(k);
            best = best.min(w[a][b] + go(left, w));
            left.insert(k, b);
        }
        left.insert(0, a);
        best
    }
    go(&mut (0..n).collect(), w)
}

fn weights() -> impl Strategy<Value = (usize, Vec<Vec<f64>>)> {
    (1usize..=5).prop_flat_map(|half| {
        let n = 2 * half;
        prop::collection::vec(0u32..1000, n * n).prop_map(move |raw| {
            let mut w = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = raw[i * n + j] as f64 / 37.0;
                    w[i][j] = v;
                    w[j][i] = v;
                }
            }
            (n, w)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn mwpm_matches_brute_force((n, w) in weights()) {
        let m = mwpm(n, |i, j| w[i][j]).unwrap();
        prop_assert_eq!(m.len(), n / 2);
        let mut seen = vec![false; n];
        for &(a, b) in &m {
            prop_assert!(!seen[a] && !seen[b]);
            seen[a] = true;
            seen[b] = true;
        }
        let cost: f64 = m.iter().map(|&(a, b)| w[a][b]).sum();
        prop_assert!((cost - brute_force(n, &w)).abs() < 1e-4);
    }
}
