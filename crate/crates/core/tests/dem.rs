use hexqec_core::circuit::{build_memory_circuit, propagate_pauli, Basis, Op};
use hexqec_core::decoder::{build_matching_graph, edge_weight};
use hexqec_core::dem::{extract_dem, split_dem, DetectorErrorModel};
use hexqec_core::noise::{apply_noise, BiasedNoise, Eta};
use hexqec_core::{build_layout, Family, Pauli, PauliString, StabGroup, Structure};

#[test]
fn zero_noise_model_is_empty() {
    let layout = build_layout(Family::Surface, Structure::HeavyHex, 3).unwrap();
    let c = apply_noise(&build_memory_circuit(&layout, 3, Basis::L1).unwrap(), &BiasedNoise::new(0.0, Eta::Finite(0.5)).unwrap());
    let dem = extract_dem(&c).unwrap();
    assert!(dem.mechanisms.is_empty() && dem.undetectable.is_empty());
}

#[test]
fn idle_z_error_hits_x_stabilizers_of_one_layer() {
    let layout = build_layout(Family::Surface, Structure::Lattice, 3).unwrap();
    let c = build_memory_circuit(&layout, 3, Basis::L1).unwrap();
    let k = c.ops.iter().enumerate().filter(|(_, op)| **op == Op::Tick).nth(1).unwrap().0;
    // centre data qubit: two X stabilizers (S2) neighbour it
    let q = layout.data_ids()[6];
    let prop = propagate_pauli(&c, k, &PauliString::single(q, Pauli::Z)).unwrap();
    assert_eq!(prop.detectors.len(), 2);
    let tags: Vec<_> = prop.detectors.iter().map(|&d| c.detectors[d].tag.unwrap()).collect();
    assert!(tags.iter().all(|t| t.group == StabGroup::S2 && t.layer == tags[0].layer));
}

#[test]
fn extracted_mechanisms_match_propagation() {
    let layout = build_layout(Family::Tailored, Structure::Lattice, 3).unwrap();
    let c = build_memory_circuit(&layout, 2, Basis::L1).unwrap();
    let k = c.ops.iter().position(|op| *op == Op::Tick).unwrap();
    let q = layout.data_ids()[4];
    let mut noisy = c.clone();
    noisy.ops.insert(k + 1, Op::Pauli1 { q, px: 0.0, py: 0.0, pz: 0.01 });
    let dem = extract_dem(&noisy).unwrap();
    let prop = propagate_pauli(&c, k + 1, &PauliString::single(q, Pauli::Z)).unwrap();
    assert_eq!(dem.mechanisms.len() + dem.undetectable.len(), 1);
    let m = dem.mechanisms.first().or(dem.undetectable.first()).unwrap();
    assert_eq!(m.detectors, prop.detectors);
    assert_eq!(m.probability, 0.01);
}

#[test]
fn split_groups_have_graphlike_mechanisms() {
    for family in Family::ALL {
        let layout = build_layout(family, Structure::HeavyHex, 3).unwrap();
        let c = apply_noise(&build_memory_circuit(&layout, 3, Basis::L1).unwrap(), &BiasedNoise::new(0.002, Eta::Finite(0.5)).unwrap());
        let dem = extract_dem(&c).unwrap();
        let (g1, g2) = split_dem(&dem, &c).unwrap();
        for g in [&g1, &g2] {
            assert!(g.mechanisms.iter().all(|m| (1..=2).contains(&m.detectors.len())), "{family:?}");
            assert!(g.mechanisms.iter().all(|m| m.probability > 0.0 && m.probability <= 0.5));
        }
        // only the owner group carries the observable
        let (owner, _) = layout.memory_basis(0).unwrap();
        let (own, other) = if owner == StabGroup::S1 { (&g1, &g2) } else { (&g2, &g1) };
        assert!(own.mechanisms.iter().any(|m| m.observables != 0));
        assert!(other.mechanisms.iter().all(|m| m.observables == 0));
    }
}

#[test]
fn owner_graph_has_a_node_per_stabilizer_and_layer() {
    let layout = build_layout(Family::Surface, Structure::Lattice, 3).unwrap();
    let rounds = 3;
    let c = apply_noise(&build_memory_circuit(&layout, rounds, Basis::L1).unwrap(), &BiasedNoise::new(0.001, Eta::Finite(0.5)).unwrap());
    let (owner, _) = layout.memory_basis(0).unwrap();
    let dem = extract_dem(&c).unwrap();
    let (g1, g2) = split_dem(&dem, &c).unwrap();
    let g = if owner == StabGroup::S1 { g1 } else { g2 };
    let graph = build_matching_graph(&g).unwrap();
    assert_eq!(graph.num_detectors, 6 * (rounds + 1));
    assert!(graph.edges.iter().all(|e| e.weight.is_finite() && e.weight > 0.0));
    assert!(graph.edges.iter().all(|e| (e.weight - edge_weight(e.probability)).abs() < 1e-12));
}

#[test]
fn surface_z_errors_only_reach_the_x_group() {
    let layout = build_layout(Family::Surface, Structure::HeavyHex, 3).unwrap();
    let c = build_memory_circuit(&layout, 3, Basis::L1).unwrap();
    let k = c.ops.iter().enumerate().filter(|(_, op)| **op == Op::Tick).nth(2).unwrap().0;
    for q in layout.data_ids() {
        let prop = propagate_pauli(&c, k, &PauliString::single(q, Pauli::Z)).unwrap();
        assert!(prop.detectors.iter().all(|&d| c.detectors[d].tag.unwrap().group == StabGroup::S2));
    }
}

#[test]
fn text_round_trip_of_a_circuit_model() {
    let layout = build_layout(Family::Xzzx, Structure::HeavyHex, 3).unwrap();
    let c = apply_noise(&build_memory_circuit(&layout, 2, Basis::L2).unwrap(), &BiasedNoise::new(0.003, Eta::Infinite).unwrap());
    let dem = extract_dem(&c).unwrap();
    let parsed = DetectorErrorModel::parse(&dem.to_string()).unwrap();
    assert_eq!(parsed.mechanisms.len(), dem.mechanisms.len());
    assert_eq!(parsed.num_detectors, dem.num_detectors);
    for (a, b) in parsed.mechanisms.iter().zip(&dem.mechanisms) {
        assert_eq!((&a.detectors, a.observables), (&b.detectors, b.observables));
        assert!((a.probability - b.probability).abs() <= 1e-12 * b.probability.max(1e-300));
    }
}
