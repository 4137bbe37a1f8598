use std::collections::BTreeSet;

use hexqec_core::layout::{ithaca_index_map, stabilizer_groups, validate_layout, QubitRole, StabilizerSpec};
use hexqec_core::{build_layout, Family, Pauli, StabGroup, Structure};
use proptest::prelude::*;

type Stab = Vec<(usize, char)>;

fn parse(s: &str) -> Stab {
    let mut v: Stab = s
        .split_whitespace()
        .map(|t| (t[1..].parse().unwrap(), t.chars().next().unwrap()))
        .collect();
    v.sort();
    v
}

/// Stabilizers of a d=3 heavy-hex group in device numbering, in layout order.
fn device_group(family: Family, group: StabGroup) -> Vec<Stab> {
    let layout = build_layout(family, Structure::HeavyHex, 3).unwrap();
    let map = ithaca_index_map(&layout).unwrap();
    let (s1, s2) = stabilizer_groups(&layout);
    let specs: Vec<StabilizerSpec> = if group == StabGroup::S1 { s1 } else { s2 };
    specs
        .iter()
        .map(|s| {
            let mut v: Stab = s.data_ids.iter().zip(&s.letters).map(|(&q, p)| (map[q], p.as_char())).collect();
            v.sort();
            v
        })
        .collect()
}

fn as_set(v: Vec<Stab>) -> BTreeSet<Stab> {
    v.into_iter().collect()
}

#[test]
fn tailored_groups_on_device_indices() {
    let s1 = ["Y1 Y16 Y28", "Y5 Y16 Y20 Y32", "Y9 Y20 Y36", "Y28 Y44 Y55", "Y32 Y44 Y48 Y59", "Y36 Y48 Y63"];
    let s2 = ["X1 X5 X16", "X5 X9 X20", "X16 X28 X32 X44", "X20 X32 X36 X48", "X44 X55 X59", "X48 X59 X63"];
    let g1 = device_group(Family::Tailored, StabGroup::S1);
    assert_eq!(g1[0], parse("Y1 Y16 Y28"));
    assert_eq!(as_set(g1), as_set(s1.iter().map(|s| parse(s)).collect()));
    assert_eq!(as_set(device_group(Family::Tailored, StabGroup::S2)), as_set(s2.iter().map(|s| parse(s)).collect()));
}

#[test]
fn surface_groups_replace_y_with_z() {
    let t = device_group(Family::Tailored, StabGroup::S1);
    let s = device_group(Family::Surface, StabGroup::S1);
    let swapped: Vec<Stab> = t.iter().map(|st| st.iter().map(|&(q, _)| (q, 'Z')).collect()).collect();
    assert_eq!(s, swapped);
    assert_eq!(device_group(Family::Surface, StabGroup::S2), device_group(Family::Tailored, StabGroup::S2));
}

#[test]
fn xzzx_groups_on_device_indices() {
    let s1 = ["X1 Z16 X28", "X5 Z16 Z20 X32", "X9 Z20 X36", "X28 Z44 X55", "X32 Z44 Z48 X59", "X36 Z48 X63"];
    let s2 = ["Z1 Z5 X16", "Z5 Z9 X20", "X16 Z28 Z32 X44", "X20 Z32 Z36 X48", "X44 Z55 Z59", "X48 Z59 Z63"];
    let g2 = device_group(Family::Xzzx, StabGroup::S2);
    assert_eq!(g2[2], parse("X16 Z28 Z32 X44"));
    assert_eq!(as_set(device_group(Family::Xzzx, StabGroup::S1)), as_set(s1.iter().map(|s| parse(s)).collect()));
    assert_eq!(as_set(g2), as_set(s2.iter().map(|s| parse(s)).collect()));
}

#[test]
fn ithaca_map_is_injective_onto_61_sites() {
    let layout = build_layout(Family::Surface, Structure::HeavyHex, 3).unwrap();
    let map = ithaca_index_map(&layout).unwrap();
    let sites: BTreeSet<usize> = map.iter().copied().collect();
    assert_eq!(sites.len(), 61);
    assert!(sites.iter().all(|&s| s < 65));
    for unused in [0, 27, 37, 64] {
        assert!(!sites.contains(&unused));
    }
    let data: BTreeSet<usize> = layout.data_ids().iter().map(|&q| map[q]).collect();
    assert_eq!(data, [1, 5, 9, 16, 20, 28, 32, 36, 44, 48, 55, 59, 63].into_iter().collect());
    assert!(ithaca_index_map(&build_layout(Family::Surface, Structure::HeavyHex, 5).unwrap()).is_err());
    assert!(ithaca_index_map(&build_layout(Family::Surface, Structure::Lattice, 3).unwrap()).is_err());
}

#[test]
fn ithaca_edges_follow_device_rows_and_bridges() {
    // device couplings: neighbours along a row, plus bridge qubits joining rows
    let layout = build_layout(Family::Tailored, Structure::HeavyHex, 3).unwrap();
    let map = ithaca_index_map(&layout).unwrap();
    for &(a, b) in &layout.edges {
        let (a, b) = (map[a].min(map[b]), map[a].max(map[b]));
        let row_neighbours = b == a + 1 && ![12, 26, 40, 54].contains(&a);
        assert!(row_neighbours || b > a + 1, "{a}-{b}");
    }
}

#[test]
fn documents_use_identity_ids_without_map() {
    let layout = build_layout(Family::Xzzx, Structure::HeavyHex, 3).unwrap();
    let doc = layout.to_document(false).unwrap();
    assert!(doc.qubits.iter().enumerate().all(|(i, q)| q.id == i));
    let mapped = layout.to_document(true).unwrap();
    assert_eq!(mapped.qubits.len(), 61);
    assert_eq!(mapped.stabilizers.len(), 12);
}

#[test]
fn counts_for_all_distances() {
    for family in Family::ALL {
        for structure in [Structure::Lattice, Structure::HeavyHex] {
            for d in [3, 5, 7, 9, 11] {
                let l = build_layout(family, structure, d).unwrap();
                let (data, flags, syn) = l.role_counts();
                assert_eq!(data, d * d + (d - 1) * (d - 1));
                assert_eq!(syn, data - 1);
                if structure == Structure::Lattice {
                    assert_eq!(flags, 0);
                } else {
                    assert_eq!(flags, 6 * d * (d - 1));
                }
                assert_eq!(l.ids_with_role(QubitRole::Data).len(), data);
                assert!(validate_layout(&l).is_empty(), "{family:?} {structure:?} {d}");
            }
        }
    }
}

#[test]
fn tailored_and_surface_logicals() {
    let letters = |f: Family| {
        let l = build_layout(f, Structure::HeavyHex, 3).unwrap();
        l.logical_ops
            .iter()
            .map(|op| op.terms().iter().map(|&(_, p)| p).collect::<BTreeSet<Pauli>>())
            .collect::<Vec<_>>()
    };
    let single = |p: Pauli| [p].into_iter().collect::<BTreeSet<_>>();
    assert_eq!(letters(Family::Surface), vec![single(Pauli::X), single(Pauli::Z)]);
    assert_eq!(letters(Family::Tailored), vec![single(Pauli::X), single(Pauli::Y)]);
}

proptest! {
    #[test]
    fn logicals_commute_with_stabilizers(fi in 0usize..3, hh in any::<bool>(), k in 1usize..5) {
        let family = Family::ALL[fi];
        let structure = if hh { Structure::HeavyHex } else { Structure::Lattice };
        let l = build_layout(family, structure, 2 * k + 1).unwrap();
        for op in &l.logical_ops {
            prop_assert_eq!(op.weight(), 2 * k + 1);
            for s in &l.stabilizers {
                prop_assert!(s.pauli().commutes(op));
            }
        }
        prop_assert!(l.logical_ops[0].anticommutes(&l.logical_ops[1]));
        prop_assert!(l.degrees().iter().all(|&g| g <= structure.max_degree()));
    }
}
