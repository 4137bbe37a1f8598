use hexqec_core::circuit::{build_memory_circuit, Basis, Op};
use hexqec_core::noise::{apply_noise, noise_census, pauli_rates, BiasedNoise, Eta, IdleMode};
use hexqec_core::{build_layout, Family, Structure};
use proptest::prelude::*;

#[test]
fn event_census_matches_instruction_count() {
    for structure in [Structure::HeavyHex, Structure::Lattice] {
        let layout = build_layout(Family::Xzzx, structure, 3).unwrap();
        let c = build_memory_circuit(&layout, 3, Basis::L1).unwrap();
        let count = |f: fn(&Op) -> bool| c.ops.iter().filter(|op| f(op)).count();
        let one_q = count(|op| matches!(op, Op::H(_)));
        let two_q = count(|op| matches!(op, Op::CX(..) | Op::CY(..)));
        let preps = count(|op| matches!(op, Op::PrepZ(_) | Op::PrepX(_) | Op::PrepY(_)));
        let meas = count(|op| matches!(op, Op::MeasZ(_) | Op::MeasX(_) | Op::MeasY(_)));
        let ticks = count(|op| matches!(op, Op::Tick));
        let idle = ticks * layout.data_ids().len();
        let noisy = apply_noise(&c, &BiasedNoise::new(0.001, Eta::Finite(10.0)).unwrap());
        assert_eq!(noise_census(&noisy), (one_q + idle, two_q, preps, meas));
        // heavy-hex runs the groups as separate cycles, the lattice interleaves them
        let cycles = if structure == Structure::HeavyHex { 2 * 3 } else { 3 };
        assert_eq!(ticks, cycles);
    }
}

#[test]
fn per_round_idle_uses_first_cycle_only() {
    let layout = build_layout(Family::Surface, Structure::HeavyHex, 3).unwrap();
    let c = build_memory_circuit(&layout, 3, Basis::L2).unwrap();
    let model = BiasedNoise::new(0.001, Eta::DEPOLARIZING).unwrap();
    let per_cycle = noise_census(&apply_noise(&c, &model)).0;
    let per_round = noise_census(&apply_noise(&c, &model.with_idle(IdleMode::PerRound))).0;
    assert_eq!(per_cycle - per_round, 3 * 13);
}

#[test]
fn half_bias_is_depolarizing() {
    let layout = build_layout(Family::Tailored, Structure::HeavyHex, 3).unwrap();
    let c = build_memory_circuit(&layout, 2, Basis::L1).unwrap();
    let p = 0.0021;
    let a = apply_noise(&c, &BiasedNoise::new(p, Eta::Finite(0.5)).unwrap());
    let third = p / 3.0;
    for op in &a.ops {
        match *op {
            Op::Pauli1 { px, py, pz, .. } => {
                assert!((px - third).abs() < 1e-18 && (py - third).abs() < 1e-18 && (pz - third).abs() < 1e-18)
            }
            Op::PrepFlip { p: q, .. } | Op::MeasFlip { p: q, .. } => assert!((q - 2.0 * third).abs() < 1e-18),
            Op::Pauli2 { p: q, .. } => assert_eq!(q, p),
            _ => {}
        }
    }
}

#[test]
fn zero_noise_events_have_zero_probability() {
    let layout = build_layout(Family::Surface, Structure::Lattice, 3).unwrap();
    let c = apply_noise(&build_memory_circuit(&layout, 3, Basis::L1).unwrap(), &BiasedNoise::new(0.0, Eta::Infinite).unwrap());
    for op in c.ops.iter().filter(|op| op.is_noise()) {
        let zero = match *op {
            Op::Pauli1 { px, py, pz, .. } => px + py + pz == 0.0,
            Op::Pauli2 { p, .. } | Op::PrepFlip { p, .. } | Op::MeasFlip { p, .. } => p == 0.0,
            _ => unreachable!(),
        };
        assert!(zero);
    }
}

#[test]
fn reapplying_noise_replaces_it() {
    let layout = build_layout(Family::Surface, Structure::HeavyHex, 3).unwrap();
    let c = build_memory_circuit(&layout, 2, Basis::L1).unwrap();
    let once = apply_noise(&c, &BiasedNoise::new(0.002, Eta::Finite(1.0)).unwrap());
    let twice = apply_noise(&once, &BiasedNoise::new(0.002, Eta::Finite(1.0)).unwrap());
    assert_eq!(once, twice);
    assert_eq!(once.without_noise(), c);
}

fn eta_strategy() -> impl Strategy<Value = Eta> {
    prop_oneof![(0.01f64..1e4).prop_map(Eta::Finite), Just(Eta::Infinite)]
}

proptest! {
    #[test]
    fn rates_sum_to_p(p in 0.0f64..0.999, eta in eta_strategy()) {
        let (x, y, z) = pauli_rates(p, eta).unwrap();
        prop_assert!((x + y + z - p).abs() < 1e-12);
        prop_assert_eq!(x, y);
        if let Eta::Finite(e) = eta {
            if x > 0.0 {
                prop_assert!((z / (x + y) - e).abs() < 1e-6 * e.max(1.0));
            }
        }
    }

    #[test]
    fn rates_nondecreasing_in_p(p in 0.0f64..0.5, dp in 0.0f64..0.4, eta in eta_strategy()) {
        let (a, b, c) = pauli_rates(p, eta).unwrap();
        let (a2, b2, c2) = pauli_rates(p + dp, eta).unwrap();
        prop_assert!(a2 >= a && b2 >= b && c2 >= c);
    }
}
