mod common;

use std::collections::BTreeSet;

use common::power_edges;
use kpower_core::absorber::JunctionRole;
use kpower_core::*;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = AbsorberParams> {
    (3usize..=6, 2usize..=4, 0usize..=4).prop_map(|(j, k, extra)| AbsorberParams::new(j, 2 * k + extra, k).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn built_absorbers_verify(p in params()) {
        let a = build_absorber(p).unwrap();
        let report = verify_absorber(&a);
        prop_assert!(report.all_passed(), "{:?}", report.failed());
        prop_assert_eq!(a.graph.edge_count(), p.expected_edge_count());
        let union: BTreeSet<_> = power_edges(a.spine.order(), p.k, false)
            .union(&power_edges(&a.augmented_order, p.k, false))
            .copied()
            .collect();
        prop_assert_eq!(a.graph.edges().collect::<BTreeSet<_>>(), union);
    }

    #[test]
    fn text_round_trip(p in params()) {
        let a = build_absorber(p).unwrap();
        let b = Absorber::from_text(&a.to_text()).unwrap();
        prop_assert_eq!(b.to_text(), a.to_text());
        prop_assert!(verify_absorber(&b).all_passed());
    }
}

#[test]
fn rejects_bad_parameters() {
    assert!(AbsorberParams::new(2, 4, 2).is_err());
    assert!(AbsorberParams::new(3, 3, 2).is_err());
    assert!(AbsorberParams::new(3, 4, 1).is_err());
}

#[test]
fn junction_positions() {
    let p = AbsorberParams::new(3, 4, 2).unwrap();
    let a = build_absorber(p).unwrap();
    assert_eq!(p.junction_position(1, JunctionRole::A1), 4);
    assert_eq!(p.junction_position(2, JunctionRole::B2), 12 + 11);
    for seg in 1..=3 {
        for r in JunctionRole::ALL {
            let x = a.junction(seg, r).unwrap();
            assert_eq!(a.spine.order()[p.junction_position(seg, r)], x);
            let acc = a.access_set(x).unwrap();
            assert!(acc.contains(&x));
        }
    }
    assert!(a.access_set(0).is_err());
}

#[test]
fn tampering_is_detected() {
    let a = build_absorber(AbsorberParams::new(3, 4, 2).unwrap()).unwrap();
    let mut b = a.clone();
    let (u, v) = b.junction_edges[0];
    b.graph.remove_edge(u, v);
    assert!(!verify_absorber(&b).all_passed());
    let mut c = a.clone();
    c.augmented_order.swap(3, 4);
    assert!(!verify_absorber(&c).all_passed());
}
