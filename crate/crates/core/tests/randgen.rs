use kpower_core::randgen::union_of;
use kpower_core::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn split_preserves_union_probability(p in 0.0f64..=1.0, r in 1usize..12) {
        let plan = split_rounds(p, r).unwrap();
        let back = 1.0 - (1.0 - plan.per_round_p).powi(r as i32);
        prop_assert!((back - p).abs() < 1e-12);
        prop_assert!(plan.per_round_p <= p + 1e-15);
    }

    #[test]
    fn samples_are_pure_functions(n in 1usize..80, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let a = sample_gnp(n, p, seed).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| sample_gnp(n, p, seed).unwrap());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn coupling_is_monotone() {
    let lo = sample_gnp(120, 0.2, 17).unwrap();
    let hi = sample_gnp(120, 0.5, 17).unwrap();
    assert!(lo.edges().all(|(u, v)| hi.has_edge(u, v)));
}

#[test]
fn edge_frequency() {
    let n = 400;
    let pairs = (n * (n - 1) / 2) as f64;
    let g = sample_gnp(n, 0.1, 3).unwrap();
    let sd = (pairs * 0.1 * 0.9).sqrt();
    assert!((g.edge_count() as f64 - pairs * 0.1).abs() < 5.0 * sd);
}

#[test]
fn union_of_rounds_has_target_density() {
    let n = 300;
    let plan = split_rounds(0.3, 5).unwrap();
    let rounds = plan.sample_all(n, 8).unwrap();
    assert_ne!(rounds[0], rounds[1]);
    let u = union_of(&rounds).unwrap();
    let pairs = (n * (n - 1) / 2) as f64;
    let sd = (pairs * 0.3 * 0.7).sqrt();
    assert!((u.edge_count() as f64 - pairs * 0.3).abs() < 5.0 * sd);
    assert_eq!(plan.sample_round(n, 8, 2).unwrap(), rounds[2]);
    assert!(union_of(&[]).is_err());
    assert!(split_rounds(0.5, 0).is_err());
}

#[test]
fn multipartite_respects_classes() {
    let model = MomentModel::new(3, 4, 3, 0.5).unwrap();
    let g = sample_multipartite(&model, 2, 1).unwrap();
    assert_eq!(g.class_sizes(), vec![3, 4, 4, 4]);
    for e in g.edges() {
        assert_ne!(g.class_of(e.u), g.class_of(e.v));
        let touches_zero = g.class_of(e.u) == 0 || g.class_of(e.v) == 0;
        assert_eq!(touches_zero, e.label != PLAIN);
        assert!(e.label.unsigned_abs() as usize <= 2);
    }
    let full = sample_multipartite(&MomentModel::new(2, 2, 2, 1.0).unwrap(), 2, 0).unwrap();
    assert_eq!(full.edge_count(), 2 * 4 * 4 + 4);
}
