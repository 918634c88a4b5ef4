mod common;

use common::{brute_max_density, random_graph, rng};
use kpower_core::density::EXHAUSTIVE_LIMIT;
use kpower_core::*;
use num::{BigInt, BigRational};
use proptest::prelude::*;

fn weighted(g: &SimpleGraph) -> Vec<(usize, usize, u64)> {
    g.edges().map(|(u, v)| (u, v, 1)).collect()
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn methods_agree(n in 3usize..=13, p in 0.1f64..0.9, seed in any::<u64>()) {
        let g = random_graph(n, p, &mut rng(seed));
        prop_assume!(g.edge_count() > 0);
        for shift in [1usize, 2] {
            let (ex, pa) = if shift == 1 {
                (d1_max(&g, Method::Exhaustive).unwrap(), d1_max(&g, Method::Parametric).unwrap())
            } else {
                (d2_max(&g, Method::Exhaustive).unwrap(), d2_max(&g, Method::Parametric).unwrap())
            };
            prop_assert_eq!(&ex.value, &pa.value);
            let (num, den) = brute_max_density(n, &weighted(&g), shift);
            prop_assert_eq!(ex.value.clone(), ratio(num as i64, den as i64));
            let w = g.induced(&pa.witness).unwrap();
            let got = if shift == 1 { d1(&w).unwrap() } else { d2(&w).unwrap() };
            prop_assert_eq!(got, pa.value);
        }
    }
}

#[test]
fn known_values() {
    let c = make_cycle_power(12, 2).unwrap();
    assert_eq!(d1(&c).unwrap(), ratio(24, 11));
    assert_eq!(d2(&c).unwrap(), ratio(24, 10));
    let k5 = SimpleGraph::complete(5);
    assert_eq!(d1_max(&k5, Method::Exhaustive).unwrap().value, ratio(10, 4));
    assert_eq!(d2_max(&k5, Method::Parametric).unwrap().value, ratio(10, 3));
    let p = make_path_power(10, 3).unwrap();
    assert!(d1_max(&p, Method::Parametric).unwrap().value <= ratio(3, 1));
}

#[test]
fn exhaustive_has_a_limit() {
    let big = make_cycle_power(EXHAUSTIVE_LIMIT + 6, 2).unwrap();
    assert!(d1_max(&big, Method::Exhaustive).is_err());
    let v = d2_max(&big, Method::Parametric).unwrap().value;
    assert_eq!(v, ratio(3, 1));
}

#[test]
fn multigraph_weights_count() {
    let mut m = LabeledMultigraph::new(2, 2, vec![0, 1, 1]).unwrap();
    m.add_edge(0, 1, 1).unwrap();
    m.add_edge(0, 1, -1).unwrap();
    m.add_edge(0, 2, 2).unwrap();
    assert_eq!(d1_max(&m, Method::Exhaustive).unwrap().value, ratio(2, 1));
    assert_eq!(d1_max(&m, Method::Parametric).unwrap().value, ratio(2, 1));
}
