mod common;

use common::{brute_phi, log_expectation, random_pattern, rng};
use kpower_core::density::{expected_good_copies, expected_sub, log_psi, phi, psi_of, LOG_TOLERANCE};
use kpower_core::linker::enumerate_good_copies;
use kpower_core::*;
use proptest::prelude::*;
use rand::Rng;

fn mask(v: &[usize]) -> u64 {
    v.iter().fold(0, |m, &i| m | 1 << i)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn expectation_matches_reference(seed in any::<u64>(), v in 3usize..=10) {
        let mut r = rng(seed);
        let t = r.gen_range(1..v);
        let pattern = random_pattern(v, t, 2, 0.5, 20, &mut r);
        let model = MomentModel::new(r.gen_range(1..20), r.gen_range(1..50), t, r.gen_range(0.01..1.0)).unwrap();
        let vs: Vec<usize> = (0..v).filter(|_| r.gen_bool(0.7)).collect();
        let sub = SubPattern::induced(&pattern, &vs);
        let got = expected_sub(&pattern, &sub, &model);
        let want = log_expectation(&pattern, &model, mask(&vs) as u32, mask(&sub.edges));
        prop_assert!(got == want || (got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn phi_is_the_definitional_minimum(seed in any::<u64>(), v in 2usize..=9) {
        let mut r = rng(seed);
        let t = r.gen_range(1..v);
        let pattern = random_pattern(v, t, 2, 0.6, 12, &mut r);
        let model = MomentModel::new(r.gen_range(1..10), r.gen_range(2..40), t, r.gen_range(0.05..0.95)).unwrap();
        let (pv, _) = phi(&pattern, &model, PhiVariant::Vertex).unwrap();
        prop_assert!((pv - brute_phi(&pattern, &model, PhiVariant::Vertex)).abs() < 1e-9 || pv.is_infinite());
        if pattern.edge_count() > 0 {
            let (pe, sub) = phi(&pattern, &model, PhiVariant::Edge).unwrap();
            prop_assert!(!sub.edges.is_empty());
            prop_assert!((pe - expected_sub(&pattern, &sub, &model)).abs() < 1e-9 || pe.is_infinite());
            prop_assert!(pv <= pe + LOG_TOLERANCE);
        }
    }
}

#[test]
fn psi_has_closed_form() {
    let q = build_contracted_q(10, 2).unwrap();
    let model = MomentModel::new(7, 50, 6, 0.3).unwrap();
    let want = q.edge_count() as f64 * 0.3f64.ln() + 7f64.ln() + 6.0 * 50f64.ln();
    assert!((log_psi(&q, &model) - want).abs() < 1e-12);
    assert!((psi_of(&q, &SubPattern::whole(&q), &model) - want).abs() < 1e-12);
}

#[test]
fn edge_variant_needs_edges() {
    let q = LabeledMultigraph::new(2, 2, vec![0, 1]).unwrap();
    let model = MomentModel::new(3, 3, 1, 0.5).unwrap();
    assert!(phi(&q, &model, PhiVariant::Edge).is_err());
    assert!(MomentModel::new(3, 3, 1, 1.5).is_err());
}

/// Mean number of good copies of `Q(8,2)` in sampled models against the
/// exact expectation.
#[test]
fn good_copy_mean_matches_expectation() {
    let q = build_contracted_q(8, 2).unwrap();
    let model = MomentModel::new(2, 3, 4, 0.7).unwrap();
    let samples: Vec<f64> = (0..400)
        .map(|s| {
            let host = sample_multipartite(&model, 2, s).unwrap();
            enumerate_good_copies(&q, &host).len() as f64
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
    let se = (var / samples.len() as f64).sqrt();
    let want = expected_good_copies(&q, &model).exp();
    assert!((mean - want).abs() <= 4.0 * se, "mean {mean} vs {want} (se {se})");
}

/// `Φᵛ_Q / n₀` for `Q(20,2)` stays bounded away from zero as `n` grows,
/// both at the clamped exponent and at a sparser one.
#[test]
fn vertex_minimum_of_q_scales_with_n0() {
    let q = build_contracted_q(20, 2).unwrap();
    for eps in [0.8, 0.3] {
        let ratios: Vec<f64> = [1e3, 1e4, 1e5]
            .iter()
            .map(|&n: &f64| {
                let p = n.powf(-0.5 + eps).min(1.0);
                let model = MomentModel::new(n as usize, n as usize, 16, p).unwrap();
                let (v, _) = phi(&q, &model, PhiVariant::Vertex).unwrap();
                (v - n.ln()).exp()
            })
            .collect();
        eprintln!("eps {eps}: ratios {ratios:?}");
        assert!(ratios.iter().all(|&r| r > 0.1));
        assert!(ratios[2] >= 0.5 * ratios[0]);
    }
}
