use kpower_core::factor::audit_embedding;
use kpower_core::*;

#[test]
fn complete_host_factors() {
    let n = 60;
    let host = SimpleGraph::complete(n);
    let within = VertexSet::full(n);
    let budget = EmbeddingBudget::new(10_000, 4, 1).unwrap();
    let pieces = find_path_power_factor(&host, &within, 12, 2, &budget).unwrap().unwrap();
    assert_eq!(pieces.len(), 5);
    assert!(kpower_core::factor::audit_factor(&host, &within, &pieces, 12, 2));
    assert!(find_path_power_factor(&host, &within, 7, 2, &budget).is_err());
}

#[test]
fn dense_random_host_factors() {
    let n = 90;
    let host = sample_gnp(n, 0.8, 6).unwrap();
    let within = VertexSet::from_iter_with(n, 0..60);
    let budget = EmbeddingBudget::new(50_000, 8, 2).unwrap();
    let pieces = find_path_power_factor(&host, &within, 10, 2, &budget).unwrap().unwrap();
    assert!(kpower_core::factor::audit_factor(&host, &within, &pieces, 10, 2));
    assert!(pieces.iter().flat_map(|p| p.order()).all(|&x| x < 60));
}

#[test]
fn factor_failure_reports_residue() {
    let mut host = SimpleGraph::complete(12);
    for v in 1..12 {
        host.remove_edge(0, v);
    }
    let budget = EmbeddingBudget::new(1_000, 2, 0).unwrap();
    let fail = find_path_power_factor(&host, &VertexSet::full(12), 4, 2, &budget).unwrap().unwrap_err();
    assert!(fail.residue.contains(&0));
    assert!(fail.covered < 12);
}

#[test]
fn embeddings_avoid_forbidden() {
    let host = sample_gnp(50, 0.7, 9).unwrap();
    let pattern = make_path_power(8, 2).unwrap();
    let forbidden = VertexSet::from_iter_with(50, 0..10);
    let budget = EmbeddingBudget::new(100_000, 3, 4).unwrap();
    let map = embed_copy(&host, &pattern, &forbidden, &budget).unwrap();
    assert!(audit_embedding(&host, &pattern, &map, &forbidden));
    let copies = find_disjoint_copies(&host, &pattern, 4, &budget, &forbidden).unwrap();
    assert_eq!(copies.shortfall, 4 - copies.mappings.len());
    let mut seen = std::collections::BTreeSet::new();
    for m in &copies.mappings {
        assert!(audit_embedding(&host, &pattern, m, &forbidden));
        assert!(m.iter().all(|&x| seen.insert(x)));
    }
    let empty = SimpleGraph::new(20);
    assert!(matches!(
        embed_copy(&empty, &pattern, &VertexSet::new(20), &budget),
        Err(EmbedFailure::NoEmbedding { .. })
    ));
}
