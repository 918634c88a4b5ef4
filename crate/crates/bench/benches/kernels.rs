use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kpower_core::*;

fn gnp(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_gnp");
    for n in [500, 2000] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| sample_gnp(n, 0.3, 1).unwrap()));
    }
    g.finish();
}

fn linkage(c: &mut Criterion) {
    let host = sample_gnp(1000, 0.3, 2).unwrap();
    let pool = VertexSet::full(1000);
    c.bench_function("find_linkage/n1000_s8", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            let req = LinkRequest::new(&host, &[0, 1], &[2, 3], 8, 50_000, seed).with_pool(&pool);
            find_linkage(&req).ok()
        })
    });
}

fn density(c: &mut Criterion) {
    let a = build_absorber(AbsorberParams::new(3, 4, 2).unwrap()).unwrap();
    c.bench_function("d1_max/parametric_absorber_3_4_2", |b| {
        b.iter(|| d1_max(&a.graph, Method::Parametric).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let hosts: Vec<SimpleGraph> = (0..16).map(|s| sample_gnp(10, 0.7, s).unwrap()).collect();
    c.bench_function("oracle/n10_p0.7", |b| {
        b.iter(|| hosts.iter().filter(|h| oracle_contains(h, 2).unwrap()).count())
    });
}

criterion_group!(benches, gnp, linkage, density, oracle);
criterion_main!(benches);
