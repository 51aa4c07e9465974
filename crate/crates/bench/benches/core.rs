use criterion::{black_box, criterion_group, criterion_main, Criterion};
use heiscr_bench::points;
use heiscr_core::heisenberg::{ContactMetric, SasakiStructure};
use heiscr_core::quotients::{homology, relation_matrix, smith_normal_form, LatticeSpec};
use heiscr_core::sasaki_cone::{engine_scalar, ConeParams};
use heiscr_core::subriemannian::{dist_graph, dist_shooting, BoxDomain, DistanceMode, ShootingOptions};
use heiscr_core::tensor::curvature;

fn bench_curvature(c: &mut Criterion) {
    for n in 1..=3 {
        let s = SasakiStructure::right(n).unwrap();
        let p = points(n, 1).pop().unwrap();
        c.bench_function(&format!("curvature/right/n={}", n), |b| {
            b.iter(|| curvature(&s.metric_field(), black_box(&p)).unwrap().scalar)
        });
    }
    let a = ConeParams::new(vec![0.5, 1.0]).unwrap();
    let p = points(2, 1).pop().unwrap();
    c.bench_function("curvature/deformed/n=2", |b| b.iter(|| engine_scalar(&a, black_box(&p)).unwrap()));
}

fn bench_distance(c: &mut Criterion) {
    let dom = BoxDomain::default();
    let o = [0.0; 3];
    let q = [0.0, 0.0, 1.0];
    let mut g = c.benchmark_group("distance");
    g.sample_size(10);
    g.bench_function("graph/R=32", |b| {
        b.iter(|| dist_graph(&o, black_box(&q), 32, DistanceMode::Cc, &dom).unwrap().value)
    });
    let opts = ShootingOptions::default();
    g.bench_function("shooting/cc", |b| {
        b.iter(|| dist_shooting(&o, black_box(&q), DistanceMode::Cc, &opts).unwrap().value)
    });
    g.bench_function("shooting/L=100", |b| {
        b.iter(|| dist_shooting(&o, black_box(&q), DistanceMode::Riemannian(100.0), &opts).unwrap().value)
    });
    g.finish();
}

fn bench_quotients(c: &mut Criterion) {
    let spec = LatticeSpec::graded(vec![2, 4, 8, 16]).unwrap();
    let rel = relation_matrix(&spec).unwrap();
    c.bench_function("smith_normal_form/n=4", |b| b.iter(|| smith_normal_form(black_box(&rel)).unwrap()));
    c.bench_function("homology/n=4", |b| b.iter(|| homology(black_box(&spec)).unwrap()));
}

criterion_group!(benches, bench_curvature, bench_distance, bench_quotients);
criterion_main!(benches);
