//! Hot paths end to end: field construction, graph build with distances,
//! both matching algorithms, the transport oracle, and the bare flow solver.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};

use paley_bench::{graph, square_transport_instance};
use paley_core::flow::min_cost_transport;
use paley_core::matching::{max_matching_size, perfect_matching_via_sorting};
use paley_core::{build_field, transport_curvature};

fn field_build(c: &mut Criterion) {
    c.bench_function("field/GF(7^4)", |b| {
        b.iter(|| build_field(black_box(7), black_box(4)).unwrap())
    });
    c.bench_function("field/GF(999983)", |b| {
        b.iter(|| build_field(black_box(999_983), black_box(1)).unwrap())
    });
}

fn graph_build(c: &mut Criterion) {
    c.bench_function("graph/P(2401,2) with distances", |b| {
        b.iter(|| {
            let g = graph(7, 4, 2);
            black_box(g.is_connected());
        })
    });
}

fn matchings(c: &mut Criterion) {
    let g = graph(3, 6, 2); // 729 vertices, degree 364
    c.bench_function("matching/sorting P(729,2)", |b| {
        b.iter(|| perfect_matching_via_sorting(black_box(&g)).unwrap())
    });
    c.bench_function("matching/augmenting P(729,2)", |b| {
        b.iter(|| max_matching_size(black_box(&g), 0, 1).unwrap())
    });
}

fn transport_oracle(c: &mut Criterion) {
    let g = graph(5, 4, 2); // 625 vertices, degree 312
    c.bench_function("curvature/transport P(625,2)", |b| {
        b.iter(|| transport_curvature(black_box(&g), 0, 1).unwrap())
    });
}

fn flow_solver(c: &mut Criterion) {
    let (supply, demand, cost) = square_transport_instance(200);
    c.bench_function("flow/200x200 uniform", |b| {
        b.iter(|| min_cost_transport(black_box(&supply), black_box(&demand), black_box(&cost)))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default()
        .warm_up_time(Duration::from_millis(500))
        .measurement_time(Duration::from_secs(2))
        .sample_size(10);
    targets = field_build, graph_build, matchings, transport_oracle, flow_solver
}
criterion_main!(benches);
