//! Instance builders shared by the benchmark suite.

use std::sync::Arc;

use paley_core::{build_field, build_graph, PaleyGraph};

/// Builds P(p^n, k), panicking on invalid parameters; benchmarks only ever
/// ask for known-good instances.
pub fn graph(p: usize, n: u32, k: usize) -> PaleyGraph {
    let f = Arc::new(build_field(p, n).expect("valid bench field"));
    build_graph(f, k).expect("admissible bench instance")
}

/// Square transportation instance with uniform masses and small pseudorandom
/// integer costs, deterministic in `size`.
pub fn square_transport_instance(size: usize) -> (Vec<i64>, Vec<i64>, Vec<i64>) {
    let supply = vec![3i64; size];
    let demand = vec![3i64; size];
    let mut state = 0x9e37_79b9_7f4a_7c15u64 ^ size as u64;
    let cost = (0..size * size)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 7) as i64
        })
        .collect();
    (supply, demand, cost)
}
