//! End-to-end acceptance battery. Each test prints a single pass/fail line
//! with its wall time so a full run reads as a checklist. The sweeps cover
//! every admissible instance with q <= 2500; the anchors pin exact rational
//! values derived by hand.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use paley_core::curvature::{formula_curvature, ratio};
use paley_core::finite_field::is_prime;
use paley_core::matching::{
    check_perfect_matching, edge_neighborhood, max_matching_size, perfect_matching_via_sorting,
    sort_cells,
};
use paley_core::paley_graph::{connected_by_divisibility, sufficient_connectivity};
use paley_core::report::{enumerate_instances, sample_edges, SweepConfig};
use paley_core::{
    build_field, build_graph, transport_curvature, CompleteGraph, CurvatureRecord, PaleyGraph,
};

const Q_CAP: usize = 2500;

fn conclude(name: &str, started: Instant, budget: Duration, result: Result<String, String>) {
    let elapsed = started.elapsed();
    match &result {
        Ok(detail) => println!("{name}: pass in {elapsed:.2?} ({detail})"),
        Err(detail) => println!("{name}: FAIL in {elapsed:.2?}: {detail}"),
    }
    if let Err(detail) = result {
        panic!("{name}: {detail}");
    }
    assert!(
        elapsed <= budget,
        "{name}: took {elapsed:.2?}, budget {budget:.2?}"
    );
}

/// Every admissible (p, n, k) with q <= Q_CAP, grouped by field so each
/// GF(p^n) is built once.
fn grouped_instances() -> Vec<(usize, u32, Vec<usize>)> {
    let cfg = SweepConfig {
        p_range: (3, Q_CAP),
        n_range: (1, 16),
        k_range: (1, Q_CAP),
        q_cap: Q_CAP,
        ..SweepConfig::default()
    };
    let mut groups: BTreeMap<(usize, u32), Vec<usize>> = BTreeMap::new();
    for (p, n, k) in enumerate_instances(&cfg) {
        groups.entry((p, n)).or_default().push(k);
    }
    groups
        .into_iter()
        .map(|((p, n), ks)| (p, n, ks))
        .collect()
}

fn graph(p: usize, n: u32, k: usize) -> PaleyGraph {
    let f = Arc::new(build_field(p, n).expect("valid field parameters"));
    build_graph(f, k).expect("admissible instance")
}

fn all_edges(g: &PaleyGraph) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(g.edge_count());
    for x in 0..g.q() {
        for &s in g.connection() {
            let y = g.field().add(x, s);
            if y > x {
                edges.push((x, y));
            }
        }
    }
    edges
}

#[test]
fn complete_graph_transport_calibration() {
    let t0 = Instant::now();
    let mut edges_checked = 0usize;
    let result = (|| {
        for n in 3..=12usize {
            let g = CompleteGraph { n };
            let expected = ratio(n as i128, n as i128 - 1);
            for x in 0..n {
                for y in (x + 1)..n {
                    let got = transport_curvature(&g, x, y)
                        .map_err(|e| format!("K_{n} edge ({x}, {y}): {e}"))?;
                    if got != expected {
                        return Err(format!(
                            "K_{n} edge ({x}, {y}): transport gave {got}, expected {expected}"
                        ));
                    }
                    edges_checked += 1;
                }
            }
        }
        Ok(format!("10 complete graphs, {edges_checked} edges"))
    })();
    conclude(
        "complete-graph transport calibration",
        t0,
        Duration::from_secs(1),
        result,
    );
}

#[test]
fn quadratic_curvature_matches_oracle_on_every_edge() {
    let t0 = Instant::now();
    let mut edges_checked = 0usize;
    let result = (|| {
        for (p, n) in [(3usize, 2u32), (5, 2), (7, 2), (3, 4)] {
            let g = graph(p, n, 2);
            let q = g.q() as i128;
            // strongly regular with lambda = (q - 5)/4 common neighbors
            let expected = ratio(2 * (2 + (q - 5) / 4), q - 1);
            for (x, y) in all_edges(&g) {
                let formula = formula_curvature(&g, x, y).map_err(|e| e.to_string())?;
                if !formula.hypothesis_holds {
                    return Err(format!("q={q}: containment hypothesis failed at k = 2"));
                }
                if formula.value != expected {
                    return Err(format!(
                        "q={q} edge ({x}, {y}): formula gave {}, expected {expected}",
                        formula.value
                    ));
                }
                let transport = transport_curvature(&g, x, y).map_err(|e| e.to_string())?;
                if transport != expected {
                    return Err(format!(
                        "q={q} edge ({x}, {y}): transport gave {transport}, expected {expected}"
                    ));
                }
                edges_checked += 1;
            }
        }
        Ok(format!("q in {{9, 25, 49, 81}}, {edges_checked} edges"))
    })();
    conclude(
        "quadratic curvature equals transport on every edge",
        t0,
        Duration::from_secs(30),
        result,
    );
}

#[test]
fn prime_k_tower_formula_matches_oracle() {
    let t0 = Instant::now();
    // q = p^(k m) with k prime, q <= Q_CAP, q = 1 mod 2k
    let mut instances: Vec<(usize, u32, usize)> = Vec::new();
    for k in [2usize, 3, 5, 7, 11] {
        for p in (3..=Q_CAP).filter(|&p| is_prime(p)) {
            let mut n = k as u32;
            loop {
                let Some(q) = (p as u128).checked_pow(n) else {
                    break;
                };
                if q > Q_CAP as u128 {
                    break;
                }
                if (q as usize - 1) % (2 * k) == 0 {
                    instances.push((p, n, k));
                }
                n += k as u32;
            }
        }
    }
    let result = (|| {
        if instances.len() != 20 {
            return Err(format!(
                "expected 20 admissible tower instances, enumerated {}: {instances:?}",
                instances.len()
            ));
        }
        if !instances.contains(&(7, 4, 2)) || !instances.contains(&(13, 3, 3)) {
            return Err(format!("tower enumeration is missing known members: {instances:?}"));
        }
        let mut edges_checked = 0usize;
        for &(p, n, k) in &instances {
            let g = graph(p, n, k);
            let edges = if g.edge_count() <= 24 {
                all_edges(&g)
            } else {
                let sampled = sample_edges(&g, 24);
                if sampled.len() < 20 {
                    return Err(format!(
                        "P({}, {k}): only {} distinct sampled edges",
                        g.q(),
                        sampled.len()
                    ));
                }
                sampled
            };
            for (x, y) in edges {
                let formula = formula_curvature(&g, x, y).map_err(|e| e.to_string())?;
                let transport = transport_curvature(&g, x, y).map_err(|e| e.to_string())?;
                if formula.value != transport {
                    return Err(format!(
                        "P({}, {k}) edge ({x}, {y}): formula {} vs transport {transport}",
                        g.q(),
                        formula.value
                    ));
                }
                edges_checked += 1;
            }
        }
        Ok(format!(
            "{} tower instances, {edges_checked} edges",
            instances.len()
        ))
    })();
    conclude(
        "prime-k tower formula equals transport",
        t0,
        Duration::from_secs(300),
        result,
    );
}

#[test]
fn connectivity_theory_agrees_with_search() {
    let t0 = Instant::now();
    let result = (|| {
        let mut checked = 0usize;
        for (p, n, ks) in grouped_instances() {
            let f = Arc::new(build_field(p, n).map_err(|e| e.to_string())?);
            for k in ks {
                let g = build_graph(f.clone(), k).map_err(|e| e.to_string())?;
                let by_search = g.is_connected();
                let by_theory = connected_by_divisibility(p, n, k);
                if by_search != by_theory {
                    return Err(format!(
                        "({p}, {n}, {k}): search says {by_search}, divisibility says {by_theory}"
                    ));
                }
                let s = sufficient_connectivity(p, n, k);
                if s.any() && !by_search {
                    return Err(format!(
                        "({p}, {n}, {k}): a sufficient condition fired on a disconnected graph"
                    ));
                }
                checked += 1;
            }
        }
        if checked != 3268 {
            return Err(format!("expected 3268 admissible instances, swept {checked}"));
        }
        Ok(format!("{checked} instances, zero mismatches"))
    })();
    conclude(
        "connectivity theory agrees with breadth-first search",
        t0,
        Duration::from_secs(300),
        result,
    );
}

#[test]
fn disconnected_instances_split_into_reduced_copies() {
    let t0 = Instant::now();
    let result = (|| {
        // (p, n, k) -> (a, component count, component size, reduced k)
        let expected = [
            ((3usize, 2u32, 4usize), (1u32, 3usize, 3usize, 1usize)),
            ((5, 2, 6), (1, 5, 5, 1)),
            ((3, 4, 20), (2, 9, 9, 2)),
            ((3, 4, 40), (1, 27, 3, 1)),
        ];
        for ((p, n, k), (a, count, size, k_prime)) in expected {
            let g = graph(p, n, k);
            let r = g.component_report();
            if r.connected {
                return Err(format!("({p}, {n}, {k}) must be disconnected"));
            }
            if r.a != a || r.component_count != count || r.k_prime != k_prime {
                return Err(format!(
                    "({p}, {n}, {k}): got a={}, count={}, k'={}, expected a={a}, count={count}, k'={k_prime}",
                    r.a, r.component_count, r.k_prime
                ));
            }
            if r.components.iter().any(|c| c.len() != size) {
                return Err(format!("({p}, {n}, {k}): a component is not of size {size}"));
            }
            let subfield = g.field().subfield_elements(a);
            if r.components[0] != subfield {
                return Err(format!(
                    "({p}, {n}, {k}): component of zero differs from the degree-{a} subfield"
                ));
            }
            // embedding-based edge identity with the reduced graph
            g.check_component_structure(&r)
                .map_err(|detail| format!("({p}, {n}, {k}): {detail}"))?;
        }
        Ok("4 disconnected instances, all component facts verified".to_string())
    })();
    conclude(
        "disconnected instances split into reduced copies",
        t0,
        Duration::from_secs(60),
        result,
    );
}

#[test]
fn sorting_matchings_are_perfect_and_maximum() {
    let t0 = Instant::now();
    let result = (|| {
        let mut checked = 0usize;
        for (p, n, ks) in grouped_instances() {
            let f = Arc::new(build_field(p, n).map_err(|e| e.to_string())?);
            let q = f.q();
            for k in ks {
                if (q - 1) / (p - 1) % k != 0 || !connected_by_divisibility(p, n, k) {
                    continue;
                }
                let g = build_graph(f.clone(), k).map_err(|e| e.to_string())?;
                let ctx = |detail: String| format!("({p}, {n}, {k}): {detail}");
                if n >= 2 {
                    let cells = sort_cells(&g).map_err(|e| ctx(e.to_string()))?;
                    for cell in &cells {
                        if cell.left.len() != cell.right.len() {
                            return Err(ctx(format!(
                                "cell {:?} is unbalanced: {} vs {}",
                                cell.tail,
                                cell.left.len(),
                                cell.right.len()
                            )));
                        }
                    }
                }
                let m = perfect_matching_via_sorting(&g).map_err(|e| ctx(e.to_string()))?;
                let nb = edge_neighborhood(&g, 0, 1).map_err(|e| ctx(e.to_string()))?;
                check_perfect_matching(&g, &nb, &m).map_err(ctx)?;
                let best = max_matching_size(&g, 0, 1).map_err(|e| ctx(e.to_string()))?;
                if m.pairs.len() != best {
                    return Err(ctx(format!(
                        "sorting produced {} pairs, augmenting maximum is {best}",
                        m.pairs.len()
                    )));
                }
                checked += 1;
            }
        }
        if checked < 400 {
            return Err(format!("only {checked} contained connected instances swept"));
        }
        Ok(format!("{checked} instances, all matchings perfect and maximum"))
    })();
    conclude(
        "sorting matchings are perfect and maximum",
        t0,
        Duration::from_secs(600),
        result,
    );
}

#[test]
fn disconnected_curvature_equals_component_values() {
    let t0 = Instant::now();
    let result = (|| {
        let mut edges_checked = 0usize;
        for (p, n, k, num, den) in [(3usize, 2u32, 4usize, 3, 2), (5, 2, 6, 5, 4)] {
            let g = graph(p, n, k);
            let expected = ratio(num, den);
            for (x, y) in all_edges(&g) {
                let r = CurvatureRecord::compute(&g, x, y, true).map_err(|e| e.to_string())?;
                let transport = r.transport.clone().expect("transport was requested");
                if r.formula != expected || transport != expected || !r.agree {
                    return Err(format!(
                        "P({}, {k}) edge ({x}, {y}): formula {}, transport {transport}, expected {expected}",
                        g.q(),
                        r.formula
                    ));
                }
                edges_checked += 1;
            }
        }
        Ok(format!(
            "complete-component values 3/2 and 5/4 on {edges_checked} edges"
        ))
    })();
    conclude(
        "disconnected curvature equals complete-component values",
        t0,
        Duration::from_secs(10),
        result,
    );
}

fn set_bit(row: &mut [u64], e: usize) {
    row[e >> 6] |= 1u64 << (e & 63);
}

fn and_popcount(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

#[test]
fn common_neighborhood_size_is_constant_per_instance() {
    let t0 = Instant::now();
    let result = (|| {
        let mut instances = 0usize;
        for (p, n, ks) in grouped_instances() {
            let f = Arc::new(build_field(p, n).map_err(|e| e.to_string())?);
            let q = f.q();
            let words = q.div_ceil(64);
            for k in ks {
                let g = build_graph(f.clone(), k).map_err(|e| e.to_string())?;
                let conn = g.connection();
                let neighbor_row = |v: usize| {
                    let mut row = vec![0u64; words];
                    for &s in conn {
                        set_bit(&mut row, f.add(v, s));
                    }
                    row
                };
                let row0 = neighbor_row(0);
                let mut expected: Option<usize> = None;
                for &s in conn {
                    let c = and_popcount(&row0, &neighbor_row(s));
                    match expected {
                        None => expected = Some(c),
                        Some(v) if v == c => {}
                        Some(v) => {
                            return Err(format!(
                                "({p}, {n}, {k}): edge (0, {s}) has {c} common neighbors, edge (0, {}) has {v}",
                                conn[0]
                            ));
                        }
                    }
                }
                let expected = expected.expect("connection set is nonempty");
                if k == 2 && expected != (q - 5) / 4 {
                    return Err(format!(
                        "({p}, {n}, 2): {expected} common neighbors, strong regularity wants {}",
                        (q - 5) / 4
                    ));
                }
                // spot-check arbitrary translates against the canonical edges
                let mut state: u64 = (p as u64) << 32 | (n as u64) << 16 | k as u64;
                for _ in 0..64 {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    let x = (state >> 33) as usize % q;
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    let y = f.add(x, conn[(state >> 33) as usize % conn.len()]);
                    let c = and_popcount(&neighbor_row(x), &neighbor_row(y));
                    if c != expected {
                        return Err(format!(
                            "({p}, {n}, {k}): edge ({x}, {y}) has {c} common neighbors, not {expected}"
                        ));
                    }
                }
                instances += 1;
            }
        }
        if instances != 3268 {
            return Err(format!("expected 3268 admissible instances, swept {instances}"));
        }
        Ok(format!("{instances} instances, zero exceptions"))
    })();
    conclude(
        "common-neighborhood size is constant per instance",
        t0,
        Duration::from_secs(300),
        result,
    );
}
