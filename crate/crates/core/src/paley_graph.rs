//! The generalized Paley graph P(q, k): vertices are the elements of GF(q),
//! with an edge between x and y exactly when x - y is a k-th power of a unit.
//! Undirectedness needs -1 to be a k-th power, which is why admissibility
//! demands q = 1 mod 2k for k >= 2 (k = 1 gives the complete graph).
//!
//! Connectivity is decided twice on purpose: once by a divisor criterion on
//! the parameters and once by BFS over the actual adjacency; the component
//! checker then verifies that every component is the expected smaller Paley
//! graph, via an explicit subfield embedding.

use std::collections::VecDeque;
use std::sync::{Arc, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::det_rng::SplitMix64;
use crate::finite_field::{
    build_field, divisors, Element, FieldError, FieldParams, FieldStructure,
};
use crate::graph::SimpleGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("q = {q} is not congruent to 1 mod 2k (k = {k})")]
    BadCongruence { q: usize, k: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Graph parameters: the field plus the power index k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PaleyParams {
    pub field: FieldParams,
    pub k: usize,
}

pub struct PaleyGraph {
    field: Arc<FieldStructure>,
    k: usize,
    /// Sorted members of the k-th power subgroup; the connection set.
    connection: Vec<Element>,
    in_connection: Vec<bool>,
    /// BFS distances from vertex 0, u32::MAX when unreachable. Distances
    /// between arbitrary pairs reduce to this row because adjacency depends
    /// only on differences, so translation by any element preserves edges;
    /// the reduction is cross-checked against plain BFS in the tests.
    dist0: OnceLock<Vec<u32>>,
}

/// Builds P(q, k) on a constructed field. k = 1 yields the complete graph;
/// k >= 2 requires q = 1 mod 2k so that the graph is undirected.
pub fn build_graph(field: Arc<FieldStructure>, k: usize) -> Result<PaleyGraph, GraphError> {
    let q = field.q();
    if k == 0 {
        return Err(GraphError::Field(FieldError::BadK { k: 0, target: q - 1 }));
    }
    if (q - 1) % (2 * k) != 0 {
        return Err(GraphError::BadCongruence { q, k });
    }
    let connection = field.kth_power_subgroup(k)?.members;
    let mut in_connection = vec![false; q];
    for &s in &connection {
        in_connection[s] = true;
    }
    debug_assert!(in_connection[field.neg(1)]);
    Ok(PaleyGraph {
        field,
        k,
        connection,
        in_connection,
        dist0: OnceLock::new(),
    })
}

impl PaleyGraph {
    pub fn field(&self) -> &FieldStructure {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> usize {
        self.field.q()
    }

    pub fn paley_params(&self) -> PaleyParams {
        PaleyParams {
            field: self.field.params(),
            k: self.k,
        }
    }

    /// The connection set: sorted k-th powers of units.
    pub fn connection(&self) -> &[Element] {
        &self.connection
    }

    pub fn edge_count(&self) -> usize {
        self.q() * self.connection.len() / 2
    }

    /// BFS distance row from vertex 0; see the field comment on `dist0`.
    pub fn dist_from_zero(&self) -> &[u32] {
        self.dist0.get_or_init(|| {
            let q = self.q();
            let mut dist = vec![u32::MAX; q];
            dist[0] = 0;
            let mut queue = VecDeque::from([0usize]);
            while let Some(v) = queue.pop_front() {
                let next = dist[v] + 1;
                for &s in &self.connection {
                    let u = self.field.add(v, s);
                    if dist[u] == u32::MAX {
                        dist[u] = next;
                        queue.push_back(u);
                    }
                }
            }
            dist
        })
    }

    pub fn is_connected(&self) -> bool {
        self.dist_from_zero().iter().all(|&d| d != u32::MAX)
    }

    /// Connected components as sorted vertex lists, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let q = self.q();
        let mut seen = vec![false; q];
        let mut comps = Vec::new();
        for start in 0..q {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &s in &self.connection {
                    let u = self.field.add(v, s);
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Component census from BFS, with the reduced parameters read off the
    /// component of 0. For a connected graph a = n and k' = k.
    pub fn component_report(&self) -> ComponentReport {
        let f = &self.field;
        let comps = self.components();
        let connected = comps.len() == 1;
        let (a, k_prime) = if connected {
            (f.n(), self.k)
        } else {
            let a = exact_log(f.p(), comps[0].len()).unwrap_or(f.n());
            let num = self.k * (f.p().pow(a) - 1);
            let k_prime = if num % (f.q() - 1) == 0 {
                num / (f.q() - 1)
            } else {
                0
            };
            (a, k_prime)
        };
        ComponentReport {
            p: f.p(),
            n: f.n(),
            k: self.k,
            q: f.q(),
            connected,
            a,
            k_prime,
            component_count: comps.len(),
            theta_index: f.theta(),
            modulus_coeffs: f.modulus_coeffs().to_vec(),
            components: comps,
        }
    }

    /// Verifies a component census against the structure the parameters
    /// dictate: the divisibility verdict, the splitting degree, component
    /// count and sizes, the subfield at 0, and an explicit edge-preserving
    /// embedding of the reduced graph into every component.
    pub fn check_component_structure(&self, report: &ComponentReport) -> Result<(), String> {
        let f = &self.field;
        let (p, q, k) = (f.p(), f.q(), self.k);
        let theory = connected_by_divisibility(p, f.n(), k);
        if report.connected != theory {
            return Err(format!(
                "BFS says connected = {}, the divisor criterion says {}",
                report.connected, theory
            ));
        }
        if report.connected {
            if report.component_count != 1 || report.a != f.n() || report.k_prime != k {
                return Err("connected graph with non-trivial reduction fields".into());
            }
            return Ok(());
        }
        let a = report.a;
        match f.kpowers_subfield_degree(k) {
            Ok(deg) if deg == a => {}
            Ok(deg) => {
                return Err(format!(
                    "component of 0 has degree {a} but the k-th powers generate degree {deg}"
                ))
            }
            Err(e) => return Err(format!("subfield degree unavailable: {e}")),
        }
        if smallest_splitting_degree(p, f.n(), k) != Some(a) {
            return Err(format!(
                "{a} is not the smallest proper divisor satisfying the splitting criterion"
            ));
        }
        let pa = p.pow(a);
        if report.component_count != q / pa {
            return Err(format!(
                "expected {} components, found {}",
                q / pa,
                report.component_count
            ));
        }
        if report.components.len() != report.component_count {
            return Err("component list disagrees with the recorded count".into());
        }
        if let Some(bad) = report.components.iter().find(|c| c.len() != pa) {
            return Err(format!(
                "component containing {} has size {}, expected {pa}",
                bad[0],
                bad.len()
            ));
        }
        if report.k_prime == 0 || report.k_prime * (q - 1) != k * (pa - 1) {
            return Err(format!("reduced power index {} fails k'(q-1) = k(p^a-1)", report.k_prime));
        }
        let sub = f.subfield_elements(a);
        if report.components[0] != sub {
            return Err("component of 0 is not the subfield of order p^a".into());
        }
        let small_field =
            Arc::new(build_field(p, a).map_err(|e| format!("reduced field: {e}"))?);
        let small = build_graph(small_field, report.k_prime)
            .map_err(|e| format!("reduced graph: {e}"))?;
        // root of the reduced modulus inside the big field, smallest index;
        // sending the reduced basis to powers of the root is a ring embedding
        let small_modulus = small.field().modulus_coeffs().to_vec();
        let root = (0..q)
            .find(|&x| f.eval_poly(&small_modulus, x) == 0)
            .ok_or("reduced modulus has no root in the big field")?;
        let mut image = Vec::with_capacity(pa);
        for t in 0..pa {
            let mut val = 0;
            let mut basis = 1;
            let mut rest = t;
            for _ in 0..a {
                let digit = rest % p;
                rest /= p;
                val = f.add(val, f.mul(digit, basis));
                basis = f.mul(basis, root);
            }
            image.push(val);
        }
        let mut sorted_image = image.clone();
        sorted_image.sort_unstable();
        sorted_image.dedup();
        if sorted_image != sub {
            return Err("embedding image is not the subfield of order p^a".into());
        }
        for comp in &report.components {
            let rep = comp[0];
            let mut mapped: Vec<usize> = image.iter().map(|&z| f.add(z, rep)).collect();
            mapped.sort_unstable();
            if &mapped != comp {
                return Err(format!(
                    "translated embedding misses the component containing {rep}"
                ));
            }
            for t in 0..pa {
                for u in t + 1..pa {
                    let (gt, gu) = (f.add(image[t], rep), f.add(image[u], rep));
                    if small.is_edge(t, u) != self.is_edge(gt, gu) {
                        return Err(format!(
                            "embedding breaks the edge relation at ({t}, {u}) in the component containing {rep}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Samples pairs of edges, builds the affine map taking the first onto
    /// the second, and checks it preserves adjacency on sampled vertex pairs.
    pub fn edge_transitivity_spot_check(&self, samples: usize) -> bool {
        let f = &self.field;
        let q = self.q();
        let d = self.connection.len();
        let mut rng = SplitMix64::for_instance(f.p(), f.n(), self.k);
        for _ in 0..samples {
            let x1 = rng.below(q);
            let y1 = f.add(x1, self.connection[rng.below(d)]);
            let x2 = rng.below(q);
            let y2 = f.add(x2, self.connection[rng.below(d)]);
            let slope = f.mul(
                f.sub(y2, x2),
                f.inv(f.sub(y1, x1)).expect("edge endpoints differ"),
            );
            let offset = f.sub(x2, f.mul(slope, x1));
            let phi = |t: usize| f.add(f.mul(slope, t), offset);
            if phi(x1) != x2 || phi(y1) != y2 {
                return false;
            }
            if q <= 48 {
                for u in 0..q {
                    for v in u + 1..q {
                        if self.is_edge(u, v) != self.is_edge(phi(u), phi(v)) {
                            return false;
                        }
                    }
                }
            } else {
                for _ in 0..64 {
                    let u = rng.below(q);
                    let v = rng.below(q);
                    if u != v && self.is_edge(u, v) != self.is_edge(phi(u), phi(v)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Per-vertex neighbor bitsets for fast common-neighborhood counting.
    pub fn neighbor_bitsets(&self) -> NeighborBitsets {
        let q = self.q();
        let words = q.div_ceil(64);
        let mut rows = vec![0u64; q * words];
        for x in 0..q {
            let row = &mut rows[x * words..(x + 1) * words];
            for &s in &self.connection {
                let y = self.field.add(x, s);
                row[y / 64] |= 1 << (y % 64);
            }
        }
        NeighborBitsets { words, rows }
    }
}

impl SimpleGraph for PaleyGraph {
    fn order(&self) -> usize {
        self.q()
    }

    fn is_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.in_connection[self.field.sub(v, u)]
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .connection
            .iter()
            .map(|&s| self.field.add(v, s))
            .collect();
        out.sort_unstable();
        out
    }

    fn degree(&self, _v: usize) -> usize {
        self.connection.len()
    }

    fn distance(&self, u: usize, v: usize) -> Option<usize> {
        let d = self.dist_from_zero()[self.field.sub(v, u)];
        if d == u32::MAX {
            None
        } else {
            Some(d as usize)
        }
    }
}

/// Connectivity from the parameters alone: P(q, k) is disconnected exactly
/// when some proper divisor a of n has (q - 1)/(p^a - 1) dividing k.
pub fn connected_by_divisibility(p: usize, n: u32, k: usize) -> bool {
    smallest_splitting_degree(p, n, k).is_none()
}

/// Least proper divisor a of n with (q - 1)/(p^a - 1) | k, i.e. the degree
/// the graph splits down to; None when the graph is connected.
pub fn smallest_splitting_degree(p: usize, n: u32, k: usize) -> Option<u32> {
    let q = p.pow(n);
    divisors(n as usize)
        .into_iter()
        .filter(|&a| a < n as usize)
        .find(|&a| {
            let quotient = (q - 1) / (p.pow(a as u32) - 1);
            k % quotient == 0
        })
        .map(|a| a as u32)
}

/// Two parameter conditions, each sufficient for connectivity on its own:
/// k small against sqrt(q), or k dividing n. Neither is necessary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SufficientConnectivity {
    /// k < p^(n/2) + 1, evaluated exactly as (k - 1)^2 < q.
    pub small_k: bool,
    /// k | n.
    pub k_divides_n: bool,
}

impl SufficientConnectivity {
    pub fn any(&self) -> bool {
        self.small_k || self.k_divides_n
    }
}

pub fn sufficient_connectivity(p: usize, n: u32, k: usize) -> SufficientConnectivity {
    let q = (p as u128).pow(n);
    SufficientConnectivity {
        small_k: (k as u128 - 1).pow(2) < q,
        k_divides_n: n as usize % k == 0,
    }
}

/// Component census of one instance. Serializes with exactly these keys, in
/// this order; the raw component lists stay out of the JSON.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub p: usize,
    pub n: u32,
    pub k: usize,
    pub q: usize,
    pub connected: bool,
    pub a: u32,
    pub k_prime: usize,
    pub component_count: usize,
    pub theta_index: usize,
    pub modulus_coeffs: Vec<usize>,
    #[serde(skip)]
    pub components: Vec<Vec<usize>>,
}

impl ComponentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Packed per-vertex adjacency rows.
pub struct NeighborBitsets {
    words: usize,
    rows: Vec<u64>,
}

impl NeighborBitsets {
    /// |N(u) ∩ N(v)|.
    pub fn common_degree(&self, u: usize, v: usize) -> usize {
        let ru = &self.rows[u * self.words..(u + 1) * self.words];
        let rv = &self.rows[v * self.words..(v + 1) * self.words];
        ru.iter()
            .zip(rv)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}

fn exact_log(p: usize, m: usize) -> Option<u32> {
    let mut acc = 1usize;
    let mut e = 0u32;
    while acc < m {
        acc = acc.checked_mul(p)?;
        e += 1;
    }
    if acc == m {
        Some(e)
    } else {
        None
    }
}
