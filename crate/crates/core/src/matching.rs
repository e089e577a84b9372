//! Matchings between the private neighborhoods of an edge.
//!
//! For the canonical edge (0, 1) of a connected P(q, k) whose connection set
//! contains every unit of F_p, the private neighborhoods split into cells
//! keyed by the element coordinates above the constant digit. Within a cell
//! all members differ by prime-subfield constants, so pairing the two sides
//! of each cell in sorted order yields a perfect matching by construction.
//! An augmenting-path maximum matching is implemented independently as the
//! oracle these certificates are checked against.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::graph::SimpleGraph;
use crate::paley_graph::PaleyGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("({x}, {y}) is not an edge")]
    NotAnEdge { x: usize, y: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("prime fields have no sorting cells (n = 1)")]
    DegenerateN1,
    #[error("graph is disconnected; sort the reduced component graph instead")]
    NotConnected,
    #[error("cell {tail:?} is unbalanced: {left} left vs {right} right")]
    UnbalancedCell {
        tail: Vec<usize>,
        left: usize,
        right: usize,
    },
}

/// The three zones around an edge (x, y): private neighbors of each endpoint
/// and the common neighborhood. All lists sorted ascending; the endpoints
/// themselves appear in none of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeNeighborhood {
    pub x: usize,
    pub y: usize,
    pub exclusive_x: Vec<usize>,
    pub exclusive_y: Vec<usize>,
    pub common: Vec<usize>,
}

pub fn edge_neighborhood<G: SimpleGraph>(
    g: &G,
    x: usize,
    y: usize,
) -> Result<EdgeNeighborhood, MatchingError> {
    if !g.is_edge(x, y) {
        return Err(MatchingError::NotAnEdge { x, y });
    }
    let nx = g.neighbors(x);
    let ny = g.neighbors(y);
    let common: Vec<usize> = nx
        .iter()
        .copied()
        .filter(|u| ny.binary_search(u).is_ok())
        .collect();
    let exclusive = |own: &[usize], other_end: usize| {
        own.iter()
            .copied()
            .filter(|&u| u != other_end && common.binary_search(&u).is_err())
            .collect::<Vec<usize>>()
    };
    Ok(EdgeNeighborhood {
        x,
        y,
        exclusive_x: exclusive(&nx, y),
        exclusive_y: exclusive(&ny, x),
        common,
    })
}

/// One cell of the sorted decomposition: the private neighbors on each side
/// whose coordinate tail (digits above the constant) equals `tail`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortCell {
    pub tail: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Splits the private neighborhoods of the canonical edge (0, 1) into cells
/// by coordinate tail. Tails run over all nonzero values, ascending by their
/// packed index, so some cells may be empty on both sides.
///
/// Requires n >= 2 and that every unit of F_p is a k-th power; the latter
/// confines the prime subfield to {0, 1} and the common neighborhood, which
/// is what guarantees every private neighbor has a nonzero tail.
pub fn sort_cells(g: &PaleyGraph) -> Result<Vec<SortCell>, MatchingError> {
    let f = g.field();
    let (p, n) = (f.p(), f.n());
    if n == 1 {
        return Err(MatchingError::DegenerateN1);
    }
    if !f.prime_subfield_in_kpowers(g.k()).unwrap_or(false) {
        return Err(MatchingError::PreconditionViolated(
            "every unit of the prime subfield must be a k-th power",
        ));
    }
    let nb = edge_neighborhood(g, 0, 1)?;
    let tail_count = p.pow(n - 1) - 1;
    let mut cells: Vec<SortCell> = (1..=tail_count)
        .map(|t| {
            let mut digits = Vec::with_capacity(n as usize - 1);
            let mut rest = t;
            for _ in 0..n - 1 {
                digits.push(rest % p);
                rest /= p;
            }
            SortCell {
                tail: digits,
                left: Vec::new(),
                right: Vec::new(),
            }
        })
        .collect();
    for &u in &nb.exclusive_x {
        if u < p {
            return Err(MatchingError::PreconditionViolated(
                "a prime-subfield vertex escaped the common neighborhood",
            ));
        }
        cells[u / p - 1].left.push(u);
    }
    for &v in &nb.exclusive_y {
        if v < p {
            return Err(MatchingError::PreconditionViolated(
                "a prime-subfield vertex escaped the common neighborhood",
            ));
        }
        cells[v / p - 1].right.push(v);
    }
    Ok(cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchingMethod {
    Sorting,
    Augmenting,
}

impl MatchingMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            MatchingMethod::Sorting => "sorting",
            MatchingMethod::Augmenting => "augmenting",
        }
    }
}

/// A matching between the private neighborhoods of edge (x, y); pairs list
/// (left vertex, right vertex).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub x: usize,
    pub y: usize,
    pub pairs: Vec<(usize, usize)>,
    pub method: MatchingMethod,
}

#[derive(Serialize)]
struct MatchingJson {
    edge: [usize; 2],
    pairs: Vec<[usize; 2]>,
    method: &'static str,
}

impl Matching {
    pub fn to_json(&self) -> String {
        let doc = MatchingJson {
            edge: [self.x, self.y],
            pairs: self.pairs.iter().map(|&(u, v)| [u, v]).collect(),
            method: self.method.as_str(),
        };
        serde_json::to_string(&doc).expect("matching serialization cannot fail")
    }
}

/// Perfect matching between the private neighborhoods of (0, 1) by pairing
/// each cell's sides in sorted order.
///
/// Empty private neighborhoods (complete graphs, or graphs whose components
/// are complete) short-circuit to the empty matching before any structural
/// requirement is checked. Otherwise the graph must be connected; sorting a
/// disconnected graph is done on its reduced component graph.
pub fn perfect_matching_via_sorting(g: &PaleyGraph) -> Result<Matching, MatchingError> {
    let nb = edge_neighborhood(g, 0, 1)?;
    if nb.exclusive_x.is_empty() && nb.exclusive_y.is_empty() {
        return Ok(Matching {
            x: 0,
            y: 1,
            pairs: Vec::new(),
            method: MatchingMethod::Sorting,
        });
    }
    if g.field().n() == 1 {
        return Err(MatchingError::DegenerateN1);
    }
    if !g.is_connected() {
        return Err(MatchingError::NotConnected);
    }
    let cells = sort_cells(g)?;
    let mut pairs = Vec::with_capacity(nb.exclusive_x.len());
    for cell in &cells {
        if cell.left.len() != cell.right.len() {
            return Err(MatchingError::UnbalancedCell {
                tail: cell.tail.clone(),
                left: cell.left.len(),
                right: cell.right.len(),
            });
        }
        pairs.extend(cell.left.iter().copied().zip(cell.right.iter().copied()));
    }
    pairs.sort_unstable();
    Ok(Matching {
        x: 0,
        y: 1,
        pairs,
        method: MatchingMethod::Sorting,
    })
}

/// Pushes a matching for the canonical edge onto an arbitrary edge (x, y)
/// through the affine map t -> (y - x) t + x, which sends 0 to x and 1 to y
/// and preserves adjacency.
pub fn transport_matching(
    g: &PaleyGraph,
    m: &Matching,
    x: usize,
    y: usize,
) -> Result<Matching, MatchingError> {
    if m.x != 0 || m.y != 1 {
        return Err(MatchingError::PreconditionViolated(
            "transport starts from a matching for the canonical edge (0, 1)",
        ));
    }
    if !g.is_edge(x, y) {
        return Err(MatchingError::NotAnEdge { x, y });
    }
    let f = g.field();
    let slope = f.sub(y, x);
    let phi = |t: usize| f.add(f.mul(slope, t), x);
    let mut pairs: Vec<(usize, usize)> = m.pairs.iter().map(|&(u, v)| (phi(u), phi(v))).collect();
    pairs.sort_unstable();
    Ok(Matching {
        x,
        y,
        pairs,
        method: m.method,
    })
}

/// Maximum matching between the private neighborhoods of (x, y), found by
/// layered augmenting paths. Independent of the sorting construction; used
/// as the oracle its certificates are compared against.
pub fn maximum_matching<G: SimpleGraph>(
    g: &G,
    x: usize,
    y: usize,
) -> Result<Matching, MatchingError> {
    let nb = edge_neighborhood(g, x, y)?;
    let left = &nb.exclusive_x;
    let right = &nb.exclusive_y;
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&u| {
            right
                .iter()
                .enumerate()
                .filter(|&(_, &v)| g.is_edge(u, v))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let match_left = hopcroft_karp(&adj, right.len());
    let mut pairs: Vec<(usize, usize)> = match_left
        .iter()
        .enumerate()
        .filter_map(|(i, &mj)| mj.map(|j| (left[i], right[j])))
        .collect();
    pairs.sort_unstable();
    Ok(Matching {
        x,
        y,
        pairs,
        method: MatchingMethod::Augmenting,
    })
}

pub fn max_matching_size<G: SimpleGraph>(g: &G, x: usize, y: usize) -> Result<usize, MatchingError> {
    Ok(maximum_matching(g, x, y)?.pairs.len())
}

/// Checks that a matching is a valid perfect matching for the given edge
/// zones: it covers each private side exactly once and uses only edges.
pub fn check_perfect_matching<G: SimpleGraph>(
    g: &G,
    nb: &EdgeNeighborhood,
    m: &Matching,
) -> Result<(), String> {
    if m.x != nb.x || m.y != nb.y {
        return Err("matching is for a different edge".into());
    }
    let mut lefts: Vec<usize> = m.pairs.iter().map(|&(u, _)| u).collect();
    let mut rights: Vec<usize> = m.pairs.iter().map(|&(_, v)| v).collect();
    lefts.sort_unstable();
    rights.sort_unstable();
    if lefts != nb.exclusive_x {
        return Err("left side does not cover the private neighbors of x exactly once".into());
    }
    if rights != nb.exclusive_y {
        return Err("right side does not cover the private neighbors of y exactly once".into());
    }
    for &(u, v) in &m.pairs {
        if !g.is_edge(u, v) {
            return Err(format!("matched pair ({u}, {v}) is not an edge"));
        }
    }
    Ok(())
}

fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    let n_left = adj.len();
    let mut match_left: Vec<Option<usize>> = vec![None; n_left];
    let mut match_right: Vec<Option<usize>> = vec![None; n_right];
    loop {
        let mut layer = vec![usize::MAX; n_left];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for u in 0..n_left {
            if match_left[u].is_none() {
                layer[u] = 0;
                queue.push_back(u);
            }
        }
        let mut reachable_free_right = false;
        while let Some(u) = queue.pop_front() {
            for &j in &adj[u] {
                match match_right[j] {
                    None => reachable_free_right = true,
                    Some(u2) => {
                        if layer[u2] == usize::MAX {
                            layer[u2] = layer[u] + 1;
                            queue.push_back(u2);
                        }
                    }
                }
            }
        }
        if !reachable_free_right {
            return match_left;
        }
        for u in 0..n_left {
            if match_left[u].is_none() && layer[u] == 0 {
                augment(u, adj, &mut match_left, &mut match_right, &mut layer);
            }
        }
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_left: &mut [Option<usize>],
    match_right: &mut [Option<usize>],
    layer: &mut [usize],
) -> bool {
    for &j in &adj[u] {
        match match_right[j] {
            None => {
                match_right[j] = Some(u);
                match_left[u] = Some(j);
                return true;
            }
            Some(u2) => {
                if layer[u2] == layer[u] + 1
                    && augment(u2, adj, match_left, match_right, layer)
                {
                    match_right[j] = Some(u);
                    match_left[u] = Some(j);
                    return true;
                }
            }
        }
    }
    // dead end for this phase
    layer[u] = usize::MAX;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::build_field;
    use crate::graph::AdjacencyGraph;
    use crate::paley_graph::build_graph;
    use std::sync::Arc;

    fn graph(p: usize, n: u32, k: usize) -> PaleyGraph {
        build_graph(Arc::new(build_field(p, n).unwrap()), k).unwrap()
    }

    #[test]
    fn zones_of_the_canonical_edge_in_p9_2() {
        let g = graph(3, 2, 2);
        let nb = edge_neighborhood(&g, 0, 1).unwrap();
        assert_eq!(nb.exclusive_x, vec![3, 6]);
        assert_eq!(nb.exclusive_y, vec![4, 7]);
        assert_eq!(nb.common, vec![2]);
    }

    #[test]
    fn zones_partition_the_neighborhoods() {
        for (p, n, k) in [(3usize, 2u32, 2usize), (5, 2, 2), (5, 2, 3), (13, 1, 2)] {
            let g = graph(p, n, k);
            let nb = edge_neighborhood(&g, 0, 1).unwrap();
            let mut rebuilt = nb.exclusive_x.clone();
            rebuilt.extend(&nb.common);
            rebuilt.push(1);
            rebuilt.sort_unstable();
            assert_eq!(rebuilt, g.neighbors(0));
            let mut rebuilt = nb.exclusive_y.clone();
            rebuilt.extend(&nb.common);
            rebuilt.push(0);
            rebuilt.sort_unstable();
            assert_eq!(rebuilt, g.neighbors(1));
        }
    }

    #[test]
    fn not_an_edge_is_reported() {
        let g = graph(3, 2, 2);
        assert_eq!(
            edge_neighborhood(&g, 0, 4).unwrap_err(),
            MatchingError::NotAnEdge { x: 0, y: 4 }
        );
        assert!(matches!(
            transport_matching(
                &g,
                &perfect_matching_via_sorting(&g).unwrap(),
                0,
                4
            ),
            Err(MatchingError::NotAnEdge { .. })
        ));
    }

    #[test]
    fn cells_of_p9_2_are_balanced_singletons() {
        let g = graph(3, 2, 2);
        let cells = sort_cells(&g).unwrap();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].tail, vec![1]);
        assert_eq!(cells[0].left, vec![3]);
        assert_eq!(cells[0].right, vec![4]);
        assert_eq!(cells[1].tail, vec![2]);
        assert_eq!(cells[1].left, vec![6]);
        assert_eq!(cells[1].right, vec![7]);
    }

    #[test]
    fn cell_members_share_their_tail() {
        let g = graph(5, 2, 2);
        let f = g.field();
        for cell in sort_cells(&g).unwrap() {
            for &u in cell.left.iter().chain(&cell.right) {
                assert_eq!(f.coeffs(u)[1..].to_vec(), cell.tail);
            }
        }
    }

    #[test]
    fn sorting_matches_p9_2_by_hand() {
        let g = graph(3, 2, 2);
        let m = perfect_matching_via_sorting(&g).unwrap();
        assert_eq!(m.pairs, vec![(3, 4), (6, 7)]);
        assert_eq!(m.method, MatchingMethod::Sorting);
        let nb = edge_neighborhood(&g, 0, 1).unwrap();
        check_perfect_matching(&g, &nb, &m).unwrap();
        assert_eq!(max_matching_size(&g, 0, 1).unwrap(), 2);
    }

    #[test]
    fn sorted_matching_is_perfect_and_maximal_on_larger_instances() {
        for (p, n, k) in [(5usize, 2u32, 2usize), (5, 2, 3), (7, 2, 2), (3, 4, 2), (3, 4, 4), (3, 4, 5)] {
            let g = graph(p, n, k);
            let m = perfect_matching_via_sorting(&g).unwrap();
            let nb = edge_neighborhood(&g, 0, 1).unwrap();
            check_perfect_matching(&g, &nb, &m).unwrap();
            assert_eq!(
                m.pairs.len(),
                max_matching_size(&g, 0, 1).unwrap(),
                "({p},{n},{k})"
            );
        }
    }

    #[test]
    fn transport_preserves_validity() {
        let g = graph(5, 2, 2);
        let m = perfect_matching_via_sorting(&g).unwrap();
        for (x, s) in [(3usize, 0usize), (17, 1), (8, 3)] {
            let y = g.field().add(x, g.connection()[s]);
            let t = transport_matching(&g, &m, x, y).unwrap();
            let nb = edge_neighborhood(&g, x, y).unwrap();
            check_perfect_matching(&g, &nb, &t).unwrap();
        }
    }

    #[test]
    fn complete_graph_matching_is_empty() {
        let g = graph(13, 1, 1);
        let m = perfect_matching_via_sorting(&g).unwrap();
        assert!(m.pairs.is_empty());
        assert_eq!(max_matching_size(&g, 0, 1).unwrap(), 0);
    }

    #[test]
    fn complete_components_short_circuit_to_empty() {
        // P(9, 4) splits into triangles, so both private sides are empty
        let g = graph(3, 2, 4);
        let m = perfect_matching_via_sorting(&g).unwrap();
        assert!(m.pairs.is_empty());
    }

    #[test]
    fn prime_field_sorting_is_degenerate() {
        let g = graph(13, 1, 2);
        assert_eq!(
            perfect_matching_via_sorting(&g).unwrap_err(),
            MatchingError::DegenerateN1
        );
        assert_eq!(sort_cells(&g).unwrap_err(), MatchingError::DegenerateN1);
    }

    #[test]
    fn disconnected_non_complete_graph_is_rejected() {
        // P(81, 20) splits into copies of P(9, 2): private sides are nonempty
        // but sorting must be done per component
        let g = graph(3, 4, 20);
        assert_eq!(
            perfect_matching_via_sorting(&g).unwrap_err(),
            MatchingError::NotConnected
        );
    }

    #[test]
    fn missing_containment_is_rejected() {
        // P(25, 4): (q-1)/(p-1) = 6 is not divisible by 4
        let g = graph(5, 2, 4);
        assert!(!g.field().prime_subfield_in_kpowers(4).unwrap());
        assert_eq!(
            sort_cells(&g).unwrap_err(),
            MatchingError::PreconditionViolated(
                "every unit of the prime subfield must be a k-th power"
            )
        );
    }

    #[test]
    fn augmenting_oracle_on_a_known_bipartite_instance() {
        // path 2-0-1-3 plus 4-5: private sides of edge (0,1) are {2} and {3},
        // and 2-3 is absent, so the maximum matching is empty
        let g = AdjacencyGraph::from_edges(6, &[(0, 1), (0, 2), (1, 3), (4, 5)]);
        assert_eq!(max_matching_size(&g, 0, 1).unwrap(), 0);
        // add the cross edge and the matching becomes perfect
        let g = AdjacencyGraph::from_edges(6, &[(0, 1), (0, 2), (1, 3), (2, 3), (4, 5)]);
        let m = maximum_matching(&g, 0, 1).unwrap();
        assert_eq!(m.pairs, vec![(2, 3)]);
        assert_eq!(m.method, MatchingMethod::Augmenting);
    }

    #[test]
    fn hopcroft_karp_handles_skewed_sides() {
        // left {2,3,4} all adjacent only to right {5}: maximum is 1
        let g = AdjacencyGraph::from_edges(
            6,
            &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (2, 5), (3, 5), (4, 5)],
        );
        assert_eq!(max_matching_size(&g, 0, 1).unwrap(), 1);
    }

    #[test]
    fn matching_json_shape() {
        let g = graph(3, 2, 2);
        let m = perfect_matching_via_sorting(&g).unwrap();
        assert_eq!(
            m.to_json(),
            "{\"edge\":[0,1],\"pairs\":[[3,4],[6,7]],\"method\":\"sorting\"}"
        );
    }
}
