//! Minimal adjacency abstraction shared by the matching and curvature layers,
//! so the curvature oracle can be exercised on reference graphs that are not
//! Paley graphs.

use std::collections::VecDeque;

pub trait SimpleGraph {
    /// Number of vertices; vertex ids are 0..order().
    fn order(&self) -> usize;

    fn is_edge(&self, u: usize, v: usize) -> bool;

    /// Neighbor list, sorted ascending.
    fn neighbors(&self, v: usize) -> Vec<usize>;

    fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    /// Shortest-path distance in edge count; None when unreachable. The
    /// default is a plain BFS from u.
    fn distance(&self, u: usize, v: usize) -> Option<usize> {
        if u == v {
            return Some(0);
        }
        let mut dist = vec![usize::MAX; self.order()];
        dist[u] = 0;
        let mut queue = VecDeque::from([u]);
        while let Some(w) = queue.pop_front() {
            for nb in self.neighbors(w) {
                if dist[nb] == usize::MAX {
                    dist[nb] = dist[w] + 1;
                    if nb == v {
                        return Some(dist[nb]);
                    }
                    queue.push_back(nb);
                }
            }
        }
        None
    }
}

/// Complete graph K_n; the calibration instance for the curvature oracle.
#[derive(Debug, Clone, Copy)]
pub struct CompleteGraph {
    pub n: usize,
}

impl SimpleGraph for CompleteGraph {
    fn order(&self) -> usize {
        self.n
    }

    fn is_edge(&self, u: usize, v: usize) -> bool {
        u != v && u < self.n && v < self.n
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| u != v).collect()
    }

    fn degree(&self, _v: usize) -> usize {
        self.n - 1
    }

    fn distance(&self, u: usize, v: usize) -> Option<usize> {
        if u == v {
            Some(0)
        } else {
            Some(1)
        }
    }
}

/// Arbitrary graph over explicit adjacency lists; test double for the
/// curvature and matching routines.
#[derive(Debug, Clone)]
pub struct AdjacencyGraph {
    adj: Vec<Vec<usize>>,
}

impl AdjacencyGraph {
    /// Builds from an undirected edge list on vertices 0..order.
    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); order];
        for &(u, v) in edges {
            assert!(u != v && u < order && v < order, "bad edge ({u}, {v})");
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        AdjacencyGraph { adj }
    }
}

impl SimpleGraph for AdjacencyGraph {
    fn order(&self) -> usize {
        self.adj.len()
    }

    fn is_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u].binary_search(&v).is_ok()
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        self.adj[v].clone()
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }
}
