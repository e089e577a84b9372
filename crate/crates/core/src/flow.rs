//! Exact integer minimum-cost transportation on a dense bipartite instance:
//! successive shortest augmenting paths under Johnson potentials, with a
//! bucket-queue Dijkstra since reduced path lengths stay small for metric
//! costs. Everything is integer arithmetic; the result is exact.
//!
//! A brute-force enumerator over all integer flows doubles as the reference
//! the solver is tested against on tiny instances.

/// Minimum total cost of a feasible flow shipping `supply` to `demand` over
/// the complete bipartite graph with the given row-major cost matrix.
///
/// Requires nonnegative entries, matching totals, and
/// `cost.len() == supply.len() * demand.len()`. Cost entries apply per unit.
pub fn min_cost_transport(supply: &[i64], demand: &[i64], cost: &[i64]) -> i128 {
    let ns = supply.len();
    let nt = demand.len();
    assert_eq!(cost.len(), ns * nt, "cost matrix shape mismatch");
    assert!(
        supply.iter().chain(demand).all(|&v| v >= 0),
        "masses must be nonnegative"
    );
    assert!(cost.iter().all(|&c| c >= 0), "costs must be nonnegative");
    let total: i128 = supply.iter().map(|&v| v as i128).sum();
    let total_d: i128 = demand.iter().map(|&v| v as i128).sum();
    assert_eq!(total, total_d, "supply and demand must balance");
    if total == 0 {
        return 0;
    }
    // The flow polytope scales linearly with the masses, so dividing every
    // mass by the common gcd and multiplying the optimum back is exact. For
    // uniform masses this turns the solve into an assignment problem with
    // one saturating augmentation per source.
    let g = supply
        .iter()
        .chain(demand)
        .fold(0i64, |acc, &v| gcd64(acc, v));
    debug_assert!(g >= 1);
    if g > 1 {
        let s: Vec<i64> = supply.iter().map(|&v| v / g).collect();
        let d: Vec<i64> = demand.iter().map(|&v| v / g).collect();
        return solve(&s, &d, cost, ns, nt) * g as i128;
    }
    solve(supply, demand, cost, ns, nt)
}

fn solve(supply: &[i64], demand: &[i64], cost: &[i64], ns: usize, nt: usize) -> i128 {
    let mut s = supply.to_vec();
    let mut d = demand.to_vec();
    let mut remaining: i128 = s.iter().map(|&v| v as i128).sum();
    let mut flow = vec![0i64; ns * nt];
    // potentials keep every residual reduced cost nonnegative
    let mut pu = vec![0i64; ns];
    let mut pv = vec![0i64; nt];
    let node_count = ns + nt;
    let mut dist = vec![i64::MAX; node_count];
    let mut parent = vec![usize::MAX; node_count];
    while remaining > 0 {
        dist.fill(i64::MAX);
        parent.fill(usize::MAX);
        let mut pq = BucketQueue::new();
        for (i, &si) in s.iter().enumerate() {
            if si > 0 {
                dist[i] = 0;
                pq.push(0, i as u32);
            }
        }
        let mut target = usize::MAX;
        'dijkstra: while let Some(node) = pq.pop_min(&dist) {
            let u = node as usize;
            if u >= ns {
                let j = u - ns;
                if d[j] > 0 {
                    target = j;
                    break 'dijkstra;
                }
                // backward arcs j -> i exist where flow is positive; they sit
                // at reduced cost (pv[j] - pu[i] - c_ij), zero on flow arcs
                for i in 0..ns {
                    if flow[i * nt + j] > 0 {
                        let rc = pv[j] - pu[i] - cost[i * nt + j];
                        debug_assert!(rc >= 0);
                        let cand = dist[u] + rc;
                        if cand < dist[i] {
                            dist[i] = cand;
                            parent[i] = u;
                            pq.push(cand as usize, i as u32);
                        }
                    }
                }
            } else {
                let i = u;
                let row = &cost[i * nt..(i + 1) * nt];
                for (j, &c) in row.iter().enumerate() {
                    let rc = c + pu[i] - pv[j];
                    debug_assert!(rc >= 0);
                    let cand = dist[u] + rc;
                    let v = ns + j;
                    if cand < dist[v] {
                        dist[v] = cand;
                        parent[v] = u;
                        pq.push(cand as usize, v as u32);
                    }
                }
            }
        }
        assert!(target != usize::MAX, "balanced instance must stay feasible");
        let dist_target = dist[ns + target];
        for (i, p) in pu.iter_mut().enumerate() {
            *p += dist[i].min(dist_target);
        }
        for (j, p) in pv.iter_mut().enumerate() {
            *p += dist[ns + j].min(dist_target);
        }
        // walk the path back to a seeded source, tracking the bottleneck
        let mut delta = d[target];
        let mut v = ns + target;
        loop {
            let u = parent[v];
            if v >= ns {
                // arrived through a forward arc u -> v
                if parent[u] == usize::MAX {
                    delta = delta.min(s[u]);
                    break;
                }
            } else {
                // arrived through a backward arc (sink u) -> (source v)
                delta = delta.min(flow[v * nt + (u - ns)]);
            }
            v = u;
        }
        debug_assert!(delta > 0);
        let mut v = ns + target;
        loop {
            let u = parent[v];
            if v >= ns {
                flow[u * nt + (v - ns)] += delta;
                if parent[u] == usize::MAX {
                    s[u] -= delta;
                    break;
                }
            } else {
                flow[v * nt + (u - ns)] -= delta;
            }
            v = u;
        }
        d[target] -= delta;
        remaining -= delta as i128;
    }
    flow.iter()
        .zip(cost)
        .map(|(&f, &c)| f as i128 * c as i128)
        .sum()
}

/// Monotone integer priority queue keyed by distance. Entries whose recorded
/// distance no longer matches are stale and skipped on pop.
struct BucketQueue {
    buckets: Vec<Vec<u32>>,
    cur: usize,
}

impl BucketQueue {
    fn new() -> Self {
        BucketQueue {
            buckets: Vec::new(),
            cur: 0,
        }
    }

    fn push(&mut self, key: usize, node: u32) {
        if key >= self.buckets.len() {
            self.buckets.resize_with(key + 1, Vec::new);
        }
        self.buckets[key].push(node);
    }

    fn pop_min(&mut self, dist: &[i64]) -> Option<u32> {
        while self.cur < self.buckets.len() {
            match self.buckets[self.cur].pop() {
                Some(node) if dist[node as usize] == self.cur as i64 => return Some(node),
                Some(_) => {}
                None => self.cur += 1,
            }
        }
        None
    }
}

fn gcd64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Reference optimum by exhaustive enumeration of all integer flows. Only for
/// tiny instances; used to validate the solver.
pub fn brute_force_transport(supply: &[i64], demand: &[i64], cost: &[i64]) -> i128 {
    let ns = supply.len();
    let nt = demand.len();
    assert_eq!(cost.len(), ns * nt);
    let mut s = supply.to_vec();
    let mut d = demand.to_vec();
    let mut best = i128::MAX;
    enumerate(0, 0, &mut s, &mut d, cost, nt, &mut best);
    assert!(best != i128::MAX, "balanced instance must be feasible");
    best
}

fn enumerate(
    cell: usize,
    acc: i128,
    s: &mut [i64],
    d: &mut [i64],
    cost: &[i64],
    nt: usize,
    best: &mut i128,
) {
    if acc >= *best {
        return;
    }
    if cell == s.len() * nt {
        if d.iter().all(|&v| v == 0) {
            *best = acc;
        }
        return;
    }
    let (i, j) = (cell / nt, cell % nt);
    if j == nt - 1 {
        // last column: the remaining row supply is forced
        let f = s[i];
        if f <= d[j] {
            s[i] = 0;
            d[j] -= f;
            enumerate(
                cell + 1,
                acc + f as i128 * cost[cell] as i128,
                s,
                d,
                cost,
                nt,
                best,
            );
            s[i] = f;
            d[j] += f;
        }
        return;
    }
    let cap = s[i].min(d[j]);
    for f in 0..=cap {
        s[i] -= f;
        d[j] -= f;
        enumerate(
            cell + 1,
            acc + f as i128 * cost[cell] as i128,
            s,
            d,
            cost,
            nt,
            best,
        );
        s[i] += f;
        d[j] += f;
    }
}
