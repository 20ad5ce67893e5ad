//! Lagrangian 1-tree lower bound on the length of a tour (Held and Karp,
//! with the multiplier update of Volgenant and Jonker).
//!
//! A route `source -> customers -> sink` is turned into a tour by adding the
//! edge `(sink, source)` at cost zero and forcing it into every 1-tree, so
//! tours of the sub-instance and routes over the node set have equal cost.

use crate::model::Instance;

/// Symmetric cost matrix with a special node `0`. Missing edges cost `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubInstance {
    pub cost: Vec<Vec<f64>>,
    /// Edge `(0, f)` that every 1-tree and every tour must contain.
    pub fixed: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneTree {
    /// Penalized tree cost minus `2 * sum(pi)`.
    pub value: f64,
    pub degrees: Vec<usize>,
}

impl OneTree {
    pub fn is_tour(&self) -> bool {
        self.value.is_finite() && self.degrees.iter().all(|&d| d == 2)
    }
}

impl SubInstance {
    pub fn uniform(nodes: usize, cost: f64) -> Self {
        let mut matrix = vec![vec![cost; nodes]; nodes];
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        SubInstance {
            cost: matrix,
            fixed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.cost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cost.is_empty()
    }

    /// Sub-instance for a route visiting exactly `customers`.
    ///
    /// Node 0 is the source, node 1 the sink, then the customers in order.
    /// Customer edges use the cheaper allowed direction plus half of each
    /// service time. Depot edges use `from_source` / `to_sink`, which must be
    /// lower bounds on the travel time between the depots and each customer
    /// over any path.
    pub fn for_route(
        instance: &Instance,
        customers: &[usize],
        from_source: &[f64],
        to_sink: &[f64],
    ) -> Self {
        let size = customers.len() + 2;
        let mut cost = vec![vec![f64::INFINITY; size]; size];
        cost[0][1] = 0.0;
        cost[1][0] = 0.0;
        for (a, &k) in customers.iter().enumerate() {
            let half = instance.s(k) / 2.0;
            cost[0][a + 2] = from_source[k] + half;
            cost[a + 2][0] = cost[0][a + 2];
            cost[1][a + 2] = to_sink[k] + half;
            cost[a + 2][1] = cost[1][a + 2];
            for (b, &l) in customers.iter().enumerate().skip(a + 1) {
                let mut best = f64::INFINITY;
                if instance.arc_allowed(k, l) {
                    best = best.min(instance.t(k, l));
                }
                if instance.arc_allowed(l, k) {
                    best = best.min(instance.t(l, k));
                }
                let c = best + half + instance.s(l) / 2.0;
                cost[a + 2][b + 2] = c;
                cost[b + 2][a + 2] = c;
            }
        }
        for (i, row) in cost.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        SubInstance {
            cost,
            fixed: Some(1),
        }
    }

    /// True when the nodes other than 0 and the fixed partner are connected
    /// by finite edges among themselves.
    fn inner_connected(&self) -> bool {
        let inner: Vec<usize> = (1..self.len()).filter(|&v| Some(v) != self.fixed).collect();
        let Some(&first) = inner.first() else {
            return true;
        };
        let mut seen = vec![false; self.len()];
        let mut stack = vec![first];
        seen[first] = true;
        while let Some(v) = stack.pop() {
            for &w in &inner {
                if !seen[w] && self.cost[v][w].is_finite() {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        inner.iter().all(|&v| seen[v])
    }
}

/// Minimum 1-tree under penalties `pi`.
pub fn one_tree(sub: &SubInstance, pi: &[f64]) -> OneTree {
    let size = sub.len();
    let mut degrees = vec![0usize; size];
    match size {
        0 => {
            return OneTree {
                value: 0.0,
                degrees,
            }
        }
        1 => {
            return OneTree {
                value: 0.0,
                degrees: vec![2],
            }
        }
        2 => {
            return OneTree {
                value: 2.0 * sub.cost[0][1],
                degrees: vec![2, 2],
            }
        }
        _ => {}
    }
    let penalized = |i: usize, j: usize| sub.cost[i][j] + pi[i] + pi[j];

    // Prim over nodes 1..size
    let mut in_tree = vec![false; size];
    let mut best = vec![f64::INFINITY; size];
    let mut parent = vec![usize::MAX; size];
    let mut total = 0.0;
    best[1] = 0.0;
    for _ in 1..size {
        let mut pick = usize::MAX;
        for v in 1..size {
            if !in_tree[v] && (pick == usize::MAX || best[v] < best[pick]) {
                pick = v;
            }
        }
        if !best[pick].is_finite() {
            return OneTree {
                value: f64::INFINITY,
                degrees,
            };
        }
        in_tree[pick] = true;
        total += best[pick];
        if parent[pick] != usize::MAX {
            degrees[pick] += 1;
            degrees[parent[pick]] += 1;
        }
        for v in 1..size {
            if !in_tree[v] {
                let c = penalized(pick, v);
                if c < best[v] {
                    best[v] = c;
                    parent[v] = pick;
                }
            }
        }
    }

    // two edges at node 0
    let mut chosen = Vec::with_capacity(2);
    if let Some(f) = sub.fixed {
        chosen.push(f);
    }
    while chosen.len() < 2 {
        let next = (1..size)
            .filter(|v| !chosen.contains(v))
            .min_by(|&a, &b| penalized(0, a).total_cmp(&penalized(0, b)));
        match next {
            Some(v) if penalized(0, v).is_finite() => chosen.push(v),
            _ => {
                return OneTree {
                    value: f64::INFINITY,
                    degrees,
                }
            }
        }
    }
    for &v in &chosen {
        total += penalized(0, v);
        degrees[0] += 1;
        degrees[v] += 1;
    }
    let value = total - 2.0 * pi.iter().sum::<f64>();
    OneTree { value, degrees }
}

/// Greedy tour from node 0; the fixed edge, if any, closes the tour.
fn nearest_neighbor_tour(sub: &SubInstance) -> f64 {
    let size = sub.len();
    let mut visited = vec![false; size];
    visited[0] = true;
    if let Some(f) = sub.fixed {
        visited[f] = true;
    }
    let mut at = 0;
    let mut total = 0.0;
    loop {
        let next = (0..size)
            .filter(|&v| !visited[v])
            .min_by(|&a, &b| sub.cost[at][a].total_cmp(&sub.cost[at][b]));
        let Some(v) = next else { break };
        total += sub.cost[at][v];
        visited[v] = true;
        at = v;
    }
    match sub.fixed {
        Some(f) => total + sub.cost[at][f] + sub.cost[f][0],
        None => total + sub.cost[at][0],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    /// The best 1-tree was a tour, so `value` is the optimum.
    pub tour_found: bool,
    pub iterations: usize,
}

pub const DEFAULT_ITERATIONS: usize = 50;

/// Best Lagrangian 1-tree value found by subgradient ascent.
pub fn helsgaun_lower_bound(sub: &SubInstance, budget: usize) -> LowerBound {
    let size = sub.len();
    let infinite = LowerBound {
        value: f64::INFINITY,
        tour_found: false,
        iterations: 0,
    };
    if sub.fixed.is_some() && !sub.inner_connected() {
        return infinite;
    }
    let mut pi = vec![0.0; size];
    let first = one_tree(sub, &pi);
    if !first.value.is_finite() {
        return infinite;
    }
    if size < 3 || first.is_tour() {
        return LowerBound {
            value: first.value,
            tour_found: true,
            iterations: 1,
        };
    }
    let mut upper = nearest_neighbor_tour(sub);
    if !upper.is_finite() {
        upper = first.value.abs().max(1.0) * 2.0;
    }
    let mut step = upper / (2.0 * size as f64);
    let mut best = LowerBound {
        value: first.value,
        tour_found: false,
        iterations: 1,
    };
    let mut previous = first.degrees.clone();
    let mut tree = first;
    let mut stale = 0;
    for it in 1..budget.max(1) {
        let direction: Vec<f64> = (0..size)
            .map(|v| 0.7 * (tree.degrees[v] as f64 - 2.0) + 0.3 * (previous[v] as f64 - 2.0))
            .collect();
        if step <= 0.0 || direction.iter().all(|&d| d == 0.0) {
            break;
        }
        for v in 1..size {
            pi[v] += step * direction[v];
        }
        previous = std::mem::replace(&mut tree, one_tree(sub, &pi)).degrees;
        best.iterations = it + 1;
        if tree.value > best.value {
            best.value = tree.value;
            stale = 0;
        } else {
            stale += 1;
            if stale == 10 {
                step /= 2.0;
                stale = 0;
            }
        }
        if tree.is_tour() {
            best.value = best.value.max(tree.value);
            best.tour_found = true;
            break;
        }
    }
    best
}
