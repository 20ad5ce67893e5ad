use std::collections::VecDeque;

use crate::formulation::{CutFamily, Term};
use crate::separation::{Cut, SupportGraph};

/// Edmonds-Karp on a dense capacity matrix. Returns the flow value and the
/// nodes reachable from `s` in the final residual graph.
pub fn max_flow(capacity: &[Vec<f64>], s: usize, t: usize) -> (f64, Vec<bool>) {
    let n = capacity.len();
    let mut residual = capacity.to_vec();
    let mut total = 0.0;
    loop {
        let mut parent = vec![usize::MAX; n];
        parent[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if parent[v] == usize::MAX && residual[u][v] > 1e-12 {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[t] == usize::MAX {
            let reach = parent.iter().map(|&p| p != usize::MAX).collect();
            return (total, reach);
        }
        let mut push = f64::INFINITY;
        let mut v = t;
        while v != s {
            let u = parent[v];
            push = push.min(residual[u][v]);
            v = u;
        }
        let mut v = t;
        while v != s {
            let u = parent[v];
            residual[u][v] -= push;
            residual[v][u] += push;
            v = u;
        }
        total += push;
    }
}

/// Classical subtour separation: for every customer `k`, a minimum
/// `source -> k` cut in the support graph. When its capacity is below the
/// visit value of `k`, the sink side `U` (without the sink) gives the
/// violated cut `x(A(U)) <= y(U \ {k})`.
///
/// Relies on the point meeting the in-degree rows, so that the cut capacity
/// equals `y(U) - x(A(U))`.
pub fn secs_maxflow_separation(
    graph: &SupportGraph,
    source: usize,
    sink: usize,
    viol_tol: f64,
) -> Vec<Cut> {
    let n = graph.n();
    let mut capacity = vec![vec![0.0; n]; n];
    for (i, j, w) in graph.arcs() {
        capacity[i][j] = w;
    }
    let mut cuts: Vec<Cut> = Vec::new();
    for k in (0..n).filter(|&k| k != source && k != sink) {
        let y_k = graph.node_weight[k];
        if y_k <= viol_tol {
            continue;
        }
        let (flow, source_side) = max_flow(&capacity, source, k);
        if flow >= y_k - viol_tol {
            continue;
        }
        let set: Vec<usize> = (0..n)
            .filter(|&v| !source_side[v] && v != sink && v != source)
            .collect();
        let mut terms = Vec::new();
        for &i in &set {
            for &j in &set {
                if i != j {
                    terms.push((Term::Arc(i, j), 1.0));
                }
            }
        }
        terms.extend(
            set.iter()
                .filter(|&&i| i != k)
                .map(|&i| (Term::Node(i), -1.0)),
        );
        let mut cut = Cut {
            family: CutFamily::Sec,
            terms,
            rhs: 0.0,
            witness: set,
            violation: 0.0,
        };
        cut.violation = cut.lhs_on(graph) - cut.rhs;
        if cut.violation > viol_tol && !cuts.iter().any(|c| c.witness == cut.witness) {
            cuts.push(cut);
        }
    }
    cuts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_flow() {
        let mut cap = vec![vec![0.0; 4]; 4];
        cap[0][1] = 3.0;
        cap[0][2] = 2.0;
        cap[1][2] = 1.0;
        cap[1][3] = 2.0;
        cap[2][3] = 3.0;
        let (flow, reach) = max_flow(&cap, 0, 3);
        assert!((flow - 5.0).abs() < 1e-12);
        assert!(reach[0] && !reach[3]);
    }
}
