use std::collections::BTreeSet;

use crate::model::Instance;

/// Simple undirected graph on vertices `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub order: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(order: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = edges
            .into_iter()
            .filter(|&(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        Graph { order, edges }
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

/// Instance whose feasibility is equivalent to `graph` having a Hamiltonian
/// path: one route, zero times and budget, every vertex mandatory, and every
/// non-edge removed in both directions. Vertex `v` becomes customer `v + 1`.
pub fn hpp_reduce(graph: &Graph) -> Instance {
    let n = graph.order + 2;
    let travel = vec![vec![0.0; n]; n];
    let mut profit = vec![1.0; n];
    profit[0] = 0.0;
    profit[n - 1] = 0.0;
    let mut instance = Instance::with_travel_matrix(1, 0.0, travel, profit, vec![0.0; n])
        .expect("reduction builds a valid instance");
    instance.mandatory = (1..n - 1).collect();
    for a in 0..graph.order {
        for b in 0..graph.order {
            if a != b && !graph.adjacent(a, b) {
                instance.physical.insert((a + 1, b + 1));
            }
        }
    }
    instance.symmetric_physical = true;
    instance.exact_time = true;
    instance
}

/// Held-Karp style dynamic program over vertex subsets.
pub fn has_hamiltonian_path(graph: &Graph) -> bool {
    let k = graph.order;
    if k <= 1 {
        return true;
    }
    let full = (1usize << k) - 1;
    // ends[mask] = bitset of vertices at which a path covering mask can end
    let mut ends = vec![0usize; 1 << k];
    for v in 0..k {
        ends[1 << v] = 1 << v;
    }
    for mask in 1..=full {
        if ends[mask] == 0 {
            continue;
        }
        for v in 0..k {
            if ends[mask] & (1 << v) == 0 {
                continue;
            }
            for w in 0..k {
                if mask & (1 << w) == 0 && graph.adjacent(v, w) {
                    ends[mask | (1 << w)] |= 1 << w;
                }
            }
        }
    }
    ends[full] != 0
}
