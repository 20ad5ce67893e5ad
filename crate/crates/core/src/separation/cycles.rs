//! Johnson's algorithm for the elementary circuits of a directed graph.

use super::support::SupportGraph;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CycleSet {
    /// Each cycle starts at its smallest node.
    pub cycles: Vec<Vec<usize>>,
    pub truncated: bool,
}

/// Strongly connected component containing `root` in the subgraph induced by
/// nodes `>= root`.
fn component_of(graph: &SupportGraph, root: usize) -> Vec<bool> {
    let n = graph.n();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            if forward {
                for &w in graph.successors(v) {
                    if w >= root && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            } else {
                for u in root..n {
                    if !seen[u] && graph.successors(u).binary_search(&v).is_ok() {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        seen
    };
    let fwd = reach(true);
    let bwd = reach(false);
    fwd.iter().zip(&bwd).map(|(a, b)| *a && *b).collect()
}

struct Search<'a> {
    graph: &'a SupportGraph,
    in_comp: Vec<bool>,
    blocked: Vec<bool>,
    b_lists: Vec<Vec<usize>>,
    stack: Vec<usize>,
    out: CycleSet,
    cap: usize,
}

impl Search<'_> {
    fn unblock(&mut self, v: usize) {
        let mut work = vec![v];
        while let Some(u) = work.pop() {
            if self.blocked[u] {
                self.blocked[u] = false;
                work.append(&mut self.b_lists[u]);
            }
        }
    }

    fn circuit(&mut self, v: usize, start: usize) -> bool {
        if self.out.truncated {
            return false;
        }
        let mut found = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for idx in 0..self.graph.successors(v).len() {
            let w = self.graph.successors(v)[idx];
            if !self.in_comp[w] {
                continue;
            }
            if w == start {
                if self.out.cycles.len() >= self.cap {
                    self.out.truncated = true;
                    break;
                }
                self.out.cycles.push(self.stack.clone());
                found = true;
            } else if !self.blocked[w] && self.circuit(w, start) {
                found = true;
            }
            if self.out.truncated {
                break;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &w in self.graph.successors(v) {
                if self.in_comp[w] && !self.b_lists[w].contains(&v) {
                    self.b_lists[w].push(v);
                }
            }
        }
        self.stack.pop();
        found
    }
}

/// All elementary cycles, up to `max_cycles`.
pub fn enumerate_elementary_cycles(graph: &SupportGraph, max_cycles: usize) -> CycleSet {
    let n = graph.n();
    let mut search = Search {
        graph,
        in_comp: vec![false; n],
        blocked: vec![false; n],
        b_lists: vec![Vec::new(); n],
        stack: Vec::new(),
        out: CycleSet::default(),
        cap: max_cycles,
    };
    for start in 0..n {
        let comp = component_of(graph, start);
        if comp.iter().filter(|&&c| c).count() < 2 {
            continue;
        }
        search.in_comp = comp;
        for v in 0..n {
            search.blocked[v] = false;
            search.b_lists[v].clear();
        }
        search.circuit(start, start);
        if search.out.truncated {
            break;
        }
    }
    search.out
}
