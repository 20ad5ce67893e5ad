use crate::formulation::VariableMap;

/// Arcs with positive flow at a fractional point, and the node visit values.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportGraph {
    n: usize,
    /// `y` value per node; zero for the source and the sink.
    pub node_weight: Vec<f64>,
    weight: Vec<f64>,
    out: Vec<Vec<usize>>,
}

impl SupportGraph {
    /// Graph from explicit arc weights; arcs with weight `<= tol` are dropped.
    pub fn from_parts(
        n: usize,
        node_weight: Vec<f64>,
        arcs: &[(usize, usize, f64)],
        tol: f64,
    ) -> Self {
        let mut graph = SupportGraph {
            n,
            node_weight,
            weight: vec![0.0; n * n],
            out: vec![Vec::new(); n],
        };
        for &(i, j, w) in arcs {
            if w > tol && graph.weight[i * n + j] == 0.0 {
                graph.out[i].push(j);
            }
            if w > tol {
                graph.weight[i * n + j] = w;
            }
        }
        for list in &mut graph.out {
            list.sort_unstable();
        }
        graph
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weight[i * self.n + j]
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.out[i].iter().map(move |&j| (i, j, self.weight(i, j))))
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }
}

/// Support graph of `point`, aggregating per-route variables when the map
/// comes from the mixed model. Arcs need `x > tol` strictly.
pub fn build_support_graph(map: &VariableMap, point: &[f64], tol: f64) -> SupportGraph {
    let n = map.n();
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if !map.arc_vars(i, j).is_empty() {
                arcs.push((i, j, map.arc_value(point, i, j)));
            }
        }
    }
    let node_weight = (0..n).map(|k| map.node_value(point, k)).collect();
    SupportGraph::from_parts(n, node_weight, &arcs, tol)
}
