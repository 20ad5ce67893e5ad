use super::support::SupportGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteCaps {
    pub max_routes: usize,
    /// Maximum number of nodes on a route, depots included.
    pub max_len: usize,
}

/// Elementary source-to-sink paths of a support graph.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RouteSet {
    pub routes: Vec<Vec<usize>>,
    pub truncated: bool,
}

/// Depth-first enumeration of all elementary `source -> sink` paths, visiting
/// successors in increasing id order.
pub fn enumerate_routes(
    graph: &SupportGraph,
    source: usize,
    sink: usize,
    caps: RouteCaps,
) -> RouteSet {
    let mut set = RouteSet::default();
    let mut on_path = vec![false; graph.n()];
    let mut path = vec![source];
    on_path[source] = true;
    // stack of (node, next successor index)
    let mut stack: Vec<(usize, usize)> = vec![(source, 0)];
    while let Some(&mut (node, ref mut next)) = stack.last_mut() {
        let succ = graph.successors(node);
        if *next >= succ.len() {
            stack.pop();
            path.pop();
            on_path[node] = false;
            continue;
        }
        let w = succ[*next];
        *next += 1;
        if on_path[w] {
            continue;
        }
        if w == sink {
            if set.routes.len() >= caps.max_routes {
                set.truncated = true;
                break;
            }
            let mut route = path.clone();
            route.push(sink);
            set.routes.push(route);
            continue;
        }
        if path.len() + 2 > caps.max_len {
            set.truncated = true;
            continue;
        }
        on_path[w] = true;
        path.push(w);
        stack.push((w, 0));
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAPS: RouteCaps = RouteCaps {
        max_routes: 100,
        max_len: 10,
    };

    #[test]
    fn direct_arc_only() {
        let g = SupportGraph::from_parts(4, vec![0.0; 4], &[(0, 3, 1.0)], 1e-6);
        assert_eq!(enumerate_routes(&g, 0, 3, CAPS).routes, vec![vec![0, 3]]);
    }

    #[test]
    fn two_single_customer_routes() {
        let arcs = [(0, 1, 0.5), (1, 3, 0.5), (0, 2, 0.5), (2, 3, 0.5)];
        let g = SupportGraph::from_parts(4, vec![0.0, 0.5, 0.5, 0.0], &arcs, 1e-6);
        assert_eq!(
            enumerate_routes(&g, 0, 3, CAPS).routes,
            vec![vec![0, 1, 3], vec![0, 2, 3]]
        );
    }

    #[test]
    fn caps_set_truncation() {
        let arcs = [
            (0, 1, 0.5),
            (1, 3, 0.5),
            (0, 2, 0.5),
            (2, 3, 0.5),
            (1, 2, 0.5),
        ];
        let g = SupportGraph::from_parts(4, vec![0.0; 4], &arcs, 1e-6);
        let all = enumerate_routes(&g, 0, 3, CAPS);
        assert_eq!(all.routes.len(), 3);
        assert!(!all.truncated);
        let capped = enumerate_routes(
            &g,
            0,
            3,
            RouteCaps {
                max_routes: 2,
                max_len: 10,
            },
        );
        assert_eq!(capped.routes.len(), 2);
        assert!(capped.truncated);
        let short = enumerate_routes(
            &g,
            0,
            3,
            RouteCaps {
                max_routes: 10,
                max_len: 3,
            },
        );
        assert_eq!(short.routes, vec![vec![0, 1, 3], vec![0, 2, 3]]);
        assert!(short.truncated);
    }
}
