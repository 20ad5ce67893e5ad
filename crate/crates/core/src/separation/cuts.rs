use crate::formulation::{CutFamily, Term};
use crate::model::Instance;

use super::support::SupportGraph;
use super::{Cut, DepotBounds};

fn path_arcs(nodes: &[usize]) -> impl Iterator<Item = (Term, f64)> + '_ {
    nodes.windows(2).map(|w| (Term::Arc(w[0], w[1]), 1.0))
}

fn interior(nodes: &[usize]) -> &[usize] {
    if nodes.len() < 2 {
        &[]
    } else {
        &nodes[1..nodes.len() - 1]
    }
}

fn keep_if_violated(cut: Cut, graph: &SupportGraph, viol_tol: f64) -> Option<Cut> {
    let violation = cut.lhs_on(graph) - cut.rhs;
    (violation > viol_tol).then_some(Cut { violation, ..cut })
}

/// Arcs with both ends in `set`: the left-hand side of set, logical and
/// subtour cuts.
fn inner_arcs(set: &[usize]) -> Vec<(Term, f64)> {
    let mut terms = Vec::new();
    for &i in set {
        for &j in set {
            if i != j {
                terms.push((Term::Arc(i, j), 1.0));
            }
        }
    }
    terms
}

/// Route cut: the arcs of `route` carry no more flow than its customers.
pub fn separate_route_inequality(
    route: &[usize],
    graph: &SupportGraph,
    viol_tol: f64,
) -> Option<Cut> {
    let mut terms: Vec<(Term, f64)> = path_arcs(route).collect();
    terms.extend(interior(route).iter().map(|&k| (Term::Node(k), -1.0)));
    let cut = Cut {
        family: CutFamily::Ri,
        terms,
        rhs: 0.0,
        witness: route.to_vec(),
        violation: 0.0,
    };
    keep_if_violated(cut, graph, viol_tol)
}

/// Set cut on the customers of `route`, emitted only when the time bound for
/// visiting all of them in one route exceeds the budget.
pub fn separate_set_inequality(
    instance: &Instance,
    route: &[usize],
    bound: f64,
    graph: &SupportGraph,
    viol_tol: f64,
) -> Option<Cut> {
    let mut set = interior(route).to_vec();
    if set.len() < 2 || instance.within_budget(bound) {
        return None;
    }
    set.sort_unstable();
    let rhs = set.len() as f64 - 2.0;
    let cut = Cut {
        family: CutFamily::Si,
        terms: inner_arcs(&set),
        rhs,
        witness: set,
        violation: 0.0,
    };
    keep_if_violated(cut, graph, viol_tol)
}

/// Travel plus service time of a customer subpath.
fn subpath_time(instance: &Instance, p: &[usize]) -> f64 {
    let travel: f64 = p.windows(2).map(|w| instance.t(w[0], w[1])).sum();
    travel + p.iter().map(|&k| instance.s(k)).sum::<f64>()
}

fn compatible_with_all(instance: &Instance, v: usize, p: &[usize]) -> bool {
    p.iter().all(|&k| !instance.logically_incompatible(v, k))
}

/// Nodes that can precede `p` in some feasible route.
pub fn left_set(instance: &Instance, p: &[usize], depots: &DepotBounds) -> Vec<usize> {
    let (first, last) = (p[0], p[p.len() - 1]);
    let body = subpath_time(instance, p);
    let mut set = Vec::new();
    if instance.arc_allowed(instance.source(), first) {
        set.push(instance.source());
    }
    for v in instance.customers() {
        if p.contains(&v) || !instance.arc_allowed(v, first) || !compatible_with_all(instance, v, p)
        {
            continue;
        }
        let time = depots.from_source[v]
            + instance.s(v)
            + instance.t(v, first)
            + body
            + depots.to_sink[last];
        if instance.within_budget(time) {
            set.push(v);
        }
    }
    set
}

/// Nodes that can follow `p` in some feasible route.
pub fn right_set(instance: &Instance, p: &[usize], depots: &DepotBounds) -> Vec<usize> {
    let (first, last) = (p[0], p[p.len() - 1]);
    let body = subpath_time(instance, p);
    let mut set = Vec::new();
    for v in instance.customers() {
        if p.contains(&v) || !instance.arc_allowed(last, v) || !compatible_with_all(instance, v, p)
        {
            continue;
        }
        let time = depots.from_source[first]
            + body
            + instance.t(last, v)
            + instance.s(v)
            + depots.to_sink[v];
        if instance.within_budget(time) {
            set.push(v);
        }
    }
    if instance.arc_allowed(last, instance.sink()) {
        set.push(instance.sink());
    }
    set
}

/// Subpath cuts for every customer subpath (two or more nodes) of `route`
/// whose direct closure `[source, p, sink]` fits the budget.
pub fn separate_subpath_inequalities(
    instance: &Instance,
    route: &[usize],
    depots: &DepotBounds,
    graph: &SupportGraph,
    viol_tol: f64,
) -> Vec<Cut> {
    let customers = interior(route);
    let mut cuts = Vec::new();
    for start in 0..customers.len() {
        for end in start + 2..=customers.len() {
            let p = &customers[start..end];
            let closure = instance.t(instance.source(), p[0])
                + subpath_time(instance, p)
                + instance.t(p[p.len() - 1], instance.sink());
            if !instance.within_budget(closure) {
                continue;
            }
            let mut body: Vec<(Term, f64)> = path_arcs(p).collect();
            body.extend(interior(p).iter().map(|&k| (Term::Node(k), -1.0)));

            let mut terms = body.clone();
            terms.extend(
                left_set(instance, p, depots)
                    .into_iter()
                    .map(|v| (Term::Arc(v, p[0]), -1.0)),
            );
            let left = Cut {
                family: CutFamily::SpiLeft,
                terms,
                rhs: 0.0,
                witness: p.to_vec(),
                violation: 0.0,
            };
            cuts.extend(keep_if_violated(left, graph, viol_tol));

            let last = p[p.len() - 1];
            let mut terms = body;
            terms.extend(
                right_set(instance, p, depots)
                    .into_iter()
                    .map(|v| (Term::Arc(last, v), -1.0)),
            );
            let right = Cut {
                family: CutFamily::SpiRight,
                terms,
                rhs: 0.0,
                witness: p.to_vec(),
                violation: 0.0,
            };
            cuts.extend(keep_if_violated(right, graph, viol_tol));
        }
    }
    cuts
}

/// Logical cuts for customer subpaths whose two ends may not share a route.
pub fn separate_logical_inequalities(
    instance: &Instance,
    route: &[usize],
    graph: &SupportGraph,
    viol_tol: f64,
) -> Vec<Cut> {
    let customers = interior(route);
    let mut cuts = Vec::new();
    for start in 0..customers.len() {
        for end in start + 2..=customers.len() {
            let p = &customers[start..end];
            if !instance.logically_incompatible(p[0], p[p.len() - 1]) {
                continue;
            }
            let mut set = p.to_vec();
            set.sort_unstable();
            let rhs = set.len() as f64 - 2.0;
            let cut = Cut {
                family: CutFamily::Li,
                terms: inner_arcs(&set),
                rhs,
                witness: p.to_vec(),
                violation: 0.0,
            };
            cuts.extend(keep_if_violated(cut, graph, viol_tol));
        }
    }
    cuts
}

/// One subtour cut per cycle, on the cycle's node set, leaving out the node
/// with the largest visit value (lowest id on ties).
pub fn separate_secs(cycles: &[Vec<usize>], graph: &SupportGraph, viol_tol: f64) -> Vec<Cut> {
    let mut cuts = Vec::new();
    for cycle in cycles {
        let mut set = cycle.clone();
        set.sort_unstable();
        cuts.extend(sec_for_set(&set, graph, viol_tol));
    }
    cuts
}

/// Subtour cut on a sorted node set, if violated at `graph`.
pub fn sec_for_set(set: &[usize], graph: &SupportGraph, viol_tol: f64) -> Option<Cut> {
    let mut k = set[0];
    for &v in set {
        if graph.node_weight[v] > graph.node_weight[k] {
            k = v;
        }
    }
    let mut terms = inner_arcs(set);
    terms.extend(
        set.iter()
            .filter(|&&i| i != k)
            .map(|&i| (Term::Node(i), -1.0)),
    );
    let cut = Cut {
        family: CutFamily::Sec,
        terms,
        rhs: 0.0,
        witness: set.to_vec(),
        violation: 0.0,
    };
    keep_if_violated(cut, graph, viol_tol)
}

/// Strongly connected components with at least two customers of the
/// support graph restricted to customers. Each is a union of cycles.
pub fn customer_components(graph: &SupportGraph) -> Vec<Vec<usize>> {
    let n = graph.n();
    if n < 4 {
        return Vec::new();
    }
    let customer = |v: usize| v > 0 && v < n - 1;
    let mut pred = vec![Vec::new(); n];
    for (i, j, _) in graph.arcs() {
        if customer(i) && customer(j) {
            pred[j].push(i);
        }
    }
    let reach = |root: usize, forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            let next: &[usize] = if forward {
                graph.successors(v)
            } else {
                &pred[v]
            };
            for &w in next {
                if customer(w) && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for v in 1..n - 1 {
        if assigned[v] {
            continue;
        }
        let (fwd, bwd) = (reach(v, true), reach(v, false));
        let comp: Vec<usize> = (1..n - 1).filter(|&w| fwd[w] && bwd[w]).collect();
        for &w in &comp {
            assigned[w] = true;
        }
        if comp.len() >= 2 {
            out.push(comp);
        }
    }
    out
}

/// Subtour cuts on the customer components and on subsets of them. For
/// each component and each choice of the node `k` left out of the right-hand
/// side, nodes are peeled off one at a time, always the one whose removal
/// leaves the largest `x(U) - y(U - k)`. A violated set need not be the
/// node set of a single cycle; it may be any union of cycles, which this
/// search reaches without a max-flow computation. At most `max_pins`
/// heaviest nodes per component are tried as `k`.
pub fn separate_component_secs(graph: &SupportGraph, max_pins: usize, viol_tol: f64) -> Vec<Cut> {
    let y = &graph.node_weight;
    let mut cuts = Vec::new();
    for comp in customer_components(graph) {
        let mut pins = comp.clone();
        pins.sort_by(|&a, &b| y[b].total_cmp(&y[a]).then(a.cmp(&b)));
        pins.truncate(max_pins);
        let mut best: Option<Cut> = None;
        for k in pins {
            let mut set = comp.clone();
            let mut inner: f64 =
                set.iter().flat_map(|&i| set.iter().map(move |&j| graph.weight(i, j))).sum();
            let mut rest: f64 = set.iter().filter(|&&u| u != k).map(|&u| y[u]).sum();
            loop {
                if inner - rest > viol_tol {
                    if let Some(cut) = sec_for_set(&set, graph, viol_tol) {
                        if best.as_ref().map_or(true, |b| cut.violation > b.violation + 1e-12) {
                            best = Some(cut);
                        }
                    }
                }
                if set.len() <= 2 {
                    break;
                }
                let mut pick: Option<(usize, f64)> = None;
                let mut pick_score = f64::NEG_INFINITY;
                for (pos, &v) in set.iter().enumerate().filter(|&(_, &v)| v != k) {
                    let touching: f64 =
                        set.iter().map(|&u| graph.weight(u, v) + graph.weight(v, u)).sum();
                    let score = (inner - touching) - (rest - y[v]);
                    if score > pick_score {
                        pick_score = score;
                        pick = Some((pos, touching));
                    }
                }
                let (pos, touching) = pick.expect("set has a node besides k");
                rest -= y[set[pos]];
                inner -= touching;
                set.remove(pos);
            }
        }
        cuts.extend(best);
    }
    cuts
}
