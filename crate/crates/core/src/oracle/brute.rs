use crate::lagrangian::SubInstance;
use crate::model::{Instance, Route, Solution};
use crate::numeric::exact_sum;

use super::OracleError;

pub const MAX_CUSTOMERS: usize = 10;
pub const MAX_ROUTES: usize = 3;
pub const MAX_TSP_NODES: usize = 9;

/// Outcome of an exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// `None` when no feasible solution exists.
    pub profit: Option<f64>,
    pub solution: Option<Solution>,
    /// Feasible single routes (or partial route systems) visited.
    pub enumerated: usize,
}

impl OracleResult {
    pub fn is_infeasible(&self) -> bool {
        self.profit.is_none()
    }
}

fn guard(instance: &Instance) -> Result<(), OracleError> {
    let customers = instance.customer_count();
    if customers > MAX_CUSTOMERS || instance.fleet_size > MAX_ROUTES {
        return Err(OracleError::Guard(format!(
            "{customers} customers and {} routes exceed {MAX_CUSTOMERS} and {MAX_ROUTES}",
            instance.fleet_size
        )));
    }
    Ok(())
}

fn duration(instance: &Instance, nodes: &[usize]) -> f64 {
    let travel = nodes.windows(2).map(|w| instance.t(w[0], w[1]));
    let service = nodes[1..nodes.len() - 1].iter().map(|&k| instance.s(k));
    exact_sum(travel.chain(service))
}

/// Travel and service time of an open route prefix starting at the source.
fn prefix_time(instance: &Instance, nodes: &[usize]) -> f64 {
    let travel = nodes.windows(2).map(|w| instance.t(w[0], w[1]));
    exact_sum(travel.chain(nodes[1..].iter().map(|&k| instance.s(k))))
}

fn route_ok(instance: &Instance, nodes: &[usize]) -> bool {
    nodes.windows(2).all(|w| instance.arc_allowed(w[0], w[1]))
        && instance.within_budget(duration(instance, nodes))
}

fn bit(k: usize) -> usize {
    1 << (k - 1)
}

fn mask_profit(instance: &Instance, mask: usize) -> f64 {
    exact_sum(
        instance
            .customers()
            .filter(|&k| mask & bit(k) != 0)
            .map(|k| instance.profit[k]),
    )
}

fn mandatory_mask(instance: &Instance) -> usize {
    instance.mandatory.iter().fold(0, |m, &k| m | bit(k))
}

/// For each customer subset, one feasible visiting order if any exists.
/// Orders are grown one customer at a time by depth-first search.
fn feasible_subsets(instance: &Instance) -> (Vec<Option<Vec<usize>>>, usize) {
    let c = instance.customer_count();
    let (source, sink) = (instance.source(), instance.sink());
    let mut best: Vec<Option<Vec<usize>>> = vec![None; 1 << c];
    if instance.arc_allowed(source, sink) {
        best[0] = Some(vec![source, sink]);
    }
    let mut count = 0;
    let mut path = vec![source];
    let mut elapsed = vec![0.0];
    fn extend(
        instance: &Instance,
        path: &mut Vec<usize>,
        elapsed: &mut Vec<f64>,
        mask: usize,
        best: &mut [Option<Vec<usize>>],
        count: &mut usize,
    ) {
        let last = path[path.len() - 1];
        let sink = instance.sink();
        for k in instance.customers() {
            if mask & bit(k) != 0 || !instance.arc_allowed(last, k) {
                continue;
            }
            if path[1..]
                .iter()
                .any(|&i| instance.logically_incompatible(i, k))
            {
                continue;
            }
            let time = elapsed[elapsed.len() - 1] + instance.t(last, k) + instance.s(k);
            // travel times are nonnegative, so a prefix over budget stays over
            if !instance.within_budget(time) {
                continue;
            }
            path.push(k);
            elapsed.push(time);
            let next = mask | bit(k);
            if best[next].is_none() && instance.arc_allowed(k, sink) {
                let mut nodes = path.clone();
                nodes.push(sink);
                if route_ok(instance, &nodes) {
                    *count += 1;
                    best[next] = Some(nodes);
                }
            }
            extend(instance, path, elapsed, next, best, count);
            path.pop();
            elapsed.pop();
        }
    }
    extend(instance, &mut path, &mut elapsed, 0, &mut best, &mut count);
    (best, count)
}

/// Exhaustive optimum over all systems of `m` routes: every customer subset
/// that one route can serve is found first, then disjoint subsets are
/// combined by subset dynamic programming.
pub fn brute_force_solve(instance: &Instance) -> Result<OracleResult, OracleError> {
    guard(instance)?;
    let c = instance.customer_count();
    let full = (1usize << c) - 1;
    let (routes, enumerated) = feasible_subsets(instance);

    // reach[r][mask]: a subset of `mask` served by the last route, or None
    let m = instance.fleet_size;
    let mut reach: Vec<Vec<Option<usize>>> = vec![vec![None; 1 << c]; m + 1];
    reach[0][0] = Some(0);
    for r in 1..=m {
        for mask in 0..=full {
            let mut sub = mask;
            loop {
                if routes[sub].is_some() && reach[r - 1][mask ^ sub].is_some() {
                    reach[r][mask] = Some(sub);
                    break;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
        }
    }

    let need = mandatory_mask(instance);
    let mut best: Option<(f64, usize)> = None;
    for mask in 0..=full {
        if mask & need != need || reach[m][mask].is_none() {
            continue;
        }
        let p = mask_profit(instance, mask);
        if best.is_none_or(|(bp, _)| p > bp) {
            best = Some((p, mask));
        }
    }
    let Some((profit, mut mask)) = best else {
        return Ok(OracleResult {
            profit: None,
            solution: None,
            enumerated,
        });
    };
    let mut list = Vec::new();
    for r in (1..=m).rev() {
        let sub = reach[r][mask].expect("reachable");
        let nodes = routes[sub].clone().expect("feasible subset");
        list.push(Route {
            duration: duration(instance, &nodes),
            nodes,
        });
        mask ^= sub;
    }
    list.reverse();
    Ok(OracleResult {
        profit: Some(profit),
        solution: Some(Solution {
            routes: list,
            profit,
        }),
        enumerated,
    })
}

/// Second, independent enumeration: builds the routes one after another,
/// branching on each next node (a customer or the sink) of the current route.
pub fn brute_force_solve_sequential(instance: &Instance) -> Result<OracleResult, OracleError> {
    guard(instance)?;
    struct State<'a> {
        instance: &'a Instance,
        routes: Vec<Vec<usize>>,
        used: Vec<bool>,
        best: Option<(f64, Vec<Vec<usize>>)>,
        count: usize,
    }
    fn close(state: &mut State) {
        let inst = state.instance;
        if inst.mandatory.iter().any(|&k| !state.used[k]) {
            return;
        }
        state.count += 1;
        let profit = exact_sum(
            inst.customers()
                .filter(|&k| state.used[k])
                .map(|k| inst.profit[k]),
        );
        if state.best.as_ref().is_none_or(|(bp, _)| profit > *bp) {
            state.best = Some((profit, state.routes.clone()));
        }
    }
    fn grow(state: &mut State) {
        let inst = state.instance;
        let (source, sink) = (inst.source(), inst.sink());
        let r = state.routes.len() - 1;
        let last = *state.routes[r].last().expect("non-empty route");
        // finish this route
        if inst.arc_allowed(last, sink) {
            state.routes[r].push(sink);
            if route_ok(inst, &state.routes[r]) {
                if state.routes.len() == inst.fleet_size {
                    close(state);
                } else {
                    state.routes.push(vec![source]);
                    grow(state);
                    state.routes.pop();
                }
            }
            state.routes[r].pop();
        }
        for k in inst.customers() {
            if state.used[k] || !inst.arc_allowed(last, k) {
                continue;
            }
            if state.routes[r][1..]
                .iter()
                .any(|&i| inst.logically_incompatible(i, k))
            {
                continue;
            }
            // routes are interchangeable: non-empty routes come first, ordered
            // by their first customer
            if r > 0 && state.routes[r].len() == 1 {
                let previous = &state.routes[r - 1];
                if previous.len() < 3 || k < previous[1] {
                    continue;
                }
            }
            state.routes[r].push(k);
            if inst.within_budget(prefix_time(inst, &state.routes[r])) {
                state.used[k] = true;
                grow(state);
                state.used[k] = false;
            }
            state.routes[r].pop();
        }
    }
    let mut state = State {
        instance,
        routes: vec![vec![instance.source()]],
        used: vec![false; instance.n()],
        best: None,
        count: 0,
    };
    grow(&mut state);
    let enumerated = state.count;
    Ok(match state.best {
        None => OracleResult {
            profit: None,
            solution: None,
            enumerated,
        },
        Some((profit, routes)) => {
            let routes = routes
                .into_iter()
                .map(|nodes| Route {
                    duration: duration(instance, &nodes),
                    nodes,
                })
                .collect();
            OracleResult {
                profit: Some(profit),
                solution: Some(Solution { routes, profit }),
                enumerated,
            }
        }
    })
}

/// Cheapest tour of a sub-instance by trying every order. With a fixed edge
/// `(0, f)` this is the cheapest path from `0` to `f` through all other
/// nodes; without one it is the cheapest Hamiltonian cycle through node 0.
pub fn brute_force_tsp_path(sub: &SubInstance) -> Result<f64, OracleError> {
    let size = sub.len();
    if size > MAX_TSP_NODES {
        return Err(OracleError::Guard(format!(
            "{size} nodes exceed {MAX_TSP_NODES}"
        )));
    }
    if size <= 1 {
        return Ok(0.0);
    }
    let end = sub.fixed;
    let mut inner: Vec<usize> = (1..size).filter(|&v| Some(v) != end).collect();
    let mut best = f64::INFINITY;
    permute(&mut inner, 0, &mut |order| {
        let mut at = 0;
        let mut total = 0.0;
        for &v in order {
            total += sub.cost[at][v];
            at = v;
        }
        total += match end {
            Some(f) => sub.cost[at][f] + sub.cost[f][0],
            None => sub.cost[at][0],
        };
        if total < best {
            best = total;
        }
    });
    Ok(best)
}

/// Shortest feasible-order duration of a route visiting exactly `customers`,
/// ignoring the budget; `+inf` when no order uses allowed arcs only.
pub fn brute_force_route_time(
    instance: &Instance,
    customers: &[usize],
) -> Result<f64, OracleError> {
    if customers.len() > MAX_TSP_NODES {
        return Err(OracleError::Guard(format!(
            "{} customers exceed {MAX_TSP_NODES}",
            customers.len()
        )));
    }
    let mut order = customers.to_vec();
    let mut best = f64::INFINITY;
    permute(&mut order, 0, &mut |perm| {
        let mut nodes = vec![instance.source()];
        nodes.extend_from_slice(perm);
        nodes.push(instance.sink());
        if nodes.windows(2).all(|w| instance.arc_allowed(w[0], w[1])) {
            best = best.min(duration(instance, &nodes));
        }
    });
    Ok(best)
}

fn permute(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}
