use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::formulation::{
    extract_solution, Constraint, ExtractError, LinearModel, Provenance, Relation, Term, VarKind,
    VarTag, VariableMap,
};
use crate::lp::{LpBackend, LpOutcome};
use crate::model::{check_solution, Instance, Solution, Violation};
use crate::numeric::is_integral;
use crate::separation::{build_support_graph, Separator};

use super::config::{BranchingRule, SolverConfig};
use super::preprocess::preprocess;
use super::{CutCounts, SolveError, SolveResult, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Run the separation callback at fractional nodes.
    Cuts,
    /// LP bounds only; integer points are still checked and lazily cut.
    Plain,
}

#[derive(Debug, Clone)]
struct Node {
    /// Bound changes from the root, applied in order.
    bounds: Vec<(usize, f64, f64)>,
    /// Parent LP bound.
    estimate: f64,
    id: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    /// Highest estimate first, older node on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        self.estimate
            .total_cmp(&other.estimate)
            .then_with(|| other.id.cmp(&self.id))
    }
}

enum NodeOutcome {
    Pruned,
    Branch {
        var: usize,
        value: f64,
        bound: f64,
    },
    /// Out of time in the middle of the node; `bound` is its best LP bound.
    Interrupted {
        bound: f64,
    },
}

/// Branching priority: `y` first, then `x`, then `u`; other integer
/// variables last.
fn priority(tag: VarTag) -> usize {
    match tag {
        VarTag::Y(_) | VarTag::Yr(..) => 0,
        VarTag::X(..) | VarTag::Xr(..) => 1,
        VarTag::U(..) => 2,
        _ => 3,
    }
}

struct Search<'a, B: LpBackend> {
    instance: &'a Instance,
    map: &'a VariableMap,
    config: &'a SolverConfig,
    mode: SearchMode,
    backend: &'a mut B,
    separator: Separator<'a>,
    integer_vars: Vec<usize>,
    integral_profits: bool,
    cuts: CutCounts,
    lazy: usize,
    incumbent: Option<Solution>,
    start: Instant,
}

impl<'a, B: LpBackend> Search<'a, B> {
    fn out_of_time(&self) -> bool {
        !self.config.deterministic
            && self.start.elapsed() >= Duration::from_secs_f64(self.config.time_limit.min(1e9))
    }

    fn incumbent_value(&self) -> f64 {
        self.incumbent
            .as_ref()
            .map_or(f64::NEG_INFINITY, |s| s.profit)
    }

    /// LP value rounded down when every profit is integral.
    fn node_bound(&self, objective: f64) -> f64 {
        if self.integral_profits {
            (objective + 1e-6).floor()
        } else {
            objective
        }
    }

    fn can_prune(&self, bound: f64) -> bool {
        let best = self.incumbent_value();
        best.is_finite() && bound - best <= 1e-6 * best.abs().max(1.0)
    }

    fn choose_branch(&self, point: &[f64]) -> Option<usize> {
        let tol = self.config.integrality;
        let mut best: Option<(usize, usize, f64)> = None;
        for &v in &self.integer_vars {
            let frac = point[v] - point[v].floor();
            let dist = frac.min(1.0 - frac);
            if dist <= tol {
                continue;
            }
            let p = priority(self.map.tag(v));
            let better = match (best, self.config.branching) {
                (None, _) => true,
                (Some((bp, _, _)), BranchingRule::FirstFractional) => p < bp,
                (Some((bp, _, bd)), BranchingRule::MostFractional) => {
                    p < bp || (p == bp && dist > bd + 1e-12)
                }
            };
            if better {
                best = Some((p, v, dist));
            }
        }
        best.map(|(_, v, _)| v)
    }

    fn add_lazy(&mut self, terms: Vec<(Term, f64)>, rhs: f64) {
        let row = Constraint {
            coefs: self.map.expand(&terms),
            relation: Relation::Le,
            rhs,
            provenance: Provenance::Lazy,
        };
        self.backend.add_rows(std::slice::from_ref(&row));
        self.lazy += 1;
    }

    /// Handles an integer LP point. Returns true if the point was accepted
    /// (possibly as a new incumbent), false if a lazy cut was added.
    fn integer_point(&mut self, point: &[f64]) -> Result<bool, SolveError> {
        let solution = match extract_solution(self.instance, self.map, point) {
            Ok(s) => s,
            Err(ExtractError::Subtour(cycle)) => {
                let mut set = cycle;
                set.sort_unstable();
                let keep = set[0];
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
                        .filter(|&&i| i != keep)
                        .map(|&i| (Term::Node(i), -1.0)),
                );
                self.add_lazy(terms, 0.0);
                return Ok(false);
            }
            Err(e) => return Err(SolveError::Decode(e)),
        };
        let report = check_solution(self.instance, &solution);
        if !report.is_feasible() {
            // Only over-long routes can slip through the time-flow rows
            // numerically; cut each one off with its route inequality.
            let mut added = false;
            for violation in &report.violations {
                match *violation {
                    Violation::DurationExceeded { route, .. } => {
                        let nodes = &solution.routes[route].nodes;
                        let mut terms: Vec<(Term, f64)> = nodes
                            .windows(2)
                            .map(|w| (Term::Arc(w[0], w[1]), 1.0))
                            .collect();
                        terms.extend(
                            nodes[1..nodes.len() - 1]
                                .iter()
                                .map(|&k| (Term::Node(k), -1.0)),
                        );
                        self.add_lazy(terms, 0.0);
                        added = true;
                    }
                    _ => {
                        return Err(SolveError::Decode(ExtractError::Model(
                            crate::model::ModelError::Invalid(format!(
                                "integer point violates {violation}"
                            )),
                        )))
                    }
                }
            }
            if added {
                return Ok(false);
            }
        }
        if solution.profit > self.incumbent_value() {
            self.incumbent = Some(solution);
        }
        Ok(true)
    }

    fn process(&mut self, node: &Node) -> Result<NodeOutcome, SolveError> {
        self.backend.reset_bounds();
        for &(v, lo, hi) in &node.bounds {
            self.backend.set_bounds(v, lo, hi);
        }
        let params = self.config.separation();
        let mut rounds = 0;
        let mut bound = node.estimate;
        loop {
            let (objective, point) = match self.backend.solve()? {
                LpOutcome::Infeasible => return Ok(NodeOutcome::Pruned),
                LpOutcome::Optimal { objective, point } => (objective, point),
            };
            bound = bound.min(self.node_bound(objective));
            if self.can_prune(bound) {
                return Ok(NodeOutcome::Pruned);
            }
            if self.out_of_time() {
                return Ok(NodeOutcome::Interrupted { bound });
            }
            let Some(var) = self.choose_branch(&point) else {
                if self.integer_point(&point)? {
                    return Ok(NodeOutcome::Pruned);
                }
                continue;
            };
            if self.mode == SearchMode::Cuts
                && params.families.any()
                && rounds < self.config.max_rounds
            {
                let graph = build_support_graph(self.map, &point, params.tol);
                let round = self.separator.separate(&graph, &params);
                let mut rows = Vec::new();
                for cut in &round.cuts {
                    if rows.len() == self.config.max_cuts_per_round {
                        break;
                    }
                    let row = cut.to_constraint(self.map);
                    if row.violation(&point) > params.viol_tol {
                        self.cuts.record(cut.family);
                        rows.push(row);
                    }
                }
                if !rows.is_empty() {
                    rounds += 1;
                    self.backend.add_rows(&rows);
                    continue;
                }
            }
            return Ok(NodeOutcome::Branch {
                var,
                value: point[var],
                bound,
            });
        }
    }
}

/// Best-bound search with depth-first plunging over any formulation that
/// exposes arc and node variables through `map`.
pub fn branch_and_bound<B: LpBackend>(
    instance: &Instance,
    model: &LinearModel,
    map: &VariableMap,
    config: &SolverConfig,
    mode: SearchMode,
    backend: &mut B,
) -> Result<SolveResult, SolveError> {
    config.validate()?;
    let start = Instant::now();
    let fixings = preprocess(instance);
    let finish = |status, solution, bound, nodes, cuts, lazy| SolveResult {
        status,
        solution,
        bound,
        nodes,
        time: start.elapsed(),
        cuts,
        lazy,
        deterministic: config.deterministic,
    };
    if fixings.proves_infeasible(instance) {
        return Ok(finish(
            Status::Infs,
            None,
            f64::NEG_INFINITY,
            0,
            CutCounts::default(),
            0,
        ));
    }

    // root fixings go straight into the variable bounds
    let mut fixed_model = model.clone();
    let fixed_vars = fixings.nodes.iter().flat_map(|&k| map.node_vars(k).iter());
    let fixed_vars = fixed_vars.chain(
        fixings
            .arcs
            .iter()
            .flat_map(|&(i, j)| map.arc_vars(i, j).iter()),
    );
    for &v in fixed_vars {
        fixed_model.variables[v].lower = 0.0;
        fixed_model.variables[v].upper = 0.0;
    }
    let model = &fixed_model;
    backend.load(model);
    let integer_vars = (0..model.variables.len())
        .filter(|&v| model.variables[v].kind != VarKind::Continuous)
        .collect();
    let integral_profits = instance.profit.iter().all(|&p| is_integral(p));

    let mut search = Search {
        instance,
        map,
        config,
        mode,
        backend,
        separator: Separator::new(instance),
        integer_vars,
        integral_profits,
        cuts: CutCounts::default(),
        lazy: 0,
        incumbent: None,
        start,
    };

    let node_limit = config.effective_node_limit();
    let mut open = BinaryHeap::new();
    let mut next_id = 1;
    let mut dive = Some(Node {
        bounds: Vec::new(),
        estimate: f64::INFINITY,
        id: 0,
    });
    let mut nodes = 0;
    let mut stopped = false;
    loop {
        let node = match dive.take().or_else(|| open.pop()) {
            Some(node) => node,
            None => break,
        };
        if search.can_prune(node.estimate) {
            continue;
        }
        if node_limit.is_some_and(|limit| nodes >= limit) || search.out_of_time() {
            open.push(node);
            stopped = true;
            break;
        }
        nodes += 1;
        match search.process(&node)? {
            NodeOutcome::Pruned => {}
            NodeOutcome::Interrupted { bound } => {
                open.push(Node {
                    estimate: bound,
                    ..node
                });
                stopped = true;
                break;
            }
            NodeOutcome::Branch { var, value, bound } => {
                let (lo, hi) = (model.variables[var].lower, model.variables[var].upper);
                let current = node
                    .bounds
                    .iter()
                    .rev()
                    .find(|&&(v, _, _)| v == var)
                    .map_or((lo, hi), |&(_, l, h)| (l, h));
                let mut up = node.bounds.clone();
                up.push((var, value.ceil(), current.1));
                let mut down = node.bounds;
                down.push((var, current.0, value.floor()));
                dive = Some(Node {
                    bounds: up,
                    estimate: bound,
                    id: next_id,
                });
                open.push(Node {
                    bounds: down,
                    estimate: bound,
                    id: next_id + 1,
                });
                next_id += 2;
            }
        }
    }

    let best = search.incumbent_value();
    let open_bound = open
        .iter()
        .filter(|n| !search.can_prune(n.estimate))
        .map(|n| n.estimate)
        .fold(f64::NEG_INFINITY, f64::max);
    let bound = open_bound.max(best);
    let status = match (&search.incumbent, stopped && open_bound > f64::NEG_INFINITY) {
        (Some(_), false) => Status::Opt,
        (Some(_), true) => Status::NoOpt,
        (None, false) => Status::Infs,
        (None, true) => Status::NoSols,
    };
    let bound = if status == Status::Opt { best } else { bound };
    let (cuts, lazy) = (search.cuts, search.lazy);
    Ok(finish(status, search.incumbent, bound, nodes, cuts, lazy))
}
