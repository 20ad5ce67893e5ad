//! Separation of route, set, subpath, subtour and logical cuts from a
//! fractional point of the compact model.

mod cuts;
mod cycles;
mod routes;
mod support;

pub use cuts::{
    customer_components, left_set, right_set, sec_for_set, separate_component_secs,
    separate_logical_inequalities, separate_route_inequality, separate_secs,
    separate_set_inequality, separate_subpath_inequalities,
};
pub use cycles::{enumerate_elementary_cycles, CycleSet};
pub use routes::{enumerate_routes, RouteCaps, RouteSet};
pub use support::{build_support_graph, SupportGraph};

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::formulation::{Constraint, CutFamily, Provenance, Relation, Term, VariableMap};
use crate::lagrangian::{helsgaun_lower_bound, SubInstance, DEFAULT_ITERATIONS};
use crate::model::{route_duration, Instance, Variant};

/// A `<=` inequality over arcs and nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub family: CutFamily,
    pub terms: Vec<(Term, f64)>,
    pub rhs: f64,
    /// The route, subpath, node set or cycle the cut was derived from.
    pub witness: Vec<usize>,
    /// `lhs - rhs` at the point that produced the cut.
    pub violation: f64,
}

impl Cut {
    pub fn lhs_with(&self, value: impl Fn(Term) -> f64) -> f64 {
        self.terms.iter().map(|&(t, c)| c * value(t)).sum()
    }

    pub fn lhs_on(&self, graph: &SupportGraph) -> f64 {
        self.lhs_with(|t| match t {
            Term::Arc(i, j) => graph.weight(i, j),
            Term::Node(k) => graph.node_weight[k],
        })
    }

    pub fn to_constraint(&self, map: &VariableMap) -> Constraint {
        Constraint {
            coefs: map.expand(&self.terms),
            relation: Relation::Le,
            rhs: self.rhs,
            provenance: Provenance::Cut(self.family),
        }
    }

    /// One line of the cut log: family, 1-based witness, violation.
    pub fn log_line(&self) -> String {
        let ids: Vec<String> = self.witness.iter().map(|v| (v + 1).to_string()).collect();
        format!(
            "{} [{}] {:.6}",
            self.family.name(),
            ids.join(" "),
            self.violation
        )
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.log_line())
    }
}

/// Which families the separator may emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutFamilies {
    pub ri: bool,
    pub si: bool,
    pub spi: bool,
    pub sec: bool,
    pub li: bool,
}

impl CutFamilies {
    pub const ALL: CutFamilies = CutFamilies {
        ri: true,
        si: true,
        spi: true,
        sec: true,
        li: true,
    };
    pub const NONE: CutFamilies = CutFamilies {
        ri: false,
        si: false,
        spi: false,
        sec: false,
        li: false,
    };

    pub fn any(&self) -> bool {
        self.ri || self.si || self.spi || self.sec || self.li
    }

    pub fn allows(&self, family: CutFamily) -> bool {
        match family {
            CutFamily::Ri => self.ri,
            CutFamily::Si => self.si,
            CutFamily::SpiLeft | CutFamily::SpiRight => self.spi,
            CutFamily::Sec => self.sec,
            CutFamily::Li => self.li,
        }
    }
}

impl std::str::FromStr for CutFamilies {
    type Err = String;

    /// `all`, `none`, or a comma-separated list such as `RI,SEC`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => return Ok(CutFamilies::ALL),
            "none" | "" => return Ok(CutFamilies::NONE),
            _ => {}
        }
        let mut set = CutFamilies::NONE;
        for token in s.split(',') {
            match token.trim().to_ascii_uppercase().as_str() {
                "RI" => set.ri = true,
                "SI" => set.si = true,
                "SPI" => set.spi = true,
                "SEC" => set.sec = true,
                "LI" => set.li = true,
                other => return Err(format!("unknown cut family `{other}`")),
            }
        }
        Ok(set)
    }
}

impl fmt::Display for CutFamilies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == CutFamilies::ALL {
            return f.write_str("all");
        }
        if *self == CutFamilies::NONE {
            return f.write_str("none");
        }
        let names: Vec<&str> = [
            (self.ri, "RI"),
            (self.si, "SI"),
            (self.spi, "SPI"),
            (self.sec, "SEC"),
            (self.li, "LI"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|&(_, name)| name)
        .collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationParams {
    /// Arcs enter the support graph when `x > tol`.
    pub tol: f64,
    /// Cuts are kept when violated by more than this.
    pub viol_tol: f64,
    pub max_routes: usize,
    pub max_cycles: usize,
    /// Heaviest nodes per customer component tried as the excluded node
    /// when peeling components for subtour cuts.
    pub max_sec_pins: usize,
    pub lagrangian_iterations: usize,
    pub families: CutFamilies,
}

impl Default for SeparationParams {
    fn default() -> Self {
        SeparationParams {
            tol: 1e-6,
            viol_tol: 1e-6,
            max_routes: 5000,
            max_cycles: 20000,
            max_sec_pins: 5,
            lagrangian_iterations: DEFAULT_ITERATIONS,
            families: CutFamilies::ALL,
        }
    }
}

/// Lower bounds on the travel time between each node and the depots over any
/// path of traversable arcs, physical removals ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct DepotBounds {
    pub from_source: Vec<f64>,
    pub to_sink: Vec<f64>,
}

impl DepotBounds {
    pub fn new(instance: &Instance) -> Self {
        let n = instance.n();
        let dijkstra = |root: usize, forward: bool| {
            let mut dist = vec![f64::INFINITY; n];
            let mut done = vec![false; n];
            dist[root] = 0.0;
            for _ in 0..n {
                let mut pick = None;
                for v in 0..n {
                    if !done[v]
                        && dist[v].is_finite()
                        && pick.is_none_or(|p: usize| dist[v] < dist[p])
                    {
                        pick = Some(v);
                    }
                }
                let Some(u) = pick else { break };
                done[u] = true;
                for w in 0..n {
                    let (a, b) = if forward { (u, w) } else { (w, u) };
                    if instance.is_traversable(a, b) && dist[u] + instance.t(a, b) < dist[w] {
                        dist[w] = dist[u] + instance.t(a, b);
                    }
                }
            }
            dist
        };
        DepotBounds {
            from_source: dijkstra(instance.source(), true),
            to_sink: dijkstra(instance.sink(), false),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeparationRound {
    /// Sorted by decreasing violation.
    pub cuts: Vec<Cut>,
    pub routes_truncated: bool,
    pub cycles_truncated: bool,
}

/// Runs the separation callback for one instance, caching route-time bounds
/// across calls.
pub struct Separator<'a> {
    instance: &'a Instance,
    depots: DepotBounds,
    bounds: HashMap<Vec<usize>, f64>,
}

impl<'a> Separator<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        Separator {
            instance,
            depots: DepotBounds::new(instance),
            bounds: HashMap::new(),
        }
    }

    pub fn depots(&self) -> &DepotBounds {
        &self.depots
    }

    /// Lower bound on the duration of any route visiting exactly the given
    /// customers consecutively.
    pub fn route_time_bound(&mut self, customers: &[usize], iterations: usize) -> f64 {
        let mut key = customers.to_vec();
        key.sort_unstable();
        if let Some(&b) = self.bounds.get(&key) {
            return b;
        }
        let sub = SubInstance::for_route(
            self.instance,
            &key,
            &self.depots.from_source,
            &self.depots.to_sink,
        );
        let value = helsgaun_lower_bound(&sub, iterations).value;
        self.bounds.insert(key, value);
        value
    }

    /// Every family for every route of the support graph, then subtour cuts
    /// on its cycles and on its strongly connected customer sets.
    pub fn separate(&mut self, graph: &SupportGraph, params: &SeparationParams) -> SeparationRound {
        let instance = self.instance;
        let fam = params.families;
        let mut round = SeparationRound::default();
        let mut seen: HashSet<(CutFamily, Vec<usize>)> = HashSet::new();
        let mut push = |round: &mut SeparationRound, cut: Cut| {
            if fam.allows(cut.family) && seen.insert((cut.family, cut.witness.clone())) {
                round.cuts.push(cut);
            }
        };

        let needs_routes =
            fam.ri || fam.si || fam.spi || (fam.li && instance.variant == Variant::PL);
        if needs_routes {
            let caps = RouteCaps {
                max_routes: params.max_routes,
                max_len: instance.n(),
            };
            let set = enumerate_routes(graph, instance.source(), instance.sink(), caps);
            round.routes_truncated = set.truncated;
            for route in &set.routes {
                let duration = route_duration(instance, route).unwrap_or(f64::INFINITY);
                if !instance.within_budget(duration) {
                    if fam.spi {
                        for cut in separate_subpath_inequalities(
                            instance,
                            route,
                            &self.depots,
                            graph,
                            params.viol_tol,
                        ) {
                            push(&mut round, cut);
                        }
                    }
                    let customers = &route[1..route.len() - 1];
                    let gate = fam.si
                        && customers.len() >= 2
                        && !instance.within_budget(
                            self.route_time_bound(customers, params.lagrangian_iterations),
                        );
                    if gate {
                        let bound = self.route_time_bound(customers, params.lagrangian_iterations);
                        if let Some(cut) =
                            separate_set_inequality(instance, route, bound, graph, params.viol_tol)
                        {
                            push(&mut round, cut);
                        }
                    } else if fam.ri {
                        if let Some(cut) = separate_route_inequality(route, graph, params.viol_tol)
                        {
                            push(&mut round, cut);
                        }
                    }
                }
                if fam.li && instance.variant == Variant::PL {
                    for cut in
                        separate_logical_inequalities(instance, route, graph, params.viol_tol)
                    {
                        push(&mut round, cut);
                    }
                }
            }
        }

        if fam.sec {
            let cycles = enumerate_elementary_cycles(graph, params.max_cycles);
            round.cycles_truncated = cycles.truncated;
            for cut in separate_secs(&cycles.cycles, graph, params.viol_tol) {
                push(&mut round, cut);
            }
            for cut in separate_component_secs(graph, params.max_sec_pins, params.viol_tol) {
                push(&mut round, cut);
            }
        }

        round
            .cuts
            .sort_by(|a, b| b.violation.total_cmp(&a.violation));
        round
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_list_parsing() {
        let fams: CutFamilies = "RI,SEC".parse().unwrap();
        assert!(fams.ri && fams.sec && !fams.si && !fams.spi && !fams.li);
        assert_eq!(fams.to_string(), "RI,SEC");
        assert_eq!("all".parse::<CutFamilies>().unwrap(), CutFamilies::ALL);
        assert_eq!("none".parse::<CutFamilies>().unwrap(), CutFamilies::NONE);
        assert!("XX".parse::<CutFamilies>().is_err());
    }

    #[test]
    fn depot_bounds_follow_shortest_paths() {
        // source -> a is long, source -> b -> a is short
        let travel = vec![
            vec![0.0, 10.0, 1.0, 20.0],
            vec![0.0, 0.0, 1.0, 1.0],
            vec![0.0, 1.0, 0.0, 30.0],
            vec![0.0; 4],
        ];
        let inst =
            Instance::with_travel_matrix(1, 50.0, travel, vec![0.0; 4], vec![0.0; 4]).unwrap();
        let d = DepotBounds::new(&inst);
        assert_eq!(d.from_source, vec![0.0, 2.0, 1.0, 3.0]);
        assert_eq!(d.to_sink[2], 2.0);
    }

    #[test]
    fn set_cut_replaces_route_cut_when_bound_exceeds_budget() {
        // a and b far apart: no route can visit both.
        let coords = vec![(0.0, 0.0), (0.0, 5.0), (0.0, -5.0), (0.0, 0.0)];
        let inst =
            Instance::euclidean(2, 11.0, coords, vec![0.0, 1.0, 1.0, 0.0], vec![0.0; 4]).unwrap();
        let arcs = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)];
        let g = SupportGraph::from_parts(4, vec![0.0, 1.0, 1.0, 0.0], &arcs, 1e-6);
        let mut sep = Separator::new(&inst);
        let round = sep.separate(&g, &SeparationParams::default());
        let fams: Vec<CutFamily> = round.cuts.iter().map(|c| c.family).collect();
        assert!(fams.contains(&CutFamily::Si));
        assert!(!fams.contains(&CutFamily::Ri));
        let params = SeparationParams {
            families: "RI".parse().unwrap(),
            ..SeparationParams::default()
        };
        let round = Separator::new(&inst).separate(&g, &params);
        assert_eq!(round.cuts.len(), 1);
        assert_eq!(round.cuts[0].family, CutFamily::Ri);
    }
}
