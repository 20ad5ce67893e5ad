//! Instances, routes, solutions and feasibility checking.
//!
//! Node ids are 0-based internally: node `0` is the source, node `n - 1` the
//! destination and `1..n-1` are the customers. Files and messages use the
//! 1-based numbering.

mod io;

pub use io::{parse_instance, parse_solution, write_instance, write_solution};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::numeric::{exact_sum, EPS_FEAS};

/// Whether logical incompatibilities take part in the problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// Physical incompatibilities only.
    #[default]
    P,
    /// Physical and logical incompatibilities.
    PL,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::P => write!(f, "P"),
            Variant::PL => write!(f, "PL"),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P" => Ok(Variant::P),
            "PL" => Ok(Variant::PL),
            other => Err(ModelError::Invalid(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unknown node id {}", .0 + 1)]
    UnknownNode(usize),
    #[error("arc ({}, {}) is not a traversable arc", .0 + 1, .1 + 1)]
    ArcNotTraversable(usize, usize),
    #[error("line {line}: malformed header: {detail}")]
    MalformedHeader { line: usize, detail: String },
    #[error("line {line}: {detail}")]
    Malformed { line: usize, detail: String },
    #[error("line {line}: duplicate section {section}")]
    DuplicateSection { line: usize, section: String },
    #[error("line {line}: section {section} out of order")]
    SectionOrder { line: usize, section: String },
    #[error("line {line}: node id {id} out of range")]
    OutOfRange { line: usize, id: usize },
    #[error("physical incompatibility ({}, {}) has no reverse arc", .0 + 1, .1 + 1)]
    AsymmetricPhysical(usize, usize),
    #[error("instance has no coordinates to write")]
    MissingCoordinates,
    #[error("invalid instance: {0}")]
    Invalid(String),
}

/// A TOP-ST-MIN instance on a directed graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    /// Number of routes `m`.
    pub fleet_size: usize,
    /// Time budget of every route.
    pub t_max: f64,
    /// Planar coordinates, when the travel times are Euclidean.
    pub coords: Option<Vec<(f64, f64)>>,
    pub profit: Vec<f64>,
    pub service: Vec<f64>,
    /// Row-major `n x n` travel-time matrix.
    pub travel: Vec<Vec<f64>>,
    pub mandatory: BTreeSet<usize>,
    /// Removed arcs. Only arcs of the traversable set matter for routing.
    pub physical: BTreeSet<(usize, usize)>,
    /// Unordered customer pairs, stored with the smaller id first.
    pub logical: BTreeSet<(usize, usize)>,
    pub variant: Variant,
    /// Generator output: customer-to-customer removals come in both directions.
    pub symmetric_physical: bool,
    /// Compare durations against the budget without tolerance.
    pub exact_time: bool,
}

impl Instance {
    /// Builds a Euclidean instance with no incompatibilities or mandatory nodes.
    pub fn euclidean(
        fleet_size: usize,
        t_max: f64,
        coords: Vec<(f64, f64)>,
        profit: Vec<f64>,
        service: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let travel = euclidean_matrix(&coords);
        let instance = Instance {
            fleet_size,
            t_max,
            coords: Some(coords),
            profit,
            service,
            travel,
            mandatory: BTreeSet::new(),
            physical: BTreeSet::new(),
            logical: BTreeSet::new(),
            variant: Variant::P,
            symmetric_physical: false,
            exact_time: false,
        };
        instance.validate()?;
        Ok(instance)
    }

    /// Builds an instance from an explicit (possibly asymmetric) travel matrix.
    pub fn with_travel_matrix(
        fleet_size: usize,
        t_max: f64,
        travel: Vec<Vec<f64>>,
        profit: Vec<f64>,
        service: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let instance = Instance {
            fleet_size,
            t_max,
            coords: None,
            profit,
            service,
            travel,
            mandatory: BTreeSet::new(),
            physical: BTreeSet::new(),
            logical: BTreeSet::new(),
            variant: Variant::P,
            symmetric_physical: false,
            exact_time: false,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.n();
        if n < 2 {
            return Err(ModelError::Invalid(
                "at least a source and a destination are required".into(),
            ));
        }
        if self.fleet_size < 1 {
            return Err(ModelError::Invalid("fleet size must be at least 1".into()));
        }
        if self.service.len() != n
            || self.travel.len() != n
            || self.travel.iter().any(|r| r.len() != n)
        {
            return Err(ModelError::Invalid(
                "per-node vectors disagree on the node count".into(),
            ));
        }
        if let Some(coords) = &self.coords {
            if coords.len() != n {
                return Err(ModelError::Invalid(
                    "coordinate count differs from node count".into(),
                ));
            }
        }
        if !self.t_max.is_finite() || self.t_max < 0.0 {
            return Err(ModelError::Invalid(
                "time budget must be finite and nonnegative".into(),
            ));
        }
        let bad_value = |v: &f64| !v.is_finite() || *v < 0.0;
        if self.profit.iter().any(bad_value)
            || self.service.iter().any(bad_value)
            || self.travel.iter().flatten().any(bad_value)
        {
            return Err(ModelError::Invalid(
                "profits and times must be finite and nonnegative".into(),
            ));
        }
        for &k in &self.mandatory {
            if !self.is_customer(k) {
                return Err(ModelError::Invalid(format!(
                    "mandatory node {} is not a customer",
                    k + 1
                )));
            }
        }
        for &(i, j) in &self.logical {
            if i >= j || !self.is_customer(i) || !self.is_customer(j) {
                return Err(ModelError::Invalid(format!(
                    "logical pair ({}, {}) must join two distinct customers",
                    i + 1,
                    j + 1
                )));
            }
        }
        for &(i, j) in &self.physical {
            if i >= n || j >= n || i == j {
                return Err(ModelError::Invalid(format!(
                    "physical arc ({}, {}) is not an arc",
                    i + 1,
                    j + 1
                )));
            }
            if self.symmetric_physical
                && self.is_customer(i)
                && self.is_customer(j)
                && !self.physical.contains(&(j, i))
            {
                return Err(ModelError::AsymmetricPhysical(i, j));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.profit.len()
    }

    pub fn source(&self) -> usize {
        0
    }

    pub fn sink(&self) -> usize {
        self.n() - 1
    }

    pub fn customers(&self) -> std::ops::Range<usize> {
        1..self.n() - 1
    }

    pub fn customer_count(&self) -> usize {
        self.n().saturating_sub(2)
    }

    pub fn is_customer(&self, k: usize) -> bool {
        k >= 1 && k + 1 < self.n()
    }

    pub fn t(&self, i: usize, j: usize) -> f64 {
        self.travel[i][j]
    }

    pub fn s(&self, k: usize) -> f64 {
        self.service[k]
    }

    /// Membership in the traversable arc set: no arc enters the source, none
    /// leaves the destination, no self-loops.
    pub fn is_traversable(&self, i: usize, j: usize) -> bool {
        let n = self.n();
        i != j && i + 1 < n && j >= 1 && j < n
    }

    /// Traversable and not physically removed.
    pub fn arc_allowed(&self, i: usize, j: usize) -> bool {
        self.is_traversable(i, j) && !self.physical.contains(&(i, j))
    }

    /// Traversable arcs in lexicographic order.
    pub fn traversable_arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n();
        (0..n - 1).flat_map(move |i| (1..n).filter(move |&j| j != i).map(move |j| (i, j)))
    }

    /// Size of the complete directed graph, `n (n - 1)`.
    pub fn full_arc_count(&self) -> usize {
        self.n() * (self.n() - 1)
    }

    /// True when `i` and `j` may not share a route (variant PL only).
    pub fn logically_incompatible(&self, i: usize, j: usize) -> bool {
        self.variant == Variant::PL && self.logical.contains(&(i.min(j), i.max(j)))
    }

    /// Customers logically incompatible with `k`.
    pub fn conflicts_of(&self, k: usize) -> Vec<usize> {
        if self.variant != Variant::PL {
            return Vec::new();
        }
        self.logical
            .iter()
            .filter_map(|&(a, b)| {
                if a == k {
                    Some(b)
                } else if b == k {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn within_budget(&self, duration: f64) -> bool {
        if self.exact_time {
            duration <= self.t_max
        } else {
            duration <= self.t_max + EPS_FEAS
        }
    }

    /// Travel time from the source to `i` (zero for the source itself).
    pub fn from_source(&self, i: usize) -> f64 {
        if i == self.source() {
            0.0
        } else {
            self.t(self.source(), i)
        }
    }

    /// Travel time from `j` to the destination (zero for the destination).
    pub fn to_sink(&self, j: usize) -> f64 {
        if j == self.sink() {
            0.0
        } else {
            self.t(j, self.sink())
        }
    }
}

/// Euclidean distance matrix, full precision.
pub fn euclidean_matrix(coords: &[(f64, f64)]) -> Vec<Vec<f64>> {
    coords
        .iter()
        .map(|&(xi, yi)| {
            coords
                .iter()
                .map(|&(xj, yj)| {
                    let (dx, dy) = (xi - xj, yi - yj);
                    (dx * dx + dy * dy).sqrt()
                })
                .collect()
        })
        .collect()
}

/// Sum of travel times along `nodes` plus the service times of the interior nodes.
pub fn route_duration(instance: &Instance, nodes: &[usize]) -> Result<f64, ModelError> {
    let n = instance.n();
    if let Some(&bad) = nodes.iter().find(|&&v| v >= n) {
        return Err(ModelError::UnknownNode(bad));
    }
    for w in nodes.windows(2) {
        if !instance.is_traversable(w[0], w[1]) {
            return Err(ModelError::ArcNotTraversable(w[0], w[1]));
        }
    }
    let travel = nodes.windows(2).map(|w| instance.t(w[0], w[1]));
    let service = nodes
        .iter()
        .skip(1)
        .take(nodes.len().saturating_sub(2))
        .map(|&k| instance.s(k));
    Ok(exact_sum(travel.chain(service)))
}

/// A source-to-destination node sequence with its cached duration.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub nodes: Vec<usize>,
    pub duration: f64,
}

impl Route {
    pub fn new(instance: &Instance, nodes: Vec<usize>) -> Result<Self, ModelError> {
        let duration = route_duration(instance, &nodes)?;
        Ok(Route { nodes, duration })
    }

    /// The route `[source, destination]`.
    pub fn empty(instance: &Instance) -> Self {
        let nodes = vec![instance.source(), instance.sink()];
        let duration = instance.t(instance.source(), instance.sink());
        Route { nodes, duration }
    }

    /// Interior nodes.
    pub fn customers(&self) -> &[usize] {
        let len = self.nodes.len();
        if len < 2 {
            &[]
        } else {
            &self.nodes[1..len - 1]
        }
    }

    pub fn profit(&self, instance: &Instance) -> f64 {
        exact_sum(self.customers().iter().map(|&k| instance.profit[k]))
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.nodes.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "{}", ids.join(" "))
    }
}

/// A set of routes and the profit they collect.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub profit: f64,
}

impl Solution {
    pub fn new(instance: &Instance, routes: Vec<Route>) -> Self {
        let profit = exact_sum(routes.iter().map(|r| r.profit(instance)));
        Solution { routes, profit }
    }

    pub fn is_feasible(&self, instance: &Instance) -> bool {
        check_solution(instance, self).is_feasible()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RouteCount {
        expected: usize,
        found: usize,
    },
    BadEndpoint {
        route: usize,
    },
    UnknownNode {
        route: usize,
        node: usize,
    },
    InvalidArc {
        route: usize,
        from: usize,
        to: usize,
    },
    DurationExceeded {
        route: usize,
        duration: f64,
    },
    MandatoryMissing(usize),
    Revisit(usize),
    PhysicalArc(usize, usize),
    LogicalPair(usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::RouteCount { expected, found } => {
                write!(f, "route-count: expected {expected}, found {found}")
            }
            Violation::BadEndpoint { route } => write!(f, "bad-endpoint: route {}", route + 1),
            Violation::UnknownNode { route, node } => {
                write!(f, "unknown-node: route {} node {}", route + 1, node + 1)
            }
            Violation::InvalidArc { route, from, to } => {
                write!(
                    f,
                    "invalid-arc: route {} arc ({}, {})",
                    route + 1,
                    from + 1,
                    to + 1
                )
            }
            Violation::DurationExceeded { route, duration } => {
                write!(
                    f,
                    "duration-exceeded: route {} duration {duration}",
                    route + 1
                )
            }
            Violation::MandatoryMissing(k) => write!(f, "mandatory-missing: node {}", k + 1),
            Violation::Revisit(k) => write!(f, "revisit: node {}", k + 1),
            Violation::PhysicalArc(i, j) => write!(f, "physical-arc: ({}, {})", i + 1, j + 1),
            Violation::LogicalPair(i, j) => write!(f, "logical-pair: ({}, {})", i + 1, j + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every constraint the solution breaks; empty when it is feasible.
pub fn check_solution(instance: &Instance, solution: &Solution) -> FeasibilityReport {
    let mut violations = Vec::new();
    let n = instance.n();
    if solution.routes.len() != instance.fleet_size {
        violations.push(Violation::RouteCount {
            expected: instance.fleet_size,
            found: solution.routes.len(),
        });
    }
    let mut visits = vec![0usize; n];
    for (r, route) in solution.routes.iter().enumerate() {
        let nodes = &route.nodes;
        if nodes.len() < 2
            || nodes[0] != instance.source()
            || nodes[nodes.len() - 1] != instance.sink()
        {
            violations.push(Violation::BadEndpoint { route: r });
        }
        if let Some(&bad) = nodes.iter().find(|&&v| v >= n) {
            violations.push(Violation::UnknownNode {
                route: r,
                node: bad,
            });
            continue;
        }
        for w in nodes.windows(2) {
            let (i, j) = (w[0], w[1]);
            if !instance.is_traversable(i, j) {
                violations.push(Violation::InvalidArc {
                    route: r,
                    from: i,
                    to: j,
                });
            } else if instance.physical.contains(&(i, j)) {
                violations.push(Violation::PhysicalArc(i, j));
            }
        }
        for &k in nodes.iter().filter(|&&k| instance.is_customer(k)) {
            visits[k] += 1;
        }
        // Recompute rather than trust the cached value.
        let travel = nodes.windows(2).map(|w| instance.t(w[0], w[1]));
        let service = route.customers().iter().map(|&k| instance.s(k));
        let duration = exact_sum(travel.chain(service));
        if !instance.within_budget(duration) {
            violations.push(Violation::DurationExceeded { route: r, duration });
        }
        if instance.variant == Variant::PL {
            let interior = route.customers();
            for (a, &i) in interior.iter().enumerate() {
                for &j in &interior[a + 1..] {
                    if i != j && instance.logically_incompatible(i, j) {
                        violations.push(Violation::LogicalPair(i.min(j), i.max(j)));
                    }
                }
            }
        }
    }
    for k in instance.customers() {
        if visits[k] > 1 {
            violations.push(Violation::Revisit(k));
        }
    }
    for &k in &instance.mandatory {
        if visits[k] == 0 {
            violations.push(Violation::MandatoryMissing(k));
        }
    }
    FeasibilityReport { violations }
}
