//! Mixed (per-route) and compact (single-index) MILP formulations.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::model::{Instance, ModelError, Route, Solution, Variant};
use crate::numeric::EPS_INT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

/// Semantic tag of a model variable. Node ids are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarTag {
    X(usize, usize),
    Y(usize),
    Z(usize, usize),
    V(usize),
    U(usize, usize),
    /// Arc variable of route `r` in the mixed model.
    Xr(usize, usize, usize),
    Yr(usize, usize),
    Zr(usize, usize, usize),
}

impl fmt::Display for VarTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarTag::X(i, j) => write!(f, "x_{}_{}", i + 1, j + 1),
            VarTag::Y(k) => write!(f, "y_{}", k + 1),
            VarTag::Z(i, j) => write!(f, "z_{}_{}", i + 1, j + 1),
            VarTag::V(k) => write!(f, "v_{}", k + 1),
            VarTag::U(i, j) => write!(f, "u_{}_{}", i + 1, j + 1),
            VarTag::Xr(i, j, r) => write!(f, "x_{}_{}_{}", i + 1, j + 1, r + 1),
            VarTag::Yr(k, r) => write!(f, "y_{}_{}", k + 1, r + 1),
            VarTag::Zr(i, j, r) => write!(f, "z_{}_{}_{}", i + 1, j + 1, r + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub tag: VarTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// The five cut families; subpath cuts keep their side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutFamily {
    Ri,
    Si,
    SpiLeft,
    SpiRight,
    Sec,
    Li,
}

impl CutFamily {
    pub fn name(self) -> &'static str {
        match self {
            CutFamily::Ri => "RI",
            CutFamily::Si => "SI",
            CutFamily::SpiLeft => "SPI-left",
            CutFamily::SpiRight => "SPI-right",
            CutFamily::Sec => "SEC",
            CutFamily::Li => "LI",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Structural(&'static str),
    Cut(CutFamily),
    /// Subtour elimination added when an integer point contains a cycle.
    Lazy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
    pub provenance: Provenance,
}

impl Constraint {
    pub fn lhs(&self, point: &[f64]) -> f64 {
        self.coefs.iter().map(|&(v, c)| c * point[v]).sum()
    }

    /// Amount by which `point` breaks the row (0 when satisfied).
    pub fn violation(&self, point: &[f64]) -> f64 {
        let lhs = self.lhs(point);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A maximization MILP.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearModel {
    pub variables: Vec<Variable>,
    pub objective: Vec<(usize, f64)>,
    pub constraints: Vec<Constraint>,
}

impl LinearModel {
    fn add_var(&mut self, kind: VarKind, lower: f64, upper: f64, tag: VarTag) -> usize {
        self.variables.push(Variable {
            kind,
            lower,
            upper,
            tag,
        });
        self.variables.len() - 1
    }

    /// Adds a row, merging repeated variables and dropping zero coefficients.
    pub fn add_row(
        &mut self,
        coefs: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
        provenance: Provenance,
    ) {
        self.constraints.push(Constraint {
            coefs: merge_terms(coefs),
            relation,
            rhs,
            provenance,
        });
    }

    pub fn objective_value(&self, point: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * point[v]).sum()
    }

    /// Rows with the given structural tag.
    pub fn rows_tagged<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a Constraint> + 'a {
        self.constraints
            .iter()
            .filter(move |c| matches!(c.provenance, Provenance::Structural(t) if t == tag))
    }

    /// Writes the model in CPLEX LP text format.
    pub fn to_lp_format(&self) -> String {
        let term_list = |coefs: &[(usize, f64)]| -> String {
            if coefs.is_empty() {
                return "0".into();
            }
            let mut s = String::new();
            for (idx, &(v, c)) in coefs.iter().enumerate() {
                let sign = if c < 0.0 {
                    "-"
                } else if idx > 0 {
                    "+"
                } else {
                    ""
                };
                let _ = write!(s, "{}{} {} ", if idx > 0 { " " } else { "" }, sign, c.abs());
                let _ = write!(s, "{}", self.variables[v].tag);
            }
            s
        };
        let mut out = String::from("Maximize\n obj: ");
        out.push_str(&term_list(&self.objective));
        out.push_str("\nSubject To\n");
        for (r, row) in self.constraints.iter().enumerate() {
            let op = match row.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(
                out,
                " c{}: {} {} {}",
                r + 1,
                term_list(&row.coefs),
                op,
                row.rhs
            );
        }
        out.push_str("Bounds\n");
        for v in &self.variables {
            let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.tag, v.upper);
        }
        let pick = |kind: VarKind| -> Vec<String> {
            self.variables
                .iter()
                .filter(|v| v.kind == kind)
                .map(|v| v.tag.to_string())
                .collect()
        };
        let general = pick(VarKind::Integer);
        if !general.is_empty() {
            let _ = writeln!(out, "General\n {}", general.join(" "));
        }
        let binary = pick(VarKind::Binary);
        if !binary.is_empty() {
            let _ = writeln!(out, "Binary\n {}", binary.join(" "));
        }
        out.push_str("End\n");
        out
    }
}

pub fn merge_terms(mut coefs: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    coefs.sort_by_key(|&(v, _)| v);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coefs.len());
    for (v, c) in coefs {
        match merged.last_mut() {
            Some(last) if last.0 == v => last.1 += c,
            _ => merged.push((v, c)),
        }
    }
    merged.retain(|&(_, c)| c != 0.0);
    merged
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulationKind {
    Compact,
    Mixed,
}

/// An arc or node of the instance graph, independent of the formulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Arc(usize, usize),
    Node(usize),
}

/// Lookup between variable tags and ids.
///
/// Each arc and node also maps to the list of variables that carry its flow:
/// one for the compact model, one per route for the mixed model. Cuts stated
/// on arcs and nodes expand to the sum over that list.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableMap {
    pub kind: FormulationKind,
    n: usize,
    tags: Vec<VarTag>,
    index: HashMap<VarTag, usize>,
    arc_vars: Vec<Vec<usize>>,
    node_vars: Vec<Vec<usize>>,
}

impl VariableMap {
    fn new(kind: FormulationKind, n: usize) -> Self {
        VariableMap {
            kind,
            n,
            tags: Vec::new(),
            index: HashMap::new(),
            arc_vars: vec![Vec::new(); n * n],
            node_vars: vec![Vec::new(); n],
        }
    }

    fn record(&mut self, id: usize, tag: VarTag) {
        debug_assert_eq!(id, self.tags.len());
        self.tags.push(tag);
        self.index.insert(tag, id);
        match tag {
            VarTag::X(i, j) | VarTag::Xr(i, j, _) => self.arc_vars[i * self.n + j].push(id),
            VarTag::Y(k) | VarTag::Yr(k, _) => self.node_vars[k].push(id),
            _ => {}
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn id(&self, tag: VarTag) -> Option<usize> {
        self.index.get(&tag).copied()
    }

    pub fn tag(&self, id: usize) -> VarTag {
        self.tags[id]
    }

    pub fn x(&self, i: usize, j: usize) -> Option<usize> {
        self.id(VarTag::X(i, j))
    }

    pub fn y(&self, k: usize) -> Option<usize> {
        self.id(VarTag::Y(k))
    }

    pub fn arc_vars(&self, i: usize, j: usize) -> &[usize] {
        &self.arc_vars[i * self.n + j]
    }

    pub fn node_vars(&self, k: usize) -> &[usize] {
        &self.node_vars[k]
    }

    /// Total flow on arc `(i, j)` at `point`.
    pub fn arc_value(&self, point: &[f64], i: usize, j: usize) -> f64 {
        self.arc_vars(i, j).iter().map(|&v| point[v]).sum()
    }

    /// Total visit value of node `k` at `point`.
    pub fn node_value(&self, point: &[f64], k: usize) -> f64 {
        self.node_vars(k).iter().map(|&v| point[v]).sum()
    }

    /// Expands arc/node terms into model coefficients.
    pub fn expand(&self, terms: &[(Term, f64)]) -> Vec<(usize, f64)> {
        let mut coefs = Vec::new();
        for &(term, c) in terms {
            let vars = match term {
                Term::Arc(i, j) => self.arc_vars(i, j),
                Term::Node(k) => self.node_vars(k),
            };
            coefs.extend(vars.iter().map(|&v| (v, c)));
        }
        merge_terms(coefs)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormulationError {
    #[error("instance needs at least a source and a destination")]
    TooFewNodes,
    #[error("fleet size must be at least 1")]
    NoRoutes,
}

fn check_buildable(instance: &Instance) -> Result<(), FormulationError> {
    if instance.n() < 2 {
        return Err(FormulationError::TooFewNodes);
    }
    if instance.fleet_size < 1 {
        return Err(FormulationError::NoRoutes);
    }
    Ok(())
}

/// Coefficient of the arc-flow upper bound, `T - s_j - t_jn`.
fn flow_ub_coef(instance: &Instance, j: usize) -> f64 {
    instance.t_max - instance.s(j) - instance.to_sink(j)
}

/// Coefficient of the arc-flow lower bound, `t_1i + s_i + t_ij`.
fn flow_lb_coef(instance: &Instance, i: usize, j: usize) -> f64 {
    instance.from_source(i) + instance.s(i) + instance.t(i, j)
}

/// Adds the per-route (or single-index) routing system for one "layer".
/// `x`, `y`, `z` give the variable ids of the layer.
fn add_routing_layer(
    model: &mut LinearModel,
    instance: &Instance,
    x: &dyn Fn(usize, usize) -> usize,
    y: &dyn Fn(usize) -> usize,
    z: &dyn Fn(usize, usize) -> usize,
) {
    let n = instance.n();
    let source = instance.source();
    for k in instance.customers() {
        let inflow: Vec<(usize, f64)> = (0..n - 1)
            .filter(|&i| instance.is_traversable(i, k))
            .map(|i| (x(i, k), 1.0))
            .collect();
        let outflow: Vec<(usize, f64)> = (1..n)
            .filter(|&j| instance.is_traversable(k, j))
            .map(|j| (x(k, j), 1.0))
            .collect();
        let mut row = inflow.clone();
        row.push((y(k), -1.0));
        model.add_row(
            row,
            Relation::Eq,
            0.0,
            Provenance::Structural("connectivity-in"),
        );
        let mut row = outflow.clone();
        row.push((y(k), -1.0));
        model.add_row(
            row,
            Relation::Eq,
            0.0,
            Provenance::Structural("connectivity-out"),
        );

        // out-flow minus in-flow equals the time spent on k and its out-arcs
        let mut row = Vec::new();
        for j in (1..n).filter(|&j| instance.is_traversable(k, j)) {
            row.push((z(k, j), 1.0));
            row.push((x(k, j), -(instance.t(k, j) + instance.s(k))));
        }
        for i in (0..n - 1).filter(|&i| instance.is_traversable(i, k)) {
            row.push((z(i, k), -1.0));
        }
        model.add_row(row, Relation::Eq, 0.0, Provenance::Structural("flow"));
    }
    for (i, j) in instance.traversable_arcs() {
        model.add_row(
            vec![(z(i, j), 1.0), (x(i, j), -flow_ub_coef(instance, j))],
            Relation::Le,
            0.0,
            Provenance::Structural("flow-ub"),
        );
        model.add_row(
            vec![(z(i, j), 1.0), (x(i, j), -flow_lb_coef(instance, i, j))],
            Relation::Ge,
            0.0,
            Provenance::Structural("flow-lb"),
        );
    }
    for k in instance.customers() {
        model.add_row(
            vec![(z(source, k), 1.0), (x(source, k), -instance.t(source, k))],
            Relation::Eq,
            0.0,
            Provenance::Structural("depot-flow"),
        );
    }
}

fn arc_var_kind(instance: &Instance, i: usize, j: usize) -> (VarKind, f64) {
    if i == instance.source() && j == instance.sink() {
        (VarKind::Integer, instance.fleet_size as f64)
    } else {
        (VarKind::Binary, 1.0)
    }
}

/// Single-index formulation; in variant PL it carries the route-identifier
/// variables `v` and one `u` per logical pair.
pub fn build_compact(instance: &Instance) -> Result<(LinearModel, VariableMap), FormulationError> {
    check_buildable(instance)?;
    let n = instance.n();
    let (source, sink) = (instance.source(), instance.sink());
    let mut model = LinearModel::default();
    let mut map = VariableMap::new(FormulationKind::Compact, n);

    let arcs: Vec<(usize, usize)> = instance.traversable_arcs().collect();
    for &(i, j) in &arcs {
        let (kind, upper) = arc_var_kind(instance, i, j);
        let id = model.add_var(kind, 0.0, upper, VarTag::X(i, j));
        map.record(id, VarTag::X(i, j));
    }
    for k in instance.customers() {
        let id = model.add_var(VarKind::Binary, 0.0, 1.0, VarTag::Y(k));
        map.record(id, VarTag::Y(k));
        model.objective.push((id, instance.profit[k]));
    }
    for &(i, j) in &arcs {
        let id = model.add_var(VarKind::Continuous, 0.0, f64::INFINITY, VarTag::Z(i, j));
        map.record(id, VarTag::Z(i, j));
    }
    model.objective.retain(|&(_, c)| c != 0.0);

    let x = |i: usize, j: usize| map.id(VarTag::X(i, j)).expect("x variable");
    let y = |k: usize| map.id(VarTag::Y(k)).expect("y variable");
    let z = |i: usize, j: usize| map.id(VarTag::Z(i, j)).expect("z variable");
    let m = instance.fleet_size as f64;

    let start: Vec<(usize, f64)> = (1..n).map(|j| (x(source, j), 1.0)).collect();
    model.add_row(start, Relation::Eq, m, Provenance::Structural("start"));
    let end: Vec<(usize, f64)> = (0..n - 1).map(|i| (x(i, sink), 1.0)).collect();
    model.add_row(end, Relation::Eq, m, Provenance::Structural("end"));
    add_routing_layer(&mut model, instance, &x, &y, &z);
    for &k in &instance.mandatory {
        model.add_row(
            vec![(y(k), 1.0)],
            Relation::Eq,
            1.0,
            Provenance::Structural("mandatory"),
        );
    }
    for &(i, j) in &instance.physical {
        if instance.is_traversable(i, j) {
            model.add_row(
                vec![(x(i, j), 1.0)],
                Relation::Eq,
                0.0,
                Provenance::Structural("physical"),
            );
        }
    }

    if instance.variant == Variant::PL {
        add_route_identifiers(&mut model, &mut map, instance);
    }
    Ok((model, map))
}

/// Position of customer `k` among the customers, starting at 1 (with 0-based
/// ids this is the id itself). The big-M `n - 2` in the route-identifier rows
/// only covers this range, not the 1-based node ids `2..n-1`.
fn customer_ordinal(k: usize) -> f64 {
    k as f64
}

fn add_route_identifiers(model: &mut LinearModel, map: &mut VariableMap, instance: &Instance) {
    let n = instance.n();
    let big = (n - 2) as f64;
    let source = instance.source();
    for k in instance.customers() {
        let id = model.add_var(VarKind::Continuous, 0.0, f64::INFINITY, VarTag::V(k));
        map.record(id, VarTag::V(k));
    }
    let pairs: Vec<(usize, usize)> = instance.logical.iter().copied().collect();
    for &(i, j) in &pairs {
        let id = model.add_var(VarKind::Binary, 0.0, 1.0, VarTag::U(i, j));
        map.record(id, VarTag::U(i, j));
    }
    let x = |i: usize, j: usize| map.id(VarTag::X(i, j)).expect("x variable");
    let v = |k: usize| map.id(VarTag::V(k)).expect("v variable");
    for k in instance.customers() {
        let idx = customer_ordinal(k);
        // v_k >= idx x_1k
        model.add_row(
            vec![(v(k), 1.0), (x(source, k), -idx)],
            Relation::Ge,
            0.0,
            Provenance::Structural("route-id-first-lb"),
        );
        // v_k <= idx x_1k - (n-2)(x_1k - 1)
        model.add_row(
            vec![(v(k), 1.0), (x(source, k), big - idx)],
            Relation::Le,
            big,
            Provenance::Structural("route-id-first-ub"),
        );
    }
    for i in instance.customers() {
        for j in instance.customers().filter(|&j| j != i) {
            // v_j >= v_i + (n-2)(x_ij - 1)
            model.add_row(
                vec![(v(j), 1.0), (v(i), -1.0), (x(i, j), -big)],
                Relation::Ge,
                -big,
                Provenance::Structural("route-id-forward-lb"),
            );
            // v_j <= v_i + (n-2)(1 - x_ij)
            model.add_row(
                vec![(v(j), 1.0), (v(i), -1.0), (x(i, j), big)],
                Relation::Le,
                big,
                Provenance::Structural("route-id-forward-ub"),
            );
        }
    }
    for &(i, j) in &pairs {
        let u = map.id(VarTag::U(i, j)).expect("u variable");
        // v_i >= v_j + 1 - (n-2)(1 - u)
        model.add_row(
            vec![(v(i), 1.0), (v(j), -1.0), (u, -big)],
            Relation::Ge,
            1.0 - big,
            Provenance::Structural("conflict-ge"),
        );
        // v_i <= v_j - 1 + (n-2) u
        model.add_row(
            vec![(v(i), 1.0), (v(j), -1.0), (u, -big)],
            Relation::Le,
            -1.0,
            Provenance::Structural("conflict-le"),
        );
    }
}

/// Vehicle-indexed formulation with one copy of `x`, `y`, `z` per route.
pub fn build_mixed(instance: &Instance) -> Result<(LinearModel, VariableMap), FormulationError> {
    check_buildable(instance)?;
    let n = instance.n();
    let routes = instance.fleet_size;
    let (source, sink) = (instance.source(), instance.sink());
    let mut model = LinearModel::default();
    let mut map = VariableMap::new(FormulationKind::Mixed, n);
    let arcs: Vec<(usize, usize)> = instance.traversable_arcs().collect();

    for r in 0..routes {
        for &(i, j) in &arcs {
            let (kind, upper) = arc_var_kind(instance, i, j);
            let id = model.add_var(kind, 0.0, upper, VarTag::Xr(i, j, r));
            map.record(id, VarTag::Xr(i, j, r));
        }
    }
    for r in 0..routes {
        for k in instance.customers() {
            let id = model.add_var(VarKind::Binary, 0.0, 1.0, VarTag::Yr(k, r));
            map.record(id, VarTag::Yr(k, r));
            if instance.profit[k] != 0.0 {
                model.objective.push((id, instance.profit[k]));
            }
        }
    }
    for r in 0..routes {
        for &(i, j) in &arcs {
            let id = model.add_var(VarKind::Continuous, 0.0, f64::INFINITY, VarTag::Zr(i, j, r));
            map.record(id, VarTag::Zr(i, j, r));
        }
    }

    let m = routes as f64;
    let xr = |i: usize, j: usize, r: usize| map.id(VarTag::Xr(i, j, r)).expect("x variable");
    let yr = |k: usize, r: usize| map.id(VarTag::Yr(k, r)).expect("y variable");
    let zr = |i: usize, j: usize, r: usize| map.id(VarTag::Zr(i, j, r)).expect("z variable");

    let start: Vec<(usize, f64)> = (0..routes)
        .flat_map(|r| (1..n).map(move |j| (r, j)))
        .map(|(r, j)| (xr(source, j, r), 1.0))
        .collect();
    model.add_row(start, Relation::Eq, m, Provenance::Structural("start"));
    let end: Vec<(usize, f64)> = (0..routes)
        .flat_map(|r| (0..n - 1).map(move |i| (r, i)))
        .map(|(r, i)| (xr(i, sink, r), 1.0))
        .collect();
    model.add_row(end, Relation::Eq, m, Provenance::Structural("end"));
    for r in 0..routes {
        add_routing_layer(
            &mut model,
            instance,
            &|i, j| xr(i, j, r),
            &|k| yr(k, r),
            &|i, j| zr(i, j, r),
        );
    }
    for k in instance.customers() {
        let row: Vec<(usize, f64)> = (0..routes).map(|r| (yr(k, r), 1.0)).collect();
        model.add_row(row, Relation::Le, 1.0, Provenance::Structural("one-visit"));
    }
    for &k in &instance.mandatory {
        let row: Vec<(usize, f64)> = (0..routes).map(|r| (yr(k, r), 1.0)).collect();
        model.add_row(row, Relation::Eq, 1.0, Provenance::Structural("mandatory"));
    }
    for &(i, j) in &instance.physical {
        if instance.is_traversable(i, j) {
            let row: Vec<(usize, f64)> = (0..routes).map(|r| (xr(i, j, r), 1.0)).collect();
            model.add_row(row, Relation::Eq, 0.0, Provenance::Structural("physical"));
        }
    }
    if instance.variant == Variant::PL {
        for k in instance.customers() {
            let conflicts = instance.conflicts_of(k);
            if conflicts.is_empty() {
                continue;
            }
            let size = conflicts.len() as f64;
            for r in 0..routes {
                // |C_k| (1 - y_kr) >= sum_{i in C_k} y_ir
                let mut row: Vec<(usize, f64)> =
                    conflicts.iter().map(|&i| (yr(i, r), 1.0)).collect();
                row.push((yr(k, r), size));
                model.add_row(row, Relation::Le, size, Provenance::Structural("logical"));
            }
        }
    }
    Ok((model, map))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractError {
    #[error("variable {0} is not integral")]
    Fractional(usize),
    #[error("flow leaves node {} without reaching the destination", .0 + 1)]
    DeadEnd(usize),
    #[error("assignment contains a subtour")]
    Subtour(Vec<usize>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Rebuilds routes from an integral assignment of either formulation.
pub fn extract_solution(
    instance: &Instance,
    map: &VariableMap,
    assignment: &[f64],
) -> Result<Solution, ExtractError> {
    let n = instance.n();
    let (source, sink) = (instance.source(), instance.sink());
    let mut flow = vec![vec![0usize; n]; n];
    for (i, j) in instance.traversable_arcs() {
        for &v in map.arc_vars(i, j) {
            let value = assignment[v];
            if (value - value.round()).abs() > EPS_INT {
                return Err(ExtractError::Fractional(v));
            }
            flow[i][j] += value.round().max(0.0) as usize;
        }
    }

    let mut routes = Vec::new();
    let mut seen = vec![false; n];
    for _ in 0..flow[source][sink] {
        routes.push(Route::empty(instance));
    }
    flow[source][sink] = 0;
    for first in 1..sink {
        for _ in 0..flow[source][first] {
            let mut nodes = vec![source];
            let mut at = first;
            loop {
                if at == sink {
                    nodes.push(sink);
                    break;
                }
                if seen[at] {
                    return Err(ExtractError::DeadEnd(at));
                }
                seen[at] = true;
                nodes.push(at);
                match (1..n).find(|&j| flow[at][j] > 0) {
                    Some(next) => {
                        flow[at][next] -= 1;
                        at = next;
                    }
                    None => return Err(ExtractError::DeadEnd(at)),
                }
            }
            routes.push(Route::new(instance, nodes)?);
        }
    }

    // Arcs left over form cycles among customers.
    let leftover: BTreeSet<usize> = (1..sink)
        .filter(|&i| (1..n).any(|j| flow[i][j] > 0))
        .collect();
    if let Some(&start) = leftover.iter().next() {
        let mut cycle = vec![start];
        let mut at = start;
        while let Some(next) = (1..sink).find(|&j| flow[at][j] > 0) {
            flow[at][next] -= 1;
            if next == start || cycle.contains(&next) {
                break;
            }
            cycle.push(next);
            at = next;
        }
        return Err(ExtractError::Subtour(cycle));
    }
    Ok(Solution::new(instance, routes))
}
