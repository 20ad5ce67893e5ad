use std::collections::BTreeSet;

use crate::model::{Instance, Variant};
use crate::separation::DepotBounds;

/// Customers and arcs that no feasible route can use.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Fixings {
    pub nodes: BTreeSet<usize>,
    pub arcs: BTreeSet<(usize, usize)>,
}

impl Fixings {
    /// A mandatory customer cannot be reached, so the instance is infeasible.
    pub fn proves_infeasible(&self, instance: &Instance) -> bool {
        instance.mandatory.iter().any(|k| self.nodes.contains(k))
    }
}

/// Unreachable customers (over budget even alone, or with no usable in- or
/// out-arc) and unreachable arcs (over budget on their own, or joining a
/// logically incompatible pair in variant PL).
///
/// Times between depots and customers are shortest-path lower bounds, so no
/// feasible route is removed even without the triangle inequality.
pub fn preprocess(instance: &Instance) -> Fixings {
    let depots = DepotBounds::new(instance);
    let n = instance.n();
    let (source, sink) = (instance.source(), instance.sink());
    let mut fixings = Fixings::default();
    for k in instance.customers() {
        let alone = depots.from_source[k] + instance.s(k) + depots.to_sink[k];
        let has_in = (0..n - 1).any(|i| instance.arc_allowed(i, k));
        let has_out = (1..n).any(|j| instance.arc_allowed(k, j));
        if !instance.within_budget(alone) || !has_in || !has_out {
            fixings.nodes.insert(k);
        }
    }
    for (i, j) in instance.traversable_arcs() {
        let s_i = if i == source { 0.0 } else { instance.s(i) };
        let s_j = if j == sink { 0.0 } else { instance.s(j) };
        let time = depots.from_source[i] + s_i + instance.t(i, j) + s_j + depots.to_sink[j];
        if !instance.within_budget(time) {
            fixings.arcs.insert((i, j));
        }
    }
    if instance.variant == Variant::PL {
        for &(i, j) in &instance.logical {
            fixings.arcs.insert((i, j));
            fixings.arcs.insert((j, i));
        }
    }
    fixings
}
