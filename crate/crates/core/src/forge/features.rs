use std::collections::BTreeSet;

use rand::Rng;

use crate::model::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicalMethod {
    /// Pair each customer with its farthest customers.
    Fli,
    /// Pair each customer with its nearest customers.
    Nli,
}

/// Partners per customer: `ceil(fraction * (customers - 1))`, at least one.
pub fn logical_per_node(customers: usize, fraction: f64) -> usize {
    if customers < 2 {
        return 0;
    }
    let q = (fraction * (customers - 1) as f64 - 1e-9).ceil() as usize;
    q.clamp(1, customers - 1)
}

/// Conflicting pairs: every customer against its `q` farthest (FLI) or
/// nearest (NLI) customers, distance ties broken by id. Pairs are stored
/// once, smaller id first.
pub fn select_logical(
    instance: &Instance,
    method: LogicalMethod,
    fraction: f64,
) -> BTreeSet<(usize, usize)> {
    let customers: Vec<usize> = instance.customers().collect();
    let q = logical_per_node(customers.len(), fraction);
    let mut pairs = BTreeSet::new();
    for &i in &customers {
        let mut others: Vec<usize> = customers.iter().copied().filter(|&j| j != i).collect();
        // travel times are the Euclidean distances
        let d = |j: usize| instance.t(i, j);
        others.sort_by(|&a, &b| match method {
            LogicalMethod::Fli => d(b).total_cmp(&d(a)).then(a.cmp(&b)),
            LogicalMethod::Nli => d(a).total_cmp(&d(b)).then(a.cmp(&b)),
        });
        for &j in others.iter().take(q) {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    pairs
}

/// Service times sharing `share * m * T_max` in proportion to uniform draws,
/// and the budget stretched by `stretch`. Depots get zero.
pub fn assign_service_times<R: Rng>(
    instance: &Instance,
    share: f64,
    stretch: f64,
    rng: &mut R,
) -> (Vec<f64>, f64) {
    let n = instance.n();
    let total = share * instance.fleet_size as f64 * instance.t_max;
    let mut service = vec![0.0; n];
    let draws: Vec<f64> = instance.customers().map(|_| rng.gen::<f64>()).collect();
    let sum: f64 = draws.iter().sum();
    if !draws.is_empty() {
        let customers: Vec<usize> = instance.customers().collect();
        if sum > 0.0 {
            for (&k, &u) in customers.iter().zip(&draws) {
                service[k] = total * u / sum;
            }
        } else {
            for &k in &customers {
                service[k] = total / customers.len() as f64;
            }
        }
        // put the rounding residue on the last customer
        let last = customers[customers.len() - 1];
        let others: f64 = customers[..customers.len() - 1]
            .iter()
            .map(|&k| service[k])
            .sum();
        service[last] = (total - others).max(0.0);
    }
    (service, stretch * instance.t_max)
}
