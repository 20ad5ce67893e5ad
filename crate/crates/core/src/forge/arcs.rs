//! Arc removal for physical incompatibilities.
//!
//! Arcs are removed in symmetric pairs `{i, j}` over the full arc set of the
//! complete directed graph. When the removal target is odd, the one unpaired
//! arc is `(sink, source)`, which no route can use.

use std::collections::BTreeSet;

use super::GenError;

/// Unordered node pair, smaller id first.
pub type Pair = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct ArcPlan {
    pub n: usize,
    /// Pairs that must stay.
    pub protected: BTreeSet<Pair>,
    /// Directed arcs to remove (`|I|`).
    pub removals: usize,
}

impl ArcPlan {
    /// `|I| = floor(fraction * n(n-1))`; the source-sink pair and the depot
    /// pairs of each mandatory node are protected.
    pub fn new(n: usize, mandatory: &[usize], fraction: f64) -> Self {
        let arcs = n * (n - 1);
        let removals = (fraction * arcs as f64 + 1e-9).floor() as usize;
        let mut protected = BTreeSet::from([(0, n - 1)]);
        for &k in mandatory {
            protected.insert((0, k));
            protected.insert((k, n - 1));
        }
        ArcPlan {
            n,
            protected,
            removals,
        }
    }

    pub fn pair_removals(&self) -> usize {
        self.removals / 2
    }

    /// Kept directed arcs `gamma`.
    pub fn gamma(&self) -> usize {
        self.n * (self.n - 1) - self.removals
    }

    pub fn removable(&self) -> Vec<Pair> {
        let mut pairs = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.protected.contains(&(i, j)) {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    fn check(&self) -> Result<Vec<Pair>, GenError> {
        let pairs = self.removable();
        if pairs.len() < self.pair_removals() {
            return Err(GenError::ArcBudget {
                needed: self.pair_removals(),
                available: pairs.len(),
            });
        }
        Ok(pairs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcSelection {
    pub n: usize,
    pub removed: BTreeSet<Pair>,
    /// `(sink, source)` removed on its own.
    pub odd_arc: bool,
}

impl ArcSelection {
    pub fn removed_arcs(&self) -> BTreeSet<(usize, usize)> {
        let mut arcs: BTreeSet<(usize, usize)> = self
            .removed
            .iter()
            .flat_map(|&(i, j)| [(i, j), (j, i)])
            .collect();
        if self.odd_arc {
            arcs.insert((self.n - 1, 0));
        }
        arcs
    }

    /// Kept pairs at each node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![self.n - 1; self.n];
        for &(i, j) in &self.removed {
            deg[i] -= 1;
            deg[j] -= 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }
}

/// Customer clusters and which cluster pairs are incompatible.
#[derive(Debug, Clone, PartialEq)]
pub struct Clusters {
    /// Cluster per node; `None` for the depots.
    pub of: Vec<Option<usize>>,
    pub count: usize,
    /// Symmetric, false on the diagonal.
    pub incompatible: Vec<Vec<bool>>,
}

impl Clusters {
    fn violating(&self, (i, j): Pair) -> bool {
        match (self.of[i], self.of[j]) {
            (Some(a), Some(b)) => self.incompatible[a][b],
            _ => false,
        }
    }
}

/// Clusters-based objective of a selection: kept arcs joining incompatible
/// clusters, then the largest number of kept arcs leaving one cluster
/// towards customers.
pub fn cpi_objective(selection: &ArcSelection, clusters: &Clusters) -> (usize, usize) {
    let mut violations = 0;
    let mut load = vec![0usize; clusters.count];
    for i in 0..selection.n {
        for j in i + 1..selection.n {
            if selection.removed.contains(&(i, j)) {
                continue;
            }
            if clusters.violating((i, j)) {
                violations += 2;
            }
            if let (Some(a), Some(b)) = (clusters.of[i], clusters.of[j]) {
                load[a] += 1;
                load[b] += 1;
            }
        }
    }
    (violations, load.into_iter().max().unwrap_or(0))
}

/// Removes `count` pairs from `candidates`, each time the pair whose ends
/// have the highest kept degree (then highest degree sum, then lowest pair).
fn remove_by_degree(
    candidates: &[Pair],
    count: usize,
    deg: &mut [usize],
    removed: &mut BTreeSet<Pair>,
) {
    let mut taken = vec![false; candidates.len()];
    for _ in 0..count {
        let mut best: Option<(usize, (usize, usize))> = None;
        for (idx, &(i, j)) in candidates.iter().enumerate() {
            if taken[idx] {
                continue;
            }
            let key = (deg[i].max(deg[j]), deg[i] + deg[j]);
            if best.is_none_or(|(_, k)| key > k) {
                best = Some((idx, key));
            }
        }
        let Some((idx, _)) = best else { return };
        taken[idx] = true;
        let (i, j) = candidates[idx];
        deg[i] -= 1;
        deg[j] -= 1;
        removed.insert((i, j));
    }
}

/// Pair categories for the clusters-based selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Intra(usize),
    Cross(usize, usize),
    Depot,
}

fn kind(clusters: &Clusters, (i, j): Pair) -> Kind {
    match (clusters.of[i], clusters.of[j]) {
        (Some(a), Some(b)) if a == b => Kind::Intra(a),
        (Some(a), Some(b)) => Kind::Cross(a.min(b), a.max(b)),
        _ => Kind::Depot,
    }
}

fn sorted_loads(base: &[i64], kinds: &[Kind], counts: &[usize]) -> Vec<i64> {
    let mut load = base.to_vec();
    for (t, &r) in counts.iter().enumerate() {
        match kinds[t] {
            Kind::Intra(a) => load[a] -= 2 * r as i64,
            Kind::Cross(a, b) => {
                load[a] -= r as i64;
                load[b] -= r as i64;
            }
            Kind::Depot => {}
        }
    }
    load.sort_unstable_by(|a, b| b.cmp(a));
    load
}

/// Clusters-based selection: remove as many pairs between incompatible
/// clusters as the budget allows, spend the rest balancing the arcs leaving
/// each cluster, and pick concrete pairs by degree.
///
/// The split of the budget among pair categories is built one pair at a
/// time and then improved by single-unit exchanges.
pub fn select_arcs_cpi(plan: &ArcPlan, clusters: &Clusters) -> Result<ArcSelection, GenError> {
    let pairs = plan.check()?;
    let mut kinds: Vec<Kind> = pairs.iter().map(|&p| kind(clusters, p)).collect();
    kinds.sort_unstable();
    kinds.dedup();
    let type_of = |p: Pair| kinds.binary_search(&kind(clusters, p)).expect("known kind");
    let mut available = vec![0usize; kinds.len()];
    for &p in &pairs {
        available[type_of(p)] += 1;
    }
    let violating: Vec<bool> = kinds
        .iter()
        .map(|k| matches!(*k, Kind::Cross(a, b) if clusters.incompatible[a][b]))
        .collect();

    let customers = clusters.of.iter().filter(|c| c.is_some()).count() as i64;
    let mut base = vec![0i64; clusters.count];
    for c in clusters.of.iter().flatten() {
        base[*c] += customers - 1;
    }

    let mut counts = vec![0usize; kinds.len()];
    let mut budget = plan.pair_removals();
    for class in [true, false] {
        let members: Vec<usize> = (0..kinds.len())
            .filter(|&t| violating[t] == class)
            .collect();
        let room: usize = members.iter().map(|&t| available[t]).sum();
        let take = budget.min(room);
        budget -= take;
        for _ in 0..take {
            let mut best: Option<(usize, Vec<i64>)> = None;
            for &t in &members {
                if counts[t] == available[t] {
                    continue;
                }
                counts[t] += 1;
                let loads = sorted_loads(&base, &kinds, &counts);
                counts[t] -= 1;
                if best.as_ref().is_none_or(|(_, l)| loads < *l) {
                    best = Some((t, loads));
                }
            }
            counts[best.expect("room left").0] += 1;
        }
        // single-unit exchanges within the class
        loop {
            let current = sorted_loads(&base, &kinds, &counts);
            let mut moved = false;
            'search: for &from in &members {
                if counts[from] == 0 {
                    continue;
                }
                for &to in &members {
                    if to == from || counts[to] == available[to] {
                        continue;
                    }
                    counts[from] -= 1;
                    counts[to] += 1;
                    if sorted_loads(&base, &kinds, &counts) < current {
                        moved = true;
                        break 'search;
                    }
                    counts[from] += 1;
                    counts[to] -= 1;
                }
            }
            if !moved {
                break;
            }
        }
    }

    let mut deg = vec![plan.n - 1; plan.n];
    let mut removed = BTreeSet::new();
    for (t, &r) in counts.iter().enumerate() {
        let candidates: Vec<Pair> = pairs.iter().copied().filter(|&p| type_of(p) == t).collect();
        remove_by_degree(&candidates, r, &mut deg, &mut removed);
    }
    Ok(ArcSelection {
        n: plan.n,
        removed,
        odd_arc: plan.removals % 2 == 1,
    })
}

/// Degree-based selection: greedy removal at the highest-degree nodes, then
/// swaps of a removed and a kept pair while they lower the maximum degree or
/// the number of nodes attaining it.
pub fn select_arcs_dpi(plan: &ArcPlan) -> Result<ArcSelection, GenError> {
    let pairs = plan.check()?;
    let n = plan.n;
    let mut deg = vec![n - 1; n];
    let mut removed = BTreeSet::new();
    remove_by_degree(&pairs, plan.pair_removals(), &mut deg, &mut removed);

    let mut guard = 0;
    loop {
        guard += 1;
        if guard > 10 * (plan.pair_removals() + 1) {
            break;
        }
        let max = deg.iter().copied().max().unwrap_or(0);
        let mut swap = None;
        'search: for &(a, b) in pairs.iter().filter(|p| !removed.contains(p)) {
            if deg[a] != max && deg[b] != max {
                continue;
            }
            for &(c, d) in &removed {
                // net degree change on the touched nodes
                let mut touched: Vec<(usize, i64)> = Vec::with_capacity(4);
                for (v, change) in [(a, -1), (b, -1), (c, 1), (d, 1)] {
                    match touched.iter_mut().find(|(u, _)| *u == v) {
                        Some(entry) => entry.1 += change,
                        None => touched.push((v, change)),
                    }
                }
                let mut leaving = 0;
                let mut entering = 0;
                let mut overflow = false;
                for &(v, change) in &touched {
                    let new = deg[v] as i64 + change;
                    if new > max as i64 {
                        overflow = true;
                    } else if deg[v] == max && new < max as i64 {
                        leaving += 1;
                    } else if deg[v] < max && new == max as i64 {
                        entering += 1;
                    }
                }
                if !overflow && leaving > entering {
                    swap = Some(((a, b), (c, d)));
                    break 'search;
                }
            }
        }
        let Some(((a, b), (c, d))) = swap else { break };
        removed.insert((a, b));
        removed.remove(&(c, d));
        deg[a] -= 1;
        deg[b] -= 1;
        deg[c] += 1;
        deg[d] += 1;
    }
    Ok(ArcSelection {
        n,
        removed,
        odd_arc: plan.removals % 2 == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shapes_remove_the_right_count() {
        for (n, expected) in [
            (32, 198),
            (21, 84),
            (33, 211),
            (66, 858),
            (64, 806),
            (100, 1980),
            (102, 2060),
        ] {
            let plan = ArcPlan::new(n, &[1], 0.2);
            assert_eq!(plan.removals, expected, "n = {n}");
            let sel = select_arcs_dpi(&plan).unwrap();
            assert_eq!(sel.removed_arcs().len(), expected);
        }
    }

    #[test]
    fn full_graph_when_nothing_is_removed() {
        let plan = ArcPlan {
            n: 6,
            protected: BTreeSet::new(),
            removals: 0,
        };
        let sel = select_arcs_dpi(&plan).unwrap();
        assert!(sel.removed.is_empty());
        assert_eq!(sel.max_degree(), 5);
    }

    #[test]
    fn protected_pairs_survive() {
        let plan = ArcPlan::new(8, &[2, 3], 0.2);
        let sel = select_arcs_dpi(&plan).unwrap();
        for p in &plan.protected {
            assert!(!sel.removed.contains(p));
        }
    }
}
