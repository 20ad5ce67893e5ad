//! Instance generator: mandatory nodes, physical and logical
//! incompatibilities and service times on top of a plain TOP instance.

mod arcs;
mod features;
mod kmeans;
mod mandatory;

pub use arcs::{
    cpi_objective, select_arcs_cpi, select_arcs_dpi, ArcPlan, ArcSelection, Clusters, Pair,
};
pub use features::{assign_service_times, logical_per_node, select_logical, LogicalMethod};
pub use kmeans::kmeans;
pub use mandatory::{dispersion, select_diverse, MandatoryMethod};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Instance, ModelError, Variant};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("need {needed} customers, only {available} available")]
    TooFewCustomers { needed: usize, available: usize },
    #[error("need {needed} removable arc pairs, only {available} available")]
    ArcBudget { needed: usize, available: usize },
    #[error("base instance has no coordinates")]
    MissingCoordinates,
    #[error("mandatory node {} cannot be served by a direct route", .0 + 1)]
    Unrepairable(usize),
    #[error("unknown scheme `{0}`")]
    BadScheme(String),
    #[error("manifest line {line}: {detail}")]
    Manifest { line: usize, detail: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhysicalMethod {
    Cpi,
    Dpi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub mandatory_fraction: f64,
    pub removal_fraction: f64,
    pub clusters: usize,
    pub logical_fraction: f64,
    pub service_share: f64,
    pub tmax_stretch: f64,
    /// Chance that a cluster pair is incompatible.
    pub incompatibility: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            mandatory_fraction: 0.05,
            removal_fraction: 0.20,
            clusters: 3,
            logical_fraction: 0.05,
            service_share: 0.5,
            tmax_stretch: 1.5,
            incompatibility: 0.5,
        }
    }
}

/// One path of the generation tree plus its parameters and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenScheme {
    pub mandatory: MandatoryMethod,
    pub physical: PhysicalMethod,
    /// `None` gives a variant P instance.
    pub logical: Option<LogicalMethod>,
    pub params: GenParams,
    pub seed: u64,
}

impl GenScheme {
    pub fn new(
        mandatory: MandatoryMethod,
        physical: PhysicalMethod,
        logical: Option<LogicalMethod>,
        seed: u64,
    ) -> Self {
        GenScheme {
            mandatory,
            physical,
            logical,
            params: GenParams::default(),
            seed,
        }
    }

    pub fn variant(&self) -> Variant {
        if self.logical.is_some() {
            Variant::PL
        } else {
            Variant::P
        }
    }

    /// Scheme id such as `SM-CPI` or `CM-DPI-NLI`.
    pub fn id(&self) -> String {
        let m = match self.mandatory {
            MandatoryMethod::Sm => "SM",
            MandatoryMethod::Cm => "CM",
        };
        let p = match self.physical {
            PhysicalMethod::Cpi => "CPI",
            PhysicalMethod::Dpi => "DPI",
        };
        match self.logical {
            None => format!("{m}-{p}"),
            Some(LogicalMethod::Fli) => format!("{m}-{p}-FLI"),
            Some(LogicalMethod::Nli) => format!("{m}-{p}-NLI"),
        }
    }

    /// Parses a scheme id; the seed is set separately.
    pub fn parse(id: &str, seed: u64) -> Result<Self, GenError> {
        let parts: Vec<String> = id
            .split('-')
            .map(|p| p.trim().to_ascii_uppercase())
            .collect();
        let bad = || GenError::BadScheme(id.to_string());
        let mandatory = match parts.first().map(String::as_str) {
            Some("SM") => MandatoryMethod::Sm,
            Some("CM") => MandatoryMethod::Cm,
            _ => return Err(bad()),
        };
        let physical = match parts.get(1).map(String::as_str) {
            Some("CPI") => PhysicalMethod::Cpi,
            Some("DPI") => PhysicalMethod::Dpi,
            _ => return Err(bad()),
        };
        let logical = match parts.get(2).map(String::as_str) {
            None => None,
            Some("FLI") => Some(LogicalMethod::Fli),
            Some("NLI") => Some(LogicalMethod::Nli),
            _ => return Err(bad()),
        };
        if parts.len() > 3 {
            return Err(bad());
        }
        Ok(GenScheme::new(mandatory, physical, logical, seed))
    }

    /// The 4 variant P and 8 variant PL schemes.
    pub fn all(seed: u64) -> Vec<GenScheme> {
        let mut schemes = Vec::with_capacity(12);
        for m in [MandatoryMethod::Sm, MandatoryMethod::Cm] {
            for p in [PhysicalMethod::Cpi, PhysicalMethod::Dpi] {
                for l in [None, Some(LogicalMethod::Fli), Some(LogicalMethod::Nli)] {
                    schemes.push(GenScheme::new(m, p, l, seed));
                }
            }
        }
        schemes
    }
}

impl fmt::Display for GenScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for GenScheme {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GenScheme::parse(s, 0)
    }
}

/// `round(fraction * customers)`, at least one and at most `customers`.
pub fn mandatory_count(customers: usize, fraction: f64) -> usize {
    ((fraction * customers as f64).round() as usize).clamp(1.min(customers), customers)
}

/// Customers a route can visit alone within the budget, or every customer
/// when too few are.
fn mandatory_candidates(instance: &Instance, count: usize) -> Vec<usize> {
    let reachable: Vec<usize> = instance
        .customers()
        .filter(|&k| {
            instance.within_budget(instance.from_source(k) + instance.s(k) + instance.to_sink(k))
        })
        .collect();
    if reachable.len() >= count {
        reachable
    } else {
        instance.customers().collect()
    }
}

pub fn select_mandatory(
    instance: &Instance,
    method: MandatoryMethod,
    fraction: f64,
) -> Result<Vec<usize>, GenError> {
    let coords = instance
        .coords
        .as_ref()
        .ok_or(GenError::MissingCoordinates)?;
    let count = mandatory_count(instance.customer_count(), fraction);
    let candidates = mandatory_candidates(instance, count);
    let points: Vec<(f64, f64)> = candidates.iter().map(|&k| coords[k]).collect();
    let picked = select_diverse(&points, count, method)?;
    Ok(picked.into_iter().map(|i| candidates[i]).collect())
}

/// What [`ensure_feasible`] changed or noticed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Repair {
    /// Removed arcs put back.
    pub restored: usize,
    /// The conflicts among mandatory nodes need more routes than the fleet.
    pub conflict_warning: bool,
}

fn colorable(nodes: &[usize], instance: &Instance, colors: usize) -> bool {
    fn place(
        idx: usize,
        nodes: &[usize],
        instance: &Instance,
        color: &mut Vec<usize>,
        colors: usize,
    ) -> bool {
        if idx == nodes.len() {
            return true;
        }
        for c in 0..colors {
            let clash = (0..idx)
                .any(|j| color[j] == c && instance.logically_incompatible(nodes[j], nodes[idx]));
            if !clash {
                color.push(c);
                if place(idx + 1, nodes, instance, color, colors) {
                    return true;
                }
                color.pop();
            }
        }
        false
    }
    place(0, nodes, instance, &mut Vec::new(), colors)
}

/// Makes every mandatory node servable by the direct route
/// `source -> k -> sink`: removed depot arcs of `k` are restored in both
/// directions. Fails if the direct route is over budget anyway.
pub fn ensure_feasible(instance: &mut Instance) -> Result<Repair, GenError> {
    let (source, sink) = (instance.source(), instance.sink());
    let mut repair = Repair::default();
    let mandatory: Vec<usize> = instance.mandatory.iter().copied().collect();
    for &k in &mandatory {
        for arc in [(source, k), (k, source), (k, sink), (sink, k)] {
            if instance.physical.remove(&arc) {
                repair.restored += 1;
            }
        }
        let direct = instance.t(source, k) + instance.s(k) + instance.t(k, sink);
        if !instance.within_budget(direct) {
            return Err(GenError::Unrepairable(k));
        }
    }
    if instance.variant == Variant::PL && !colorable(&mandatory, instance, instance.fleet_size) {
        repair.conflict_warning = true;
    }
    Ok(repair)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub instance: Instance,
    pub clusters: Option<Clusters>,
    pub repair: Repair,
}

/// Runs one generation scheme on a base instance: mandatory nodes, arc
/// removal, logical pairs (variant PL), service times, then the feasibility
/// repair. Pure function of the base instance and the scheme.
pub fn generate(base: &Instance, scheme: &GenScheme) -> Result<Generated, GenError> {
    base.validate()?;
    let coords = base.coords.clone().ok_or(GenError::MissingCoordinates)?;
    let params = &scheme.params;
    let n = base.n();
    let mut instance = base.clone();
    instance.mandatory.clear();
    instance.physical.clear();
    instance.logical.clear();
    instance.service = vec![0.0; n];
    instance.variant = scheme.variant();
    instance.symmetric_physical = true;

    let mandatory = select_mandatory(&instance, scheme.mandatory, params.mandatory_fraction)?;
    instance.mandatory = mandatory.iter().copied().collect();

    let plan = ArcPlan::new(n, &mandatory, params.removal_fraction);
    let mut clusters = None;
    let selection = match scheme.physical {
        PhysicalMethod::Dpi => select_arcs_dpi(&plan)?,
        PhysicalMethod::Cpi => {
            let points: Vec<(f64, f64)> = instance.customers().map(|k| coords[k]).collect();
            let assign = kmeans(&points, params.clusters);
            let mut of = vec![None; n];
            for (idx, k) in instance.customers().enumerate() {
                of[k] = Some(assign[idx]);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(scheme.seed);
            rng.set_stream(1);
            let c = params.clusters;
            let mut incompatible = vec![vec![false; c]; c];
            for a in 0..c {
                for b in a + 1..c {
                    let draw = rng.gen_bool(params.incompatibility);
                    incompatible[a][b] = draw;
                    incompatible[b][a] = draw;
                }
            }
            let found = Clusters {
                of,
                count: c,
                incompatible,
            };
            let selection = select_arcs_cpi(&plan, &found)?;
            clusters = Some(found);
            selection
        }
    };
    instance.physical = selection.removed_arcs();

    if let Some(method) = scheme.logical {
        instance.logical = select_logical(&instance, method, params.logical_fraction);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(scheme.seed);
    rng.set_stream(2);
    let (service, t_max) = assign_service_times(
        &instance,
        params.service_share,
        params.tmax_stretch,
        &mut rng,
    );
    instance.service = service;
    instance.t_max = t_max;

    let repair = ensure_feasible(&mut instance)?;
    instance.validate()?;
    Ok(Generated {
        instance,
        clusters,
        repair,
    })
}

/// Size summary of an instance: `|N|`, `|A|`, `|M|`, `|I|`, `|C|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceCounts {
    pub nodes: usize,
    pub arcs: usize,
    pub mandatory: usize,
    pub physical: usize,
    pub logical: usize,
}

impl InstanceCounts {
    pub fn of(instance: &Instance) -> Self {
        let n = instance.n();
        InstanceCounts {
            nodes: n,
            arcs: n * (n - 1),
            mandatory: instance.mandatory.len(),
            physical: instance.physical.len(),
            logical: instance.logical.len(),
        }
    }
}

/// One manifest line: `base-file scheme-id seed out-file`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestJob {
    pub base: PathBuf,
    pub scheme: GenScheme,
    pub out: PathBuf,
}

/// Blank lines and `#` comments are skipped.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestJob>, GenError> {
    let mut jobs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let err = |detail: String| GenError::Manifest {
            line: idx + 1,
            detail,
        };
        let [base, scheme, seed, out] = fields.as_slice() else {
            return Err(err("expected `base-file scheme-id seed out-file`".into()));
        };
        let seed: u64 = seed
            .parse()
            .map_err(|_| err(format!("bad seed `{seed}`")))?;
        let scheme = GenScheme::parse(scheme, seed).map_err(|e| err(e.to_string()))?;
        jobs.push(ManifestJob {
            base: PathBuf::from(base),
            scheme,
            out: PathBuf::from(out),
        });
    }
    Ok(jobs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::write_instance;

    fn base(n: usize, seed: u64) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0.0..50.0), rng.gen_range(0.0..50.0)))
            .collect();
        let mut profit: Vec<f64> = (0..n).map(|_| rng.gen_range(1..20) as f64).collect();
        profit[0] = 0.0;
        profit[n - 1] = 0.0;
        Instance::euclidean(2, 80.0, coords, profit, vec![0.0; n]).unwrap()
    }

    #[test]
    fn scheme_ids_round_trip() {
        let all = GenScheme::all(7);
        assert_eq!(all.len(), 12);
        assert_eq!(all.iter().filter(|s| s.variant() == Variant::P).count(), 4);
        for s in &all {
            assert_eq!(GenScheme::parse(&s.id(), 7).unwrap(), *s);
        }
        assert!(GenScheme::parse("XX-CPI", 0).is_err());
    }

    #[test]
    fn mandatory_counts() {
        assert_eq!(mandatory_count(19, 0.05), 1);
        assert_eq!(mandatory_count(98, 0.05), 5);
        assert_eq!(mandatory_count(64, 0.05), 3);
    }

    #[test]
    fn generation_is_deterministic() {
        let b = base(21, 1);
        for scheme in GenScheme::all(42) {
            let first = write_instance(&generate(&b, &scheme).unwrap().instance).unwrap();
            let second = write_instance(&generate(&b, &scheme).unwrap().instance).unwrap();
            assert_eq!(first, second, "{scheme}");
        }
    }

    #[test]
    fn repair_restores_depot_arcs() {
        let mut inst = base(8, 2);
        inst.mandatory.insert(3);
        inst.physical = [(0, 3), (3, 0), (3, 7), (7, 3), (1, 2), (2, 1)]
            .into_iter()
            .collect();
        let repair = ensure_feasible(&mut inst).unwrap();
        assert_eq!(repair.restored, 4);
        assert_eq!(inst.physical.len(), 2);
    }

    #[test]
    fn manifest_lines() {
        let jobs = parse_manifest("# jobs\nset2.txt SM-DPI-FLI 5 out/a.top\n\n").unwrap();
        assert_eq!(jobs.len(), 1);
        assert_eq!(jobs[0].scheme.seed, 5);
        assert_eq!(jobs[0].scheme.logical, Some(LogicalMethod::Fli));
        assert!(parse_manifest("a b c").is_err());
    }
}
