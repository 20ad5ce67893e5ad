//! Per-instance benchmark rows and their (size group x scheme tag) aggregates.

use std::collections::BTreeMap;
use std::fmt;

use topstmin::engine::{csv_record, SolveResult, Status, CSV_HEADER};
use topstmin::model::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Small,
    Medium,
    Large,
}

impl Group {
    /// The base sets have n in {21, 32, 33} (small), {64, 66} (medium) and
    /// {100, 102} (large); other sizes fall in the band they are closest to.
    pub fn of_size(n: usize) -> Group {
        match n {
            0..=45 => Group::Small,
            46..=82 => Group::Medium,
            _ => Group::Large,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Small => "SMALL",
            Group::Medium => "MEDIUM",
            Group::Large => "LARGE",
        })
    }
}

/// Scheme tags recovered from an instance id such as `set2_SM-CPI-FLI_7`.
/// A missing tag is `NA`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tags {
    pub mandatory: String,
    pub physical: String,
    pub logical: String,
}

impl Tags {
    pub fn from_id(id: &str) -> Tags {
        let mut tags = Tags {
            mandatory: "NA".into(),
            physical: "NA".into(),
            logical: "NA".into(),
        };
        for token in id.split(|c: char| !c.is_ascii_alphanumeric()) {
            let upper = token.to_ascii_uppercase();
            match upper.as_str() {
                "SM" | "CM" => tags.mandatory = upper,
                "CPI" | "DPI" => tags.physical = upper,
                "FLI" | "NLI" => tags.logical = upper,
                _ => {}
            }
        }
        tags
    }

    fn families(&self) -> [(&'static str, &str); 3] {
        [
            ("mandatory", &self.mandatory),
            ("physical", &self.physical),
            ("logical", &self.logical),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub id: String,
    pub group: Group,
    pub tags: Tags,
    pub fleet: usize,
    pub status: Status,
    pub nodes: usize,
    /// `None` in deterministic mode.
    pub cpu: Option<f64>,
    /// Percent.
    pub gap: Option<f64>,
    /// The engine's CSV record for the instance.
    pub engine_row: String,
}

pub const RECORD_HEADER: &str = "group,m,mandatory,physical,logical";

impl BenchRecord {
    pub fn new(id: &str, instance: &Instance, result: &SolveResult) -> BenchRecord {
        BenchRecord {
            id: id.to_string(),
            group: Group::of_size(instance.n()),
            tags: Tags::from_id(id),
            fleet: instance.fleet_size,
            status: result.status,
            nodes: result.nodes,
            cpu: (!result.deterministic).then(|| result.time.as_secs_f64()),
            gap: result.gap().map(|g| 100.0 * g),
            engine_row: csv_record(id, instance, result),
        }
    }

    pub fn header() -> String {
        format!("{CSV_HEADER},{RECORD_HEADER}")
    }

    pub fn row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.engine_row,
            self.group,
            self.fleet,
            self.tags.mandatory,
            self.tags.physical,
            self.tags.logical
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub group: Group,
    pub family: &'static str,
    pub tag: String,
    pub count: usize,
    pub opt: usize,
    pub mean_cpu: Option<f64>,
    pub mean_nodes: f64,
    /// Mean gap (percent) over rows with a gap that were not solved to
    /// optimality.
    pub mean_gap_unsolved: Option<f64>,
}

pub const AGGREGATE_HEADER: &str =
    "group,family,tag,#,OPT,mean_cpu_s,mean_nodes,mean_gap_unsolved%";

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn opt_number(v: Option<f64>, digits: usize) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{v:.digits$}"),
        _ => "NA".into(),
    }
}

impl Aggregate {
    pub fn row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.2},{}",
            self.group,
            self.family,
            self.tag,
            self.count,
            self.opt,
            opt_number(self.mean_cpu, 3),
            self.mean_nodes,
            opt_number(self.mean_gap_unsolved, 2)
        )
    }
}

/// Groups the records by size group, then for each tag family by tag, so the
/// rows of one (group, family) pair partition that group's records.
pub fn aggregate(records: &[BenchRecord]) -> Vec<Aggregate> {
    let mut buckets: BTreeMap<(Group, usize, String), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        for (f, (_, tag)) in r.tags.families().into_iter().enumerate() {
            buckets
                .entry((r.group, f, tag.to_string()))
                .or_default()
                .push(r);
        }
    }
    let family_names = ["mandatory", "physical", "logical"];
    buckets
        .into_iter()
        .map(|((group, f, tag), rows)| {
            let cpu: Option<Vec<f64>> = rows.iter().map(|r| r.cpu).collect();
            let nodes: Vec<f64> = rows.iter().map(|r| r.nodes as f64).collect();
            let gaps: Vec<f64> = rows
                .iter()
                .filter(|r| r.status != Status::Opt && r.status != Status::Infs)
                .filter_map(|r| r.gap.filter(|g| g.is_finite()))
                .collect();
            Aggregate {
                group,
                family: family_names[f],
                tag,
                count: rows.len(),
                opt: rows.iter().filter(|r| r.status == Status::Opt).count(),
                mean_cpu: cpu.as_deref().and_then(mean),
                mean_nodes: mean(&nodes).unwrap_or(0.0),
                mean_gap_unsolved: mean(&gaps),
            }
        })
        .collect()
}

/// Per-instance rows sorted by id, a blank line, then the aggregate rows.
pub fn render(records: &mut [BenchRecord]) -> String {
    records.sort_by(|a, b| a.id.cmp(&b.id));
    let mut out = BenchRecord::header();
    out.push('\n');
    for r in records.iter() {
        out.push_str(&r.row());
        out.push('\n');
    }
    out.push('\n');
    out.push_str(AGGREGATE_HEADER);
    out.push('\n');
    for a in aggregate(records) {
        out.push_str(&a.row());
        out.push('\n');
    }
    out
}
