//! Branch-and-cut driver over the compact model, and plain branch-and-bound
//! over the mixed model for comparison.

mod bnb;
mod config;
mod preprocess;

pub use bnb::{branch_and_bound, SearchMode};
pub use config::{BranchingRule, ConfigError, SolverConfig, DETERMINISTIC_NODE_LIMIT};
pub use preprocess::{preprocess, Fixings};

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::formulation::{build_compact, build_mixed, CutFamily, ExtractError, FormulationError};
use crate::lp::{LpError, MicroLp};
use crate::model::{Instance, ModelError, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Opt,
    NoOpt,
    Infs,
    NoSols,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Opt => "OPT",
            Status::NoOpt => "NO-OPT",
            Status::Infs => "INFS",
            Status::NoSols => "NO-SOLS",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "OPT" => Ok(Status::Opt),
            "NO-OPT" => Ok(Status::NoOpt),
            "INFS" => Ok(Status::Infs),
            "NO-SOLS" => Ok(Status::NoSols),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CutCounts {
    pub ri: usize,
    pub si: usize,
    pub spi: usize,
    pub sec: usize,
    pub li: usize,
}

impl CutCounts {
    pub fn record(&mut self, family: CutFamily) {
        match family {
            CutFamily::Ri => self.ri += 1,
            CutFamily::Si => self.si += 1,
            CutFamily::SpiLeft | CutFamily::SpiRight => self.spi += 1,
            CutFamily::Sec => self.sec += 1,
            CutFamily::Li => self.li += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.ri + self.si + self.spi + self.sec + self.li
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    pub solution: Option<Solution>,
    /// Best upper bound on the optimal profit (`-inf` once infeasibility is
    /// proven).
    pub bound: f64,
    pub nodes: usize,
    pub time: Duration,
    pub cuts: CutCounts,
    /// Subtour and route cuts added at integer points to reject assignments
    /// that are not valid routes. Not counted in `cuts`.
    pub lazy: usize,
    pub deterministic: bool,
}

impl SolveResult {
    pub fn profit(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.profit)
    }

    /// `(UB - LB) / UB` as a fraction, `None` unless both are finite.
    pub fn gap(&self) -> Option<f64> {
        let lb = self.profit()?;
        if !self.bound.is_finite() {
            return None;
        }
        if self.status == Status::Opt {
            return Some(0.0);
        }
        let ub = self.bound;
        if ub.abs() < 1e-12 {
            return Some(if (ub - lb).abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            });
        }
        Some(((ub - lb) / ub.abs()).max(0.0))
    }
}

pub const CSV_HEADER: &str =
    "instance,variant,status,profit,bound,gap%,nodes,time_s,cuts_RI,cuts_SI,cuts_SPI,cuts_SEC,cuts_LI";

fn number(value: Option<f64>) -> String {
    match value {
        Some(v) if v.is_finite() => format!("{v:.6}"),
        _ => "NA".into(),
    }
}

/// One CSV record. Times are `NA` in deterministic mode so that repeated
/// runs give identical bytes.
pub fn csv_record(name: &str, instance: &Instance, result: &SolveResult) -> String {
    let time = if result.deterministic {
        "NA".into()
    } else {
        format!("{:.3}", result.time.as_secs_f64())
    };
    let c = &result.cuts;
    format!(
        "{name},{},{},{},{},{},{},{time},{},{},{},{},{}",
        instance.variant,
        result.status,
        number(result.profit()),
        number(Some(result.bound)),
        number(result.gap().map(|g| 100.0 * g)),
        result.nodes,
        c.ri,
        c.si,
        c.spi,
        c.sec,
        c.li
    )
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Instance(#[from] ModelError),
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("integer point does not decode into routes: {0}")]
    Decode(ExtractError),
}

/// Branch-and-cut on the compact model with the default LP backend.
pub fn solve(instance: &Instance, config: &SolverConfig) -> Result<SolveResult, SolveError> {
    instance.validate()?;
    let (model, map) = build_compact(instance)?;
    branch_and_bound(
        instance,
        &model,
        &map,
        config,
        SearchMode::Cuts,
        &mut MicroLp::new(),
    )
}

/// Plain branch-and-bound on the mixed model, no separation.
pub fn solve_mixed(instance: &Instance, config: &SolverConfig) -> Result<SolveResult, SolveError> {
    instance.validate()?;
    let (model, map) = build_mixed(instance)?;
    branch_and_bound(
        instance,
        &model,
        &map,
        config,
        SearchMode::Plain,
        &mut MicroLp::new(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variant;

    fn line(t_max: f64) -> Instance {
        // source, three customers on a line, sink
        let coords = vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0)];
        let profit = vec![0.0, 3.0, 5.0, 7.0, 0.0];
        Instance::euclidean(1, t_max, coords, profit, vec![0.0, 0.5, 0.5, 0.5, 0.0]).unwrap()
    }

    fn det() -> SolverConfig {
        SolverConfig {
            deterministic: true,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn generous_budget_collects_everything() {
        let result = solve(&line(100.0), &det()).unwrap();
        assert_eq!(result.status, Status::Opt);
        assert_eq!(result.profit(), Some(15.0));
        assert_eq!(result.gap(), Some(0.0));
        let mixed = solve_mixed(&line(100.0), &det()).unwrap();
        assert_eq!(mixed.profit(), Some(15.0));
    }

    #[test]
    fn unreachable_mandatory_is_infeasible_without_search() {
        let mut inst = line(100.0);
        inst.physical = [(0, 1), (2, 1), (3, 1)].into_iter().collect();
        inst.mandatory.insert(1);
        let result = solve(&inst, &det()).unwrap();
        assert_eq!(result.status, Status::Infs);
        assert_eq!(result.nodes, 0);
        assert!(result.solution.is_none());
    }

    #[test]
    fn tight_budget_and_logical_pair() {
        // budget 4 + 1.5 lets one route visit all three; forbid 2 with 3
        let mut inst = line(5.5);
        assert_eq!(solve(&inst, &det()).unwrap().profit(), Some(15.0));
        inst.variant = Variant::PL;
        inst.logical.insert((2, 3));
        let result = solve(&inst, &det()).unwrap();
        assert_eq!(result.profit(), Some(10.0));
        assert_eq!(solve_mixed(&inst, &det()).unwrap().profit(), Some(10.0));
    }

    #[test]
    fn csv_has_thirteen_columns() {
        let result = solve(&line(100.0), &det()).unwrap();
        let rec = csv_record("line", &line(100.0), &result);
        assert_eq!(rec.split(',').count(), CSV_HEADER.split(',').count());
        assert!(rec.starts_with("line,P,OPT,15.000000,15.000000,0.000000,"));
        assert!(rec.contains(",NA,"));
    }
}
