use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::separation::{CutFamilies, SeparationParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchingRule {
    /// Variable closest to 0.5, `y` before `x` before `u`, lowest id on ties.
    #[default]
    MostFractional,
    /// First fractional variable in the same order.
    FirstFractional,
}

impl FromStr for BranchingRule {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "most-fractional" => Ok(BranchingRule::MostFractional),
            "first-fractional" => Ok(BranchingRule::FirstFractional),
            other => Err(ConfigError::BadValue {
                key: "branching".into(),
                value: other.into(),
            }),
        }
    }
}

impl fmt::Display for BranchingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchingRule::MostFractional => "most-fractional",
            BranchingRule::FirstFractional => "first-fractional",
        })
    }
}

/// Node budget used in deterministic mode when no node limit is given.
pub const DETERMINISTIC_NODE_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Wall-clock limit in seconds; ignored in deterministic mode.
    pub time_limit: f64,
    pub node_limit: Option<usize>,
    pub tol: f64,
    pub viol_tol: f64,
    pub integrality: f64,
    pub max_routes: usize,
    pub max_cycles: usize,
    pub max_sec_pins: usize,
    pub lagrangian_iterations: usize,
    pub max_rounds: usize,
    pub max_cuts_per_round: usize,
    pub branching: BranchingRule,
    pub families: CutFamilies,
    pub deterministic: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let sep = SeparationParams::default();
        SolverConfig {
            time_limit: 7200.0,
            node_limit: None,
            tol: sep.tol,
            viol_tol: sep.viol_tol,
            integrality: 1e-6,
            max_routes: sep.max_routes,
            max_cycles: sep.max_cycles,
            max_sec_pins: sep.max_sec_pins,
            lagrangian_iterations: sep.lagrangian_iterations,
            max_rounds: 20,
            max_cuts_per_round: 200,
            branching: BranchingRule::MostFractional,
            families: CutFamilies::ALL,
            deterministic: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
    })
}

impl SolverConfig {
    pub fn separation(&self) -> SeparationParams {
        SeparationParams {
            tol: self.tol,
            viol_tol: self.viol_tol,
            max_routes: self.max_routes,
            max_cycles: self.max_cycles,
            max_sec_pins: self.max_sec_pins,
            lagrangian_iterations: self.lagrangian_iterations,
            families: self.families,
        }
    }

    /// Node budget actually enforced.
    pub fn effective_node_limit(&self) -> Option<usize> {
        match (self.deterministic, self.node_limit) {
            (true, None) => Some(DETERMINISTIC_NODE_LIMIT),
            (_, limit) => limit,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.time_limit > 0.0) {
            return Err(ConfigError::Invalid("time limit must be positive".into()));
        }
        if self.node_limit == Some(0) {
            return Err(ConfigError::Invalid("node limit must be positive".into()));
        }
        if !self.time_limit.is_finite() && self.effective_node_limit().is_none() {
            return Err(ConfigError::Invalid(
                "either the time or the node limit must be finite".into(),
            ));
        }
        for (name, v) in [
            ("tol", self.tol),
            ("viol_tol", self.viol_tol),
            ("integrality", self.integrality),
        ] {
            if !(v >= 0.0 && v < 0.5) {
                return Err(ConfigError::Invalid(format!("{name} must lie in [0, 0.5)")));
            }
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of the current values. Blank lines
    /// and `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax(idx + 1))?;
            self.set(key.trim(), value.trim())?;
        }
        self.validate()
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut config = SolverConfig::default();
        config.apply_text(text)?;
        Ok(config)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "time_limit" => self.time_limit = parse_value(key, value)?,
            "node_limit" => {
                self.node_limit = match value {
                    "none" => None,
                    v => Some(parse_value(key, v)?),
                }
            }
            "tol" => self.tol = parse_value(key, value)?,
            "viol_tol" => self.viol_tol = parse_value(key, value)?,
            "integrality" => self.integrality = parse_value(key, value)?,
            "max_routes" => self.max_routes = parse_value(key, value)?,
            "max_cycles" => self.max_cycles = parse_value(key, value)?,
            "max_sec_pins" => self.max_sec_pins = parse_value(key, value)?,
            "lagrangian_iterations" => self.lagrangian_iterations = parse_value(key, value)?,
            "max_rounds" => self.max_rounds = parse_value(key, value)?,
            "max_cuts_per_round" => self.max_cuts_per_round = parse_value(key, value)?,
            "branching" => self.branching = value.parse()?,
            "cuts" => {
                self.families = value.parse().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    value: value.into(),
                })?
            }
            "deterministic" => self.deterministic = parse_value(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.into())),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_values() {
        let text =
            "# solver\ntime_limit = 60\nnode_limit = 500\ncuts = RI,SEC\ndeterministic = true\n";
        let cfg = SolverConfig::from_text(text).unwrap();
        assert_eq!(cfg.time_limit, 60.0);
        assert_eq!(cfg.node_limit, Some(500));
        assert!(cfg.families.ri && cfg.families.sec && !cfg.families.spi);
        assert!(cfg.deterministic);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            SolverConfig::from_text("time_limit 5"),
            Err(ConfigError::Syntax(1))
        );
        assert!(matches!(
            SolverConfig::from_text("colour = red"),
            Err(ConfigError::UnknownKey(_))
        ));
        assert!(SolverConfig::from_text("time_limit = 0").is_err());
        assert!(SolverConfig::from_text("time_limit = inf").is_err());
        assert!(SolverConfig::from_text("time_limit = inf\nnode_limit = 10").is_ok());
    }

    #[test]
    fn deterministic_mode_gets_a_node_budget() {
        let cfg = SolverConfig {
            deterministic: true,
            ..SolverConfig::default()
        };
        assert_eq!(cfg.effective_node_limit(), Some(DETERMINISTIC_NODE_LIMIT));
    }
}
