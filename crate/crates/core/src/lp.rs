//! LP relaxation backends.
//!
//! The branch-and-bound engine only talks to [`LpBackend`]; integrality is
//! never passed down, every variable is solved as continuous.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use thiserror::Error;

use crate::formulation::{Constraint, LinearModel, Provenance, Relation};

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { objective: f64, point: Vec<f64> },
    Infeasible,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("LP relaxation is unbounded")]
    Unbounded,
    #[error("LP backend failure: {0}")]
    Backend(String),
}

pub trait LpBackend {
    /// Replaces the current problem, dropping rows and bound changes.
    fn load(&mut self, model: &LinearModel);
    /// Goes back to the loaded variable bounds. Added rows stay.
    fn reset_bounds(&mut self);
    fn set_bounds(&mut self, var: usize, lower: f64, upper: f64);
    /// Appends rows for good; the next solve may warm start from the last
    /// optimum.
    fn add_rows(&mut self, rows: &[Constraint]);
    fn solve(&mut self) -> Result<LpOutcome, LpError>;
}

const BOUND_TOL: f64 = 1e-9;

fn op(relation: Relation) -> ComparisonOp {
    match relation {
        Relation::Le => ComparisonOp::Le,
        Relation::Eq => ComparisonOp::Eq,
        Relation::Ge => ComparisonOp::Ge,
    }
}

/// A solved microlp problem and how it relates to the requested one.
struct Warm {
    solution: microlp::Solution,
    vars: Vec<microlp::Variable>,
    /// Bounds the problem was built with.
    hard: Vec<(f64, f64)>,
    /// Values pinned on top of `hard` by singleton equality rows. microlp's
    /// `fix_var` can report a feasible pin as infeasible when the variable
    /// is basic, so it is not used.
    fixed: Vec<Option<f64>>,
    /// Leading rows of `MicroLp::rows` the problem contains.
    rows: usize,
    /// The same problem with nothing pinned, and its row count. A pin row
    /// cannot be taken back, so releasing one restarts from here.
    anchor: Option<(microlp::Solution, usize)>,
}

/// Dual simplex from the `microlp` crate.
///
/// Branching fixes and new rows are applied to the last optimum with
/// `add_constraint`, so moving between nearby nodes costs a few
/// dual pivots instead of a cold solve. Anything else (a general bound
/// change, numerical failure) rebuilds the problem.
#[derive(Default)]
pub struct MicroLp {
    objective: Vec<f64>,
    base: Vec<(f64, f64)>,
    /// Loaded bounds tightened by single-variable rows.
    row_bounds: Vec<(f64, f64)>,
    bounds: Vec<(f64, f64)>,
    rows: Vec<Constraint>,
    /// A constant row that no point satisfies was added.
    empty_infeasible: bool,
    warm: Option<Warm>,
}

type Row = (Vec<(usize, f64)>, Relation, f64, bool);

enum Step {
    Done(microlp::Solution),
    Infeasible,
    Failed,
}

fn step(result: Result<microlp::SolveOutcome, microlp::Error>) -> Step {
    match result {
        Ok(outcome) => outcome.into_solution().map_or(Step::Failed, Step::Done),
        Err(microlp::Error::Infeasible) => Step::Infeasible,
        Err(_) => Step::Failed,
    }
}

/// Moves fixed variables to the right-hand side and turns rows left with a
/// single variable into bounds, repeating until nothing changes. Fewer,
/// better conditioned rows keep microlp away from singular bases. `None`
/// when a row or bound is found contradictory.
fn presolve(bounds: &mut [(f64, f64)], rows: &[Row]) -> Option<Vec<Row>> {
    const TOL: f64 = 1e-7;
    let mut rows: Vec<Row> = rows.to_vec();
    loop {
        let fixed = |v: usize, b: &[(f64, f64)]| b[v].1 - b[v].0 <= BOUND_TOL;
        let mut changed = false;
        let mut kept = Vec::with_capacity(rows.len());
        for (coefs, relation, rhs, cut) in rows {
            let mut rhs = rhs;
            let mut free = Vec::with_capacity(coefs.len());
            for (v, c) in coefs {
                if fixed(v, bounds) {
                    rhs -= c * bounds[v].0;
                } else {
                    free.push((v, c));
                }
            }
            match free.as_slice() {
                [] => {
                    let ok = match relation {
                        Relation::Le => rhs >= -TOL,
                        Relation::Ge => rhs <= TOL,
                        Relation::Eq => rhs.abs() <= TOL,
                    };
                    if !ok {
                        return None;
                    }
                    changed = true;
                }
                &[(v, c)] => {
                    let bound = rhs / c;
                    let (caps_above, caps_below) = match relation {
                        Relation::Eq => (true, true),
                        Relation::Le => (c > 0.0, c < 0.0),
                        Relation::Ge => (c < 0.0, c > 0.0),
                    };
                    let (lo, hi) = &mut bounds[v];
                    if caps_above && bound < *hi {
                        *hi = bound;
                    }
                    if caps_below && bound > *lo {
                        *lo = bound;
                    }
                    if *lo > *hi + TOL {
                        return None;
                    }
                    if *hi < *lo {
                        *hi = *lo;
                    }
                    changed = true;
                }
                _ => kept.push((free, relation, rhs, cut)),
            }
        }
        rows = kept;
        if !changed {
            return Some(rows);
        }
    }
}

impl MicroLp {
    pub fn new() -> Self {
        Self::default()
    }

    fn read(solution: &microlp::Solution, vars: &[microlp::Variable]) -> LpOutcome {
        LpOutcome::Optimal {
            objective: solution.objective(),
            point: vars.iter().map(|&v| solution.var_value_raw(v)).collect(),
        }
    }

    fn effective(&self, v: usize) -> (f64, f64) {
        let (lo, hi) = self.bounds[v];
        let (rlo, rhi) = self.row_bounds[v];
        (lo.max(rlo), hi.min(rhi))
    }

    fn expr(vars: &[microlp::Variable], coefs: &[(usize, f64)]) -> Vec<(microlp::Variable, f64)> {
        coefs.iter().map(|&(v, c)| (vars[v], c)).collect()
    }

    /// Pins and releases variables, then adds the missing rows. `None`
    /// means the warm state cannot express the request or failed
    /// numerically; the caller rebuilds.
    fn advance(&mut self, mut w: Warm) -> Option<LpOutcome> {
        let n = self.bounds.len();
        let mut want = vec![None; n];
        for (v, slot) in want.iter_mut().enumerate() {
            let (lo, hi) = self.effective(v);
            if lo > hi + BOUND_TOL {
                self.warm = Some(w);
                return Some(LpOutcome::Infeasible);
            }
            let (hlo, hhi) = w.hard[v];
            if lo == hlo && hi == hhi {
                continue;
            }
            if hi - lo <= BOUND_TOL && lo >= hlo - BOUND_TOL && lo <= hhi + BOUND_TOL {
                *slot = Some(lo.clamp(hlo, hhi));
                continue;
            }
            return None;
        }
        let release = (0..n).any(|v| w.fixed[v].is_some() && w.fixed[v] != want[v]);
        let vars = std::mem::take(&mut w.vars);
        let mut sol = w.solution;
        let mut anchor = w.anchor;
        if release {
            let (base, rows) = anchor.take()?;
            sol = base;
            w.rows = rows;
            w.fixed = vec![None; n];
            sol = match self.add_missing_rows(sol, &vars, &mut w.rows) {
                Step::Done(next) => next,
                Step::Infeasible => return Some(LpOutcome::Infeasible),
                Step::Failed => return None,
            };
            anchor = Some((sol.clone(), w.rows));
        }
        // A failed edit consumes the solver; the next call restarts from the
        // anchor.
        let infeasible = |lp: &mut MicroLp,
                          vars: Vec<microlp::Variable>,
                          hard: Vec<(f64, f64)>,
                          anchor: Option<(microlp::Solution, usize)>| {
            if let Some((base, rows)) = anchor {
                let solution = base.clone();
                lp.warm = Some(Warm {
                    solution,
                    vars,
                    fixed: vec![None; hard.len()],
                    hard,
                    rows,
                    anchor: Some((base, rows)),
                });
            }
            Some(LpOutcome::Infeasible)
        };
        for v in 0..n {
            let Some(val) = want[v] else { continue };
            if w.fixed[v] == Some(val) {
                continue;
            }
            sol = match step(sol.add_constraint([(vars[v], 1.0)].as_slice(), ComparisonOp::Eq, val))
            {
                Step::Done(next) => next,
                Step::Infeasible => return infeasible(self, vars, w.hard, anchor),
                Step::Failed => return None,
            };
            w.fixed[v] = Some(val);
        }
        sol = match self.add_missing_rows(sol, &vars, &mut w.rows) {
            Step::Done(next) => next,
            Step::Infeasible => return infeasible(self, vars, w.hard, anchor),
            Step::Failed => return None,
        };
        if w.fixed.iter().all(Option::is_none) && anchor.as_ref().is_some_and(|a| a.1 < w.rows) {
            anchor = Some((sol.clone(), w.rows));
        }
        let result = Self::read(&sol, &vars);
        self.warm = Some(Warm {
            solution: sol,
            vars,
            hard: w.hard,
            fixed: w.fixed,
            rows: w.rows,
            anchor,
        });
        Some(result)
    }

    fn add_missing_rows(
        &self,
        mut sol: microlp::Solution,
        vars: &[microlp::Variable],
        done: &mut usize,
    ) -> Step {
        while *done < self.rows.len() {
            let row = &self.rows[*done];
            *done += 1;
            if row.coefs.is_empty() {
                continue;
            }
            sol = match step(sol.add_constraint(
                Self::expr(vars, &row.coefs).as_slice(),
                op(row.relation),
                row.rhs,
            )) {
                Step::Done(next) => next,
                other => return other,
            };
        }
        Step::Done(sol)
    }

    /// Builds the problem from scratch: single-variable rows and general
    /// bound changes become variable bounds, branching fixes are pinned
    /// afterwards so that later nodes can release them.
    fn rebuild(&mut self) -> Result<LpOutcome, LpError> {
        let n = self.bounds.len();
        let mut hard = Vec::with_capacity(n);
        let mut fixes = vec![None; n];
        for (v, fix) in fixes.iter_mut().enumerate() {
            let (lo, hi) = self.effective(v);
            if lo > hi + BOUND_TOL {
                return Ok(LpOutcome::Infeasible);
            }
            let (rlo, rhi) = self.row_bounds[v];
            if rlo > rhi + BOUND_TOL {
                return Ok(LpOutcome::Infeasible);
            }
            if (lo, hi) == (rlo, rhi) {
                hard.push((rlo, rhi.max(rlo)));
            } else if hi - lo <= BOUND_TOL {
                hard.push((rlo, rhi.max(rlo)));
                *fix = Some(lo);
            } else {
                hard.push((lo, hi));
            }
        }

        // Scaled, deduplicated rows. microlp can report a singular basis on
        // degenerate row sets; a failed solve is retried in reverse row order
        // and then without the separated cuts (a weaker but valid relaxation).
        let mut seen = std::collections::HashSet::new();
        let mut scaled: Vec<Row> = Vec::new();
        for row in self.rows.iter().filter(|r| r.coefs.len() > 1) {
            let scale = row.coefs.iter().fold(0.0f64, |m, &(_, c)| m.max(c.abs()));
            let coefs: Vec<(usize, f64)> = row.coefs.iter().map(|&(v, c)| (v, c / scale)).collect();
            let rhs = row.rhs / scale;
            let key: Vec<(usize, u64)> = coefs.iter().map(|&(v, c)| (v, c.to_bits())).collect();
            if seen.insert((key, rhs.to_bits(), row.relation as u8)) {
                scaled.push((
                    coefs,
                    row.relation,
                    rhs,
                    matches!(row.provenance, Provenance::Cut(_)),
                ));
            }
        }

        let rows = self.rows.len();
        let first = self.cold_solve(&hard, scaled.iter());
        let first = match first {
            Err(LpError::Backend(_)) => self.cold_solve(&hard, scaled.iter().rev()),
            other => other,
        };
        match first {
            Ok(Some((solution, vars))) => {
                let anchor = Some((solution.clone(), rows));
                let warm = Warm {
                    solution,
                    vars,
                    hard,
                    fixed: vec![None; n],
                    rows,
                    anchor,
                };
                if fixes.iter().all(Option::is_none) {
                    let result = Self::read(&warm.solution, &warm.vars);
                    self.warm = Some(warm);
                    return Ok(result);
                }
                match self.advance(warm) {
                    Some(result) => return Ok(result),
                    None => {}
                }
            }
            Ok(None) if fixes.iter().all(Option::is_none) => return Ok(LpOutcome::Infeasible),
            Ok(None) | Err(LpError::Backend(_)) => {}
            Err(e) => return Err(e),
        }

        // Last resort: every bound baked in and fixed variables substituted
        // out, then the same without cuts; no warm state.
        let mut full: Vec<(f64, f64)> = (0..n)
            .map(|v| {
                let (lo, hi) = self.effective(v);
                (lo, hi.max(lo))
            })
            .collect();
        self.warm = None;
        let Some(reduced) = presolve(&mut full, &scaled) else {
            return Ok(LpOutcome::Infeasible);
        };
        let attempt = match self.cold_solve(&full, reduced.iter()) {
            Err(LpError::Backend(_)) => self.cold_solve(&full, reduced.iter().filter(|r| !r.3)),
            other => other,
        };
        match attempt? {
            Some((solution, vars)) => Ok(Self::read(&solution, &vars)),
            None => Ok(LpOutcome::Infeasible),
        }
    }

    /// `Ok(None)` when infeasible.
    fn cold_solve<'r>(
        &self,
        bounds: &[(f64, f64)],
        rows: impl Iterator<Item = &'r Row>,
    ) -> Result<Option<(microlp::Solution, Vec<microlp::Variable>)>, LpError> {
        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<microlp::Variable> = bounds
            .iter()
            .enumerate()
            .map(|(v, &b)| problem.add_var(self.objective[v], b))
            .collect();
        for (coefs, relation, rhs, _) in rows {
            problem.add_constraint(Self::expr(&vars, coefs).as_slice(), op(*relation), *rhs);
        }
        match problem.solve() {
            Ok(outcome) => match outcome.into_solution() {
                Ok(solution) => Ok(Some((solution, vars))),
                Err(_) => Err(LpError::Backend("LP solve interrupted".into())),
            },
            Err(microlp::Error::Infeasible) => Ok(None),
            Err(microlp::Error::Unbounded) => Err(LpError::Unbounded),
            Err(e) => Err(LpError::Backend(e.to_string())),
        }
    }

    fn absorb_bounds(&mut self, row: &Constraint) {
        match row.coefs.as_slice() {
            [] => {
                let ok = match row.relation {
                    Relation::Le => 0.0 <= row.rhs + BOUND_TOL,
                    Relation::Ge => 0.0 >= row.rhs - BOUND_TOL,
                    Relation::Eq => row.rhs.abs() <= BOUND_TOL,
                };
                self.empty_infeasible |= !ok;
            }
            &[(v, c)] => {
                let bound = row.rhs / c;
                let (caps_above, caps_below) = match row.relation {
                    Relation::Eq => (true, true),
                    Relation::Le => (c > 0.0, c < 0.0),
                    Relation::Ge => (c < 0.0, c > 0.0),
                };
                let (lo, hi) = &mut self.row_bounds[v];
                if caps_above {
                    *hi = hi.min(bound);
                }
                if caps_below {
                    *lo = lo.max(bound);
                }
            }
            _ => {}
        }
    }
}

impl LpBackend for MicroLp {
    fn load(&mut self, model: &LinearModel) {
        self.objective = vec![0.0; model.variables.len()];
        for &(v, c) in &model.objective {
            self.objective[v] += c;
        }
        self.base = model.variables.iter().map(|v| (v.lower, v.upper)).collect();
        self.row_bounds = self.base.clone();
        self.bounds = self.base.clone();
        self.rows.clear();
        self.empty_infeasible = false;
        self.warm = None;
        self.add_rows(&model.constraints);
    }

    fn reset_bounds(&mut self) {
        self.bounds.clone_from(&self.base);
    }

    fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = (lower, upper);
    }

    fn add_rows(&mut self, rows: &[Constraint]) {
        for row in rows {
            self.absorb_bounds(row);
        }
        self.rows.extend_from_slice(rows);
    }

    fn solve(&mut self) -> Result<LpOutcome, LpError> {
        if self.empty_infeasible {
            return Ok(LpOutcome::Infeasible);
        }
        if let Some(w) = self.warm.take() {
            if let Some(result) = self.advance(w) {
                return Ok(result);
            }
        }
        self.rebuild()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulation::{Provenance, VarKind, VarTag, Variable};

    fn var(upper: f64) -> Variable {
        Variable {
            kind: VarKind::Continuous,
            lower: 0.0,
            upper,
            tag: VarTag::Y(0),
        }
    }

    fn row(coefs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Constraint {
        Constraint {
            coefs,
            relation,
            rhs,
            provenance: Provenance::Structural("test"),
        }
    }

    fn small_model() -> LinearModel {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6
        LinearModel {
            variables: vec![var(f64::INFINITY), var(f64::INFINITY)],
            objective: vec![(0, 1.0), (1, 1.0)],
            constraints: vec![
                row(vec![(0, 1.0), (1, 2.0)], Relation::Le, 4.0),
                row(vec![(0, 3.0), (1, 1.0)], Relation::Le, 6.0),
            ],
        }
    }

    fn objective(outcome: LpOutcome) -> f64 {
        match outcome {
            LpOutcome::Optimal { objective, .. } => objective,
            LpOutcome::Infeasible => panic!("infeasible"),
        }
    }

    #[test]
    fn solves_and_warm_starts() {
        let mut lp = MicroLp::new();
        lp.load(&small_model());
        assert!((objective(lp.solve().unwrap()) - 2.8).abs() < 1e-9);
        lp.add_rows(&[row(vec![(0, 1.0), (1, 1.0)], Relation::Le, 2.0)]);
        assert!((objective(lp.solve().unwrap()) - 2.0).abs() < 1e-9);
        lp.add_rows(&[row(vec![(0, 1.0)], Relation::Ge, 3.0)]);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn bound_changes_and_singleton_rows() {
        let mut model = small_model();
        model
            .constraints
            .push(row(vec![(1, 2.0)], Relation::Le, 1.0));
        let mut lp = MicroLp::new();
        lp.load(&model);
        // y <= 0.5, x <= 5/3 from 3x + y <= 6
        assert!((objective(lp.solve().unwrap()) - (11.0 / 6.0 + 0.5)).abs() < 1e-9);
        lp.set_bounds(0, 0.0, 1.0);
        assert!((objective(lp.solve().unwrap()) - 1.5).abs() < 1e-9);
        lp.set_bounds(0, 2.0, 1.0);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn fixes_are_released_between_nodes() {
        let mut lp = MicroLp::new();
        lp.load(&small_model());
        assert!((objective(lp.solve().unwrap()) - 2.8).abs() < 1e-9);
        lp.set_bounds(1, 2.0, 2.0);
        assert!((objective(lp.solve().unwrap()) - 2.0).abs() < 1e-9);
        // pinning y = 5 breaks x + 2y <= 4; the solver must recover
        lp.reset_bounds();
        lp.set_bounds(1, 5.0, 5.0);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Infeasible);
        lp.reset_bounds();
        assert!((objective(lp.solve().unwrap()) - 2.8).abs() < 1e-9);
        lp.set_bounds(0, 0.5, 1.0);
        assert!((objective(lp.solve().unwrap()) - 2.5).abs() < 1e-9);
        lp.reset_bounds();
        lp.add_rows(&[row(vec![(0, 1.0), (1, 1.0)], Relation::Le, 2.0)]);
        assert!((objective(lp.solve().unwrap()) - 2.0).abs() < 1e-9);
    }
}
