//! Exhaustive reference solvers used to check the exact machinery, plus the
//! reduction from Hamiltonian path.

mod brute;
mod hpp;
mod maxflow;

pub use brute::{
    brute_force_route_time, brute_force_solve, brute_force_solve_sequential, brute_force_tsp_path,
    OracleResult, MAX_CUSTOMERS, MAX_ROUTES, MAX_TSP_NODES,
};
pub use hpp::{has_hamiltonian_path, hpp_reduce, Graph};
pub use maxflow::{max_flow, secs_maxflow_separation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {0}")]
    Guard(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::SubInstance;
    use crate::model::Instance;

    fn single(t_max: f64) -> Instance {
        let coords = vec![(0.0, 0.0), (3.0, 4.0), (6.0, 0.0)];
        Instance::euclidean(1, t_max, coords, vec![0.0, 4.0, 0.0], vec![0.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn one_customer_within_budget() {
        let res = brute_force_solve(&single(11.0)).unwrap();
        assert_eq!(res.profit, Some(4.0));
        assert_eq!(
            brute_force_solve_sequential(&single(11.0)).unwrap().profit,
            Some(4.0)
        );
        assert_eq!(brute_force_solve(&single(10.5)).unwrap().profit, Some(0.0));
    }

    #[test]
    fn unreachable_mandatory_is_infeasible() {
        let mut inst = single(10.5);
        inst.mandatory.insert(1);
        assert!(brute_force_solve(&inst).unwrap().is_infeasible());
        assert!(brute_force_solve_sequential(&inst).unwrap().is_infeasible());
    }

    #[test]
    fn tsp_oracle_basics() {
        let inst = single(100.0);
        assert_eq!(brute_force_route_time(&inst, &[1]).unwrap(), 11.0);
        let mut sub = SubInstance::uniform(4, 1.0);
        assert_eq!(brute_force_tsp_path(&sub).unwrap(), 4.0);
        for v in 0..3 {
            sub.cost[3][v] = f64::INFINITY;
            sub.cost[v][3] = f64::INFINITY;
        }
        assert_eq!(brute_force_tsp_path(&sub).unwrap(), f64::INFINITY);
        assert!(brute_force_tsp_path(&SubInstance::uniform(10, 1.0)).is_err());
    }
}
