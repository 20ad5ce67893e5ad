mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topstmin::model::{
    check_solution, parse_instance, parse_solution, route_duration, write_instance,
    write_solution, Instance, Route, Solution, Variant,
};

/// Feasibility re-derived from the definitions, without the checker.
fn recheck(inst: &Instance, sol: &Solution) -> bool {
    let n = inst.n();
    if sol.routes.len() != inst.fleet_size {
        return false;
    }
    let mut seen = vec![0; n];
    for r in &sol.routes {
        let v = &r.nodes;
        if v.len() < 2 || v[0] != 0 || v[v.len() - 1] != n - 1 || v.iter().any(|&k| k >= n) {
            return false;
        }
        let mut time = 0.0;
        for w in v.windows(2) {
            let (i, j) = (w[0], w[1]);
            if i == j || i == n - 1 || j == 0 || inst.physical.contains(&(i, j)) {
                return false;
            }
            time += inst.travel[i][j];
        }
        for &k in &v[1..v.len() - 1] {
            time += inst.service[k];
            seen[k] += 1;
        }
        if time > inst.t_max + 1e-6 {
            return false;
        }
        if inst.variant == Variant::PL {
            for &a in &v[1..v.len() - 1] {
                for &b in &v[1..v.len() - 1] {
                    if a < b && inst.logical.contains(&(a, b)) {
                        return false;
                    }
                }
            }
        }
    }
    seen.iter().all(|&c| c <= 1) && inst.mandatory.iter().all(|&k| seen[k] == 1)
}

/// A random, often infeasible, set of routes; some have broken endpoints,
/// repeated nodes or a wrong count.
fn random_solution(inst: &Instance, rng: &mut ChaCha8Rng) -> Solution {
    let n = inst.n();
    let count = if rng.gen_bool(0.85) { inst.fleet_size } else { rng.gen_range(0..=inst.fleet_size + 1) };
    let routes = (0..count)
        .map(|_| {
            let len = rng.gen_range(0..=3.min(n - 2));
            let mut nodes = vec![0];
            for _ in 0..len {
                nodes.push(rng.gen_range(1..n - 1));
            }
            nodes.push(n - 1);
            if rng.gen_bool(0.05) {
                nodes[0] = rng.gen_range(0..n);
            }
            let duration = route_duration(inst, &nodes).unwrap_or(f64::INFINITY);
            Route { nodes, duration }
        })
        .collect();
    Solution::new(inst, routes)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn checker_matches_definitions(seed in any::<u64>()) {
        let inst = common::random_instance(seed, 6, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..20 {
            let sol = random_solution(&inst, &mut rng);
            prop_assert_eq!(check_solution(&inst, &sol).is_feasible(), recheck(&inst, &sol), "{:?}", sol.routes);
        }
    }

    #[test]
    fn instance_text_round_trips(seed in any::<u64>()) {
        let inst = common::random_instance(seed, 8, 3);
        let text = write_instance(&inst).unwrap();
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(write_instance(&back).unwrap(), text);
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn solution_text_round_trips(seed in any::<u64>()) {
        let inst = common::random_instance(seed, 6, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sol = random_solution(&inst, &mut rng);
        prop_assume!(sol.routes.iter().all(|r| r.nodes.len() >= 2));
        let back = parse_solution(&inst, &write_solution(&sol)).unwrap();
        prop_assert_eq!(back.routes.iter().map(|r| &r.nodes).collect::<Vec<_>>(), sol.routes.iter().map(|r| &r.nodes).collect::<Vec<_>>());
        prop_assert_eq!(back.profit, sol.profit);
    }

    /// With the source and destination at the same point, a route and its
    /// reversal cover the same distance.
    #[test]
    fn reversal_keeps_duration_when_symmetric(seed in any::<u64>(), customers in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = customers + 2;
        let mut coords: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(0.0..50.0), rng.gen_range(0.0..50.0))).collect();
        coords[n - 1] = coords[0];
        let service: Vec<f64> = (0..n).map(|k| if k == 0 || k == n - 1 { 0.0 } else { rng.gen_range(0.0..5.0) }).collect();
        let inst = Instance::euclidean(1, 1e9, coords, vec![0.0; n], service).unwrap();
        let mut route: Vec<usize> = (1..n - 1).filter(|_| rng.gen_bool(0.7)).collect();
        let forward = [vec![0], route.clone(), vec![n - 1]].concat();
        route.reverse();
        let backward = [vec![0], route, vec![n - 1]].concat();
        let a = route_duration(&inst, &forward).unwrap();
        let b = route_duration(&inst, &backward).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }
}

#[test]
fn reversal_can_change_duration_when_asymmetric() {
    // 0 -> 1 -> 2 -> 3 is cheap one way only
    let mut travel = vec![vec![10.0; 4]; 4];
    travel[1][2] = 1.0;
    travel[2][1] = 7.0;
    let inst = Instance::with_travel_matrix(1, 100.0, travel, vec![0.0; 4], vec![0.0; 4]).unwrap();
    let a = route_duration(&inst, &[0, 1, 2, 3]).unwrap();
    let b = route_duration(&inst, &[0, 2, 1, 3]).unwrap();
    assert_eq!((a, b), (21.0, 27.0));
}
