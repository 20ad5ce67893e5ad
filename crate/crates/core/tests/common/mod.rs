//! Random small instances shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topstmin::model::{Instance, Variant};

/// A random instance with up to `max_customers` customers, integral profits,
/// and random mandatory nodes, removed arcs and conflicting pairs.
pub fn random_instance(seed: u64, max_customers: usize, max_routes: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let customers = rng.gen_range(1..=max_customers);
    let n = customers + 2;
    let coords: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
        .collect();
    let mut profit: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=10) as f64).collect();
    profit[0] = 0.0;
    profit[n - 1] = 0.0;
    let mut service: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
    service[0] = 0.0;
    service[n - 1] = 0.0;
    let t_max = rng.gen_range(120.0..400.0);
    let m = rng.gen_range(1..=max_routes);
    let mut inst = Instance::euclidean(m, t_max, coords, profit, service).unwrap();
    for k in 1..n - 1 {
        if rng.gen_bool(0.1) {
            inst.mandatory.insert(k);
        }
    }
    for i in 0..n - 1 {
        for j in 1..n {
            if i != j && rng.gen_bool(0.15) {
                inst.physical.insert((i, j));
            }
        }
    }
    if rng.gen_bool(0.5) {
        inst.variant = Variant::PL;
        for i in 1..n - 1 {
            for j in i + 1..n - 1 {
                if rng.gen_bool(0.15) {
                    inst.logical.insert((i, j));
                }
            }
        }
    }
    inst
}
