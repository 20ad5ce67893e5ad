use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topstmin::forge::{generate, GenScheme, PhysicalMethod};
use topstmin::model::{route_duration, Instance};

fn base(seed: u64, customers: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = customers + 2;
    let coords = (0..n)
        .map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
        .collect();
    let profit = (0..n)
        .map(|k| if k == 0 || k == n - 1 { 0.0 } else { rng.gen_range(1..=10) as f64 })
        .collect();
    Instance::euclidean(2, 400.0, coords, profit, vec![0.0; n]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn generated_instances_are_well_formed(seed in any::<u64>(), customers in 6usize..30) {
        let b = base(seed, customers);
        let n = b.n();
        for scheme in GenScheme::all(seed) {
            let g = generate(&b, &scheme).unwrap();
            let inst = &g.instance;
            // removed arcs come in opposite pairs, apart from sink -> source
            for &(i, j) in &inst.physical {
                prop_assert!((i, j) == (n - 1, 0) || inst.physical.contains(&(j, i)), "{scheme}: ({i}, {j})");
            }
            for &(i, j) in &inst.logical {
                prop_assert!(i < j && inst.is_customer(i) && inst.is_customer(j));
            }
            // every mandatory customer can be served by a route of its own
            for &k in &inst.mandatory {
                prop_assert!(inst.arc_allowed(0, k) && inst.arc_allowed(k, n - 1));
                prop_assert!(inst.within_budget(route_duration(inst, &[0, k, n - 1]).unwrap()));
            }
            // pure function of base and scheme
            prop_assert_eq!(&generate(&b, &scheme).unwrap().instance, inst);
        }
    }

    /// The seed only drives service times and cluster incompatibilities.
    #[test]
    fn seed_reaches_only_the_random_draws(seed in any::<u64>(), other in any::<u64>(), customers in 6usize..25) {
        let b = base(seed, customers);
        for (a, z) in GenScheme::all(seed).into_iter().zip(GenScheme::all(other)) {
            let x = generate(&b, &a).unwrap().instance;
            let y = generate(&b, &z).unwrap().instance;
            prop_assert_eq!(&x.mandatory, &y.mandatory);
            if a.physical == PhysicalMethod::Dpi {
                prop_assert_eq!(&x.physical, &y.physical);
            }
            prop_assert_eq!(x.physical.len(), y.physical.len());
            prop_assert_eq!(x.logical.len(), y.logical.len());
        }
    }
}
