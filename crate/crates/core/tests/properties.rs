use proptest::prelude::*;

use pxlt_core::dependency::{exhaustive_vig, CheckKind};
use pxlt_core::noise::NoiseConfig;
use pxlt_core::oracle::{enumerate_local_optima, is_local_optimum, random_additive_vig, synthetic_perfect_dsm};
use pxlt_core::pxlt::{build_px_lt, differing, ltop_ws, px_masks};
use pxlt_core::sll::{build_lt, estimate_dsm, is_perfect};
use pxlt_core::{Objective, ProblemInstance, RngStream, Solution};

fn bits(n: usize) -> impl Strategy<Value = Vec<bool>> {
    proptest::collection::vec(any::<bool>(), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Noise never touches solutions at or above the level, so every local
    // optimum of the clean function at or above it survives.
    #[test]
    fn noise_keeps_high_optima(percent in 10.0f64..=100.0, modulus in 2u32..5, seed in 0u64..1000) {
        let clean = ProblemInstance::cyclic_trap(4, 1, 4).unwrap();
        let level = 8.0;
        let cfg = NoiseConfig::draw(clean.n(), percent, level, modulus, seed).unwrap();
        let noised = clean.clone().with_noise(cfg);
        for x in enumerate_local_optima(&clean).unwrap() {
            let t = clean.value(x.bits());
            if t >= level {
                prop_assert_eq!(noised.value(x.bits()), t);
                prop_assert!(is_local_optimum(&noised, &x));
            }
        }
    }

    #[test]
    fn px_masks_partition_the_differing_genes(seed in 0u64..10_000, n in 2usize..30) {
        let mut rng = RngStream::new(seed);
        let vig = random_additive_vig(n, 3.min(n), n / 2 + 1, &mut rng);
        let p1 = Solution::random(n, &mut rng);
        let p2 = Solution::random(n, &mut rng);
        let mut all: Vec<usize> = px_masks(&vig, &p1, &p2).iter().flat_map(|m| m.indices().to_vec()).collect();
        all.sort_unstable();
        prop_assert_eq!(all, differing(&p1, &p2));
    }

    #[test]
    fn synthetic_dsms_are_perfect_and_keep_masks(seed in 0u64..10_000, n in 3usize..25) {
        let mut rng = RngStream::new(seed);
        let vig = random_additive_vig(n, 3, n / 3 + 1, &mut rng);
        let dsm = synthetic_perfect_dsm(&vig, 0.5, &mut rng);
        prop_assert!(is_perfect(&dsm, &vig).is_some());
        let p1 = Solution::random(n, &mut rng);
        let p2 = Solution::random(n, &mut rng);
        if let Some(tree) = build_px_lt(&dsm, &p1, &p2) {
            let d = differing(&p1, &p2).len();
            prop_assert_eq!(tree.len(), 2 * d - 1);
            for m in px_masks(&vig, &p1, &p2) {
                prop_assert!(tree.contains(m.indices()));
            }
            for m in ltop_ws(&tree, d) {
                prop_assert!(2 * m.len() <= d && m.len() > 1);
            }
        }
    }

    #[test]
    fn estimated_dsms_build_full_trees(pop in proptest::collection::vec(bits(7), 1..40)) {
        let sols: Vec<Solution> = pop.into_iter().map(Solution::new).collect();
        let dsm = estimate_dsm(&sols);
        for (_, _, v) in dsm.pairs() {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
        }
        let lt = build_lt(&dsm);
        prop_assert_eq!(lt.len(), 13);
        prop_assert_eq!(lt.root().unwrap().members.clone(), (0..7).collect::<Vec<_>>());
    }
}

#[test]
fn exhaustive_graphs_of_the_example_functions() {
    let fe1 = ProblemInstance::fe1();
    let nl = exhaustive_vig(&fe1, CheckKind::NonLinear).unwrap();
    let nm = exhaustive_vig(&fe1, CheckKind::NonMonotonic).unwrap();
    assert!(nm.is_subgraph_of(&nl));
    assert_eq!(Some(&nl), fe1.ground_truth_vig());
    // the product form is fully non-linear but keeps the block structure
    let fe4 = ProblemInstance::fe4();
    assert_eq!(exhaustive_vig(&fe4, CheckKind::NonLinear).unwrap().edge_count(), 36);
    assert_eq!(
        exhaustive_vig(&ProblemInstance::onemax(6), CheckKind::NonLinear)
            .unwrap()
            .edge_count(),
        0
    );
}
