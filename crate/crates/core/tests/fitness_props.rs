mod common;

use dyntest_core::fitness::{coverage, normalize, suite_fitness};
use dyntest_core::generators::evaluate_suite;
use dyntest_core::search::{sample_random_testcase, RngStream, SearchConfig, SearchContext};
use dyntest_core::testcase::TestSuite;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // adding a test can only cover more and lower minimum distances
    #[test]
    fn adding_tests_never_hurts(seed in any::<u64>(), module in 0usize..9, typed in any::<bool>()) {
        let modules = common::corpus_modules();
        let (_, cm) = &modules[module % modules.len()];
        let cfg = SearchConfig { use_annotations: typed, ..SearchConfig::default() };
        let pool = cm.pool_for(typed);
        let ctx = SearchContext::new(&pool, &cm.constants, &cfg);
        let mut rng = RngStream::from_seed(seed);
        let mut suite = TestSuite::new(Vec::new());
        let mut last = evaluate_suite(cm, &suite, &cfg).unwrap();
        for _ in 0..6 {
            suite.tests.push(sample_random_testcase(&ctx, &mut rng));
            let next = evaluate_suite(cm, &suite, &cfg).unwrap();
            prop_assert!(next.fitness <= last.fitness);
            prop_assert!(next.coverage >= last.coverage);
            prop_assert!((0.0..=1.0).contains(&next.coverage));
            let goals = (cm.code_objects.len() + cm.branches.len()) as f64;
            prop_assert!(next.fitness >= 0.0 && next.fitness <= goals);
            prop_assert_eq!(next.fitness, suite_fitness(&next.summary, cm));
            prop_assert_eq!(next.coverage, coverage(&next.summary, cm));
            last = next;
        }
    }

    #[test]
    fn normalization_is_monotone_and_bounded(x in 0.0f64..1e12, y in 0.0f64..1e12) {
        prop_assert!(normalize(x) < 1.0 && normalize(x) >= 0.0);
        if x < y {
            prop_assert!(normalize(x) <= normalize(y));
        }
        prop_assert_eq!(normalize(x), x / (x + 1.0));
    }
}

#[test]
fn infinite_distance_normalizes_to_one() {
    assert_eq!(normalize(f64::INFINITY), 1.0);
}
