mod common;

use dyntest_core::bytecode::CompiledModule;
use dyntest_core::search::{
    crossover, mutate_suite, mutate_testcase, sample_random_testcase, RngStream, SearchConfig, SearchContext,
};
use dyntest_core::testcase::{parse_suite, render_suite, validate, TestSuite};
use proptest::prelude::*;

fn random_suite(ctx: &SearchContext, rng: &mut RngStream, max: usize) -> TestSuite {
    let n = rng.below(max + 1);
    TestSuite::new((0..n).map(|_| sample_random_testcase(ctx, rng)).collect())
}

fn config(typed: bool) -> SearchConfig {
    SearchConfig {
        use_annotations: typed,
        ..SearchConfig::default()
    }
}

fn check_suite(cm: &CompiledModule, cfg: &SearchConfig, s: &TestSuite) -> Result<(), TestCaseError> {
    let pool = cm.pool_for(cfg.use_annotations);
    prop_assert!(s.len() <= cfg.max_suite_size);
    for t in &s.tests {
        let diagnostics = validate(t, &pool, cfg.max_test_length);
        prop_assert!(diagnostics.is_empty(), "{:?}", diagnostics);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crossover_never_widens_the_size_gap(seed in any::<u64>(), module in 0usize..9) {
        let modules = common::corpus_modules();
        let (_, cm) = &modules[module % modules.len()];
        let cfg = config(true);
        let pool = cm.pool_for(true);
        let ctx = SearchContext::new(&pool, &cm.constants, &cfg);
        let mut rng = RngStream::from_seed(seed);
        let p1 = random_suite(&ctx, &mut rng, 12);
        let p2 = random_suite(&ctx, &mut rng, 12);
        let (o1, o2) = crossover(&p1, &p2, &mut rng);
        prop_assert!(o1.len().abs_diff(o2.len()) <= p1.len().abs_diff(p2.len()));
        prop_assert_eq!(o1.len() + o2.len(), p1.len() + p2.len());
    }

    #[test]
    fn operators_keep_tests_well_formed(seed in any::<u64>(), module in 0usize..9, typed in any::<bool>()) {
        let modules = common::corpus_modules();
        let (_, cm) = &modules[module % modules.len()];
        let cfg = config(typed);
        let pool = cm.pool_for(typed);
        let ctx = SearchContext::new(&pool, &cm.constants, &cfg);
        let mut rng = RngStream::from_seed(seed);
        let mut a = random_suite(&ctx, &mut rng, 8);
        let mut b = random_suite(&ctx, &mut rng, 8);
        for _ in 0..10 {
            check_suite(cm, &cfg, &a)?;
            check_suite(cm, &cfg, &b)?;
            let (x, y) = crossover(&a, &b, &mut rng);
            a = mutate_suite(&x, &ctx, &mut rng);
            b = mutate_suite(&y, &ctx, &mut rng);
            if let Some(t) = a.tests.first() {
                let m = mutate_testcase(t, &ctx, &mut rng);
                prop_assert!(validate(&m, &pool, cfg.max_test_length).is_empty());
            }
        }
    }

    #[test]
    fn rendered_suites_parse_back(seed in any::<u64>(), module in 0usize..9) {
        let modules = common::corpus_modules();
        let (stem, cm) = &modules[module % modules.len()];
        let cfg = config(true);
        let pool = cm.pool_for(true);
        let ctx = SearchContext::new(&pool, &cm.constants, &cfg);
        let mut rng = RngStream::from_seed(seed);
        let suite = random_suite(&ctx, &mut rng, 6);
        let text = render_suite(&suite, stem);
        prop_assert_eq!(parse_suite(&text, &pool).unwrap(), suite);
    }
}
