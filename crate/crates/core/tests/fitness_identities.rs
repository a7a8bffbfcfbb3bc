mod common;

use dyntest_core::fitness::{coverage, covered_goals, suite_fitness};
use dyntest_core::generators::evaluate_suite;
use dyntest_core::search::SearchConfig;
use dyntest_core::testcase::TestSuite;

#[test]
fn hand_built_suites_cover_every_reachable_goal() {
    let cfg = SearchConfig::default();
    for (stem, cm) in common::corpus_modules() {
        let suite = common::fixture_suite(&stem, &cm);
        let ev = evaluate_suite(&cm, &suite, &cfg).unwrap();
        let goals = covered_goals(&ev.summary, &cm);
        if common::UNREACHABLE.contains(&stem.as_str()) {
            assert!(ev.coverage < 1.0, "{stem}");
            assert!(ev.fitness > 0.0, "{stem}");
        } else {
            assert_eq!(ev.coverage, 1.0, "{stem}: covered {goals:?}");
            assert_eq!(ev.fitness, 0.0, "{stem}");
        }
    }
}

#[test]
fn zero_fitness_iff_full_coverage_on_every_sub_suite() {
    let cfg = SearchConfig::default();
    for (stem, cm) in common::corpus_modules() {
        let full = common::fixture_suite(&stem, &cm);
        let n = full.tests.len();
        for mask in 0u32..(1 << n) {
            let tests = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| full.tests[i].clone()).collect();
            let ev = evaluate_suite(&cm, &TestSuite::new(tests), &cfg).unwrap();
            assert_eq!(ev.fitness == 0.0, ev.coverage == 1.0, "{stem} mask {mask}");
            assert_eq!(ev.fitness, suite_fitness(&ev.summary, &cm));
            assert_eq!(ev.coverage, coverage(&ev.summary, &cm));
        }
    }
}

#[test]
fn unreachable_goals_match_hand_computation() {
    let cfg = SearchConfig::default();
    // dead_branch: 3 code objects, 4 predicates; `1 > 2` never holds and its
    // true distance is 2 - 1 + 1 = 2, so f = 2/3 and cov = 10/11
    let cm = common::module("dead_branch");
    let ev = evaluate_suite(&cm, &common::fixture_suite("dead_branch", &cm), &cfg).unwrap();
    assert_eq!(ev.coverage, 10.0 / 11.0);
    assert_eq!(ev.fitness, 2.0 / 3.0);

    // abstract_base: Money.amount and Money.is_positive can never run
    let cm = common::module("abstract_base");
    let ev = evaluate_suite(&cm, &common::fixture_suite("abstract_base", &cm), &cfg).unwrap();
    let total = (cm.code_objects.len() + cm.branches.len()) as f64;
    assert_eq!(ev.coverage, (total - 2.0) / total);
    assert_eq!(ev.fitness, 2.0);
}
