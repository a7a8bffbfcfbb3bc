use super::*;
use crate::fitness::normalize;
use crate::load_module;
use crate::search::SearchConfig;
use crate::testcase::{render_suite, Statement, TestCase};

const FOO_BAR: &str = "
class Foo {
    def init(self, b: Bar) { self.b = b }
    def do_foo(self, b: Bar) -> int {
        if b is self.b { return 1 }
        return 0
    }
}
class Bar {
    def init(self) { pass }
    def do_bar(self, x: int) -> int {
        if x > 10 { return 1 }
        return 0
    }
}
";

const DEAD: &str = "
def f(x: int) -> int {
    if 1 > 2 { return 1 }
    if x > 0 { return 2 }
    return 3
}
";

fn cfg(seed: u64) -> SearchConfig {
    SearchConfig {
        seed,
        population: 10,
        ..SearchConfig::default()
    }
}

fn assert_monotone(report: &GenerationReport) {
    assert!(report.timeline.windows(2).all(|w| w[0].1 <= w[1].1 && w[0].0 <= w[1].0));
    assert_eq!(report.timeline.last().unwrap().1, report.final_coverage);
}

#[test]
fn whole_suite_covers_foo_bar() {
    let cm = load_module("foo_bar", FOO_BAR).unwrap();
    let r = whole_suite_generate(&cm, &cfg(1), GenerationBudget::iterations(200)).unwrap();
    assert_eq!(r.final_coverage, 1.0);
    assert_eq!(r.final_fitness, 0.0);
    assert_monotone(&r);
    assert!(r.fitness_history.windows(2).all(|w| w[1] <= w[0]));
    let again = evaluate_suite(&cm, &r.best_suite, &cfg(1)).unwrap();
    assert_eq!(again.coverage, r.final_coverage);
}

#[test]
fn random_covers_foo_bar() {
    let cm = load_module("foo_bar", FOO_BAR).unwrap();
    let r = random_generate(&cm, &cfg(2), GenerationBudget::iterations(5000)).unwrap();
    assert_eq!(r.final_coverage, 1.0);
    assert_monotone(&r);
    assert!(r.iterations < 5000);
}

#[test]
fn dead_branch_stagnates() {
    let cm = load_module("dead", DEAD).unwrap();
    let r = whole_suite_generate(&cm, &cfg(3), GenerationBudget::iterations(30)).unwrap();
    assert!(r.final_coverage < 1.0);
    assert!(r.final_fitness >= normalize(1.0));
    assert!(r.fitness_history.iter().all(|&f| f >= normalize(1.0)));
}

#[test]
fn zero_iterations() {
    let cm = load_module("foo_bar", FOO_BAR).unwrap();
    let ws = whole_suite_generate(&cm, &cfg(4), GenerationBudget::iterations(0)).unwrap();
    assert_eq!(ws.iterations, 0);
    assert_eq!(ws.fitness_history.len(), 1);
    assert!(!ws.best_suite.is_empty());

    let rnd = random_generate(&cm, &cfg(4), GenerationBudget::iterations(0)).unwrap();
    assert_eq!((rnd.passing_tests, rnd.failing_tests), (0, 0));
    assert!(rnd.best_suite.is_empty());
    let import_only = 1.0 / cm.total_goals() as f64;
    assert_eq!(rnd.final_coverage, import_only);
    assert_eq!(rnd.timeline, vec![(0.0, import_only), (rnd.timeline[1].0, import_only)]);
}

#[test]
fn raising_module_fills_only_the_failing_archive() {
    let cm = load_module("m", "def f(x) { return 1 / 0 }\ndef g() { return len(3) }").unwrap();
    let r = random_generate(&cm, &cfg(5), GenerationBudget::iterations(200)).unwrap();
    assert_eq!(r.passing_tests, 0);
    assert!(r.failing_tests > 0);
}

#[test]
fn iteration_budgets_are_reproducible() {
    let cm = load_module("foo_bar", FOO_BAR).unwrap();
    for algorithm in [Algorithm::WholeSuite, Algorithm::Random] {
        let run = || {
            let r = match algorithm {
                Algorithm::WholeSuite => whole_suite_generate(&cm, &cfg(9), GenerationBudget::iterations(5)),
                Algorithm::Random => random_generate(&cm, &cfg(9), GenerationBudget::iterations(40)),
            }
            .unwrap();
            render_suite(&r.best_suite, "foo_bar")
        };
        assert_eq!(run(), run());
    }
}

#[test]
fn archive_reconstructs_extensions() {
    let mut a = TestArchive::default();
    let mut t = TestCase::new();
    t.push(Statement::Constructor { class: "Bar".into(), args: vec![] });
    let first = a.push_extension(None, &t);
    let mut t2 = t.clone();
    t2.push(Statement::Constructor { class: "Bar".into(), args: vec![] });
    let second = a.push_extension(Some(first), &t2);
    assert_eq!(a.get(first), t);
    assert_eq!(a.get(second), t2);
    assert_eq!(a.test_len(second), 2);
}

#[test]
fn minimization_keeps_coverage() {
    let cm = load_module("foo_bar", FOO_BAR).unwrap();
    let c = cfg(6);
    let r = random_generate(&cm, &c, GenerationBudget::iterations(300)).unwrap();
    let mut ev = Evaluator::new(&cm, &c).unwrap();
    let mut doubled = r.best_suite.clone();
    doubled.tests.extend(r.best_suite.tests.iter().cloned());
    let min = minimize_suite(&doubled, &mut ev).unwrap();
    assert!(min.len() <= r.best_suite.len());
    assert_eq!(ev.evaluate(&min).unwrap().coverage, ev.evaluate(&doubled).unwrap().coverage);
}

#[test]
fn failing_extensions_of_passing_tests() {
    let cm = load_module("m", "def f(x: int) -> int {\n if x > 0 { return 1 / 0 }\n return x\n}").unwrap();
    let r = random_generate(&cm, &cfg(7), GenerationBudget::iterations(300)).unwrap();
    assert!(r.passing_tests > 0 && r.failing_tests > 0);
    let again = evaluate_suite(&cm, &r.best_suite, &cfg(7)).unwrap();
    assert_eq!(again.coverage, r.final_coverage);
}
