use std::time::Instant;

use super::archive::TestArchive;
use super::evaluator::{minimize_suite, Evaluator};
use super::{Algorithm, GenerationBudget, GenerationReport, Timeline};
use crate::bytecode::CompiledModule;
use crate::fitness::{coverage, SuiteExecutionSummary};
use crate::runtime::EngineError;
use crate::search::{insert_random_statement, InsertPosition, RngStream, SearchConfig, SearchContext};
use crate::testcase::{TestCase, TestSuite};

/// Feedback-directed random generation: extend a passing test (or the
/// empty test) by one random statement, execute it, and file it as passing
/// or failing. Stops early once every goal is covered.
pub fn random_generate(
    cm: &CompiledModule,
    cfg: &SearchConfig,
    budget: GenerationBudget,
) -> Result<GenerationReport, EngineError> {
    let start = Instant::now();
    let pool = cm.pool_for(cfg.use_annotations);
    let ctx = SearchContext::new(&pool, &cm.constants, cfg);
    let mut rng = RngStream::from_seed(cfg.seed);
    let mut ev = Evaluator::new(cm, cfg)?;

    let mut summary = SuiteExecutionSummary::empty(cm.num_predicates());
    summary.absorb(ev.baseline()).expect("same module");
    let mut current = coverage(&summary, cm);
    let mut timeline = Timeline::new(start, current);

    // passing and failing tests share one store; failing ones are never extended
    let mut store = TestArchive::default();
    let mut passing: Vec<usize> = Vec::new();
    let mut failing: Vec<usize> = Vec::new();
    // first stored test to reach each goal, by branch index and code id
    let mut branch_witness: Vec<Option<usize>> = vec![None; cm.branches.len()];
    let mut code_witness: Vec<Option<usize>> = vec![None; cm.code_objects.len()];
    let mut iterations = 0u64;

    while current < 1.0 && !budget.exhausted(iterations, start) {
        iterations += 1;
        let pick = rng.below(passing.len() + 1);
        let (parent, base) = if pick == passing.len() {
            (None, TestCase::new())
        } else {
            (Some(passing[pick]), store.get(passing[pick]))
        };
        let Ok(t) = insert_random_statement(&base, InsertPosition::End, &ctx, &mut rng) else {
            continue;
        };
        let r = ev.execute(&t)?;
        let id = store.push_extension(parent, &t);
        if r.passed() {
            passing.push(id);
        } else {
            failing.push(id);
        }
        summary.absorb(&r).expect("same module");
        for &c in &r.executed_code_objects {
            code_witness[c].get_or_insert(id);
        }
        for (b, d) in r.recorded() {
            if d == 0.0 {
                branch_witness[b.index()].get_or_insert(id);
            }
        }
        current = coverage(&summary, cm);
        timeline.record(current);
    }

    let mut witnesses: Vec<usize> = branch_witness.into_iter().chain(code_witness).flatten().collect();
    witnesses.sort_unstable();
    witnesses.dedup();
    let union = TestSuite::new(witnesses.into_iter().map(|i| store.get(i)).collect());
    let best_suite = minimize_suite(&union, &mut ev)?;
    let final_eval = ev.evaluate(&best_suite)?;
    debug_assert_eq!(final_eval.coverage, current);
    Ok(GenerationReport {
        algorithm: Algorithm::Random,
        use_annotations: cfg.use_annotations,
        seed: cfg.seed,
        best_suite,
        final_coverage: final_eval.coverage,
        final_fitness: final_eval.fitness,
        timeline: timeline.finish(final_eval.coverage),
        iterations,
        executions: ev.executions,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        fitness_history: Vec::new(),
        passing_tests: passing.len(),
        failing_tests: failing.len(),
    })
}
