use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use crate::bytecode::CompiledModule;
use crate::fitness::{coverage, covered_goals, suite_fitness, SuiteExecutionSummary};
use crate::runtime::{execute_test, DistanceConfig, EngineError, ExecutionResult};
use crate::search::SearchConfig;
use crate::testcase::{TestCase, TestSuite};

/// Executes test cases, memoizing results by test content.
#[derive(Debug)]
pub struct Evaluator<'a> {
    cm: &'a CompiledModule,
    distance: DistanceConfig,
    step_budget: u64,
    cache: HashMap<TestCase, Arc<ExecutionResult>>,
    baseline: Arc<ExecutionResult>,
    pub executions: u64,
}

/// Aggregate view of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteEvaluation {
    pub summary: SuiteExecutionSummary,
    pub fitness: f64,
    pub coverage: f64,
}

impl<'a> Evaluator<'a> {
    pub fn new(cm: &'a CompiledModule, cfg: &SearchConfig) -> Result<Self, EngineError> {
        let distance = cfg.distance_config();
        let baseline = Arc::new(execute_test(cm, &TestCase::new(), &distance, cfg.step_budget)?);
        Ok(Evaluator {
            cm,
            distance,
            step_budget: cfg.step_budget,
            cache: HashMap::new(),
            baseline,
            executions: 1,
        })
    }

    pub fn module(&self) -> &'a CompiledModule {
        self.cm
    }

    /// Result of running nothing but the module body.
    pub fn baseline(&self) -> &ExecutionResult {
        &self.baseline
    }

    /// Executes without touching the cache.
    pub fn execute(&mut self, t: &TestCase) -> Result<ExecutionResult, EngineError> {
        self.executions += 1;
        execute_test(self.cm, t, &self.distance, self.step_budget)
    }

    pub fn run(&mut self, t: &TestCase) -> Result<Arc<ExecutionResult>, EngineError> {
        if let Some(r) = self.cache.get(t) {
            return Ok(Arc::clone(r));
        }
        let r = Arc::new(self.execute(t)?);
        self.cache.insert(t.clone(), Arc::clone(&r));
        Ok(r)
    }

    pub fn evaluate(&mut self, s: &TestSuite) -> Result<SuiteEvaluation, EngineError> {
        let mut summary = SuiteExecutionSummary::empty(self.cm.num_predicates());
        absorb(&mut summary, &self.baseline);
        for t in &s.tests {
            let r = self.run(t)?;
            absorb(&mut summary, &r);
        }
        Ok(SuiteEvaluation {
            fitness: suite_fitness(&summary, self.cm),
            coverage: coverage(&summary, self.cm),
            summary,
        })
    }

    /// Drops cached results for tests outside `keep`.
    pub fn retain<'t>(&mut self, keep: impl IntoIterator<Item = &'t TestCase>) {
        let keep: HashSet<&TestCase> = keep.into_iter().collect();
        self.cache.retain(|t, _| keep.contains(t));
    }

    pub fn cached(&self) -> usize {
        self.cache.len()
    }
}

fn absorb(summary: &mut SuiteExecutionSummary, r: &ExecutionResult) {
    summary
        .absorb(r)
        .expect("results of one module always share a goal space");
}

/// Coverage and fitness of a suite, counting the module import that every
/// run performs.
pub fn evaluate_suite(cm: &CompiledModule, s: &TestSuite, cfg: &SearchConfig) -> Result<SuiteEvaluation, EngineError> {
    Evaluator::new(cm, cfg)?.evaluate(s)
}

/// Removes tests whose covered goals are all covered by other remaining
/// tests or by the module import alone, scanning from the last test backwards. The covered goal set, and
/// hence coverage, is unchanged.
pub fn minimize_suite(s: &TestSuite, ev: &mut Evaluator) -> Result<TestSuite, EngineError> {
    let cm = ev.module();
    let goals_of = |r: &ExecutionResult| {
        let mut summary = SuiteExecutionSummary::empty(cm.num_predicates());
        absorb(&mut summary, r);
        covered_goals(&summary, cm)
    };
    let baseline = goals_of(ev.baseline());
    let mut goal_sets: Vec<BTreeSet<String>> = Vec::with_capacity(s.len());
    for t in &s.tests {
        let r = ev.run(t)?;
        goal_sets.push(goals_of(&r).difference(&baseline).cloned().collect());
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for g in goal_sets.iter().flatten() {
        *counts.entry(g.as_str()).or_default() += 1;
    }
    let mut keep = vec![true; s.len()];
    let mut remaining = s.len();
    for i in (0..s.len()).rev() {
        if remaining <= 1 {
            break;
        }
        if goal_sets[i].iter().all(|g| counts[g.as_str()] >= 2) {
            keep[i] = false;
            remaining -= 1;
            for g in &goal_sets[i] {
                *counts.get_mut(g.as_str()).unwrap() -= 1;
            }
        }
    }
    Ok(TestSuite::new(
        s.tests
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(t, _)| t.clone())
            .collect(),
    ))
}
