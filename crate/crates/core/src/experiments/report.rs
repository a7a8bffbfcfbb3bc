use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde_json::{json, Value as Json};

use crate::bytecode::{Branch, CompiledModule};
use crate::fitness::{covered_goals, SuiteExecutionSummary};
use crate::generators::{GenerationBudget, GenerationReport};
use crate::runtime::{EngineError, ExecutionResult};
use crate::search::SearchConfig;
use crate::testcase::TestSuite;

/// Spelling of an extended real in JSON: a number, or "inf".
pub fn distance_json(d: f64) -> Json {
    if d.is_finite() {
        json!(d)
    } else {
        json!("inf")
    }
}

/// Timeline rows: each coverage improvement, closed by a row at the end of
/// the budget (the wall-clock limit if one was set, else the run's end).
pub fn timeline_rows(report: &GenerationReport, budget: &GenerationBudget) -> Vec<(f64, f64)> {
    let mut rows = report.timeline.clone();
    if rows.is_empty() {
        rows.push((0.0, report.final_coverage));
    }
    let last_event = rows.last().map_or(0.0, |r| r.0);
    let end = budget.wall_clock_seconds.unwrap_or(report.elapsed_seconds).max(last_event);
    if rows.len() >= 2 {
        rows.last_mut().expect("nonempty").0 = end;
    } else {
        rows.push((end, report.final_coverage));
    }
    rows
}

pub fn timeline_csv(report: &GenerationReport, budget: &GenerationBudget) -> String {
    let mut out = String::from("elapsed_seconds,coverage\n");
    for (t, c) in timeline_rows(report, budget) {
        let _ = writeln!(out, "{t:.3},{c:?}");
    }
    out
}

pub fn emit_timeline(report: &GenerationReport, budget: &GenerationBudget, path: &Path) -> io::Result<()> {
    fs::write(path, timeline_csv(report, budget))
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Parses a timeline CSV back into rows.
pub fn parse_timeline(csv: &str) -> Option<Vec<(f64, f64)>> {
    let mut lines = csv.lines();
    if lines.next()? != "elapsed_seconds,coverage" {
        return None;
    }
    lines
        .map(|l| {
            let (t, c) = l.split_once(',')?;
            Some((t.parse().ok()?, c.parse().ok()?))
        })
        .collect()
}

fn execution_json(cm: &CompiledModule, r: &ExecutionResult) -> Json {
    let code: Vec<Json> = r
        .executed_code_objects
        .iter()
        .map(|&c| json!({"id": c, "name": cm.code_objects[c].name}))
        .collect();
    let branches: Vec<Json> = r
        .recorded()
        .map(|(b, d)| {
            json!({
                "goal": b.to_string(),
                "distance": distance_json(d),
                "executions": r.predicate_counts[b.predicate],
            })
        })
        .collect();
    json!({
        "executed_code_objects": code,
        "branches": branches,
        "exception": r.exception,
        "steps_used": r.steps_used,
    })
}

/// Deterministic JSON description of executing each test of `suite`.
pub fn trace_json(cm: &CompiledModule, suite: &TestSuite, cfg: &SearchConfig) -> Result<Json, EngineError> {
    let mut tests = Vec::with_capacity(suite.len());
    for (i, t) in suite.tests.iter().enumerate() {
        let r = crate::runtime::execute_test(cm, t, &cfg.distance_config(), cfg.step_budget)?;
        let mut entry = execution_json(cm, &r);
        entry["name"] = json!(format!("test_{i}"));
        tests.push(entry);
    }
    Ok(json!({
        "module": cm.name,
        "fingerprint": format!("{:016x}", cm.fingerprint),
        "goals": {
            "code_objects": cm.code_objects.len(),
            "branches": cm.branches.iter().map(Branch::to_string).collect::<Vec<_>>(),
        },
        "tests": tests,
    }))
}

/// Per-test goal attainment for an exported suite.
pub fn suite_sidecar(cm: &CompiledModule, suite: &TestSuite, cfg: &SearchConfig) -> Result<Json, EngineError> {
    let mut tests = Vec::with_capacity(suite.len());
    for (i, t) in suite.tests.iter().enumerate() {
        let r = crate::runtime::execute_test(cm, t, &cfg.distance_config(), cfg.step_budget)?;
        let mut s = SuiteExecutionSummary::empty(cm.num_predicates());
        s.absorb(&r).expect("same module");
        tests.push(json!({
            "name": format!("test_{i}"),
            "statements": t.len(),
            "covered_goals": covered_goals(&s, cm),
            "exception": r.exception,
        }));
    }
    Ok(json!({ "module": cm.name, "tests": tests }))
}

/// Summary written as `report.json` by the `generate` command.
pub fn report_json(
    cm: &CompiledModule,
    report: &GenerationReport,
    cfg: &SearchConfig,
    budget: &GenerationBudget,
) -> Result<Json, EngineError> {
    let eval = crate::generators::evaluate_suite(cm, &report.best_suite, cfg)?;
    Ok(json!({
        "module": cm.name,
        "algorithm": report.algorithm,
        "type_hints": report.use_annotations,
        "seed": report.seed,
        "budget": budget,
        "config": cfg,
        "final_coverage": report.final_coverage,
        "final_fitness": report.final_fitness,
        "total_goals": cm.total_goals(),
        "covered_goals": covered_goals(&eval.summary, cm),
        "tests": report.best_suite.len(),
        "statements": report.best_suite.size(),
        "iterations": report.iterations,
        "executions": report.executions,
        "elapsed_seconds": report.elapsed_seconds,
        "passing_tests": report.passing_tests,
        "failing_tests": report.failing_tests,
        "timeline": timeline_rows(report, budget),
    }))
}
