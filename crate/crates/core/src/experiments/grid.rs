use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::report::emit_timeline;
use super::stats::{compare, ComparisonStats};
use crate::generators::{random_generate, whole_suite_generate, Algorithm, GenerationBudget};
use crate::runtime::EngineError;
use crate::search::SearchConfig;
use crate::LoadError;

/// One `.dyn` file of a corpus. The project is the subdirectory holding
/// it, or the module name for files at the corpus root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CorpusModule {
    pub project: String,
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Error)]
pub enum GridError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Load { path: PathBuf, source: LoadError },
    #[error("{module}: {source}")]
    Engine { module: String, source: EngineError },
}

/// Finds every `.dyn` file below `dir`, sorted by project then name.
pub fn discover_corpus(dir: &Path) -> Result<Vec<CorpusModule>, GridError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| GridError::Io { path, source }
    };
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).map_err(io_err(&d))? {
            let path = entry.map_err(io_err(&d))?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "dyn") {
                let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                let project = match path.parent() {
                    Some(p) if p != dir => p.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                    _ => name.clone(),
                };
                out.push(CorpusModule { project, name, path });
            }
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct GridConfig {
    pub reps: usize,
    pub budget: GenerationBudget,
    /// Seed of repetition r is `base.seed + r`; the same seeds are used for
    /// all four configurations.
    pub base: SearchConfig,
    /// Directory for per-run artifacts: `timelines/*.csv` and
    /// `suites/*.dyn`. Records hold paths relative to it.
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub module: String,
    pub project: String,
    pub algorithm: Algorithm,
    pub annotations: bool,
    pub seed: u64,
    pub final_coverage: f64,
    pub iterations: u64,
    pub elapsed_seconds: f64,
    /// Wall-clock budget the run was given, if any.
    pub budget_seconds: Option<f64>,
    pub timeline_path: String,
    pub suite_path: String,
    /// Exported suite in test-file syntax.
    #[serde(skip)]
    pub rendered_suite: String,
}

pub const CONFIGURATIONS: [(Algorithm, bool); 4] = [
    (Algorithm::WholeSuite, true),
    (Algorithm::WholeSuite, false),
    (Algorithm::Random, true),
    (Algorithm::Random, false),
];

/// Runs every module under the four configurations, `reps` times each.
pub fn run_grid(
    modules: &[CorpusModule],
    cfg: &GridConfig,
    mut progress: impl FnMut(&RunRecord),
) -> Result<Vec<RunRecord>, GridError> {
    if let Some(dir) = &cfg.output_dir {
        for sub in ["timelines", "suites"] {
            let path = dir.join(sub);
            fs::create_dir_all(&path).map_err(|source| GridError::Io { path, source })?;
        }
    }
    let mut records = Vec::with_capacity(modules.len() * CONFIGURATIONS.len() * cfg.reps);
    for m in modules {
        let source = fs::read_to_string(&m.path).map_err(|source| GridError::Io {
            path: m.path.clone(),
            source,
        })?;
        let cm = crate::load_module(&m.name, &source).map_err(|source| GridError::Load {
            path: m.path.clone(),
            source,
        })?;
        for rep in 0..cfg.reps {
            for (algorithm, annotations) in CONFIGURATIONS {
                let run_cfg = SearchConfig {
                    seed: cfg.base.seed + rep as u64,
                    use_annotations: annotations,
                    ..cfg.base.clone()
                };
                let report = match algorithm {
                    Algorithm::WholeSuite => whole_suite_generate(&cm, &run_cfg, cfg.budget),
                    Algorithm::Random => random_generate(&cm, &run_cfg, cfg.budget),
                }
                .map_err(|source| GridError::Engine {
                    module: m.name.clone(),
                    source,
                })?;
                let mode = if annotations { "typed" } else { "untyped" };
                let stem = format!("{}_{}_{}_{}", m.name, algorithm.name(), mode, run_cfg.seed);
                let rendered_suite = crate::testcase::render_suite(&report.best_suite, &m.name);
                let (timeline_path, suite_path) = match &cfg.output_dir {
                    Some(dir) => {
                        let timeline = format!("timelines/{stem}.csv");
                        let path = dir.join(&timeline);
                        emit_timeline(&report, &cfg.budget, &path).map_err(|source| GridError::Io { path, source })?;
                        let suite = format!("suites/{stem}.dyn");
                        let path = dir.join(&suite);
                        fs::write(&path, &rendered_suite).map_err(|source| GridError::Io { path, source })?;
                        (timeline, suite)
                    }
                    None => (String::new(), String::new()),
                };
                let record = RunRecord {
                    module: m.name.clone(),
                    project: m.project.clone(),
                    algorithm,
                    annotations,
                    seed: run_cfg.seed,
                    final_coverage: report.final_coverage,
                    iterations: report.iterations,
                    elapsed_seconds: report.elapsed_seconds,
                    budget_seconds: cfg.budget.wall_clock_seconds,
                    timeline_path,
                    suite_path,
                    rendered_suite,
                };
                progress(&record);
                records.push(record);
            }
        }
    }
    Ok(records)
}

/// Named comparisons: (label, first configuration, second configuration).
pub const COMPARISONS: [(&str, (Algorithm, bool), (Algorithm, bool)); 4] = [
    ("ws-vs-random/typed", (Algorithm::WholeSuite, true), (Algorithm::Random, true)),
    ("ws-vs-random/untyped", (Algorithm::WholeSuite, false), (Algorithm::Random, false)),
    ("typed-vs-untyped/whole-suite", (Algorithm::WholeSuite, true), (Algorithm::WholeSuite, false)),
    ("typed-vs-untyped/random", (Algorithm::Random, true), (Algorithm::Random, false)),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub module: String,
    pub project: String,
    pub comparison: String,
    pub stats: ComparisonStats,
}

fn coverages(records: &[RunRecord], module: &str, config: (Algorithm, bool)) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.module == module && (r.algorithm, r.annotations) == config)
        .map(|r| r.final_coverage)
        .collect()
}

/// One row per module and comparison, in module order.
pub fn comparison_rows(records: &[RunRecord]) -> Vec<ComparisonRow> {
    let mut modules: Vec<(&str, &str)> = Vec::new();
    for r in records {
        if !modules.iter().any(|(m, _)| *m == r.module) {
            modules.push((&r.module, &r.project));
        }
    }
    let mut rows = Vec::new();
    for (module, project) in modules {
        for (label, a, b) in COMPARISONS {
            if let Ok(stats) = compare(&coverages(records, module, a), &coverages(records, module, b)) {
                rows.push(ComparisonRow {
                    module: module.to_string(),
                    project: project.to_string(),
                    comparison: label.to_string(),
                    stats,
                });
            }
        }
    }
    rows
}

/// Mean Â12 per comparison, averaged over modules and over projects (each
/// project first averaged over its modules). Returns (label, comparison,
/// mean).
pub fn aggregate_rows(rows: &[ComparisonRow]) -> Vec<(String, String, f64)> {
    let mut out = Vec::new();
    for (label, _, _) in COMPARISONS {
        let of: Vec<&ComparisonRow> = rows.iter().filter(|r| r.comparison == label).collect();
        if of.is_empty() {
            continue;
        }
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        let per_module: Vec<f64> = of.iter().map(|r| r.stats.a12).collect();
        let mut by_project: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for r in &of {
            by_project.entry(&r.project).or_default().push(r.stats.a12);
        }
        let per_project: Vec<f64> = by_project.values().map(|v| mean(v)).collect();
        out.push(("mean-over-modules".to_string(), label.to_string(), mean(&per_module)));
        out.push(("mean-over-projects".to_string(), label.to_string(), mean(&per_project)));
    }
    out
}

pub fn stats_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("module,comparison,a12,u,p,median_a,median_b\n");
    for r in rows {
        let s = &r.stats;
        let _ = writeln!(
            out,
            "{},{},{:.6},{},{:.6},{:.6},{:.6}",
            r.module, r.comparison, s.a12, s.u_statistic, s.p_value, s.median_a, s.median_b
        );
    }
    for (label, comparison, a12) in aggregate_rows(rows) {
        let _ = writeln!(out, "{label},{comparison},{a12:.6},,,,");
    }
    out
}

pub fn runs_csv(records: &[RunRecord]) -> String {
    let mut out =
        String::from("module,project,algorithm,type_hints,seed,final_coverage,iterations,elapsed_seconds,budget_seconds,timeline,suite\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:?},{},{:.3},{},{},{}",
            r.module,
            r.project,
            r.algorithm.name(),
            if r.annotations { "on" } else { "off" },
            r.seed,
            r.final_coverage,
            r.iterations,
            r.elapsed_seconds,
            r.budget_seconds.map(|b| b.to_string()).unwrap_or_default(),
            r.timeline_path,
            r.suite_path
        );
    }
    out
}
