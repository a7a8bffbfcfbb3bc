//! Test-generation algorithms: whole-suite evolutionary search and
//! feedback-directed random generation.

mod archive;
mod evaluator;
mod random;
mod whole_suite;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::testcase::TestSuite;

pub use archive::TestArchive;
pub use evaluator::{evaluate_suite, minimize_suite, Evaluator, SuiteEvaluation};
pub use random::random_generate;
pub use whole_suite::whole_suite_generate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    WholeSuite,
    Random,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::WholeSuite => "whole-suite",
            Algorithm::Random => "random",
        }
    }
}

/// Stopping condition: whichever limit is hit first.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GenerationBudget {
    pub wall_clock_seconds: Option<f64>,
    pub max_iterations: Option<u64>,
}

impl GenerationBudget {
    pub fn seconds(s: f64) -> Self {
        GenerationBudget {
            wall_clock_seconds: Some(s),
            max_iterations: None,
        }
    }

    pub fn iterations(n: u64) -> Self {
        GenerationBudget {
            wall_clock_seconds: None,
            max_iterations: Some(n),
        }
    }

    pub fn is_limited(&self) -> bool {
        self.wall_clock_seconds.is_some() || self.max_iterations.is_some()
    }

    fn exhausted(&self, iterations: u64, start: Instant) -> bool {
        if self.max_iterations.is_some_and(|n| iterations >= n) {
            return true;
        }
        self.wall_clock_seconds
            .is_some_and(|s| start.elapsed() >= Duration::from_secs_f64(s.max(0.0)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationReport {
    pub algorithm: Algorithm,
    pub use_annotations: bool,
    pub seed: u64,
    /// Exported suite after goal-preserving minimization.
    pub best_suite: TestSuite,
    pub final_coverage: f64,
    pub final_fitness: f64,
    /// (elapsed seconds, coverage); coverage never decreases.
    pub timeline: Vec<(f64, f64)>,
    pub iterations: u64,
    pub executions: u64,
    pub elapsed_seconds: f64,
    /// Best fitness after each GA generation, starting with the initial
    /// population. Empty for random generation.
    pub fitness_history: Vec<f64>,
    pub passing_tests: usize,
    pub failing_tests: usize,
}

/// Records coverage improvements against wall-clock time.
#[derive(Debug)]
struct Timeline {
    start: Instant,
    points: Vec<(f64, f64)>,
}

impl Timeline {
    fn new(start: Instant, baseline: f64) -> Self {
        Timeline {
            start,
            points: vec![(0.0, baseline)],
        }
    }

    fn best(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }

    fn record(&mut self, coverage: f64) {
        if coverage > self.best() {
            self.points.push((self.start.elapsed().as_secs_f64(), coverage));
        }
    }

    /// Closing row at the end of the run, carrying the final value.
    fn finish(mut self, coverage: f64) -> Vec<(f64, f64)> {
        self.record(coverage);
        let end = self.start.elapsed().as_secs_f64();
        let last = self.best();
        self.points.push((end, last));
        self.points
    }
}

#[cfg(test)]
mod tests;
