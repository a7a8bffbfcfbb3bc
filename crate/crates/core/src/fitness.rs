//! Suite-level aggregation of execution results into branch distances,
//! fitness and coverage.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bytecode::{Branch, CodeId, CompiledModule};
use crate::runtime::ExecutionResult;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot merge results from different modules")]
pub struct MixedModuleError;

/// Union of several executions of the same module.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteExecutionSummary {
    pub executed_code_objects: BTreeSet<CodeId>,
    /// Predicate evaluations summed over every merged execution.
    pub execution_count_per_predicate: Vec<u64>,
    /// Minimum distance per branch, indexed by [`Branch::index`].
    pub min_distance_per_branch: Vec<f64>,
}

impl SuiteExecutionSummary {
    /// Summary with no executions for a module with `predicates` predicates.
    pub fn empty(predicates: usize) -> Self {
        SuiteExecutionSummary {
            executed_code_objects: BTreeSet::new(),
            execution_count_per_predicate: vec![0; predicates],
            min_distance_per_branch: vec![f64::INFINITY; 2 * predicates],
        }
    }

    /// Folds one more execution into the summary.
    pub fn absorb(&mut self, r: &ExecutionResult) -> Result<(), MixedModuleError> {
        if self.execution_count_per_predicate.is_empty() && self.executed_code_objects.is_empty() {
            self.execution_count_per_predicate.resize(r.predicate_counts.len(), 0);
            self.min_distance_per_branch.resize(r.min_distances.len(), f64::INFINITY);
        }
        if r.predicate_counts.len() != self.execution_count_per_predicate.len() {
            return Err(MixedModuleError);
        }
        self.executed_code_objects.extend(r.executed_code_objects.iter().copied());
        for (acc, &n) in self.execution_count_per_predicate.iter_mut().zip(&r.predicate_counts) {
            *acc += u64::from(n);
        }
        for (acc, &d) in self.min_distance_per_branch.iter_mut().zip(&r.min_distances) {
            if d < *acc {
                *acc = d;
            }
        }
        Ok(())
    }

    pub fn execution_count(&self, predicate: usize) -> u64 {
        self.execution_count_per_predicate.get(predicate).copied().unwrap_or(0)
    }

    pub fn min_distance(&self, b: Branch) -> f64 {
        self.min_distance_per_branch
            .get(b.index())
            .copied()
            .unwrap_or(f64::INFINITY)
    }

    pub fn is_covered(&self, b: Branch) -> bool {
        self.min_distance(b) == 0.0
    }

    /// B_T: the branches taken at least once.
    pub fn taken_branches(&self) -> BTreeSet<Branch> {
        self.min_distance_per_branch
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0.0)
            .map(|(i, _)| Branch::from_index(i))
            .collect()
    }
}

/// Merges results; all must come from the same compiled module.
pub fn merge<'a, I>(results: I) -> Result<SuiteExecutionSummary, MixedModuleError>
where
    I: IntoIterator<Item = &'a ExecutionResult>,
{
    let mut iter = results.into_iter();
    let Some(first) = iter.next() else {
        return Ok(SuiteExecutionSummary::default());
    };
    let mut s = SuiteExecutionSummary::empty(first.predicate_counts.len());
    s.absorb(first)?;
    for r in iter {
        if r.module_fingerprint != first.module_fingerprint {
            return Err(MixedModuleError);
        }
        s.absorb(r)?;
    }
    Ok(s)
}

/// x / (x + 1), with infinity mapped to 1.
pub fn normalize(x: f64) -> f64 {
    if x.is_infinite() {
        1.0
    } else {
        x / (x + 1.0)
    }
}

/// d(b, T).
pub fn branch_fitness(b: Branch, s: &SuiteExecutionSummary) -> f64 {
    if s.is_covered(b) {
        0.0
    } else if s.execution_count(b.predicate) >= 2 {
        normalize(s.min_distance(b))
    } else {
        1.0
    }
}

/// f(T) = |C| - |C_T| + sum of d(b, T) over all branches.
pub fn suite_fitness(s: &SuiteExecutionSummary, cm: &CompiledModule) -> f64 {
    let missing = cm
        .code_objects
        .iter()
        .filter(|c| !s.executed_code_objects.contains(&c.id))
        .count() as f64;
    missing + cm.branches.iter().map(|&b| branch_fitness(b, s)).sum::<f64>()
}

/// cov(T) = (|C_T| + |B_T|) / (|C| + |B|).
pub fn coverage(s: &SuiteExecutionSummary, cm: &CompiledModule) -> f64 {
    let total = cm.total_goals();
    if total == 0 {
        return 1.0;
    }
    let code = cm
        .code_objects
        .iter()
        .filter(|c| s.executed_code_objects.contains(&c.id))
        .count();
    let branches = cm.branches.iter().filter(|&&b| s.is_covered(b)).count();
    (code + branches) as f64 / total as f64
}

/// Covered goals as stable strings (`code:<id>` and branch display names).
pub fn covered_goals(s: &SuiteExecutionSummary, cm: &CompiledModule) -> BTreeSet<String> {
    let code = cm
        .code_objects
        .iter()
        .filter(|c| s.executed_code_objects.contains(&c.id))
        .map(|c| format!("code:{}", c.id));
    let branches = cm
        .branches
        .iter()
        .filter(|&&b| s.is_covered(b))
        .map(|b| b.to_string());
    code.chain(branches).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bytecode::Polarity;

    fn summary(counts: Vec<u64>, dists: Vec<f64>, code: &[usize]) -> SuiteExecutionSummary {
        SuiteExecutionSummary {
            executed_code_objects: code.iter().copied().collect(),
            execution_count_per_predicate: counts,
            min_distance_per_branch: dists,
        }
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize(0.0), 0.0);
        assert_eq!(normalize(1.0), 0.5);
        assert_eq!(normalize(f64::INFINITY), 1.0);
    }

    #[test]
    fn branch_fitness_cases() {
        let t = Branch::new(0, Polarity::True);
        assert_eq!(branch_fitness(t, &summary(vec![1], vec![0.0, 2.0], &[])), 0.0);
        assert_eq!(branch_fitness(t, &summary(vec![1], vec![4.0, 0.0], &[])), 1.0);
        assert_eq!(branch_fitness(t, &summary(vec![3], vec![4.0, 0.0], &[])), 0.8);
    }

    fn result(fp: u64, counts: Vec<u32>, dists: Vec<f64>, code: &[usize]) -> ExecutionResult {
        ExecutionResult {
            module_fingerprint: fp,
            executed_code_objects: code.iter().copied().collect(),
            predicate_counts: counts,
            min_distances: dists,
            exception: None,
            steps_used: 0,
        }
    }

    #[test]
    fn merge_takes_minimum_and_union() {
        let a = result(7, vec![1], vec![3.0, 0.0], &[1]);
        let b = result(7, vec![2], vec![1.0, 0.0], &[2]);
        let s = merge([&a, &b]).unwrap();
        assert_eq!(s.min_distance(Branch::new(0, Polarity::True)), 1.0);
        assert_eq!(s.executed_code_objects, BTreeSet::from([1, 2]));
        assert_eq!(s.execution_count(0), 3);
        assert_eq!(merge(std::iter::empty()).unwrap(), SuiteExecutionSummary::default());
        let other = result(8, vec![1], vec![3.0, 0.0], &[1]);
        assert_eq!(merge([&a, &other]), Err(MixedModuleError));
    }

    #[test]
    fn formula_examples() {
        let cm = crate::load_module(
            "m",
            "def f(x) {\n if x { return 1 }\n if x > 1 { return 2 }\n}\ndef g() { return 0 }",
        )
        .unwrap();
        assert_eq!(cm.code_objects.len(), 3);
        assert_eq!(cm.branches.len(), 4);
        let none = summary(vec![0, 0], vec![f64::INFINITY; 4], &[1]);
        assert_eq!(suite_fitness(&none, &cm), 2.0 + 4.0);
        let partial = summary(vec![1, 1], vec![0.0, 1.0, 0.0, 3.0], &[0, 1]);
        assert!((coverage(&partial, &cm) - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn import_only_baseline() {
        let cm = crate::load_module(
            "m",
            "def f(x) {\n if x { return 1 }\n if x > 1 { return 2 }\n}\ndef g() { return 0 }\nclass A {\n def m(self, y) {\n  if y == 2 { return 1 }\n }\n}",
        )
        .unwrap();
        assert_eq!(cm.total_goals(), 4 + 6);
        let cov = coverage(&summary(vec![0; 3], vec![f64::INFINITY; 6], &[0]), &cm);
        assert!((cov - 0.1).abs() < 1e-12);
    }
}
