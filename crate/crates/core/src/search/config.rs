use serde::{Deserialize, Serialize};

/// Every tunable of the search. Field names double as `--ga-*` CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Maximum number of statements in a test case.
    pub max_test_length: usize,
    /// Maximum number of test cases in a suite.
    pub max_suite_size: usize,
    /// Probability of appending a fresh test during suite mutation.
    pub sigma: f64,
    pub population: usize,
    pub crossover_rate: f64,
    pub tournament_size: usize,
    pub elitism: usize,
    pub seed: u64,
    pub use_annotations: bool,
    pub constant_seeding_prob: f64,
    /// Depth limit for nested generator chains in input selection.
    pub max_recursion_depth: usize,
    /// Branch-distance penalty constant.
    pub k: f64,
    /// VM steps per test execution.
    pub step_budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_test_length: 30,
            max_suite_size: 40,
            sigma: 0.1,
            population: 50,
            crossover_rate: 0.75,
            tournament_size: 5,
            elitism: 1,
            seed: 0,
            use_annotations: true,
            constant_seeding_prob: 0.3,
            max_recursion_depth: 10,
            k: 1.0,
            step_budget: crate::runtime::DEFAULT_STEP_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid search configuration: {0}")]
pub struct ConfigError(pub String);

impl SearchConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError(m.to_string()));
        if self.max_test_length == 0 {
            return bad("max_test_length must be at least 1");
        }
        if self.max_suite_size == 0 {
            return bad("max_suite_size must be at least 1");
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad("sigma must lie strictly between 0 and 1");
        }
        if self.population == 0 {
            return bad("population must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad("crossover_rate must lie in [0, 1]");
        }
        if self.tournament_size == 0 {
            return bad("tournament_size must be at least 1");
        }
        if self.elitism > self.population {
            return bad("elitism cannot exceed the population");
        }
        if !(0.0..=1.0).contains(&self.constant_seeding_prob) {
            return bad("constant_seeding_prob must lie in [0, 1]");
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad("k must be a positive number");
        }
        Ok(())
    }

    pub fn distance_config(&self) -> crate::runtime::DistanceConfig {
        crate::runtime::DistanceConfig { k: self.k }
    }
}
