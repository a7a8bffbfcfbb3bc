//! Genetic operators over test cases and suites, and the typed/untyped
//! input-selection policy they share.

mod config;
mod operators;
mod rng;
mod select;

pub use config::{ConfigError, SearchConfig};
pub use operators::{
    change_primitive, change_statement, crossover, crossover_at, insert_random_statement, int_delta,
    mutate_suite, mutate_suite_traced, mutate_testcase, mutate_testcase_traced, sample_random_testcase,
    AppliedOps, InsertPosition, SuiteMutationTrace, MAX_INT_DELTA,
};
pub use rng::RngStream;
pub use select::{
    random_printable_char, GenerationFailure, SearchContext, Selection, FLOAT_RANGE, INT_RANGE,
    MAX_RANDOM_STR_LEN,
};
