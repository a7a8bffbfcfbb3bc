//! Instrumented execution of compiled modules under a test case.

mod distance;
mod value;
mod vm;

pub use distance::{branch_distance, comparison_holds, levenshtein, truthiness_distance, DistanceConfig};
pub use value::{values_equal, values_identical, Num, Object, Value};
pub use vm::{
    execute_test, EngineError, ExecutionResult, RaisedException, DEFAULT_STEP_BUDGET, MAX_CALL_DEPTH,
    MAX_STRING_LEN,
};
