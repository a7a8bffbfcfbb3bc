//! Search-based unit test generation for `.dyn` modules.
//!
//! The pipeline: [`lang`] parses a module, [`bytecode`] compiles it into code
//! objects with instrumented conditional jumps, [`runtime`] executes test
//! cases and records branch distances, [`fitness`] aggregates them, and
//! [`generators`] runs whole-suite evolution or feedback-directed random
//! generation over the test representation in [`testcase`] using the
//! operators in [`search`]. [`experiments`] holds reporting and statistics.

pub mod bytecode;
pub mod experiments;
pub mod fitness;
pub mod generators;
pub mod lang;
pub mod runtime;
pub mod search;
pub mod testcase;

use thiserror::Error;

/// Errors from loading a subject module.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Syntax(#[from] lang::SyntaxError),
    #[error(transparent)]
    Compile(#[from] bytecode::CompileError),
}

/// Parses and compiles a module in one step.
pub fn load_module(name: &str, source: &str) -> Result<bytecode::CompiledModule, LoadError> {
    let ast = lang::parse_module(name, source)?;
    Ok(bytecode::compile_module(&ast)?)
}
