use std::fmt;

use super::{Statement, TestCase};
use crate::lang::CallablePool;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    UseBeforeDef,
    UnknownCallable,
    ArityMismatch,
    TooLong,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub statement: usize,
    pub kind: DiagnosticKind,
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::UseBeforeDef => "use-before-def",
            DiagnosticKind::UnknownCallable => "unknown-callable",
            DiagnosticKind::ArityMismatch => "arity-mismatch",
            DiagnosticKind::TooLong => "too-long",
        };
        write!(f, "{kind} at stmt {}", self.statement)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

/// Structural checks: backward references only, callables known to the
/// pool with matching arity, and at most `max_length` statements.
pub fn validate(t: &TestCase, pool: &CallablePool, max_length: usize) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (i, stmt) in t.statements.iter().enumerate() {
        for r in stmt.uses() {
            if r.0 >= i {
                out.push(Diagnostic {
                    statement: i,
                    kind: DiagnosticKind::UseBeforeDef,
                    detail: format!("var{} referenced before definition", r.0),
                });
            }
        }
        let sig = match stmt {
            Statement::Primitive(_) => continue,
            Statement::Constructor { class, .. } => pool.constructor(class),
            Statement::Function { name, .. } => pool.function(name),
            Statement::Method { owner, name, .. } => pool.method(owner, name),
        };
        match sig {
            None => out.push(Diagnostic {
                statement: i,
                kind: DiagnosticKind::UnknownCallable,
                detail: String::new(),
            }),
            Some(sig) if sig.params.len() != stmt.args().len() => out.push(Diagnostic {
                statement: i,
                kind: DiagnosticKind::ArityMismatch,
                detail: format!("expected {} arguments, got {}", sig.params.len(), stmt.args().len()),
            }),
            Some(_) => {}
        }
    }
    if t.len() > max_length {
        out.push(Diagnostic {
            statement: max_length,
            kind: DiagnosticKind::TooLong,
            detail: format!("{} statements exceed the limit of {max_length}", t.len()),
        });
    }
    out
}
