//! Test cases as sequences of value-defining statements, test suites, and
//! their export format.

mod export;
mod validate;

use std::hash::{Hash, Hasher};

use crate::lang::{CallableKind, CallablePool, TypeRef};

pub use export::{parse_suite, render_suite, ExportError};
pub use validate::{validate, Diagnostic, DiagnosticKind};

/// Reference to the variable defined by the statement at this index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef(pub usize);

#[derive(Debug, Clone)]
pub enum PrimitiveValue {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

// floats compare by bit pattern so that equality agrees with hashing
impl PartialEq for PrimitiveValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (PrimitiveValue::Int(a), PrimitiveValue::Int(b)) => a == b,
            (PrimitiveValue::Float(a), PrimitiveValue::Float(b)) => a.to_bits() == b.to_bits(),
            (PrimitiveValue::Bool(a), PrimitiveValue::Bool(b)) => a == b,
            (PrimitiveValue::Str(a), PrimitiveValue::Str(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for PrimitiveValue {}

impl Hash for PrimitiveValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            PrimitiveValue::Int(v) => v.hash(state),
            PrimitiveValue::Float(v) => v.to_bits().hash(state),
            PrimitiveValue::Bool(v) => v.hash(state),
            PrimitiveValue::Str(v) => v.hash(state),
        }
    }
}

impl PrimitiveValue {
    pub fn type_ref(&self) -> TypeRef {
        match self {
            PrimitiveValue::Int(_) => TypeRef::Int,
            PrimitiveValue::Float(_) => TypeRef::Float,
            PrimitiveValue::Bool(_) => TypeRef::Bool,
            PrimitiveValue::Str(_) => TypeRef::Str,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Statement {
    Primitive(PrimitiveValue),
    Constructor {
        class: String,
        args: Vec<VarRef>,
    },
    Method {
        /// Class that declares the method; dispatch at run time is dynamic.
        owner: String,
        receiver: VarRef,
        name: String,
        args: Vec<VarRef>,
    },
    Function {
        name: String,
        args: Vec<VarRef>,
    },
}

impl Statement {
    /// Every variable this statement reads, receiver first.
    pub fn uses(&self) -> Vec<VarRef> {
        match self {
            Statement::Primitive(_) => Vec::new(),
            Statement::Constructor { args, .. } | Statement::Function { args, .. } => args.clone(),
            Statement::Method { receiver, args, .. } => {
                std::iter::once(*receiver).chain(args.iter().copied()).collect()
            }
        }
    }

    fn refs_mut(&mut self) -> Vec<&mut VarRef> {
        match self {
            Statement::Primitive(_) => Vec::new(),
            Statement::Constructor { args, .. } | Statement::Function { args, .. } => {
                args.iter_mut().collect()
            }
            Statement::Method { receiver, args, .. } => {
                std::iter::once(receiver).chain(args.iter_mut()).collect()
            }
        }
    }

    pub fn args(&self) -> &[VarRef] {
        match self {
            Statement::Primitive(_) => &[],
            Statement::Constructor { args, .. }
            | Statement::Function { args, .. }
            | Statement::Method { args, .. } => args,
        }
    }

    pub fn args_mut(&mut self) -> Option<&mut Vec<VarRef>> {
        match self {
            Statement::Primitive(_) => None,
            Statement::Constructor { args, .. }
            | Statement::Function { args, .. }
            | Statement::Method { args, .. } => Some(args),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TestCase {
    pub statements: Vec<Statement>,
}

impl TestCase {
    pub fn new() -> Self {
        TestCase::default()
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn push(&mut self, stmt: Statement) -> VarRef {
        self.statements.push(stmt);
        VarRef(self.statements.len() - 1)
    }

    /// Inserts `stmt` at `position`, shifting later references.
    pub fn insert(&mut self, position: usize, stmt: Statement) -> VarRef {
        for later in &mut self.statements[position..] {
            for r in later.refs_mut() {
                if r.0 >= position {
                    r.0 += 1;
                }
            }
        }
        self.statements.insert(position, stmt);
        VarRef(position)
    }

    /// Removes the statement at `index` together with every statement that
    /// transitively depends on its variable. Returns how many were removed.
    pub fn remove_cascade(&mut self, index: usize) -> usize {
        let mut dead = vec![false; self.len()];
        dead[index] = true;
        for j in index + 1..self.len() {
            if self.statements[j].uses().iter().any(|r| dead[r.0]) {
                dead[j] = true;
            }
        }
        let mut new_index = vec![usize::MAX; self.len()];
        let mut next = 0;
        for (i, d) in dead.iter().enumerate() {
            if !d {
                new_index[i] = next;
                next += 1;
            }
        }
        let old = std::mem::take(&mut self.statements);
        for (i, mut stmt) in old.into_iter().enumerate() {
            if dead[i] {
                continue;
            }
            for r in stmt.refs_mut() {
                r.0 = new_index[r.0];
            }
            self.statements.push(stmt);
        }
        dead.iter().filter(|d| **d).count()
    }

    pub fn replace(&mut self, index: usize, stmt: Statement) {
        self.statements[index] = stmt;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TestSuite {
    pub tests: Vec<TestCase>,
}

impl TestSuite {
    pub fn new(tests: Vec<TestCase>) -> Self {
        TestSuite { tests }
    }

    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }

    /// Total number of statements over all tests.
    pub fn size(&self) -> usize {
        self.tests.iter().map(TestCase::len).sum()
    }
}

/// Static type of the variable defined at `index`.
pub fn inferred_type(t: &TestCase, index: usize, pool: &CallablePool) -> TypeRef {
    match &t.statements[index] {
        Statement::Primitive(v) => v.type_ref(),
        Statement::Constructor { class, .. } => TypeRef::Class(class.clone()),
        Statement::Method { owner, name, .. } => pool
            .method(owner, name)
            .map(|m| m.returns.clone())
            .unwrap_or(TypeRef::Unknown),
        Statement::Function { name, .. } => pool
            .entries
            .iter()
            .find(|e| e.kind == CallableKind::Function && &e.name == name)
            .map(|f| f.returns.clone())
            .unwrap_or(TypeRef::Unknown),
    }
}
