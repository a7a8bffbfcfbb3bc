//! Stack bytecode, code objects, and the predicate/branch coverage goals.

mod compiler;
mod disasm;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::lang::ast::{ArithOp, CmpOp};
use crate::lang::{CallablePool, ConstantPool};

pub use compiler::{compile_module, CompileError};
pub use disasm::disassemble;

pub type CodeId = usize;
pub type PredicateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Module,
    Function,
    Constructor,
    Method,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Len,
    Str,
    Int,
    Abs,
}

impl Builtin {
    pub fn lookup(name: &str) -> Option<Builtin> {
        Some(match name {
            "len" => Builtin::Len,
            "str" => Builtin::Str,
            "int" => Builtin::Int,
            "abs" => Builtin::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Len => "len",
            Builtin::Str => "str",
            Builtin::Int => "int",
            Builtin::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instr {
    PushConst(usize),
    LoadLocal(usize),
    StoreLocal(usize),
    LoadGlobal(usize),
    StoreGlobal(usize),
    GetAttr(usize),
    /// Pops value then object.
    SetAttr(usize),
    CallFunction { code: CodeId, argc: usize },
    Construct { class: usize, argc: usize },
    CallMethod { name: usize, argc: usize },
    CallBuiltin { builtin: Builtin, argc: usize },
    Arith(ArithOp),
    Neg,
    Not,
    Compare(CmpOp),
    /// Pops two operands, records the predicate, jumps when the comparison
    /// outcome equals `when`.
    CompareJump { op: CmpOp, predicate: PredicateId, when: bool, target: usize },
    /// Pops one value, records the truthiness predicate, jumps when its
    /// truthiness equals `when`.
    TruthyJump { predicate: PredicateId, when: bool, target: usize },
    Jump(usize),
    Dup,
    Pop,
    Return,
    Raise { kind: usize, has_message: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PredicateOp {
    Compare(CmpOp),
    Truthy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arity {
    Unary,
    Binary,
}

/// One atomic condition at a conditional jump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredicateSite {
    pub id: PredicateId,
    pub code_object: CodeId,
    pub operator: PredicateOp,
    pub line: u32,
    pub col: u32,
}

impl PredicateSite {
    pub fn arity(&self) -> Arity {
        match self.operator {
            PredicateOp::Compare(_) => Arity::Binary,
            PredicateOp::Truthy => Arity::Unary,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeObject {
    pub id: CodeId,
    pub kind: CodeKind,
    /// `<module>`, `f`, or `Class.method`.
    pub name: String,
    /// Parameter count including `self` for constructors and methods.
    pub arity: usize,
    pub n_locals: usize,
    pub instructions: Vec<Instr>,
    pub predicates: Vec<PredicateSite>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    True,
    False,
}

/// A coverage goal: one outcome of one predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub predicate: PredicateId,
    pub polarity: Polarity,
}

impl Branch {
    pub fn new(predicate: PredicateId, polarity: Polarity) -> Self {
        Branch { predicate, polarity }
    }

    /// Dense index: `2 * predicate` for the true branch, `+1` for false.
    pub fn index(self) -> usize {
        2 * self.predicate + usize::from(self.polarity == Polarity::False)
    }

    pub fn from_index(index: usize) -> Self {
        let polarity = if index % 2 == 0 { Polarity::True } else { Polarity::False };
        Branch::new(index / 2, polarity)
    }

    pub fn sibling(self) -> Self {
        let polarity = match self.polarity {
            Polarity::True => Polarity::False,
            Polarity::False => Polarity::True,
        };
        Branch::new(self.predicate, polarity)
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.polarity {
            Polarity::True => "true",
            Polarity::False => "false",
        };
        write!(f, "p{}:{}", self.predicate, p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassInfo {
    pub name: String,
    pub constructor: Option<CodeId>,
    pub methods: BTreeMap<String, CodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledModule {
    pub name: String,
    pub code_objects: Vec<CodeObject>,
    pub branches: Vec<Branch>,
    /// Callables with annotations resolved; see [`CompiledModule::pool_for`].
    pub pool: CallablePool,
    pub constants: ConstantPool,
    pub classes: Vec<ClassInfo>,
    pub globals: Vec<String>,
    /// Interned attribute, method and exception names.
    pub names: Vec<String>,
    pub literals: Vec<Literal>,
    pub fingerprint: u64,
}

/// Stable goal orderings for fitness and reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goals {
    pub code_objects: Vec<CodeId>,
    pub branches: Vec<Branch>,
}

impl CompiledModule {
    pub const MODULE_CODE: CodeId = 0;

    pub fn num_predicates(&self) -> usize {
        self.branches.len() / 2
    }

    pub fn predicates(&self) -> impl Iterator<Item = &PredicateSite> {
        self.code_objects.iter().flat_map(|c| c.predicates.iter())
    }

    pub fn predicate(&self, id: PredicateId) -> Option<&PredicateSite> {
        self.predicates().find(|p| p.id == id)
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    pub fn function_code(&self, name: &str) -> Option<CodeId> {
        self.code_objects
            .iter()
            .find(|c| c.kind == CodeKind::Function && c.name == name)
            .map(|c| c.id)
    }

    pub fn total_goals(&self) -> usize {
        self.code_objects.len() + self.branches.len()
    }

    /// The pool used for input selection: annotated, or with every declared
    /// type erased.
    pub fn pool_for(&self, use_annotations: bool) -> CallablePool {
        if use_annotations {
            self.pool.clone()
        } else {
            self.pool.without_annotations()
        }
    }
}

pub fn enumerate_goals(cm: &CompiledModule) -> Goals {
    Goals {
        code_objects: cm.code_objects.iter().map(|c| c.id).collect(),
        branches: cm.branches.clone(),
    }
}
