use std::collections::{BTreeMap, HashMap};

use super::*;
use crate::lang::ast::*;
use crate::lang::{collect_constants, collect_signatures};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("CompileError at {line}:{col}: {message}")]
pub struct CompileError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl CompileError {
    fn new(span: Span, message: impl Into<String>) -> Self {
        CompileError {
            line: span.line,
            col: span.col,
            message: message.into(),
        }
    }
}

type CResult<T> = Result<T, CompileError>;

/// Module-wide name resolution and interning tables.
struct ModuleScope {
    functions: HashMap<String, CodeId>,
    function_arity: HashMap<String, usize>,
    classes: HashMap<String, usize>,
    globals: Vec<String>,
    names: Vec<String>,
    literals: Vec<Literal>,
    next_predicate: PredicateId,
}

impl ModuleScope {
    fn global(&self, name: &str) -> Option<usize> {
        self.globals.iter().position(|g| g == name)
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return i;
        }
        self.names.push(name.to_string());
        self.names.len() - 1
    }

    fn literal(&mut self, lit: Literal) -> usize {
        let same = |a: &Literal| match (a, &lit) {
            (Literal::Float(x), Literal::Float(y)) => x.to_bits() == y.to_bits(),
            _ => *a == lit,
        };
        if let Some(i) = self.literals.iter().position(same) {
            return i;
        }
        self.literals.push(lit);
        self.literals.len() - 1
    }
}

/// Compiles a parsed module into code objects. Code object 0 is the module
/// body; functions follow in source order, then each class's constructor and
/// methods in source order.
pub fn compile_module(ast: &ModuleAst) -> Result<CompiledModule, CompileError> {
    let mut scope = ModuleScope {
        functions: HashMap::new(),
        function_arity: HashMap::new(),
        classes: HashMap::new(),
        globals: Vec::new(),
        names: Vec::new(),
        literals: Vec::new(),
        next_predicate: 0,
    };

    // pass 1: assign code ids and collect module-level names
    struct Pending<'a> {
        def: &'a FunctionDef,
        kind: CodeKind,
        name: String,
    }
    let mut pending: Vec<Pending> = Vec::new();
    let mut classes: Vec<ClassInfo> = Vec::new();
    let mut next_id: CodeId = 1;
    for item in &ast.items {
        match item {
            Item::Function(f) => {
                scope.functions.insert(f.name.clone(), next_id);
                scope.function_arity.insert(f.name.clone(), f.params.len());
                pending.push(Pending {
                    def: f,
                    kind: CodeKind::Function,
                    name: f.name.clone(),
                });
                next_id += 1;
            }
            Item::Class(c) => {
                let mut info = ClassInfo {
                    name: c.name.clone(),
                    constructor: None,
                    methods: BTreeMap::new(),
                };
                if let Some(ctor) = c.constructor() {
                    info.constructor = Some(next_id);
                    pending.push(Pending {
                        def: ctor,
                        kind: CodeKind::Constructor,
                        name: format!("{}.{}", c.name, ctor.name),
                    });
                    next_id += 1;
                }
                for m in c.instance_methods() {
                    info.methods.insert(m.name.clone(), next_id);
                    pending.push(Pending {
                        def: m,
                        kind: CodeKind::Method,
                        name: format!("{}.{}", c.name, m.name),
                    });
                    next_id += 1;
                }
                scope.classes.insert(c.name.clone(), classes.len());
                classes.push(info);
            }
            Item::Stmt(s) => collect_assigned(s, &mut scope.globals),
        }
    }
    for g in &scope.globals {
        if scope.functions.contains_key(g) || scope.classes.contains_key(g) {
            let span = ast
                .items
                .iter()
                .find_map(|i| match i {
                    Item::Stmt(s) => first_assignment_span(s, g),
                    _ => None,
                })
                .unwrap_or_default();
            return Err(CompileError::new(span, format!("cannot assign to definition `{g}`")));
        }
    }

    // pass 2: emit code
    let mut code_objects = Vec::new();
    let module_body: Vec<&Stmt> = ast
        .items
        .iter()
        .filter_map(|i| match i {
            Item::Stmt(s) => Some(s),
            _ => None,
        })
        .collect();
    {
        let mut fc = FunctionCompiler::new(&mut scope, CompiledModule::MODULE_CODE, None);
        for s in &module_body {
            fc.stmt(s)?;
        }
        code_objects.push(fc.finish(CodeKind::Module, "<module>".to_string(), 0));
    }
    for (offset, p) in pending.iter().enumerate() {
        let id = offset + 1;
        let mut locals: Vec<String> = p.def.params.iter().map(|p| p.name.clone()).collect();
        for s in &p.def.body {
            collect_assigned(s, &mut locals);
        }
        let mut fc = FunctionCompiler::new(&mut scope, id, Some(locals));
        for s in &p.def.body {
            fc.stmt(s)?;
        }
        code_objects.push(fc.finish(p.kind, p.name.clone(), p.def.params.len()));
    }

    let branches = (0..scope.next_predicate)
        .flat_map(|p| [Branch::new(p, Polarity::True), Branch::new(p, Polarity::False)])
        .collect();

    let mut cm = CompiledModule {
        name: ast.name.clone(),
        code_objects,
        branches,
        pool: collect_signatures(ast, true),
        constants: collect_constants(ast),
        classes,
        globals: scope.globals,
        names: scope.names,
        literals: scope.literals,
        fingerprint: 0,
    };
    cm.fingerprint = fnv1a(disassemble(&cm).as_bytes());
    Ok(cm)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn collect_assigned(stmt: &Stmt, out: &mut Vec<String>) {
    let add = |name: &String, out: &mut Vec<String>| {
        if !out.contains(name) {
            out.push(name.clone());
        }
    };
    match stmt {
        Stmt::Assign { target, .. } => add(target, out),
        Stmt::If {
            then_body,
            elifs,
            else_body,
            ..
        } => {
            then_body.iter().for_each(|s| collect_assigned(s, out));
            for (_, b) in elifs {
                b.iter().for_each(|s| collect_assigned(s, out));
            }
            if let Some(b) = else_body {
                b.iter().for_each(|s| collect_assigned(s, out));
            }
        }
        Stmt::While { body, .. } => body.iter().for_each(|s| collect_assigned(s, out)),
        _ => {}
    }
}

fn first_assignment_span(stmt: &Stmt, name: &str) -> Option<Span> {
    match stmt {
        Stmt::Assign { target, span, .. } if target == name => Some(*span),
        Stmt::If {
            then_body,
            elifs,
            else_body,
            ..
        } => then_body
            .iter()
            .chain(elifs.iter().flat_map(|(_, b)| b.iter()))
            .chain(else_body.iter().flatten())
            .find_map(|s| first_assignment_span(s, name)),
        Stmt::While { body, .. } => body.iter().find_map(|s| first_assignment_span(s, name)),
        _ => None,
    }
}

struct FunctionCompiler<'s> {
    scope: &'s mut ModuleScope,
    code_id: CodeId,
    /// `None` for the module body, where every name is global.
    locals: Option<Vec<String>>,
    code: Vec<Instr>,
    predicates: Vec<PredicateSite>,
}

enum NameRef {
    Local(usize),
    Global(usize),
}

impl<'s> FunctionCompiler<'s> {
    fn new(scope: &'s mut ModuleScope, code_id: CodeId, locals: Option<Vec<String>>) -> Self {
        FunctionCompiler {
            scope,
            code_id,
            locals,
            code: Vec::new(),
            predicates: Vec::new(),
        }
    }

    fn finish(mut self, kind: CodeKind, name: String, arity: usize) -> CodeObject {
        let none = self.scope.literal(Literal::None);
        self.code.push(Instr::PushConst(none));
        self.code.push(Instr::Return);
        CodeObject {
            id: self.code_id,
            kind,
            name,
            arity,
            n_locals: self.locals.as_ref().map_or(0, Vec::len),
            instructions: self.code,
            predicates: self.predicates,
        }
    }

    fn resolve(&self, name: &str) -> Option<NameRef> {
        if let Some(locals) = &self.locals {
            if let Some(i) = locals.iter().position(|l| l == name) {
                return Some(NameRef::Local(i));
            }
        }
        self.scope.global(name).map(NameRef::Global)
    }

    fn emit(&mut self, instr: Instr) -> usize {
        self.code.push(instr);
        self.code.len() - 1
    }

    fn here(&self) -> usize {
        self.code.len()
    }

    fn patch(&mut self, at: usize, target: usize) {
        match &mut self.code[at] {
            Instr::Jump(t)
            | Instr::CompareJump { target: t, .. }
            | Instr::TruthyJump { target: t, .. } => *t = target,
            other => unreachable!("patching non-jump {other:?}"),
        }
    }

    fn new_predicate(&mut self, operator: PredicateOp, span: Span) -> PredicateId {
        let id = self.scope.next_predicate;
        self.scope.next_predicate += 1;
        self.predicates.push(PredicateSite {
            id,
            code_object: self.code_id,
            operator,
            line: span.line,
            col: span.col,
        });
        id
    }

    fn store(&mut self, name: &str, span: Span) -> CResult<()> {
        match self.resolve(name) {
            Some(NameRef::Local(i)) => self.emit(Instr::StoreLocal(i)),
            Some(NameRef::Global(i)) => self.emit(Instr::StoreGlobal(i)),
            None => return Err(CompileError::new(span, format!("cannot assign to `{name}`"))),
        };
        Ok(())
    }

    fn body(&mut self, body: &[Stmt]) -> CResult<()> {
        body.iter().try_for_each(|s| self.stmt(s))
    }

    fn stmt(&mut self, stmt: &Stmt) -> CResult<()> {
        match stmt {
            Stmt::Assign { target, value, span } => {
                self.expr(value)?;
                self.store(target, *span)?;
            }
            Stmt::SetAttr { attr, value, span } => {
                let Some(NameRef::Local(slot)) = self.resolve("self") else {
                    return Err(CompileError::new(*span, "`self` is only available in methods"));
                };
                self.emit(Instr::LoadLocal(slot));
                self.expr(value)?;
                let name = self.scope.intern(attr);
                self.emit(Instr::SetAttr(name));
            }
            Stmt::If {
                cond,
                then_body,
                elifs,
                else_body,
                ..
            } => {
                // elif desugars to a nested if in the else arm
                let mut arms: Vec<(&Expr, &Vec<Stmt>)> = vec![(cond, then_body)];
                arms.extend(elifs.iter().map(|(c, b)| (c, b)));
                let mut end_jumps = Vec::new();
                for (c, b) in arms {
                    let next = self.cond_jump(c, false)?;
                    self.body(b)?;
                    end_jumps.push(self.emit(Instr::Jump(usize::MAX)));
                    let here = self.here();
                    next.into_iter().for_each(|j| self.patch(j, here));
                }
                if let Some(b) = else_body {
                    self.body(b)?;
                }
                let end = self.here();
                end_jumps.into_iter().for_each(|j| self.patch(j, end));
            }
            Stmt::While { cond, body, .. } => {
                let top = self.here();
                let exits = self.cond_jump(cond, false)?;
                self.body(body)?;
                self.emit(Instr::Jump(top));
                let end = self.here();
                exits.into_iter().for_each(|j| self.patch(j, end));
            }
            Stmt::Return { value, .. } => {
                match value {
                    Some(v) => self.expr(v)?,
                    None => {
                        let none = self.scope.literal(Literal::None);
                        self.emit(Instr::PushConst(none));
                    }
                }
                self.emit(Instr::Return);
            }
            Stmt::Raise { kind, message, .. } => {
                if let Some(m) = message {
                    self.expr(m)?;
                }
                let kind = self.scope.intern(kind);
                self.emit(Instr::Raise {
                    kind,
                    has_message: message.is_some(),
                });
            }
            Stmt::Pass { .. } => {}
            Stmt::Expr(e) => {
                self.expr(e)?;
                self.emit(Instr::Pop);
            }
        }
        Ok(())
    }

    /// Emits code that jumps when `expr`'s truth equals `when` and falls
    /// through otherwise. Returns the jump sites to patch. Each atomic
    /// condition gets its own predicate.
    fn cond_jump(&mut self, expr: &Expr, when: bool) -> CResult<Vec<usize>> {
        match &expr.kind {
            ExprKind::Not(inner) => self.cond_jump(inner, !when),
            ExprKind::And(a, b) | ExprKind::Or(a, b) => {
                let is_and = matches!(expr.kind, ExprKind::And(..));
                // `a and b` is false as soon as `a` is false; `a or b` true as soon as `a` is true
                let short = !is_and;
                if when == short {
                    let mut jumps = self.cond_jump(a, short)?;
                    jumps.extend(self.cond_jump(b, short)?);
                    Ok(jumps)
                } else {
                    let skip = self.cond_jump(a, short)?;
                    let jumps = self.cond_jump(b, when)?;
                    let here = self.here();
                    skip.into_iter().for_each(|j| self.patch(j, here));
                    Ok(jumps)
                }
            }
            ExprKind::Compare { op, lhs, rhs } => {
                self.expr(lhs)?;
                self.expr(rhs)?;
                let predicate = self.new_predicate(PredicateOp::Compare(*op), expr.span);
                Ok(vec![self.emit(Instr::CompareJump {
                    op: *op,
                    predicate,
                    when,
                    target: usize::MAX,
                })])
            }
            _ => {
                self.expr(expr)?;
                let predicate = self.new_predicate(PredicateOp::Truthy, expr.span);
                Ok(vec![self.emit(Instr::TruthyJump {
                    predicate,
                    when,
                    target: usize::MAX,
                })])
            }
        }
    }

    fn args(&mut self, args: &[Expr]) -> CResult<()> {
        args.iter().try_for_each(|a| self.expr(a))
    }

    fn expr(&mut self, expr: &Expr) -> CResult<()> {
        match &expr.kind {
            ExprKind::Int(v) => {
                let i = self.scope.literal(Literal::Int(*v));
                self.emit(Instr::PushConst(i));
            }
            ExprKind::Float(v) => {
                let i = self.scope.literal(Literal::Float(*v));
                self.emit(Instr::PushConst(i));
            }
            ExprKind::Str(s) => {
                let i = self.scope.literal(Literal::Str(s.clone()));
                self.emit(Instr::PushConst(i));
            }
            ExprKind::Bool(b) => {
                let i = self.scope.literal(Literal::Bool(*b));
                self.emit(Instr::PushConst(i));
            }
            ExprKind::None => {
                let i = self.scope.literal(Literal::None);
                self.emit(Instr::PushConst(i));
            }
            ExprKind::Name(name) => match self.resolve(name) {
                Some(NameRef::Local(i)) => {
                    self.emit(Instr::LoadLocal(i));
                }
                Some(NameRef::Global(i)) => {
                    self.emit(Instr::LoadGlobal(i));
                }
                None if self.scope.functions.contains_key(name)
                    || self.scope.classes.contains_key(name) =>
                {
                    return Err(CompileError::new(
                        expr.span,
                        format!("`{name}` can only be called, not used as a value"),
                    ))
                }
                None => {
                    return Err(CompileError::new(expr.span, format!("undefined name `{name}`")))
                }
            },
            ExprKind::Attr(attr) => {
                let Some(NameRef::Local(slot)) = self.resolve("self") else {
                    return Err(CompileError::new(expr.span, "`self` is only available in methods"));
                };
                self.emit(Instr::LoadLocal(slot));
                let name = self.scope.intern(attr);
                self.emit(Instr::GetAttr(name));
            }
            ExprKind::Call { callee, args } => {
                let argc = args.len();
                if let Some(&code) = self.scope.functions.get(callee) {
                    self.args(args)?;
                    self.emit(Instr::CallFunction { code, argc });
                } else if let Some(&class) = self.scope.classes.get(callee) {
                    self.args(args)?;
                    self.emit(Instr::Construct { class, argc });
                } else if let Some(builtin) = Builtin::lookup(callee) {
                    self.args(args)?;
                    self.emit(Instr::CallBuiltin { builtin, argc });
                } else {
                    return Err(CompileError::new(expr.span, format!("undefined function `{callee}`")));
                }
            }
            ExprKind::MethodCall {
                receiver,
                method,
                args,
            } => {
                self.expr(receiver)?;
                self.args(args)?;
                let name = self.scope.intern(method);
                self.emit(Instr::CallMethod {
                    name,
                    argc: args.len(),
                });
            }
            ExprKind::Neg(e) => {
                self.expr(e)?;
                self.emit(Instr::Neg);
            }
            ExprKind::Not(e) => {
                self.expr(e)?;
                self.emit(Instr::Not);
            }
            ExprKind::Arith { op, lhs, rhs } => {
                self.expr(lhs)?;
                self.expr(rhs)?;
                self.emit(Instr::Arith(*op));
            }
            ExprKind::Compare { op, lhs, rhs } => {
                self.expr(lhs)?;
                self.expr(rhs)?;
                self.emit(Instr::Compare(*op));
            }
            ExprKind::And(a, b) | ExprKind::Or(a, b) => {
                // value context: truthiness of the left operand decides
                let when = matches!(expr.kind, ExprKind::Or(..));
                self.expr(a)?;
                self.emit(Instr::Dup);
                let predicate = self.new_predicate(PredicateOp::Truthy, a.span);
                let jump = self.emit(Instr::TruthyJump {
                    predicate,
                    when,
                    target: usize::MAX,
                });
                self.emit(Instr::Pop);
                self.expr(b)?;
                let end = self.here();
                self.patch(jump, end);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_module;

    fn compile(src: &str) -> CompiledModule {
        compile_module(&parse_module("m", src).unwrap()).unwrap()
    }

    #[test]
    fn single_condition() {
        let cm = compile("def f(x) {\n if x < 10 { return 1 }\n return 0\n}");
        assert_eq!(cm.num_predicates(), 1);
        assert_eq!(cm.branches.len(), 2);
        assert_eq!(cm.code_objects.len(), 2);
    }

    #[test]
    fn compound_condition_nests() {
        let cm = compile("def f(a, b, c, d) {\n if a < b and c == d { return 1 }\n}");
        assert_eq!(cm.num_predicates(), 2);
        assert_eq!(cm.branches.len(), 4);
        let ops: Vec<_> = cm.predicates().map(|p| p.operator).collect();
        assert_eq!(
            ops,
            vec![PredicateOp::Compare(CmpOp::Lt), PredicateOp::Compare(CmpOp::Eq)]
        );
    }

    #[test]
    fn n_atomic_conditions_give_n_predicates() {
        let cm = compile("def f(a, b) {\n while not (a or b and a > 1) or b != 2 { a = a - 1 }\n}");
        assert_eq!(cm.num_predicates(), 4);
    }

    #[test]
    fn straight_line_function() {
        let cm = compile("def f(x) {\n y = x + 1\n return y\n}");
        assert_eq!(cm.num_predicates(), 0);
        assert_eq!(cm.code_objects.len(), 2);
    }

    #[test]
    fn elif_desugars_to_nested_conditions() {
        let cm = compile("def f(x) {\n if x == 1 { return 1 } elif x == 2 { return 2 } else { return 3 }\n}");
        assert_eq!(cm.num_predicates(), 2);
    }

    #[test]
    fn undefined_names_are_rejected() {
        let err = compile_module(&parse_module("m", "def f() {\n return y\n}").unwrap()).unwrap_err();
        assert!(err.message.contains("undefined name `y`"));
        assert_eq!(err.line, 2);
        let err = compile_module(&parse_module("m", "def f() { return g(1) }").unwrap()).unwrap_err();
        assert!(err.message.contains("undefined function"));
        let err = compile_module(&parse_module("m", "def f() { return self.x }").unwrap()).unwrap_err();
        assert!(err.message.contains("self"));
    }

    #[test]
    fn empty_module_has_one_goal() {
        let cm = compile("");
        let goals = enumerate_goals(&cm);
        assert_eq!(goals.code_objects, vec![0]);
        assert!(goals.branches.is_empty());
    }

    #[test]
    fn branches_pair_up() {
        let cm = compile("x = 1\nif x { x = 2 }\ndef f(a) { return a and a > 3 }");
        assert_eq!(cm.branches.len(), 2 * cm.num_predicates());
        for b in &cm.branches {
            assert_eq!(cm.branches.iter().filter(|o| **o == b.sibling()).count(), 1);
        }
        // the top-level condition belongs to the module code object
        assert_eq!(cm.predicate(0).unwrap().code_object, 0);
    }

    #[test]
    fn compilation_is_deterministic() {
        let src = "class A {\n def init(self, v) { self.v = v }\n def g(self) { if self.v > 1 or self.v < -1 { return 1 } }\n}";
        let a = compile(src);
        let b = compile(src);
        assert_eq!(a, b);
        assert_eq!(disassemble(&a), disassemble(&b));
    }
}
