use std::collections::BTreeSet;
use std::rc::Rc;

use serde::Serialize;
use thiserror::Error;

use super::distance::{branch_distance, comparison_holds, truthiness_distance, DistanceConfig};
use super::value::{contains, order, Num, Object, Value};
use crate::bytecode::{Branch, Builtin, CodeId, CompiledModule, Instr, Literal, Polarity};
use crate::lang::ast::{ArithOp, CmpOp};
use crate::testcase::{PrimitiveValue, Statement, TestCase};

/// Default number of VM steps a single test case may use.
pub const DEFAULT_STEP_BUDGET: u64 = 100_000;

/// Nested calls deeper than this raise `RecursionError`.
pub const MAX_CALL_DEPTH: usize = 200;

/// Longest string a subject program may build.
pub const MAX_STRING_LEN: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RaisedException {
    pub statement_index: usize,
    pub kind: String,
    pub message: String,
}

/// Internal VM faults. Subject-program errors never surface here.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("statement {statement} references var{var}, which is not defined before it")]
    InvalidReference { statement: usize, var: usize },
    #[error("malformed bytecode in code object {code}: {detail}")]
    Malformed { code: CodeId, detail: String },
}

/// What one test execution observed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionResult {
    pub module_fingerprint: u64,
    pub executed_code_objects: BTreeSet<CodeId>,
    /// Number of times each predicate was evaluated, indexed by predicate id.
    pub predicate_counts: Vec<u32>,
    /// Minimum distance per branch, indexed by [`Branch::index`]; infinite
    /// when the branch was never recorded or its operands were incomparable.
    pub min_distances: Vec<f64>,
    pub exception: Option<RaisedException>,
    pub steps_used: u64,
}

impl ExecutionResult {
    fn new(cm: &CompiledModule) -> Self {
        ExecutionResult {
            module_fingerprint: cm.fingerprint,
            executed_code_objects: BTreeSet::new(),
            predicate_counts: vec![0; cm.num_predicates()],
            min_distances: vec![f64::INFINITY; 2 * cm.num_predicates()],
            exception: None,
            steps_used: 0,
        }
    }

    /// Minimum distance of `b`, if its predicate was executed.
    pub fn distance(&self, b: Branch) -> Option<f64> {
        if self.predicate_counts.get(b.predicate).copied().unwrap_or(0) == 0 {
            None
        } else {
            Some(self.min_distances[b.index()])
        }
    }

    pub fn is_covered(&self, b: Branch) -> bool {
        self.distance(b) == Some(0.0)
    }

    /// Branches whose predicate executed, with their minimum distances.
    pub fn recorded(&self) -> impl Iterator<Item = (Branch, f64)> + '_ {
        self.predicate_counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .flat_map(move |(p, _)| {
                [Polarity::True, Polarity::False].into_iter().map(move |pol| {
                    let b = Branch::new(p, pol);
                    (b, self.min_distances[b.index()])
                })
            })
    }

    pub fn passed(&self) -> bool {
        self.exception.is_none()
    }
}

/// A subject-level exception in flight.
#[derive(Debug)]
struct Raised {
    kind: String,
    message: String,
}

enum Unwind {
    Raise(Raised),
    Fault(EngineError),
}

impl From<EngineError> for Unwind {
    fn from(e: EngineError) -> Self {
        Unwind::Fault(e)
    }
}

type Flow<T> = Result<T, Unwind>;

fn raise<T>(kind: &str, message: impl Into<String>) -> Flow<T> {
    Err(Unwind::Raise(Raised {
        kind: kind.to_string(),
        message: message.into(),
    }))
}

struct Vm<'a> {
    cm: &'a CompiledModule,
    cfg: &'a DistanceConfig,
    budget: u64,
    depth: usize,
    globals: Vec<Value>,
    literals: Vec<Value>,
    class_names: Vec<Rc<str>>,
    result: ExecutionResult,
}

impl<'a> Vm<'a> {
    fn record_compare(&mut self, predicate: usize, op: CmpOp, a: &Value, b: &Value) {
        self.result.predicate_counts[predicate] += 1;
        for pol in [Polarity::True, Polarity::False] {
            let d = branch_distance(op, a, b, pol, self.cfg);
            let slot = &mut self.result.min_distances[Branch::new(predicate, pol).index()];
            if d < *slot {
                *slot = d;
            }
        }
    }

    fn record_truthy(&mut self, predicate: usize, v: &Value) {
        self.result.predicate_counts[predicate] += 1;
        for pol in [Polarity::True, Polarity::False] {
            let d = truthiness_distance(v, pol, self.cfg);
            let slot = &mut self.result.min_distances[Branch::new(predicate, pol).index()];
            if d < *slot {
                *slot = d;
            }
        }
    }

    fn name(&self, idx: usize) -> &str {
        &self.cm.names[idx]
    }

    fn construct(&mut self, class: usize, args: Vec<Value>) -> Flow<Value> {
        let info = &self.cm.classes[class];
        let obj = Value::Object(Rc::new(Object::new(class, self.class_names[class].clone())));
        match info.constructor {
            Some(code) => {
                let mut full = Vec::with_capacity(args.len() + 1);
                full.push(obj.clone());
                full.extend(args);
                self.call(code, full)?;
            }
            None if !args.is_empty() => {
                return raise(
                    "TypeError",
                    format!("{}() takes no arguments ({} given)", info.name, args.len()),
                );
            }
            None => {}
        }
        Ok(obj)
    }

    fn call_method(&mut self, receiver: Value, method: &str, args: Vec<Value>) -> Flow<Value> {
        let code = match &receiver {
            Value::Object(o) => self.cm.classes[o.class].methods.get(method).copied(),
            _ => None,
        };
        let Some(code) = code else {
            return raise(
                "AttributeError",
                format!("'{}' object has no attribute '{method}'", receiver.type_name()),
            );
        };
        let mut full = Vec::with_capacity(args.len() + 1);
        full.push(receiver);
        full.extend(args);
        self.call(code, full)
    }

    fn call(&mut self, code: CodeId, args: Vec<Value>) -> Flow<Value> {
        let co = &self.cm.code_objects[code];
        if args.len() != co.arity {
            return raise(
                "TypeError",
                format!("{}() takes {} arguments ({} given)", co.name, co.arity, args.len()),
            );
        }
        if self.depth >= MAX_CALL_DEPTH {
            return raise("RecursionError", "maximum recursion depth exceeded");
        }
        self.depth += 1;
        let out = self.run(code, args);
        self.depth -= 1;
        out
    }

    fn run(&mut self, code: CodeId, args: Vec<Value>) -> Flow<Value> {
        let cm = self.cm;
        let co = &cm.code_objects[code];
        self.result.executed_code_objects.insert(code);
        let mut locals = args;
        locals.resize(co.n_locals.max(locals.len()), Value::None);
        let mut stack: Vec<Value> = Vec::with_capacity(8);
        let mut pc = 0usize;
        let malformed = |detail: &str| EngineError::Malformed {
            code,
            detail: detail.to_string(),
        };
        macro_rules! pop {
            () => {
                stack.pop().ok_or_else(|| malformed("stack underflow"))?
            };
        }
        loop {
            if self.result.steps_used >= self.budget {
                return raise("StepBudgetExceeded", format!("step budget of {} exhausted", self.budget));
            }
            self.result.steps_used += 1;
            let instr = co
                .instructions
                .get(pc)
                .ok_or_else(|| malformed("fell off the end"))?;
            pc += 1;
            match instr {
                Instr::PushConst(i) => stack.push(self.literals[*i].clone()),
                Instr::LoadLocal(i) => stack.push(locals[*i].clone()),
                Instr::StoreLocal(i) => locals[*i] = pop!(),
                Instr::LoadGlobal(i) => stack.push(self.globals[*i].clone()),
                Instr::StoreGlobal(i) => self.globals[*i] = pop!(),
                Instr::GetAttr(n) => {
                    let obj = pop!();
                    let v = match &obj {
                        Value::Object(o) => o.get(*n),
                        _ => None,
                    };
                    match v {
                        Some(v) => stack.push(v),
                        None => {
                            return raise(
                                "AttributeError",
                                format!("'{}' object has no attribute '{}'", obj.type_name(), self.name(*n)),
                            )
                        }
                    }
                }
                Instr::SetAttr(n) => {
                    let value = pop!();
                    let obj = pop!();
                    match obj {
                        Value::Object(o) => o.set(*n, value),
                        other => {
                            return raise(
                                "AttributeError",
                                format!("'{}' object has no attribute '{}'", other.type_name(), self.name(*n)),
                            )
                        }
                    }
                }
                Instr::CallFunction { code: callee, argc } => {
                    let args = split_args(&mut stack, *argc).ok_or_else(|| malformed("stack underflow"))?;
                    let v = self.call(*callee, args)?;
                    stack.push(v);
                }
                Instr::Construct { class, argc } => {
                    let args = split_args(&mut stack, *argc).ok_or_else(|| malformed("stack underflow"))?;
                    let v = self.construct(*class, args)?;
                    stack.push(v);
                }
                Instr::CallMethod { name, argc } => {
                    let args = split_args(&mut stack, *argc).ok_or_else(|| malformed("stack underflow"))?;
                    let receiver = pop!();
                    let v = self.call_method(receiver, &cm.names[*name], args)?;
                    stack.push(v);
                }
                Instr::CallBuiltin { builtin, argc } => {
                    let args = split_args(&mut stack, *argc).ok_or_else(|| malformed("stack underflow"))?;
                    stack.push(call_builtin(*builtin, args)?);
                }
                Instr::Arith(op) => {
                    let b = pop!();
                    let a = pop!();
                    stack.push(arith(*op, &a, &b)?);
                }
                Instr::Neg => {
                    let v = pop!();
                    stack.push(negate(&v)?);
                }
                Instr::Not => {
                    let v = pop!();
                    stack.push(Value::Bool(!v.truthy()));
                }
                Instr::Compare(op) => {
                    let b = pop!();
                    let a = pop!();
                    stack.push(Value::Bool(compare(*op, &a, &b)?));
                }
                Instr::CompareJump {
                    op,
                    predicate,
                    when,
                    target,
                } => {
                    let b = pop!();
                    let a = pop!();
                    let outcome = compare(*op, &a, &b)?;
                    self.record_compare(*predicate, *op, &a, &b);
                    if outcome == *when {
                        pc = *target;
                    }
                }
                Instr::TruthyJump { predicate, when, target } => {
                    let v = pop!();
                    self.record_truthy(*predicate, &v);
                    if v.truthy() == *when {
                        pc = *target;
                    }
                }
                Instr::Jump(target) => pc = *target,
                Instr::Dup => {
                    let v = stack.last().cloned().ok_or_else(|| malformed("stack underflow"))?;
                    stack.push(v);
                }
                Instr::Pop => {
                    pop!();
                }
                Instr::Return => return Ok(pop!()),
                Instr::Raise { kind, has_message } => {
                    let message = if *has_message { pop!().to_string() } else { String::new() };
                    return raise(self.name(*kind), message);
                }
            }
        }
    }

    fn statement(&mut self, index: usize, stmt: &Statement, vars: &[Value]) -> Flow<Value> {
        let fetch = |r: &crate::testcase::VarRef| -> Result<Value, EngineError> {
            vars.get(r.0).cloned().ok_or(EngineError::InvalidReference {
                statement: index,
                var: r.0,
            })
        };
        let args = stmt.args().iter().map(fetch).collect::<Result<Vec<_>, _>>()?;
        match stmt {
            Statement::Primitive(p) => Ok(match p {
                PrimitiveValue::Int(i) => Value::Int(*i),
                PrimitiveValue::Float(f) => Value::Float(*f),
                PrimitiveValue::Bool(b) => Value::Bool(*b),
                PrimitiveValue::Str(s) => Value::str(s),
            }),
            Statement::Constructor { class, .. } => match self.cm.class_index(class) {
                Some(c) => self.construct(c, args),
                None => raise("NameError", format!("name '{class}' is not defined")),
            },
            Statement::Function { name, .. } => match self.cm.function_code(name) {
                Some(code) => self.call(code, args),
                None => raise("NameError", format!("name '{name}' is not defined")),
            },
            Statement::Method { receiver, name, .. } => {
                let recv = fetch(receiver)?;
                self.call_method(recv, name, args)
            }
        }
    }
}

fn split_args(stack: &mut Vec<Value>, argc: usize) -> Option<Vec<Value>> {
    let at = stack.len().checked_sub(argc)?;
    Some(stack.split_off(at))
}

fn compare(op: CmpOp, a: &Value, b: &Value) -> Flow<bool> {
    match op {
        CmpOp::Lt | CmpOp::Le | CmpOp::Gt | CmpOp::Ge if order(a, b).is_err() => raise(
            "TypeError",
            format!(
                "'{}' not supported between instances of '{}' and '{}'",
                op.symbol(),
                a.type_name(),
                b.type_name()
            ),
        ),
        CmpOp::In | CmpOp::NotIn if contains(a, b).is_err() => raise(
            "TypeError",
            format!("'{}' requires string operands, got '{}' and '{}'", op.symbol(), a.type_name(), b.type_name()),
        ),
        _ => Ok(comparison_holds(op, a, b)),
    }
}

fn type_error<T>(op: &str, a: &Value, b: &Value) -> Flow<T> {
    raise(
        "TypeError",
        format!(
            "unsupported operand type(s) for {op}: '{}' and '{}'",
            a.type_name(),
            b.type_name()
        ),
    )
}

fn int_result(v: Option<i64>) -> Flow<Value> {
    match v {
        Some(i) => Ok(Value::Int(i)),
        None => raise("OverflowError", "integer overflow"),
    }
}

fn repeat(s: &str, n: i64) -> Flow<Value> {
    let n = n.max(0) as usize;
    if s.len().saturating_mul(n) > MAX_STRING_LEN {
        return raise("MemoryError", "string too long");
    }
    Ok(Value::str(&s.repeat(n)))
}

fn arith(op: ArithOp, a: &Value, b: &Value) -> Flow<Value> {
    if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
        return numeric_arith(op, x, y);
    }
    match (op, a, b) {
        (ArithOp::Add, Value::Str(x), Value::Str(y)) => {
            if x.len() + y.len() > MAX_STRING_LEN {
                return raise("MemoryError", "string too long");
            }
            let mut s = String::with_capacity(x.len() + y.len());
            s.push_str(x);
            s.push_str(y);
            Ok(Value::str(&s))
        }
        (ArithOp::Mul, Value::Str(s), Value::Int(n)) | (ArithOp::Mul, Value::Int(n), Value::Str(s)) => {
            repeat(s, *n)
        }
        _ => type_error(op.symbol(), a, b),
    }
}

fn numeric_arith(op: ArithOp, x: Num, y: Num) -> Flow<Value> {
    if let (Num::Int(a), Num::Int(b)) = (x, y) {
        return match op {
            ArithOp::Add => int_result(a.checked_add(b)),
            ArithOp::Sub => int_result(a.checked_sub(b)),
            ArithOp::Mul => int_result(a.checked_mul(b)),
            ArithOp::Div if b == 0 => raise("ZeroDivisionError", "division by zero"),
            ArithOp::Div => Ok(Value::Float(a as f64 / b as f64)),
            ArithOp::Mod if b == 0 => raise("ZeroDivisionError", "integer modulo by zero"),
            ArithOp::Mod => {
                let r = a.wrapping_rem(b);
                Ok(Value::Int(if r != 0 && (r < 0) != (b < 0) { r + b } else { r }))
            }
        };
    }
    let (a, b) = (x.as_f64(), y.as_f64());
    Ok(Value::Float(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div if b == 0.0 => return raise("ZeroDivisionError", "float division by zero"),
        ArithOp::Div => a / b,
        ArithOp::Mod if b == 0.0 => return raise("ZeroDivisionError", "float modulo"),
        ArithOp::Mod => {
            let r = a % b;
            if r != 0.0 && (r < 0.0) != (b < 0.0) {
                r + b
            } else {
                r
            }
        }
    }))
}

fn negate(v: &Value) -> Flow<Value> {
    match v.as_num() {
        Some(Num::Int(i)) => int_result(i.checked_neg()),
        Some(Num::Float(f)) => Ok(Value::Float(-f)),
        None => raise("TypeError", format!("bad operand type for unary -: '{}'", v.type_name())),
    }
}

fn call_builtin(builtin: Builtin, args: Vec<Value>) -> Flow<Value> {
    let [arg]: [Value; 1] = match args.try_into() {
        Ok(a) => a,
        Err(args) => {
            return raise(
                "TypeError",
                format!("{}() takes exactly one argument ({} given)", builtin.name(), args.len()),
            )
        }
    };
    match builtin {
        Builtin::Len => match &arg {
            Value::Str(s) => Ok(Value::Int(s.chars().count() as i64)),
            other => raise("TypeError", format!("object of type '{}' has no len()", other.type_name())),
        },
        Builtin::Str => Ok(match arg {
            Value::Str(s) => Value::Str(s),
            other => Value::str(&other.to_string()),
        }),
        Builtin::Int => match &arg {
            Value::Int(_) => Ok(arg),
            Value::Bool(b) => Ok(Value::Int(i64::from(*b))),
            Value::Float(f) if f.is_nan() => raise("ValueError", "cannot convert float NaN to integer"),
            Value::Float(f) if f.is_infinite() || f.abs() >= 9.223_372_036_854_775_808e18 => {
                raise("OverflowError", "cannot convert float to integer")
            }
            Value::Float(f) => Ok(Value::Int(f.trunc() as i64)),
            Value::Str(s) => match s.trim().parse::<i64>() {
                Ok(i) => Ok(Value::Int(i)),
                Err(_) => raise("ValueError", format!("invalid literal for int(): '{s}'")),
            },
            other => raise(
                "TypeError",
                format!("int() argument must be a string or a number, not '{}'", other.type_name()),
            ),
        },
        Builtin::Abs => match arg.as_num() {
            Some(Num::Int(i)) => int_result(i.checked_abs()),
            Some(Num::Float(f)) => Ok(Value::Float(f.abs())),
            None => raise("TypeError", format!("bad operand type for abs(): '{}'", arg.type_name())),
        },
    }
}

/// Runs the module body and then each statement of `t` in a fresh
/// environment. The first uncaught exception stops execution; everything
/// observed up to that point is kept. An exception while importing the
/// module is attributed to statement 0.
pub fn execute_test(
    cm: &CompiledModule,
    t: &TestCase,
    cfg: &DistanceConfig,
    step_budget: u64,
) -> Result<ExecutionResult, EngineError> {
    let mut vm = Vm {
        cm,
        cfg,
        budget: step_budget,
        depth: 0,
        globals: vec![Value::None; cm.globals.len()],
        literals: cm
            .literals
            .iter()
            .map(|l| match l {
                Literal::Int(i) => Value::Int(*i),
                Literal::Float(f) => Value::Float(*f),
                Literal::Bool(b) => Value::Bool(*b),
                Literal::Str(s) => Value::str(s),
                Literal::None => Value::None,
            })
            .collect(),
        class_names: cm.classes.iter().map(|c| Rc::from(c.name.as_str())).collect(),
        result: ExecutionResult::new(cm),
    };
    let record = |vm: &mut Vm, index: usize, unwind: Unwind| -> Result<(), EngineError> {
        match unwind {
            Unwind::Raise(r) => {
                vm.result.exception = Some(RaisedException {
                    statement_index: index,
                    kind: r.kind,
                    message: r.message,
                });
                Ok(())
            }
            Unwind::Fault(e) => Err(e),
        }
    };
    if let Err(u) = vm.call(CompiledModule::MODULE_CODE, Vec::new()) {
        record(&mut vm, 0, u)?;
        return Ok(vm.result);
    }
    let mut vars: Vec<Value> = Vec::with_capacity(t.len());
    for (i, stmt) in t.statements.iter().enumerate() {
        match vm.statement(i, stmt, &vars) {
            Ok(v) => vars.push(v),
            Err(u) => {
                record(&mut vm, i, u)?;
                break;
            }
        }
    }
    Ok(vm.result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::load_module;
    use crate::testcase::VarRef;

    const FOO_BAR: &str = "
class Foo {
    def init(self, b: Bar) { self.b = b }
    def do_foo(self, b: Bar) {
        if b is self.b { return 1 }
        return 0
    }
}
class Bar {
    def init(self) { pass }
}
";

    fn run(src: &str, stmts: Vec<Statement>) -> ExecutionResult {
        let cm = load_module("m", src).unwrap();
        let t = TestCase { statements: stmts };
        execute_test(&cm, &t, &DistanceConfig::default(), DEFAULT_STEP_BUDGET).unwrap()
    }

    fn int(i: i64) -> Statement {
        Statement::Primitive(PrimitiveValue::Int(i))
    }

    fn call(name: &str, args: &[usize]) -> Statement {
        Statement::Function {
            name: name.into(),
            args: args.iter().map(|&a| VarRef(a)).collect(),
        }
    }

    #[test]
    fn forward_construction_enters_both_constructors() {
        let cm = load_module("foo_bar", FOO_BAR).unwrap();
        let t = TestCase {
            statements: vec![
                Statement::Constructor { class: "Bar".into(), args: vec![] },
                Statement::Constructor { class: "Foo".into(), args: vec![VarRef(0)] },
                Statement::Method {
                    owner: "Foo".into(),
                    receiver: VarRef(1),
                    name: "do_foo".into(),
                    args: vec![VarRef(0)],
                },
            ],
        };
        let r = execute_test(&cm, &t, &DistanceConfig::default(), DEFAULT_STEP_BUDGET).unwrap();
        let names: Vec<&str> = r
            .executed_code_objects
            .iter()
            .map(|&c| cm.code_objects[c].name.as_str())
            .collect();
        assert!(names.contains(&"Bar.init") && names.contains(&"Foo.init"));
        assert!(r.is_covered(Branch::new(0, Polarity::True)));
        assert!(r.passed());
    }

    #[test]
    fn empty_test_runs_only_the_module() {
        let r = run(FOO_BAR, vec![]);
        assert_eq!(r.executed_code_objects, BTreeSet::from([0]));
        assert_eq!(r.recorded().count(), 0);
    }

    #[test]
    fn less_than_distances() {
        let r = run("def f(x) {\n if x < 3 { return 1 }\n return 0\n}", vec![int(5), call("f", &[0])]);
        assert_eq!(r.distance(Branch::new(0, Polarity::True)), Some(3.0));
        assert_eq!(r.distance(Branch::new(0, Polarity::False)), Some(0.0));
    }

    #[test]
    fn exception_keeps_earlier_distances() {
        let src = "def f(x) {\n if x > 0 { return 1 }\n return 0\n}\ndef g(x) { return 1 / x }";
        let r = run(src, vec![int(0), call("f", &[0]), call("g", &[0]), call("f", &[0])]);
        let exc = r.exception.clone().unwrap();
        assert_eq!(exc.statement_index, 2);
        assert_eq!(exc.kind, "ZeroDivisionError");
        assert_eq!(r.predicate_counts[0], 1);
        assert_eq!(r.distance(Branch::new(0, Polarity::True)), Some(1.0));
    }

    #[test]
    fn infinite_loop_hits_the_step_budget() {
        let cm = load_module("m", "def spin() {\n while True { pass }\n}").unwrap();
        let t = TestCase { statements: vec![call("spin", &[])] };
        let r = execute_test(&cm, &t, &DistanceConfig::default(), 500).unwrap();
        assert_eq!(r.exception.unwrap().kind, "StepBudgetExceeded");
        assert!(r.steps_used <= 500);
    }

    #[test]
    fn unbounded_recursion_is_a_subject_error() {
        let r = run("def f(x) { return f(x) }", vec![int(1), call("f", &[0])]);
        assert_eq!(r.exception.unwrap().kind, "RecursionError");
    }

    #[test]
    fn incomparable_operands_raise_without_recording() {
        let src = "def f(x) {\n if x < 3 { return 1 }\n return 0\n}";
        let r = run(src, vec![Statement::Primitive(PrimitiveValue::Str("a".into())), call("f", &[0])]);
        assert_eq!(r.exception.unwrap().kind, "TypeError");
        assert_eq!(r.predicate_counts[0], 0);
    }

    #[test]
    fn python_style_arithmetic() {
        let src = "def f(a, b) { return a % b }\ndef g(a, b) { return a / b }";
        let cm = load_module("m", src).unwrap();
        let vm_result = |a: i64, b: i64, name: &str| {
            let t = TestCase { statements: vec![int(a), int(b), call(name, &[0, 1])] };
            execute_test(&cm, &t, &DistanceConfig::default(), 1000).unwrap()
        };
        assert!(vm_result(-7, 3, "f").passed());
        assert_eq!(vm_result(i64::MIN, -1, "f").exception, None);
        assert_eq!(vm_result(1, 0, "g").exception.unwrap().kind, "ZeroDivisionError");
        assert_eq!(arith(ArithOp::Mod, &Value::Int(-7), &Value::Int(3)).ok().map(|v| v.to_string()), Some("2".into()));
        assert_eq!(arith(ArithOp::Div, &Value::Int(7), &Value::Int(2)).ok().map(|v| v.to_string()), Some("3.5".into()));
        assert!(matches!(
            arith(ArithOp::Add, &Value::Int(i64::MAX), &Value::Int(1)),
            Err(Unwind::Raise(r)) if r.kind == "OverflowError"
        ));
    }

    #[test]
    fn module_level_predicates_count() {
        let r = run("X = 1\nif X > 2 { X = 3 }\ndef f() { return X }", vec![]);
        assert!(r.is_covered(Branch::new(0, Polarity::False)));
        assert_eq!(r.distance(Branch::new(0, Polarity::True)), Some(2.0));
    }

    #[test]
    fn forward_reference_is_an_engine_error() {
        let cm = load_module("m", "def f(x) { return x }").unwrap();
        let t = TestCase { statements: vec![call("f", &[3])] };
        assert!(matches!(
            execute_test(&cm, &t, &DistanceConfig::default(), 100),
            Err(EngineError::InvalidReference { statement: 0, var: 3 })
        ));
    }
}
