use std::collections::HashMap;
use std::fmt::Write;

use super::{inferred_type, PrimitiveValue, Statement, TestCase, TestSuite, VarRef};
use crate::lang::ast::{Expr, ExprKind, Item, Stmt};
use crate::lang::{parse_module, quote_str, CallablePool, SyntaxError, TypeRef};

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{test}: {message}")]
    Invalid { test: String, message: String },
}

fn primitive_text(v: &PrimitiveValue) -> String {
    match v {
        PrimitiveValue::Int(i) => i.to_string(),
        PrimitiveValue::Float(f) => format!("{f:?}"),
        PrimitiveValue::Bool(true) => "True".to_string(),
        PrimitiveValue::Bool(false) => "False".to_string(),
        PrimitiveValue::Str(s) => quote_str(s),
    }
}

fn var_list(args: &[VarRef]) -> String {
    args.iter().map(|r| format!("var{}", r.0)).collect::<Vec<_>>().join(", ")
}

/// Renders a suite as a `.dyn` test file with one `test_<i>` function per
/// test case. Variables are named by position.
pub fn render_suite(suite: &TestSuite, module_name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Generated tests for module `{module_name}`.");
    for (i, test) in suite.tests.iter().enumerate() {
        let _ = writeln!(out, "\ndef test_{i}() {{");
        for (j, stmt) in test.statements.iter().enumerate() {
            let rhs = match stmt {
                Statement::Primitive(v) => primitive_text(v),
                Statement::Constructor { class, args } => format!("{class}({})", var_list(args)),
                Statement::Function { name, args } => format!("{name}({})", var_list(args)),
                Statement::Method {
                    receiver, name, args, ..
                } => format!("var{}.{name}({})", receiver.0, var_list(args)),
            };
            let _ = writeln!(out, "    var{j} = {rhs}");
        }
        out.push_str("}\n");
    }
    out
}

/// Reads a rendered test file back into a suite, resolving callables against
/// the module's pool.
pub fn parse_suite(source: &str, pool: &CallablePool) -> Result<TestSuite, ExportError> {
    let ast = parse_module("tests", source)?;
    let mut tests = Vec::new();
    for item in &ast.items {
        let Item::Function(f) = item else {
            return Err(ExportError::Invalid {
                test: "<module>".into(),
                message: "only test functions are allowed at top level".into(),
            });
        };
        let invalid = |message: String| ExportError::Invalid {
            test: f.name.clone(),
            message,
        };
        let mut vars: HashMap<&str, usize> = HashMap::new();
        let mut test = TestCase::new();
        for stmt in &f.body {
            let Stmt::Assign { target, value, .. } = stmt else {
                return Err(invalid("test bodies may only contain assignments".into()));
            };
            let lookup = |e: &Expr, vars: &HashMap<&str, usize>| match &e.kind {
                ExprKind::Name(n) => vars
                    .get(n.as_str())
                    .map(|&i| VarRef(i))
                    .ok_or_else(|| invalid(format!("undefined variable `{n}`"))),
                _ => Err(invalid("arguments must be variables".into())),
            };
            let lookup_all = |args: &[Expr], vars: &HashMap<&str, usize>| {
                args.iter().map(|a| lookup(a, vars)).collect::<Result<Vec<_>, _>>()
            };
            let parsed = match &value.kind {
                ExprKind::Int(v) => Statement::Primitive(PrimitiveValue::Int(*v)),
                ExprKind::Float(v) => Statement::Primitive(PrimitiveValue::Float(*v)),
                ExprKind::Bool(v) => Statement::Primitive(PrimitiveValue::Bool(*v)),
                ExprKind::Str(v) => Statement::Primitive(PrimitiveValue::Str(v.clone())),
                ExprKind::Call { callee, args } => {
                    let args = lookup_all(args, &vars)?;
                    if pool.constructor(callee).is_some() {
                        Statement::Constructor {
                            class: callee.clone(),
                            args,
                        }
                    } else if pool.function(callee).is_some() {
                        Statement::Function {
                            name: callee.clone(),
                            args,
                        }
                    } else {
                        return Err(invalid(format!("unknown callable `{callee}`")));
                    }
                }
                ExprKind::MethodCall {
                    receiver,
                    method,
                    args,
                } => {
                    let receiver = lookup(receiver, &vars)?;
                    let args = lookup_all(args, &vars)?;
                    let owners = pool.classes_with_method(method);
                    let owner = match inferred_type(&test, receiver.0, pool) {
                        TypeRef::Class(c) if owners.contains(&c.as_str()) => c,
                        _ => owners
                            .first()
                            .map(|s| s.to_string())
                            .ok_or_else(|| invalid(format!("unknown method `{method}`")))?,
                    };
                    Statement::Method {
                        owner,
                        receiver,
                        name: method.clone(),
                        args,
                    }
                }
                _ => return Err(invalid(format!("unsupported statement for `{target}`"))),
            };
            let index = test.len();
            test.push(parsed);
            vars.insert(target.as_str(), index);
        }
        tests.push(test);
    }
    Ok(TestSuite::new(tests))
}
