//! The subject language: a small dynamically typed language with Python-like
//! statements and brace-delimited blocks. See `docs/language.md`.

pub mod ast;
mod constants;
mod lexer;
mod parser;
mod render;
mod signatures;

use std::fmt;

pub use ast::{ModuleAst, Span};
pub use constants::{collect_constants, ConstantPool};
pub use parser::parse_module;
pub use render::{quote_str, render_expr, render_module};
pub use signatures::{
    collect_signatures, resolve_annotation, CallableKind, CallablePool, CallableSig, ParamSig,
    TypeRef,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct SyntaxError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl SyntaxError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        SyntaxError {
            line: span.line,
            col: span.col,
            message: message.into(),
        }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SyntaxError at {}:{}: {}", self.line, self.col, self.message)
    }
}

#[cfg(test)]
mod tests {
    use super::ast::*;
    use super::*;
    use proptest::prelude::*;

    const FOO_BAR: &str = r#"
class Foo {
    def init(self, b: Bar) {
        self.b = b
    }
    def do_foo(self, b: Bar) {
        return b
    }
}
class Bar {
    def init(self) {
        pass
    }
    def do_bar(self, b: Bar) -> Bar {
        return b
    }
}
def _helper(x) {
    return x
}
"#;

    #[test]
    fn annotated_signatures() {
        let ast = parse_module("foo_bar", FOO_BAR).unwrap();
        let pool = collect_signatures(&ast, true);
        let do_foo = pool.method("Foo", "do_foo").unwrap();
        assert_eq!(do_foo.params.len(), 1);
        assert_eq!(do_foo.params[0].declared, TypeRef::Class("Bar".into()));
        assert_eq!(do_foo.returns, TypeRef::Unknown);
        assert_eq!(pool.constructor("Bar").unwrap().params.len(), 0);
        assert_eq!(pool.method("Bar", "do_bar").unwrap().returns, TypeRef::Class("Bar".into()));
        // private helper excluded; 2 ctors + 2 methods
        assert_eq!(pool.entries.len(), 4);
        assert!(pool.function("_helper").is_none());
    }

    #[test]
    fn annotations_off_means_unknown() {
        let ast = parse_module("foo_bar", FOO_BAR).unwrap();
        let off = collect_signatures(&ast, false);
        for e in &off.entries {
            assert!(e.params.iter().all(|p| p.declared == TypeRef::Unknown));
        }
        assert_eq!(off, collect_signatures(&ast, true).without_annotations());
    }

    #[test]
    fn any_and_unresolvable_annotations() {
        let ast = parse_module("m", "def g(x: Any, y: Mystery) { return x }").unwrap();
        let pool = collect_signatures(&ast, true);
        let g = pool.function("g").unwrap();
        assert_eq!(g.params[0].declared, TypeRef::Any);
        assert_eq!(g.params[1].declared, TypeRef::Unknown);
    }

    #[test]
    fn constants_are_distinct_literals() {
        let ast = parse_module("m", "x = 42\ny = \"abc\"\nz = 42\nw = -1.5").unwrap();
        let c = collect_constants(&ast);
        assert_eq!(c.ints.iter().copied().collect::<Vec<_>>(), vec![42]);
        assert_eq!(c.strings.iter().cloned().collect::<Vec<_>>(), vec!["abc".to_string()]);
        assert_eq!(c.floats, vec![-1.5]);
        assert!(collect_constants(&parse_module("e", "").unwrap()).is_empty());
    }

    #[test]
    fn render_round_trips_foo_bar() {
        let ast = parse_module("foo_bar", FOO_BAR).unwrap();
        let text = render_module(&ast);
        assert_eq!(parse_module("foo_bar", &text).unwrap(), ast);
    }

    fn is_reserved(s: &str) -> bool {
        matches!(
            s,
            "if" | "in" | "is" | "or" | "and" | "not" | "def" | "elif" | "else" | "pass" | "class"
                | "while" | "raise" | "return" | "self"
        )
    }

    fn leaf() -> impl Strategy<Value = Expr> {
        let sp = Span::default();
        prop_oneof![
            any::<i64>().prop_map(move |v| Expr::new(ExprKind::Int(v), sp)),
            (-1e6f64..1e6).prop_map(move |v| Expr::new(ExprKind::Float(v), sp)),
            "[ -~\\n\\t\"\\\\é]{0,6}".prop_map(move |s| Expr::new(ExprKind::Str(s), sp)),
            any::<bool>().prop_map(move |b| Expr::new(ExprKind::Bool(b), sp)),
            Just(Expr::new(ExprKind::None, sp)),
            "[a-z][a-z0-9_]{0,4}"
                .prop_filter("keyword", |s| !is_reserved(s))
                .prop_map(move |n| Expr::new(ExprKind::Name(n), sp)),
            "[a-z]{1,3}"
                .prop_filter("keyword", |s| !is_reserved(s))
                .prop_map(move |n| Expr::new(ExprKind::Attr(n), sp)),
        ]
    }

    fn expr() -> impl Strategy<Value = Expr> {
        let sp = Span::default();
        leaf().prop_recursive(4, 32, 3, move |inner| {
            let arith = prop_oneof![
                Just(ArithOp::Add),
                Just(ArithOp::Sub),
                Just(ArithOp::Mul),
                Just(ArithOp::Div),
                Just(ArithOp::Mod)
            ];
            let cmp = proptest::sample::select(CmpOp::ALL.to_vec());
            prop_oneof![
                (arith, inner.clone(), inner.clone()).prop_map(move |(op, l, r)| Expr::new(
                    ExprKind::Arith { op, lhs: Box::new(l), rhs: Box::new(r) },
                    sp
                )),
                (cmp, inner.clone(), inner.clone()).prop_map(move |(op, l, r)| Expr::new(
                    ExprKind::Compare { op, lhs: Box::new(l), rhs: Box::new(r) },
                    sp
                )),
                (inner.clone(), inner.clone())
                    .prop_map(move |(l, r)| Expr::new(ExprKind::And(Box::new(l), Box::new(r)), sp)),
                (inner.clone(), inner.clone())
                    .prop_map(move |(l, r)| Expr::new(ExprKind::Or(Box::new(l), Box::new(r)), sp)),
                inner.clone().prop_map(move |e| Expr::new(ExprKind::Not(Box::new(e)), sp)),
                inner
                    .clone()
                    .prop_filter("folded literal", |e| !matches!(e.kind, ExprKind::Int(_) | ExprKind::Float(_)))
                    .prop_map(move |e| Expr::new(ExprKind::Neg(Box::new(e)), sp)),
                proptest::collection::vec(inner.clone(), 0..3).prop_map(move |args| Expr::new(
                    ExprKind::Call { callee: "f".into(), args },
                    sp
                )),
                (inner.clone(), proptest::collection::vec(inner, 0..2)).prop_map(move |(r, args)| Expr::new(
                    ExprKind::MethodCall { receiver: Box::new(r), method: "m".into(), args },
                    sp
                )),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_render_round_trip(cond in expr(), value in expr()) {
            let sp = Span::default();
            let body = vec![
                Stmt::If {
                    cond: cond.clone(),
                    then_body: vec![Stmt::Assign { target: "x".into(), value: value.clone(), span: sp }],
                    elifs: vec![(value.clone(), vec![Stmt::Pass { span: sp }])],
                    else_body: Some(vec![Stmt::Return { value: Some(cond), span: sp }]),
                    span: sp,
                },
                Stmt::While { cond: value.clone(), body: vec![Stmt::Expr(value)], span: sp },
            ];
            let ast = ModuleAst {
                name: "m".into(),
                items: vec![Item::Function(FunctionDef {
                    name: "f".into(),
                    params: vec![Param { name: "a".into(), annotation: Some("int".into()), span: sp }],
                    returns: None,
                    body,
                    span: sp,
                })],
            };
            let text = render_module(&ast);
            let reparsed = parse_module("m", &text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(reparsed, ast);
        }
    }
}
