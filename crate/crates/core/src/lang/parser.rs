use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::SyntaxError;

/// Parses a `.dyn` module.
pub fn parse_module(name: &str, source: &str) -> Result<ModuleAst, SyntaxError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    let items = parser.module()?;
    let ast = ModuleAst {
        name: name.to_string(),
        items,
    };
    check_unique_names(&ast)?;
    Ok(ast)
}

fn check_unique_names(ast: &ModuleAst) -> Result<(), SyntaxError> {
    let mut seen = std::collections::BTreeSet::new();
    for item in &ast.items {
        let (name, span) = match item {
            Item::Function(f) => (&f.name, f.span),
            Item::Class(c) => (&c.name, c.span),
            Item::Stmt(_) => continue,
        };
        if !seen.insert(name.clone()) {
            return Err(SyntaxError::new(span, format!("duplicate definition of `{name}`")));
        }
    }
    for class in ast.classes() {
        let mut methods = std::collections::BTreeSet::new();
        for m in &class.methods {
            if !methods.insert(m.name.clone()) {
                return Err(SyntaxError::new(
                    m.span,
                    format!("duplicate method `{}` in class `{}`", m.name, class.name),
                ));
            }
        }
    }
    Ok(())
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn advance(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> PResult<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.span(), message)
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                Ok(name)
            }
            other => Err(self.error(format!("expected {what}, found {}", describe(&other)))),
        }
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Tok::Newline | Tok::Semi) {
            self.advance();
        }
    }

    fn module(&mut self) -> PResult<Vec<Item>> {
        let mut items = Vec::new();
        loop {
            self.skip_separators();
            match self.peek() {
                Tok::Eof => return Ok(items),
                Tok::Def => items.push(Item::Function(self.function()?)),
                Tok::Class => items.push(Item::Class(self.class()?)),
                _ => items.push(Item::Stmt(self.statement()?)),
            }
        }
    }

    fn function(&mut self) -> PResult<FunctionDef> {
        let span = self.span();
        self.expect(&Tok::Def, "`def`")?;
        let name = self.ident("function name")?;
        self.expect(&Tok::LParen, "`(`")?;
        let mut params = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                let pspan = self.span();
                let pname = self.ident("parameter name")?;
                let annotation = if self.eat(&Tok::Colon) {
                    Some(self.type_name()?)
                } else {
                    None
                };
                if params.iter().any(|p: &Param| p.name == pname) {
                    return Err(SyntaxError::new(pspan, format!("duplicate parameter `{pname}`")));
                }
                params.push(Param {
                    name: pname,
                    annotation,
                    span: pspan,
                });
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(&Tok::Comma, "`,` or `)`")?;
            }
        }
        let returns = if self.eat(&Tok::Arrow) {
            Some(self.type_name()?)
        } else {
            None
        };
        let body = self.block()?;
        Ok(FunctionDef {
            name,
            params,
            returns,
            body,
            span,
        })
    }

    fn type_name(&mut self) -> PResult<String> {
        if self.eat(&Tok::None) {
            return Ok("None".to_string());
        }
        self.ident("type name")
    }

    fn class(&mut self) -> PResult<ClassDef> {
        let span = self.span();
        self.expect(&Tok::Class, "`class`")?;
        let name = self.ident("class name")?;
        self.expect(&Tok::LBrace, "`{`")?;
        let mut methods = Vec::new();
        loop {
            self.skip_separators();
            match self.peek() {
                Tok::RBrace => {
                    self.advance();
                    break;
                }
                Tok::Def => {
                    let method = self.function()?;
                    if method.params.first().map(|p| p.name.as_str()) != Some("self") {
                        return Err(SyntaxError::new(
                            method.span,
                            format!("method `{}` must take `self` as its first parameter", method.name),
                        ));
                    }
                    methods.push(method);
                }
                other => {
                    return Err(self.error(format!(
                        "expected method definition in class body, found {}",
                        describe(other)
                    )))
                }
            }
        }
        Ok(ClassDef {
            name,
            methods,
            span,
        })
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(&Tok::LBrace, "`{`")?;
        let mut body = Vec::new();
        loop {
            self.skip_separators();
            if self.eat(&Tok::RBrace) {
                return Ok(body);
            }
            if matches!(self.peek(), Tok::Eof) {
                return Err(self.error("unclosed block, expected `}`"));
            }
            body.push(self.statement()?);
        }
    }

    fn end_simple_statement(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Newline | Tok::Semi => {
                self.advance();
                Ok(())
            }
            Tok::RBrace | Tok::Eof => Ok(()),
            other => Err(self.error(format!("expected end of statement, found {}", describe(other)))),
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let span = self.span();
        match self.peek() {
            Tok::If => self.if_statement(),
            Tok::While => {
                self.advance();
                let cond = self.expr()?;
                let body = self.block()?;
                Ok(Stmt::While { cond, body, span })
            }
            Tok::Return => {
                self.advance();
                let value = if matches!(self.peek(), Tok::Newline | Tok::Semi | Tok::RBrace | Tok::Eof) {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.end_simple_statement()?;
                Ok(Stmt::Return { value, span })
            }
            Tok::Raise => {
                self.advance();
                let kind = self.ident("exception name")?;
                let message = if self.eat(&Tok::LParen) {
                    let m = self.expr()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Some(m)
                } else {
                    None
                };
                self.end_simple_statement()?;
                Ok(Stmt::Raise { kind, message, span })
            }
            Tok::Pass => {
                self.advance();
                self.end_simple_statement()?;
                Ok(Stmt::Pass { span })
            }
            Tok::Def | Tok::Class => Err(self.error("definitions are only allowed at module level")),
            _ => {
                let target = self.expr()?;
                if self.eat(&Tok::Assign) {
                    let value = self.expr()?;
                    let stmt = match target.kind {
                        ExprKind::Name(name) if name == "self" => {
                            return Err(SyntaxError::new(target.span, "cannot assign to `self`"))
                        }
                        ExprKind::Name(name) => Stmt::Assign {
                            target: name,
                            value,
                            span,
                        },
                        ExprKind::Attr(attr) => Stmt::SetAttr { attr, value, span },
                        _ => return Err(SyntaxError::new(target.span, "invalid assignment target")),
                    };
                    self.end_simple_statement()?;
                    Ok(stmt)
                } else {
                    self.end_simple_statement()?;
                    Ok(Stmt::Expr(target))
                }
            }
        }
    }

    fn if_statement(&mut self) -> PResult<Stmt> {
        let span = self.span();
        self.expect(&Tok::If, "`if`")?;
        let cond = self.expr()?;
        let then_body = self.block()?;
        let mut elifs = Vec::new();
        let mut else_body = None;
        loop {
            let save = self.pos;
            while matches!(self.peek(), Tok::Newline) {
                self.advance();
            }
            match self.peek() {
                Tok::Elif => {
                    self.advance();
                    let c = self.expr()?;
                    let b = self.block()?;
                    elifs.push((c, b));
                }
                Tok::Else => {
                    self.advance();
                    else_body = Some(self.block()?);
                    break;
                }
                _ => {
                    self.pos = save;
                    break;
                }
            }
        }
        Ok(Stmt::If {
            cond,
            then_body,
            elifs,
            else_body,
            span,
        })
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while matches!(self.peek(), Tok::Or) {
            let span = self.span();
            self.advance();
            let rhs = self.and_expr()?;
            lhs = Expr::new(ExprKind::Or(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.not_expr()?;
        while matches!(self.peek(), Tok::And) {
            let span = self.span();
            self.advance();
            let rhs = self.not_expr()?;
            lhs = Expr::new(ExprKind::And(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if matches!(self.peek(), Tok::Not) {
            let span = self.span();
            self.advance();
            let operand = self.not_expr()?;
            return Ok(Expr::new(ExprKind::Not(Box::new(operand)), span));
        }
        self.comparison()
    }

    fn cmp_op(&mut self) -> Option<CmpOp> {
        let op = match self.peek() {
            Tok::EqEq => CmpOp::Eq,
            Tok::NotEq => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            Tok::In => CmpOp::In,
            Tok::Not if matches!(self.peek_at(1), Tok::In) => {
                self.advance();
                CmpOp::NotIn
            }
            Tok::Is => {
                if matches!(self.peek_at(1), Tok::Not) {
                    self.advance();
                    CmpOp::IsNot
                } else {
                    CmpOp::Is
                }
            }
            _ => return None,
        };
        self.advance();
        Some(op)
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.sum()?;
        let span = self.span();
        let Some(op) = self.cmp_op() else {
            return Ok(lhs);
        };
        let rhs = self.sum()?;
        let probe = self.pos;
        if self.cmp_op().is_some() {
            self.pos = probe;
            return Err(self.error("chained comparisons are not supported; use `and`"));
        }
        Ok(Expr::new(
            ExprKind::Compare {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            },
            span,
        ))
    }

    fn sum(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            let span = self.span();
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::new(
                ExprKind::Arith {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            );
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                Tok::Percent => ArithOp::Mod,
                _ => return Ok(lhs),
            };
            let span = self.span();
            self.advance();
            let rhs = self.unary()?;
            lhs = Expr::new(
                ExprKind::Arith {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            );
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if !matches!(self.peek(), Tok::Minus) {
            return self.postfix();
        }
        let span = self.span();
        self.advance();
        if matches!(self.peek(), Tok::IntMinMagnitude) {
            self.advance();
            return Ok(Expr::new(ExprKind::Int(i64::MIN), span));
        }
        let operand = self.unary()?;
        // negative numeric literals are folded so they behave as constants
        let kind = match operand.kind {
            ExprKind::Int(v) => ExprKind::Int(v.wrapping_neg()),
            ExprKind::Float(v) => ExprKind::Float(-v),
            other => ExprKind::Neg(Box::new(Expr::new(other, operand.span))),
        };
        Ok(Expr::new(kind, span))
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(&Tok::RParen) {
                return Ok(args);
            }
            self.expect(&Tok::Comma, "`,` or `)`")?;
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.primary()?;
        while matches!(self.peek(), Tok::Dot) {
            let span = self.span();
            self.advance();
            let name = self.ident("attribute or method name")?;
            if self.eat(&Tok::LParen) {
                let args = self.args()?;
                expr = Expr::new(
                    ExprKind::MethodCall {
                        receiver: Box::new(expr),
                        method: name,
                        args,
                    },
                    span,
                );
            } else if matches!(&expr.kind, ExprKind::Name(n) if n == "self") {
                expr = Expr::new(ExprKind::Attr(name), span);
            } else {
                return Err(SyntaxError::new(span, "attribute access is only supported on `self`"));
            }
        }
        Ok(expr)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let kind = match self.advance() {
            Tok::Int(v) => ExprKind::Int(v),
            Tok::Float(v) => ExprKind::Float(v),
            Tok::Str(s) => ExprKind::Str(s),
            Tok::True => ExprKind::Bool(true),
            Tok::False => ExprKind::Bool(false),
            Tok::None => ExprKind::None,
            Tok::IntMinMagnitude => {
                return Err(SyntaxError::new(span, "integer literal out of range"));
            }
            Tok::Ident(name) => {
                if self.eat(&Tok::LParen) {
                    let args = self.args()?;
                    ExprKind::Call { callee: name, args }
                } else {
                    ExprKind::Name(name)
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                return Ok(inner);
            }
            other => {
                self.pos -= 1;
                return Err(self.error(format!("expected expression, found {}", describe(&other))));
            }
        };
        Ok(Expr::new(kind, span))
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(n) => format!("identifier `{n}`"),
        Tok::Int(v) => format!("integer `{v}`"),
        Tok::Float(v) => format!("float `{v}`"),
        Tok::Str(_) => "string literal".to_string(),
        Tok::Newline => "end of line".to_string(),
        Tok::Eof => "end of file".to_string(),
        other => format!("`{}`", token_text(other)),
    }
}

fn token_text(tok: &Tok) -> &'static str {
    match tok {
        Tok::Def => "def",
        Tok::Class => "class",
        Tok::If => "if",
        Tok::Elif => "elif",
        Tok::Else => "else",
        Tok::While => "while",
        Tok::Return => "return",
        Tok::Raise => "raise",
        Tok::Pass => "pass",
        Tok::And => "and",
        Tok::Or => "or",
        Tok::Not => "not",
        Tok::Is => "is",
        Tok::In => "in",
        Tok::True => "True",
        Tok::False => "False",
        Tok::None => "None",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::Comma => ",",
        Tok::Colon => ":",
        Tok::Semi => ";",
        Tok::Dot => ".",
        Tok::Arrow => "->",
        Tok::Assign => "=",
        Tok::EqEq => "==",
        Tok::NotEq => "!=",
        Tok::Lt => "<",
        Tok::Le => "<=",
        Tok::Gt => ">",
        Tok::Ge => ">=",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Slash => "/",
        Tok::Percent => "%",
        _ => "?",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_function() {
        let ast = parse_module("m", "def f(x):\n  return x").unwrap_err();
        // python-style colon bodies are not part of the language
        assert_eq!(ast.line, 1);

        let ast = parse_module("m", "def f(x) {\n  return x\n}").unwrap();
        let f: Vec<_> = ast.functions().collect();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].params.len(), 1);
        assert_eq!(f[0].params[0].annotation, None);
    }

    #[test]
    fn empty_module() {
        let ast = parse_module("m", "").unwrap();
        assert!(ast.items.is_empty());
    }

    #[test]
    fn foo_bar_listing() {
        let src = r#"
class Foo {
    def init(self, b) { pass }
    def do_foo(self, b) { pass }
}
class Bar {
    def init(self) { pass }
    def do_bar(self, b) { pass }
}
"#;
        let ast = parse_module("foo_bar", src).unwrap();
        let foo = ast.class("Foo").unwrap();
        assert_eq!(foo.constructor().unwrap().params.len(), 2);
        assert_eq!(foo.instance_methods().map(|m| m.name.as_str()).collect::<Vec<_>>(), ["do_foo"]);
        let bar = ast.class("Bar").unwrap();
        assert_eq!(bar.constructor().unwrap().params.len(), 1);
        assert_eq!(bar.instance_methods().map(|m| m.name.as_str()).collect::<Vec<_>>(), ["do_bar"]);
    }

    #[test]
    fn precedence_and_membership() {
        let ast = parse_module("m", "x = not a in b or c * -2 < d").unwrap();
        let Item::Stmt(Stmt::Assign { value, .. }) = &ast.items[0] else { panic!() };
        let ExprKind::Or(lhs, rhs) = &value.kind else { panic!("{value:?}") };
        assert!(matches!(&lhs.kind, ExprKind::Not(inner) if matches!(inner.kind, ExprKind::Compare { op: CmpOp::In, .. })));
        let ExprKind::Compare { op: CmpOp::Lt, lhs, .. } = &rhs.kind else { panic!() };
        assert!(matches!(&lhs.kind, ExprKind::Arith { op: ArithOp::Mul, rhs, .. } if rhs.kind == ExprKind::Int(-2)));
    }

    #[test]
    fn elif_chain_and_is_not() {
        let src = "def f(x) {\n if x is not None {\n return 1\n }\n elif x > 2 { return 2 } else { return 3 }\n}";
        let ast = parse_module("m", src).unwrap();
        let f = ast.functions().next().unwrap();
        let Stmt::If { cond, elifs, else_body, .. } = &f.body[0] else { panic!() };
        assert!(matches!(cond.kind, ExprKind::Compare { op: CmpOp::IsNot, .. }));
        assert_eq!(elifs.len(), 1);
        assert!(else_body.is_some());
    }

    #[test]
    fn diagnostics_carry_positions() {
        let err = parse_module("m", "def f() {\n  x = (1 +\n}").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_module("m", "x = a < b < c").unwrap_err();
        assert!(err.message.contains("chained"));
        let err = parse_module("m", "x = y.z").unwrap_err();
        assert!(err.message.contains("self"));
        let err = parse_module("m", "def f() {}\ndef f() {}").unwrap_err();
        assert!(err.message.contains("duplicate"));
    }

    #[test]
    fn min_int_literal() {
        let ast = parse_module("m", "x = -9223372036854775808").unwrap();
        let Item::Stmt(Stmt::Assign { value, .. }) = &ast.items[0] else { panic!() };
        assert_eq!(value.kind, ExprKind::Int(i64::MIN));
        assert!(parse_module("m", "x = 9223372036854775808").is_err());
    }
}
