use std::fmt::Write;

use super::ast::*;

/// Pretty-prints a module in canonical layout. Parsing the output yields a
/// tree equal to the input.
pub fn render_module(ast: &ModuleAst) -> String {
    let mut out = String::new();
    for (i, item) in ast.items.iter().enumerate() {
        let is_def = !matches!(item, Item::Stmt(_));
        if i > 0 && is_def {
            out.push('\n');
        }
        match item {
            Item::Function(f) => render_function(&mut out, f, 0),
            Item::Class(c) => {
                let _ = writeln!(out, "class {} {{", c.name);
                for (j, m) in c.methods.iter().enumerate() {
                    if j > 0 {
                        out.push('\n');
                    }
                    render_function(&mut out, m, 1);
                }
                out.push_str("}\n");
            }
            Item::Stmt(s) => render_stmt(&mut out, s, 0),
        }
    }
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn render_function(out: &mut String, f: &FunctionDef, level: usize) {
    indent(out, level);
    let params: Vec<String> = f
        .params
        .iter()
        .map(|p| match &p.annotation {
            Some(t) => format!("{}: {}", p.name, t),
            None => p.name.clone(),
        })
        .collect();
    let _ = write!(out, "def {}({})", f.name, params.join(", "));
    if let Some(ret) = &f.returns {
        let _ = write!(out, " -> {ret}");
    }
    out.push_str(" {\n");
    render_body(out, &f.body, level + 1);
    indent(out, level);
    out.push_str("}\n");
}

fn render_body(out: &mut String, body: &[Stmt], level: usize) {
    for s in body {
        render_stmt(out, s, level);
    }
}

fn render_stmt(out: &mut String, stmt: &Stmt, level: usize) {
    indent(out, level);
    match stmt {
        Stmt::Assign { target, value, .. } => {
            let _ = writeln!(out, "{} = {}", target, render_expr(value));
        }
        Stmt::SetAttr { attr, value, .. } => {
            let _ = writeln!(out, "self.{} = {}", attr, render_expr(value));
        }
        Stmt::If {
            cond,
            then_body,
            elifs,
            else_body,
            ..
        } => {
            let _ = writeln!(out, "if {} {{", render_expr(cond));
            render_body(out, then_body, level + 1);
            for (c, b) in elifs {
                indent(out, level);
                let _ = writeln!(out, "}} elif {} {{", render_expr(c));
                render_body(out, b, level + 1);
            }
            if let Some(b) = else_body {
                indent(out, level);
                out.push_str("} else {\n");
                render_body(out, b, level + 1);
            }
            indent(out, level);
            out.push_str("}\n");
        }
        Stmt::While { cond, body, .. } => {
            let _ = writeln!(out, "while {} {{", render_expr(cond));
            render_body(out, body, level + 1);
            indent(out, level);
            out.push_str("}\n");
        }
        Stmt::Return { value, .. } => match value {
            Some(v) => {
                let _ = writeln!(out, "return {}", render_expr(v));
            }
            None => out.push_str("return\n"),
        },
        Stmt::Raise { kind, message, .. } => match message {
            Some(m) => {
                let _ = writeln!(out, "raise {}({})", kind, render_expr(m));
            }
            None => {
                let _ = writeln!(out, "raise {kind}");
            }
        },
        Stmt::Pass { .. } => out.push_str("pass\n"),
        Stmt::Expr(e) => {
            let _ = writeln!(out, "{}", render_expr(e));
        }
    }
}

/// Renders an expression; compound sub-expressions are fully parenthesized.
pub fn render_expr(expr: &Expr) -> String {
    match &expr.kind {
        ExprKind::Int(v) => v.to_string(),
        ExprKind::Float(v) => format!("{v:?}"),
        ExprKind::Str(s) => quote_str(s),
        ExprKind::Bool(true) => "True".to_string(),
        ExprKind::Bool(false) => "False".to_string(),
        ExprKind::None => "None".to_string(),
        ExprKind::Name(n) => n.clone(),
        ExprKind::Attr(a) => format!("self.{a}"),
        ExprKind::Call { callee, args } => format!("{}({})", callee, render_args(args)),
        ExprKind::MethodCall {
            receiver,
            method,
            args,
        } => format!("{}.{}({})", operand(receiver), method, render_args(args)),
        ExprKind::Neg(e) => format!("-{}", operand(e)),
        ExprKind::Not(e) => format!("not {}", operand(e)),
        ExprKind::Arith { op, lhs, rhs } => {
            format!("{} {} {}", operand(lhs), op.symbol(), operand(rhs))
        }
        ExprKind::Compare { op, lhs, rhs } => {
            format!("{} {} {}", operand(lhs), op.symbol(), operand(rhs))
        }
        ExprKind::And(l, r) => format!("{} and {}", operand(l), operand(r)),
        ExprKind::Or(l, r) => format!("{} or {}", operand(l), operand(r)),
    }
}

fn render_args(args: &[Expr]) -> String {
    args.iter().map(render_expr).collect::<Vec<_>>().join(", ")
}

fn operand(expr: &Expr) -> String {
    let atomic = match &expr.kind {
        ExprKind::Int(v) => *v >= 0,
        ExprKind::Float(v) => v.is_sign_positive(),
        ExprKind::Str(_)
        | ExprKind::Bool(_)
        | ExprKind::None
        | ExprKind::Name(_)
        | ExprKind::Attr(_)
        | ExprKind::Call { .. }
        | ExprKind::MethodCall { .. } => true,
        _ => false,
    };
    if atomic {
        render_expr(expr)
    } else {
        format!("({})", render_expr(expr))
    }
}

/// Quotes a string literal using the language's escape syntax.
pub fn quote_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\0' => out.push_str("\\0"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
