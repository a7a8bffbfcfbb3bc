use std::collections::BTreeSet;

use serde::Serialize;

use super::ast::*;

/// Literals harvested from a module, used to seed primitive inputs.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConstantPool {
    pub ints: BTreeSet<i64>,
    /// Sorted, deduplicated by bit pattern.
    pub floats: Vec<f64>,
    pub strings: BTreeSet<String>,
}

impl ConstantPool {
    pub fn is_empty(&self) -> bool {
        self.ints.is_empty() && self.floats.is_empty() && self.strings.is_empty()
    }

    fn add_float(&mut self, v: f64) {
        if !self.floats.iter().any(|f| f.to_bits() == v.to_bits()) {
            self.floats.push(v);
            self.floats.sort_by(f64::total_cmp);
        }
    }
}

pub fn collect_constants(ast: &ModuleAst) -> ConstantPool {
    let mut pool = ConstantPool::default();
    for item in &ast.items {
        match item {
            Item::Function(f) => visit_body(&mut pool, &f.body),
            Item::Class(c) => c.methods.iter().for_each(|m| visit_body(&mut pool, &m.body)),
            Item::Stmt(s) => visit_stmt(&mut pool, s),
        }
    }
    pool
}

fn visit_body(pool: &mut ConstantPool, body: &[Stmt]) {
    body.iter().for_each(|s| visit_stmt(pool, s));
}

fn visit_stmt(pool: &mut ConstantPool, stmt: &Stmt) {
    match stmt {
        Stmt::Assign { value, .. } | Stmt::SetAttr { value, .. } => visit_expr(pool, value),
        Stmt::If {
            cond,
            then_body,
            elifs,
            else_body,
            ..
        } => {
            visit_expr(pool, cond);
            visit_body(pool, then_body);
            for (c, b) in elifs {
                visit_expr(pool, c);
                visit_body(pool, b);
            }
            if let Some(b) = else_body {
                visit_body(pool, b);
            }
        }
        Stmt::While { cond, body, .. } => {
            visit_expr(pool, cond);
            visit_body(pool, body);
        }
        Stmt::Return { value: Some(e), .. } | Stmt::Raise { message: Some(e), .. } => {
            visit_expr(pool, e)
        }
        Stmt::Expr(e) => visit_expr(pool, e),
        Stmt::Return { value: None, .. } | Stmt::Raise { message: None, .. } | Stmt::Pass { .. } => {}
    }
}

fn visit_expr(pool: &mut ConstantPool, expr: &Expr) {
    match &expr.kind {
        ExprKind::Int(v) => {
            pool.ints.insert(*v);
        }
        ExprKind::Float(v) => pool.add_float(*v),
        ExprKind::Str(s) => {
            pool.strings.insert(s.clone());
        }
        ExprKind::Bool(_) | ExprKind::None | ExprKind::Name(_) | ExprKind::Attr(_) => {}
        ExprKind::Call { args, .. } => args.iter().for_each(|a| visit_expr(pool, a)),
        ExprKind::MethodCall { receiver, args, .. } => {
            visit_expr(pool, receiver);
            args.iter().for_each(|a| visit_expr(pool, a));
        }
        ExprKind::Neg(e) | ExprKind::Not(e) => visit_expr(pool, e),
        ExprKind::Arith { lhs, rhs, .. } | ExprKind::Compare { lhs, rhs, .. } => {
            visit_expr(pool, lhs);
            visit_expr(pool, rhs);
        }
        ExprKind::And(l, r) | ExprKind::Or(l, r) => {
            visit_expr(pool, l);
            visit_expr(pool, r);
        }
    }
}
