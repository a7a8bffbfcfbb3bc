use std::fmt::Write;

use super::*;
use crate::lang::quote_str;

fn literal_text(lit: &Literal) -> String {
    match lit {
        Literal::Int(v) => v.to_string(),
        Literal::Float(v) => format!("{v:?}"),
        Literal::Bool(true) => "True".into(),
        Literal::Bool(false) => "False".into(),
        Literal::Str(s) => quote_str(s),
        Literal::None => "None".into(),
    }
}

fn instr_text(cm: &CompiledModule, instr: &Instr) -> String {
    let name = |i: usize| cm.names.get(i).map(String::as_str).unwrap_or("?");
    match instr {
        Instr::PushConst(i) => format!("PUSH_CONST {}", literal_text(&cm.literals[*i])),
        Instr::LoadLocal(i) => format!("LOAD_LOCAL {i}"),
        Instr::StoreLocal(i) => format!("STORE_LOCAL {i}"),
        Instr::LoadGlobal(i) => format!("LOAD_GLOBAL {i} ({})", cm.globals[*i]),
        Instr::StoreGlobal(i) => format!("STORE_GLOBAL {i} ({})", cm.globals[*i]),
        Instr::GetAttr(i) => format!("GET_ATTR {}", name(*i)),
        Instr::SetAttr(i) => format!("SET_ATTR {}", name(*i)),
        Instr::CallFunction { code, argc } => {
            format!("CALL_FUNCTION {} ({}) argc={argc}", code, cm.code_objects[*code].name)
        }
        Instr::Construct { class, argc } => {
            format!("CONSTRUCT {} argc={argc}", cm.classes[*class].name)
        }
        Instr::CallMethod { name: n, argc } => format!("CALL_METHOD {} argc={argc}", name(*n)),
        Instr::CallBuiltin { builtin, argc } => format!("CALL_BUILTIN {} argc={argc}", builtin.name()),
        Instr::Arith(op) => format!("ARITH {}", op.symbol()),
        Instr::Neg => "NEG".into(),
        Instr::Not => "NOT".into(),
        Instr::Compare(op) => format!("COMPARE {}", op.symbol()),
        Instr::CompareJump {
            op,
            predicate,
            when,
            target,
        } => format!("COMPARE_JUMP {} p{predicate} if={} -> {target:04}", op.symbol(), when),
        Instr::TruthyJump {
            predicate,
            when,
            target,
        } => format!("TRUTHY_JUMP p{predicate} if={when} -> {target:04}"),
        Instr::Jump(t) => format!("JUMP -> {t:04}"),
        Instr::Dup => "DUP".into(),
        Instr::Pop => "POP".into(),
        Instr::Return => "RETURN".into(),
        Instr::Raise { kind, has_message } => {
            format!("RAISE {}{}", name(*kind), if *has_message { " with message" } else { "" })
        }
    }
}

/// Deterministic textual listing of every code object, predicate and branch.
pub fn disassemble(cm: &CompiledModule) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "module {}", cm.name);
    for code in &cm.code_objects {
        let kind = match code.kind {
            CodeKind::Module => "module",
            CodeKind::Function => "function",
            CodeKind::Constructor => "constructor",
            CodeKind::Method => "method",
        };
        let _ = writeln!(
            out,
            "\ncode {} {} {} arity={} locals={}",
            code.id, kind, code.name, code.arity, code.n_locals
        );
        for (i, instr) in code.instructions.iter().enumerate() {
            let _ = writeln!(out, "  {i:04} {}", instr_text(cm, instr));
        }
    }
    let _ = writeln!(out, "\npredicates {}", cm.num_predicates());
    for p in cm.predicates() {
        let op = match p.operator {
            PredicateOp::Compare(op) => op.symbol().to_string(),
            PredicateOp::Truthy => "truthy".to_string(),
        };
        let _ = writeln!(out, "  p{} code={} op={} at {}:{}", p.id, p.code_object, op, p.line, p.col);
    }
    let _ = writeln!(out, "goals code_objects={} branches={}", cm.code_objects.len(), cm.branches.len());
    out
}
