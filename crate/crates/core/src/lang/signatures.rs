use std::fmt;

use serde::Serialize;

use super::ast::{FunctionDef, Item, ModuleAst};

/// Declared or inferred type of a value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TypeRef {
    Int,
    Float,
    Bool,
    Str,
    NoneType,
    Class(String),
    /// Explicit `Any` annotation.
    Any,
    /// No annotation, or annotations ignored.
    Unknown,
}

impl TypeRef {
    pub fn is_primitive(&self) -> bool {
        matches!(self, TypeRef::Int | TypeRef::Float | TypeRef::Bool | TypeRef::Str)
    }

    /// A type that constrains input selection: not `Any`, not `Unknown`.
    pub fn is_concrete(&self) -> bool {
        !matches!(self, TypeRef::Any | TypeRef::Unknown)
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Int => f.write_str("int"),
            TypeRef::Float => f.write_str("float"),
            TypeRef::Bool => f.write_str("bool"),
            TypeRef::Str => f.write_str("str"),
            TypeRef::NoneType => f.write_str("None"),
            TypeRef::Class(c) => f.write_str(c),
            TypeRef::Any => f.write_str("Any"),
            TypeRef::Unknown => f.write_str("?"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CallableKind {
    Constructor,
    Method,
    Function,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamSig {
    pub name: String,
    pub declared: TypeRef,
}

/// One callable of the module under test. Method receivers are implicit and
/// not listed in `params`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CallableSig {
    pub kind: CallableKind,
    pub owner: Option<String>,
    /// Function or method name; the class name for constructors.
    pub name: String,
    pub params: Vec<ParamSig>,
    pub returns: TypeRef,
}

impl CallableSig {
    pub fn qualified_name(&self) -> String {
        match (&self.kind, &self.owner) {
            (CallableKind::Method, Some(owner)) => format!("{owner}.{}", self.name),
            _ => self.name.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CallablePool {
    pub entries: Vec<CallableSig>,
}

impl CallablePool {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn functions(&self) -> impl Iterator<Item = &CallableSig> {
        self.entries.iter().filter(|e| e.kind == CallableKind::Function)
    }

    pub fn function(&self, name: &str) -> Option<&CallableSig> {
        self.functions().find(|e| e.name == name)
    }

    pub fn constructor(&self, class: &str) -> Option<&CallableSig> {
        self.entries
            .iter()
            .find(|e| e.kind == CallableKind::Constructor && e.name == class)
    }

    pub fn methods_of<'a>(&'a self, class: &'a str) -> impl Iterator<Item = &'a CallableSig> + 'a {
        self.entries
            .iter()
            .filter(move |e| e.kind == CallableKind::Method && e.owner.as_deref() == Some(class))
    }

    pub fn method(&self, class: &str, name: &str) -> Option<&CallableSig> {
        self.entries.iter().find(|e| {
            e.kind == CallableKind::Method && e.owner.as_deref() == Some(class) && e.name == name
        })
    }

    /// Classes that own at least one method named `name`, in pool order.
    pub fn classes_with_method(&self, name: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.kind == CallableKind::Method && e.name == name)
            .filter_map(|e| e.owner.as_deref())
            .collect()
    }

    /// The concrete types occurring anywhere in the pool, in a stable order.
    /// `None` is excluded because no statement can generate it directly.
    pub fn types(&self) -> Vec<TypeRef> {
        let mut set = std::collections::BTreeSet::new();
        for e in &self.entries {
            if let Some(owner) = &e.owner {
                set.insert(TypeRef::Class(owner.clone()));
            }
            for t in e.params.iter().map(|p| &p.declared).chain(std::iter::once(&e.returns)) {
                if t.is_concrete() && *t != TypeRef::NoneType {
                    set.insert(t.clone());
                }
            }
        }
        set.into_iter().collect()
    }

    /// Same pool with every annotation-derived type replaced by `Unknown`.
    /// Constructor return types are structural and kept.
    pub fn without_annotations(&self) -> CallablePool {
        let entries = self
            .entries
            .iter()
            .map(|e| CallableSig {
                params: e
                    .params
                    .iter()
                    .map(|p| ParamSig {
                        name: p.name.clone(),
                        declared: TypeRef::Unknown,
                    })
                    .collect(),
                returns: match e.kind {
                    CallableKind::Constructor => e.returns.clone(),
                    _ => TypeRef::Unknown,
                },
                ..e.clone()
            })
            .collect();
        CallablePool { entries }
    }
}

fn is_private(name: &str) -> bool {
    name.starts_with('_')
}

/// Resolves an annotation against the module's classes.
pub fn resolve_annotation(ast: &ModuleAst, annotation: Option<&str>) -> TypeRef {
    match annotation {
        None => TypeRef::Unknown,
        Some("int") => TypeRef::Int,
        Some("float") => TypeRef::Float,
        Some("bool") => TypeRef::Bool,
        Some("str") => TypeRef::Str,
        Some("None") => TypeRef::NoneType,
        Some("Any") => TypeRef::Any,
        Some(name) if ast.class(name).is_some() => TypeRef::Class(name.to_string()),
        Some(name) => {
            log::warn!("module `{}`: unresolvable type annotation `{name}` treated as unknown", ast.name);
            TypeRef::Unknown
        }
    }
}

/// Extracts the public callables of a module.
pub fn collect_signatures(ast: &ModuleAst, use_annotations: bool) -> CallablePool {
    let resolve = |a: Option<&String>| {
        if use_annotations {
            resolve_annotation(ast, a.map(String::as_str))
        } else {
            TypeRef::Unknown
        }
    };
    let params_of = |f: &FunctionDef, skip_self: bool| -> Vec<ParamSig> {
        f.params
            .iter()
            .skip(usize::from(skip_self))
            .map(|p| ParamSig {
                name: p.name.clone(),
                declared: resolve(p.annotation.as_ref()),
            })
            .collect()
    };

    let mut entries = Vec::new();
    for item in &ast.items {
        match item {
            Item::Function(f) if !is_private(&f.name) => entries.push(CallableSig {
                kind: CallableKind::Function,
                owner: None,
                name: f.name.clone(),
                params: params_of(f, false),
                returns: resolve(f.returns.as_ref()),
            }),
            Item::Class(c) if !is_private(&c.name) => {
                entries.push(CallableSig {
                    kind: CallableKind::Constructor,
                    owner: Some(c.name.clone()),
                    name: c.name.clone(),
                    params: c.constructor().map(|f| params_of(f, true)).unwrap_or_default(),
                    returns: TypeRef::Class(c.name.clone()),
                });
                for m in c.instance_methods().filter(|m| !is_private(&m.name)) {
                    entries.push(CallableSig {
                        kind: CallableKind::Method,
                        owner: Some(c.name.clone()),
                        name: m.name.clone(),
                        params: params_of(m, true),
                        returns: resolve(m.returns.as_ref()),
                    });
                }
            }
            _ => {}
        }
    }
    CallablePool { entries }
}
