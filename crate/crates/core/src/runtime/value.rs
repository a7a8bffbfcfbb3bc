use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::rc::Rc;

/// A run-time value of the subject language.
#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(Rc<str>),
    None,
    Object(Rc<Object>),
}

#[derive(Debug)]
pub struct Object {
    pub class: usize,
    pub class_name: Rc<str>,
    attrs: RefCell<Vec<(usize, Value)>>,
}

impl Object {
    pub fn new(class: usize, class_name: Rc<str>) -> Self {
        Object {
            class,
            class_name,
            attrs: RefCell::new(Vec::new()),
        }
    }

    pub fn get(&self, name: usize) -> Option<Value> {
        self.attrs
            .borrow()
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v.clone())
    }

    pub fn set(&self, name: usize, value: Value) {
        let mut attrs = self.attrs.borrow_mut();
        match attrs.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = value,
            None => attrs.push((name, value)),
        }
    }
}

/// Numeric view of a value; bools count as 0/1.
#[derive(Debug, Clone, Copy)]
pub enum Num {
    Int(i64),
    Float(f64),
}

impl Num {
    pub fn as_f64(self) -> f64 {
        match self {
            Num::Int(i) => i as f64,
            Num::Float(f) => f,
        }
    }
}

impl Value {
    pub fn str(s: &str) -> Value {
        Value::Str(Rc::from(s))
    }

    pub fn type_name(&self) -> String {
        match self {
            Value::Int(_) => "int".into(),
            Value::Float(_) => "float".into(),
            Value::Bool(_) => "bool".into(),
            Value::Str(_) => "str".into(),
            Value::None => "NoneType".into(),
            Value::Object(o) => o.class_name.to_string(),
        }
    }

    pub fn as_num(&self) -> Option<Num> {
        match self {
            Value::Int(i) => Some(Num::Int(*i)),
            Value::Float(f) => Some(Num::Float(*f)),
            Value::Bool(b) => Some(Num::Int(i64::from(*b))),
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.as_num().is_some()
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn truthy(&self) -> bool {
        match self {
            Value::Int(i) => *i != 0,
            Value::Float(f) => *f != 0.0,
            Value::Bool(b) => *b,
            Value::Str(s) => !s.is_empty(),
            Value::None => false,
            Value::Object(_) => true,
        }
    }
}

/// `a - b` as a real number, exact for integer pairs.
pub fn numeric_difference(a: Num, b: Num) -> f64 {
    match (a, b) {
        (Num::Int(x), Num::Int(y)) => (i128::from(x) - i128::from(y)) as f64,
        _ => a.as_f64() - b.as_f64(),
    }
}

fn numeric_cmp(a: Num, b: Num) -> Option<Ordering> {
    match (a, b) {
        (Num::Int(x), Num::Int(y)) => Some(x.cmp(&y)),
        _ => a.as_f64().partial_cmp(&b.as_f64()),
    }
}

/// `==` semantics.
pub fn values_equal(a: &Value, b: &Value) -> bool {
    if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
        return numeric_cmp(x, y) == Some(Ordering::Equal);
    }
    match (a, b) {
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::None, Value::None) => true,
        (Value::Object(x), Value::Object(y)) => Rc::ptr_eq(x, y),
        _ => false,
    }
}

/// `is` semantics: identity for objects, same-kind value equality for
/// primitives.
pub fn values_identical(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => x == y,
        (Value::Float(x), Value::Float(y)) => x.to_bits() == y.to_bits(),
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::None, Value::None) => true,
        (Value::Object(x), Value::Object(y)) => Rc::ptr_eq(x, y),
        _ => false,
    }
}

/// Ordering for `<`-family operators. `Err(())` means the operands are not
/// orderable (a `TypeError`); `Ok(None)` means unordered (NaN).
#[allow(clippy::result_unit_err)]
pub fn order(a: &Value, b: &Value) -> Result<Option<Ordering>, ()> {
    if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
        return Ok(numeric_cmp(x, y));
    }
    match (a, b) {
        (Value::Str(x), Value::Str(y)) => Ok(Some(x.cmp(y))),
        _ => Err(()),
    }
}

/// Substring membership for `in`; `Err(())` for non-string operands.
#[allow(clippy::result_unit_err)]
pub fn contains(needle: &Value, haystack: &Value) -> Result<bool, ()> {
    match (needle, haystack) {
        (Value::Str(n), Value::Str(h)) => Ok(h.contains(&**n)),
        _ => Err(()),
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Bool(true) => f.write_str("True"),
            Value::Bool(false) => f.write_str("False"),
            Value::Str(s) => f.write_str(s),
            Value::None => f.write_str("None"),
            Value::Object(o) => write!(f, "<{} object>", o.class_name),
        }
    }
}
