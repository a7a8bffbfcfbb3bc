//! A direct transcription of the piecewise branch-distance definitions,
//! written without reference to the engine's helpers.

use dyntest_core::bytecode::Polarity;
use dyntest_core::lang::ast::CmpOp;
use dyntest_core::runtime::Value;

#[derive(Debug, Clone)]
pub enum Operand {
    I(i64),
    F(f64),
    S(String),
}

impl Operand {
    pub fn to_value(&self) -> Value {
        match self {
            Operand::I(i) => Value::Int(*i),
            Operand::F(f) => Value::Float(*f),
            Operand::S(s) => Value::Str(s.as_str().into()),
        }
    }
}

pub fn edit_distance(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut m = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in m.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        m[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
            m[i][j] = (m[i - 1][j] + 1).min(m[i][j - 1] + 1).min(m[i - 1][j - 1] + cost);
        }
    }
    m[a.len()][b.len()] as f64
}

fn as_float(x: &Operand) -> Option<f64> {
    match x {
        Operand::I(i) => Some(*i as f64),
        Operand::F(f) => Some(*f),
        Operand::S(_) => None,
    }
}

/// a - b, exact for two integers.
fn minus(a: &Operand, b: &Operand) -> Option<f64> {
    match (a, b) {
        (Operand::I(x), Operand::I(y)) => Some((*x as i128 - *y as i128) as f64),
        _ => Some(as_float(a)? - as_float(b)?),
    }
}

fn equal(a: &Operand, b: &Operand) -> bool {
    match (a, b) {
        (Operand::I(x), Operand::I(y)) => x == y,
        (Operand::S(x), Operand::S(y)) => x == y,
        (Operand::S(_), _) | (_, Operand::S(_)) => false,
        _ => as_float(a) == as_float(b),
    }
}

fn less(a: &Operand, b: &Operand, or_equal: bool) -> bool {
    match (a, b) {
        (Operand::I(x), Operand::I(y)) => x < y || (or_equal && x == y),
        (Operand::S(x), Operand::S(y)) => x < y || (or_equal && x == y),
        (Operand::S(_), _) | (_, Operand::S(_)) => false,
        _ => {
            let (x, y) = (as_float(a).unwrap(), as_float(b).unwrap());
            x < y || (or_equal && x == y)
        }
    }
}

fn same(a: &Operand, b: &Operand) -> bool {
    match (a, b) {
        (Operand::I(x), Operand::I(y)) => x == y,
        (Operand::F(x), Operand::F(y)) => x.to_bits() == y.to_bits(),
        (Operand::S(x), Operand::S(y)) => x == y,
        _ => false,
    }
}

fn member(a: &Operand, b: &Operand) -> bool {
    matches!((a, b), (Operand::S(x), Operand::S(y)) if y.contains(x.as_str()))
}

fn satisfied(op: CmpOp, a: &Operand, b: &Operand) -> bool {
    match op {
        CmpOp::Eq => equal(a, b),
        CmpOp::Ne => !equal(a, b),
        CmpOp::Lt => less(a, b, false),
        CmpOp::Le => less(a, b, true),
        CmpOp::Gt => less(b, a, false),
        CmpOp::Ge => less(b, a, true),
        CmpOp::In => member(a, b),
        CmpOp::NotIn => matches!((a, b), (Operand::S(_), Operand::S(_))) && !member(a, b),
        CmpOp::Is => same(a, b),
        CmpOp::IsNot => !same(a, b),
    }
}

fn true_distance(op: CmpOp, a: &Operand, b: &Operand, k: f64) -> f64 {
    let d = match op {
        CmpOp::Eq => {
            if equal(a, b) {
                0.0
            } else if let (Operand::S(x), Operand::S(y)) = (a, b) {
                edit_distance(x, y)
            } else {
                minus(a, b).map_or(f64::INFINITY, f64::abs)
            }
        }
        CmpOp::Lt | CmpOp::Le => {
            if satisfied(op, a, b) {
                0.0
            } else {
                minus(a, b).map_or(f64::INFINITY, |d| d + k)
            }
        }
        CmpOp::Gt => true_distance(CmpOp::Lt, b, a, k),
        CmpOp::Ge => true_distance(CmpOp::Le, b, a, k),
        _ => {
            if satisfied(op, a, b) {
                0.0
            } else {
                k
            }
        }
    };
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

fn opposite(op: CmpOp) -> CmpOp {
    match op {
        CmpOp::Eq => CmpOp::Ne,
        CmpOp::Ne => CmpOp::Eq,
        CmpOp::Lt => CmpOp::Ge,
        CmpOp::Ge => CmpOp::Lt,
        CmpOp::Le => CmpOp::Gt,
        CmpOp::Gt => CmpOp::Le,
        CmpOp::In => CmpOp::NotIn,
        CmpOp::NotIn => CmpOp::In,
        CmpOp::Is => CmpOp::IsNot,
        CmpOp::IsNot => CmpOp::Is,
    }
}

fn unordered(a: &Operand, b: &Operand) -> bool {
    match (as_float(a), as_float(b)) {
        (Some(x), Some(y)) => x.is_nan() || y.is_nan(),
        _ => false,
    }
}

pub fn distance(op: CmpOp, a: &Operand, b: &Operand, polarity: Polarity, k: f64) -> f64 {
    let ordering = matches!(op, CmpOp::Lt | CmpOp::Le | CmpOp::Gt | CmpOp::Ge);
    if polarity == Polarity::False && ordering && unordered(a, b) {
        return 0.0;
    }
    match polarity {
        Polarity::True => true_distance(op, a, b, k),
        Polarity::False => true_distance(opposite(op), a, b, k),
    }
}

/// Operands drawn so that collisions (equal ints, shared substrings, int
/// and float with the same value) are common.
pub fn random_operand(rng: &mut impl rand::Rng) -> Operand {
    const WORDS: [&str; 8] = ["", "a", "ab", "abc", "http://", "http://x", "ba", "héllo"];
    match rng.random_range(0..10) {
        0..=2 => Operand::I(rng.random_range(-5..=5)),
        3 => Operand::I(rng.random()),
        4 => Operand::I([i64::MIN, i64::MAX, 0, -1][rng.random_range(0..4)]),
        5 => Operand::F(rng.random_range(-5..=5) as f64),
        6 => Operand::F(rng.random_range(-1e6..1e6)),
        7 => Operand::F([f64::INFINITY, f64::NEG_INFINITY, f64::NAN, -0.0, 0.5][rng.random_range(0..5)]),
        _ => {
            let mut s = WORDS[rng.random_range(0..WORDS.len())].to_string();
            if rng.random_bool(0.3) {
                s.push(['a', 'z', '/', 'é'][rng.random_range(0..4)]);
            }
            Operand::S(s)
        }
    }
}
