use serde::{Deserialize, Serialize};

use super::value::{contains, numeric_difference, order, values_equal, values_identical, Value};
use crate::bytecode::Polarity;
use crate::lang::ast::CmpOp;

/// Parameters of the branch distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceConfig {
    /// Penalty constant; must be positive.
    pub k: f64,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        DistanceConfig { k: 1.0 }
    }
}

/// Edit distance with unit-cost insertions, deletions and substitutions,
/// over Unicode scalar values.
pub fn levenshtein(x: &str, y: &str) -> usize {
    let target: Vec<char> = y.chars().collect();
    if x.is_empty() {
        return target.len();
    }
    let mut row: Vec<usize> = (0..=target.len()).collect();
    for (i, cx) in x.chars().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cy) in target.iter().enumerate() {
            let substitute = diag + usize::from(cx != *cy);
            diag = row[j + 1];
            row[j + 1] = substitute.min(row[j] + 1).min(diag + 1);
        }
    }
    row[target.len()]
}

/// Whether `a op b` holds. Operand combinations that raise a `TypeError` at
/// run time count as not holding.
pub fn comparison_holds(op: CmpOp, a: &Value, b: &Value) -> bool {
    use std::cmp::Ordering::*;
    match op {
        CmpOp::Eq => values_equal(a, b),
        CmpOp::Ne => !values_equal(a, b),
        CmpOp::Lt => matches!(order(a, b), Ok(Some(Less))),
        CmpOp::Le => matches!(order(a, b), Ok(Some(Less | Equal))),
        CmpOp::Gt => matches!(order(a, b), Ok(Some(Greater))),
        CmpOp::Ge => matches!(order(a, b), Ok(Some(Greater | Equal))),
        CmpOp::In => contains(a, b) == Ok(true),
        CmpOp::NotIn => contains(a, b) == Ok(false),
        CmpOp::Is => values_identical(a, b),
        CmpOp::IsNot => !values_identical(a, b),
    }
}

fn less_distance(a: &Value, b: &Value, k: f64, or_equal: bool) -> f64 {
    let op = if or_equal { CmpOp::Le } else { CmpOp::Lt };
    if comparison_holds(op, a, b) {
        return 0.0;
    }
    match (a.as_num(), b.as_num()) {
        (Some(x), Some(y)) => numeric_difference(x, y) + k,
        _ => f64::INFINITY,
    }
}

fn true_branch_distance(op: CmpOp, a: &Value, b: &Value, k: f64) -> f64 {
    match op {
        CmpOp::Eq => {
            if values_equal(a, b) {
                0.0
            } else if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
                numeric_difference(x, y).abs()
            } else if let (Some(x), Some(y)) = (a.as_str(), b.as_str()) {
                levenshtein(x, y) as f64
            } else {
                f64::INFINITY
            }
        }
        CmpOp::Lt => less_distance(a, b, k, false),
        CmpOp::Le => less_distance(a, b, k, true),
        CmpOp::Gt => less_distance(b, a, k, false),
        CmpOp::Ge => less_distance(b, a, k, true),
        CmpOp::Ne | CmpOp::In | CmpOp::NotIn | CmpOp::Is | CmpOp::IsNot => {
            if comparison_holds(op, a, b) {
                0.0
            } else {
                k
            }
        }
    }
}

/// Distance of `a op b` from taking the given branch. The false branch uses
/// the complementary operator. `f64::INFINITY` marks incomparable operands.
///
/// A NaN operand makes every ordering false, so the complement would deny
/// the branch that actually runs; the false branch is taken outright then.
pub fn branch_distance(op: CmpOp, a: &Value, b: &Value, polarity: Polarity, cfg: &DistanceConfig) -> f64 {
    let ordering = matches!(op, CmpOp::Lt | CmpOp::Le | CmpOp::Gt | CmpOp::Ge);
    if polarity == Polarity::False && ordering && order(a, b) == Ok(None) {
        return 0.0;
    }
    let op = match polarity {
        Polarity::True => op,
        Polarity::False => op.complement(),
    };
    let d = true_branch_distance(op, a, b, cfg.k);
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

/// Distance for a unary (truthiness) predicate.
pub fn truthiness_distance(v: &Value, polarity: Polarity, cfg: &DistanceConfig) -> f64 {
    let wanted = polarity == Polarity::True;
    if v.truthy() == wanted {
        0.0
    } else {
        cfg.k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bytecode::Polarity::{False, True};

    const K1: DistanceConfig = DistanceConfig { k: 1.0 };

    #[test]
    fn spec_examples() {
        assert_eq!(branch_distance(CmpOp::Eq, &Value::Int(7), &Value::Int(7), True, &K1), 0.0);
        assert_eq!(branch_distance(CmpOp::Eq, &Value::Int(5), &Value::Int(9), True, &K1), 4.0);
        assert_eq!(
            branch_distance(CmpOp::Eq, &Value::str("abc"), &Value::str("abd"), True, &K1),
            1.0
        );
        assert_eq!(branch_distance(CmpOp::Lt, &Value::Int(5), &Value::Int(3), True, &K1), 3.0);
        assert_eq!(
            branch_distance(CmpOp::Eq, &Value::Int(5), &Value::str("a"), True, &K1),
            f64::INFINITY
        );
        assert_eq!(
            branch_distance(CmpOp::In, &Value::str("b"), &Value::str("abc"), False, &K1),
            1.0
        );
    }

    #[test]
    fn truthiness() {
        assert_eq!(truthiness_distance(&Value::Int(0), True, &K1), 1.0);
        assert_eq!(truthiness_distance(&Value::str("x"), True, &K1), 0.0);
        assert_eq!(truthiness_distance(&Value::None, False, &K1), 0.0);
        let k = DistanceConfig { k: 2.5 };
        assert_eq!(truthiness_distance(&Value::Float(0.0), True, &k), 2.5);
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("a", "a"), 0);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("été", "ete"), 2);
    }

    #[test]
    fn mixed_numeric_kinds() {
        assert_eq!(branch_distance(CmpOp::Eq, &Value::Int(1), &Value::Bool(true), True, &K1), 0.0);
        assert_eq!(branch_distance(CmpOp::Eq, &Value::Float(2.5), &Value::Int(1), True, &K1), 1.5);
        assert_eq!(
            branch_distance(CmpOp::Le, &Value::Int(i64::MAX), &Value::Int(i64::MIN), True, &K1),
            (i64::MAX as i128 - i64::MIN as i128) as f64 + 1.0
        );
    }

    #[test]
    fn string_ordering_has_no_gradient() {
        assert_eq!(branch_distance(CmpOp::Lt, &Value::str("a"), &Value::str("b"), True, &K1), 0.0);
        assert_eq!(
            branch_distance(CmpOp::Lt, &Value::str("b"), &Value::str("a"), True, &K1),
            f64::INFINITY
        );
    }

    #[test]
    fn nan_orderings_take_the_false_branch() {
        let nan = Value::Float(f64::NAN);
        for op in [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge] {
            assert_eq!(branch_distance(op, &nan, &Value::Int(1), True, &K1), f64::INFINITY);
            assert_eq!(branch_distance(op, &nan, &Value::Int(1), False, &K1), 0.0);
        }
        assert_eq!(branch_distance(CmpOp::Eq, &nan, &nan, False, &K1), 0.0);
    }
}
