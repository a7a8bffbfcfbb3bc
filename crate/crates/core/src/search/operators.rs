use super::select::{random_printable_char, GenerationFailure, SearchContext};
use super::RngStream;
use crate::lang::{CallableKind, CallableSig, TypeRef};
use crate::testcase::{PrimitiveValue, Statement, TestCase, TestSuite};

/// Where an inserted statement goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertPosition {
    Random,
    End,
}

/// Largest magnitude of an integer "change" delta.
pub const MAX_INT_DELTA: i64 = 20;
const INT_DELTA_CONTINUE: f64 = 0.75;

/// Inserts one random call (or a primitive, if the pool is empty) with all
/// inputs satisfied. The input test is left untouched.
pub fn insert_random_statement(
    t: &TestCase,
    policy: InsertPosition,
    ctx: &SearchContext,
    rng: &mut RngStream,
) -> Result<TestCase, GenerationFailure> {
    if t.len() >= ctx.cfg.max_test_length {
        return Err(GenerationFailure::Full);
    }
    let position = match policy {
        InsertPosition::Random => rng.below(t.len() + 1),
        InsertPosition::End => t.len(),
    };
    let mut out = t.clone();
    match rng.pick(&ctx.pool.entries) {
        Some(sig) => {
            ctx.generate_call(sig, &mut out, position, rng, 0)?;
        }
        None => {
            let ty = [TypeRef::Int, TypeRef::Float, TypeRef::Bool, TypeRef::Str][rng.below(4)].clone();
            let value = ctx.primitive(&ty, rng);
            out.insert(position, Statement::Primitive(value));
        }
    }
    Ok(out)
}

/// Draws r uniformly from [1, L] and inserts until the case has at least r
/// statements. Failed insertions are retried a bounded number of times.
pub fn sample_random_testcase(ctx: &SearchContext, rng: &mut RngStream) -> TestCase {
    let limit = ctx.cfg.max_test_length;
    let r = 1 + rng.below(limit);
    let mut t = TestCase::new();
    let mut attempts = 0;
    while t.len() < r && attempts < 10 * r {
        attempts += 1;
        if let Ok(next) = insert_random_statement(&t, InsertPosition::Random, ctx, rng) {
            t = next;
        }
    }
    t
}

/// Splits both parents at fraction `alpha`: the first child takes the head
/// of `p1` and the tail of `p2`, the second child the reverse.
pub fn crossover_at(p1: &TestSuite, p2: &TestSuite, alpha: f64) -> (TestSuite, TestSuite) {
    let cut1 = ((alpha * p1.len() as f64).ceil() as usize).min(p1.len());
    let cut2 = ((alpha * p2.len() as f64).ceil() as usize).min(p2.len());
    let join = |a: &[TestCase], b: &[TestCase]| TestSuite::new(a.iter().chain(b).cloned().collect());
    (
        join(&p1.tests[..cut1], &p2.tests[cut2..]),
        join(&p2.tests[..cut2], &p1.tests[cut1..]),
    )
}

pub fn crossover(p1: &TestSuite, p2: &TestSuite, rng: &mut RngStream) -> (TestSuite, TestSuite) {
    let alpha = rng.unit();
    crossover_at(p1, p2, alpha)
}

/// What one suite mutation did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteMutationTrace {
    /// One flag per original test: whether it was selected for mutation.
    pub mutated: Vec<bool>,
    pub removed_empty: usize,
    pub appended: usize,
}

/// Mutates each test with probability 1/|T|, drops emptied tests, then
/// appends fresh tests with probabilities σ, σ², ... while below N.
pub fn mutate_suite(s: &TestSuite, ctx: &SearchContext, rng: &mut RngStream) -> TestSuite {
    mutate_suite_traced(s, ctx, rng).0
}

pub fn mutate_suite_traced(
    s: &TestSuite,
    ctx: &SearchContext,
    rng: &mut RngStream,
) -> (TestSuite, SuiteMutationTrace) {
    let mut trace = SuiteMutationTrace::default();
    let mut tests = Vec::with_capacity(s.len() + 1);
    let p = if s.is_empty() { 0.0 } else { 1.0 / s.len() as f64 };
    for t in &s.tests {
        let chosen = rng.chance(p);
        trace.mutated.push(chosen);
        let t = if chosen { mutate_testcase(t, ctx, rng) } else { t.clone() };
        if t.is_empty() {
            trace.removed_empty += 1;
        } else {
            tests.push(t);
        }
    }
    let mut p = ctx.cfg.sigma;
    while tests.len() < ctx.cfg.max_suite_size && rng.chance(p) {
        let t = sample_random_testcase(ctx, rng);
        if !t.is_empty() {
            tests.push(t);
            trace.appended += 1;
        }
        p *= ctx.cfg.sigma;
    }
    (TestSuite::new(tests), trace)
}

/// Which of the three test-case mutations were applied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AppliedOps {
    pub remove: bool,
    pub change: bool,
    pub insert: bool,
}

pub fn mutate_testcase(t: &TestCase, ctx: &SearchContext, rng: &mut RngStream) -> TestCase {
    mutate_testcase_traced(t, ctx, rng).0
}

/// Applies remove, change and insert, each independently with
/// probability 1/3.
pub fn mutate_testcase_traced(t: &TestCase, ctx: &SearchContext, rng: &mut RngStream) -> (TestCase, AppliedOps) {
    let third = 1.0 / 3.0;
    let mut ops = AppliedOps::default();
    let mut out = t.clone();
    if rng.chance(third) {
        ops.remove = true;
        if !out.is_empty() {
            let i = rng.below(out.len());
            out.remove_cascade(i);
        }
    }
    if rng.chance(third) {
        ops.change = true;
        if !out.is_empty() {
            let i = rng.below(out.len());
            if let Ok(changed) = change_statement(&out, i, ctx, rng) {
                out = changed;
            }
        }
    }
    if rng.chance(third) {
        ops.insert = true;
        if let Ok(next) = insert_random_statement(&out, InsertPosition::Random, ctx, rng) {
            out = next;
        }
    }
    (out, ops)
}

/// Nonzero integer delta in [-20, 20] with a geometric tail.
pub fn int_delta(rng: &mut RngStream) -> i64 {
    let mut magnitude = 1;
    while magnitude < MAX_INT_DELTA && rng.chance(INT_DELTA_CONTINUE) {
        magnitude += 1;
    }
    if rng.chance(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

pub fn change_primitive(v: &PrimitiveValue, rng: &mut RngStream) -> PrimitiveValue {
    match v {
        PrimitiveValue::Int(i) => PrimitiveValue::Int(i.wrapping_add(int_delta(rng))),
        PrimitiveValue::Float(f) => {
            let delta = rng.normal();
            let next = f + delta;
            PrimitiveValue::Float(if next.is_finite() { next } else { f - delta })
        }
        PrimitiveValue::Bool(b) => PrimitiveValue::Bool(!b),
        PrimitiveValue::Str(s) => {
            let mut chars: Vec<char> = s.chars().collect();
            let op = if chars.is_empty() { 0 } else { rng.below(3) };
            match op {
                0 => {
                    let at = rng.below(chars.len() + 1);
                    chars.insert(at, random_printable_char(rng));
                }
                1 => {
                    let at = rng.below(chars.len());
                    chars[at] = random_printable_char(rng);
                }
                _ => {
                    let at = rng.below(chars.len());
                    chars.remove(at);
                }
            }
            PrimitiveValue::Str(chars.into_iter().collect())
        }
    }
}

fn signature_of<'p>(stmt: &Statement, ctx: &SearchContext<'p>) -> Option<&'p CallableSig> {
    match stmt {
        Statement::Primitive(_) => None,
        Statement::Constructor { class, .. } => ctx.pool.constructor(class),
        Statement::Function { name, .. } => ctx.pool.function(name),
        Statement::Method { owner, name, .. } => ctx.pool.method(owner, name),
    }
}

/// Callables that could stand in for `sig` without changing the type of
/// the defined variable.
fn compatible<'p>(sig: &CallableSig, ctx: &SearchContext<'p>) -> Vec<&'p CallableSig> {
    ctx.pool
        .entries
        .iter()
        .filter(|c| c.kind == sig.kind && c.owner == sig.owner && c.returns == sig.returns)
        .filter(|c| sig.kind != CallableKind::Constructor || c.name == sig.name)
        .collect()
}

/// Perturbs the statement at `index` in place: primitives get a new
/// value; calls get either a re-drawn callable or one re-drawn input.
pub fn change_statement(
    t: &TestCase,
    index: usize,
    ctx: &SearchContext,
    rng: &mut RngStream,
) -> Result<TestCase, GenerationFailure> {
    let mut out = t.clone();
    let stmt = &t.statements[index];
    if let Statement::Primitive(v) = stmt {
        out.replace(index, Statement::Primitive(change_primitive(v, rng)));
        return Ok(out);
    }
    let sig = signature_of(stmt, ctx).ok_or(GenerationFailure::NoCandidate)?;
    let slots = stmt.uses().len();
    if slots == 0 || rng.chance(0.5) {
        let alternatives = compatible(sig, ctx);
        let new_sig = *rng.pick(&alternatives).ok_or(GenerationFailure::NoCandidate)?;
        let mut position = index;
        let args = ctx.satisfy_params(new_sig, &mut out, &mut position, rng, 0)?;
        let replacement = match &out.statements[position] {
            Statement::Method { owner, receiver, .. } => Statement::Method {
                owner: owner.clone(),
                receiver: *receiver,
                name: new_sig.name.clone(),
                args,
            },
            Statement::Constructor { class, .. } => Statement::Constructor {
                class: class.clone(),
                args,
            },
            _ => Statement::Function {
                name: new_sig.name.clone(),
                args,
            },
        };
        out.replace(position, replacement);
        return Ok(out);
    }
    let slot = rng.below(slots);
    let declared = match stmt {
        Statement::Method { owner, .. } if slot == 0 => TypeRef::Class(owner.clone()),
        Statement::Method { .. } => sig.params[slot - 1].declared.clone(),
        _ => sig.params[slot].declared.clone(),
    };
    let s = ctx.select_input(&declared, &mut out, index, rng)?;
    let stmt = &mut out.statements[s.position];
    match stmt {
        Statement::Method { receiver, args, .. } => {
            if slot == 0 {
                *receiver = s.var;
            } else {
                args[slot - 1] = s.var;
            }
        }
        Statement::Constructor { args, .. } | Statement::Function { args, .. } => args[slot] = s.var,
        Statement::Primitive(_) => unreachable!("primitive handled above"),
    }
    Ok(out)
}
