use thiserror::Error;

use super::{RngStream, SearchConfig};
use crate::lang::{CallableKind, CallablePool, CallableSig, ConstantPool, TypeRef};
use crate::testcase::{inferred_type, PrimitiveValue, Statement, TestCase, VarRef};

/// Input selection could not satisfy a parameter; the caller discards the
/// partially modified test case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GenerationFailure {
    #[error("generator chain exceeded the recursion depth")]
    DepthExhausted,
    #[error("no candidate can supply the requested type")]
    NoCandidate,
    #[error("test case would exceed the length limit")]
    TooLong,
    #[error("test case is already at the length limit")]
    Full,
}

/// Range of random primitive draws.
pub const INT_RANGE: (i64, i64) = (-1024, 1024);
pub const FLOAT_RANGE: (f64, f64) = (-1024.0, 1024.0);
pub const MAX_RANDOM_STR_LEN: usize = 10;

const PRIMITIVES: [TypeRef; 4] = [TypeRef::Int, TypeRef::Float, TypeRef::Bool, TypeRef::Str];

/// Everything input selection reads: the pool in the active typing mode, the
/// constants for seeding, and the configuration.
#[derive(Debug, Clone, Copy)]
pub struct SearchContext<'a> {
    pub pool: &'a CallablePool,
    pub constants: &'a ConstantPool,
    pub cfg: &'a SearchConfig,
}

/// Variable chosen for a parameter and the shifted position of the
/// statement that will consume it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub var: VarRef,
    pub position: usize,
}

#[derive(Debug)]
enum Candidate<'p> {
    Existing(usize),
    Primitive(TypeRef),
    Call(&'p CallableSig),
}

pub fn random_printable_char(rng: &mut RngStream) -> char {
    char::from(rng.int_in(32, 126) as u8)
}

impl<'a> SearchContext<'a> {
    pub fn new(pool: &'a CallablePool, constants: &'a ConstantPool, cfg: &'a SearchConfig) -> Self {
        SearchContext { pool, constants, cfg }
    }

    /// A primitive of the given type, seeded from the constant pool with
    /// probability `constant_seeding_prob` when a matching constant exists.
    pub fn primitive(&self, ty: &TypeRef, rng: &mut RngStream) -> PrimitiveValue {
        let seed = rng.chance(self.cfg.constant_seeding_prob);
        match ty {
            TypeRef::Int => {
                let ints: Vec<i64> = self.constants.ints.iter().copied().collect();
                match (seed, rng.pick(&ints)) {
                    (true, Some(&v)) => PrimitiveValue::Int(v),
                    _ => PrimitiveValue::Int(rng.int_in(INT_RANGE.0, INT_RANGE.1)),
                }
            }
            TypeRef::Float => match (seed, rng.pick(&self.constants.floats)) {
                (true, Some(&v)) => PrimitiveValue::Float(v),
                _ => PrimitiveValue::Float(rng.float_in(FLOAT_RANGE.0, FLOAT_RANGE.1)),
            },
            TypeRef::Str => {
                let strings: Vec<&String> = self.constants.strings.iter().collect();
                match (seed, rng.pick(&strings)) {
                    (true, Some(s)) => PrimitiveValue::Str((*s).clone()),
                    _ => {
                        let n = rng.below(MAX_RANDOM_STR_LEN + 1);
                        PrimitiveValue::Str((0..n).map(|_| random_printable_char(rng)).collect())
                    }
                }
            }
            _ => PrimitiveValue::Bool(rng.chance(0.5)),
        }
    }

    fn candidates(&self, declared: &TypeRef, t: &TestCase, position: usize, rng: &mut RngStream) -> Vec<Candidate<'a>> {
        let target = match declared {
            TypeRef::Any => {
                let types = self.pool.types();
                rng.pick(&types).cloned().unwrap_or(TypeRef::Unknown)
            }
            other => other.clone(),
        };
        let mut out = Vec::new();
        if target == TypeRef::Unknown {
            out.extend((0..position).map(Candidate::Existing));
            out.extend(PRIMITIVES.iter().cloned().map(Candidate::Primitive));
            out.extend(self.pool.entries.iter().map(Candidate::Call));
            return out;
        }
        out.extend(
            (0..position)
                .filter(|&i| inferred_type(t, i, self.pool) == target)
                .map(Candidate::Existing),
        );
        if target.is_primitive() {
            out.push(Candidate::Primitive(target));
        } else {
            out.extend(
                self.pool
                    .entries
                    .iter()
                    .filter(|c| c.returns == target)
                    .map(Candidate::Call),
            );
        }
        out
    }

    /// Chooses or builds a value for a parameter of type `declared`, for a
    /// statement that will sit at `position`. New statements are inserted
    /// directly before `position`.
    pub fn select_input(
        &self,
        declared: &TypeRef,
        t: &mut TestCase,
        position: usize,
        rng: &mut RngStream,
    ) -> Result<Selection, GenerationFailure> {
        self.select_at_depth(declared, t, position, rng, 0)
    }

    fn select_at_depth(
        &self,
        declared: &TypeRef,
        t: &mut TestCase,
        position: usize,
        rng: &mut RngStream,
        depth: usize,
    ) -> Result<Selection, GenerationFailure> {
        if depth > self.cfg.max_recursion_depth {
            return Err(GenerationFailure::DepthExhausted);
        }
        let candidates = self.candidates(declared, t, position, rng);
        let Some(choice) = rng.pick(&candidates) else {
            return Err(GenerationFailure::NoCandidate);
        };
        match choice {
            Candidate::Existing(i) => Ok(Selection {
                var: VarRef(*i),
                position,
            }),
            Candidate::Primitive(ty) => {
                let value = self.primitive(ty, rng);
                self.place(t, position, Statement::Primitive(value))
            }
            Candidate::Call(sig) => self.generate_call(sig, t, position, rng, depth + 1),
        }
    }

    fn place(&self, t: &mut TestCase, position: usize, stmt: Statement) -> Result<Selection, GenerationFailure> {
        if t.len() >= self.cfg.max_test_length {
            return Err(GenerationFailure::TooLong);
        }
        let var = t.insert(position, stmt);
        Ok(Selection {
            var,
            position: position + 1,
        })
    }

    /// Inserts a call to `sig` before `position`, satisfying the receiver
    /// and every parameter first.
    pub fn generate_call(
        &self,
        sig: &CallableSig,
        t: &mut TestCase,
        position: usize,
        rng: &mut RngStream,
        depth: usize,
    ) -> Result<Selection, GenerationFailure> {
        let mut position = position;
        let receiver = match (&sig.kind, &sig.owner) {
            (CallableKind::Method, Some(owner)) => {
                let s = self.select_at_depth(&TypeRef::Class(owner.clone()), t, position, rng, depth)?;
                position = s.position;
                Some(s.var)
            }
            _ => None,
        };
        let args = self.satisfy_params(sig, t, &mut position, rng, depth)?;
        let stmt = match (&sig.kind, receiver) {
            (CallableKind::Constructor, _) => Statement::Constructor {
                class: sig.name.clone(),
                args,
            },
            (CallableKind::Function, _) => Statement::Function {
                name: sig.name.clone(),
                args,
            },
            (CallableKind::Method, Some(receiver)) => Statement::Method {
                owner: sig.owner.clone().unwrap_or_default(),
                receiver,
                name: sig.name.clone(),
                args,
            },
            (CallableKind::Method, None) => return Err(GenerationFailure::NoCandidate),
        };
        self.place(t, position, stmt)
    }

    /// Selects a value for every parameter of `sig`, advancing `position`
    /// past any inserted prefix statements.
    pub fn satisfy_params(
        &self,
        sig: &CallableSig,
        t: &mut TestCase,
        position: &mut usize,
        rng: &mut RngStream,
        depth: usize,
    ) -> Result<Vec<VarRef>, GenerationFailure> {
        let mut args = Vec::with_capacity(sig.params.len());
        for p in &sig.params {
            let s = self.select_at_depth(&p.declared, t, *position, rng, depth)?;
            *position = s.position;
            args.push(s.var);
        }
        Ok(args)
    }
}
