//! Builtin predicates and integer arithmetic.

use thiserror::Error;

use crate::terms::{Cell, CellView, Store};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Unify,
    Identical,
    NotIdentical,
    Is,
    Less,
    Greater,
    LessEq,
    GreaterEq,
    ArithEq,
    ArithNe,
    Between,
    True,
    Fail,
    /// `','/2` reached as a goal at run time.
    Conj,
}

impl Builtin {
    pub const TABLE: [(&'static str, usize, Builtin); 14] = [
        ("=", 2, Builtin::Unify),
        ("==", 2, Builtin::Identical),
        ("\\==", 2, Builtin::NotIdentical),
        ("is", 2, Builtin::Is),
        ("<", 2, Builtin::Less),
        (">", 2, Builtin::Greater),
        ("=<", 2, Builtin::LessEq),
        (">=", 2, Builtin::GreaterEq),
        ("=:=", 2, Builtin::ArithEq),
        ("=\\=", 2, Builtin::ArithNe),
        ("between", 3, Builtin::Between),
        ("true", 0, Builtin::True),
        ("fail", 0, Builtin::Fail),
        (",", 2, Builtin::Conj),
    ];

    pub fn lookup(name: &str, arity: usize) -> Option<Builtin> {
        Builtin::TABLE.iter().find(|(n, a, _)| *n == name && *a == arity).map(|&(_, _, b)| b)
    }

    /// Applies an arithmetic comparison to evaluated operands.
    pub fn compare(self, a: i64, b: i64) -> bool {
        match self {
            Builtin::Less => a < b,
            Builtin::Greater => a > b,
            Builtin::LessEq => a <= b,
            Builtin::GreaterEq => a >= b,
            Builtin::ArithEq => a == b,
            Builtin::ArithNe => a != b,
            other => panic!("{other:?} is not a comparison"),
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            Builtin::Less
                | Builtin::Greater
                | Builtin::LessEq
                | Builtin::GreaterEq
                | Builtin::ArithEq
                | Builtin::ArithNe
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("instantiation error: arithmetic on an unbound variable")]
    Instantiation,
    #[error("type error: expected {expected}, found {culprit}")]
    Type { expected: &'static str, culprit: String },
    #[error("evaluation error: integer overflow")]
    Overflow,
}

fn type_error(store: &Store, expected: &'static str, t: Cell) -> EvalError {
    EvalError::Type { expected, culprit: store.show(t) }
}

/// Evaluates an integer expression over `+ - * min max` and unary minus.
pub fn eval(store: &Store, t: Cell) -> Result<i64, EvalError> {
    let t = store.deref(t);
    match t.view() {
        CellView::Int(v) => Ok(v),
        CellView::Ref(_) => Err(EvalError::Instantiation),
        CellView::Struct(p) => {
            let CellView::Functor(sym) = store.get(p).view() else {
                return Err(type_error(store, "evaluable", t));
            };
            let name = store.symbols.name(sym);
            match store.symbols.arity(sym) {
                1 if name == "-" => eval(store, store.get(p.offset(1)))?.checked_neg().ok_or(EvalError::Overflow),
                2 => {
                    let a = eval(store, store.get(p.offset(1)))?;
                    let b = eval(store, store.get(p.offset(2)))?;
                    match name {
                        "+" => a.checked_add(b).ok_or(EvalError::Overflow),
                        "-" => a.checked_sub(b).ok_or(EvalError::Overflow),
                        "*" => a.checked_mul(b).ok_or(EvalError::Overflow),
                        "min" => Ok(a.min(b)),
                        "max" => Ok(a.max(b)),
                        _ => Err(type_error(store, "evaluable", t)),
                    }
                }
                _ => Err(type_error(store, "evaluable", t)),
            }
        }
        _ => Err(type_error(store, "evaluable", t)),
    }
}

/// An integer argument that must already be bound (`between/3` bounds).
pub fn int_arg(store: &Store, t: Cell) -> Result<i64, EvalError> {
    let t = store.deref(t);
    match t.view() {
        CellView::Int(v) => Ok(v),
        CellView::Ref(_) => Err(EvalError::Instantiation),
        _ => Err(type_error(store, "integer", t)),
    }
}
