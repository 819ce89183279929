//! Finitary RML: types, abstract syntax, parsing, type checking and
//! fragment classification.
//!
//! Integers range over `{0..k-1}` for a run-wide modulus `k` and
//! `succ`/`pred` wrap around.

mod classify;
mod parse;
mod typecheck;

pub use classify::{classify, pstrict_shape, FragmentClass, UndecidableReason};
pub use parse::{parse_context, parse_term, parse_type};
pub use typecheck::typecheck;

use serde::Serialize;
use std::fmt;

/// Default integer modulus.
pub const DEFAULT_K: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RmlType {
    Unit,
    Int,
    IntRef,
    Arrow(Box<RmlType>, Box<RmlType>),
}

impl RmlType {
    pub fn arrow(a: RmlType, b: RmlType) -> RmlType {
        RmlType::Arrow(Box::new(a), Box::new(b))
    }

    /// Builds `a1 -> a2 -> ... -> res`.
    pub fn curried(args: &[RmlType], res: RmlType) -> RmlType {
        args.iter()
            .rev()
            .fold(res, |acc, a| RmlType::arrow(a.clone(), acc))
    }

    pub fn order(&self) -> u32 {
        match self {
            RmlType::Unit | RmlType::Int => 0,
            RmlType::IntRef => 1,
            RmlType::Arrow(a, b) => (a.order() + 1).max(b.order()),
        }
    }

    pub fn arity(&self) -> u32 {
        match self {
            RmlType::Unit | RmlType::Int => 0,
            RmlType::IntRef => 1,
            RmlType::Arrow(_, b) => b.arity() + 1,
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self, RmlType::Unit | RmlType::Int)
    }

    /// Splits `a1 -> ... -> an -> r` into its argument list and final result.
    pub fn uncurry(&self) -> (Vec<&RmlType>, &RmlType) {
        let mut args = Vec::new();
        let mut t = self;
        while let RmlType::Arrow(a, b) = t {
            args.push(a.as_ref());
            t = b;
        }
        (args, t)
    }

    /// Number of syntax nodes, used to bound generated types in tests.
    pub fn size(&self) -> usize {
        match self {
            RmlType::Arrow(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }
}

impl fmt::Display for RmlType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RmlType::Unit => write!(f, "unit"),
            RmlType::Int => write!(f, "int"),
            RmlType::IntRef => write!(f, "intref"),
            RmlType::Arrow(a, b) => {
                if matches!(**a, RmlType::Arrow(..)) {
                    write!(f, "({}) -> {}", a, b)
                } else {
                    write!(f, "{} -> {}", a, b)
                }
            }
        }
    }
}

/// Source position, 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TermKind {
    Unit,
    Int(u32),
    Var(String),
    Succ(Box<Term>),
    Pred(Box<Term>),
    If(Box<Term>, Box<Term>, Box<Term>),
    Deref(Box<Term>),
    Assign(Box<Term>, Box<Term>),
    Ref(Box<Term>),
    App(Box<Term>, Box<Term>),
    Lam(String, RmlType, Box<Term>),
    While(Box<Term>, Box<Term>),
    Mkvar(Box<Term>, Box<Term>),
    Omega,
    // sugar, gone after type checking
    Let(String, Box<Term>, Box<Term>),
    Seq(Box<Term>, Box<Term>),
    Eq(Box<Term>, Box<Term>),
}

/// A term node. `ty` is filled in by [`typecheck`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
    pub ty: Option<RmlType>,
}

impl Term {
    pub fn new(kind: TermKind) -> Term {
        Term {
            kind,
            span: Span::default(),
            ty: None,
        }
    }

    pub fn at(kind: TermKind, span: Span) -> Term {
        Term {
            kind,
            span,
            ty: None,
        }
    }

    pub fn typed(kind: TermKind, ty: RmlType) -> Term {
        Term {
            kind,
            span: Span::default(),
            ty: Some(ty),
        }
    }

    /// Copy with every span reset, for structural comparison.
    pub fn without_spans(&self) -> Term {
        let mut t = self.clone();
        t.map_children(&mut |c| *c = c.without_spans());
        t.span = Span::default();
        t
    }

    /// Applies `f` to each direct child.
    pub fn map_children(&mut self, f: &mut dyn FnMut(&mut Term)) {
        use TermKind::*;
        match &mut self.kind {
            Unit | Int(_) | Var(_) | Omega => {}
            Succ(a) | Pred(a) | Deref(a) | Ref(a) | Lam(_, _, a) => f(a),
            Assign(a, b) | App(a, b) | While(a, b) | Mkvar(a, b) | Let(_, a, b) | Seq(a, b)
            | Eq(a, b) => {
                f(a);
                f(b)
            }
            If(a, b, c) => {
                f(a);
                f(b);
                f(c)
            }
        }
    }

    /// True when no sugar node remains anywhere in the tree.
    pub fn is_desugared(&self) -> bool {
        use TermKind::*;
        match &self.kind {
            Let(..) | Seq(..) | Eq(..) | Omega => false,
            Unit | Int(_) | Var(_) => true,
            Succ(a) | Pred(a) | Deref(a) | Ref(a) | Lam(_, _, a) => a.is_desugared(),
            Assign(a, b) | App(a, b) | While(a, b) | Mkvar(a, b) => {
                a.is_desugared() && b.is_desugared()
            }
            If(a, b, c) => a.is_desugared() && b.is_desugared() && c.is_desugared(),
        }
    }

    /// True when every node carries a type.
    pub fn is_fully_typed(&self) -> bool {
        use TermKind::*;
        if self.ty.is_none() {
            return false;
        }
        match &self.kind {
            Unit | Int(_) | Var(_) | Omega => true,
            Succ(a) | Pred(a) | Deref(a) | Ref(a) | Lam(_, _, a) => a.is_fully_typed(),
            Assign(a, b) | App(a, b) | While(a, b) | Mkvar(a, b) | Let(_, a, b) | Seq(a, b)
            | Eq(a, b) => a.is_fully_typed() && b.is_fully_typed(),
            If(a, b, c) => a.is_fully_typed() && b.is_fully_typed() && c.is_fully_typed(),
        }
    }
}

/// Typing context entry.
pub type Binding = (String, RmlType);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeSequent {
    pub context: Vec<Binding>,
    pub subject: RmlType,
}

impl TypeSequent {
    pub fn new(context: Vec<Binding>, subject: RmlType) -> TypeSequent {
        TypeSequent { context, subject }
    }

    pub fn closed(subject: RmlType) -> TypeSequent {
        TypeSequent {
            context: Vec::new(),
            subject,
        }
    }

    pub fn names_distinct(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.context.iter().all(|(n, _)| seen.insert(n.as_str()))
    }
}

impl fmt::Display for TypeSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx: Vec<String> = self
            .context
            .iter()
            .map(|(n, t)| format!("{}: {}", n, t))
            .collect();
        write!(f, "{} |- {}", ctx.join(", "), self.subject)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LangError {
    #[error("syntax error at {span}: {msg}")]
    Syntax { span: Span, msg: String },
    #[error("unbound variable `{name}` at {span}")]
    Unbound { name: String, span: Span },
    #[error("type mismatch at {span}: {msg}")]
    Mismatch { span: Span, msg: String },
    #[error("integer literal {value} at {span} is not below the modulus {k}")]
    LiteralRange { value: u32, k: u32, span: Span },
    #[error("duplicate context variable `{0}`")]
    DuplicateContext(String),
}
