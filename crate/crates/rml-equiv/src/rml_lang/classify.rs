//! Type-level classification of sequents into the decidable fragments, the
//! known-undecidable shapes, and the remainder.

use super::{RmlType, TypeSequent};
use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UndecidableReason {
    ThirdOrder,
    TwoFirstOrderArgs,
    NonFinalFirstOrderArg,
    LhsFourthOrder,
}

impl UndecidableReason {
    pub fn describe(self) -> &'static str {
        match self {
            UndecidableReason::ThirdOrder => "third-order type",
            UndecidableReason::TwoFirstOrderArgs => "two first-order arguments",
            UndecidableReason::NonFinalFirstOrderArg => "non-final first-order argument",
            UndecidableReason::LhsFourthOrder => "fourth-order context type",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FragmentClass {
    pub in_pstrict: bool,
    pub in_rforml: bool,
    pub undecidable_reason: Option<UndecidableReason>,
    pub unknown: bool,
}

impl fmt::Display for FragmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.undecidable_reason {
            return write!(f, "undecidable: {}", r.describe());
        }
        if self.unknown {
            return write!(f, "unknown: outside both decidable fragments");
        }
        match (self.in_pstrict, self.in_rforml) {
            (true, true) => write!(f, "decidable: P-strict and RML01"),
            (true, false) => write!(f, "decidable: P-strict"),
            _ => write!(f, "decidable: RML01"),
        }
    }
}

fn is_ground(t: &RmlType) -> bool {
    t.is_base()
}

/// `β | β -> first_order | intref`
fn is_first_order_subject(t: &RmlType) -> bool {
    match t {
        RmlType::Unit | RmlType::Int | RmlType::IntRef => true,
        RmlType::Arrow(a, b) => is_ground(a) && is_first_order_subject(b),
    }
}

/// Context types for the P-strict fragment: `β | first_order -> β | intref`.
fn is_pstrict_context(t: &RmlType) -> bool {
    match t {
        RmlType::Unit | RmlType::Int | RmlType::IntRef => true,
        RmlType::Arrow(a, b) => is_first_order_subject(a) && is_ground(b),
    }
}

/// `β | β -> β | intref`
fn is_unary_arg(t: &RmlType) -> bool {
    match t {
        RmlType::Unit | RmlType::Int | RmlType::IntRef => true,
        RmlType::Arrow(a, b) => is_ground(a) && is_ground(b),
    }
}

/// Context types for RML01: a first-order type, or arrows whose arguments
/// each have arity at most one.
fn is_rforml_context(t: &RmlType) -> bool {
    if is_first_order_subject(t) {
        return true;
    }
    match t {
        RmlType::Arrow(a, b) => is_unary_arg(a) && is_rforml_context(b),
        _ => false,
    }
}

fn is_first_order_arrow(t: &RmlType) -> bool {
    matches!(t, RmlType::Arrow(..)) && t.order() == 1
}

/// Reason why equivalence at `⊢ t` is undecidable, if one is known.
fn subject_reason(t: &RmlType) -> Option<UndecidableReason> {
    match t.order() {
        0 | 1 => None,
        2 => {
            let (args, _) = t.uncurry();
            let fo: Vec<usize> = args
                .iter()
                .enumerate()
                .filter(|(_, a)| is_first_order_arrow(a))
                .map(|(i, _)| i)
                .collect();
            if fo.len() >= 2 {
                Some(UndecidableReason::TwoFirstOrderArgs)
            } else if fo.len() == 1 && fo[0] + 1 != args.len() {
                Some(UndecidableReason::NonFinalFirstOrderArg)
            } else {
                None
            }
        }
        _ => Some(UndecidableReason::ThirdOrder),
    }
}

/// A context variable of type `... -> a -> ...` lets a context feed a term of
/// type `a` to it, so any undecidable argument type transfers to the left.
fn context_reason(t: &RmlType) -> Option<UndecidableReason> {
    if t.order() >= 4 {
        return Some(UndecidableReason::LhsFourthOrder);
    }
    let (args, _) = t.uncurry();
    args.into_iter().find_map(subject_reason)
}

fn pstrict_component(t: &RmlType) -> bool {
    t.order() <= 2 && t.arity() <= 1
}

/// Type-level characterisation of sequents whose prearena is P-strict: every
/// context type and every argument of the subject has order at most two and
/// arity at most one. This is wider than the P-strict fragment, which further
/// requires a first-order subject.
pub fn pstrict_shape(seq: &TypeSequent) -> bool {
    let (args, _) = seq.subject.uncurry();
    seq.context.iter().all(|(_, t)| pstrict_component(t))
        && args.into_iter().all(pstrict_component)
}

pub fn classify(seq: &TypeSequent) -> FragmentClass {
    let subject_fo = is_first_order_subject(&seq.subject);
    let in_pstrict = subject_fo && seq.context.iter().all(|(_, t)| is_pstrict_context(t));
    let in_rforml = subject_fo && seq.context.iter().all(|(_, t)| is_rforml_context(t));
    let undecidable_reason = subject_reason(&seq.subject)
        .or_else(|| seq.context.iter().find_map(|(_, t)| context_reason(t)));
    let unknown = !in_pstrict && !in_rforml && undecidable_reason.is_none();
    FragmentClass {
        in_pstrict,
        in_rforml,
        undecidable_reason,
        unknown,
    }
}
