//! Compilation of the P-strict fragment.
//!
//! Data values encode justification pointers directly: answers reuse the
//! value of their question, questions take a fresh child of the value of
//! their justifier. Moves of the context therefore sit one level below the
//! root, and the threads of a `λ` or `mkvar` share the root with the host.

use crate::arena::{Base, Move, Step};
use crate::canonical::CanonicalTerm;
use crate::construct::threads::{embed, write_through};
use crate::construct::{cell_answer, values, ArgShape, Auto, Cx, Lt, INIT};
pub use crate::family::{AutomatonFamily, CompileError};
use crate::family::{compile_family, Encoding};
use crate::rml_lang::{RmlType, TypeSequent};

pub fn compile_pstrict(t: &CanonicalTerm, seq: &TypeSequent, k: u32) -> Result<AutomatonFamily, CompileError> {
    compile_family(t, seq, k, Encoding::PStrict)
}

/// `z` applied to a `λ` or `mkvar` argument, evaluated for its base result.
/// The argument's threads run below the call `z.arg`.
pub(crate) fn call_with_threads(
    cx: &mut Cx,
    z: &str,
    openers: Vec<(Lt, Auto)>,
    shape: ArgShape,
    xty: &RmlType,
) -> Result<Auto, CompileError> {
    let mut a = Auto::new("p1");
    let s2 = a.state("p2");
    let s3 = a.state("p3");
    a.add(a.init, INIT, vec![None], s2, vec![s2])?;
    let call = cx.letters.mv(Move::var(z, vec![Step::Arg], Base::Unit));
    a.add(s2, call, vec![Some(s2), None], s3, vec![s2, s3])?;
    let zname = z.to_string();
    let relabel = move |m: &Move| match shape {
        ArgShape::Fun => Move::var(&zname, [vec![Step::Arg, Step::Res], m.path.clone()].concat(), m.base),
        ArgShape::Cell => cell_answer(&Move::var(&zname, vec![], m.base), &[Step::Arg]),
    };
    let mut thread_finals = Vec::new();
    for (i, (open, m)) in openers.into_iter().enumerate() {
        let m = write_through(cx, &m)?;
        thread_finals.extend(embed(cx, &mut a, &[s2, s3], Some(s2), open, &m, &relabel, &format!("T{}.", i))?);
    }
    for r in values(xty, cx.k) {
        let tag = match r {
            Base::Int(j) => j.to_string(),
            _ => "u".into(),
        };
        let s4 = a.state(format!("p4{}", tag));
        let s5 = a.state(format!("p5{}", tag));
        let ret = cx.letters.mv(Move::var(z, vec![Step::Res], r));
        let ans = cx.letters.mv(Move::rhs(vec![], r));
        a.add(s3, ret, vec![Some(s2), Some(s3)], s4, vec![s2, s4])?;
        a.add(s4, ans, vec![Some(s2)], s5, vec![s5])?;
        a.finals.insert(s5);
    }
    let mut sources = vec![s3];
    sources.extend(&thread_finals);
    a.close_uniform(&sources, &thread_finals)?;
    a.trim();
    Ok(a)
}
