#![allow(dead_code)]

pub mod automata;
pub mod corpus;
pub mod oracle;

use rml_equiv::canonical::canonicalize;
use rml_equiv::compile_pstrict::compile_pstrict;
use rml_equiv::compile_rforml::{compile_rforml, tag_monitor};
use rml_equiv::family::{merge_family, AutomatonFamily, Encoding};
use rml_equiv::ndcma::{for_each_word, WordVisit, Wndcma};
use rml_equiv::rml_lang::{parse_context, parse_term, typecheck, TypeSequent};
use std::collections::BTreeSet;

pub fn family(src: &str, ctx: &str, k: u32, enc: Encoding) -> AutomatonFamily {
    let ctx = parse_context(ctx).unwrap();
    let t = typecheck(&parse_term(src).unwrap(), &ctx, k).unwrap();
    let seq = TypeSequent::new(ctx, t.ty.clone().unwrap());
    let c = canonicalize(&t).unwrap();
    match enc {
        Encoding::PStrict => compile_pstrict(&c, &seq, k),
        Encoding::RForml => compile_rforml(&c, &seq, k),
    }
    .unwrap_or_else(|e| panic!("{}: {}", src, e))
}

pub fn automaton(src: &str, ctx: &str, k: u32, enc: Encoding) -> Wndcma {
    tag_monitor(&merge_family(&family(src, ctx, k, enc)))
}

pub fn accepted(a: &Wndcma, max_len: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for_each_word(&a.alphabet, a.level, max_len, &[a], |w, m| {
        if m[0] {
            out.insert(w.to_string());
        }
        WordVisit::Continue
    });
    out
}
