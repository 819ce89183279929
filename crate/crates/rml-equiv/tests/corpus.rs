mod common;

use common::corpus::{PAIRS, TERMS};
use rml_equiv::arena::{prearena_of_sequent, Kind, Owner};
use rml_equiv::equiv::{bounded_language_equal, compile, decide, decode_tagging, decode_word, DecideOptions, Judgement, Verdict};
use rml_equiv::family::{check_invariants, cleanup, Encoding};
use rml_equiv::ndcma::{for_each_word, DataWord, WordVisit, Wndcma};
use rml_equiv::rml_lang::classify;

const WORD_LEN: usize = 8;

fn encodings(j: &Judgement) -> Vec<Encoding> {
    let class = classify(&j.sequent);
    let mut out = Vec::new();
    if class.in_pstrict {
        out.push(Encoding::PStrict);
    }
    if class.in_rforml {
        out.push(Encoding::RForml);
    }
    out
}

fn accepted(a: &Wndcma, max_len: usize) -> Vec<DataWord> {
    let mut out = Vec::new();
    for_each_word(&a.alphabet, a.level, max_len, &[a], |w, m| {
        if m[0] {
            out.push(w.clone());
        }
        WordVisit::Continue
    });
    out
}

/// At most one `!src` and one `!tgt`, both or neither, source first.
fn tags_well_placed(w: &DataWord) -> bool {
    let at = |t: &str| -> Vec<usize> { (0..w.len()).filter(|&i| w.letters[i].0.ends_with(t)).collect() };
    match (at("!src").as_slice(), at("!tgt").as_slice()) {
        ([], []) => true,
        ([s], [t]) => s < t,
        _ => false,
    }
}

#[test]
fn members_pass_the_syntactic_checks() {
    for (src, ctx, k) in TERMS {
        let j = Judgement::parse(src, ctx, *k).unwrap();
        let encs = encodings(&j);
        assert!(!encs.is_empty(), "{}", src);
        for enc in encs {
            let fam = match enc {
                Encoding::PStrict => rml_equiv::compile_pstrict::compile_pstrict,
                Encoding::RForml => rml_equiv::compile_rforml::compile_rforml,
            }(&rml_equiv::canonical::canonicalize(&j.term).unwrap(), &j.sequent, *k)
            .unwrap();
            for (init, report) in fam.invariants() {
                assert!(report.all(), "{} [{}] {}: {:?}", src, enc, init, report);
            }
            let a = compile(&j, enc).unwrap();
            let report = check_invariants(&a);
            assert!(report.deterministic && report.level_discipline, "{} [{}]: {:?}", src, enc, report);
        }
    }
}

#[test]
fn cleanup_keeps_the_language() {
    for (src, ctx, k) in TERMS {
        let j = Judgement::parse(src, ctx, *k).unwrap();
        for enc in encodings(&j) {
            let a = compile(&j, enc).unwrap();
            assert_eq!(bounded_language_equal(&a, &cleanup(&a), WORD_LEN), Ok(None), "{} [{}]", src, enc);
        }
    }
}

#[test]
fn accepted_words_decode_to_complete_plays() {
    for (src, ctx, k) in TERMS {
        let j = Judgement::parse(src, ctx, *k).unwrap();
        let pre = prearena_of_sequent(&j.sequent, *k);
        for enc in encodings(&j) {
            let a = compile(&j, enc).unwrap();
            for w in accepted(&a, WORD_LEN) {
                let play = match enc {
                    Encoding::PStrict => decode_word(&pre, &w, enc),
                    Encoding::RForml => {
                        assert!(tags_well_placed(&w), "{} [{}]: {}", src, enc, w);
                        decode_tagging(&pre, &|v: &DataWord| a.accepts(v), &w)
                    }
                }
                .unwrap_or_else(|e| panic!("{} [{}]: {}: {}", src, enc, w, e));
                assert!(play.is_complete(), "{} [{}]: {}", src, enc, w);
                for (i, m) in play.moves.iter().enumerate().skip(1) {
                    let prev = &play.moves[i - 1];
                    if prev.owner == Owner::P && prev.kind == Kind::Q {
                        assert_eq!(m.justifier, Some(i - 1), "{} [{}]: O leaves the call at {} in {}", src, enc, i, w);
                    }
                }
            }
        }
    }
}

#[test]
fn pairs_get_their_verdicts() {
    let opts = DecideOptions::default();
    for (l, r, ctx, k, equivalent) in PAIRS {
        let m = Judgement::parse(l, ctx, *k).unwrap();
        let n = Judgement::parse(r, ctx, *k).unwrap();
        let verdict = decide(&m, &n, &opts).unwrap();
        match (&verdict, equivalent) {
            (Verdict::Equivalent, true) => {}
            (Verdict::Inequivalent { witness, play, left_accepts }, false) => {
                let enc = rml_equiv::equiv::choose_encoding(&m.sequent, None).unwrap();
                let a = compile(&m, enc).unwrap();
                let b = compile(&n, enc).unwrap();
                assert_eq!(a.accepts(witness), *left_accepts, "{} / {}: {}", l, r, witness);
                assert_eq!(b.accepts(witness), !*left_accepts, "{} / {}: {}", l, r, witness);
                assert!(play.is_complete(), "{} / {}:\n{}", l, r, play);
            }
            _ => panic!("{} / {}: {:?}", l, r, verdict),
        }
        let back = decide(&n, &m, &opts).unwrap();
        assert_eq!(matches!(back, Verdict::Equivalent), *equivalent, "{} / {} reversed", l, r);
        assert_eq!(decide(&m, &m, &opts).unwrap(), Verdict::Equivalent, "{}", l);
    }
}

#[test]
fn pairs_agree_with_bounded_comparison() {
    for (l, r, ctx, k, equivalent) in PAIRS {
        let m = Judgement::parse(l, ctx, *k).unwrap();
        let n = Judgement::parse(r, ctx, *k).unwrap();
        for enc in encodings(&m) {
            let diff = bounded_language_equal(&compile(&m, enc).unwrap(), &compile(&n, enc).unwrap(), WORD_LEN).unwrap();
            if *equivalent {
                assert_eq!(diff, None, "{} / {} [{}]", l, r, enc);
            } else if diff.is_none() {
                let opts = DecideOptions { fragment: Some(enc), ..DecideOptions::default() };
                match decide(&m, &n, &opts).unwrap() {
                    Verdict::Inequivalent { witness, .. } => assert!(witness.len() > WORD_LEN, "{} / {} [{}]", l, r, enc),
                    v => panic!("{} / {} [{}]: {:?}", l, r, enc, v),
                }
            }
        }
    }
}
