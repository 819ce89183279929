//! Deciding equivalence of two terms in the same context, and turning
//! separating words back into plays.

use crate::arena::{prearena_of_sequent, Component, Kind, Owner, Prearena};
use crate::canonical::{canonicalize, CanonError};
use crate::compile_pstrict::compile_pstrict;
use crate::compile_rforml::{compile_rforml, tag_monitor};
use crate::coverability::{find_witness, is_empty_with_budget, DEFAULT_BUDGET};
use crate::family::{merge_family, CompileError, Encoding};
use crate::ndcma::{complement, for_each_word, intersect, DataWord, NdcmaError, WordVisit, Wndcma};
use crate::rml_lang::{
    classify, parse_context, parse_term, typecheck, Binding, LangError, Term, TypeSequent, UndecidableReason,
};
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EquivError {
    #[error("not in a decidable fragment: {detail}")]
    NotDecidableFragment { reason: Option<UndecidableReason>, detail: String },
    #[error("the terms live in different sequents: {0} and {1}")]
    SequentMismatch(String, String),
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Automaton(#[from] NdcmaError),
    #[error("malformed word at position {pos}: {msg}")]
    MalformedWord { pos: usize, msg: String },
    #[error("justifier of position {pos} not determined, candidates {candidates:?}")]
    AmbiguousPointer { pos: usize, candidates: Vec<usize> },
    #[error("no separating word of length at most {0}")]
    WitnessBeyond(usize),
}

/// A type-checked term with its sequent and integer modulus.
#[derive(Clone, Debug)]
pub struct Judgement {
    pub term: Term,
    pub sequent: TypeSequent,
    pub k: u32,
}

impl Judgement {
    pub fn new(term: &Term, context: Vec<Binding>, k: u32) -> Result<Judgement, EquivError> {
        let term = typecheck(term, &context, k)?;
        let subject = term.ty.clone().expect("typed");
        Ok(Judgement { term, sequent: TypeSequent::new(context, subject), k })
    }

    pub fn parse(src: &str, context: &str, k: u32) -> Result<Judgement, EquivError> {
        Judgement::new(&parse_term(src)?, parse_context(context)?, k)
    }
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    /// Node budget of each emptiness check.
    pub budget: usize,
    /// Forces an encoding; by default RML01 when the sequent allows it.
    pub fragment: Option<Encoding>,
    /// Longest separating word searched for once emptiness fails.
    pub witness_len: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { budget: DEFAULT_BUDGET, fragment: None, witness_len: 40 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    /// `witness` is accepted for the left term exactly when `left_accepts`.
    Inequivalent { witness: DataWord, play: Play, left_accepts: bool },
    Unknown { budget: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlayMove {
    /// The letter with any tag removed.
    pub name: String,
    pub index: usize,
    pub owner: Owner,
    pub kind: Kind,
    pub justifier: Option<usize>,
}

/// A justified sequence of moves of a prearena.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Play {
    pub moves: Vec<PlayMove>,
}

impl Play {
    /// Every question has been answered.
    pub fn is_complete(&self) -> bool {
        let answered: Vec<usize> = self.moves.iter().filter(|m| m.kind == Kind::A).filter_map(|m| m.justifier).collect();
        self.moves
            .iter()
            .enumerate()
            .all(|(i, m)| m.kind == Kind::A || answered.contains(&i))
    }
}

impl fmt::Display for Play {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.moves.iter().map(|m| m.name.chars().count()).max().unwrap_or(0);
        for (i, m) in self.moves.iter().enumerate() {
            let owner = match m.owner {
                Owner::O => "O",
                Owner::P => "P",
            };
            match m.justifier {
                Some(j) => writeln!(f, "{:>3} {} {:<width$}  -> {}", i, owner, m.name, j, width = width)?,
                None => writeln!(f, "{:>3} {} {}", i, owner, m.name)?,
            }
        }
        Ok(())
    }
}

/// The encoding used for `seq`: the forced one if it applies, else RML01
/// when possible, else P-strict.
pub fn choose_encoding(seq: &TypeSequent, forced: Option<Encoding>) -> Result<Encoding, EquivError> {
    let class = classify(seq);
    let reject = || EquivError::NotDecidableFragment { reason: class.undecidable_reason, detail: format!("{}: {}", seq, class) };
    match forced {
        Some(Encoding::PStrict) if class.in_pstrict => Ok(Encoding::PStrict),
        Some(Encoding::RForml) if class.in_rforml => Ok(Encoding::RForml),
        Some(_) => Err(reject()),
        None if class.in_rforml => Ok(Encoding::RForml),
        None if class.in_pstrict => Ok(Encoding::PStrict),
        None => Err(reject()),
    }
}

/// The merged automaton of a judgement; RML01 automata also carry the tag
/// monitor.
pub fn compile(j: &Judgement, enc: Encoding) -> Result<Wndcma, EquivError> {
    let c = canonicalize(&j.term)?;
    let fam = match enc {
        Encoding::PStrict => compile_pstrict(&c, &j.sequent, j.k)?,
        Encoding::RForml => compile_rforml(&c, &j.sequent, j.k)?,
    };
    let merged = merge_family(&fam);
    Ok(match enc {
        Encoding::PStrict => merged,
        Encoding::RForml => tag_monitor(&merged),
    })
}

pub fn decide(m: &Judgement, n: &Judgement, opts: &DecideOptions) -> Result<Verdict, EquivError> {
    if m.sequent != n.sequent || m.k != n.k {
        return Err(EquivError::SequentMismatch(m.sequent.to_string(), n.sequent.to_string()));
    }
    let enc = choose_encoding(&m.sequent, opts.fragment)?;
    let a = compile(m, enc)?;
    let b = compile(n, enc)?;
    let only_a = intersect(&a, &complement(&b)?)?;
    let only_b = intersect(&b, &complement(&a)?)?;
    let (ra, rb) = std::thread::scope(|s| {
        let ha = s.spawn(|| is_empty_with_budget(&only_a, opts.budget));
        let hb = s.spawn(|| is_empty_with_budget(&only_b, opts.budget));
        (ha.join().expect("emptiness check"), hb.join().expect("emptiness check"))
    });
    let pre = prearena_of_sequent(&m.sequent, m.k);
    for (diff, result, accepting, left) in [(&only_a, ra.clone(), &a, true), (&only_b, rb.clone(), &b, false)] {
        if result == Ok(false) {
            let witness = find_witness(diff, opts.witness_len).ok_or(EquivError::WitnessBeyond(opts.witness_len))?;
            let play = match enc {
                Encoding::PStrict => decode_word(&pre, &witness, enc)?,
                Encoding::RForml => decode_tagging(&pre, &|w: &DataWord| accepting.accepts(w), &witness)?,
            };
            return Ok(Verdict::Inequivalent { witness, play, left_accepts: left });
        }
    }
    if ra.is_err() || rb.is_err() {
        return Ok(Verdict::Unknown { budget: opts.budget });
    }
    Ok(Verdict::Equivalent)
}

/// First canonical word of length ≤ `max_len`, in enumeration order, on
/// which the two automata disagree.
pub fn bounded_language_equal(a: &Wndcma, b: &Wndcma, max_len: usize) -> Result<Option<DataWord>, NdcmaError> {
    if a.alphabet != b.alphabet {
        return Err(NdcmaError::AlphabetMismatch);
    }
    let mut diff = None;
    for_each_word(&a.alphabet, a.level.max(b.level), max_len, &[a, b], |w, m| {
        if m[0] != m[1] {
            diff = Some(w.clone());
            WordVisit::Stop
        } else {
            WordVisit::Continue
        }
    });
    Ok(diff)
}

fn split_tag(letter: &str) -> (&str, Option<&str>) {
    for tag in ["!src", "!tgt"] {
        if let Some(base) = letter.strip_suffix(tag) {
            return (base, Some(tag));
        }
    }
    (letter, None)
}

/// Decodes a word into a play, taking the justifiers of ambiguous context
/// questions from tags when present.
pub fn decode_word(pre: &Prearena, w: &DataWord, enc: Encoding) -> Result<Play, EquivError> {
    decode(pre, w, enc, &mut |pos, candidates| Err(EquivError::AmbiguousPointer { pos, candidates: candidates.to_vec() }))
}

/// Like [`decode_word`], resolving each ambiguous justifier by asking
/// `probe` which tagged variant of the word is accepted.
pub fn decode_tagging(pre: &Prearena, probe: &dyn Fn(&DataWord) -> bool, w: &DataWord) -> Result<Play, EquivError> {
    let mut plain = w.clone();
    for (l, _) in &mut plain.letters {
        *l = split_tag(l).0.to_string();
    }
    decode(pre, w, Encoding::RForml, &mut |pos, candidates| {
        let hits: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&c| {
                let mut v = plain.clone();
                v.letters[c].0.push_str("!src");
                v.letters[pos].0.push_str("!tgt");
                probe(&v)
            })
            .collect();
        match hits[..] {
            [one] => Ok(one),
            _ => Err(EquivError::AmbiguousPointer { pos, candidates: hits }),
        }
    })
}

type Resolver<'a> = dyn FnMut(usize, &[usize]) -> Result<usize, EquivError> + 'a;

fn decode(pre: &Prearena, w: &DataWord, enc: Encoding, resolve: &mut Resolver) -> Result<Play, EquivError> {
    let bad = |pos: usize, msg: String| EquivError::MalformedWord { pos, msg };
    let mut play = Play::default();
    let mut values: Vec<u32> = Vec::new();
    let mut pending: Vec<usize> = Vec::new();
    let mut last_rhs = None;
    let mut src_at = None;
    for (i, (letter, dv)) in w.letters.iter().enumerate() {
        let (name, tag) = split_tag(letter);
        let idx = pre.by_name(name).ok_or_else(|| bad(i, format!("{} is not a move", name)))?;
        let (owner, kind) = pre.label(idx);
        if owner != if i % 2 == 0 { Owner::O } else { Owner::P } {
            return Err(bad(i, format!("{} breaks alternation", name)));
        }
        if pre.initial[idx] != (i == 0) {
            return Err(bad(i, "the initial move must come first and only there".into()));
        }
        let on_context = matches!(pre.moves[idx].component, Component::Var(_));
        let by_data = enc == Encoding::PStrict || !on_context;
        if !by_data && Some(*dv) != last_rhs {
            return Err(bad(i, "context move off the current right-hand value".into()));
        }
        let justifier = if i == 0 {
            if w.value(*dv).level != 0 {
                return Err(bad(i, "initial move below the root".into()));
            }
            None
        } else if kind == Kind::A {
            let q = pending.pop().ok_or_else(|| bad(i, "answer with no pending question".into()))?;
            if !pre.enables(play.moves[q].index, idx) {
                return Err(bad(i, format!("{} does not answer {}", name, play.moves[q].name)));
            }
            if by_data && values[q] != *dv {
                return Err(bad(i, "answer off its question's value".into()));
            }
            Some(q)
        } else if by_data {
            if values.contains(dv) {
                return Err(bad(i, "question on a used value".into()));
            }
            let parent = w.value(*dv).parent.ok_or_else(|| bad(i, "question on a root value".into()))?;
            let cands: Vec<usize> =
                (0..i).filter(|&j| values[j] == parent && pre.enables(play.moves[j].index, idx)).collect();
            match cands[..] {
                [j] => Some(j),
                _ => return Err(bad(i, format!("question with justifier candidates {:?}", cands))),
            }
        } else if owner == Owner::O {
            let j = pending
                .iter()
                .rev()
                .copied()
                .find(|&j| pre.enables(play.moves[j].index, idx))
                .ok_or_else(|| bad(i, "context question with no pending justifier".into()))?;
            Some(j)
        } else {
            let view = p_view(&play);
            let cands: Vec<usize> = (0..i).filter(|&j| view[j] && pre.enables(play.moves[j].index, idx)).collect();
            match (tag, cands.as_slice()) {
                (Some("!tgt"), _) => {
                    let s = src_at.ok_or_else(|| bad(i, "target tag before its source".into()))?;
                    if !cands.contains(&s) {
                        return Err(bad(i, "tagged source cannot justify the target".into()));
                    }
                    Some(s)
                }
                (_, [j]) => Some(*j),
                (_, []) => return Err(bad(i, "no visible justifier".into())),
                _ => Some(resolve(i, &cands)?),
            }
        };
        if tag == Some("!src") {
            src_at = Some(i);
        }
        if let Some(j) = justifier {
            if !pre.enables(play.moves[j].index, idx) {
                return Err(bad(i, format!("{} cannot justify {}", play.moves[j].name, name)));
            }
            if owner == Owner::P && !p_view(&play)[j] {
                return Err(bad(i, "P-move justified outside the P-view".into()));
            }
        }
        if kind == Kind::Q {
            pending.push(i);
        }
        if !on_context {
            last_rhs = Some(*dv);
        }
        values.push(*dv);
        play.moves.push(PlayMove { name: name.to_string(), index: idx, owner, kind, justifier });
    }
    Ok(play)
}

/// Membership in the P-view of the play so far, which ends with an O-move.
fn p_view(play: &Play) -> Vec<bool> {
    let mut view = vec![false; play.moves.len()];
    let mut i = play.moves.len();
    while i > 0 {
        let at = i - 1;
        view[at] = true;
        let m = &play.moves[at];
        match (m.owner, m.justifier) {
            (Owner::O, None) => break,
            (Owner::O, Some(j)) => i = j + 1,
            (Owner::P, _) => i = at,
        }
    }
    view
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ndcma::fixtures::fig5a;

    const FIG5A: &str = "let c = ref 0 in fun y:unit. if !c = 0 then c := 1 else Omega";
    const FIG5B: &str = "fun x:unit. let c = ref 0 in fun y:unit. if !c = 0 then c := 1 else Omega";

    fn verdict(m: &str, n: &str, ctx: &str, k: u32) -> Verdict {
        let a = Judgement::parse(m, ctx, k).unwrap();
        let b = Judgement::parse(n, ctx, k).unwrap();
        decide(&a, &b, &DecideOptions::default()).unwrap()
    }

    fn word(s: &str) -> DataWord {
        s.parse().unwrap()
    }

    #[test]
    fn unit_call_then_unit() {
        assert_eq!(verdict("f ()", "f (); ()", "f: unit -> unit", 2), Verdict::Equivalent);
    }

    #[test]
    fn succ_pred_wraps() {
        assert_eq!(verdict("fun x:int. x", "fun x:int. succ (pred x)", "", 3), Verdict::Equivalent);
    }

    #[test]
    fn fig5a_differs_from_divergence() {
        let Verdict::Inequivalent { witness, play, left_accepts } = verdict(FIG5A, "fun y:unit. Omega", "", 2) else {
            panic!("expected a witness")
        };
        assert!(left_accepts);
        assert_eq!(witness.to_string(), "q0@0 a0@0 q1@1(0) a1@1(0)");
        assert!(play.is_complete());
        assert_eq!(play.moves[3].justifier, Some(2));
    }

    #[test]
    fn bad_variable_sees_double_read() {
        let v = verdict("!x", "!x; !x", "x: intref", 2);
        let Verdict::Inequivalent { witness, play, .. } = v else { panic!("expected a witness") };
        assert_eq!(witness.len(), 4);
        assert!(play.is_complete());
    }

    #[test]
    fn decide_rejects_outside_the_fragments() {
        let a = Judgement::parse("fun f:unit -> unit. fun x:unit. f x", "", 2).unwrap();
        match decide(&a, &a, &DecideOptions::default()) {
            Err(EquivError::NotDecidableFragment { reason, .. }) => assert!(reason.is_some()),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn forced_encoding_is_checked() {
        let a = Judgement::parse("let g = f () in g ()", "f: unit -> unit -> unit", 2).unwrap();
        let forced = DecideOptions { fragment: Some(Encoding::PStrict), ..Default::default() };
        assert!(matches!(decide(&a, &a, &forced), Err(EquivError::NotDecidableFragment { .. })));
        assert_eq!(decide(&a, &a, &DecideOptions::default()), Ok(Verdict::Equivalent));
    }

    #[test]
    fn bounded_equality_on_itself_and_on_a_change() {
        let a = fig5a();
        assert_eq!(bounded_language_equal(&a, &a, 6), Ok(None));
        let mut b = fig5a();
        b.finals.remove(&b.state_id("7").unwrap());
        let d = bounded_language_equal(&a, &b, 6).unwrap().expect("a difference");
        assert_eq!(d.to_string(), "q0@0 a0@0 q1@1(0) a1@1(0)");
    }

    #[test]
    fn decode_two_move_word() {
        let j = Judgement::parse("()", "", 2).unwrap();
        let pre = prearena_of_sequent(&j.sequent, 2);
        let p = decode_word(&pre, &word("q0@0 a0@0"), Encoding::PStrict).unwrap();
        assert_eq!(p.moves[1].justifier, Some(0));
        assert!(p.is_complete());
    }

    #[test]
    fn decode_fig5a_word() {
        let j = Judgement::parse(FIG5A, "", 2).unwrap();
        let pre = prearena_of_sequent(&j.sequent, 2);
        let p = decode_word(&pre, &word("q0@0 a0@0 q1@1(0) a1@1(0) q1@2(0) a1@2(0)"), Encoding::PStrict).unwrap();
        let just: Vec<_> = p.moves.iter().map(|m| m.justifier).collect();
        assert_eq!(just, vec![None, Some(0), Some(1), Some(2), Some(1), Some(4)]);
    }

    #[test]
    fn decode_fig5b_two_threads() {
        let j = Judgement::parse(FIG5B, "", 2).unwrap();
        let pre = prearena_of_sequent(&j.sequent, 2);
        let w = word("q0@0 a0@0 q1@1(0) a1@1(0) q1@2(0) a1@2(0) q2@3(2) a2@3(2) q2@4(1) a2@4(1)");
        let p = decode_word(&pre, &w, Encoding::PStrict).unwrap();
        assert_eq!(p.moves[6].justifier, Some(5));
        assert_eq!(p.moves[8].justifier, Some(3));
    }

    #[test]
    fn malformed_words_are_reported() {
        let j = Judgement::parse(FIG5A, "", 2).unwrap();
        let pre = prearena_of_sequent(&j.sequent, 2);
        for w in ["a0@0", "q0@0 q1@1(0)", "q0@0 a0@0 q1@0", "q0@0 a0@0 q1@1(0) a1@2(0)"] {
            assert!(
                matches!(decode_word(&pre, &word(w), Encoding::PStrict), Err(EquivError::MalformedWord { .. })),
                "{}",
                w
            );
        }
    }

    #[test]
    fn tags_pick_the_justifier() {
        let j = Judgement::parse("let g = f () in let h = f () in h (); g ()", "f: unit -> unit -> unit", 2).unwrap();
        let a = compile(&j, Encoding::RForml).unwrap();
        let pre = prearena_of_sequent(&j.sequent, 2);
        let plain = word("q0@0 f.arg@0 f.res@0 f.arg@0 f.res@0 f.res.arg@0 f.res.res@0 f.res.arg@0 f.res.res@0 a0@0");
        assert!(a.accepts(&plain));
        assert!(matches!(decode_word(&pre, &plain, Encoding::RForml), Err(EquivError::AmbiguousPointer { .. })));
        let p = decode_tagging(&pre, &|w: &DataWord| a.accepts(w), &plain).unwrap();
        let just: Vec<_> = p.moves.iter().map(|m| m.justifier).collect();
        assert_eq!(just[5], Some(4));
        assert_eq!(just[7], Some(2));
        let tagged = word("q0@0 f.arg@0 f.res!src@0 f.arg@0 f.res@0 f.res.arg@0 f.res.res@0 f.res.arg!tgt@0 f.res.res@0 a0@0");
        assert_eq!(decode_word(&pre, &tagged, Encoding::RForml).unwrap_err(), EquivError::AmbiguousPointer {
            pos: 5,
            candidates: vec![2, 4]
        });
    }
}
