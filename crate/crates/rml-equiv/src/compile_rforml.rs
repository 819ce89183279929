//! Compilation of RML01.
//!
//! Right-hand questions take a fresh child of their justifier's value and
//! answers reuse their question's value, as in the P-strict encoding. Moves
//! of the context take the value of the most recent right-hand move, so
//! their own pointers are not recorded by data. The one kind of P-pointer
//! that cannot be recovered from the move sequence (a context question
//! justified by an earlier context answer) is carried by tags: a word may
//! mark one such answer `!src` and one question pointing at it `!tgt`.

use crate::arena::{Base, Kind, Move, Owner, Step};
use crate::canonical::CanonicalTerm;
use crate::construct::{cell_answer, map_sig, map_upd, on_var, values, ArgShape, Auto, Call, Cx, Letter, Lt, St, Tag, INIT};
pub use crate::family::{AutomatonFamily, CompileError};
use crate::family::{compile_family, Encoding};
use crate::ndcma::{StateId, Wndcma};
use crate::rml_lang::{RmlType, TypeSequent};
use std::collections::{BTreeSet, HashMap};

pub fn compile_rforml(t: &CanonicalTerm, seq: &TypeSequent, k: u32) -> Result<AutomatonFamily, CompileError> {
    compile_family(t, seq, k, Encoding::RForml)
}

fn arg_relabel(z: &str, shape: &ArgShape) -> impl Fn(&Move) -> Move {
    let z = z.to_string();
    let cell = matches!(shape, ArgShape::Cell);
    move |m: &Move| {
        if cell {
            cell_answer(&Move::var(&z, vec![], m.base), &[Step::Arg])
        } else {
            Move::var(&z, [vec![Step::Arg, Step::Res], m.path.clone()].concat(), m.base)
        }
    }
}

/// Embeds one thread of each opener at every host `(s, mem)`: from `s`,
/// whose current value chain holds `mem`, the opener starts the thread on the
/// same value; the thread's answer restores `mem` and returns to `s`.
fn open_threads(
    cx: &mut Cx,
    a: &mut Auto,
    hosts: &[(St, Vec<St>)],
    openers: &[(Lt, Auto)],
    relabel: &dyn Fn(&Move) -> Move,
) -> Result<(), CompileError> {
    for (oi, (open, m)) in openers.iter().enumerate() {
        if m.level() != 0 {
            return Err(CompileError::FragmentViolation("argument thread above level 0".into()));
        }
        let (s_m, l_m) = m.secondary();
        let answers: BTreeSet<St> = m.inner_finals().into_iter().collect();
        for (s, mem) in hosts {
            let lvl = mem.len() - 1;
            let mut ctl: HashMap<St, St> = HashMap::new();
            let mut lab: HashMap<St, St> = HashMap::new();
            let tag = format!("T{}@{}.", oi, a.names[*s as usize]);
            let state = |a: &mut Auto, map: &mut HashMap<St, St>, p: St, mark: &str| {
                *map.entry(p).or_insert_with(|| a.state(format!("{}{}{}", tag, m.names[p as usize], mark)))
            };
            let at = |l: St| -> (Vec<Option<St>>, Vec<St>) {
                let mut sig: Vec<Option<St>> = mem[..lvl].iter().map(|x| Some(*x)).collect();
                sig.push(Some(l));
                let mut upd = mem[..lvl].to_vec();
                upd.push(l);
                (sig, upd)
            };
            let start = state(a, &mut ctl, s_m, "");
            let l0 = state(a, &mut lab, l_m, "'");
            a.add(*s, *open, mem.iter().map(|x| Some(*x)).collect(), start, at(l0).1)?;
            for ((p1, l, sig), tr) in &m.delta {
                if *p1 == m.init {
                    continue;
                }
                let src = state(a, &mut ctl, *p1, "");
                let read = state(a, &mut lab, sig[0].expect("thread move without value"), "'");
                let (sig2, _) = at(read);
                if answers.contains(&tr.tgt) {
                    let Letter::Mv(mv, t) = cx.letters.get(*l).clone() else { unreachable!() };
                    let l2 = cx.letters.id(Letter::Mv(relabel(&mv), t));
                    a.add(src, l2, sig2, *s, mem.clone())?;
                } else {
                    let tgt = state(a, &mut ctl, tr.tgt, "");
                    let w = state(a, &mut lab, tr.upd[0], "'");
                    a.add(src, *l, sig2, tgt, at(w).1)?;
                }
            }
        }
    }
    Ok(())
}

/// `z` applied to a `λ` or `mkvar` argument, evaluated for a base result.
pub(crate) fn call_with_threads(
    cx: &mut Cx,
    z: &str,
    openers: Vec<(Lt, Auto)>,
    shape: ArgShape,
    xty: &RmlType,
) -> Result<Auto, CompileError> {
    let mut a = Auto::new("r1");
    let s2 = a.state("r2");
    let s3 = a.state("r3");
    a.add(a.init, INIT, vec![None], s2, vec![s2])?;
    let call = cx.letters.mv(Move::var(z, vec![Step::Arg], Base::Unit));
    a.add(s2, call, vec![Some(s2)], s3, vec![s3])?;
    let relabel = arg_relabel(z, &shape);
    open_threads(cx, &mut a, &[(s3, vec![s3])], &openers, &relabel)?;
    for r in values(xty, cx.k) {
        let tag = match r {
            Base::Int(j) => j.to_string(),
            _ => "u".into(),
        };
        let s4 = a.state(format!("r4{}", tag));
        let s5 = a.state(format!("r5{}", tag));
        let ret = cx.letters.mv(Move::var(z, vec![Step::Res], r));
        let ans = cx.letters.mv(Move::rhs(vec![], r));
        a.add(s3, ret, vec![Some(s3)], s4, vec![s4])?;
        a.add(s4, ans, vec![Some(s4)], s5, vec![s5])?;
        a.finals.insert(s5);
    }
    a.trim();
    Ok(a)
}

/// Whether `m`, a move of `x`, is a question justified by the initial move
/// of `x`.
fn first_question(m: &Move) -> bool {
    matches!(m.path.as_slice(), [Step::Arg]) && matches!(m.base, Base::Unit | Base::Int(_))
        || m.path.is_empty() && matches!(m.base, Base::Read | Base::Write(_))
}

/// `let x = z arg in N` with `x` of function or reference type: `N` runs with
/// the moves of `x` played as moves below the result of `z`. A second copy
/// marks the result `!src` and may mark questions of `x` that point at it
/// `!tgt`.
pub(crate) fn call_returning_function(cx: &mut Cx, x: &str, z: &str, call: Call, n: &Auto) -> Result<Auto, CompileError> {
    let mut a = Auto::new("f1");
    let s2 = a.state("f2");
    let s3 = a.state("f3");
    a.add(a.init, INIT, vec![None], s2, vec![s2])?;
    let (arg, threads) = match call {
        Call::Value(b) => (Move::var(z, vec![Step::Arg], b), None),
        Call::Threads(openers, shape) => (Move::var(z, vec![Step::Arg], Base::Unit), Some((openers, shape))),
    };
    let arg = cx.letters.mv(arg);
    a.add(s2, arg, vec![Some(s2)], s3, vec![s3])?;
    let ret = Move::var(z, vec![Step::Res], Base::Unit);
    let ret_plain = cx.letters.mv(ret.clone());
    let ret_src = cx.letters.id(Letter::Mv(ret, Tag::Src));
    let (s_n, l_n) = n.secondary();
    let mut hosts = vec![(s3, vec![s3])];
    for (copy, ret) in [("U.", ret_plain), ("S.", ret_src)] {
        let tagged = copy == "S.";
        let map = a.import(n, copy);
        a.add(s3, ret, vec![Some(s3)], map[s_n as usize], vec![map[l_n as usize]])?;
        for ((s, l, sig), tr) in &n.delta {
            if *s == n.init {
                continue;
            }
            let Letter::Mv(mv, tag) = cx.letters.get(*l).clone() else { unreachable!() };
            let (sig2, tgt, upd2) = (map_sig(sig, &map), map[tr.tgt as usize], map_upd(&tr.upd, &map));
            if !on_var(&mv, x) {
                a.add(map[*s as usize], *l, sig2, tgt, upd2)?;
                continue;
            }
            let moved = Move::var(z, [vec![Step::Res], mv.path.clone()].concat(), mv.base);
            let l2 = cx.letters.id(Letter::Mv(moved.clone(), tag));
            a.add(map[*s as usize], l2, sig2.clone(), tgt, upd2.clone())?;
            if mv.polarity().0 == Owner::P {
                hosts.push((tgt, upd2.clone()));
            }
            if tagged && tag == Tag::Plain && first_question(&mv) {
                let l3 = cx.letters.id(Letter::Mv(moved, Tag::Tgt));
                a.add(map[*s as usize], l3, sig2, tgt, upd2)?;
            }
        }
        a.finals.extend(n.inner_finals().iter().map(|f| map[*f as usize]));
    }
    if let Some((openers, shape)) = threads {
        let mut seen = BTreeSet::new();
        hosts.retain(|h| seen.insert(h.clone()));
        let relabel = arg_relabel(z, &shape);
        open_threads(cx, &mut a, &hosts, &openers, &relabel)?;
    }
    a.trim();
    Ok(a)
}

/// Product with a three-phase monitor keeping the words with no tag or with
/// one `!src` letter followed by exactly one `!tgt` letter.
pub fn tag_monitor(a: &Wndcma) -> Wndcma {
    let tag_of = |l: &str| {
        if l.ends_with("!src") {
            Tag::Src
        } else if l.ends_with("!tgt") {
            Tag::Tgt
        } else {
            Tag::Plain
        }
    };
    if a.alphabet.iter().all(|l| tag_of(l) == Tag::Plain) {
        return a.clone();
    }
    let mut out = Wndcma::new(&a.alphabet, a.level);
    out.stuck_accepts = a.stuck_accepts;
    for s in &a.states {
        out.add_state(s.clone());
    }
    let n = a.states.len() as StateId;
    for s in &a.states {
        out.add_state(format!("{}~open", s));
    }
    for s in &a.states {
        out.add_state(format!("{}~done", s));
    }
    let phase = |s: StateId, p: u32| s + p * n;
    out.initial = a.initial;
    for f in &a.finals {
        out.finals.insert(phase(*f, 0));
        out.finals.insert(phase(*f, 2));
    }
    for (k, ts) in &a.delta {
        let t = tag_of(&a.alphabet[k.letter as usize]);
        for p in 0..3 {
            let q = match (t, p) {
                (Tag::Plain, p) => p,
                (Tag::Src, 0) => 1,
                (Tag::Tgt, 1) => 2,
                _ => continue,
            };
            for tr in ts {
                out.add_transition(phase(k.state, p), k.letter, k.sig.clone(), phase(tr.state, q), tr.update.clone());
            }
        }
    }
    crate::family::cleanup(&out)
}

/// Moves of the prearena whose letters may carry tags: the context
/// P-questions justified by an O-answer.
pub fn ambiguous_questions(pre: &crate::arena::Prearena) -> Vec<Move> {
    crate::family::tagged_moves(pre)
        .into_iter()
        .filter(|(m, t)| *t == Tag::Tgt && m.polarity() == (Owner::P, Kind::Q))
        .map(|(m, _)| m)
        .collect()
}
