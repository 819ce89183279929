//! Families of automata indexed by initial moves, shared by both compilers,
//! with the syntactic checks every compiled member must pass.

use crate::arena::{prearena_of_sequent, Component, Move, Prearena};
use crate::canonical::CanonicalTerm;
use crate::construct::{Auto, Cx, Letter};
use crate::ndcma::{StateId, Wndcma};
use crate::rml_lang::{classify, TypeSequent};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Encoding {
    PStrict,
    RForml,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::PStrict => "pstrict",
            Encoding::RForml => "rforml",
        })
    }
}

/// Marks on context moves pinning down one ambiguous justification pointer
/// per word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Tag {
    Plain,
    Src,
    Tgt,
}

impl Tag {
    pub fn suffix(self) -> &'static str {
        match self {
            Tag::Plain => "",
            Tag::Src => "!src",
            Tag::Tgt => "!tgt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("outside the fragment: {0}")]
    FragmentViolation(String),
    #[error("construction failed: {0}")]
    Internal(String),
}

#[derive(Clone, Debug)]
pub struct AutomatonFamily {
    pub encoding: Encoding,
    pub alphabet: Vec<String>,
    /// Keyed by the printed initial move.
    pub members: BTreeMap<String, Wndcma>,
}

/// Letters of the automata for `seq`: the moves of its prearena and, for
/// the RML01 encoding, the tagged variants of [`tagged_moves`].
pub fn alphabet_of(pre: &Prearena, enc: Encoding) -> Vec<String> {
    let mut out: BTreeSet<String> = pre.moves.iter().map(|m| m.to_string()).collect();
    if enc == Encoding::RForml {
        for (m, tag) in tagged_moves(pre) {
            out.insert(format!("{}{}", m, tag.suffix()));
        }
    }
    out.into_iter().collect()
}

/// Context P-questions justified by a non-initial O-answer, marked as
/// targets, together with those answers marked as sources.
pub fn tagged_moves(pre: &Prearena) -> Vec<(Move, Tag)> {
    use crate::arena::{Kind, Owner};
    let mut out = BTreeSet::new();
    for (i, m) in pre.moves.iter().enumerate() {
        if !matches!(m.component, Component::Var(_)) || pre.label(i) != (Owner::P, Kind::Q) {
            continue;
        }
        for e in pre.enabled_by(i) {
            if !pre.initial[e] && pre.label(e) == (Owner::O, Kind::A) {
                out.insert((m.clone(), Tag::Tgt));
                out.insert((pre.moves[e].clone(), Tag::Src));
            }
        }
    }
    out.into_iter().collect()
}

pub(crate) fn compile_family(
    t: &CanonicalTerm,
    seq: &TypeSequent,
    k: u32,
    enc: Encoding,
) -> Result<AutomatonFamily, CompileError> {
    let class = classify(seq);
    let inside = match enc {
        Encoding::PStrict => class.in_pstrict,
        Encoding::RForml => class.in_rforml,
    };
    if !inside {
        return Err(CompileError::FragmentViolation(format!("{} is not in the {} fragment", seq, enc)));
    }
    let pre = prearena_of_sequent(seq, k);
    let alphabet = alphabet_of(&pre, enc);
    let mut cx = Cx::new(enc, k, &seq.context);
    let mut members = BTreeMap::new();
    for i in pre.initial_moves() {
        let m = &pre.moves[i];
        let Component::Initial(env) = &m.component else {
            continue;
        };
        let auto = cx.compile(t, env)?;
        let w = to_wndcma(&cx, &auto, &alphabet, &m.to_string())?;
        members.insert(m.to_string(), w);
    }
    Ok(AutomatonFamily { encoding: enc, alphabet, members })
}

fn to_wndcma(cx: &Cx, a: &Auto, alphabet: &[String], init_letter: &str) -> Result<Wndcma, CompileError> {
    let mut w = Wndcma::new(alphabet, a.level());
    let mut seen = HashSet::new();
    for (i, n) in a.names.iter().enumerate() {
        let name = if n.len() <= 40 && !n.contains(char::is_whitespace) && seen.insert(n.clone()) {
            n.clone()
        } else {
            let alt = format!("s{}", i);
            seen.insert(alt.clone());
            alt
        };
        w.add_state(name);
    }
    w.initial = a.init;
    w.finals = a.finals.clone();
    for ((s, l, sig), tr) in &a.delta {
        let letter = match cx.letters.get(*l) {
            Letter::Init => init_letter.to_string(),
            Letter::Mv(m, tag) => format!("{}{}", m, tag.suffix()),
        };
        let lid = w
            .letter_id(&letter)
            .ok_or_else(|| CompileError::Internal(format!("letter {} outside the alphabet", letter)))?;
        w.add_transition(*s, lid, sig.clone(), tr.tgt, tr.upd.clone());
    }
    Ok(w)
}

/// Union of the members with their initial states merged.
pub fn merge_family(fam: &AutomatonFamily) -> Wndcma {
    let level = fam.members.values().map(|a| a.level).max().unwrap_or(0);
    let mut out = Wndcma::new(&fam.alphabet, level);
    out.initial = out.add_state("init");
    out.finals.insert(out.initial);
    let single = fam.members.len() == 1;
    for (gamma, a) in &fam.members {
        let map: Vec<StateId> = a
            .states
            .iter()
            .enumerate()
            .map(|(i, n)| {
                if i as StateId == a.initial {
                    out.initial
                } else if single {
                    out.add_state(n.clone())
                } else {
                    out.add_state(format!("{}@{}", n, gamma))
                }
            })
            .collect();
        for f in &a.finals {
            out.finals.insert(map[*f as usize]);
        }
        for (key, ts) in &a.delta {
            let letter = out.letter_id(&a.alphabet[key.letter as usize]).expect("shared alphabet");
            let sig = key.sig.iter().map(|x| x.map(|x| map[x as usize])).collect::<Vec<_>>();
            for t in ts {
                let upd = t.update.iter().map(|x| map[*x as usize]).collect();
                out.add_transition(map[key.state as usize], letter, sig.clone(), map[t.state as usize], upd);
            }
        }
    }
    out
}

/// Removes transitions that no run can fire and, unless stuck runs accept,
/// transitions after which no final control state is reachable.
pub fn cleanup(a: &Wndcma) -> Wndcma {
    let depth = a.level + 1;
    let mut reach = BTreeSet::from([a.initial]);
    let mut written = vec![BTreeSet::new(); depth];
    let enabled = |reach: &BTreeSet<StateId>, written: &Vec<BTreeSet<StateId>>, s: StateId, sig: &[Option<StateId>]| {
        reach.contains(&s) && sig.iter().enumerate().all(|(i, x)| x.is_none_or(|x| written[i].contains(&x)))
    };
    loop {
        let mut changed = false;
        for (k, ts) in &a.delta {
            if enabled(&reach, &written, k.state, &k.sig) {
                for t in ts {
                    changed |= reach.insert(t.state);
                    for (i, u) in t.update.iter().enumerate() {
                        changed |= written[i].insert(*u);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut co: BTreeSet<StateId> = a.finals.clone();
    if a.stuck_accepts {
        co = (0..a.states.len() as StateId).collect();
    }
    loop {
        let mut changed = false;
        for (k, ts) in &a.delta {
            if enabled(&reach, &written, k.state, &k.sig) && ts.iter().any(|t| co.contains(&t.state)) {
                changed |= co.insert(k.state);
            }
        }
        if !changed {
            break;
        }
    }
    let mut used = BTreeSet::from([a.initial]);
    let mut kept = Vec::new();
    for (k, ts) in &a.delta {
        if !enabled(&reach, &written, k.state, &k.sig) {
            continue;
        }
        for t in ts {
            if a.stuck_accepts || co.contains(&t.state) {
                used.insert(k.state);
                used.insert(t.state);
                used.extend(k.sig.iter().flatten().copied());
                used.extend(t.update.iter().copied());
                kept.push((k.clone(), t.clone()));
            }
        }
    }
    used.extend(a.finals.iter().copied().filter(|f| reach.contains(f)));
    let mut out = Wndcma::new(&a.alphabet, a.level);
    out.stuck_accepts = a.stuck_accepts;
    let mut map = vec![StateId::MAX; a.states.len()];
    for s in &used {
        map[*s as usize] = out.add_state(a.states[*s as usize].clone());
    }
    out.initial = map[a.initial as usize];
    out.finals = a.finals.iter().filter(|f| used.contains(f)).map(|f| map[*f as usize]).collect();
    for (k, t) in kept {
        let sig = k.sig.iter().map(|x| x.map(|x| map[x as usize])).collect();
        let upd = t.update.iter().map(|x| map[*x as usize]).collect();
        out.add_transition(map[k.state as usize], k.letter, sig, map[t.state as usize], upd);
    }
    out
}

/// Outcome of the five syntactic checks on a compiled automaton.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub no_initial_revisit: bool,
    pub deterministic: bool,
    pub level_discipline: bool,
    pub unique_initial: bool,
    pub final_uniformity: bool,
}

impl InvariantReport {
    pub fn all(&self) -> bool {
        self.no_initial_revisit && self.deterministic && self.level_discipline && self.unique_initial && self.final_uniformity
    }
}

pub fn check_invariants(a: &Wndcma) -> InvariantReport {
    let no_initial_revisit = a
        .delta
        .values()
        .flatten()
        .all(|t| t.state != a.initial && !t.update.contains(&a.initial));
    let from_init: Vec<_> = a.outgoing(a.initial).flat_map(|(k, ts)| ts.iter().map(move |t| (k, t))).collect();
    let unique_initial = from_init.len() == 1
        && from_init[0].0.sig == [None]
        && a.delta.iter().all(|(k, _)| k.state == a.initial || k.sig != [None]);
    type Edge = (u32, Vec<Option<StateId>>, StateId, Vec<StateId>);
    let out_of = |s: StateId| -> BTreeSet<Edge> {
        a.outgoing(s)
            .flat_map(|(k, ts)| ts.iter().map(move |t| (k.letter, k.sig.clone(), t.state, t.update.clone())))
            .collect()
    };
    let finals: Vec<StateId> = a.finals.iter().copied().filter(|f| *f != a.initial).collect();
    let final_uniformity = finals.windows(2).all(|w| out_of(w[0]) == out_of(w[1]));
    InvariantReport {
        no_initial_revisit,
        deterministic: a.is_deterministic(),
        level_discipline: a.check_level_discipline().ok(),
        unique_initial,
        final_uniformity,
    }
}

impl AutomatonFamily {
    pub fn invariants(&self) -> BTreeMap<String, InvariantReport> {
        self.members.iter().map(|(g, a)| (g.clone(), check_invariants(a))).collect()
    }
}
