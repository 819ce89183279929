//! Weak nested data class memory automata.
//!
//! A level-`l` automaton reads letters paired with values of a nested data
//! forest of depth `l`. Each value carries a memory cell; a transition for
//! a value `d` at level `i` inspects the cells of `d` and its `i` ancestors
//! (the signature, `None` meaning never written) and overwrites all of them
//! with the update.
//!
//! Missing transitions send a run to an absorbing sink which accepts iff
//! `stuck_accepts` is set. This keeps complements of deterministic automata
//! finite without materialising every signature.

mod enumerate;
mod ops;
mod text;
mod word;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use enumerate::{for_each_word, WordVisit};
pub use ops::{complement, complete, intersect, union, universal};
pub use word::{DataWord, NestedDataValue};

pub type StateId = u32;
pub type LetterId = u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NdcmaError {
    #[error("automaton is not deterministic")]
    NotDeterministic,
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed data word: {0}")]
    Word(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransKey {
    pub state: StateId,
    pub letter: LetterId,
    pub sig: Vec<Option<StateId>>,
}

impl TransKey {
    pub fn level(&self) -> usize {
        self.sig.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Target {
    pub state: StateId,
    pub update: Vec<StateId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wndcma {
    pub states: Vec<String>,
    /// Sorted and duplicate free; letter ids index into it.
    pub alphabet: Vec<String>,
    pub level: usize,
    pub initial: StateId,
    pub finals: BTreeSet<StateId>,
    pub stuck_accepts: bool,
    pub delta: BTreeMap<TransKey, Vec<Target>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub memory: BTreeMap<u32, StateId>,
}

/// The set of runs on a prefix, plus whether some run fell into the sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSet {
    pub configs: BTreeSet<Configuration>,
    pub sunk: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LevelReport {
    pub levels: BTreeMap<String, BTreeSet<usize>>,
    pub violations: Vec<String>,
}

impl LevelReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Wndcma {
    pub fn new<S: AsRef<str>>(alphabet: &[S], level: usize) -> Wndcma {
        let mut letters: Vec<String> = alphabet.iter().map(|s| s.as_ref().to_string()).collect();
        letters.sort();
        letters.dedup();
        Wndcma {
            states: Vec::new(),
            alphabet: letters,
            level,
            initial: 0,
            finals: BTreeSet::new(),
            stuck_accepts: false,
            delta: BTreeMap::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> StateId {
        self.states.push(name.into());
        (self.states.len() - 1) as StateId
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(|i| i as StateId)
    }

    pub fn letter_id(&self, letter: &str) -> Option<LetterId> {
        self.alphabet
            .binary_search_by(|l| l.as_str().cmp(letter))
            .ok()
            .map(|i| i as LetterId)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s as usize]
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals.contains(&s)
    }

    /// Adds one δ entry; duplicates are ignored.
    pub fn add_transition(
        &mut self,
        src: StateId,
        letter: LetterId,
        sig: Vec<Option<StateId>>,
        tgt: StateId,
        update: Vec<StateId>,
    ) {
        assert_eq!(sig.len(), update.len(), "signature and update lengths differ");
        assert!(!sig.is_empty() && sig.len() <= self.level + 1, "transition level out of range");
        let targets = self.delta.entry(TransKey { state: src, letter, sig }).or_default();
        let t = Target { state: tgt, update };
        if !targets.contains(&t) {
            targets.push(t);
        }
    }

    /// Same as [`Wndcma::add_transition`] but by names; panics on unknown names.
    pub fn add_named(&mut self, src: &str, letter: &str, sig: &[Option<&str>], tgt: &str, update: &[&str]) {
        let id = |a: &Wndcma, n: &str| a.state_id(n).unwrap_or_else(|| panic!("unknown state {n}"));
        let s = id(self, src);
        let l = self.letter_id(letter).unwrap_or_else(|| panic!("unknown letter {letter}"));
        let sig = sig.iter().map(|o| o.map(|n| id(self, n))).collect();
        let t = id(self, tgt);
        let upd = update.iter().map(|n| id(self, n)).collect();
        self.add_transition(s, l, sig, t, upd);
    }

    pub fn transition_count(&self) -> usize {
        self.delta.values().map(Vec::len).sum()
    }

    pub fn is_deterministic(&self) -> bool {
        self.delta.values().all(|t| t.len() == 1)
    }

    pub fn initial_config(&self) -> Configuration {
        Configuration { state: self.initial, memory: BTreeMap::new() }
    }

    pub fn initial_runs(&self) -> RunSet {
        RunSet { configs: BTreeSet::from([self.initial_config()]), sunk: false }
    }

    /// One step on a value given by its ancestor chain, root first.
    pub fn step(&self, c: &Configuration, letter: &str, chain: &[u32]) -> Vec<Configuration> {
        match self.letter_id(letter) {
            Some(l) => self.step_id(c, l, chain),
            None => Vec::new(),
        }
    }

    pub fn step_id(&self, c: &Configuration, letter: LetterId, chain: &[u32]) -> Vec<Configuration> {
        if chain.is_empty() || chain.len() > self.level + 1 {
            return Vec::new();
        }
        let sig: Vec<Option<StateId>> = chain.iter().map(|d| c.memory.get(d).copied()).collect();
        let key = TransKey { state: c.state, letter, sig };
        let Some(targets) = self.delta.get(&key) else { return Vec::new() };
        targets
            .iter()
            .map(|t| {
                let mut memory = c.memory.clone();
                for (d, s) in chain.iter().zip(&t.update) {
                    memory.insert(*d, *s);
                }
                Configuration { state: t.state, memory }
            })
            .collect()
    }

    pub fn advance(&self, runs: &RunSet, letter: &str, chain: &[u32]) -> RunSet {
        let l = self.letter_id(letter);
        let mut out = RunSet { configs: BTreeSet::new(), sunk: runs.sunk };
        for c in &runs.configs {
            let next = match l {
                Some(l) => self.step_id(c, l, chain),
                None => Vec::new(),
            };
            if next.is_empty() {
                out.sunk = true;
            }
            out.configs.extend(next);
        }
        out
    }

    pub fn runs_accept(&self, runs: &RunSet) -> bool {
        (runs.sunk && self.stuck_accepts) || runs.configs.iter().any(|c| self.is_final(c.state))
    }

    pub fn run(&self, w: &DataWord) -> RunSet {
        let mut runs = self.initial_runs();
        for (letter, v) in &w.letters {
            runs = self.advance(&runs, letter, &w.chain(*v));
        }
        runs
    }

    pub fn accepts(&self, w: &DataWord) -> bool {
        self.runs_accept(&self.run(w))
    }

    /// Records at which memory positions each state occurs; a state seen at
    /// two different positions is a violation.
    pub fn check_level_discipline(&self) -> LevelReport {
        let mut seen: BTreeMap<StateId, BTreeSet<usize>> = BTreeMap::new();
        for (k, ts) in &self.delta {
            for (j, s) in k.sig.iter().enumerate() {
                if let Some(s) = s {
                    seen.entry(*s).or_default().insert(j);
                }
            }
            for t in ts {
                for (j, s) in t.update.iter().enumerate() {
                    seen.entry(*s).or_default().insert(j);
                }
            }
        }
        let mut report = LevelReport::default();
        for (s, lv) in seen {
            let name = self.state_name(s).to_string();
            if lv.len() > 1 {
                report.violations.push(format!("state {name} occurs at levels {lv:?}"));
            }
            report.levels.insert(name, lv);
        }
        report
    }

    /// Transitions leaving `s`, grouped by key.
    pub fn outgoing(&self, s: StateId) -> impl Iterator<Item = (&TransKey, &Vec<Target>)> {
        let lo = TransKey { state: s, letter: 0, sig: Vec::new() };
        self.delta.range(lo..).take_while(move |(k, _)| k.state == s)
    }
}

impl fmt::Display for Wndcma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::render(self))
    }
}

impl std::str::FromStr for Wndcma {
    type Err = NdcmaError;
    fn from_str(s: &str) -> Result<Wndcma, NdcmaError> {
        text::parse(s)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Fig. 5a style automaton with the letters of a unit-returning thunk.
    pub fn fig5a() -> Wndcma {
        let mut a = Wndcma::new(&["q0", "a0", "q1", "a1"], 1);
        for s in ["3", "4", "(5,0)", "6", "7", "(5,1)"] {
            a.add_state(s);
        }
        a.initial = a.state_id("3").unwrap();
        for s in ["3", "(5,0)", "7", "(5,1)"] {
            let id = a.state_id(s).unwrap();
            a.finals.insert(id);
        }
        a.add_named("3", "q0", &[None], "4", &["4"]);
        a.add_named("4", "a0", &[Some("4")], "(5,0)", &["(5,0)"]);
        a.add_named("(5,0)", "q1", &[Some("(5,0)"), None], "6", &["(5,0)", "6"]);
        a.add_named("6", "a1", &[Some("(5,0)"), Some("6")], "7", &["(5,1)", "7"]);
        a.add_named("7", "q1", &[Some("(5,0)"), None], "6", &["(5,0)", "6"]);
        a
    }
}
