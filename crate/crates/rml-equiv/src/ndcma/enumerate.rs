//! Exhaustive enumeration of canonical data words, run in lockstep with a
//! set of automata.
//!
//! The value read at each position is an already present value or a fresh
//! chain of values hanging below a present value (or forming a new root
//! chain), so every canonical word of the given depth is produced once.
//! Once every automaton is stuck, memberships of all extensions are fixed
//! and the subtree is skipped.

use super::{DataWord, RunSet, Wndcma};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordVisit {
    Continue,
    /// Do not extend this word.
    Prune,
    Stop,
}

/// Calls `visit` on every canonical word of length ≤ `max_len` whose values
/// have level ≤ `level`, with the membership of the word in each automaton.
/// Returns the number of words visited.
pub fn for_each_word<F>(alphabet: &[String], level: usize, max_len: usize, autos: &[&Wndcma], mut visit: F) -> usize
where
    F: FnMut(&DataWord, &[bool]) -> WordVisit,
{
    let runs: Vec<RunSet> = autos.iter().map(|a| a.initial_runs()).collect();
    let mut word = DataWord::default();
    let mut count = 0;
    let mut ctx = Ctx { alphabet, level, max_len, autos, visit: &mut visit, count: &mut count };
    ctx.node(&mut word, &runs);
    count
}

struct Ctx<'a, F> {
    alphabet: &'a [String],
    level: usize,
    max_len: usize,
    autos: &'a [&'a Wndcma],
    visit: &'a mut F,
    count: &'a mut usize,
}

impl<F> Ctx<'_, F>
where
    F: FnMut(&DataWord, &[bool]) -> WordVisit,
{
    /// Returns false when the enumeration was stopped.
    fn node(&mut self, word: &mut DataWord, runs: &[RunSet]) -> bool {
        let member: Vec<bool> = self.autos.iter().zip(runs).map(|(a, r)| a.runs_accept(r)).collect();
        *self.count += 1;
        match (self.visit)(word, &member) {
            WordVisit::Stop => return false,
            WordVisit::Prune => return true,
            WordVisit::Continue => {}
        }
        if word.len() >= self.max_len || runs.iter().all(|r| r.configs.is_empty()) {
            return true;
        }
        let n = word.values.len() as u32;
        for li in 0..self.alphabet.len() {
            for v in 0..n {
                if !self.child(word, runs, li, v) {
                    return false;
                }
            }
            // fresh root chains
            for depth in 1..=self.level + 1 {
                if !self.fresh(word, runs, li, None, depth) {
                    return false;
                }
            }
            for v in 0..n {
                let lv = word.values[v as usize].level as usize;
                for depth in 1..=self.level.saturating_sub(lv) {
                    if !self.fresh(word, runs, li, Some(v), depth) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn fresh(&mut self, word: &mut DataWord, runs: &[RunSet], li: usize, anchor: Option<u32>, depth: usize) -> bool {
        let before = word.values.len();
        let mut cur = anchor;
        for _ in 0..depth {
            cur = Some(word.fresh_value(cur));
        }
        let ok = self.child(word, runs, li, cur.expect("depth ≥ 1"));
        word.values.truncate(before);
        ok
    }

    fn child(&mut self, word: &mut DataWord, runs: &[RunSet], li: usize, v: u32) -> bool {
        let letter = &self.alphabet[li];
        let chain = word.chain(v);
        let next: Vec<RunSet> = self.autos.iter().zip(runs).map(|(a, r)| a.advance(r, letter, &chain)).collect();
        word.letters.push((letter.clone(), v));
        let ok = self.node(word, &next);
        word.letters.pop();
        ok
    }
}
