//! Emptiness by backward coverability.
//!
//! A configuration is abstracted to its control state plus the forest of
//! memory labels of the values written so far (unwritten values carry no
//! information and are dropped). Forests are ordered by label-exact,
//! depth-preserving, injective embedding. Weak acceptance makes the set of
//! accepting configurations upward closed, so emptiness reduces to asking
//! whether the initial configuration lies in the predecessor closure of
//! `{(f, ∅) | f final}`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::ndcma::{self, Configuration, DataWord, StateId, Target, TransKey, Wndcma};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("coverability budget of {0} abstract configurations exceeded")]
pub struct ResourceLimit(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    pub label: StateId,
    /// Sorted.
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(label: StateId) -> Tree {
        Tree { label, children: Vec::new() }
    }

    pub fn node(label: StateId, mut children: Vec<Tree>) -> Tree {
        children.sort();
        Tree { label, children }
    }

    fn depth(&self) -> usize {
        1 + self.children.iter().map(Tree::depth).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbstractConfig {
    pub state: StateId,
    /// Sorted multiset of trees.
    pub forest: Vec<Tree>,
}

impl AbstractConfig {
    pub fn new(state: StateId, mut forest: Vec<Tree>) -> AbstractConfig {
        forest.sort();
        AbstractConfig { state, forest }
    }

    pub fn depth(&self) -> usize {
        self.forest.iter().map(Tree::depth).max().unwrap_or(0)
    }

    /// Abstracts a concrete configuration reached on `word`.
    pub fn of(c: &Configuration, word: &DataWord) -> AbstractConfig {
        fn build(v: u32, c: &Configuration, kids: &BTreeMap<u32, Vec<u32>>) -> Tree {
            let children = kids.get(&v).map_or(Vec::new(), |ks| ks.iter().map(|k| build(*k, c, kids)).collect());
            Tree::node(c.memory[&v], children)
        }
        let mut kids: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        let mut roots = Vec::new();
        for v in c.memory.keys() {
            match word.value(*v).parent {
                Some(p) if c.memory.contains_key(&p) => kids.entry(p).or_default().push(*v),
                _ => roots.push(*v),
            }
        }
        AbstractConfig::new(c.state, roots.iter().map(|r| build(*r, c, &kids)).collect())
    }
}

fn tree_embeds(a: &Tree, b: &Tree) -> bool {
    a.label == b.label && forest_embeds(&a.children, &b.children)
}

/// Injective matching of `a`'s trees into `b`'s trees (Kuhn's algorithm).
fn forest_embeds(a: &[Tree], b: &[Tree]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let cand: Vec<Vec<usize>> = a
        .iter()
        .map(|x| (0..b.len()).filter(|j| tree_embeds(x, &b[*j])).collect())
        .collect();
    if cand.iter().any(Vec::is_empty) {
        return false;
    }
    let mut owner: Vec<Option<usize>> = vec![None; b.len()];
    fn augment(i: usize, cand: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &j in &cand[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none() || augment(owner[j].unwrap(), cand, owner, seen) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    (0..a.len()).all(|i| augment(i, &cand, &mut owner, &mut vec![false; b.len()]))
}

pub fn embed_leq(a: &AbstractConfig, b: &AbstractConfig) -> bool {
    a.state == b.state && forest_embeds(&a.forest, &b.forest)
}

/// Mutable parent-pointer view of a forest.
#[derive(Clone)]
struct Flat {
    label: Vec<StateId>,
    parent: Vec<Option<usize>>,
    alive: Vec<bool>,
}

impl Flat {
    fn from_forest(forest: &[Tree]) -> Flat {
        fn go(t: &Tree, parent: Option<usize>, f: &mut Flat) {
            let id = f.label.len();
            f.label.push(t.label);
            f.parent.push(parent);
            f.alive.push(true);
            for c in &t.children {
                go(c, Some(id), f);
            }
        }
        let mut f = Flat { label: Vec::new(), parent: Vec::new(), alive: Vec::new() };
        for t in forest {
            go(t, None, &mut f);
        }
        f
    }

    fn add(&mut self, label: StateId, parent: Option<usize>) -> usize {
        self.label.push(label);
        self.parent.push(parent);
        self.alive.push(true);
        self.label.len() - 1
    }

    fn children(&self, n: Option<usize>) -> Vec<usize> {
        (0..self.label.len()).filter(|i| self.alive[*i] && self.parent[*i] == n).collect()
    }

    fn to_forest(&self) -> Vec<Tree> {
        fn build(f: &Flat, n: usize) -> Tree {
            Tree::node(f.label[n], f.children(Some(n)).into_iter().map(|c| build(f, c)).collect())
        }
        let mut out: Vec<Tree> = self.children(None).into_iter().map(|r| build(self, r)).collect();
        out.sort();
        out
    }
}

fn well_shaped(sig: &[Option<StateId>]) -> bool {
    let k = sig.iter().take_while(|s| s.is_some()).count();
    sig[k..].iter().all(Option::is_none)
}

/// Minimal configurations whose successor under the transition covers `c`.
fn predecessors(key: &TransKey, t: &Target, c: &AbstractConfig) -> Vec<AbstractConfig> {
    let sig = &key.sig;
    if t.state != c.state || !well_shaped(sig) {
        return Vec::new();
    }
    let flat = Flat::from_forest(&c.forest);
    let mut out = Vec::new();
    // every label-matching path n_0..n_{m-1} (m = number of matched nodes)
    let mut paths: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for j in 0..sig.len() {
        let mut next = Vec::new();
        for p in &frontier {
            for ch in flat.children(p.last().copied()) {
                if flat.label[ch] == t.update[j] {
                    let mut q = p.clone();
                    q.push(ch);
                    next.push(q);
                }
            }
        }
        paths.extend(next.iter().cloned());
        frontier = next;
    }
    'paths: for path in paths {
        let mut f = flat.clone();
        for (j, n) in path.iter().enumerate() {
            match sig[j] {
                Some(s) => f.label[*n] = s,
                None => {
                    // the value was unwritten: it and its subtree must vanish,
                    // so nothing besides the matched path may hang below it
                    let allowed = path.get(j + 1).copied();
                    if f.children(Some(*n)).iter().any(|ch| Some(*ch) != allowed) {
                        continue 'paths;
                    }
                    f.alive[*n] = false;
                }
            }
        }
        let mut anchor = path.last().copied();
        for s in sig.iter().skip(path.len()) {
            match s {
                Some(s) => anchor = Some(f.add(*s, anchor)),
                None => break,
            }
        }
        out.push(AbstractConfig::new(key.state, f.to_forest()));
    }
    out
}

#[derive(Debug, Clone)]
pub struct BackwardResult {
    pub nonempty: bool,
    /// The basis at termination, per control state.
    pub basis: Vec<AbstractConfig>,
    pub explored: usize,
}

/// Runs the fixpoint. With `stop_early` the search ends as soon as the
/// initial configuration is covered.
pub fn backward_coverability(a: &Wndcma, budget: usize, stop_early: bool) -> Result<BackwardResult, ResourceLimit> {
    let owned;
    let a = if a.stuck_accepts {
        owned = ndcma::intersect(&ndcma::universal(&a.alphabet, a.level), a).expect("same alphabet");
        &owned
    } else {
        a
    };
    let mut into: HashMap<StateId, Vec<(&TransKey, &Target)>> = HashMap::new();
    for (k, ts) in &a.delta {
        for t in ts {
            into.entry(t.state).or_default().push((k, t));
        }
    }
    let mut basis: HashMap<StateId, Vec<Vec<Tree>>> = HashMap::new();
    let mut queue: VecDeque<AbstractConfig> = VecDeque::new();
    let mut nonempty = a.finals.contains(&a.initial);
    for f in &a.finals {
        basis.entry(*f).or_default().push(Vec::new());
        queue.push_back(AbstractConfig::new(*f, Vec::new()));
    }
    let mut explored = 0usize;
    while let Some(c) = queue.pop_front() {
        if nonempty && stop_early {
            break;
        }
        if !basis.get(&c.state).is_some_and(|b| b.contains(&c.forest)) {
            continue;
        }
        let Some(edges) = into.get(&c.state) else { continue };
        for (k, t) in edges {
            for pre in predecessors(k, t, &c) {
                explored += 1;
                if explored > budget {
                    return Err(ResourceLimit(budget));
                }
                let bucket = basis.entry(pre.state).or_default();
                let probe = |f: &Vec<Tree>| forest_embeds(f, &pre.forest);
                if bucket.iter().any(probe) {
                    continue;
                }
                bucket.retain(|f| !forest_embeds(&pre.forest, f));
                bucket.push(pre.forest.clone());
                if pre.state == a.initial && pre.forest.is_empty() {
                    nonempty = true;
                }
                queue.push_back(pre);
            }
        }
    }
    let mut all: Vec<AbstractConfig> = basis
        .into_iter()
        .flat_map(|(s, fs)| fs.into_iter().map(move |f| AbstractConfig::new(s, f)))
        .collect();
    all.sort();
    Ok(BackwardResult { nonempty, basis: all, explored })
}

pub fn is_empty_with_budget(a: &Wndcma, budget: usize) -> Result<bool, ResourceLimit> {
    backward_coverability(a, budget, true).map(|r| !r.nonempty)
}

pub fn is_empty(a: &Wndcma) -> Result<bool, ResourceLimit> {
    is_empty_with_budget(a, DEFAULT_BUDGET)
}

/// Value choices at the next position: every present value, or a fresh
/// chain of `depth` values under a present value or as a new root chain.
pub(crate) fn value_choices(word: &DataWord, level: usize) -> Vec<(Option<u32>, usize)> {
    let mut out = Vec::new();
    for v in 0..word.values.len() as u32 {
        out.push((Some(v), 0));
    }
    for depth in 1..=level + 1 {
        out.push((None, depth));
    }
    for v in 0..word.values.len() as u32 {
        let lv = word.value(v).level as usize;
        for depth in 1..=level.saturating_sub(lv) {
            out.push((Some(v), depth));
        }
    }
    out
}

/// Extends `word` by the chosen value and returns its id.
pub(crate) fn realise(word: &mut DataWord, choice: (Option<u32>, usize)) -> u32 {
    let (anchor, depth) = choice;
    if depth == 0 {
        return anchor.expect("present value");
    }
    let mut cur = anchor;
    for _ in 0..depth {
        cur = Some(word.fresh_value(cur));
    }
    cur.unwrap()
}

/// Shortest accepted word of length ≤ `max_len`, by breadth-first search.
/// A configuration is dropped when an earlier one at the same control state
/// dominates it: anything it can still do, the dominating one can do too.
pub fn find_witness(a: &Wndcma, max_len: usize) -> Option<DataWord> {
    let owned;
    let a = if a.stuck_accepts {
        owned = ndcma::intersect(&ndcma::universal(&a.alphabet, a.level), a).expect("same alphabet");
        &owned
    } else {
        a
    };
    let start = a.initial_config();
    if a.is_final(start.state) {
        return Some(DataWord::default());
    }
    let mut seen: HashMap<StateId, Vec<AbstractConfig>> = HashMap::new();
    seen.entry(start.state).or_default().push(AbstractConfig::new(start.state, Vec::new()));
    let mut layer: Vec<(DataWord, Configuration)> = vec![(DataWord::default(), start)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, c) in &layer {
            let outgoing: BTreeSet<u32> = a.outgoing(c.state).map(|(k, _)| k.letter).collect();
            for letter in outgoing {
                for choice in value_choices(word, a.level) {
                    let mut w = word.clone();
                    let v = realise(&mut w, choice);
                    let chain = w.chain(v);
                    for c2 in a.step_id(c, letter, &chain) {
                        w.letters.push((a.alphabet[letter as usize].clone(), v));
                        if a.is_final(c2.state) {
                            return Some(w.canonical());
                        }
                        let abs = AbstractConfig::of(&c2, &w);
                        let bucket = seen.entry(c2.state).or_default();
                        if bucket.iter().any(|old| embed_leq(&abs, old)) {
                            w.letters.pop();
                            continue;
                        }
                        bucket.push(abs);
                        next.push((w.clone(), c2));
                        w.letters.pop();
                    }
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        layer = next;
    }
    None
}
