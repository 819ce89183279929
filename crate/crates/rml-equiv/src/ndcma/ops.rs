//! Boolean closures.
//!
//! Products are built by forward exploration: alongside the reachable
//! control pairs we keep, per level, the set of label pairs that can sit in
//! memory. Product transitions are generated only for signatures drawn from
//! those sets, driven by the real transitions of either operand. A side
//! without a matching transition moves to its sink and stays there.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{NdcmaError, StateId, TransKey, Wndcma};

pub fn complement(a: &Wndcma) -> Result<Wndcma, NdcmaError> {
    if !a.is_deterministic() {
        return Err(NdcmaError::NotDeterministic);
    }
    let mut c = a.clone();
    c.finals = (0..a.states.len() as StateId).filter(|s| !a.finals.contains(s)).collect();
    c.stuck_accepts = !a.stuck_accepts;
    Ok(c)
}

/// Materialises the sink: every (state, letter, signature) over the states
/// plus the sink gets exactly one transition. Exponential in the level.
pub fn complete(a: &Wndcma) -> Result<Wndcma, NdcmaError> {
    if !a.is_deterministic() {
        return Err(NdcmaError::NotDeterministic);
    }
    let mut c = a.clone();
    let mut name = "sink".to_string();
    while c.state_id(&name).is_some() {
        name.push('\'');
    }
    let sink = c.add_state(name);
    if a.stuck_accepts {
        c.finals.insert(sink);
    }
    let n = c.states.len() as StateId;
    let entries: Vec<Option<StateId>> = std::iter::once(None).chain((0..n).map(Some)).collect();
    for i in 0..=a.level {
        let mut sig = vec![None; i + 1];
        let mut idx = vec![0usize; i + 1];
        loop {
            for (j, k) in idx.iter().enumerate() {
                sig[j] = entries[*k];
            }
            for s in 0..n {
                for l in 0..a.alphabet.len() as u32 {
                    let key = TransKey { state: s, letter: l, sig: sig.clone() };
                    if !c.delta.contains_key(&key) {
                        c.add_transition(s, l, sig.clone(), sink, vec![sink; i + 1]);
                    }
                }
            }
            // odometer over signature entries
            let mut j = 0;
            while j <= i {
                idx[j] += 1;
                if idx[j] < entries.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j > i {
                break;
            }
        }
    }
    Ok(c)
}

/// One accepting state looping on every well-formed signature.
pub fn universal(alphabet: &[String], level: usize) -> Wndcma {
    let mut u = Wndcma::new(alphabet, level);
    let s = u.add_state("univ");
    u.initial = s;
    u.finals.insert(s);
    for l in 0..u.alphabet.len() as u32 {
        for i in 0..=level {
            for k in 0..=i + 1 {
                let sig = (0..=i).map(|j| if j < k { Some(s) } else { None }).collect();
                u.add_transition(s, l, sig, s, vec![s; i + 1]);
            }
        }
    }
    u
}

pub fn intersect(a: &Wndcma, b: &Wndcma) -> Result<Wndcma, NdcmaError> {
    product(a, b, Op::And)
}

pub fn union(a: &Wndcma, b: &Wndcma) -> Result<Wndcma, NdcmaError> {
    product(a, b, Op::Or)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    And,
    Or,
}

impl Op {
    fn apply(self, x: bool, y: bool) -> bool {
        match self {
            Op::And => x && y,
            Op::Or => x || y,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Side {
    S(StateId),
    Sink,
}

type Pair = (Side, Side);

struct Builder<'a> {
    a: &'a Wndcma,
    b: &'a Wndcma,
    op: Op,
    out: Wndcma,
    ids: HashMap<Pair, StateId>,
    pairs: Vec<Pair>,
    names: BTreeSet<String>,
    /// label ids per level, indexed by left and by right component
    by_left: Vec<BTreeMap<Side, BTreeSet<StateId>>>,
    by_right: Vec<BTreeMap<Side, BTreeSet<StateId>>>,
    label_count: usize,
    control: BTreeSet<StateId>,
}

fn side_name(w: &Wndcma, s: Side) -> String {
    match s {
        Side::S(s) => w.state_name(s).to_string(),
        Side::Sink => "_".to_string(),
    }
}

impl<'a> Builder<'a> {
    fn intern(&mut self, p: Pair) -> StateId {
        if let Some(id) = self.ids.get(&p) {
            return *id;
        }
        let mut name = format!("<{};{}>", side_name(self.a, p.0), side_name(self.b, p.1));
        while self.names.contains(&name) {
            name.push('\'');
        }
        self.names.insert(name.clone());
        let id = self.out.add_state(name);
        let fin = |w: &Wndcma, s: Side| match s {
            Side::S(s) => w.is_final(s),
            Side::Sink => w.stuck_accepts,
        };
        if self.op.apply(fin(self.a, p.0), fin(self.b, p.1)) {
            self.out.finals.insert(id);
        }
        self.ids.insert(p, id);
        self.pairs.push(p);
        id
    }

    fn dead(&self, p: Pair) -> bool {
        match self.op {
            Op::And => {
                (p.0 == Side::Sink && !self.a.stuck_accepts) || (p.1 == Side::Sink && !self.b.stuck_accepts)
            }
            Op::Or => p.0 == Side::Sink && p.1 == Side::Sink,
        }
    }

    fn add_label(&mut self, level: usize, id: StateId) {
        let (l, r) = self.pairs[id as usize];
        if self.by_left[level].entry(l).or_default().insert(id) {
            self.label_count += 1;
        }
        self.by_right[level].entry(r).or_default().insert(id);
    }

    /// All product signatures whose chosen component matches `sig`.
    fn sigs(&self, sig: &[Option<StateId>], left: bool) -> Vec<Vec<Option<StateId>>> {
        let mut acc: Vec<Vec<Option<StateId>>> = vec![Vec::new()];
        for (j, e) in sig.iter().enumerate() {
            let choices: Vec<Option<StateId>> = match e {
                None => vec![None],
                Some(s) => {
                    let index = if left { &self.by_left[j] } else { &self.by_right[j] };
                    match index.get(&Side::S(*s)) {
                        Some(set) => set.iter().map(|x| Some(*x)).collect(),
                        None => return Vec::new(),
                    }
                }
            };
            let mut next = Vec::with_capacity(acc.len() * choices.len());
            for prefix in &acc {
                for c in &choices {
                    let mut v = prefix.clone();
                    v.push(*c);
                    next.push(v);
                }
            }
            acc = next;
        }
        acc
    }

    fn component_sig(&self, psig: &[Option<StateId>], left: bool) -> Option<Vec<Option<StateId>>> {
        psig.iter()
            .map(|e| match e {
                None => Some(None),
                Some(id) => {
                    let p = self.pairs[*id as usize];
                    match if left { p.0 } else { p.1 } {
                        Side::S(s) => Some(Some(s)),
                        Side::Sink => None,
                    }
                }
            })
            .collect()
    }

    fn lookup(&self, left: bool, side: Side, letter: u32, psig: &[Option<StateId>]) -> Option<Vec<(Side, Vec<Side>)>> {
        let w = if left { self.a } else { self.b };
        let Side::S(s) = side else { return None };
        if psig.len() > w.level + 1 {
            return None;
        }
        let sig = self.component_sig(psig, left)?;
        let ts = w.delta.get(&TransKey { state: s, letter, sig })?;
        Some(
            ts.iter()
                .map(|t| (Side::S(t.state), t.update.iter().map(|u| Side::S(*u)).collect()))
                .collect(),
        )
    }

    fn sink_move(len: usize) -> Vec<(Side, Vec<Side>)> {
        vec![(Side::Sink, vec![Side::Sink; len])]
    }

    fn emit(&mut self, src: StateId, letter: u32, psig: Vec<Option<StateId>>, lt: &[(Side, Vec<Side>)], rt: &[(Side, Vec<Side>)]) {
        for (ls, lu) in lt {
            for (rs, ru) in rt {
                let tp = (*ls, *rs);
                if self.dead(tp) {
                    continue;
                }
                let t = self.intern(tp);
                let upd: Vec<StateId> = lu.iter().zip(ru).map(|(x, y)| self.intern((*x, *y))).collect();
                for (j, u) in upd.iter().enumerate() {
                    self.add_label(j, *u);
                }
                self.control.insert(t);
                self.out.add_transition(src, letter, psig.clone(), t, upd);
            }
        }
    }

    fn expand(&mut self, p: StateId) {
        let (x, y) = self.pairs[p as usize];
        if let Side::S(xs) = x {
            let keys: Vec<TransKey> = self.a.outgoing(xs).map(|(k, _)| k.clone()).collect();
            for k in keys {
                for psig in self.sigs(&k.sig, true) {
                    let lt = self.lookup(true, x, k.letter, &psig).unwrap_or_default();
                    let rt = self.lookup(false, y, k.letter, &psig).unwrap_or_else(|| Self::sink_move(psig.len()));
                    self.emit(p, k.letter, psig, &lt, &rt);
                }
            }
        }
        if let Side::S(ys) = y {
            let keys: Vec<TransKey> = self.b.outgoing(ys).map(|(k, _)| k.clone()).collect();
            for k in keys {
                for psig in self.sigs(&k.sig, false) {
                    if self.lookup(true, x, k.letter, &psig).is_some() {
                        continue;
                    }
                    let rt = self.lookup(false, y, k.letter, &psig).unwrap_or_default();
                    let lt = Self::sink_move(psig.len());
                    self.emit(p, k.letter, psig, &lt, &rt);
                }
            }
        }
    }
}

fn product(a: &Wndcma, b: &Wndcma, op: Op) -> Result<Wndcma, NdcmaError> {
    if a.alphabet != b.alphabet {
        return Err(NdcmaError::AlphabetMismatch);
    }
    let level = a.level.max(b.level);
    let mut bld = Builder {
        a,
        b,
        op,
        out: Wndcma::new(&a.alphabet, level),
        ids: HashMap::new(),
        pairs: Vec::new(),
        names: BTreeSet::new(),
        by_left: vec![BTreeMap::new(); level + 1],
        by_right: vec![BTreeMap::new(); level + 1],
        label_count: 0,
        control: BTreeSet::new(),
    };
    bld.out.stuck_accepts = op.apply(a.stuck_accepts, b.stuck_accepts);
    let init = bld.intern((Side::S(a.initial), Side::S(b.initial)));
    bld.out.initial = init;
    bld.control.insert(init);
    // expanded[p] = label count at the time p was last expanded
    let mut expanded: BTreeMap<StateId, usize> = BTreeMap::new();
    loop {
        let pending: Vec<StateId> = bld
            .control
            .iter()
            .copied()
            .filter(|p| expanded.get(p) != Some(&bld.label_count))
            .collect();
        if pending.is_empty() {
            break;
        }
        for p in pending {
            expanded.insert(p, bld.label_count);
            bld.expand(p);
        }
    }
    Ok(bld.out)
}
