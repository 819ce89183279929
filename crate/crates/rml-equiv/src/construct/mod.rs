//! Compositional construction of the automata of canonical terms, shared by
//! both encodings.
//!
//! Each canonical term is compiled, for one fixed value of its int-typed free
//! variables, into an [`Auto`]: a deterministic automaton whose initial state
//! has a single transition on the initial move and whose letters are interned
//! moves. Subterm automata are glued by state embedding, silent-jump
//! resolution ([`Auto::resolve_eps`]) and the thread constructions in
//! [`threads`].

pub(crate) mod newref;
pub(crate) mod threads;

use crate::arena::{Base, Component, Move, Step};
use crate::canonical::CanonicalTerm as C;
pub(crate) use crate::family::Tag;
use crate::family::{CompileError, Encoding};
use crate::rml_lang::RmlType;
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub(crate) type St = u32;
pub(crate) type Sig = Vec<Option<St>>;
pub(crate) type Lt = u32;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Letter {
    Init,
    Mv(Move, Tag),
}

pub(crate) const INIT: Lt = 0;

#[derive(Default)]
pub(crate) struct Letters {
    list: Vec<Letter>,
    map: HashMap<Letter, Lt>,
}

impl Letters {
    fn new() -> Letters {
        let mut l = Letters::default();
        l.id(Letter::Init);
        l
    }

    pub fn id(&mut self, l: Letter) -> Lt {
        if let Some(i) = self.map.get(&l) {
            return *i;
        }
        let i = self.list.len() as Lt;
        self.list.push(l.clone());
        self.map.insert(l, i);
        i
    }

    pub fn mv(&mut self, m: Move) -> Lt {
        self.id(Letter::Mv(m, Tag::Plain))
    }

    pub fn get(&self, i: Lt) -> &Letter {
        &self.list[i as usize]
    }

    pub fn as_move(&self, i: Lt) -> Option<(&Move, Tag)> {
        match self.get(i) {
            Letter::Init => None,
            Letter::Mv(m, t) => Some((m, *t)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Tr {
    pub tgt: St,
    pub upd: Vec<St>,
}

pub(crate) type Key = (St, Lt, Sig);

#[derive(Clone, Debug)]
pub(crate) struct Auto {
    pub names: Vec<String>,
    pub init: St,
    pub finals: BTreeSet<St>,
    pub delta: BTreeMap<Key, Tr>,
}

/// At `src`, when the root cell holds `root`, continue silently as `to` would
/// with its root cell holding `expect`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Eps {
    pub src: St,
    pub root: St,
    pub to: St,
    pub expect: St,
}

fn conflict(what: &str) -> CompileError {
    CompileError::Internal(format!("nondeterminism in {}", what))
}

impl Auto {
    pub fn new(init_name: &str) -> Auto {
        Auto {
            names: vec![init_name.to_string()],
            init: 0,
            finals: BTreeSet::from([0]),
            delta: BTreeMap::new(),
        }
    }

    pub fn state(&mut self, name: impl Into<String>) -> St {
        self.names.push(name.into());
        (self.names.len() - 1) as St
    }

    pub fn add(&mut self, s: St, l: Lt, sig: Sig, tgt: St, upd: Vec<St>) -> Result<(), CompileError> {
        debug_assert_eq!(sig.len(), upd.len());
        let tr = Tr { tgt, upd };
        match self.delta.get(&(s, l, sig.clone())) {
            Some(old) if *old != tr => Err(conflict(&self.names[s as usize])),
            Some(_) => Ok(()),
            None => {
                self.delta.insert((s, l, sig), tr);
                Ok(())
            }
        }
    }

    pub fn level(&self) -> usize {
        self.delta.keys().map(|k| k.2.len() - 1).max().unwrap_or(0)
    }

    pub fn out(&self, s: St) -> impl Iterator<Item = (&Key, &Tr)> {
        self.delta.range((s, 0, Vec::new())..).take_while(move |(k, _)| k.0 == s)
    }

    /// Target and root label of the initial transition.
    pub fn secondary(&self) -> (St, St) {
        let (_, tr) = self
            .out(self.init)
            .next()
            .expect("automaton without initial transition");
        (tr.tgt, tr.upd[0])
    }

    pub fn inner_finals(&self) -> Vec<St> {
        self.finals.iter().copied().filter(|f| *f != self.init).collect()
    }

    /// Copies the non-initial states of `other`; returns the renaming, with
    /// `St::MAX` for the initial state. Transitions are not copied.
    pub fn import(&mut self, other: &Auto, prefix: &str) -> Vec<St> {
        other
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                if i as St == other.init {
                    St::MAX
                } else {
                    self.state(format!("{}{}", prefix, n))
                }
            })
            .collect()
    }

    /// Copies every non-initial transition of `other` through `map`.
    pub fn copy_from(&mut self, other: &Auto, map: &[St]) -> Result<(), CompileError> {
        for ((s, l, sig), tr) in &other.delta {
            if *s == other.init {
                continue;
            }
            self.add(map[*s as usize], *l, map_sig(sig, map), map[tr.tgt as usize], map_upd(&tr.upd, map))?;
        }
        Ok(())
    }

    /// Gives every state in `targets` the union of the outgoing transitions
    /// of `sources`.
    pub fn close_uniform(&mut self, sources: &[St], targets: &[St]) -> Result<(), CompileError> {
        let mut union: Vec<(Lt, Sig, Tr)> = Vec::new();
        for s in sources {
            for ((_, l, sig), tr) in self.out(*s) {
                union.push((*l, sig.clone(), tr.clone()));
            }
        }
        for t in targets {
            for (l, sig, tr) in &union {
                self.add(*t, *l, sig.clone(), tr.tgt, tr.upd.clone())?;
            }
        }
        Ok(())
    }

    pub fn uniform(&mut self) -> Result<(), CompileError> {
        let f = self.inner_finals();
        self.close_uniform(&f, &f)
    }

    /// Replaces each silent jump by copies of the transitions it leads to.
    /// Chains of jumps are followed; a cycle of jumps contributes nothing.
    pub fn resolve_eps(&mut self, eps: &[Eps]) -> Result<(), CompileError> {
        let jumps: HashMap<(St, St), (St, St)> =
            eps.iter().map(|e| ((e.src, e.root), (e.to, e.expect))).collect();
        let mut new = Vec::new();
        for e in eps {
            let mut seen = BTreeSet::from([(e.src, e.root)]);
            let mut cur = (e.to, e.expect);
            loop {
                if !seen.insert(cur) {
                    break;
                }
                if let Some(nx) = jumps.get(&cur) {
                    cur = *nx;
                    continue;
                }
                for ((_, l, sig), tr) in self.out(cur.0) {
                    if sig[0] == Some(cur.1) {
                        let mut sig = sig.clone();
                        sig[0] = Some(e.root);
                        new.push((e.src, *l, sig, tr.clone()));
                    }
                }
                break;
            }
        }
        for (s, l, sig, tr) in new {
            self.add(s, l, sig, tr.tgt, tr.upd)?;
        }
        Ok(())
    }

    /// Drops transitions that cannot fire on any run or that lead to no final
    /// state, then the states no longer mentioned.
    pub fn trim(&mut self) {
        let depth = self.level() + 1;
        let mut reach = BTreeSet::from([self.init]);
        let mut written: Vec<BTreeSet<St>> = vec![BTreeSet::new(); depth];
        let enabled = |reach: &BTreeSet<St>, written: &Vec<BTreeSet<St>>, k: &Key| {
            reach.contains(&k.0)
                && k.2.iter().enumerate().all(|(i, x)| x.is_none_or(|x| written[i].contains(&x)))
        };
        loop {
            let mut changed = false;
            for (k, tr) in &self.delta {
                if enabled(&reach, &written, k) {
                    changed |= reach.insert(tr.tgt);
                    for (i, u) in tr.upd.iter().enumerate() {
                        changed |= written[i].insert(*u);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut co: BTreeSet<St> = self.finals.clone();
        loop {
            let mut changed = false;
            for (k, tr) in &self.delta {
                if co.contains(&tr.tgt) && enabled(&reach, &written, k) {
                    changed |= co.insert(k.0);
                }
            }
            if !changed {
                break;
            }
        }
        let init = self.init;
        self.delta
            .retain(|k, tr| k.0 == init || (co.contains(&tr.tgt) && enabled(&reach, &written, k)));
        self.finals.retain(|f| reach.contains(f));
        self.compact();
    }

    fn compact(&mut self) {
        let mut used = BTreeSet::from([self.init]);
        used.extend(self.finals.iter().copied());
        for ((s, _, sig), tr) in &self.delta {
            used.insert(*s);
            used.insert(tr.tgt);
            used.extend(sig.iter().flatten().copied());
            used.extend(tr.upd.iter().copied());
        }
        let mut map = vec![St::MAX; self.names.len()];
        let mut names = Vec::with_capacity(used.len());
        for s in &used {
            map[*s as usize] = names.len() as St;
            names.push(std::mem::take(&mut self.names[*s as usize]));
        }
        self.names = names;
        self.init = map[self.init as usize];
        self.finals = self.finals.iter().map(|f| map[*f as usize]).collect();
        self.delta = std::mem::take(&mut self.delta)
            .into_iter()
            .map(|((s, l, sig), tr)| {
                ((map[s as usize], l, map_sig(&sig, &map)), Tr { tgt: map[tr.tgt as usize], upd: map_upd(&tr.upd, &map) })
            })
            .collect();
    }
}

pub(crate) fn map_sig(sig: &[Option<St>], map: &[St]) -> Sig {
    sig.iter().map(|x| x.map(|x| map[x as usize])).collect()
}

pub(crate) fn map_upd(upd: &[St], map: &[St]) -> Vec<St> {
    upd.iter().map(|x| map[*x as usize]).collect()
}

pub(crate) fn values(ty: &RmlType, k: u32) -> Vec<Base> {
    match ty {
        RmlType::Unit => vec![Base::Unit],
        RmlType::Int => (0..k).map(Base::Int).collect(),
        _ => Vec::new(),
    }
}

pub(crate) type Env = BTreeMap<String, u32>;

/// State of one compilation.
pub(crate) struct Cx {
    pub enc: Encoding,
    pub k: u32,
    pub letters: Letters,
    scope: Vec<(String, RmlType)>,
}

fn violation(msg: impl Into<String>) -> CompileError {
    CompileError::FragmentViolation(msg.into())
}

impl Cx {
    pub fn new(enc: Encoding, k: u32, context: &[(String, RmlType)]) -> Cx {
        Cx { enc, k, letters: Letters::new(), scope: context.to_vec() }
    }

    pub fn ty(&self, x: &str) -> Result<RmlType, CompileError> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| violation(format!("unbound variable {}", x)))
    }

    fn with<R>(&mut self, x: &str, ty: &RmlType, f: impl FnOnce(&mut Cx) -> R) -> R {
        self.scope.push((x.to_string(), ty.clone()));
        let r = f(self);
        self.scope.pop();
        r
    }

    fn value(&self, x: &str, env: &Env) -> Result<Base, CompileError> {
        match self.ty(x)? {
            RmlType::Unit => Ok(Base::Unit),
            RmlType::Int => env
                .get(x)
                .map(|v| Base::Int(*v))
                .ok_or_else(|| violation(format!("no value for {}", x))),
            t => Err(violation(format!("{} has non-base type {}", x, t))),
        }
    }

    fn int(&self, x: &C, env: &Env) -> Result<u32, CompileError> {
        match x {
            C::Var(x) => match self.value(x, env)? {
                Base::Int(v) => Ok(v),
                _ => Err(violation(format!("{} is not an int", x))),
            },
            _ => Err(violation("operand is not a variable")),
        }
    }

    pub fn compile(&mut self, t: &C, env: &Env) -> Result<Auto, CompileError> {
        let k = self.k;
        match t {
            C::Unit => Ok(self.answer(Base::Unit)),
            C::Int(i) => Ok(self.answer(Base::Int(i % k))),
            C::Var(x) => {
                let b = self.value(x, env)?;
                Ok(self.answer(b))
            }
            C::Succ(x) => {
                let v = self.int(x, env)?;
                Ok(self.answer(Base::Int((v + 1) % k)))
            }
            C::Pred(x) => {
                let v = self.int(x, env)?;
                Ok(self.answer(Base::Int((v + k - 1) % k)))
            }
            C::If(g, a, e) => {
                if self.int(g, env)? == 0 {
                    self.compile(e, env)
                } else {
                    self.compile(a, env)
                }
            }
            C::Assign(x, y) => {
                let x = var_of(x)?;
                let v = self.int(y, env)?;
                self.cell_op(x, Base::Write(v), &[Base::Ok], |_| Base::Unit)
            }
            C::Deref(x) => {
                let x = var_of(x)?;
                let answers: Vec<Base> = (0..k).map(Base::Val).collect();
                self.cell_op(x, Base::Read, &answers, |b| match b {
                    Base::Val(j) => Base::Int(j),
                    _ => Base::Unit,
                })
            }
            C::Lam(x, ty, body) => {
                let mut openers = Vec::new();
                for b in values(ty, k) {
                    let open = self.letters.mv(Move::rhs(vec![Step::Arg], b));
                    let m = self.with(x, ty, |cx| cx.compile(body, &bind(env, x, b)))?;
                    openers.push((open, m));
                }
                threads::host(self, openers, &|m: &Move| m.under(&[Step::Res]))
            }
            C::Mkvar(r, w) => {
                let openers = self.mkvar_threads(r, w, env, |b| Move::rhs(vec![], b))?;
                threads::host(self, openers, &|m: &Move| cell_answer(m, &[]))
            }
            C::NewRef(x, body) => {
                let m = self.with(x, &RmlType::IntRef, |cx| cx.compile(body, env))?;
                newref::bind_cell(self, x, &m)
            }
            C::While(g, body) => {
                let m = self.compile(g, env)?;
                let n = self.compile(body, env)?;
                self.while_loop(&m, &n)
            }
            C::Let(x, ty, bound, body) => match bound.as_ref() {
                C::App(z, arg) => {
                    let z = var_of(z)?;
                    self.let_app(x, ty, z, arg, body, env)
                }
                _ => {
                    let m = self.compile(bound, env)?;
                    self.let_base(&m, &mut |cx, b| cx.with(x, ty, |cx| cx.compile(body, &bind(env, x, b))))
                }
            },
            C::App(..) => Err(violation("application outside a let")),
        }
    }

    /// `s1 -q0-> s2 -a0(b)-> s3`
    fn answer(&mut self, b: Base) -> Auto {
        let mut a = Auto::new("v1");
        let s2 = a.state("v2");
        let s3 = a.state("v3");
        let l = self.letters.mv(Move::rhs(vec![], b));
        a.delta.insert((a.init, INIT, vec![None]), Tr { tgt: s2, upd: vec![s2] });
        a.delta.insert((s2, l, vec![Some(s2)]), Tr { tgt: s3, upd: vec![s3] });
        a.finals.insert(s3);
        a
    }

    /// Question `q` on the cell `x` followed by one of `answers`, after which
    /// the term returns `result(answer)`.
    fn cell_op(&mut self, x: &str, q: Base, answers: &[Base], result: impl Fn(Base) -> Base) -> Result<Auto, CompileError> {
        if self.ty(x)? != RmlType::IntRef {
            return Err(violation(format!("{} is not a reference", x)));
        }
        let mut a = Auto::new("c1");
        let s2 = a.state("c2");
        let s3 = a.state("c3");
        a.add(a.init, INIT, vec![None], s2, vec![s2])?;
        let lq = self.letters.mv(Move::var(x, vec![], q));
        let pstrict = self.enc == Encoding::PStrict;
        if pstrict {
            a.add(s2, lq, vec![Some(s2), None], s3, vec![s2, s3])?;
        } else {
            a.add(s2, lq, vec![Some(s2)], s3, vec![s3])?;
        }
        for (i, ans) in answers.iter().enumerate() {
            let s4 = a.state(format!("c4_{}", i));
            let s5 = a.state(format!("c5_{}", i));
            let la = self.letters.mv(Move::var(x, vec![], *ans));
            let lr = self.letters.mv(Move::rhs(vec![], result(*ans)));
            if pstrict {
                a.add(s3, la, vec![Some(s2), Some(s3)], s4, vec![s2, s4])?;
                a.add(s4, lr, vec![Some(s2)], s5, vec![s5])?;
            } else {
                a.add(s3, la, vec![Some(s3)], s4, vec![s4])?;
                a.add(s4, lr, vec![Some(s4)], s5, vec![s5])?;
            }
            a.finals.insert(s5);
        }
        a.uniform()?;
        Ok(a)
    }

    /// Threads of `mkvar r w`: a read runs `r`, a write of `j` runs `w` with
    /// its argument bound to `j`. `opener` names the question for a base move.
    pub(crate) fn mkvar_threads(
        &mut self,
        r: &C,
        w: &C,
        env: &Env,
        opener: impl Fn(Base) -> Move,
    ) -> Result<Vec<(Lt, Auto)>, CompileError> {
        let (C::Lam(_, _, rb), C::Lam(v, vt, wb)) = (r, w) else {
            return Err(violation("mkvar operands must be abstractions"));
        };
        let mut openers = Vec::new();
        let read = self.letters.mv(opener(Base::Read));
        openers.push((read, self.compile(rb, env)?));
        for j in 0..self.k {
            let open = self.letters.mv(opener(Base::Write(j)));
            let m = self.with(v, vt, |cx| cx.compile(wb, &bind(env, v, Base::Int(j))))?;
            openers.push((open, m));
        }
        Ok(openers)
    }

    /// Answers of `m` split into the base values they return: each entry is
    /// (source, root label, value).
    fn final_answers(&self, m: &Auto) -> Result<Vec<(Key, Base)>, CompileError> {
        let mut out = Vec::new();
        for (key, tr) in &m.delta {
            if key.0 == m.init || !m.finals.contains(&tr.tgt) {
                continue;
            }
            match self.letters.as_move(key.1) {
                Some((mv, _)) if mv.is_rhs() && mv.path.is_empty() && key.2.len() == 1 => out.push((key.clone(), mv.base)),
                _ => return Err(CompileError::Internal("unexpected move into a final state".into())),
            }
        }
        Ok(out)
    }

    /// Runs `m` and continues, on its answer `b`, as the automaton `cont(b)`.
    pub(crate) fn let_base(
        &mut self,
        m: &Auto,
        cont: &mut dyn FnMut(&mut Cx, Base) -> Result<Auto, CompileError>,
    ) -> Result<Auto, CompileError> {
        let mut a = Auto::new("l1");
        let mm = a.import(m, "M.");
        let (s_m, l_m) = m.secondary();
        a.add(a.init, INIT, vec![None], mm[s_m as usize], vec![mm[l_m as usize]])?;
        let answers = self.final_answers(m)?;
        let answer_keys: BTreeSet<&Key> = answers.iter().map(|(k, _)| k).collect();
        for (key, tr) in &m.delta {
            if key.0 == m.init || answer_keys.contains(key) {
                continue;
            }
            a.add(mm[key.0 as usize], key.1, map_sig(&key.2, &mm), mm[tr.tgt as usize], map_upd(&tr.upd, &mm))?;
        }
        let mut starts: BTreeMap<Base, (St, St)> = BTreeMap::new();
        let mut eps = Vec::new();
        for (key, b) in &answers {
            if !starts.contains_key(b) {
                let n = cont(self, *b)?;
                let nm = a.import(&n, &format!("N{}.", base_tag(*b)));
                a.copy_from(&n, &nm)?;
                a.finals.extend(n.inner_finals().iter().map(|f| nm[*f as usize]));
                let (s_n, l_n) = n.secondary();
                starts.insert(*b, (nm[s_n as usize], nm[l_n as usize]));
            }
            let (to, expect) = starts[b];
            eps.push(Eps { src: mm[key.0 as usize], root: mm[key.2[0].unwrap() as usize], to, expect });
        }
        a.resolve_eps(&eps)?;
        a.uniform()?;
        a.trim();
        Ok(a)
    }

    fn while_loop(&mut self, m: &Auto, n: &Auto) -> Result<Auto, CompileError> {
        let mut a = Auto::new("w1");
        let done = a.state("w2");
        a.finals.insert(done);
        let mm = a.import(m, "G.");
        let nm = a.import(n, "B.");
        let (s_m, l_m) = m.secondary();
        let (s_n, l_n) = n.secondary();
        let (m0, ml) = (mm[s_m as usize], mm[l_m as usize]);
        let (n0, nl) = (nm[s_n as usize], nm[l_n as usize]);
        a.add(a.init, INIT, vec![None], m0, vec![ml])?;
        let unit = self.letters.mv(Move::rhs(vec![], Base::Unit));
        let mut eps = Vec::new();
        let m_ans = self.final_answers(m)?;
        let n_ans = self.final_answers(n)?;
        let m_keys: BTreeSet<&Key> = m_ans.iter().map(|(k, _)| k).collect();
        let n_keys: BTreeSet<&Key> = n_ans.iter().map(|(k, _)| k).collect();
        for (key, tr) in &m.delta {
            if key.0 != m.init && !m_keys.contains(key) {
                a.add(mm[key.0 as usize], key.1, map_sig(&key.2, &mm), mm[tr.tgt as usize], map_upd(&tr.upd, &mm))?;
            }
        }
        for (key, tr) in &n.delta {
            if key.0 != n.init && !n_keys.contains(key) {
                a.add(nm[key.0 as usize], key.1, map_sig(&key.2, &nm), nm[tr.tgt as usize], map_upd(&tr.upd, &nm))?;
            }
        }
        for ((s, _, sig), b) in &m_ans {
            let (src, root) = (mm[*s as usize], mm[sig[0].unwrap() as usize]);
            if *b == Base::Int(0) {
                a.add(src, unit, vec![Some(root)], done, vec![done])?;
            } else {
                eps.push(Eps { src, root, to: n0, expect: nl });
            }
        }
        for ((s, _, sig), _) in &n_ans {
            eps.push(Eps { src: nm[*s as usize], root: nm[sig[0].unwrap() as usize], to: m0, expect: ml });
        }
        a.resolve_eps(&eps)?;
        a.trim();
        Ok(a)
    }

    fn let_app(&mut self, x: &str, xty: &RmlType, z: &str, arg: &C, body: &C, env: &Env) -> Result<Auto, CompileError> {
        let zty = self.ty(z)?;
        let RmlType::Arrow(dom, cod) = &zty else {
            return Err(violation(format!("{} is not a function", z)));
        };
        if cod.as_ref() != xty {
            return Err(violation(format!("result type of {} does not match", z)));
        }
        let call = match arg {
            C::Var(y) => Call::Value(self.value(y, env)?),
            C::Lam(y, yty, m) => {
                let mut openers = Vec::new();
                for b in values(yty, self.k) {
                    let open = self.letters.mv(Move::var(z, vec![Step::Arg, Step::Arg], b));
                    let t = self.with(y, yty, |cx| cx.compile(m, &bind(env, y, b)))?;
                    openers.push((open, t));
                }
                Call::Threads(openers, ArgShape::Fun)
            }
            C::Mkvar(r, w) => {
                let openers = self.mkvar_threads(r, w, env, |b| Move::var(z, vec![Step::Arg], b))?;
                Call::Threads(openers, ArgShape::Cell)
            }
            _ => return Err(violation("argument of an application must be canonical")),
        };
        if matches!(call, Call::Value(_)) != dom.is_base() {
            return Err(violation(format!("argument shape does not match the type of {}", z)));
        }
        if xty.is_base() {
            let m = match call {
                Call::Value(b) => self.call_value(z, b, xty)?,
                Call::Threads(openers, shape) => match self.enc {
                    Encoding::PStrict => crate::compile_pstrict::call_with_threads(self, z, openers, shape, xty)?,
                    Encoding::RForml => crate::compile_rforml::call_with_threads(self, z, openers, shape, xty)?,
                },
            };
            return self.let_base(&m, &mut |cx, b| cx.with(x, xty, |cx| cx.compile(body, &bind(env, x, b))));
        }
        if self.enc == Encoding::PStrict {
            return Err(violation(format!("{} has a non-base result", z)));
        }
        let n = self.with(x, xty, |cx| cx.compile(body, env))?;
        crate::compile_rforml::call_returning_function(self, x, z, call, &n)
    }

    /// `z b` evaluated for its base result.
    fn call_value(&mut self, z: &str, b: Base, xty: &RmlType) -> Result<Auto, CompileError> {
        let mut a = Auto::new("a1");
        let s2 = a.state("a2");
        let s3 = a.state("a3");
        a.add(a.init, INIT, vec![None], s2, vec![s2])?;
        let q = self.letters.mv(Move::var(z, vec![Step::Arg], b));
        let pstrict = self.enc == Encoding::PStrict;
        if pstrict {
            a.add(s2, q, vec![Some(s2), None], s3, vec![s2, s3])?;
        } else {
            a.add(s2, q, vec![Some(s2)], s3, vec![s3])?;
        }
        for r in values(xty, self.k) {
            let tag = base_tag(r);
            let s4 = a.state(format!("a4{}", tag));
            let s5 = a.state(format!("a5{}", tag));
            let la = self.letters.mv(Move::var(z, vec![Step::Res], r));
            let lr = self.letters.mv(Move::rhs(vec![], r));
            if pstrict {
                a.add(s3, la, vec![Some(s2), Some(s3)], s4, vec![s2, s4])?;
                a.add(s4, lr, vec![Some(s2)], s5, vec![s5])?;
            } else {
                a.add(s3, la, vec![Some(s3)], s4, vec![s4])?;
                a.add(s4, lr, vec![Some(s4)], s5, vec![s5])?;
            }
            a.finals.insert(s5);
        }
        a.uniform()?;
        Ok(a)
    }
}

pub(crate) enum ArgShape {
    Fun,
    Cell,
}

pub(crate) enum Call {
    Value(Base),
    Threads(Vec<(Lt, Auto)>, ArgShape),
}

fn var_of(c: &C) -> Result<&str, CompileError> {
    match c {
        C::Var(x) => Ok(x),
        _ => Err(violation("expected a variable")),
    }
}

pub(crate) fn bind(env: &Env, x: &str, b: Base) -> Env {
    let mut env = env.clone();
    if let Base::Int(v) = b {
        env.insert(x.to_string(), v);
    }
    env
}

fn base_tag(b: Base) -> String {
    match b {
        Base::Int(j) => j.to_string(),
        _ => "u".into(),
    }
}

/// Answer `a0(j)` / `a0` of a cell thread, placed as the answer to a read or
/// write question at `path` of the same component.
pub(crate) fn cell_answer(m: &Move, path: &[Step]) -> Move {
    let base = match m.base {
        Base::Int(j) => Base::Val(j),
        _ => Base::Ok,
    };
    Move { component: m.component.clone(), path: path.to_vec(), base }
}

/// Whether `m` belongs to the variable `x`.
pub(crate) fn on_var(m: &Move, x: &str) -> bool {
    matches!(&m.component, Component::Var(y) if y == x)
}
