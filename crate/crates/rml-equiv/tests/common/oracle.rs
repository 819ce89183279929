//! Reference semantics: a store-passing interpreter over the surface syntax
//! that plays every O-strategy up to a length bound and collects the data
//! word encodings of the complete plays.
//!
//! O's behaviour is a script of choices, one per O-move; runs are replayed
//! from scratch for each script prefix. Values P hands out are scoped by
//! frames: while a context call is pending, O may answer it or interrogate
//! the values passed to that call (and the values those return); with no
//! call pending, O may interrogate any value returned on the right.

use rml_equiv::arena::{Base, Component, Move, Step};
use rml_equiv::family::Encoding;
use rml_equiv::ndcma::DataWord;
use rml_equiv::rml_lang::{parse_context, parse_term, typecheck, RmlType, Term, TermKind};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

#[derive(Clone, Debug)]
enum V {
    Unit,
    Int(u32),
    Loc(usize),
    Clo(String, Rc<Term>, Env),
    Mk(Box<V>, Box<V>),
    /// A value owned by the context.
    Ctx(usize),
}

type Env = Rc<HashMap<String, V>>;

#[derive(Debug)]
enum Abort {
    /// O must choose among this many options but the script has ended.
    Need(usize),
    Diverge,
    TooLong,
}

#[derive(Clone, Debug)]
struct PlayMove {
    mv: Move,
    just: Option<usize>,
    by_o: bool,
    question: bool,
}

/// A context value: questions on it are P's and point at `intro`.
#[derive(Clone)]
struct CtxVal {
    component: Component,
    path: Vec<Step>,
    ty: RmlType,
    intro: usize,
}

/// A value P handed to O.
#[derive(Clone)]
struct Handle {
    component: Component,
    path: Vec<Step>,
    ty: RmlType,
    val: V,
    intro: usize,
}

struct Machine<'s> {
    k: u32,
    max_len: usize,
    script: &'s [usize],
    used: usize,
    store: Vec<u32>,
    fuel: u64,
    play: Vec<PlayMove>,
    ctx: Vec<CtxVal>,
    handles: Vec<Handle>,
    /// Handles reachable by O, innermost pending context call last.
    frames: Vec<Vec<usize>>,
}

fn base_of(v: &V) -> Base {
    match v {
        V::Int(j) => Base::Int(*j),
        _ => Base::Unit,
    }
}

fn values_of(ty: &RmlType, k: u32) -> Vec<V> {
    match ty {
        RmlType::Unit => vec![V::Unit],
        RmlType::Int => (0..k).map(V::Int).collect(),
        t => panic!("no finite value set for {}", t),
    }
}

fn extend(path: &[Step], s: Step) -> Vec<Step> {
    let mut p = path.to_vec();
    p.push(s);
    p
}

/// Things O can do when it is its turn.
enum Choice {
    Answer(V),
    Ask(usize, Base, Option<V>),
}

impl Machine<'_> {
    fn tick(&mut self) -> Result<(), Abort> {
        if self.fuel == 0 {
            return Err(Abort::Diverge);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn push(&mut self, mv: Move, just: Option<usize>, by_o: bool, question: bool) -> Result<usize, Abort> {
        if self.play.len() >= self.max_len {
            return Err(Abort::TooLong);
        }
        self.play.push(PlayMove { mv, just, by_o, question });
        Ok(self.play.len() - 1)
    }

    fn choose(&mut self, n: usize) -> Result<usize, Abort> {
        if self.used == self.script.len() {
            return Err(Abort::Need(n));
        }
        let c = self.script[self.used];
        self.used += 1;
        Ok(c)
    }

    /// O's questions on the handles of the current frame.
    fn questions(&self) -> Vec<Choice> {
        let mut out = Vec::new();
        for &i in self.frames.last().unwrap() {
            let h = &self.handles[i];
            match &h.ty {
                RmlType::Arrow(a, _) => {
                    for v in values_of(a, self.k) {
                        out.push(Choice::Ask(i, base_of(&v), Some(v)));
                    }
                }
                RmlType::IntRef => {
                    out.push(Choice::Ask(i, Base::Read, None));
                    for j in 0..self.k {
                        out.push(Choice::Ask(i, Base::Write(j), None));
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// Runs O's question `c` on a handle and P's answer to it.
    fn o_asks(&mut self, c: Choice) -> Result<(), Abort> {
        let Choice::Ask(hi, base, arg) = c else { unreachable!() };
        let h = self.handles[hi].clone();
        let qpath = match (&h.ty, base) {
            (RmlType::Arrow(..), _) => extend(&h.path, Step::Arg),
            _ => h.path.clone(),
        };
        let q = self.push(Move { component: h.component.clone(), path: qpath, base }, Some(h.intro), true, true)?;
        match (&h.ty, base) {
            (RmlType::Arrow(_, b), _) => {
                let r = self.apply(h.val.clone(), arg.unwrap())?;
                self.p_answers(q, &h.component, extend(&h.path, Step::Res), b, r)?;
            }
            (_, Base::Read) => {
                let r = self.deref(h.val.clone())?;
                let j = match r {
                    V::Int(j) => j,
                    _ => unreachable!(),
                };
                self.push(Move { component: h.component.clone(), path: h.path.clone(), base: Base::Val(j) }, Some(q), false, false)?;
            }
            (_, Base::Write(j)) => {
                self.assign(h.val.clone(), j)?;
                self.push(Move { component: h.component.clone(), path: h.path.clone(), base: Base::Ok }, Some(q), false, false)?;
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    /// P answers question `q` with `r` of type `ty`; a non-base result
    /// becomes a handle.
    fn p_answers(&mut self, q: usize, component: &Component, path: Vec<Step>, ty: &RmlType, r: V) -> Result<(), Abort> {
        let base = if ty.is_base() { base_of(&r) } else { Base::Unit };
        let a = self.push(Move { component: component.clone(), path: path.clone(), base }, Some(q), false, false)?;
        if !ty.is_base() {
            self.handles.push(Handle { component: component.clone(), path, ty: ty.clone(), val: r, intro: a });
            let n = self.handles.len() - 1;
            self.frames.last_mut().unwrap().push(n);
        }
        Ok(())
    }

    /// P asks the context question `q`; O eventually answers with a value
    /// from `answers`, possibly after interrogating handles.
    fn await_answer(&mut self, answers: Vec<V>) -> Result<V, Abort> {
        loop {
            let mut options: Vec<Choice> = answers.iter().cloned().map(Choice::Answer).collect();
            options.extend(self.questions());
            let c = self.choose(options.len())?;
            match options.into_iter().nth(c).expect("script out of range") {
                Choice::Answer(v) => return Ok(v),
                ask => self.o_asks(ask)?,
            }
        }
    }

    fn ctx_call(&mut self, ci: usize, arg: V) -> Result<V, Abort> {
        let c = self.ctx[ci].clone();
        let RmlType::Arrow(a, b) = &c.ty else { panic!("calling a non-function") };
        let qbase = if a.is_base() { base_of(&arg) } else { Base::Unit };
        let qpath = extend(&c.path, Step::Arg);
        let q = self.push(Move { component: c.component.clone(), path: qpath.clone(), base: qbase }, Some(c.intro), false, true)?;
        let mut frame = Vec::new();
        if !a.is_base() {
            self.handles.push(Handle { component: c.component.clone(), path: qpath, ty: (**a).clone(), val: arg, intro: q });
            frame.push(self.handles.len() - 1);
        }
        let rpath = extend(&c.path, Step::Res);
        self.frames.push(frame);
        let answers = if b.is_base() { values_of(b, self.k) } else { vec![V::Unit] };
        let v = self.await_answer(answers)?;
        self.frames.pop();
        if b.is_base() {
            self.push(Move { component: c.component.clone(), path: rpath, base: base_of(&v) }, Some(q), true, false)?;
            Ok(v)
        } else {
            let a = self.push(Move { component: c.component.clone(), path: rpath.clone(), base: Base::Unit }, Some(q), true, false)?;
            self.ctx.push(CtxVal { component: c.component, path: rpath, ty: (**b).clone(), intro: a });
            Ok(V::Ctx(self.ctx.len() - 1))
        }
    }

    fn ctx_cell(&mut self, ci: usize, op: Base) -> Result<V, Abort> {
        let c = self.ctx[ci].clone();
        let q = self.push(Move { component: c.component.clone(), path: c.path.clone(), base: op }, Some(c.intro), false, true)?;
        self.frames.push(Vec::new());
        let r = self.ctx_cell_answer(q, c, op);
        self.frames.pop();
        r
    }

    fn ctx_cell_answer(&mut self, q: usize, c: CtxVal, op: Base) -> Result<V, Abort> {
        match op {
            Base::Read => {
                let v = self.await_answer(values_of(&RmlType::Int, self.k))?;
                self.push(Move { component: c.component, path: c.path, base: Base::Val(base_int(&v)) }, Some(q), true, false)?;
                Ok(v)
            }
            _ => {
                self.await_answer(vec![V::Unit])?;
                self.push(Move { component: c.component, path: c.path, base: Base::Ok }, Some(q), true, false)?;
                Ok(V::Unit)
            }
        }
    }

    fn int(&mut self, t: &Term, env: &Env) -> Result<u32, Abort> {
        Ok(base_int(&self.eval(t, env)?))
    }

    fn apply(&mut self, f: V, a: V) -> Result<V, Abort> {
        match f {
            V::Clo(x, body, env) => {
                let mut e = (*env).clone();
                e.insert(x, a);
                self.eval(&body, &Rc::new(e))
            }
            V::Ctx(ci) => self.ctx_call(ci, a),
            v => panic!("not a function: {:?}", v),
        }
    }

    fn deref(&mut self, r: V) -> Result<V, Abort> {
        match r {
            V::Loc(l) => Ok(V::Int(self.store[l])),
            V::Mk(r, _) => self.apply(*r, V::Unit),
            V::Ctx(ci) => self.ctx_cell(ci, Base::Read),
            v => panic!("not a reference: {:?}", v),
        }
    }

    fn assign(&mut self, r: V, j: u32) -> Result<(), Abort> {
        match r {
            V::Loc(l) => self.store[l] = j,
            V::Mk(_, w) => {
                self.apply(*w, V::Int(j))?;
            }
            V::Ctx(ci) => {
                self.ctx_cell(ci, Base::Write(j))?;
            }
            v => panic!("not a reference: {:?}", v),
        }
        Ok(())
    }

    fn eval(&mut self, t: &Term, env: &Env) -> Result<V, Abort> {
        self.tick()?;
        let k = self.k;
        Ok(match &t.kind {
            TermKind::Unit => V::Unit,
            TermKind::Int(i) => V::Int(i % k),
            TermKind::Var(x) => env.get(x).cloned().unwrap_or_else(|| panic!("unbound {}", x)),
            TermKind::Succ(a) => V::Int((self.int(a, env)? + 1) % k),
            TermKind::Pred(a) => V::Int((self.int(a, env)? + k - 1) % k),
            TermKind::If(g, a, e) => {
                if self.int(g, env)? != 0 {
                    self.eval(a, env)?
                } else {
                    self.eval(e, env)?
                }
            }
            TermKind::Eq(a, b) => {
                let x = self.int(a, env)?;
                let y = self.int(b, env)?;
                V::Int(u32::from(x == y))
            }
            TermKind::Deref(a) => {
                let r = self.eval(a, env)?;
                self.deref(r)?
            }
            TermKind::Assign(a, b) => {
                let r = self.eval(a, env)?;
                let v = self.int(b, env)?;
                self.assign(r, v)?;
                V::Unit
            }
            TermKind::Ref(a) => {
                let v = self.int(a, env)?;
                self.store.push(v);
                V::Loc(self.store.len() - 1)
            }
            TermKind::App(f, a) => {
                let f = self.eval(f, env)?;
                let a = self.eval(a, env)?;
                self.apply(f, a)?
            }
            TermKind::Lam(x, _, body) => V::Clo(x.clone(), Rc::new((**body).clone()), env.clone()),
            TermKind::While(g, b) => {
                while self.int(g, env)? != 0 {
                    self.eval(b, env)?;
                }
                V::Unit
            }
            TermKind::Mkvar(r, w) => V::Mk(Box::new(self.eval(r, env)?), Box::new(self.eval(w, env)?)),
            TermKind::Omega => return Err(Abort::Diverge),
            TermKind::Let(x, a, b) => {
                let v = self.eval(a, env)?;
                let mut e = (**env).clone();
                e.insert(x.clone(), v);
                self.eval(b, &Rc::new(e))?
            }
            TermKind::Seq(a, b) => {
                self.eval(a, env)?;
                self.eval(b, env)?
            }
        })
    }

    /// Plays the whole game for one initial move; `Ok(n)` when O is to move
    /// with every question answered and `n` ways to continue.
    fn game(&mut self, term: &Term, ty: &RmlType, init: BTreeMap<String, u32>, env: Env) -> Result<usize, Abort> {
        let q0 = self.push(Move::initial(init), None, true, true)?;
        let v = self.eval(term, &env)?;
        self.p_answers(q0, &Component::Rhs, Vec::new(), ty, v)?;
        loop {
            let options = self.questions();
            if self.used == self.script.len() {
                return Ok(options.len());
            }
            let c = self.choose(options.len())?;
            self.o_asks(options.into_iter().nth(c).expect("script out of range"))?;
        }
    }
}

fn base_int(v: &V) -> u32 {
    match v {
        V::Int(j) => *j,
        v => panic!("expected an int, got {:?}", v),
    }
}

/// Data word of a pointer play. Under RML01 every context move takes the
/// value of the most recent right-hand move.
fn encode(play: &[PlayMove], enc: Encoding, tags: Option<(usize, usize)>) -> DataWord {
    let mut w = DataWord::default();
    let mut dv: Vec<u32> = Vec::new();
    let mut last_rhs = 0;
    for (i, m) in play.iter().enumerate() {
        let on_context = matches!(m.mv.component, Component::Var(_));
        let d = if enc == Encoding::RForml && on_context {
            last_rhs
        } else {
            match m.just {
                None => w.fresh_value(None),
                Some(j) if m.question => w.fresh_value(Some(dv[j])),
                Some(j) => dv[j],
            }
        };
        if !on_context {
            last_rhs = d;
        }
        dv.push(d);
        let mut letter = m.mv.to_string();
        if let Some((src, tgt)) = tags {
            if i == src {
                letter.push_str("!src");
            } else if i == tgt {
                letter.push_str("!tgt");
            }
        }
        w.push(letter, d);
    }
    w.canonical()
}

/// Pairs (answer, question) where a context P-question points at an earlier
/// non-initial context O-answer.
fn ambiguous(play: &[PlayMove]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, m) in play.iter().enumerate() {
        if m.by_o || !m.question || !matches!(m.mv.component, Component::Var(_)) {
            continue;
        }
        if let Some(j) = m.just {
            let e = &play[j];
            if e.by_o && !e.question && matches!(e.mv.component, Component::Var(_)) {
                out.push((j, i));
            }
        }
    }
    out
}

/// Canonical encodings of the complete plays of `src` in context `ctx` with
/// at most `max_len` moves.
pub fn complete_plays(src: &str, ctx: &str, k: u32, max_len: usize, enc: Encoding) -> BTreeSet<String> {
    let parsed = parse_term(src).unwrap();
    let context = parse_context(ctx).unwrap();
    let ty = typecheck(&parsed, &context, k).unwrap().ty.unwrap();
    let ints: Vec<&String> = context.iter().filter(|(_, t)| *t == RmlType::Int).map(|(n, _)| n).collect();
    let mut out = BTreeSet::new();
    out.insert(DataWord::default().to_string());
    let mut assignments: Vec<BTreeMap<String, u32>> = vec![BTreeMap::new()];
    for x in ints {
        assignments = assignments
            .into_iter()
            .flat_map(|a| {
                (0..k).map(move |v| {
                    let mut a = a.clone();
                    a.insert(x.clone(), v);
                    a
                })
            })
            .collect();
    }
    for init in assignments {
        let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
        while let Some(script) = stack.pop() {
            let mut m = Machine {
                k,
                max_len,
                script: &script,
                used: 0,
                store: Vec::new(),
                fuel: 20_000,
                play: Vec::new(),
                ctx: Vec::new(),
                handles: Vec::new(),
                frames: vec![Vec::new()],
            };
            let mut env = HashMap::new();
            for (x, t) in &context {
                let v = match t {
                    RmlType::Unit => V::Unit,
                    RmlType::Int => V::Int(init[x]),
                    _ => {
                        m.ctx.push(CtxVal { component: Component::Var(x.clone()), path: Vec::new(), ty: t.clone(), intro: 0 });
                        V::Ctx(m.ctx.len() - 1)
                    }
                };
                env.insert(x.clone(), v);
            }
            match m.game(&parsed, &ty, init.clone(), Rc::new(env)) {
                Ok(n) => {
                    out.insert(encode(&m.play, enc, None).to_string());
                    if enc == Encoding::RForml {
                        for pair in ambiguous(&m.play) {
                            out.insert(encode(&m.play, enc, Some(pair)).to_string());
                        }
                    }
                    for c in 0..n {
                        stack.push([script.clone(), vec![c]].concat());
                    }
                }
                Err(Abort::Need(n)) => {
                    for c in 0..n {
                        stack.push([script.clone(), vec![c]].concat());
                    }
                }
                Err(Abort::Diverge | Abort::TooLong) => {}
            }
        }
    }
    out
}
