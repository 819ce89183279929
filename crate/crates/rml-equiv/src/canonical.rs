//! Let-normal ("canonical") form.
//!
//! ```text
//! C ::= () | i | x | succ x | pred x | if x then C else C | x := y | !x
//!     | λx:τ. C | mkvar (λu:unit. C) (λv:int. C) | let x = ref 0 in C
//!     | while C do C | let x:β = C in C
//!     | let x = z y | let x = z (mkvar (λu. C) (λv. C)) | let x = z (λy. C)   (each "in C")
//! ```
//!
//! Every intermediate base value is named by a `let`, applications only
//! occur as the bound term of a `let` whose head is a variable, and
//! function- or reference-typed results are η-expanded into λ / `mkvar`.

use crate::rml_lang::{RmlType, Term, TermKind};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A tree in the shape of the canonical grammar. Operand positions are
/// boxed terms so that ill-formed trees can be represented and rejected by
/// [`validate_canonical`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CanonicalTerm {
    Unit,
    Int(u32),
    Var(String),
    Succ(Box<CanonicalTerm>),
    Pred(Box<CanonicalTerm>),
    If(Box<CanonicalTerm>, Box<CanonicalTerm>, Box<CanonicalTerm>),
    Assign(Box<CanonicalTerm>, Box<CanonicalTerm>),
    Deref(Box<CanonicalTerm>),
    Lam(String, RmlType, Box<CanonicalTerm>),
    Mkvar(Box<CanonicalTerm>, Box<CanonicalTerm>),
    NewRef(String, Box<CanonicalTerm>),
    While(Box<CanonicalTerm>, Box<CanonicalTerm>),
    Let(String, RmlType, Box<CanonicalTerm>, Box<CanonicalTerm>),
    App(Box<CanonicalTerm>, Box<CanonicalTerm>),
}

use CanonicalTerm as C;

fn bx(c: C) -> Box<C> {
    Box::new(c)
}

fn cvar(x: &str) -> C {
    C::Var(x.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanonError {
    #[error("term is not fully typed")]
    Untyped,
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
}

// ---------------------------------------------------------------- validation

fn is_var(c: &C) -> Option<&str> {
    match c {
        C::Var(x) => Some(x),
        _ => None,
    }
}

fn valid(c: &C, env: &mut Vec<(String, RmlType)>) -> bool {
    let ty_of = |env: &Vec<(String, RmlType)>, x: &str| {
        env.iter().rev().find(|(n, _)| n == x).map(|(_, t)| t.clone())
    };
    let var_with = |env: &Vec<(String, RmlType)>, c: &C, ok: &dyn Fn(&RmlType) -> bool| {
        is_var(c).is_some_and(|x| ty_of(env, x).is_none_or(|t| ok(&t)))
    };
    match c {
        C::Unit | C::Int(_) => true,
        C::Var(x) => ty_of(env, x).is_none_or(|t| t.is_base()),
        C::Succ(a) | C::Pred(a) => var_with(env, a, &|t| *t == RmlType::Int),
        C::If(g, a, e) => {
            var_with(env, g, &|t| *t == RmlType::Int) && valid(a, env) && valid(e, env)
        }
        C::Assign(a, b) => {
            var_with(env, a, &|t| *t == RmlType::IntRef) && var_with(env, b, &|t| *t == RmlType::Int)
        }
        C::Deref(a) => var_with(env, a, &|t| *t == RmlType::IntRef),
        C::Lam(x, t, body) => scoped(env, x, t, body),
        C::Mkvar(r, w) => valid_mkvar(r, w, env),
        C::NewRef(x, body) => scoped(env, x, &RmlType::IntRef, body),
        C::While(a, b) => valid(a, env) && valid(b, env),
        C::Let(x, t, bound, body) => {
            let bound_ok = match bound.as_ref() {
                C::App(z, arg) => {
                    is_var(z).is_some()
                        && match arg.as_ref() {
                            C::Var(_) => var_with(env, arg, &|t| t.is_base()),
                            C::Mkvar(r, w) => valid_mkvar(r, w, env),
                            C::Lam(y, yt, b) => scoped(env, y, yt, b),
                            _ => false,
                        }
                }
                other => t.is_base() && valid(other, env),
            };
            bound_ok && scoped(env, x, t, body)
        }
        C::App(..) => false,
    }
}

fn scoped(env: &mut Vec<(String, RmlType)>, x: &str, t: &RmlType, body: &C) -> bool {
    env.push((x.to_string(), t.clone()));
    let ok = valid(body, env);
    env.pop();
    ok
}

fn valid_mkvar(r: &C, w: &C, env: &mut Vec<(String, RmlType)>) -> bool {
    match (r, w) {
        (C::Lam(u, ut, rb), C::Lam(v, vt, wb)) => {
            *ut == RmlType::Unit
                && *vt == RmlType::Int
                && scoped(env, u, ut, rb)
                && scoped(env, v, vt, wb)
        }
        _ => false,
    }
}

/// True iff `t` is generated by the canonical grammar. Variables free in `t`
/// are assumed to have whatever type their position demands.
pub fn validate_canonical(t: &CanonicalTerm) -> bool {
    valid(t, &mut Vec::new())
}

// ---------------------------------------------------------- canonicalization

#[derive(Clone, Debug)]
enum FnVal {
    Var(String, RmlType),
    Lam(String, RmlType, Term),
}

#[derive(Clone, Debug)]
enum RefVal {
    Var(String),
    Mk(FnVal, FnVal),
}

#[derive(Clone, Debug)]
enum Val {
    Base(String, RmlType),
    Fn(FnVal),
    Ref(RefVal),
}

type Cont<'a> = &'a mut dyn FnMut(&mut Canon, Val) -> C;

fn ty(t: &Term) -> RmlType {
    t.ty.clone().expect("checked before canonicalization")
}

fn tvar(x: &str, t: RmlType) -> Term {
    Term::typed(TermKind::Var(x.to_string()), t)
}

fn fn_val_ty(f: &FnVal) -> RmlType {
    match f {
        FnVal::Var(_, t) => t.clone(),
        FnVal::Lam(_, t, body) => RmlType::arrow(t.clone(), ty(body)),
    }
}

fn val_to_term(v: &Val) -> Term {
    match v {
        Val::Base(x, t) => tvar(x, t.clone()),
        Val::Fn(f) => fn_to_term(f),
        Val::Ref(RefVal::Var(x)) => tvar(x, RmlType::IntRef),
        Val::Ref(RefVal::Mk(r, w)) => Term::typed(
            TermKind::Mkvar(Box::new(fn_to_term(r)), Box::new(fn_to_term(w))),
            RmlType::IntRef,
        ),
    }
}

fn fn_to_term(f: &FnVal) -> Term {
    match f {
        FnVal::Var(x, t) => tvar(x, t.clone()),
        FnVal::Lam(x, t, body) => Term::typed(
            TermKind::Lam(x.clone(), t.clone(), Box::new(body.clone())),
            fn_val_ty(f),
        ),
    }
}

/// Replaces free occurrences of `x` in `t` by `v`.
fn subst(t: &Term, x: &str, v: &Term) -> Term {
    match &t.kind {
        TermKind::Var(y) if y == x => v.clone(),
        TermKind::Lam(y, _, _) | TermKind::Let(y, _, _) if y == x => {
            // shadowed below the binder (Let binds only in its body)
            if let TermKind::Let(y, m, n) = &t.kind {
                let mut out = t.clone();
                out.kind = TermKind::Let(y.clone(), Box::new(subst(m, x, v)), n.clone());
                out
            } else {
                t.clone()
            }
        }
        _ => {
            let mut out = t.clone();
            out.map_children(&mut |c| *c = subst(c, x, v));
            out
        }
    }
}

/// Smart `let` that drops `let n = e in n` and `let n:unit = e in ()`.
fn mk_let(n: &str, t: RmlType, e: C, body: C) -> C {
    let trivial = match &body {
        C::Var(y) => y == n,
        C::Unit => t == RmlType::Unit,
        _ => false,
    };
    if trivial && !matches!(e, C::App(..)) {
        e
    } else {
        C::Let(n.to_string(), t, bx(e), bx(body))
    }
}

struct Canon {
    /// Every name occurring in the (renamed) source plus every name issued.
    used: BTreeSet<String>,
    /// Binder names already issued in the output.
    emitted: BTreeSet<String>,
    counter: usize,
}

impl Canon {
    /// Issues a binder name: the hint if it has not been issued yet,
    /// otherwise a new name.
    fn fresh(&mut self, hint: Option<&str>) -> String {
        if let Some(h) = hint {
            if self.emitted.insert(h.to_string()) {
                self.used.insert(h.to_string());
                return h.to_string();
            }
        }
        let stem = hint.map(|h| h.trim_end_matches(|c: char| c.is_ascii_digit()));
        loop {
            self.counter += 1;
            let name = match stem {
                Some(s) if !s.is_empty() && s != "_" && !s.starts_with('_') => {
                    format!("{}{}", s, self.counter)
                }
                _ => format!("_v{}", self.counter),
            };
            if self.used.insert(name.clone()) {
                self.emitted.insert(name.clone());
                return name;
            }
        }
    }

    fn rename_fresh(&mut self, x: &str) -> String {
        if self.used.insert(x.to_string()) {
            return x.to_string();
        }
        let stem = x.trim_end_matches(|c: char| c.is_ascii_digit());
        (1..)
            .map(|i| format!("{}{}", stem, i))
            .find(|n| self.used.insert(n.clone()))
            .unwrap()
    }

    /// Renames every binder of `t` to a name not used anywhere else.
    fn rename_binders(&mut self, t: &Term, env: &BTreeMap<String, String>) -> Term {
        let mut out = t.clone();
        match &t.kind {
            TermKind::Var(x) => {
                if let Some(y) = env.get(x) {
                    out.kind = TermKind::Var(y.clone());
                }
            }
            TermKind::Lam(x, xt, body) => {
                let y = self.rename_fresh(x);
                let mut env2 = env.clone();
                env2.insert(x.clone(), y.clone());
                out.kind = TermKind::Lam(y, xt.clone(), Box::new(self.rename_binders(body, &env2)));
            }
            _ => out.map_children(&mut |c| *c = self.rename_binders(c, env)),
        }
        out
    }

    fn base_result(v: Val) -> C {
        match v {
            Val::Base(_, RmlType::Unit) => C::Unit,
            Val::Base(x, _) => C::Var(x),
            other => unreachable!("base continuation received {:?}", other),
        }
    }

    /// Canonical form of `t` in tail position.
    fn norm(&mut self, t: &Term) -> C {
        match ty(t) {
            RmlType::Unit | RmlType::Int => self.bind(t, None, &mut |_, v| Canon::base_result(v)),
            RmlType::Arrow(..) => self.bind(t, None, &mut |s, v| match v {
                Val::Fn(f) => s.lam_of(&f),
                other => unreachable!("function continuation received {:?}", other),
            }),
            RmlType::IntRef => self.bind(t, None, &mut |s, v| match v {
                Val::Ref(r) => s.mkvar_of(&r),
                other => unreachable!("reference continuation received {:?}", other),
            }),
        }
    }

    fn lam_of(&mut self, f: &FnVal) -> C {
        match f {
            FnVal::Lam(x, xt, body) => {
                let y = self.fresh(Some(x));
                let body = if y == *x {
                    body.clone()
                } else {
                    subst(body, x, &tvar(&y, xt.clone()))
                };
                C::Lam(y, xt.clone(), bx(self.norm(&body)))
            }
            FnVal::Var(g, gt) => {
                let RmlType::Arrow(dom, cod) = gt else { unreachable!() };
                let y = self.fresh(None);
                let app = Term::typed(
                    TermKind::App(Box::new(tvar(g, gt.clone())), Box::new(tvar(&y, (**dom).clone()))),
                    (**cod).clone(),
                );
                C::Lam(y, (**dom).clone(), bx(self.norm(&app)))
            }
        }
    }

    fn mkvar_of(&mut self, r: &RefVal) -> C {
        match r {
            RefVal::Var(x) => {
                let u = self.fresh(None);
                let v = self.fresh(None);
                C::Mkvar(
                    bx(C::Lam(u, RmlType::Unit, bx(C::Deref(bx(cvar(x)))))),
                    bx(C::Lam(
                        v.clone(),
                        RmlType::Int,
                        bx(C::Assign(bx(cvar(x)), bx(cvar(&v)))),
                    )),
                )
            }
            RefVal::Mk(rd, wr) => C::Mkvar(bx(self.lam_of(rd)), bx(self.lam_of(wr))),
        }
    }

    fn bind_fresh_base(&mut self, hint: Option<&str>, t: RmlType, e: C, k: Cont) -> C {
        let n = self.fresh(hint);
        let body = k(self, Val::Base(n.clone(), t.clone()));
        mk_let(&n, t, e, body)
    }

    /// Evaluates `t` and passes its value to `k`. `hint` names the binder
    /// introduced for the value, if one is needed.
    fn bind(&mut self, t: &Term, hint: Option<&str>, k: Cont) -> C {
        let t_ty = ty(t);
        match &t.kind {
            TermKind::Var(x) => {
                let v = match &t_ty {
                    RmlType::Unit | RmlType::Int => Val::Base(x.clone(), t_ty.clone()),
                    RmlType::Arrow(..) => Val::Fn(FnVal::Var(x.clone(), t_ty.clone())),
                    RmlType::IntRef => Val::Ref(RefVal::Var(x.clone())),
                };
                k(self, v)
            }
            TermKind::Unit => self.bind_fresh_base(hint, RmlType::Unit, C::Unit, k),
            TermKind::Int(i) => self.bind_fresh_base(hint, RmlType::Int, C::Int(*i), k),
            TermKind::Succ(m) | TermKind::Pred(m) => {
                let succ = matches!(t.kind, TermKind::Succ(_));
                self.bind(m, None, &mut |s, v| {
                    let Val::Base(x, _) = v else { unreachable!() };
                    let e = if succ { C::Succ(bx(cvar(&x))) } else { C::Pred(bx(cvar(&x))) };
                    s.bind_fresh_base(hint, RmlType::Int, e, k)
                })
            }
            TermKind::If(g, a, e) => self.bind(g, None, &mut |s, v| {
                let Val::Base(x, _) = v else { unreachable!() };
                if t_ty.is_base() {
                    let ca = s.norm(a);
                    let ce = s.norm(e);
                    let cond = C::If(bx(cvar(&x)), bx(ca), bx(ce));
                    s.bind_fresh_base(hint, t_ty.clone(), cond, k)
                } else {
                    let ca = s.bind(a, hint, k);
                    let ce = s.bind(e, hint, k);
                    C::If(bx(cvar(&x)), bx(ca), bx(ce))
                }
            }),
            TermKind::Deref(m) => self.bind(m, None, &mut |s, v| match v {
                Val::Ref(RefVal::Var(r)) => {
                    s.bind_fresh_base(hint, RmlType::Int, C::Deref(bx(cvar(&r))), k)
                }
                Val::Ref(RefVal::Mk(rd, _)) => {
                    let u = s.fresh(None);
                    let body = s.apply(&rd, &Val::Base(u.clone(), RmlType::Unit), hint, k);
                    mk_let(&u, RmlType::Unit, C::Unit, body)
                }
                other => unreachable!("dereferenced {:?}", other),
            }),
            TermKind::Assign(m, n) => self.bind(m, None, &mut |s, r| {
                s.bind(n, None, &mut |s, v| match &r {
                    Val::Ref(RefVal::Var(x)) => {
                        let Val::Base(y, _) = &v else { unreachable!() };
                        let e = C::Assign(bx(cvar(x)), bx(cvar(y)));
                        s.bind_fresh_base(hint, RmlType::Unit, e, k)
                    }
                    Val::Ref(RefVal::Mk(_, wr)) => s.apply(wr, &v, hint, k),
                    other => unreachable!("assigned to {:?}", other),
                })
            }),
            TermKind::Ref(m) => {
                if m.kind == TermKind::Int(0) {
                    let x = self.fresh(hint);
                    let body = k(self, Val::Ref(RefVal::Var(x.clone())));
                    C::NewRef(x, bx(body))
                } else {
                    self.bind(m, None, &mut |s, v| {
                        let Val::Base(y, _) = v else { unreachable!() };
                        let x = s.fresh(hint);
                        let u = s.fresh(None);
                        let body = k(s, Val::Ref(RefVal::Var(x.clone())));
                        let init = C::Assign(bx(cvar(&x)), bx(cvar(&y)));
                        C::NewRef(x, bx(C::Let(u, RmlType::Unit, bx(init), bx(body))))
                    })
                }
            }
            TermKind::App(f, a) => {
                if let TermKind::Lam(x, _, body) = &f.kind {
                    // let-form: bind the argument under the binder's name
                    let (x, body) = (x.clone(), body.clone());
                    self.bind(a, Some(&x), &mut |s, v| {
                        let body = subst(&body, &x, &val_to_term(&v));
                        s.bind(&body, hint, k)
                    })
                } else {
                    self.bind(f, None, &mut |s, fv| {
                        let Val::Fn(fv) = fv else { unreachable!() };
                        s.bind(a, None, &mut |s, av| s.apply(&fv, &av, hint, k))
                    })
                }
            }
            TermKind::Lam(x, xt, body) => {
                k(self, Val::Fn(FnVal::Lam(x.clone(), xt.clone(), (**body).clone())))
            }
            TermKind::Mkvar(r, w) => self.bind(r, None, &mut |s, rv| {
                let Val::Fn(rv) = rv else { unreachable!() };
                s.bind(w, None, &mut |s, wv| {
                    let Val::Fn(wv) = wv else { unreachable!() };
                    k(s, Val::Ref(RefVal::Mk(rv.clone(), wv)))
                })
            }),
            TermKind::While(g, b) => {
                let cg = self.norm(g);
                let cb = self.norm(b);
                self.bind_fresh_base(hint, RmlType::Unit, C::While(bx(cg), bx(cb)), k)
            }
            TermKind::Omega | TermKind::Let(..) | TermKind::Seq(..) | TermKind::Eq(..) => {
                unreachable!("sugar survives type checking")
            }
        }
    }

    fn apply(&mut self, f: &FnVal, a: &Val, hint: Option<&str>, k: Cont) -> C {
        match f {
            FnVal::Lam(x, _, body) => {
                let body = subst(body, x, &val_to_term(a));
                self.bind(&body, hint, k)
            }
            FnVal::Var(z, zt) => {
                let RmlType::Arrow(_, cod) = zt else { unreachable!() };
                let arg = match a {
                    Val::Base(y, _) => cvar(y),
                    Val::Fn(g) => self.lam_of(g),
                    Val::Ref(r) => self.mkvar_of(r),
                };
                let n = self.fresh(hint);
                let v = match cod.as_ref() {
                    RmlType::Unit | RmlType::Int => Val::Base(n.clone(), (**cod).clone()),
                    RmlType::Arrow(..) => Val::Fn(FnVal::Var(n.clone(), (**cod).clone())),
                    RmlType::IntRef => Val::Ref(RefVal::Var(n.clone())),
                };
                let body = k(self, v);
                C::Let(n, (**cod).clone(), bx(C::App(bx(cvar(z)), bx(arg))), bx(body))
            }
        }
    }
}

fn collect_names(t: &Term, out: &mut BTreeSet<String>) {
    match &t.kind {
        TermKind::Var(x) | TermKind::Lam(x, _, _) | TermKind::Let(x, _, _) => {
            out.insert(x.clone());
        }
        _ => {}
    }
    let mut t = t.clone();
    t.map_children(&mut |c| collect_names(c, out));
}

/// Converts a type-checked, desugared term into canonical form. Names of
/// context variables are kept; binders keep their source names when these
/// are unambiguous and get numbered variants otherwise.
pub fn canonicalize(t: &Term) -> Result<CanonicalTerm, CanonError> {
    if !t.is_fully_typed() {
        return Err(CanonError::Untyped);
    }
    if !t.is_desugared() {
        return Err(CanonError::UnsupportedConstruct(
            "sugar node; run typecheck first".into(),
        ));
    }
    let mut names = BTreeSet::new();
    collect_names(t, &mut names);
    let mut bound = BTreeSet::new();
    collect_binders(t, &mut bound);
    let mut c = Canon {
        used: names.difference(&bound).cloned().collect(),
        emitted: BTreeSet::new(),
        counter: 0,
    };
    let renamed = c.rename_binders(t, &BTreeMap::new());
    Ok(c.norm(&renamed))
}

fn collect_binders(t: &Term, out: &mut BTreeSet<String>) {
    if let TermKind::Lam(x, _, _) | TermKind::Let(x, _, _) = &t.kind {
        out.insert(x.clone());
    }
    let mut t = t.clone();
    t.map_children(&mut |c| collect_binders(c, out));
}

// ------------------------------------------------------------ pretty-printer

fn atomic(c: &C) -> bool {
    matches!(c, C::Unit | C::Int(_) | C::Var(_))
}

fn arg(c: &C) -> String {
    if atomic(c) {
        c.to_string()
    } else {
        format!("({})", c)
    }
}

impl fmt::Display for CanonicalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            C::Unit => write!(f, "()"),
            C::Int(i) => write!(f, "{}", i),
            C::Var(x) => write!(f, "{}", x),
            C::Succ(a) => write!(f, "succ {}", arg(a)),
            C::Pred(a) => write!(f, "pred {}", arg(a)),
            C::If(g, a, e) => write!(f, "if {} then {} else {}", g, a, e),
            C::Assign(a, b) => write!(f, "{} := {}", arg(a), arg(b)),
            C::Deref(a) => write!(f, "!{}", arg(a)),
            C::Lam(x, t, b) => write!(f, "λ{}:{}. {}", x, t, b),
            C::Mkvar(r, w) => write!(f, "mkvar {} {}", arg(r), arg(w)),
            C::NewRef(x, b) => write!(f, "let {} = ref 0 in {}", x, b),
            C::While(g, b) => write!(f, "while {} do {}", g, arg_if_open(b)),
            C::Let(x, t, bound, body) => write!(f, "let {} : {} = {} in {}", x, t, bound, body),
            C::App(z, a) => write!(f, "{} {}", arg(z), arg(a)),
        }
    }
}

fn arg_if_open(c: &C) -> String {
    match c {
        C::Let(..) | C::NewRef(..) | C::Lam(..) | C::If(..) | C::While(..) => format!("({})", c),
        _ => c.to_string(),
    }
}

/// Structural equality up to consistent renaming of bound variables.
pub fn alpha_eq(a: &CanonicalTerm, b: &CanonicalTerm) -> bool {
    fn go(a: &C, b: &C, env: &mut Vec<(String, String)>) -> bool {
        let same_var = |env: &Vec<(String, String)>, x: &str, y: &str| {
            for (p, q) in env.iter().rev() {
                if p == x || q == y {
                    return p == x && q == y;
                }
            }
            x == y
        };
        let under = |env: &mut Vec<(String, String)>, x: &str, y: &str, a: &C, b: &C| {
            env.push((x.to_string(), y.to_string()));
            let r = go(a, b, env);
            env.pop();
            r
        };
        match (a, b) {
            (C::Unit, C::Unit) => true,
            (C::Int(i), C::Int(j)) => i == j,
            (C::Var(x), C::Var(y)) => same_var(env, x, y),
            (C::Succ(p), C::Succ(q)) | (C::Pred(p), C::Pred(q)) | (C::Deref(p), C::Deref(q)) => {
                go(p, q, env)
            }
            (C::If(g, p, q), C::If(h, r, s)) => go(g, h, env) && go(p, r, env) && go(q, s, env),
            (C::Assign(p, q), C::Assign(r, s))
            | (C::Mkvar(p, q), C::Mkvar(r, s))
            | (C::While(p, q), C::While(r, s))
            | (C::App(p, q), C::App(r, s)) => go(p, r, env) && go(q, s, env),
            (C::Lam(x, t, p), C::Lam(y, u, q)) => t == u && under(env, x, y, p, q),
            (C::NewRef(x, p), C::NewRef(y, q)) => under(env, x, y, p, q),
            (C::Let(x, t, p, q), C::Let(y, u, r, s)) => {
                t == u && go(p, r, env) && under(env, x, y, q, s)
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}
