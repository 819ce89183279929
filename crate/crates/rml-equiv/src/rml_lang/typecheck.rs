//! Type checking with desugaring.
//!
//! The output tree is fully annotated and contains no `let`, `;`, `=` or
//! `Ω` nodes.

use super::{Binding, LangError, RmlType, Span, Term, TermKind};
use std::collections::BTreeSet;

struct Checker {
    k: u32,
    env: Vec<Binding>,
    used: BTreeSet<String>,
    counter: usize,
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

fn typed(kind: TermKind, ty: RmlType, span: Span) -> Term {
    Term {
        kind,
        span,
        ty: Some(ty),
    }
}

fn var(x: &str, ty: RmlType) -> Term {
    Term::typed(TermKind::Var(x.to_string()), ty)
}

fn b(t: Term) -> Box<Term> {
    Box::new(t)
}

/// `(λx:ty. body) arg`, typed.
fn let_in(x: &str, arg: Term, body: Term) -> Term {
    let arg_ty = arg.ty.clone().expect("typed");
    let body_ty = body.ty.clone().expect("typed");
    let lam = Term::typed(
        TermKind::Lam(x.to_string(), arg_ty.clone(), b(body)),
        RmlType::arrow(arg_ty, body_ty.clone()),
    );
    Term::typed(TermKind::App(b(lam), b(arg)), body_ty)
}

fn int_lit(i: u32) -> Term {
    Term::typed(TermKind::Int(i), RmlType::Int)
}

fn pred_n(x: &str, n: u32) -> Term {
    (0..n).fold(var(x, RmlType::Int), |acc, _| {
        Term::typed(TermKind::Pred(b(acc)), RmlType::Int)
    })
}

fn if_int(g: Term, a: Term, e: Term) -> Term {
    let ty = a.ty.clone().expect("typed");
    Term::typed(TermKind::If(b(g), b(a), b(e)), ty)
}

fn divergence(ty: &RmlType) -> Term {
    let lp = Term::typed(
        TermKind::While(b(int_lit(1)), b(Term::typed(TermKind::Unit, RmlType::Unit))),
        RmlType::Unit,
    );
    match ty {
        RmlType::Unit => lp,
        _ => let_in("_", lp, int_lit(0)),
    }
}

impl Checker {
    fn fresh(&mut self, stem: &str) -> String {
        loop {
            self.counter += 1;
            let name = format!("_{}{}", stem, self.counter);
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }

    fn lookup(&self, x: &str) -> Option<&RmlType> {
        self.env.iter().rev().find(|(n, _)| n == x).map(|(_, t)| t)
    }

    fn expect_ty(&self, t: &Term, want: &RmlType, what: &str) -> Result<(), LangError> {
        let got = t.ty.as_ref().expect("typed");
        if got == want {
            Ok(())
        } else {
            Err(LangError::Mismatch {
                span: t.span,
                msg: format!("{} must have type {}, found {}", what, want, got),
            })
        }
    }

    fn check(&mut self, t: &Term, expected: Option<&RmlType>) -> Result<Term, LangError> {
        let span = t.span;
        let out = match &t.kind {
            TermKind::Unit => typed(TermKind::Unit, RmlType::Unit, span),
            TermKind::Int(n) => {
                if *n >= self.k {
                    return Err(LangError::LiteralRange {
                        value: *n,
                        k: self.k,
                        span,
                    });
                }
                typed(TermKind::Int(*n), RmlType::Int, span)
            }
            TermKind::Var(x) => {
                let ty = self.lookup(x).cloned().ok_or_else(|| LangError::Unbound {
                    name: x.clone(),
                    span,
                })?;
                typed(TermKind::Var(x.clone()), ty, span)
            }
            TermKind::Succ(m) | TermKind::Pred(m) => {
                let m = self.check(m, Some(&RmlType::Int))?;
                self.expect_ty(&m, &RmlType::Int, "operand of succ/pred")?;
                let kind = if matches!(t.kind, TermKind::Succ(_)) {
                    TermKind::Succ(b(m))
                } else {
                    TermKind::Pred(b(m))
                };
                typed(kind, RmlType::Int, span)
            }
            TermKind::If(g, a, e) => {
                let g = self.check(g, Some(&RmlType::Int))?;
                self.expect_ty(&g, &RmlType::Int, "condition")?;
                let (a, e) = if expected.is_none() && a.kind == TermKind::Omega {
                    let e = self.check(e, None)?;
                    let a = self.check(a, e.ty.as_ref())?;
                    (a, e)
                } else {
                    let a = self.check(a, expected)?;
                    let e = self.check(e, a.ty.as_ref())?;
                    (a, e)
                };
                let ty = a.ty.clone().unwrap();
                self.expect_ty(&e, &ty, "else branch")?;
                typed(TermKind::If(b(g), b(a), b(e)), ty, span)
            }
            TermKind::Deref(m) => {
                let m = self.check(m, Some(&RmlType::IntRef))?;
                self.expect_ty(&m, &RmlType::IntRef, "dereferenced term")?;
                typed(TermKind::Deref(b(m)), RmlType::Int, span)
            }
            TermKind::Assign(m, n) => {
                let m = self.check(m, Some(&RmlType::IntRef))?;
                self.expect_ty(&m, &RmlType::IntRef, "assignment target")?;
                let n = self.check(n, Some(&RmlType::Int))?;
                self.expect_ty(&n, &RmlType::Int, "assigned value")?;
                typed(TermKind::Assign(b(m), b(n)), RmlType::Unit, span)
            }
            TermKind::Ref(m) => {
                let m = self.check(m, Some(&RmlType::Int))?;
                self.expect_ty(&m, &RmlType::Int, "initial value of ref")?;
                typed(TermKind::Ref(b(m)), RmlType::IntRef, span)
            }
            TermKind::App(f, a) => {
                let f = self.check(f, None)?;
                let RmlType::Arrow(dom, cod) = f.ty.clone().unwrap() else {
                    return Err(LangError::Mismatch {
                        span: f.span,
                        msg: format!("applied term has non-function type {}", f.ty.unwrap()),
                    });
                };
                let a = self.check(a, Some(&dom))?;
                self.expect_ty(&a, &dom, "argument")?;
                typed(TermKind::App(b(f), b(a)), *cod, span)
            }
            TermKind::Lam(x, ty, body) => {
                let body_expected = match expected {
                    Some(RmlType::Arrow(_, c)) => Some(c.as_ref().clone()),
                    _ => None,
                };
                self.env.push((x.clone(), ty.clone()));
                let body = self.check(body, body_expected.as_ref());
                self.env.pop();
                let body = body?;
                let fty = RmlType::arrow(ty.clone(), body.ty.clone().unwrap());
                typed(TermKind::Lam(x.clone(), ty.clone(), b(body)), fty, span)
            }
            TermKind::While(g, body) => {
                let g = self.check(g, Some(&RmlType::Int))?;
                self.expect_ty(&g, &RmlType::Int, "loop condition")?;
                let body = self.check(body, Some(&RmlType::Unit))?;
                self.expect_ty(&body, &RmlType::Unit, "loop body")?;
                typed(TermKind::While(b(g), b(body)), RmlType::Unit, span)
            }
            TermKind::Mkvar(r, w) => {
                let rt = RmlType::arrow(RmlType::Unit, RmlType::Int);
                let wt = RmlType::arrow(RmlType::Int, RmlType::Unit);
                let r = self.check(r, Some(&rt))?;
                self.expect_ty(&r, &rt, "mkvar reader")?;
                let w = self.check(w, Some(&wt))?;
                self.expect_ty(&w, &wt, "mkvar writer")?;
                typed(TermKind::Mkvar(b(r), b(w)), RmlType::IntRef, span)
            }
            TermKind::Omega => match expected {
                None | Some(RmlType::Unit) => divergence(&RmlType::Unit),
                Some(RmlType::Int) => divergence(&RmlType::Int),
                Some(other) => {
                    return Err(LangError::Mismatch {
                        span,
                        msg: format!("Ω is only available at base types, not {}", other),
                    })
                }
            },
            TermKind::Let(x, m, n) => {
                let ann = m.ty.clone();
                let m = self.check(m, ann.as_ref())?;
                if let Some(a) = &ann {
                    self.expect_ty(&m, a, "let-bound term")?;
                }
                self.env.push((x.clone(), m.ty.clone().unwrap()));
                let n = self.check(n, expected);
                self.env.pop();
                let mut out = let_in(x, m, n?);
                out.span = span;
                out
            }
            TermKind::Seq(m, n) => {
                let m = self.check(m, None)?;
                let n = self.check(n, expected)?;
                let x = self.fresh("s");
                let mut out = let_in(&x, m, n);
                out.span = span;
                out
            }
            TermKind::Eq(m, n) => {
                let m = self.check(m, Some(&RmlType::Int))?;
                self.expect_ty(&m, &RmlType::Int, "left operand of =")?;
                let n = self.check(n, Some(&RmlType::Int))?;
                self.expect_ty(&n, &RmlType::Int, "right operand of =")?;
                let l = self.fresh("l");
                let r = self.fresh("r");
                let mut out = let_in(&l, m, let_in(&r, n, self.eq_split(&l, &r, 0)));
                out.span = span;
                out
            }
        };
        Ok(out)
    }

    /// Case split deciding `l = r`: `pred^i l` is zero exactly when `l` is `i`.
    fn eq_split(&self, l: &str, r: &str, i: u32) -> Term {
        let r_is_i = if_int(pred_n(r, i), int_lit(0), int_lit(1));
        if i + 1 == self.k {
            r_is_i
        } else {
            if_int(pred_n(l, i), self.eq_split(l, r, i + 1), r_is_i)
        }
    }
}

/// Checks `t` under `ctx` with integer modulus `k` and returns the annotated,
/// desugared term.
pub fn typecheck(t: &Term, ctx: &[Binding], k: u32) -> Result<Term, LangError> {
    assert!(k >= 2, "integer modulus must be at least 2");
    let mut seen = BTreeSet::new();
    for (x, _) in ctx {
        if !seen.insert(x.clone()) {
            return Err(LangError::DuplicateContext(x.clone()));
        }
    }
    let mut used = seen;
    collect_names(t, &mut used);
    let mut c = Checker {
        k,
        env: ctx.to_vec(),
        used,
        counter: 0,
    };
    c.check(t, None)
}
