//! `let x = ref 0 in M`: keep only the plays of `M` in which `x` behaves as
//! a good variable, then hide the moves on `x`.
//!
//! The current value of `x` rides along in the label of the root data value,
//! which every transition reads.

use super::{on_var, Auto, Cx, Key, St, Tr, INIT};
use crate::arena::Base;
use crate::family::{CompileError, Encoding};
use std::collections::{BTreeSet, HashMap};

pub(crate) fn bind_cell(cx: &mut Cx, x: &str, m: &Auto) -> Result<Auto, CompileError> {
    let c = restrict(cx, x, m)?;
    let mut h = hide(cx, x, &c)?;
    h.uniform()?;
    h.trim();
    Ok(h)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CellMove {
    Read,
    Write(u32),
    Val(u32),
    Ok,
    Other,
}

fn cell_move(cx: &Cx, x: &str, l: u32) -> CellMove {
    match cx.letters.as_move(l) {
        Some((mv, _)) if on_var(mv, x) && mv.path.is_empty() => match mv.base {
            Base::Read => CellMove::Read,
            Base::Write(j) => CellMove::Write(j),
            Base::Val(j) => CellMove::Val(j),
            Base::Ok => CellMove::Ok,
            _ => CellMove::Other,
        },
        _ => CellMove::Other,
    }
}

fn restrict(cx: &Cx, x: &str, m: &Auto) -> Result<Auto, CompileError> {
    let mut a = Auto::new(&m.names[m.init as usize]);
    let plain: Vec<St> = (0..m.names.len())
        .map(|s| if s as St == m.init { a.init } else { a.state(m.names[s].clone()) })
        .collect();
    let mut pairs: HashMap<(St, u32), St> = HashMap::new();
    let mut pair = |a: &mut Auto, s: St, v: u32| {
        *pairs.entry((s, v)).or_insert_with(|| a.state(format!("{}#{}", m.names[s as usize], v)))
    };
    let (s_m, l_m) = m.secondary();
    let root0 = pair(&mut a, l_m, 0);
    a.add(a.init, INIT, vec![None], plain[s_m as usize], vec![root0])?;
    for ((s, l, sig), tr) in &m.delta {
        if *s == m.init {
            continue;
        }
        let Some(r) = sig[0] else {
            return Err(CompileError::Internal("non-initial transition without a root".into()));
        };
        let kind = cell_move(cx, x, *l);
        for v in 0..cx.k {
            let nv = match kind {
                CellMove::Write(j) => j,
                CellMove::Val(j) if j != v => continue,
                _ => v,
            };
            let mut sig2 = vec![Some(pair(&mut a, r, v))];
            sig2.extend(sig[1..].iter().map(|y| y.map(|y| plain[y as usize])));
            let mut upd2 = vec![pair(&mut a, tr.upd[0], nv)];
            upd2.extend(tr.upd[1..].iter().map(|y| plain[*y as usize]));
            a.add(plain[*s as usize], *l, sig2, plain[tr.tgt as usize], upd2)?;
        }
    }
    a.finals.extend(m.inner_finals().iter().map(|f| plain[*f as usize]));
    Ok(a)
}

/// Replaces each exchange of questions and answers on `x` by a direct
/// transition from the state before the first question to the move that
/// follows the last answer.
fn hide(cx: &Cx, x: &str, c: &Auto) -> Result<Auto, CompileError> {
    let is_q = |l| matches!(cell_move(cx, x, l), CellMove::Read | CellMove::Write(_));
    let is_a = |l| matches!(cell_move(cx, x, l), CellMove::Val(_) | CellMove::Ok);
    let pstrict = cx.enc == Encoding::PStrict;
    let mut a = c.clone();
    a.delta.retain(|k, _| !is_q(k.1) && !is_a(k.1));
    let mut new: Vec<(Key, Tr)> = Vec::new();
    for ((c0, l0, xi0), tr0) in &c.delta {
        if !is_q(*l0) {
            continue;
        }
        let mut seen = BTreeSet::new();
        let mut q = tr0.clone();
        loop {
            let answers: Vec<&Tr> = c
                .out(q.tgt)
                .filter(|(k, _)| is_a(k.1) && k.2.iter().zip(&q.upd).all(|(s, u)| *s == Some(*u)) && k.2.len() == q.upd.len())
                .map(|(_, t)| t)
                .collect();
            let [ans] = answers.as_slice() else {
                if answers.len() > 1 {
                    return Err(CompileError::Internal("cell question with two answers".into()));
                }
                break;
            };
            let next_sig: Vec<Option<St>> = if pstrict {
                vec![Some(ans.upd[0]), None]
            } else {
                ans.upd.iter().map(|u| Some(*u)).collect()
            };
            let again = c.out(ans.tgt).find(|(k, _)| is_q(k.1) && k.2 == next_sig).map(|(_, t)| t.clone());
            if let Some(tr) = again {
                if !seen.insert((ans.tgt, next_sig)) {
                    break;
                }
                q = tr;
                continue;
            }
            for ((_, l, sig), tr) in c.out(ans.tgt) {
                if is_q(*l) || is_a(*l) {
                    continue;
                }
                let fits = if pstrict { sig[0] == next_sig[0] } else { *sig == next_sig };
                if fits {
                    let mut sig2 = sig.clone();
                    if pstrict {
                        sig2[0] = xi0[0];
                    } else {
                        sig2 = xi0.clone();
                    }
                    new.push(((*c0, *l, sig2), tr.clone()));
                }
            }
            break;
        }
    }
    for ((s, l, sig), tr) in new {
        a.add(s, l, sig, tr.tgt, tr.upd)?;
    }
    Ok(a)
}
