//! Threads: copies of a subterm automaton started by an O-question and run
//! on a child data value of the host.

use super::{map_sig, map_upd, Auto, Cx, Letter, Lt, St, INIT};
use crate::arena::{Base, Move};
use crate::family::{CompileError, Encoding};
use std::collections::HashMap;

/// `λ` and `mkvar` on the right-hand side: answer `•`, then start one thread
/// per O-question, with `relabel` placing the thread's right-hand moves under
/// the question.
pub(crate) fn host(cx: &mut Cx, openers: Vec<(Lt, Auto)>, relabel: &dyn Fn(&Move) -> Move) -> Result<Auto, CompileError> {
    let mut a = Auto::new("h1");
    let s2 = a.state("h2");
    let s3 = a.state("h3");
    a.add(a.init, INIT, vec![None], s2, vec![s2])?;
    let unit = cx.letters.mv(Move::rhs(vec![], Base::Unit));
    a.add(s2, unit, vec![Some(s2)], s3, vec![s3])?;
    a.finals.insert(s3);
    let pstrict = cx.enc == Encoding::PStrict;
    for (i, (open, m)) in openers.into_iter().enumerate() {
        let m = if pstrict { write_through(cx, &m)? } else { m };
        let fin = embed(cx, &mut a, &[s3], pstrict.then_some(s3), open, &m, relabel, &format!("T{}.", i))?;
        a.finals.extend(fin);
    }
    a.uniform()?;
    a.trim();
    Ok(a)
}

/// Embeds `m` as a thread opened by `open` from the state ending `host`,
/// whose memory up to the current level is `host`. Right-hand moves are
/// relabelled and moved below `host`; context moves keep their level with the
/// root replaced by `gamma_root`, or move below `host` when it is `None`.
/// Returns the embedded final states.
#[allow(clippy::too_many_arguments)]
pub(crate) fn embed(
    cx: &mut Cx,
    a: &mut Auto,
    host: &[St],
    gamma_root: Option<St>,
    open: Lt,
    m: &Auto,
    relabel: &dyn Fn(&Move) -> Move,
    prefix: &str,
) -> Result<Vec<St>, CompileError> {
    let mm = a.import(m, prefix);
    let (s_m, l_m) = m.secondary();
    let lift_sig = |sig: &[Option<St>]| -> Vec<Option<St>> {
        host.iter().map(|h| Some(*h)).chain(map_sig(sig, &mm)).collect()
    };
    let lift_upd = |upd: &[St]| -> Vec<St> { host.iter().copied().chain(map_upd(upd, &mm)).collect() };
    let host_state = *host.last().expect("empty host");
    a.add(host_state, open, lift_sig(&[None]), mm[s_m as usize], lift_upd(&[l_m]))?;
    for ((s, l, sig), tr) in &m.delta {
        if *s == m.init {
            continue;
        }
        let Letter::Mv(mv, tag) = cx.letters.get(*l).clone() else {
            return Err(CompileError::Internal("initial move inside a thread".into()));
        };
        let src = mm[*s as usize];
        let tgt = mm[tr.tgt as usize];
        match gamma_root {
            Some(root) if !mv.is_rhs() => {
                let mut sig2 = map_sig(sig, &mm);
                let mut upd2 = map_upd(&tr.upd, &mm);
                sig2[0] = Some(root);
                upd2[0] = root;
                a.add(src, *l, sig2, tgt, upd2)?;
            }
            _ => {
                let l2 = if mv.is_rhs() { cx.letters.id(Letter::Mv(relabel(&mv), tag)) } else { *l };
                a.add(src, l2, lift_sig(sig), tgt, lift_upd(&tr.upd))?;
            }
        }
    }
    Ok(m.inner_finals().iter().map(|f| mm[*f as usize]).collect())
}

/// Keeps the root label of `m` current across context moves so that the
/// root can be shared with a host: states become triples (state, label of
/// the root for the term, label actually held by the root). Right-hand moves
/// read the held label and overwrite it; context moves read and keep it.
pub(crate) fn write_through(cx: &Cx, m: &Auto) -> Result<Auto, CompileError> {
    let mut a = Auto::new(&m.names[m.init as usize]);
    let mut labels: HashMap<St, St> = HashMap::new();
    let mut triples: HashMap<(St, St, St), St> = HashMap::new();
    let mut queue = Vec::new();
    let mut lab = |a: &mut Auto, s: St| *labels.entry(s).or_insert_with(|| a.state(format!("{}'", m.names[s as usize])));
    let mut tri = |a: &mut Auto, t: (St, St, St), queue: &mut Vec<(St, St, St)>| {
        *triples.entry(t).or_insert_with(|| {
            queue.push(t);
            a.state(format!("{}|{}|{}", m.names[t.0 as usize], m.names[t.1 as usize], m.names[t.2 as usize]))
        })
    };
    let (s_m, l_m) = m.secondary();
    let t0 = tri(&mut a, (s_m, l_m, l_m), &mut queue);
    let l0 = lab(&mut a, l_m);
    a.add(a.init, INIT, vec![None], t0, vec![l0])?;
    while let Some((q, held_term, held)) = queue.pop() {
        let src = tri(&mut a, (q, held_term, held), &mut queue);
        if q != m.init && m.finals.contains(&q) {
            a.finals.insert(src);
        }
        let moves: Vec<_> = m
            .out(q)
            .filter(|(k, _)| k.2[0] == Some(held_term))
            .map(|(k, tr)| (k.clone(), tr.clone()))
            .collect();
        for ((_, l, sig), tr) in moves {
            let rhs = cx.letters.as_move(l).is_some_and(|(mv, _)| mv.is_rhs());
            let mut sig2 = vec![Some(lab(&mut a, held))];
            for x in &sig[1..] {
                sig2.push(x.map(|x| lab(&mut a, x)));
            }
            let mut upd2 = Vec::with_capacity(tr.upd.len());
            let next = if rhs {
                upd2.push(lab(&mut a, tr.upd[0]));
                (tr.tgt, tr.upd[0], tr.upd[0])
            } else {
                upd2.push(lab(&mut a, held));
                (tr.tgt, tr.upd[0], held)
            };
            for x in &tr.upd[1..] {
                upd2.push(lab(&mut a, *x));
            }
            let tgt = tri(&mut a, next, &mut queue);
            a.add(src, l, sig2, tgt, upd2)?;
        }
    }
    Ok(a)
}
