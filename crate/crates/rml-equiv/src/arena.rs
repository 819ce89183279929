//! Arenas of types and prearenas of sequents.
//!
//! Moves carry structured identities: the component they belong to (the
//! initial tuple, the right-hand side, or a context variable), a path of
//! `arg`/`res` steps into the arrow structure, and a base move. Their
//! printed names double as automaton letters.

use crate::rml_lang::{RmlType, TypeSequent};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Owner {
    O,
    P,
}

impl Owner {
    pub fn flip(self) -> Owner {
        match self {
            Owner::O => Owner::P,
            Owner::P => Owner::O,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Kind {
    Q,
    A,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Step {
    Arg,
    Res,
}

/// The move of a base arena a path ends in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Base {
    /// `•`, the unit value, also the initial move of arrow and intref arenas.
    Unit,
    Int(u32),
    Read,
    Write(u32),
    /// Answer to a read.
    Val(u32),
    /// Answer to a write.
    Ok,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Component {
    /// Initial move of a prearena: values of the int-typed context variables.
    Initial(BTreeMap<String, u32>),
    Rhs,
    Var(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Move {
    pub component: Component,
    pub path: Vec<Step>,
    pub base: Base,
}

impl Move {
    pub fn initial(env: BTreeMap<String, u32>) -> Move {
        Move {
            component: Component::Initial(env),
            path: Vec::new(),
            base: Base::Unit,
        }
    }

    pub fn rhs(path: Vec<Step>, base: Base) -> Move {
        Move {
            component: Component::Rhs,
            path,
            base,
        }
    }

    pub fn var(x: &str, path: Vec<Step>, base: Base) -> Move {
        Move {
            component: Component::Var(x.to_string()),
            path,
            base,
        }
    }

    /// Integer carried by the move, if any.
    pub fn payload(&self) -> Option<u32> {
        match self.base {
            Base::Int(j) | Base::Write(j) | Base::Val(j) => Some(j),
            _ => None,
        }
    }

    pub fn is_rhs(&self) -> bool {
        self.component == Component::Rhs
    }

    pub fn var_name(&self) -> Option<&str> {
        match &self.component {
            Component::Var(x) => Some(x),
            _ => None,
        }
    }

    /// Owner and kind of the move in any prearena containing it.
    pub fn polarity(&self) -> (Owner, Kind) {
        match &self.component {
            Component::Initial(_) => (Owner::O, Kind::Q),
            Component::Rhs => path_polarity(&self.path, self.base),
            Component::Var(_) => {
                let (o, k) = path_polarity(&self.path, self.base);
                (o.flip(), k)
            }
        }
    }

    /// The same move with `prefix` prepended to its path.
    pub fn under(&self, prefix: &[Step]) -> Move {
        let mut path = prefix.to_vec();
        path.extend_from_slice(&self.path);
        Move {
            component: self.component.clone(),
            path,
            base: self.base,
        }
    }
}

fn path_polarity(path: &[Step], base: Base) -> (Owner, Kind) {
    match path.split_first() {
        None => match base {
            Base::Read | Base::Write(_) => (Owner::O, Kind::Q),
            _ => (Owner::P, Kind::A),
        },
        Some((Step::Res, rest)) => path_polarity(rest, base),
        Some((Step::Arg, rest)) => {
            if rest.is_empty() && matches!(base, Base::Unit | Base::Int(_)) {
                (Owner::O, Kind::Q)
            } else {
                let (o, k) = path_polarity(rest, base);
                (o.flip(), k)
            }
        }
    }
}

fn base_suffix(b: Base) -> String {
    match b {
        Base::Unit => String::new(),
        Base::Int(j) => format!("({})", j),
        Base::Read => ".read".into(),
        Base::Write(j) => format!(".write({})", j),
        Base::Val(j) => format!(".val({})", j),
        Base::Ok => ".ok".into(),
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.component {
            Component::Initial(env) => {
                write!(f, "q0")?;
                if !env.is_empty() {
                    let parts: Vec<String> =
                        env.iter().map(|(x, v)| format!("{}={}", x, v)).collect();
                    write!(f, "[{}]", parts.join(","))?;
                }
                Ok(())
            }
            Component::Rhs => {
                let n = self.path.iter().take_while(|s| **s == Step::Res).count();
                let rest = &self.path[n..];
                match (rest, self.base) {
                    ([], Base::Unit | Base::Int(_)) => {
                        write!(f, "a{}{}", n, base_suffix(self.base))
                    }
                    ([Step::Arg], Base::Unit | Base::Int(_)) => {
                        write!(f, "q{}{}", n + 1, base_suffix(self.base))
                    }
                    ([], Base::Read | Base::Write(_)) => {
                        write!(f, "q{}{}", n + 1, base_suffix(self.base))
                    }
                    ([], Base::Val(j)) => write!(f, "a{}({})", n + 1, j),
                    ([], Base::Ok) => write!(f, "a{}.ok", n + 1),
                    _ => {
                        write!(f, "rhs")?;
                        for s in &self.path {
                            write!(f, "{}", if *s == Step::Arg { ".arg" } else { ".res" })?;
                        }
                        write!(f, "{}", base_suffix(self.base))
                    }
                }
            }
            Component::Var(x) => {
                write!(f, "{}", x)?;
                for s in &self.path {
                    write!(f, "{}", if *s == Step::Arg { ".arg" } else { ".res" })?;
                }
                write!(f, "{}", base_suffix(self.base))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArenaMove {
    pub path: Vec<Step>,
    pub base: Base,
    pub owner: Owner,
    pub kind: Kind,
}

/// Arena of a type. Enabling is stored as `(enabler, enabled)` index pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arena {
    pub moves: Vec<ArenaMove>,
    pub initial: Vec<usize>,
    pub enables: Vec<(usize, usize)>,
}

impl Arena {
    fn single(base: Base) -> ArenaMove {
        ArenaMove {
            path: Vec::new(),
            base,
            owner: Owner::P,
            kind: Kind::A,
        }
    }
}

pub fn arena_of_type(t: &RmlType, k: u32) -> Arena {
    match t {
        RmlType::Unit => Arena {
            moves: vec![Arena::single(Base::Unit)],
            initial: vec![0],
            enables: vec![],
        },
        RmlType::Int => Arena {
            moves: (0..k).map(|j| Arena::single(Base::Int(j))).collect(),
            initial: (0..k as usize).collect(),
            enables: vec![],
        },
        RmlType::IntRef => {
            let mut moves = vec![Arena::single(Base::Unit)];
            let mut enables = Vec::new();
            let mv = |base, owner, kind| ArenaMove {
                path: Vec::new(),
                base,
                owner,
                kind,
            };
            moves.push(mv(Base::Read, Owner::O, Kind::Q));
            enables.push((0, 1));
            for j in 0..k {
                moves.push(mv(Base::Val(j), Owner::P, Kind::A));
                enables.push((1, moves.len() - 1));
            }
            for j in 0..k {
                moves.push(mv(Base::Write(j), Owner::O, Kind::Q));
                let w = moves.len() - 1;
                enables.push((0, w));
                moves.push(mv(Base::Ok, Owner::P, Kind::A));
                enables.push((w, moves.len() - 1));
            }
            // one ok per write keeps enabling a function of the move; merge
            // them into a single ok answer enabled by every write
            merge_ok(moves, enables)
        }
        RmlType::Arrow(a, b) => {
            let aa = arena_of_type(a, k);
            let ab = arena_of_type(b, k);
            let mut moves = vec![Arena::single(Base::Unit)];
            let mut enables = Vec::new();
            let off_a = 1;
            for (i, m) in aa.moves.iter().enumerate() {
                let initial = aa.initial.contains(&i);
                moves.push(ArenaMove {
                    path: [vec![Step::Arg], m.path.clone()].concat(),
                    base: m.base,
                    owner: if initial { Owner::O } else { m.owner.flip() },
                    kind: if initial { Kind::Q } else { m.kind },
                });
            }
            let off_b = moves.len();
            for m in &ab.moves {
                moves.push(ArenaMove {
                    path: [vec![Step::Res], m.path.clone()].concat(),
                    ..m.clone()
                });
            }
            for &i in &aa.initial {
                enables.push((0, off_a + i));
                for &j in &ab.initial {
                    enables.push((off_a + i, off_b + j));
                }
            }
            enables.extend(aa.enables.iter().map(|&(x, y)| (off_a + x, off_a + y)));
            enables.extend(ab.enables.iter().map(|&(x, y)| (off_b + x, off_b + y)));
            Arena {
                moves,
                initial: vec![0],
                enables,
            }
        }
    }
}

fn merge_ok(moves: Vec<ArenaMove>, enables: Vec<(usize, usize)>) -> Arena {
    let ok_ids: Vec<usize> = (0..moves.len()).filter(|&i| moves[i].base == Base::Ok).collect();
    let keep = ok_ids[0];
    let mut remap = Vec::new();
    let mut out = Vec::new();
    for (i, m) in moves.into_iter().enumerate() {
        if m.base == Base::Ok && i != keep {
            remap.push(usize::MAX);
        } else {
            remap.push(out.len());
            out.push(m);
        }
    }
    let ok_new = remap[keep];
    let enables = enables
        .into_iter()
        .map(|(x, y)| {
            let y = if remap[y] == usize::MAX { ok_new } else { remap[y] };
            (remap[x], y)
        })
        .collect();
    Arena {
        moves: out,
        initial: vec![0],
        enables,
    }
}

/// Prearena of a sequent: the initial moves pair up the initial moves of the
/// context arenas; context moves are seen from the other side.
#[derive(Clone, Debug, Serialize)]
pub struct Prearena {
    pub moves: Vec<Move>,
    pub labels: Vec<(Owner, Kind)>,
    pub initial: Vec<bool>,
    /// `enablers[m]` lists the moves that enable `m`.
    pub enablers: Vec<Vec<usize>>,
    #[serde(skip)]
    index: BTreeMap<Move, usize>,
}

impl Prearena {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn index_of(&self, m: &Move) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Looks a move up by its printed name.
    pub fn by_name(&self, name: &str) -> Option<usize> {
        self.moves.iter().position(|m| m.to_string() == name)
    }

    pub fn label(&self, m: usize) -> (Owner, Kind) {
        self.labels[m]
    }

    pub fn is_question(&self, m: usize) -> bool {
        self.labels[m].1 == Kind::Q
    }

    pub fn initial_moves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.initial[i])
    }

    pub fn enabled_by(&self, m: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&n| self.enablers[n].contains(&m))
            .collect()
    }

    pub fn enables(&self, a: usize, b: usize) -> bool {
        self.enablers[b].contains(&a)
    }

    /// Every enabling chain from a P-question reaches no further P-question.
    pub fn is_pstrict(&self) -> bool {
        let succ: Vec<Vec<usize>> = (0..self.len()).map(|m| self.enabled_by(m)).collect();
        let pq = |m: usize| self.labels[m] == (Owner::P, Kind::Q);
        for start in (0..self.len()).filter(|&m| pq(m)) {
            let mut stack = succ[start].clone();
            let mut seen = vec![false; self.len()];
            while let Some(m) = stack.pop() {
                if seen[m] {
                    continue;
                }
                seen[m] = true;
                if pq(m) {
                    return false;
                }
                stack.extend(succ[m].iter().copied());
            }
        }
        true
    }

    /// Longest enabling chain counted in questions, minus one.
    pub fn question_depth(&self) -> usize {
        let mut memo: Vec<Option<usize>> = vec![None; self.len()];
        fn depth(p: &Prearena, m: usize, memo: &mut Vec<Option<usize>>) -> usize {
            if let Some(d) = memo[m] {
                return d;
            }
            let own = usize::from(p.is_question(m));
            let best = p.enablers[m]
                .iter()
                .map(|&e| depth(p, e, memo))
                .max()
                .unwrap_or(0);
            memo[m] = Some(best + own);
            best + own
        }
        (0..self.len())
            .map(|m| depth(self, m, &mut memo))
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    /// Graphviz rendering.
    pub fn dump(&self) -> String {
        let mut out = String::from("digraph prearena {\n");
        for (i, m) in self.moves.iter().enumerate() {
            let (o, k) = self.labels[i];
            let shape = if self.initial[i] { "box" } else { "ellipse" };
            out.push_str(&format!(
                "  \"{}\" [shape={} label=\"{} {:?}{:?}\"];\n",
                m, shape, m, o, k
            ));
        }
        for (n, es) in self.enablers.iter().enumerate() {
            for &e in es {
                out.push_str(&format!("  \"{}\" -> \"{}\";\n", self.moves[e], self.moves[n]));
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn prearena_of_sequent(seq: &TypeSequent, k: u32) -> Prearena {
    // initial tuples, left-to-right over the context
    let mut tuples: Vec<BTreeMap<String, u32>> = vec![BTreeMap::new()];
    for (x, t) in &seq.context {
        if *t == RmlType::Int {
            tuples = tuples
                .into_iter()
                .flat_map(|env| {
                    (0..k).map(move |j| {
                        let mut e = env.clone();
                        e.insert(x.clone(), j);
                        e
                    })
                })
                .collect();
        }
    }
    let mut moves = Vec::new();
    let mut labels = Vec::new();
    let mut initial = Vec::new();
    let mut enablers: Vec<Vec<usize>> = Vec::new();
    for env in tuples {
        moves.push(Move::initial(env));
        labels.push((Owner::O, Kind::Q));
        initial.push(true);
        enablers.push(Vec::new());
    }
    let n_init = moves.len();
    let all_init: Vec<usize> = (0..n_init).collect();

    let mut add_arena = |a: &Arena, comp: Component, flip: bool, moves: &mut Vec<Move>| {
        let mut local = vec![usize::MAX; a.moves.len()];
        for (i, m) in a.moves.iter().enumerate() {
            if flip && a.initial.contains(&i) {
                continue;
            }
            local[i] = moves.len();
            moves.push(Move {
                component: comp.clone(),
                path: m.path.clone(),
                base: m.base,
            });
            labels.push(if flip {
                (m.owner.flip(), m.kind)
            } else {
                (m.owner, m.kind)
            });
            initial.push(false);
            enablers.push(Vec::new());
        }
        for &(x, y) in &a.enables {
            if local[y] == usize::MAX {
                continue;
            }
            if local[x] == usize::MAX {
                // enabled by the context component's initial move
                enablers[local[y]].extend(all_init.iter().copied());
            } else {
                enablers[local[y]].push(local[x]);
            }
        }
        if !flip {
            for &i in &a.initial {
                enablers[local[i]].extend(all_init.iter().copied());
            }
        }
    };

    for (x, t) in &seq.context {
        let a = arena_of_type(t, k);
        add_arena(&a, Component::Var(x.clone()), true, &mut moves);
    }
    let a = arena_of_type(&seq.subject, k);
    add_arena(&a, Component::Rhs, false, &mut moves);

    let index = moves.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    Prearena {
        moves,
        labels,
        initial,
        enablers,
        index,
    }
}
