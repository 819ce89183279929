//! Hand-built automata with known emptiness, and random small deterministic
//! automata.

use rand::seq::SliceRandom;
use rand::Rng;
use rml_equiv::ndcma::{StateId, Wndcma};

pub struct CoverCase {
    pub name: &'static str,
    pub automaton: Wndcma,
    pub empty: bool,
    /// Length of a shortest accepted word.
    pub shortest: Option<usize>,
}

const HEADER0: &str = "level 0\nalphabet a b c d\n";
const HEADER1: &str = "level 1\nalphabet a b c d\n";
const HEADER2: &str = "level 2\nalphabet a b c d\n";

fn case(name: &'static str, header: &str, body: &str, empty: bool, shortest: Option<usize>) -> CoverCase {
    let automaton = format!("{}{}", header, body).parse().unwrap_or_else(|e| panic!("{}: {}", name, e));
    CoverCase { name, automaton, empty, shortest }
}

pub fn coverability_cases() -> Vec<CoverCase> {
    vec![
        case("no transitions", HEADER0, "states s f\ninitial s\nfinals f\nstuck reject\n", true, None),
        case("initial final", HEADER0, "states s\ninitial s\nfinals s\nstuck reject\n", false, Some(0)),
        case(
            "one letter",
            HEADER0,
            "states s f\ninitial s\nfinals f\nstuck reject\ns --a, (⊥) -> f, (f)\n",
            false,
            Some(1),
        ),
        case(
            "final without way in",
            HEADER0,
            "states s t g\ninitial s\nfinals g\nstuck reject\ns --a, (⊥) -> t, (t)\nt --b, (t) -> s, (s)\n",
            true,
            None,
        ),
        case(
            "label never written",
            HEADER0,
            "states s t f x y\ninitial s\nfinals f\nstuck reject\ns --a, (⊥) -> t, (x)\nt --b, (y) -> f, (y)\n",
            true,
            None,
        ),
        case(
            "value reused",
            HEADER0,
            "states s t f x\ninitial s\nfinals f\nstuck reject\ns --a, (⊥) -> t, (x)\nt --b, (x) -> f, (x)\n",
            false,
            Some(2),
        ),
        case(
            "two siblings",
            HEADER1,
            "states s t u f r x y\ninitial s\nfinals f\nstuck reject\n\
             s --a, (⊥) -> t, (r)\n\
             t --b, (r,⊥) -> t, (r,x)\n\
             t --c, (r,x) -> u, (r,y)\n\
             u --c, (r,x) -> f, (r,y)\n",
            false,
            Some(5),
        ),
        case(
            "two siblings, one creatable",
            HEADER1,
            "states s t v u f r x y\ninitial s\nfinals f\nstuck reject\n\
             s --a, (⊥) -> t, (r)\n\
             t --b, (r,⊥) -> v, (r,x)\n\
             v --c, (r,x) -> u, (r,y)\n\
             u --c, (r,x) -> f, (r,y)\n",
            true,
            None,
        ),
        case(
            "three siblings",
            HEADER1,
            "states s t u v f r x y\ninitial s\nfinals f\nstuck reject\n\
             s --a, (⊥) -> t, (r)\n\
             t --b, (r,⊥) -> t, (r,x)\n\
             t --c, (r,x) -> u, (r,y)\n\
             u --c, (r,x) -> v, (r,y)\n\
             v --c, (r,x) -> f, (r,y)\n",
            false,
            Some(7),
        ),
        case(
            "grandchild",
            HEADER2,
            "states s t f r m z\ninitial s\nfinals f\nstuck reject\n\
             s --a, (⊥) -> t, (r)\n\
             t --b, (r,⊥) -> t, (r,m)\n\
             t --c, (r,m,⊥) -> f, (r,m,z)\n",
            false,
            Some(3),
        ),
        case(
            "siblings in different states",
            HEADER1,
            "states s t u f r x y\ninitial s\nfinals f\nstuck reject\n\
             s --a, (⊥) -> t, (r)\n\
             t --b, (r,⊥) -> t, (r,x)\n\
             t --c, (r,x) -> t, (r,y)\n\
             t --d, (r,x) -> u, (r,x)\n\
             u --d, (r,y) -> f, (r,y)\n",
            false,
            Some(6),
        ),
        case(
            "loop without exit",
            HEADER1,
            "states s t f r x\ninitial s\nfinals f\nstuck reject\n\
             s --a, (⊥) -> t, (r)\n\
             t --b, (r,⊥) -> t, (r,x)\n\
             t --c, (r,x) -> t, (r,x)\n",
            true,
            None,
        ),
        case(
            "relabelled root needed twice",
            HEADER0,
            "states s t u f r1 r2\ninitial s\nfinals f\nstuck reject\n\
             s --a, (⊥) -> t, (r1)\n\
             t --b, (r1) -> u, (r2)\n\
             u --c, (r1) -> f, (r1)\n",
            true,
            None,
        ),
        case(
            "second root supplies the label",
            HEADER0,
            "states s t u f r1 r2\ninitial s\nfinals f\nstuck reject\n\
             s --a, (⊥) -> t, (r1)\n\
             t --b, (r1) -> u, (r2)\n\
             u --d, (⊥) -> u, (r1)\n\
             u --c, (r1) -> f, (r1)\n",
            false,
            Some(4),
        ),
        case(
            "stuck runs accept",
            HEADER0,
            "states s t\ninitial s\nfinals\nstuck accept\ns --a, (⊥) -> t, (t)\n",
            false,
            Some(1),
        ),
    ]
}

/// A deterministic automaton over `a b` with `n` states and the given level:
/// each possible transition key is present with probability one half.
pub fn random_automaton<R: Rng>(rng: &mut R, n: usize, level: usize) -> Wndcma {
    let mut a = Wndcma::new(&["a", "b"], level);
    for i in 0..n {
        a.add_state(format!("s{}", i));
    }
    a.initial = 0;
    for s in 0..n as StateId {
        if rng.gen_bool(0.4) {
            a.finals.insert(s);
        }
    }
    a.stuck_accepts = rng.gen_bool(0.2);
    let labels: Vec<Option<StateId>> = std::iter::once(None).chain((0..n as StateId).map(Some)).collect();
    let mut sigs: Vec<Vec<Option<StateId>>> = Vec::new();
    for depth in 1..=level + 1 {
        let mut layer: Vec<Vec<Option<StateId>>> = vec![Vec::new()];
        for _ in 0..depth {
            layer = layer
                .into_iter()
                .flat_map(|p| labels.iter().map(move |l| [p.clone(), vec![*l]].concat()))
                .collect();
        }
        // a fresh value has fresh descendants only
        sigs.extend(layer.into_iter().filter(|s| s.windows(2).all(|w| w[0].is_some() || w[1].is_none())));
    }
    let states: Vec<StateId> = (0..n as StateId).collect();
    for s in 0..n as StateId {
        for letter in 0..2 {
            for sig in &sigs {
                if !rng.gen_bool(0.5 / sig.len() as f64) {
                    continue;
                }
                let tgt = *states.choose(rng).unwrap();
                let upd = (0..sig.len()).map(|_| *states.choose(rng).unwrap()).collect();
                a.add_transition(s, letter, sig.clone(), tgt, upd);
            }
        }
    }
    a
}
