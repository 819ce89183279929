//! Compiled automata against the reference interpreter.

mod common;

use common::{accepted, automaton, oracle::complete_plays};
use rml_equiv::family::Encoding;
use rml_equiv::rml_lang::{classify, parse_context, parse_term, typecheck, TypeSequent};

const CLOSED: &[(&str, u32, usize)] = &[
    ("()", 2, 4),
    ("succ 1", 3, 4),
    ("Omega", 2, 4),
    ("fun x:int. x", 2, 6),
    ("fun x:int. succ (pred x)", 3, 6),
    ("fun x:int. fun y:int. if x then y else 0", 2, 6),
    ("let c = ref 0 in fun y:unit. if !c = 0 then c := 1 else Omega", 2, 8),
    ("fun x:unit. let c = ref 0 in fun y:unit. if !c = 0 then c := 1 else Omega", 2, 8),
    ("let c = ref 0 in fun y:unit. c := succ !c; !c", 3, 8),
    ("let c = ref 0 in fun y:int. let o = !c in c := y; o", 2, 8),
    ("let c = ref 2 in while !c do c := pred !c", 3, 4),
    ("while 1 do ()", 2, 4),
    ("ref 0", 2, 6),
    ("mkvar (fun u:unit. 1) (fun v:int. ())", 2, 6),
    ("let c = ref 0 in mkvar (fun u:unit. !c) (fun v:int. c := succ v)", 2, 6),
    ("fun x:unit. mkvar (fun u:unit. 0) (fun v:int. Omega)", 2, 6),
    ("let c = ref 0 in fun x:unit. c := 1; fun y:unit. !c", 2, 8),
    ("fun x:int. let c = ref x in fun y:int. if !c = y then 1 else (c := y; 0)", 2, 8),
    ("let c = ref 0 in fun x:unit. let d = ref !c in c := 1; fun y:unit. !d", 2, 8),
    ("let f = fun x:int. succ x in fun y:int. f (f y)", 3, 6),
];

/// (term, context, int size, length bound)
const OPEN: &[(&str, &str, u32, usize)] = &[
    ("x", "x: int", 2, 4),
    ("!x", "x: intref", 2, 6),
    ("x := 1", "x: intref", 2, 6),
    ("x := succ !x", "x: intref", 2, 8),
    ("!x; !x", "x: intref", 2, 8),
    ("f ()", "f: unit -> unit", 2, 6),
    ("f (); ()", "f: unit -> unit", 2, 6),
    ("f (f 0)", "f: int -> int", 2, 8),
    ("fun y:int. f y", "f: int -> int", 2, 8),
    ("fun y:unit. x := 1; !x", "x: intref", 2, 8),
    ("let c = ref 0 in fun y:unit. f (); c := succ !c; !c", "f: unit -> unit", 2, 10),
    ("z (fun y:int. succ y)", "z: (int -> int) -> int", 2, 8),
    ("let c = ref 0 in z (fun y:unit. c := 1); !c", "z: (unit -> unit) -> unit", 2, 8),
    ("z (fun y:unit. f ())", "z: (unit -> unit) -> unit, f: unit -> unit", 2, 8),
    ("let c = ref 0 in z (mkvar (fun u:unit. !c) (fun v:int. c := v))", "z: intref -> unit", 2, 8),
    ("z (fun a:int. fun b:int. if a then b else 0)", "z: (int -> int -> int) -> int", 2, 8),
    ("fun y:unit. z (fun u:unit. ())", "z: (unit -> unit) -> unit", 2, 10),
    ("let g = f () in g (); g ()", "f: unit -> unit -> unit", 2, 8),
    ("let r = f () in r := 1; !r", "f: unit -> intref", 2, 8),
    ("let g = f () in fun y:unit. g ()", "f: unit -> unit -> unit", 2, 8),
    ("fun y:unit. let g = f () in g ()", "f: unit -> unit -> unit", 2, 8),
    ("let c = ref 0 in z (fun u:unit. c := succ !c; !c)", "z: (unit -> int) -> unit", 2, 8),
    ("f 1 0", "f: int -> int -> int", 2, 8),
    ("let c = ref 0 in fun y:unit. z (fun u:unit. c := succ !c; !c)", "z: (unit -> int) -> unit", 2, 10),
    ("fun g:unit. f (); x := 1", "f: unit -> unit, x: intref", 2, 8),
    ("while !x do x := pred !x", "x: intref", 3, 8),
    ("fun y:int. let r = ref y in z (mkvar (fun u:unit. !r) (fun v:int. r := v)); !r", "z: intref -> unit", 2, 10),
    ("let g = f () in let h = f () in h (); g ()", "f: unit -> unit -> unit", 2, 10),
    ("let g = f () in z (fun u:unit. g ())", "f: unit -> unit -> unit, z: (unit -> unit) -> unit", 2, 10),
    ("let c = ref 0 in fun y:unit. f (); c := succ !c; fun w:unit. !c", "f: unit -> unit", 2, 10),
    ("if x then f 0 else f 1", "x: int, f: int -> int", 2, 6),
];

fn sequent(src: &str, ctx: &str, k: u32) -> TypeSequent {
    let ctx = parse_context(ctx).unwrap();
    let t = typecheck(&parse_term(src).unwrap(), &ctx, k).unwrap();
    TypeSequent::new(ctx, t.ty.unwrap())
}

fn compare(src: &str, ctx: &str, k: u32, len: usize, failures: &mut Vec<String>) {
    let class = classify(&sequent(src, ctx, k));
    assert!(class.in_pstrict || class.in_rforml, "{} ⊢ {} is in neither fragment", ctx, src);
    for enc in [Encoding::PStrict, Encoding::RForml] {
        if (enc == Encoding::PStrict && !class.in_pstrict) || (enc == Encoding::RForml && !class.in_rforml) {
            continue;
        }
        let expected = complete_plays(src, ctx, k, len, enc);
        let got = accepted(&automaton(src, ctx, k, enc), len);
        if got != expected {
            let missing: Vec<_> = expected.difference(&got).take(3).collect();
            let extra: Vec<_> = got.difference(&expected).take(3).collect();
            failures.push(format!("{} ⊢ {} [{}]: missing {:?} extra {:?}", ctx, src, enc, missing, extra));
        }
    }
}

#[test]
fn open_terms_match_reference_plays() {
    let mut failures = Vec::new();
    for (src, ctx, k, len) in OPEN {
        compare(src, ctx, *k, *len, &mut failures);
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn closed_terms_match_reference_plays() {
    let mut failures = Vec::new();
    for (src, k, len) in CLOSED {
        for enc in [Encoding::PStrict, Encoding::RForml] {
            let expected = complete_plays(src, "", *k, *len, enc);
            let got = accepted(&automaton(src, "", *k, enc), *len);
            if got != expected {
                let missing: Vec<_> = expected.difference(&got).take(3).collect();
                let extra: Vec<_> = got.difference(&expected).take(3).collect();
                failures.push(format!("{} [{}]: missing {:?} extra {:?}", src, enc, missing, extra));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
