//! Terms and term pairs with verdicts worked out by hand.

pub const FIG5A: &str = "let c = ref 0 in fun y:unit. if !c = 0 then c := 1 else Omega";
pub const FIG5B: &str = "fun x:unit. let c = ref 0 in fun y:unit. if !c = 0 then c := 1 else Omega";

/// (term, context, int size)
pub const TERMS: &[(&str, &str, u32)] = &[
    ("()", "", 2),
    ("fun x:int. succ (pred x)", "", 3),
    (FIG5A, "", 2),
    (FIG5B, "", 2),
    ("let c = ref 0 in fun y:unit. c := succ !c; !c", "", 3),
    ("let c = ref 2 in while !c do c := pred !c", "", 3),
    ("let c = ref 0 in mkvar (fun u:unit. !c) (fun v:int. c := succ v)", "", 2),
    ("fun x:int. let c = ref x in fun y:int. if !c = y then 1 else (c := y; 0)", "", 2),
    ("!x; !x", "x: intref", 2),
    ("x := succ !x", "x: intref", 2),
    ("while !x do x := pred !x", "x: intref", 3),
    ("f (f 0)", "f: int -> int", 2),
    ("if x then f 0 else f 1", "x: int, f: int -> int", 2),
    ("let c = ref 0 in fun y:unit. f (); c := succ !c; !c", "f: unit -> unit", 2),
    ("let c = ref 0 in z (fun u:unit. c := succ !c; !c)", "z: (unit -> int) -> unit", 2),
    ("z (fun a:int. fun b:int. if a then b else 0)", "z: (int -> int -> int) -> int", 2),
    ("fun y:int. let r = ref y in z (mkvar (fun u:unit. !r) (fun v:int. r := v)); !r", "z: intref -> unit", 2),
    ("let g = f () in let h = f () in h (); g ()", "f: unit -> unit -> unit", 2),
    ("let r = f () in r := 1; !r", "f: unit -> intref", 2),
    ("let g = f () in z (fun u:unit. g ())", "f: unit -> unit -> unit, z: (unit -> unit) -> unit", 2),
];

/// (left, right, context, int size, equivalent)
pub const PAIRS: &[(&str, &str, &str, u32, bool)] = &[
    ("f ()", "f (); ()", "f: unit -> unit", 2, true),
    ("fun x:int. x", "fun x:int. succ (pred x)", "", 3, true),
    ("()", "let c = ref 0 in ()", "", 2, true),
    ("let c = ref 0 in fun y:unit. c := succ !c", "fun y:unit. ()", "", 2, true),
    ("fun x:int. if x then 1 else 0", "fun x:int. if x = 0 then 0 else 1", "", 2, true),
    ("!x", "let y = !x in y", "x: intref", 2, true),
    ("x := 1", "x := 1; ()", "x: intref", 2, true),
    ("Omega", "while 1 do ()", "", 2, true),
    ("fun y:int. f y", "fun y:int. let r = f y in r", "f: int -> int", 2, true),
    ("let c = ref 0 in c := 1; !c", "1", "", 2, true),
    (
        "z (fun y:int. succ y)",
        "z (fun y:int. let r = ref y in r := succ !r; !r)",
        "z: (int -> int) -> int",
        2,
        true,
    ),
    (FIG5B, "fun x:unit. let c = ref 0 in fun y:unit. if !c then Omega else c := 1", "", 2, true),
    ("let g = f () in g (); g ()", "let g = f () in g (); g (); ()", "f: unit -> unit -> unit", 2, true),
    (
        "mkvar (fun u:unit. 0) (fun v:int. ())",
        "let c = ref 0 in mkvar (fun u:unit. 0) (fun v:int. c := v)",
        "",
        2,
        true,
    ),
    (
        "fun x:int. fun y:int. if x then y else 0",
        "fun x:int. fun y:int. if x then (if y then 1 else 0) else 0",
        "",
        2,
        true,
    ),
    ("f (f 0)", "let a = f 0 in f a", "f: int -> int", 2, true),
    ("x := succ !x", "let v = !x in x := succ v", "x: intref", 2, true),
    (
        "let c = ref 0 in z (fun u:unit. c := 1); !c",
        "let c = ref 0 in z (fun u:unit. c := 1); if !c then 1 else 0",
        "z: (unit -> unit) -> unit",
        2,
        true,
    ),
    ("fun x:unit. ()", "fun x:unit. let c = ref 0 in ()", "", 2, true),
    ("let c = ref 0 in mkvar (fun u:unit. !c) (fun v:int. c := v)", "ref 0", "", 2, true),
    ("let g = f () in fun y:unit. g ()", "let g = f () in fun y:unit. let r = g () in r", "f: unit -> unit -> unit", 2, true),
    ("fun x:unit. Omega", "fun x:unit. while 1 do ()", "", 2, true),
    (FIG5A, "fun y:unit. Omega", "", 2, false),
    ("!x", "!x; !x", "x: intref", 2, false),
    (FIG5B, "let c = ref 0 in fun x:unit. fun y:unit. if !c = 0 then c := 1 else Omega", "", 2, false),
    ("fun x:int. x", "fun x:int. succ x", "", 2, false),
    ("f ()", "()", "f: unit -> unit", 2, false),
    ("f (); f ()", "f ()", "f: unit -> unit", 2, false),
    ("x := 1", "x := 0", "x: intref", 2, false),
    ("let c = ref 0 in fun y:unit. c := succ !c; !c", "fun y:unit. 1", "", 2, false),
    ("()", "Omega", "", 2, false),
    ("z (fun y:int. y)", "z (fun y:int. succ y)", "z: (int -> int) -> int", 2, false),
    ("let g = f () in g (); g ()", "let g = f () in let h = f () in g (); h ()", "f: unit -> unit -> unit", 2, false),
    (
        "let g = f () in let h = f () in h (); g ()",
        "let g = f () in let h = f () in g (); h ()",
        "f: unit -> unit -> unit",
        2,
        false,
    ),
    ("fun y:unit. x := 1; !x", "fun y:unit. x := 1; 1", "x: intref", 2, false),
    ("mkvar (fun u:unit. 1) (fun v:int. ())", "mkvar (fun u:unit. 0) (fun v:int. ())", "", 2, false),
    (
        "fun x:int. let c = ref x in fun y:int. if !c = y then 1 else (c := y; 0)",
        "fun x:int. fun y:int. if x = y then 1 else 0",
        "",
        2,
        false,
    ),
    ("if x then f 0 else f 1", "f x", "x: int, f: int -> int", 2, false),
    (
        "fun y:unit. z (fun u:unit. ())",
        "fun y:unit. z (fun u:unit. ()); z (fun u:unit. ())",
        "z: (unit -> unit) -> unit",
        2,
        false,
    ),
    (
        "let c = ref 0 in z (fun u:unit. c := succ !c; !c)",
        "z (fun u:unit. 1)",
        "z: (unit -> int) -> unit",
        2,
        false,
    ),
    ("x := 1; x := 1", "x := 1", "x: intref", 2, false),
    ("let r = f () in r := 1; !r", "let r = f () in r := 1; 1", "f: unit -> intref", 2, false),
];
