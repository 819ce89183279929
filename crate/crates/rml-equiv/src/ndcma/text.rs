//! Line-oriented automaton format:
//!
//! ```text
//! level 1
//! alphabet a0 a1 q0 q1
//! states 3 4 (5,0) 6 7 (5,1)
//! initial 3
//! finals 3 (5,0) 7 (5,1)
//! stuck reject
//! 3 --q0, (⊥) -> 4, (4)
//! (5,0) --q1, ((5,0),⊥) -> 6, ((5,0),6)
//! ```
//!
//! State names and letters must not contain whitespace; state names may
//! contain commas as long as their parentheses balance.

use super::{NdcmaError, Wndcma};

fn tuple<I: IntoIterator<Item = String>>(items: I) -> String {
    format!("({})", items.into_iter().collect::<Vec<_>>().join(","))
}

pub fn render(a: &Wndcma) -> String {
    let mut out = String::new();
    out.push_str(&format!("level {}\n", a.level));
    out.push_str(&format!("alphabet {}\n", a.alphabet.join(" ")));
    out.push_str(&format!("states {}\n", a.states.join(" ")));
    out.push_str(&format!("initial {}\n", a.state_name(a.initial)));
    let finals: Vec<&str> = a.finals.iter().map(|s| a.state_name(*s)).collect();
    out.push_str(&format!("finals {}\n", finals.join(" ")));
    out.push_str(&format!("stuck {}\n", if a.stuck_accepts { "accept" } else { "reject" }));
    for (k, ts) in &a.delta {
        let sig = tuple(k.sig.iter().map(|s| match s {
            Some(s) => a.state_name(*s).to_string(),
            None => "⊥".to_string(),
        }));
        for t in ts {
            let upd = tuple(t.update.iter().map(|s| a.state_name(*s).to_string()));
            out.push_str(&format!(
                "{} --{}, {} -> {}, {}\n",
                a.state_name(k.state),
                a.alphabet[k.letter as usize],
                sig,
                a.state_name(t.state),
                upd
            ));
        }
    }
    out
}

/// Splits "(a,(b,c),⊥)" into ["a", "(b,c)", "⊥"].
fn split_tuple(s: &str) -> Option<Vec<&str>> {
    let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return None;
        }
    }
    parts.push(inner[start..].trim());
    Some(parts)
}

pub fn parse(src: &str) -> Result<Wndcma, NdcmaError> {
    let err = |line: usize, msg: &str| NdcmaError::Parse { line, msg: msg.to_string() };
    let mut level = None;
    let mut alphabet: Option<Vec<String>> = None;
    let mut states: Vec<String> = Vec::new();
    let mut initial = None;
    let mut finals: Vec<String> = Vec::new();
    let mut stuck = false;
    let mut edges = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((src_state, rest)) = line.split_once(" --") {
            edges.push((n, src_state.trim().to_string(), rest.to_string()));
            continue;
        }
        let (head, tail) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let words: Vec<String> = tail.split_whitespace().map(str::to_string).collect();
        match head {
            "level" => level = Some(tail.trim().parse::<usize>().map_err(|_| err(n, "bad level"))?),
            "alphabet" => alphabet = Some(words),
            "states" => states.extend(words),
            "initial" => initial = Some(tail.trim().to_string()),
            "finals" => finals = words,
            "stuck" => {
                stuck = match tail.trim() {
                    "accept" => true,
                    "reject" => false,
                    _ => return Err(err(n, "stuck must be accept or reject")),
                }
            }
            _ => return Err(err(n, "unrecognised line")),
        }
    }
    let level = level.ok_or_else(|| err(0, "missing level"))?;
    let alphabet = alphabet.ok_or_else(|| err(0, "missing alphabet"))?;
    let mut a = Wndcma::new(&alphabet, level);
    a.stuck_accepts = stuck;
    let intern = |a: &mut Wndcma, name: &str| a.state_id(name).unwrap_or_else(|| a.add_state(name));
    for s in &states {
        intern(&mut a, s);
    }
    let init = initial.ok_or_else(|| err(0, "missing initial"))?;
    a.initial = intern(&mut a, &init);
    for f in &finals {
        let id = intern(&mut a, f);
        a.finals.insert(id);
    }
    for (n, src_state, rest) in edges {
        let (lhs, rhs) = rest.split_once(" -> ").ok_or_else(|| err(n, "missing ' -> '"))?;
        let (letter, sig) = lhs.split_once(", ").ok_or_else(|| err(n, "missing signature"))?;
        let (tgt, upd) = rhs.split_once(", ").ok_or_else(|| err(n, "missing update"))?;
        let letter_id = a.letter_id(letter.trim()).ok_or_else(|| err(n, "letter not in alphabet"))?;
        let sig_parts = split_tuple(sig).ok_or_else(|| err(n, "bad signature tuple"))?;
        let upd_parts = split_tuple(upd).ok_or_else(|| err(n, "bad update tuple"))?;
        if sig_parts.len() != upd_parts.len() || sig_parts.is_empty() || sig_parts.len() > level + 1 {
            return Err(err(n, "signature/update length does not fit the level"));
        }
        let s = intern(&mut a, &src_state);
        let sig = sig_parts
            .iter()
            .map(|p| if *p == "⊥" { None } else { Some(intern(&mut a, p)) })
            .collect();
        let t = intern(&mut a, tgt.trim());
        let upd = upd_parts.iter().map(|p| intern(&mut a, p)).collect();
        a.add_transition(s, letter_id, sig, t, upd);
    }
    Ok(a)
}
