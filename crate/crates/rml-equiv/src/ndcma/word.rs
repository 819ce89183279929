use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::NdcmaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NestedDataValue {
    pub id: u32,
    pub level: u32,
    pub parent: Option<u32>,
}

/// A finite word over letters paired with values of a nested data forest.
/// `values[i].id == i`; every value that is a parent is itself listed.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DataWord {
    pub values: Vec<NestedDataValue>,
    pub letters: Vec<(String, u32)>,
}

impl DataWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn fresh_value(&mut self, parent: Option<u32>) -> u32 {
        let id = self.values.len() as u32;
        let level = parent.map_or(0, |p| self.values[p as usize].level + 1);
        self.values.push(NestedDataValue { id, level, parent });
        id
    }

    pub fn push(&mut self, letter: impl Into<String>, value: u32) {
        assert!((value as usize) < self.values.len(), "unknown data value");
        self.letters.push((letter.into(), value));
    }

    pub fn value(&self, id: u32) -> &NestedDataValue {
        &self.values[id as usize]
    }

    /// Ancestors of `id`, root first, ending with `id`.
    pub fn chain(&self, id: u32) -> Vec<u32> {
        let mut out = vec![id];
        let mut cur = self.values[id as usize].parent;
        while let Some(p) = cur {
            out.push(p);
            cur = self.values[p as usize].parent;
        }
        out.reverse();
        out
    }

    pub fn max_level(&self) -> Option<u32> {
        self.values.iter().map(|v| v.level).max()
    }

    /// Renumbers values by first occurrence, ancestors before descendants.
    /// Values that never occur (not even as an ancestor) are dropped.
    pub fn canonical(&self) -> DataWord {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        let mut out = DataWord::default();
        for (letter, v) in &self.letters {
            for d in self.chain(*v) {
                if !map.contains_key(&d) {
                    let parent = self.values[d as usize].parent.map(|p| map[&p]);
                    let id = out.fresh_value(parent);
                    map.insert(d, id);
                }
            }
            out.letters.push((letter.clone(), map[v]));
        }
        out
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    pub fn prefix(&self, n: usize) -> DataWord {
        DataWord { values: self.values.clone(), letters: self.letters[..n].to_vec() }.canonical()
    }
}

impl fmt::Display for DataWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("ε");
        }
        let mut shown = vec![false; self.values.len()];
        for (i, (letter, v)) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{letter}@{v}")?;
            if let Some(p) = self.values[*v as usize].parent {
                f.write_str("(")?;
                let mut cur = Some(p);
                let mut depth = 0;
                while let Some(d) = cur {
                    write!(f, "{d}")?;
                    let next = self.values[d as usize].parent;
                    if shown[d as usize] || next.is_none() {
                        break;
                    }
                    shown[d as usize] = true;
                    f.write_str("(")?;
                    depth += 1;
                    cur = next;
                }
                for _ in 0..=depth {
                    f.write_str(")")?;
                }
            }
            shown[*v as usize] = true;
        }
        Ok(())
    }
}

fn parse_chain(s: &str) -> Result<Vec<u32>, NdcmaError> {
    // "3(1(0))" -> [3, 1, 0]
    let bad = || NdcmaError::Word(format!("bad value chain {s:?}"));
    let mut out = Vec::new();
    let mut rest = s;
    loop {
        let end = rest.find('(').unwrap_or(rest.len());
        out.push(rest[..end].trim().parse::<u32>().map_err(|_| bad())?);
        if end == rest.len() {
            break;
        }
        let inner = &rest[end + 1..];
        rest = inner.strip_suffix(')').ok_or_else(bad)?;
    }
    Ok(out)
}

impl FromStr for DataWord {
    type Err = NdcmaError;

    /// Parses `letter@id(parent)` tokens; ids are renumbered canonically.
    fn from_str(s: &str) -> Result<DataWord, NdcmaError> {
        let s = s.trim();
        let mut raw = DataWord::default();
        if s.is_empty() || s == "ε" {
            return Ok(raw);
        }
        let mut ids: BTreeMap<u32, u32> = BTreeMap::new();
        let mut parents: BTreeMap<u32, Option<u32>> = BTreeMap::new();
        let mut seq = Vec::new();
        for tok in s.split_whitespace() {
            let (letter, val) = tok
                .rsplit_once('@')
                .ok_or_else(|| NdcmaError::Word(format!("token {tok:?} lacks '@'")))?;
            let chain = parse_chain(val)?;
            for (i, d) in chain.iter().enumerate() {
                let parent = chain.get(i + 1).copied();
                match parents.get(d) {
                    Some(Some(p)) if Some(*p) != parent && parent.is_some() => {
                        return Err(NdcmaError::Word(format!("value {d} has two parents")));
                    }
                    Some(Some(_)) => {}
                    _ => {
                        if parent.is_some() || !parents.contains_key(d) {
                            parents.insert(*d, parent);
                        }
                    }
                }
            }
            seq.push((letter.to_string(), chain[0]));
        }
        // allocate in an order where parents precede children
        fn alloc(
            d: u32,
            parents: &BTreeMap<u32, Option<u32>>,
            ids: &mut BTreeMap<u32, u32>,
            raw: &mut DataWord,
            guard: usize,
        ) -> Result<u32, NdcmaError> {
            if let Some(id) = ids.get(&d) {
                return Ok(*id);
            }
            if guard > parents.len() {
                return Err(NdcmaError::Word("cyclic parent relation".into()));
            }
            let p = match parents.get(&d).copied().flatten() {
                Some(p) => Some(alloc(p, parents, ids, raw, guard + 1)?),
                None => None,
            };
            let id = raw.fresh_value(p);
            ids.insert(d, id);
            Ok(id)
        }
        for (letter, d) in seq {
            let id = alloc(d, &parents, &mut ids, &mut raw, 0)?;
            raw.letters.push((letter, id));
        }
        Ok(raw.canonical())
    }
}
