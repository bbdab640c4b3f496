#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schemawit_core::decimal::Decimal;
use schemawit_core::json::{parse, to_canonical_string, JsonValue};

pub fn j(s: &str) -> JsonValue {
    parse(s).unwrap_or_else(|e| panic!("bad JSON {s}: {e}"))
}

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn load_dir(sub: &str) -> Vec<(String, JsonValue)> {
    let mut out: Vec<(String, JsonValue)> = std::fs::read_dir(fixtures_dir().join(sub))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, j(&std::fs::read_to_string(&p).unwrap()))
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub fn sat_fixtures() -> Vec<(String, JsonValue)> {
    load_dir("sat")
}

pub fn unsat_fixtures() -> Vec<(String, JsonValue)> {
    load_dir("unsat")
}

pub struct Pair {
    pub name: String,
    pub s1: JsonValue,
    pub s2: JsonValue,
    pub included: bool,
}

pub fn containment_pairs() -> Vec<Pair> {
    let text = std::fs::read_to_string(fixtures_dir().join("containment.json")).unwrap();
    let JsonValue::Array(items) = j(&text) else { panic!("containment.json holds an array") };
    items
        .iter()
        .map(|p| Pair {
            name: p.get("name").and_then(JsonValue::as_str).unwrap().to_string(),
            s1: p.get("s1").unwrap().clone(),
            s2: p.get("s2").unwrap().clone(),
            included: p.get("included") == Some(&JsonValue::Bool(true)),
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Keys, strings and numbers worth probing a schema with.
pub struct Vocab {
    pub keys: Vec<String>,
    pub strings: Vec<String>,
    pub numbers: Vec<JsonValue>,
}

const BASE_KEYS: [&str; 14] = ["", "a", "b", "c", "k", "l", "x", "ab", "ac", "az", "abz", "x0", "foo", "aa"];
const BASE_STRINGS: [&str; 12] = ["", "a", "b", "x", "y", "ab", "ac", "aab", "aaab", "abxcd", "000-aa", "deep"];
const BASE_NUMBERS: [&str; 22] = [
    "0", "1", "-1", "2", "3", "4", "5", "6", "7", "10", "11", "15", "20", "42", "55", "-6", "100", "0.5", "1.5", "0.1",
    "0.3", "-0.25",
];

impl Vocab {
    pub fn from_schema(schema: &JsonValue) -> Vocab {
        let mut keys: BTreeSet<String> = BASE_KEYS.iter().map(|s| s.to_string()).collect();
        let mut strings: BTreeSet<String> = BASE_STRINGS.iter().map(|s| s.to_string()).collect();
        let mut numbers: BTreeSet<String> = BASE_NUMBERS.iter().map(|s| s.to_string()).collect();
        collect(schema, &mut keys, &mut strings, &mut numbers);
        Vocab {
            keys: keys.into_iter().collect(),
            strings: strings.into_iter().collect(),
            numbers: numbers.iter().map(|n| j(n)).collect(),
        }
    }
}

fn collect(s: &JsonValue, keys: &mut BTreeSet<String>, strings: &mut BTreeSet<String>, numbers: &mut BTreeSet<String>) {
    match s {
        JsonValue::Object(m) => {
            for (k, v) in m {
                if matches!(k.as_str(), "properties" | "dependencies") {
                    if let Some(inner) = v.as_object() {
                        keys.extend(inner.keys().cloned());
                    }
                }
                collect(v, keys, strings, numbers);
            }
        }
        JsonValue::Array(items) => items.iter().for_each(|v| collect(v, keys, strings, numbers)),
        JsonValue::Str(t) => {
            keys.insert(t.clone());
            strings.insert(t.clone());
        }
        JsonValue::Num(n) => {
            for d in [n.clone(), n.add(&Decimal::from_int(1)), n.sub(&Decimal::from_int(1)), n.neg()] {
                numbers.insert(to_canonical_string(&JsonValue::Num(d)));
            }
            numbers.insert(to_canonical_string(&JsonValue::Num(n.mul_int(&BigInt::from(2)))));
            numbers.insert(to_canonical_string(&JsonValue::Num(n.add(&"0.5".parse().unwrap()))));
        }
        _ => {}
    }
}

/// A random value of depth at most `depth` drawn from `v`.
pub fn random_value(r: &mut ChaCha8Rng, v: &Vocab, depth: u32) -> JsonValue {
    let pick = if depth == 0 { r.gen_range(0..4) } else { r.gen_range(0..6) };
    match pick {
        0 => match r.gen_range(0..3) {
            0 => JsonValue::Null,
            _ => JsonValue::Bool(r.gen()),
        },
        1 => v.numbers.choose(r).unwrap().clone(),
        2 => JsonValue::Str(v.strings.choose(r).unwrap().clone()),
        3 => {
            if r.gen_bool(0.5) {
                JsonValue::Num(Decimal::from_int(r.gen_range(-20..=60)))
            } else {
                JsonValue::Str(v.keys.choose(r).unwrap().clone())
            }
        }
        4 => {
            let n = r.gen_range(0..=3);
            JsonValue::Array((0..n).map(|_| random_value(r, v, depth - 1)).collect())
        }
        _ => {
            let n = r.gen_range(0..=3);
            let mut m = std::collections::BTreeMap::new();
            for _ in 0..n {
                m.insert(v.keys.choose(r).unwrap().clone(), random_value(r, v, depth - 1));
            }
            JsonValue::Object(m)
        }
    }
}

pub fn probes(schema: &JsonValue, n: usize, depth: u32, seed: u64) -> Vec<JsonValue> {
    let v = Vocab::from_schema(schema);
    let mut r = rng(seed);
    (0..n).map(|_| random_value(&mut r, &v, depth)).collect()
}

/// Exact rational `num / den` with `den > 0`, independent of the crate's
/// decimal arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: BigInt,
    pub den: BigInt,
}

impl Ratio {
    /// Parses plain or exponent decimal notation.
    pub fn parse(s: &str) -> Ratio {
        let (mant, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i64>().unwrap()),
            None => (s, 0),
        };
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        let digits: BigInt = format!("{int}{frac}").parse().unwrap();
        let e = exp - frac.len() as i64;
        let ten = BigInt::from(10);
        if e >= 0 {
            Ratio { num: digits * ten.pow(e as u32), den: BigInt::from(1) }
        } else {
            Ratio { num: digits, den: ten.pow((-e) as u32) }
        }
    }

    pub fn of(d: &Decimal) -> Ratio {
        Ratio::parse(&to_canonical_string(&JsonValue::Num(d.clone())))
    }

    pub fn int(n: i64) -> Ratio {
        Ratio { num: BigInt::from(n), den: BigInt::from(1) }
    }

    pub fn cmp(&self, o: &Ratio) -> std::cmp::Ordering {
        (&self.num * &o.den).cmp(&(&o.num * &self.den))
    }

    /// `self / q` is an integer.
    pub fn is_multiple_of(&self, q: &Ratio) -> bool {
        let a = &self.num * &q.den;
        let b = (&q.num * &self.den).abs();
        !b.is_zero() && a.mod_floor(&b).is_zero()
    }

    pub fn mul_int(&self, k: &BigInt) -> Ratio {
        Ratio { num: &self.num * k, den: self.den.clone() }
    }

    /// `⌈self / q⌉` and `⌊other / q⌋` style bounds for positive `q`.
    pub fn div_floor(&self, q: &Ratio) -> BigInt {
        (&self.num * &q.den).div_floor(&(&q.num * &self.den))
    }

    pub fn div_ceil(&self, q: &Ratio) -> BigInt {
        -((-&self.num * &q.den).div_floor(&(&q.num * &self.den)))
    }
}

/// A DFA over `{a, b, c}` as a plain table; `None` is the implicit dead
/// state.
#[derive(Clone, Debug)]
pub struct TableDfa {
    pub next: Vec<[Option<usize>; 3]>,
    pub accepting: Vec<bool>,
}

pub const ABC: [char; 3] = ['a', 'b', 'c'];

impl TableDfa {
    pub fn random(r: &mut ChaCha8Rng, max_states: usize) -> TableDfa {
        let n = r.gen_range(1..=max_states);
        let next = (0..n)
            .map(|_| std::array::from_fn(|_| if r.gen_bool(0.2) { None } else { Some(r.gen_range(0..n)) }))
            .collect();
        let accepting = (0..n).map(|_| r.gen_bool(0.3)).collect();
        TableDfa { next, accepting }
    }

    pub fn to_dfa(&self) -> schemawit_core::pattern::Dfa {
        use schemawit_core::pattern::{DState, Dfa};
        let states = self
            .next
            .iter()
            .zip(&self.accepting)
            .map(|(row, &accepting)| {
                let trans =
                    row.iter().zip(ABC).filter_map(|(t, c)| t.map(|t| (c as u32, c as u32, t as u32))).collect();
                DState { trans, accepting }
            })
            .collect();
        Dfa::from_states(states)
    }

    pub fn accepts(&self, w: &str) -> bool {
        let mut s = 0;
        for ch in w.chars() {
            let Some(i) = ABC.iter().position(|&c| c == ch) else { return false };
            match self.next[s][i] {
                Some(t) => s = t,
                None => return false,
            }
        }
        self.accepting[s]
    }

    /// Accepted words of length `< max_len` in length-then-lexicographic
    /// order, at most `limit` of them, by breadth-first search over all
    /// words whose state can still reach acceptance.
    pub fn bfs_words(&self, limit: usize, max_len: usize) -> Vec<String> {
        let n = self.next.len();
        let mut live = self.accepting.clone();
        loop {
            let mut changed = false;
            for s in 0..n {
                if !live[s] && self.next[s].iter().flatten().any(|&t| live[t]) {
                    live[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut out = Vec::new();
        let mut level: Vec<(String, usize)> = if live[0] { vec![(String::new(), 0)] } else { vec![] };
        let mut len = 0;
        while !level.is_empty() && len < max_len {
            let mut next_level = Vec::new();
            for (w, s) in &level {
                if self.accepting[*s] {
                    out.push(w.clone());
                    if out.len() == limit {
                        return out;
                    }
                }
                for (i, c) in ABC.iter().enumerate() {
                    if let Some(t) = self.next[*s][i] {
                        if live[t] {
                            next_level.push((format!("{w}{c}"), t));
                        }
                    }
                }
            }
            level = next_level;
            len += 1;
        }
        out
    }
}

/// Checks a number verdict for `c` against an exact rational oracle.
/// `None` verdicts are confirmed by scanning candidate multiples.
pub fn check_number_verdict(
    c: &schemawit_core::generate::NumConstraints,
    verdict: Option<&Decimal>,
) -> Result<(), String> {
    use schemawit_core::decimal::ExtDecimal;
    let bound = |e: &ExtDecimal| match e {
        ExtDecimal::Finite(d) => Some(Ratio::of(d)),
        _ => None,
    };
    let (lo, hi) = (bound(&c.lo.value), bound(&c.hi.value));
    if c.lo.value == ExtDecimal::PosInf || c.hi.value == ExtDecimal::NegInf {
        if let Some(v) = verdict {
            return Err(format!("{v:?} returned for an empty interval"));
        }
        return Ok(());
    }
    let mul = c.mul.as_ref().map(Ratio::of);
    let not_mul: Vec<Ratio> = c.not_mul.iter().map(Ratio::of).collect();
    let ok = |r: &Ratio| {
        let above = lo.as_ref().is_none_or(|l| match r.cmp(l) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => !c.lo.strict,
            _ => false,
        });
        let below = hi.as_ref().is_none_or(|h| match r.cmp(h) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => !c.hi.strict,
            _ => false,
        });
        above
            && below
            && mul.as_ref().is_none_or(|m| r.is_multiple_of(m))
            && not_mul.iter().all(|q| !r.is_multiple_of(q))
    };
    match verdict {
        Some(v) => ok(&Ratio::of(v)).then_some(()).ok_or_else(|| format!("{v:?} violates the group")),
        None => {
            let step = mul.clone().unwrap_or(Ratio { num: BigInt::from(1), den: BigInt::from(1000) });
            let anchor = lo.clone().or(hi.clone()).unwrap_or(Ratio::int(0));
            let from = lo.clone().unwrap_or(Ratio { num: &anchor.num - &anchor.den * 100, den: anchor.den.clone() });
            let to = hi.clone().unwrap_or(Ratio { num: &anchor.num + &anchor.den * 100, den: anchor.den.clone() });
            let (mut k, last) = (from.div_ceil(&step), to.div_floor(&step));
            let mut scanned = 0;
            while k <= last && scanned < 200_000 {
                let r = step.mul_int(&k);
                if ok(&r) {
                    return Err(format!("None returned but {}/{} satisfies the group", r.num, r.den));
                }
                k += 1;
                scanned += 1;
            }
            Ok(())
        }
    }
}
