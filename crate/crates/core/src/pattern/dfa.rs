//! Deterministic automata over code point intervals.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use super::ast::{Eere, Re};
use super::charset::CharSet;
use super::PatternError;

/// `(lo, hi, target)`: scalar values `lo..=hi` lead to state `target`.
type Interval = (u32, u32, u32);

pub const DEFAULT_MAX_STATES: usize = 1_000_000;

const PRINTABLE_LO: u32 = 0x20;
const PRINTABLE_HI: u32 = 0x7E;

/// One DFA state. `trans` partitions the scalar values into sorted,
/// disjoint intervals `(lo, hi, target)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DState {
    pub trans: Vec<(u32, u32, u32)>,
    pub accepting: bool,
}

/// A complete DFA whose initial state is state 0 and whose states are all
/// reachable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    states: Vec<DState>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumeration {
    Words(Vec<String>),
    Impossible,
}

impl Dfa {
    /// Builds a DFA from explicit states; missing intervals go to a fresh
    /// dead state and unreachable states are dropped.
    pub fn from_states(states: Vec<DState>) -> Dfa {
        let n = states.len() as u32;
        let mut out: Vec<DState> = Vec::with_capacity(states.len() + 1);
        let mut needs_dead = false;
        for s in &states {
            let mut covered = CharSet::empty();
            let mut trans = Vec::new();
            for &(lo, hi, t) in &s.trans {
                let seg = CharSet::range(lo, hi).intersect(&covered.complement());
                for &(a, b) in seg.ranges() {
                    trans.push((a, b, t));
                }
                covered = covered.union(&seg);
            }
            for &(a, b) in covered.complement().ranges() {
                trans.push((a, b, n));
                needs_dead = true;
            }
            trans.sort_unstable();
            out.push(DState { trans, accepting: s.accepting });
        }
        if needs_dead || out.is_empty() {
            out.push(dead_state(out.len() as u32));
        }
        Dfa { states: out }.reachable_only()
    }

    pub fn states(&self) -> &[DState] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    fn reachable_only(self) -> Dfa {
        let mut map = vec![u32::MAX; self.states.len()];
        let mut order = vec![0usize];
        map[0] = 0;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for &(_, _, t) in &self.states[s].trans {
                if map[t as usize] == u32::MAX {
                    map[t as usize] = order.len() as u32;
                    order.push(t as usize);
                }
            }
            i += 1;
        }
        let states = order
            .iter()
            .map(|&s| {
                let st = &self.states[s];
                DState {
                    trans: merge_adjacent(st.trans.iter().map(|&(lo, hi, t)| (lo, hi, map[t as usize])).collect()),
                    accepting: st.accepting,
                }
            })
            .collect();
        Dfa { states }
    }

    pub fn step(&self, s: u32, c: u32) -> u32 {
        let trans = &self.states[s as usize].trans;
        let i = trans.partition_point(|&(lo, _, _)| lo <= c);
        match i.checked_sub(1).map(|k| trans[k]) {
            Some((_, hi, t)) if c <= hi => t,
            _ => self.dead_sink(),
        }
    }

    /// A non-accepting state that only loops; only reached for code points
    /// outside the alphabet.
    fn dead_sink(&self) -> u32 {
        u32::MAX
    }

    pub fn accepts(&self, word: &str) -> bool {
        let mut s = 0u32;
        for c in word.chars() {
            s = self.step(s, c as u32);
            if s == u32::MAX {
                return false;
            }
        }
        self.states[s as usize].accepting
    }

    pub fn complement(&self) -> Dfa {
        let states = self.states.iter().map(|s| DState { trans: s.trans.clone(), accepting: !s.accepting }).collect();
        Dfa { states }
    }

    pub fn intersect(&self, other: &Dfa, max_states: usize) -> Result<Dfa, PatternError> {
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut states: Vec<DState> = Vec::new();
        index.insert((0, 0), 0);
        queue.push_back((0u32, 0u32));
        states.push(DState { trans: Vec::new(), accepting: false });
        while let Some((a, b)) = queue.pop_front() {
            let id = index[&(a, b)] as usize;
            let (sa, sb) = (&self.states[a as usize], &other.states[b as usize]);
            let mut trans = Vec::new();
            let (mut i, mut j) = (0, 0);
            while i < sa.trans.len() && j < sb.trans.len() {
                let (a0, a1, ta) = sa.trans[i];
                let (b0, b1, tb) = sb.trans[j];
                let lo = a0.max(b0);
                let hi = a1.min(b1);
                if lo <= hi {
                    let next = states.len() as u32;
                    let t = *index.entry((ta, tb)).or_insert_with(|| {
                        queue.push_back((ta, tb));
                        next
                    });
                    if t == next {
                        if states.len() >= max_states {
                            return Err(PatternError::TooLarge { limit: max_states });
                        }
                        states.push(DState { trans: Vec::new(), accepting: false });
                    }
                    trans.push((lo, hi, t));
                }
                if a1 < b1 {
                    i += 1;
                } else {
                    j += 1;
                }
            }
            states[id] = DState { trans: merge_adjacent(trans), accepting: sa.accepting && sb.accepting };
        }
        Ok(Dfa { states })
    }

    /// States from which an accepting state is reachable.
    fn live(&self) -> Vec<bool> {
        let n = self.states.len();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (s, st) in self.states.iter().enumerate() {
            for &(_, _, t) in &st.trans {
                rev[t as usize].push(s as u32);
            }
        }
        let mut live: Vec<bool> = self.states.iter().map(|s| s.accepting).collect();
        let mut stack: Vec<u32> = (0..n as u32).filter(|&s| live[s as usize]).collect();
        while let Some(t) = stack.pop() {
            for &s in &rev[t as usize] {
                if !live[s as usize] {
                    live[s as usize] = true;
                    stack.push(s);
                }
            }
        }
        live
    }

    pub fn is_empty(&self) -> bool {
        !self.live()[0]
    }

    /// True iff the live part of the automaton has a cycle.
    pub fn is_infinite(&self) -> bool {
        let live = self.live();
        if !live[0] {
            return false;
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color = vec![0u8; self.states.len()];
        let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
        color[0] = 1;
        while let Some(&mut (s, ref mut k)) = stack.last_mut() {
            let trans = &self.states[s as usize].trans;
            if *k < trans.len() {
                let t = trans[*k].2;
                *k += 1;
                if !live[t as usize] {
                    continue;
                }
                match color[t as usize] {
                    1 => return true,
                    0 => {
                        color[t as usize] = 1;
                        stack.push((t, 0));
                    }
                    _ => {}
                }
            } else {
                color[s as usize] = 2;
                stack.pop();
            }
        }
        false
    }

    /// True iff the language has at least `n` words.
    pub fn has_at_least(&self, n: u64) -> bool {
        if n == 0 {
            return true;
        }
        if self.is_infinite() {
            return true;
        }
        let live = self.live();
        if !live[0] {
            return false;
        }
        // Acyclic on live states: count paths with saturation.
        let mut memo: HashMap<u32, u64> = HashMap::new();
        self.count_from(0, n, &live, &mut memo) >= n
    }

    fn count_from(&self, s: u32, cap: u64, live: &[bool], memo: &mut HashMap<u32, u64>) -> u64 {
        if let Some(&c) = memo.get(&s) {
            return c;
        }
        let st = &self.states[s as usize];
        let mut total: u64 = st.accepting as u64;
        for &(lo, hi, t) in &st.trans {
            if !live[t as usize] || total >= cap {
                continue;
            }
            let sub = self.count_from(t, cap, live, memo);
            let width = (hi - lo) as u64 + 1;
            total = total.saturating_add(width.saturating_mul(sub)).min(cap);
        }
        memo.insert(s, total);
        total
    }

    /// The first `i` words in shortest-first order, ordering characters with
    /// printable ASCII first and then by code point.
    pub fn enumerate(&self, i: usize) -> Enumeration {
        if i == 0 {
            return Enumeration::Words(Vec::new());
        }
        let live = self.live();
        if !live[0] {
            return Enumeration::Impossible;
        }
        let infinite = self.is_infinite();
        let max_len = if infinite { usize::MAX } else { self.states.len() };
        let ordered: Vec<Vec<(u32, u32, u32)>> = self.states.iter().map(|s| ordered_pieces(&s.trans)).collect();
        let mut words = Vec::new();
        // ok[k][s]: an accepting state is reachable from s in exactly k steps
        let mut ok: Vec<Vec<bool>> = vec![self.states.iter().map(|s| s.accepting).collect()];
        let mut len = 0usize;
        while words.len() < i && len < max_len {
            while ok.len() <= len {
                let prev = ok.last().unwrap();
                let next = self.states.iter().map(|st| st.trans.iter().any(|&(_, _, t)| prev[t as usize])).collect();
                ok.push(next);
            }
            if ok[len][0] {
                let mut buf = String::new();
                self.words_of_len(0, len, &ok, &ordered, &mut buf, &mut words, i);
            }
            len += 1;
        }
        if words.len() < i {
            Enumeration::Impossible
        } else {
            Enumeration::Words(words)
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn words_of_len(
        &self,
        s: u32,
        rem: usize,
        ok: &[Vec<bool>],
        ordered: &[Vec<(u32, u32, u32)>],
        buf: &mut String,
        out: &mut Vec<String>,
        want: usize,
    ) {
        if rem == 0 {
            out.push(buf.clone());
            return;
        }
        for &(lo, hi, t) in &ordered[s as usize] {
            if !ok[rem - 1][t as usize] {
                continue;
            }
            for c in lo..=hi {
                if out.len() >= want {
                    return;
                }
                let Some(ch) = char::from_u32(c) else { continue };
                buf.push(ch);
                self.words_of_len(t, rem - 1, ok, ordered, buf, out, want);
                buf.pop();
            }
        }
    }

    pub fn first_word(&self) -> Option<String> {
        match self.enumerate(1) {
            Enumeration::Words(mut w) => w.pop(),
            Enumeration::Impossible => None,
        }
    }

    /// Moore partition refinement.
    pub fn minimize(&self) -> Dfa {
        let n = self.states.len();
        let mut class: Vec<u32> = self.states.iter().map(|s| s.accepting as u32).collect();
        loop {
            let mut sig_index: HashMap<(u32, Vec<Interval>), u32> = HashMap::new();
            let mut next = vec![0u32; n];
            for s in 0..n {
                let sig: Vec<(u32, u32, u32)> = merge_adjacent(
                    self.states[s].trans.iter().map(|&(lo, hi, t)| (lo, hi, class[t as usize])).collect(),
                );
                let k = sig_index.len() as u32;
                next[s] = *sig_index.entry((class[s], sig)).or_insert(k);
            }
            let stable = sig_index.len() == class.iter().collect::<BTreeSet<_>>().len();
            class = next;
            if stable {
                break;
            }
        }
        let mut order: HashMap<u32, u32> = HashMap::new();
        let mut rep = Vec::new();
        let mut queue = VecDeque::from([0u32]);
        order.insert(class[0], 0);
        rep.push(0usize);
        while let Some(s) = queue.pop_front() {
            for &(_, _, t) in &self.states[s as usize].trans {
                let c = class[t as usize];
                if let std::collections::hash_map::Entry::Vacant(e) = order.entry(c) {
                    e.insert(rep.len() as u32);
                    rep.push(t as usize);
                    queue.push_back(t);
                }
            }
        }
        let states = rep
            .iter()
            .map(|&s| DState {
                trans: merge_adjacent(
                    self.states[s].trans.iter().map(|&(lo, hi, t)| (lo, hi, order[&class[t as usize]])).collect(),
                ),
                accepting: self.states[s].accepting,
            })
            .collect();
        Dfa { states }
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  start [shape=point];\n  start -> s0;\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = if s.accepting { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  s{i} [shape={shape}];");
        }
        for (i, s) in self.states.iter().enumerate() {
            let mut by_target: Vec<(u32, Vec<(u32, u32)>)> = Vec::new();
            for &(lo, hi, t) in &s.trans {
                match by_target.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, v)) => v.push((lo, hi)),
                    None => by_target.push((t, vec![(lo, hi)])),
                }
            }
            for (t, ranges) in by_target {
                let label = CharSet::from_ranges(ranges).to_string().replace('\\', "\\\\").replace('"', "\\\"");
                let _ = writeln!(out, "  s{i} -> s{t} [label=\"{label}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

fn dead_state(id: u32) -> DState {
    DState { trans: CharSet::all().ranges().iter().map(|&(lo, hi)| (lo, hi, id)).collect(), accepting: false }
}

fn merge_adjacent(mut v: Vec<(u32, u32, u32)>) -> Vec<(u32, u32, u32)> {
    v.sort_unstable();
    let mut out: Vec<(u32, u32, u32)> = Vec::with_capacity(v.len());
    for (lo, hi, t) in v {
        if let Some(last) = out.last_mut() {
            if last.2 == t && last.1 + 1 == lo {
                last.1 = hi;
                continue;
            }
        }
        out.push((lo, hi, t));
    }
    out
}

/// Transition pieces with printable ASCII first, then the rest by code point.
fn ordered_pieces(trans: &[(u32, u32, u32)]) -> Vec<(u32, u32, u32)> {
    let mut printable = Vec::new();
    let mut rest = Vec::new();
    for &(lo, hi, t) in trans {
        let mut cuts = vec![lo];
        for b in [PRINTABLE_LO, PRINTABLE_HI + 1] {
            if b > lo && b <= hi {
                cuts.push(b);
            }
        }
        cuts.push(hi + 1);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1] - 1);
            if (PRINTABLE_LO..=PRINTABLE_HI).contains(&a) {
                printable.push((a, b, t));
            } else {
                rest.push((a, b, t));
            }
        }
    }
    printable.sort_unstable();
    rest.sort_unstable();
    printable.extend(rest);
    printable
}

// ---------------------------------------------------------------------------
// Compilation

#[derive(Clone, Copy, Debug)]
enum Edge {
    Eps(u32),
    Start(u32),
    End(u32),
    Chars(u32, u32),
}

struct Nfa {
    edges: Vec<Vec<Edge>>,
    classes: Vec<CharSet>,
    limit: usize,
}

impl Nfa {
    fn state(&mut self) -> Result<u32, PatternError> {
        if self.edges.len() >= self.limit {
            return Err(PatternError::TooLarge { limit: self.limit });
        }
        self.edges.push(Vec::new());
        Ok(self.edges.len() as u32 - 1)
    }

    fn class(&mut self, cs: &CharSet) -> u32 {
        self.classes.push(cs.clone());
        self.classes.len() as u32 - 1
    }

    /// Adds a fragment from `from` to a new exit state.
    fn build(&mut self, re: &Re, from: u32) -> Result<u32, PatternError> {
        match re {
            Re::Empty => self.state(),
            Re::Eps => {
                let to = self.state()?;
                self.edges[from as usize].push(Edge::Eps(to));
                Ok(to)
            }
            Re::Start | Re::End => {
                let to = self.state()?;
                let e = if matches!(re, Re::Start) { Edge::Start(to) } else { Edge::End(to) };
                self.edges[from as usize].push(e);
                Ok(to)
            }
            Re::Class(cs) => {
                let to = self.state()?;
                let k = self.class(cs);
                self.edges[from as usize].push(Edge::Chars(k, to));
                Ok(to)
            }
            Re::Concat(parts) => {
                let mut cur = from;
                for p in parts {
                    cur = self.build(p, cur)?;
                }
                Ok(cur)
            }
            Re::Alt(parts) => {
                let to = self.state()?;
                for p in parts {
                    let entry = self.state()?;
                    self.edges[from as usize].push(Edge::Eps(entry));
                    let exit = self.build(p, entry)?;
                    self.edges[exit as usize].push(Edge::Eps(to));
                }
                Ok(to)
            }
            Re::Repeat { inner, min, max } => {
                let mut cur = from;
                for _ in 0..*min {
                    cur = self.build(inner, cur)?;
                }
                match max {
                    None => {
                        let entry = self.state()?;
                        self.edges[cur as usize].push(Edge::Eps(entry));
                        let exit = self.build(inner, entry)?;
                        self.edges[exit as usize].push(Edge::Eps(entry));
                        let to = self.state()?;
                        self.edges[entry as usize].push(Edge::Eps(to));
                        Ok(to)
                    }
                    Some(m) => {
                        let to = self.state()?;
                        for _ in *min..*m {
                            self.edges[cur as usize].push(Edge::Eps(to));
                            cur = self.build(inner, cur)?;
                        }
                        self.edges[cur as usize].push(Edge::Eps(to));
                        Ok(to)
                    }
                }
            }
        }
    }

    fn closure(&self, seed: &[u32], at_start: bool, at_end: bool) -> Vec<u32> {
        let mut seen = vec![false; self.edges.len()];
        let mut stack: Vec<u32> = Vec::new();
        for &s in seed {
            if !seen[s as usize] {
                seen[s as usize] = true;
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for e in &self.edges[s as usize] {
                let t = match *e {
                    Edge::Eps(t) => t,
                    Edge::Start(t) if at_start => t,
                    Edge::End(t) if at_end => t,
                    _ => continue,
                };
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        (0..self.edges.len() as u32).filter(|&s| seen[s as usize]).collect()
    }
}

/// Subset construction for a base expression.
pub fn compile_re(re: &Re, max_states: usize) -> Result<Dfa, PatternError> {
    let mut nfa = Nfa { edges: Vec::new(), classes: Vec::new(), limit: max_states.saturating_mul(4).max(64) };
    let start = nfa.state()?;
    let accept = nfa.build(re, start)?;

    let mut index: HashMap<(Vec<u32>, bool), u32> = HashMap::new();
    let mut sets: Vec<(Vec<u32>, bool)> = Vec::new();
    let mut states: Vec<DState> = Vec::new();
    let init = (nfa.closure(&[start], true, false), true);
    index.insert(init.clone(), 0);
    sets.push(init);
    let mut next = 0usize;
    while next < sets.len() {
        let (set, at_start) = sets[next].clone();
        let accepting = nfa.closure(&set, at_start, true).contains(&accept);
        let mut bounds: BTreeSet<u32> = BTreeSet::new();
        let mut moves: Vec<(u32, u32)> = Vec::new();
        for &s in &set {
            for e in &nfa.edges[s as usize] {
                if let Edge::Chars(k, t) = *e {
                    moves.push((k, t));
                    for &(lo, hi) in nfa.classes[k as usize].ranges() {
                        bounds.insert(lo);
                        bounds.insert(hi + 1);
                    }
                }
            }
        }
        for &(lo, hi) in CharSet::all().ranges() {
            bounds.insert(lo);
            bounds.insert(hi + 1);
        }
        let bounds: Vec<u32> = bounds.into_iter().collect();
        let mut trans = Vec::new();
        let mut target_cache: HashMap<Vec<u32>, u32> = HashMap::new();
        for w in bounds.windows(2) {
            let (lo, hi) = (w[0], w[1] - 1);
            if !CharSet::all().contains(lo) {
                continue;
            }
            let mut targets: Vec<u32> =
                moves.iter().filter(|(k, _)| nfa.classes[*k as usize].contains(lo)).map(|&(_, t)| t).collect();
            targets.sort_unstable();
            targets.dedup();
            let id = match target_cache.get(&targets) {
                Some(&id) => id,
                None => {
                    let key = (nfa.closure(&targets, false, false), false);
                    let id = match index.get(&key) {
                        Some(&id) => id,
                        None => {
                            let id = sets.len() as u32;
                            if sets.len() >= max_states {
                                return Err(PatternError::TooLarge { limit: max_states });
                            }
                            index.insert(key.clone(), id);
                            sets.push(key);
                            id
                        }
                    };
                    target_cache.insert(targets, id);
                    id
                }
            };
            trans.push((lo, hi, id));
        }
        states.push(DState { trans: merge_adjacent(trans), accepting });
        next += 1;
    }
    Ok(Dfa { states })
}

/// Compiles an EERE: base expressions by subset construction, complement by
/// flipping acceptance, intersection by product.
pub fn compile(r: &Eere, max_states: usize) -> Result<Dfa, PatternError> {
    match r {
        Eere::Base(re) => compile_re(re, max_states),
        Eere::Complement(inner) => Ok(compile(inner, max_states)?.complement()),
        Eere::Intersect(a, b) => {
            let da = compile(a, max_states)?;
            let db = compile(b, max_states)?;
            da.intersect(&db, max_states)
        }
    }
}
