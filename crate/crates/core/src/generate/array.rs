//! Arrays from prepared groups: position-by-position search over witnessed
//! co-maximal choices, restricted to useful choices in the tail.

use std::collections::HashSet;

use crate::algebra::{Assignment, ExtNat};
use crate::error::Result;
use crate::json::JsonValue;
use crate::limits::Deadline;
use crate::prepare::{ArrayIto, ArrayPrepared};

/// Incidence over `ap ++ kp` of a choice list.
pub type Incidence = Vec<u64>;

struct Search<'a> {
    p: &'a ArrayPrepared,
    /// Witnessed choices for head position `i + 1`.
    head: Vec<Vec<usize>>,
    /// Witnessed tail choices.
    tail: Vec<usize>,
    failed: HashSet<(u64, Incidence)>,
    deadline: &'a Deadline,
}

fn cont_bounds(a: &ArrayIto) -> (u64, ExtNat) {
    match *a {
        ArrayIto::Cont(m, big_m, _) => (m, big_m),
        _ => unreachable!("counting assertions only"),
    }
}

impl Search<'_> {
    fn n_ap(&self) -> usize {
        self.p.ap.len()
    }

    fn satisfied(&self, len: u64, inc: &Incidence) -> bool {
        let n_ap = self.n_ap();
        len >= self.p.min_len
            && inc[..n_ap].iter().all(|&c| c > 0)
            && self.p.kp.iter().zip(&inc[n_ap..]).all(|(k, &c)| c >= cont_bounds(k).0)
    }

    fn max_violated(&self, len: u64, inc: &Incidence) -> bool {
        !self.p.max_len.contains(len)
            || self.p.kp.iter().zip(&inc[self.n_ap()..]).any(|(k, &c)| !cont_bounds(k).1.contains(c))
    }

    /// Raises a zero-incidence contAfter, an under-minimum counter, or the
    /// length while it is under its minimum.
    fn useful(&self, c: usize, len: u64, inc: &Incidence) -> bool {
        let ch = &self.p.choices[c];
        len < self.p.min_len
            || ch.ap_part.iter().any(|&i| inc[i] == 0)
            || ch.kp_pos.iter().any(|&i| inc[self.n_ap() + i] < cont_bounds(&self.p.kp[i]).0)
    }

    fn after(&self, c: usize, inc: &Incidence) -> Incidence {
        let ch = &self.p.choices[c];
        let mut next = inc.clone();
        for &i in &ch.ap_part {
            next[i] += 1;
        }
        for &i in &ch.kp_pos {
            next[self.n_ap() + i] += 1;
        }
        next
    }

    /// State key with counts capped where larger values cannot matter.
    fn key(&self, len: u64, inc: &Incidence) -> (u64, Incidence) {
        let n_ap = self.n_ap();
        let h = self.p.head_length;
        let len = match self.p.max_len {
            ExtNat::Inf if len >= h => len.min(h.max(self.p.min_len)),
            _ => len,
        };
        let inc = inc
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if i < n_ap {
                    c.min(1)
                } else {
                    match cont_bounds(&self.p.kp[i - n_ap]) {
                        (m, ExtNat::Inf) => c.min(m),
                        _ => c,
                    }
                }
            })
            .collect();
        (len, inc)
    }

    fn clist(&mut self, len: u64, inc: &Incidence) -> Result<Option<Vec<usize>>> {
        self.deadline.check()?;
        if self.satisfied(len, inc) {
            return Ok(Some(Vec::new()));
        }
        let key = self.key(len, inc);
        if self.failed.contains(&key) {
            return Ok(None);
        }
        let candidates: Vec<usize> = if len < self.p.head_length {
            self.head[len as usize].clone()
        } else {
            self.tail.iter().copied().filter(|&c| self.useful(c, len, inc)).collect()
        };
        for c in candidates {
            let next = self.after(c, inc);
            if self.max_violated(len + 1, &next) {
                continue;
            }
            if let Some(mut rest) = self.clist(len + 1, &next)? {
                rest.insert(0, c);
                return Ok(Some(rest));
            }
        }
        self.failed.insert(key);
        Ok(None)
    }
}

/// A solution over the witnessed choices, as indices into the choices.
pub fn solve(p: &ArrayPrepared, a: &Assignment, deadline: &Deadline) -> Result<Option<Vec<usize>>> {
    let h = p.head_length;
    let witnessed = |i: &usize| a.is_populated(p.choices[*i].var);
    let head = (1..=h)
        .map(|pos| (0..p.choices.len()).filter(|&i| p.choices[i].interval.lo == pos).filter(witnessed).collect())
        .collect();
    let tail = (0..p.choices.len()).filter(|&i| p.choices[i].interval.lo == h + 1).filter(witnessed).collect();
    let mut s = Search { p, head, tail, failed: HashSet::new(), deadline };
    let zero = vec![0; p.ap.len() + p.kp.len()];
    s.clist(0, &zero)
}

/// Incidence of a choice list.
pub fn incidence(p: &ArrayPrepared, list: &[usize]) -> Incidence {
    let mut inc = vec![0; p.ap.len() + p.kp.len()];
    for &c in list {
        for &i in &p.choices[c].ap_part {
            inc[i] += 1;
        }
        for &i in &p.choices[c].kp_pos {
            inc[p.ap.len() + i] += 1;
        }
    }
    inc
}

pub fn gen_array(p: &ArrayPrepared, a: &Assignment, deadline: &Deadline) -> Result<Option<JsonValue>> {
    let Some(list) = solve(p, a, deadline)? else { return Ok(None) };
    debug_assert!({
        let inc = incidence(p, &list);
        p.kp.iter().zip(&inc[p.ap.len()..]).all(|(k, &c)| {
            let (m, big_m) = cont_bounds(k);
            c >= m && big_m.contains(c)
        })
    });
    let items: Option<Vec<JsonValue>> = list.iter().map(|&c| a.first(p.choices[c].var).cloned()).collect();
    Ok(items.map(JsonValue::Array))
}
