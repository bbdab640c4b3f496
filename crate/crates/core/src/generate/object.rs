//! Objects from prepared groups: minimal disjoint solutions over witnessed
//! R-choices, padded with non-R-choices, keys drawn per characteristic
//! pattern.

use std::collections::BTreeMap;

use crate::algebra::{Assignment, ExtNat};
use crate::error::Result;
use crate::json::JsonValue;
use crate::limits::Deadline;
use crate::pattern::Enumeration;
use crate::prepare::{ObjectChoice, ObjectPrepared};

/// A multiset of choices, as indices into the group's choices.
pub type ChoiceList = Vec<usize>;

/// True iff every characteristic pattern has at least as many words as
/// choices in `list` that use it.
pub fn viable(o: &ObjectPrepared, list: &[usize]) -> bool {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for &c in list {
        *counts.entry(o.choices[c].cell).or_default() += 1;
    }
    counts.iter().all(|(&cell, &n)| o.cells[cell].dfa.has_at_least(n))
}

/// Every disjoint solution of exactly `size` witnessed R-choices, in a
/// fixed order, passed to `visit` until it returns `Some`.
fn covers<T>(
    o: &ObjectPrepared,
    r_choices: &[usize],
    size: usize,
    deadline: &Deadline,
    visit: &mut dyn FnMut(&[usize]) -> Result<Option<T>>,
) -> Result<Option<T>> {
    fn go<T>(
        o: &ObjectPrepared,
        r_choices: &[usize],
        covered: &mut Vec<bool>,
        left: usize,
        acc: &mut Vec<usize>,
        deadline: &Deadline,
        visit: &mut dyn FnMut(&[usize]) -> Result<Option<T>>,
    ) -> Result<Option<T>> {
        deadline.check()?;
        let Some(first) = covered.iter().position(|&c| !c) else {
            return if left == 0 { visit(acc) } else { Ok(None) };
        };
        if left == 0 {
            return Ok(None);
        }
        for &ci in r_choices {
            let c: &ObjectChoice = &o.choices[ci];
            if !c.rp_satisfied.contains(&first) || c.rp_satisfied.iter().any(|&r| covered[r]) {
                continue;
            }
            for &r in &c.rp_satisfied {
                covered[r] = true;
            }
            acc.push(ci);
            let found = go(o, r_choices, covered, left - 1, acc, deadline, visit)?;
            acc.pop();
            for &r in &c.rp_satisfied {
                covered[r] = false;
            }
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
    let mut covered = vec![false; o.rp.len()];
    go(o, r_choices, &mut covered, size, &mut Vec::new(), deadline, visit)
}

/// The choice list of the first viable minimal disjoint solution that can
/// be padded to the minimum size, searching solutions by ascending size.
pub fn solve(o: &ObjectPrepared, a: &Assignment, deadline: &Deadline) -> Result<Option<ChoiceList>> {
    let populated = |c: &&ObjectChoice| a.is_populated(c.var);
    let r_choices: Vec<usize> =
        (0..o.choices.len()).filter(|&i| o.choices[i].is_r_choice() && populated(&&o.choices[i])).collect();
    let non_r: Vec<usize> =
        (0..o.choices.len()).filter(|&i| !o.choices[i].is_r_choice() && populated(&&o.choices[i])).collect();
    let max_size = match o.max {
        ExtNat::Fin(m) => (m as usize).min(o.rp.len()),
        ExtNat::Inf => o.rp.len(),
    };
    for size in 0..=max_size {
        let found = covers(o, &r_choices, size, deadline, &mut |sol| {
            debug_assert!(disjoint(o, sol));
            if !viable(o, sol) {
                return Ok(None);
            }
            let mut list = sol.to_vec();
            let mut missing = (o.min as usize).saturating_sub(list.len());
            for &nrc in &non_r {
                while missing > 0 {
                    list.push(nrc);
                    if viable(o, &list) {
                        missing -= 1;
                    } else {
                        list.pop();
                        break;
                    }
                }
            }
            Ok((missing == 0).then_some(list))
        })?;
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

fn disjoint(o: &ObjectPrepared, list: &[usize]) -> bool {
    let mut seen = vec![false; o.rp.len()];
    for &c in list {
        for &r in &o.choices[c].rp_satisfied {
            if std::mem::replace(&mut seen[r], true) {
                return false;
            }
        }
    }
    true
}

/// Builds the object described by `list`: distinct keys per pattern and
/// the first witness of each choice variable.
pub fn build(o: &ObjectPrepared, a: &Assignment, list: &[usize]) -> Option<JsonValue> {
    let mut by_cell: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &c in list {
        by_cell.entry(o.choices[c].cell).or_default().push(c);
    }
    let mut members = BTreeMap::new();
    for (cell, cs) in by_cell {
        let Enumeration::Words(keys) = o.cells[cell].dfa.enumerate(cs.len()) else { return None };
        for (k, c) in keys.into_iter().zip(cs) {
            members.insert(k, a.first(o.choices[c].var)?.clone());
        }
    }
    Some(JsonValue::Object(members))
}

pub fn gen_object(o: &ObjectPrepared, a: &Assignment, deadline: &Deadline) -> Result<Option<JsonValue>> {
    Ok(solve(o, a, deadline)?.and_then(|list| build(o, a, &list)))
}
