//! Bottom-up witness generation over a prepared environment.

pub mod array;
pub mod number;
pub mod object;

pub use array::gen_array;
pub use number::NumConstraints;
pub use object::gen_object;

use crate::algebra::{Assignment, Store, Term, TermId, TypeTag, VarId};
use crate::error::Result;
use crate::json::JsonValue;
use crate::limits::Deadline;
use crate::normalize::TypedGroup;
use crate::pattern::{compile, Eere};
use crate::prepare::{PreparedGroup, Preparer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Witness(JsonValue),
    Unsatisfiable,
}

#[derive(Debug, Clone)]
pub struct BottomUp {
    pub outcome: Outcome,
    /// Passes executed, including the last useless one if any.
    pub passes: usize,
    /// Variables taking part in the fixpoint.
    pub vars: usize,
    pub assignment: Assignment,
}

/// Iterates passes that populate empty variables from the current
/// assignment until `x` is populated or a pass populates nothing.
pub fn bottom_up(prep: &Preparer, x: VarId) -> Result<BottomUp> {
    let vars = prep.vars().to_vec();
    let deadline = prep.norm.limits().deadline;
    let mut a = Assignment::new();
    for &y in &vars {
        a.bind_empty(y);
    }
    let mut passes = 0;
    loop {
        if let Some(j) = a.first(x) {
            let outcome = Outcome::Witness(j.clone());
            return Ok(BottomUp { outcome, passes, vars: vars.len(), assignment: a });
        }
        passes += 1;
        let mut next: Vec<(VarId, Vec<JsonValue>)> = Vec::new();
        for &y in &vars {
            deadline.check()?;
            if a.is_populated(y) {
                continue;
            }
            let groups = prep.groups(y).expect("prepared");
            let vals = gen(&prep.norm.store, groups, &a, &deadline)?;
            if !vals.is_empty() {
                next.push((y, vals));
            }
        }
        if next.is_empty() {
            return Ok(BottomUp { outcome: Outcome::Unsatisfiable, passes, vars: vars.len(), assignment: a });
        }
        for (y, vals) in next {
            for v in vals {
                a.insert(y, v);
            }
        }
    }
}

/// At most one value per disjunct.
pub fn gen(store: &Store, groups: &[PreparedGroup], a: &Assignment, deadline: &Deadline) -> Result<Vec<JsonValue>> {
    let mut out = Vec::new();
    for g in groups {
        let v = match g {
            PreparedGroup::Object(o) => gen_object(o, a, deadline)?,
            PreparedGroup::Array(p) => gen_array(p, a, deadline)?,
            PreparedGroup::Base(g) => gen_base(store, g, deadline)?,
        };
        if let Some(v) = v {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    Ok(out)
}

pub fn gen_base(store: &Store, g: &TypedGroup, deadline: &Deadline) -> Result<Option<JsonValue>> {
    Ok(match g.ty {
        TypeTag::Null => Some(JsonValue::Null),
        TypeTag::Bool => gen_bool(store, &g.itos),
        TypeTag::Str => gen_string(store, &g.itos)?.map(JsonValue::Str),
        TypeTag::Num => NumConstraints::from_group(store, &g.itos).generate(deadline)?.map(JsonValue::Num),
        TypeTag::Obj | TypeTag::Arr => unreachable!("structured groups are prepared"),
    })
}

fn gen_bool(store: &Store, itos: &[TermId]) -> Option<JsonValue> {
    let mut allowed = [true, true];
    for &t in itos {
        if let Term::IsBoolValue(b) = store.get(t) {
            // isBoolValue(b) rules out !b; index 0 is true, 1 is false
            allowed[*b as usize] = false;
        }
    }
    match allowed {
        [true, _] => Some(JsonValue::Bool(true)),
        [false, true] => Some(JsonValue::Bool(false)),
        [false, false] => None,
    }
}

/// The first word of the intersection of every pattern.
pub fn gen_string(store: &Store, itos: &[TermId]) -> Result<Option<String>> {
    let mut acc = compile(&Eere::top(), store.max_states())?;
    for &t in itos {
        let Term::Pattern(p) = store.get(t) else { unreachable!("string groups hold patterns only") };
        acc = acc.intersect(&*store.dfa(*p)?, store.max_states())?.minimize();
        if acc.is_empty() {
            return Ok(None);
        }
    }
    Ok(acc.first_word())
}
