//! The pattern describing exactly the strings that satisfy an assertion,
//! used to encode `propertyNames`.

use std::collections::HashSet;

use super::Translator;
use crate::algebra::{Env, Store, Term, TermId, TypeTag, VarId};
use crate::error::{Error, Result};
use crate::json::JsonValue;
use crate::pattern::{complement, intersect, Eere};

/// Expansion budget for a document: twice its node count.
pub(crate) fn budget_for(raw: &JsonValue) -> usize {
    2 * raw.size()
}

/// `PattOfS(s, e)`. Fails once the unfolded expansion exceeds twice the
/// shared size of `s` and the definitions it reaches.
pub fn patt_of_s(store: &mut Store, env: &Env, s: TermId) -> Result<Eere> {
    let limit = 2 * shared_size(store, env, s);
    let mut st = Expander { store, env: Some(env), in_progress: &[], steps: 0, limit };
    st.expand(s)
}

pub(crate) fn patt_of_s_in(tr: &mut Translator<'_>, s: TermId) -> Result<Eere> {
    let limit = tr.names_budget.max(2 * shared_size(tr.store, tr.env, s));
    let mut st = Expander { store: tr.store, env: Some(tr.env), in_progress: &tr.in_progress, steps: 0, limit };
    st.expand(s)
}

fn shared_size(store: &Store, env: &Env, s: TermId) -> usize {
    let mut seen: HashSet<TermId> = HashSet::new();
    let mut stack = vec![s];
    while let Some(t) = stack.pop() {
        if !seen.insert(t) {
            continue;
        }
        match store.get(t) {
            Term::And(v) | Term::Or(v) => stack.extend(v.iter().copied()),
            Term::Not(c) => stack.push(*c),
            Term::Var(x) => stack.extend(env.get(*x)),
            _ => {}
        }
    }
    seen.len()
}

struct Expander<'a> {
    store: &'a Store,
    env: Option<&'a Env>,
    in_progress: &'a [VarId],
    steps: usize,
    limit: usize,
}

impl Expander<'_> {
    fn expand(&mut self, s: TermId) -> Result<Eere> {
        self.steps += 1;
        if self.steps > self.limit {
            return Err(Error::ExpansionBudgetExceeded { limit: self.limit });
        }
        let store = self.store;
        Ok(match store.get(s) {
            Term::Pattern(p) => store.eere(*p).clone(),
            Term::Type(TypeTag::Str) => Eere::top(),
            Term::Type(_) => Eere::bottom(),
            Term::And(parts) => {
                let mut acc = Eere::top();
                for &p in parts {
                    acc = intersect(&acc, &self.expand(p)?);
                }
                acc
            }
            Term::Or(parts) => {
                let mut acc = Eere::top();
                for &p in parts {
                    acc = intersect(&acc, &complement(&self.expand(p)?));
                }
                complement(&acc)
            }
            Term::Not(c) => complement(&self.expand(*c)?),
            Term::Var(x) => {
                let name = store.var_name(*x);
                let body = if self.in_progress.contains(x) { None } else { self.env.and_then(|e| e.get(*x)) };
                let Some(body) = body else {
                    return Err(Error::UnsupportedKeyword {
                        path: format!("#/definitions/{name}"),
                        message: "propertyNames through a recursive reference".into(),
                    });
                };
                self.expand(body)?
            }
            _ => Eere::top(),
        })
    }
}
