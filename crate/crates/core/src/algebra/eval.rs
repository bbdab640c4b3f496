use std::collections::HashMap;

use super::{undefined, Assignment, Env, ExtNat, SchemaDoc, Store, Term, TermId, TypeTag};
use crate::decimal::ExtDecimal;
use crate::error::{Error, Result};
use crate::json::JsonValue;

/// How `var(x)` is interpreted.
enum Vars<'a> {
    /// Unfold the definition; guardedness bounds the unfolding by value depth.
    Unfold { env: &'a Env, memo: HashMap<(TermId, *const JsonValue), Option<bool>> },
    /// Membership in the finite set bound by the assignment.
    Assigned(&'a Assignment),
}

struct Evaluator<'a> {
    store: &'a Store,
    vars: Vars<'a>,
}

/// `j ∈ ⟦root⟧_E`.
pub fn validate(doc: &SchemaDoc, j: &JsonValue) -> Result<bool> {
    validate_term(&doc.store, &doc.env, doc.root, j)
}

/// `j ∈ ⟦t⟧_E`. Unguarded recursion reached during evaluation is an error.
pub fn validate_term(store: &Store, env: &Env, t: TermId, j: &JsonValue) -> Result<bool> {
    let mut ev = Evaluator { store, vars: Vars::Unfold { env, memo: HashMap::new() } };
    ev.eval(t, j)
}

/// `j ∈ ⟦s⟧_A`, reading each `var(x)` as membership in `a(x)`.
pub fn assignment_eval(store: &Store, s: TermId, a: &Assignment, j: &JsonValue) -> Result<bool> {
    let mut ev = Evaluator { store, vars: Vars::Assigned(a) };
    ev.eval(s, j)
}

fn between(lo: &ExtDecimal, hi: &ExtDecimal, n: &ExtDecimal, strict: bool) -> bool {
    if strict {
        lo < n && n < hi
    } else {
        lo <= n && n <= hi
    }
}

impl Evaluator<'_> {
    fn eval(&mut self, t: TermId, j: &JsonValue) -> Result<bool> {
        let store = self.store;
        let ty = TypeTag::of(j);
        let term = store.get(t);
        if let Some(ito_ty) = term.ito_type() {
            if ito_ty != ty {
                return Ok(true);
            }
        }
        Ok(match term {
            Term::IsBoolValue(b) => j == &JsonValue::Bool(*b),
            Term::Pattern(p) => {
                let JsonValue::Str(s) = j else { unreachable!() };
                store.dfa(*p)?.accepts(s)
            }
            Term::Betw(lo, hi) | Term::XBetw(lo, hi) => {
                let JsonValue::Num(q) = j else { unreachable!() };
                between(lo, hi, &ExtDecimal::Finite(q.clone()), matches!(term, Term::XBetw(..)))
            }
            Term::MulOf(q) => {
                let JsonValue::Num(n) = j else { unreachable!() };
                n.is_multiple_of(q)
            }
            Term::NotMulOf(q) => {
                let JsonValue::Num(n) = j else { unreachable!() };
                !n.is_multiple_of(q)
            }
            Term::Props(r, s) => {
                let JsonValue::Object(m) = j else { unreachable!() };
                let d = store.dfa(*r)?;
                for (k, v) in m {
                    if d.accepts(k) && !self.eval(*s, v)? {
                        return Ok(false);
                    }
                }
                true
            }
            Term::PattReq(r, s) => {
                let JsonValue::Object(m) = j else { unreachable!() };
                let d = store.dfa(*r)?;
                for (k, v) in m {
                    if d.accepts(k) && self.eval(*s, v)? {
                        return Ok(true);
                    }
                }
                false
            }
            Term::Req(k) => {
                let JsonValue::Object(m) = j else { unreachable!() };
                m.contains_key(k)
            }
            Term::Pro(i, hi) => {
                let JsonValue::Object(m) = j else { unreachable!() };
                let n = m.len() as u64;
                *i <= n && hi.contains(n)
            }
            Term::Item(l, s) => {
                let JsonValue::Array(a) = j else { unreachable!() };
                match a.get(*l as usize - 1) {
                    Some(e) => self.eval(*s, e)?,
                    None => true,
                }
            }
            Term::Items(i, s) => {
                let JsonValue::Array(a) = j else { unreachable!() };
                for e in a.iter().skip(*i as usize) {
                    if !self.eval(*s, e)? {
                        return Ok(false);
                    }
                }
                true
            }
            Term::ContAfter(i, s) => {
                let JsonValue::Array(a) = j else { unreachable!() };
                for e in a.iter().skip(*i as usize) {
                    if self.eval(*s, e)? {
                        return Ok(true);
                    }
                }
                false
            }
            Term::Cont(lo, hi, s) => {
                let JsonValue::Array(a) = j else { unreachable!() };
                let mut n = 0u64;
                for e in a {
                    if self.eval(*s, e)? {
                        n += 1;
                        if let ExtNat::Fin(m) = hi {
                            if n > *m {
                                return Ok(false);
                            }
                        }
                    }
                }
                *lo <= n
            }
            Term::Type(t) => *t == ty,
            Term::Var(x) => return self.eval_var(t, *x, j),
            Term::And(parts) => {
                for &p in parts {
                    if !self.eval(p, j)? {
                        return Ok(false);
                    }
                }
                true
            }
            Term::Or(parts) => {
                for &p in parts {
                    if self.eval(p, j)? {
                        return Ok(true);
                    }
                }
                false
            }
            Term::Not(s) => !self.eval(*s, j)?,
        })
    }

    fn eval_var(&mut self, t: TermId, x: super::VarId, j: &JsonValue) -> Result<bool> {
        let store = self.store;
        match &mut self.vars {
            Vars::Assigned(a) => match a.get(x) {
                Some(set) => Ok(set.contains(j)),
                None => Err(Error::UnboundVariable(store.var_name(x).to_string())),
            },
            Vars::Unfold { env, memo } => {
                let key = (t, j as *const JsonValue);
                match memo.get(&key) {
                    Some(Some(b)) => return Ok(*b),
                    Some(None) => return Err(Error::UnguardedRecursion(store.var_name(x).to_string())),
                    None => {}
                }
                let body = env.get(x).ok_or_else(|| undefined(store, x))?;
                memo.insert(key, None);
                let r = self.eval(body, j)?;
                if let Vars::Unfold { memo, .. } = &mut self.vars {
                    memo.insert(key, Some(r));
                }
                Ok(r)
            }
        }
    }
}
