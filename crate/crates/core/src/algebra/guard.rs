use std::collections::BTreeSet;

use super::{undefined, Env, Store, Term, TermId, VarId};
use crate::error::Result;

/// Variables `t` depends on without passing through a typed operator.
pub fn direct_dependencies(store: &Store, t: TermId, out: &mut BTreeSet<VarId>) {
    match store.get(t) {
        Term::Var(v) => {
            out.insert(*v);
        }
        Term::And(parts) | Term::Or(parts) => {
            for &p in parts {
                direct_dependencies(store, p, out);
            }
        }
        Term::Not(s) => direct_dependencies(store, *s, out),
        _ => {}
    }
}

/// True iff no variable reaches itself through direct dependencies.
pub fn check_guarded(store: &Store, env: &Env) -> Result<bool> {
    let mut deps: Vec<(VarId, BTreeSet<VarId>)> = Vec::with_capacity(env.len());
    for (x, body) in env.iter() {
        let mut all = Vec::new();
        store.vars_of(body, &mut all);
        if let Some(&missing) = all.iter().find(|v| !env.contains(**v)) {
            return Err(undefined(store, missing));
        }
        let mut d = BTreeSet::new();
        direct_dependencies(store, body, &mut d);
        deps.push((x, d));
    }
    let index: std::collections::HashMap<VarId, usize> = deps.iter().enumerate().map(|(i, (x, _))| (*x, i)).collect();
    // Iterative three-colour DFS.
    let mut colour = vec![0u8; deps.len()];
    for start in 0..deps.len() {
        if colour[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(start, succ(&deps, &index, start))];
        colour[start] = 1;
        while let Some((node, next)) = stack.last_mut() {
            match next.pop() {
                Some(n) if colour[n] == 1 => return Ok(false),
                Some(n) if colour[n] == 0 => {
                    colour[n] = 1;
                    let s = succ(&deps, &index, n);
                    stack.push((n, s));
                }
                Some(_) => {}
                None => {
                    colour[*node] = 2;
                    stack.pop();
                }
            }
        }
    }
    Ok(true)
}

fn succ(deps: &[(VarId, BTreeSet<VarId>)], index: &std::collections::HashMap<VarId, usize>, i: usize) -> Vec<usize> {
    deps[i].1.iter().map(|v| index[v]).collect()
}
