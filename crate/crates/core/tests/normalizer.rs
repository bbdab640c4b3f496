mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use schemawit_core::algebra::{validate_term, Env, SchemaDoc, Store, Term, TermId, TypeTag, VarId};
use schemawit_core::decimal::{Decimal, ExtDecimal};
use schemawit_core::limits::Limits;
use schemawit_core::normalize::{Gdnf, Normalizer};
use schemawit_core::pattern::exact;

use common::{j, probes};

/// A document whose variables `v0..vn` are bound to distinct numeric
/// groups, with `root` as the root body.
fn numeric_vars(n: usize) -> (Store, Env, Vec<VarId>) {
    let mut s = Store::new();
    let mut env = Env::new();
    let mut vars = Vec::new();
    for i in 0..n {
        let v = s.var_id(&format!("v{i}"));
        let num = s.type_of(TypeTag::Num);
        let m = s.mk(Term::MulOf(Decimal::from_int(i as i64 + 2)));
        let body = s.and([num, m]);
        env.set(v, body);
        vars.push(v);
    }
    (s, env, vars)
}

fn normalizer(s: Store, env: Env, root: TermId) -> Normalizer {
    Normalizer::new(SchemaDoc { store: s, env, root }, Limits::default()).unwrap()
}

#[test]
fn robdd_intern_is_idempotent_and_de_morgan_stable() {
    let (s, env, v) = numeric_vars(2);
    let root = s.top();
    let mut n = normalizer(s, env, root);
    n.not_complete().unwrap();
    let st = &mut n.store;
    let (x, y) = (st.var(v[0]), st.var(v[1]));
    let xy = st.and([x, y]);
    let nx = st.not(x);
    let ny = st.not(y);
    let or = st.or([nx, ny]);
    let demorgan = st.not(or);
    let taut = st.or([x, nx]);
    let a = n.robdd_intern(xy, "w").unwrap();
    let b = n.robdd_intern(xy, "w").unwrap();
    let c = n.robdd_intern(demorgan, "w").unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(n.robdd_intern(taut, "t").unwrap(), n.top_var());
}

#[test]
fn not_completion_adds_the_other_five_types() {
    let mut s = Store::new();
    let mut env = Env::new();
    let x = s.var_id("x");
    let arr = s.type_of(TypeTag::Arr);
    env.set(x, arr);
    let root = s.var(x);
    let mut n = normalizer(s, env, root);
    n.not_complete().unwrap();
    let nx = n.complement_of(x).unwrap();
    let groups = n.canonical(nx).unwrap();
    let types: BTreeSet<TypeTag> = groups.iter().map(|g| g.ty).collect();
    let expected: BTreeSet<TypeTag> =
        [TypeTag::Null, TypeTag::Bool, TypeTag::Num, TypeTag::Str, TypeTag::Obj].into_iter().collect();
    assert_eq!(types, expected);
    assert!(groups.iter().all(|g| g.itos.is_empty()));
    assert_eq!(n.complement_of(nx).unwrap(), x);
}

#[test]
fn equivalent_complement_is_not_duplicated() {
    let mut s = Store::new();
    let mut env = Env::new();
    let (x, y) = (s.var_id("x"), s.var_id("y"));
    let num = s.type_of(TypeTag::Num);
    env.set(x, num);
    let vx = s.var(x);
    let nvx = s.not(vx);
    env.set(y, nvx);
    let root = s.var(x);
    let mut n = normalizer(s, env, root);
    n.not_complete().unwrap();
    assert_eq!(n.complement_of(x).unwrap(), y);
    assert_eq!(n.complement_of(y).unwrap(), x);
}

#[test]
fn push_not_pattern_and_patt_req() {
    let (s, env, v) = numeric_vars(1);
    let root = s.top();
    let mut n = normalizer(s, env, root);
    n.not_complete().unwrap();
    let st = &mut n.store;
    let p = st.pat(exact("a"));
    let pattern = st.mk(Term::Pattern(p));
    let vx = st.var(v[0]);
    let req = st.mk(Term::PattReq(p, vx));

    let neg = n.neg(pattern).unwrap();
    let Term::And(parts) = n.store.get(neg).clone() else { panic!("expected a conjunction") };
    assert!(parts.contains(&n.store.type_of(TypeTag::Str)));
    assert!(parts.iter().any(|&t| matches!(n.store.get(t), Term::Pattern(q) if *q != p)));

    let neg = n.neg(req).unwrap();
    let nx = n.complement_of(v[0]).unwrap();
    let Term::And(parts) = n.store.get(neg).clone() else { panic!("expected a conjunction") };
    assert!(parts.contains(&n.store.type_of(TypeTag::Obj)));
    let props_not_x = {
        let vnx = n.store.var(nx);
        n.store.mk(Term::Props(p, vnx))
    };
    assert!(parts.contains(&props_not_x));

    let dbl = n.store.not(pattern);
    let dbl = n.store.not(dbl);
    let pos = n.pos(dbl).unwrap();
    assert_eq!(pos, pattern);
}

#[test]
fn stratification_extracts_conjunction() {
    let (mut s, mut env, v) = numeric_vars(2);
    let (x, y) = (s.var(v[0]), s.var(v[1]));
    let xy = s.and([x, y]);
    let p = s.pat(exact("a"));
    let req = s.mk(Term::PattReq(p, xy));
    let r = s.var_id("r");
    env.set(r, req);
    let root = s.var(r);
    let mut n = normalizer(s, env, root);
    n.not_complete().unwrap();
    let snap = n.stratify().unwrap();
    let body = snap.env.get(n.root()).unwrap();
    let Term::PattReq(_, arg) = n.store.get(body).clone() else { panic!("pattReq expected") };
    let Term::Var(w) = n.store.get(arg).clone() else { panic!("argument should be a variable") };
    let groups = n.canonical(w).unwrap();
    assert_eq!(groups.len(), 1);
    assert_eq!(groups[0].ty, TypeTag::Num);
    assert_eq!(groups[0].itos.len(), 2);
    let nw = n.complement_of(w).unwrap();
    assert_ne!(nw, w);
}

#[test]
fn gdnf_distributes() {
    let mut s = Store::new();
    let leaves: Vec<TermId> = [2, 3, 5, 7].iter().map(|&k| s.mk(Term::MulOf(Decimal::from_int(k)))).collect();
    let ab = s.or([leaves[0], leaves[1]]);
    let cd = s.or([leaves[2], leaves[3]]);
    let body = s.and([ab, cd]);
    let x = s.var_id("x");
    let mut env = Env::new();
    env.set(x, body);
    let root = s.var(x);
    let mut n = normalizer(s, env, root);
    n.not_complete().unwrap();
    n.stratify().unwrap();
    let g = n.gdnf(n.root()).unwrap();
    let sorted = |mut v: Vec<TermId>| {
        v.sort();
        v
    };
    let expected: Gdnf = [
        sorted(vec![leaves[0], leaves[2]]),
        sorted(vec![leaves[0], leaves[3]]),
        sorted(vec![leaves[1], leaves[2]]),
        sorted(vec![leaves[1], leaves[3]]),
    ]
    .into_iter()
    .collect();
    assert_eq!(*g, expected);
}

#[test]
fn canonicalization_drops_clashes_and_foreign_itos() {
    let mut s = Store::new();
    let obj = s.type_of(TypeTag::Obj);
    let arr = s.type_of(TypeTag::Arr);
    let num = s.type_of(TypeTag::Num);
    let p = s.pat(exact("a"));
    let top = s.top();
    let props = s.mk(Term::Props(p, top));
    let clash = s.and([obj, arr]);
    let foreign = s.and([num, props]);
    let body = s.or([clash, foreign]);
    let x = s.var_id("x");
    let mut env = Env::new();
    env.set(x, body);
    let root = s.var(x);
    let mut n = normalizer(s, env, root);
    n.not_complete().unwrap();
    n.stratify().unwrap();
    let groups = n.canonical(n.root()).unwrap();
    assert_eq!(groups.len(), 1);
    assert_eq!(groups[0].ty, TypeTag::Num);
    assert!(groups[0].itos.is_empty());
}

#[test]
fn untyped_conjunction_splits_per_type() {
    let mut s = Store::new();
    let m = s.mk(Term::MulOf(Decimal::from_int(2)));
    let x = s.var_id("x");
    let mut env = Env::new();
    env.set(x, m);
    let root = s.var(x);
    let mut n = normalizer(s, env, root);
    n.not_complete().unwrap();
    n.stratify().unwrap();
    let groups = n.canonical(n.root()).unwrap();
    assert_eq!(groups.len(), 6);
    for g in groups.iter() {
        assert_eq!(g.itos.is_empty(), g.ty != TypeTag::Num);
    }
}

/// A Boolean body over `vars` drawn from a small grammar.
#[derive(Debug, Clone)]
enum Body {
    Var(usize),
    Not(Box<Body>),
    And(Box<Body>, Box<Body>),
    Or(Box<Body>, Box<Body>),
}

fn body_strategy(nvars: usize) -> impl Strategy<Value = Body> {
    let leaf = (0..nvars).prop_map(Body::Var);
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|b| Body::Not(Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Body::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Body::Or(Box::new(a), Box::new(b))),
        ]
    })
}

impl Body {
    fn term(&self, s: &mut Store, vars: &[VarId]) -> TermId {
        match self {
            Body::Var(i) => s.var(vars[*i]),
            Body::Not(b) => {
                let t = b.term(s, vars);
                s.not(t)
            }
            Body::And(a, b) => {
                let (a, b) = (a.term(s, vars), b.term(s, vars));
                s.and([a, b])
            }
            Body::Or(a, b) => {
                let (a, b) = (a.term(s, vars), b.term(s, vars));
                s.or([a, b])
            }
        }
    }

    fn truth(&self, row: u32) -> bool {
        match self {
            Body::Var(i) => row & (1 << i) != 0,
            Body::Not(b) => !b.truth(row),
            Body::And(a, b) => a.truth(row) && b.truth(row),
            Body::Or(a, b) => a.truth(row) || b.truth(row),
        }
    }

    fn table(&self, nvars: usize) -> Vec<bool> {
        (0..1u32 << nvars).map(|r| self.truth(r)).collect()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Two bodies over independent variables share a name exactly when their
    /// truth tables agree.
    #[test]
    fn robdd_names_follow_truth_tables(bodies in prop::collection::vec(body_strategy(4), 2..6)) {
        let mut s = Store::new();
        let mut env = Env::new();
        let vars: Vec<VarId> = (0..4)
            .map(|i| {
                let v = s.var_id(&format!("p{i}"));
                let r = s.mk(Term::Req(format!("k{i}")));
                env.set(v, r);
                v
            })
            .collect();
        let root = s.top();
        let mut n = normalizer(s, env, root);
        n.not_complete().unwrap();
        let mut seen: Vec<(Vec<bool>, VarId)> = Vec::new();
        for b in &bodies {
            let t = b.term(&mut n.store, &vars);
            let name = n.robdd_intern(t, "b").unwrap();
            let table = b.table(4);
            for (other, oname) in &seen {
                prop_assert_eq!(*other == table, *oname == name);
            }
            seen.push((table, name));
        }
    }
}

/// A translated fixture, rebuilt for each stage check.
fn stage_agreement(schema_text: &str) {
    let schema = j(schema_text);
    let doc = schemawit_core::translate::translate(&schema).unwrap();
    let mut n = Normalizer::new(doc, Limits::default()).unwrap();
    let ne = n.not_complete().unwrap();
    let st = n.stratify().unwrap();
    let gd = n.gdnf_snapshot().unwrap();
    let ca = n.canonical_snapshot().unwrap();
    for p in probes(&schema, 150, 3, 11) {
        let want = schemawit_core::reference::reference_validate(&schema, &p).unwrap();
        for snap in [&ne, &st, &gd, &ca] {
            assert_eq!(validate_term(&n.store, &snap.env, snap.root, &p).unwrap(), want, "{schema_text} on {p:?}");
        }
    }
}

#[test]
fn stages_preserve_semantics_on_small_schemas() {
    stage_agreement(r#"{"not":{"type":"object","properties":{"a":{"not":{"type":"number"}}},"required":["a"]}}"#);
    stage_agreement(r#"{"type":"array","not":{"contains":{"minimum":3}},"items":[{"type":"string"}]}"#);
    stage_agreement(r#"{"anyOf":[{"multipleOf":2},{"not":{"maximum":5}}],"type":"number"}"#);
}

#[test]
fn negated_number_interval_splits() {
    let mut s = Store::new();
    let b = s.mk(Term::Betw(ExtDecimal::Finite(Decimal::from_int(0)), ExtDecimal::Finite(Decimal::from_int(5))));
    let root = s.top();
    let mut n = normalizer(s, Env::new(), root);
    n.not_complete().unwrap();
    let neg = n.neg(b).unwrap();
    for (v, inside) in [("-1", false), ("0", true), ("5", true), ("5.5", false), ("\"x\"", false)] {
        let jv = j(v);
        let got = validate_term(&n.store, &Env::new(), neg, &jv).unwrap();
        let expect = if matches!(jv, schemawit_core::json::JsonValue::Num(_)) { !inside } else { false };
        assert_eq!(got, expect, "{v}");
    }
}

/// `oneOf` branch `x2` has the root as its complement; completion must not
/// turn the root's own `¬x2` into a self-reference.
#[test]
fn completion_stays_guarded_when_the_root_is_a_complement() {
    let src = r#"{"oneOf":[{"anyOf":[true]},{"type":"string"}]}"#;
    stage_agreement(src);
    let run = schemawit_core::pipeline::witness(&j(src), &Default::default()).unwrap();
    assert!(matches!(run.outcome, schemawit_core::generate::Outcome::Witness(_)));
}
