mod common;

use proptest::prelude::*;

use schemawit_core::algebra::{validate, Assignment, Env, ExtNat, SchemaDoc, Store, Term, TermId, TypeTag};
use schemawit_core::decimal::{Decimal, ExtDecimal};
use schemawit_core::generate::{bottom_up, gen, gen_base, gen_string, object, NumConstraints, Outcome};
use schemawit_core::json::JsonValue;
use schemawit_core::limits::{Deadline, Limits};
use schemawit_core::normalize::{Normalizer, TypedGroup};
use schemawit_core::pattern::{complement, parse_pattern, Anchoring, Eere};
use schemawit_core::pipeline::{check_containment, check_equivalence, Containment, Equivalence, Options};
use schemawit_core::prepare::{PreparedGroup, Preparer};
use schemawit_core::reference::reference_validate;

use common::{j, Ratio};

fn anchored(src: &str) -> Eere {
    parse_pattern(src, Anchoring::Anchored).unwrap()
}

fn num_mul(s: &mut Store, k: i64) -> TermId {
    let num = s.type_of(TypeTag::Num);
    let m = s.mk(Term::MulOf(Decimal::from_int(k)));
    s.and([num, m])
}

fn doc_of(build: &dyn Fn(&mut Store, &mut Env) -> TermId) -> SchemaDoc {
    let mut store = Store::new();
    let mut env = Env::new();
    let root = build(&mut store, &mut env);
    SchemaDoc { store, env, root }
}

/// Runs the whole pipeline on a hand-built document and checks any witness
/// against a fresh copy of it.
fn generate(build: &dyn Fn(&mut Store, &mut Env) -> TermId) -> Outcome {
    let n = Normalizer::run(doc_of(build), Limits::default()).unwrap();
    let p = Preparer::run(n).unwrap();
    let bu = bottom_up(&p, p.norm.root()).unwrap();
    assert!(bu.passes <= bu.vars + 1);
    if let Outcome::Witness(w) = &bu.outcome {
        assert!(validate(&doc_of(build), w).unwrap(), "witness {w:?} is sound");
    }
    bu.outcome
}

fn witness(build: &dyn Fn(&mut Store, &mut Env) -> TermId) -> JsonValue {
    match generate(build) {
        Outcome::Witness(w) => w,
        Outcome::Unsatisfiable => panic!("expected a witness"),
    }
}

fn d(s: &str) -> Decimal {
    s.parse().unwrap()
}

fn fin(s: &str) -> ExtDecimal {
    ExtDecimal::Finite(d(s))
}

#[test]
fn null_document() {
    assert_eq!(witness(&|s, _| s.type_of(TypeTag::Null)), JsonValue::Null);
}

#[test]
fn disjoint_anchored_patterns_are_unsatisfiable() {
    let out = generate(&|s, _| {
        let st = s.type_of(TypeTag::Str);
        let (a, b) = (s.pat(anchored("a")), s.pat(anchored("b")));
        let (pa, pb) = (s.mk(Term::Pattern(a)), s.mk(Term::Pattern(b)));
        s.and([st, pa, pb])
    });
    assert_eq!(out, Outcome::Unsatisfiable);
}

#[test]
fn implicative_root_yields_a_non_object() {
    let w = witness(&|s, env| {
        let x = s.var_id("x");
        let f = s.bottom();
        env.set(x, f);
        let vx = s.var(x);
        let p = s.pat(Eere::top());
        let props = s.mk(Term::Props(p, vx));
        let r = s.mk(Term::PattReq(p, vx));
        s.and([props, r])
    });
    assert_ne!(TypeTag::of(&w), TypeTag::Obj);
}

#[test]
fn booleans() {
    let mut s = Store::new();
    let t = s.mk(Term::IsBoolValue(true));
    let f = s.mk(Term::IsBoolValue(false));
    let dl = Deadline::none();
    let g = |itos: Vec<TermId>| TypedGroup { ty: TypeTag::Bool, itos };
    assert_eq!(gen_base(&s, &g(vec![t]), &dl).unwrap(), Some(JsonValue::Bool(true)));
    assert_eq!(gen_base(&s, &g(vec![f]), &dl).unwrap(), Some(JsonValue::Bool(false)));
    assert_eq!(gen_base(&s, &g(vec![t, f]), &dl).unwrap(), None);
    assert_eq!(gen(&s, &[], &Assignment::new(), &dl).unwrap(), Vec::<JsonValue>::new());
}

#[test]
fn strings() {
    let mut s = Store::new();
    assert_eq!(gen_string(&s, &[]).unwrap(), Some(String::new()));
    let ab = s.pat(anchored("a|b"));
    let ab = s.mk(Term::Pattern(ab));
    assert_eq!(gen_string(&s, &[ab]).unwrap(), Some("a".into()));
    let a = anchored("a");
    let na = s.pat(complement(&a));
    let a = s.pat(a);
    let (pa, pna) = (s.mk(Term::Pattern(a)), s.mk(Term::Pattern(na)));
    assert_eq!(gen_string(&s, &[pa, pna]).unwrap(), None);
}

fn constraints(lo: ExtDecimal, hi: ExtDecimal, strict: bool, mul: Option<&str>, not_mul: &[&str]) -> NumConstraints {
    let mut c = NumConstraints::default();
    c.add_interval(lo, hi, strict);
    if let Some(m) = mul {
        c.add_mul(&d(m));
    }
    c.not_mul = not_mul.iter().map(|n| d(n)).collect();
    c
}

#[test]
fn numbers_of_the_five_cases() {
    let dl = Deadline::none();
    let one_point = constraints(fin("5"), fin("5"), false, Some("2.5"), &[]);
    assert_eq!(one_point.generate(&dl).unwrap(), Some(d("5")));
    let scan = constraints(fin("0"), fin("20"), false, Some("10"), &["4", "6"]);
    assert_eq!(scan.generate(&dl).unwrap(), Some(d("10")));
    let prime = constraints(fin("0"), ExtDecimal::PosInf, true, Some("1"), &["2", "3"]);
    assert_eq!(prime.generate(&dl).unwrap(), Some(d("5")));
    let empty = constraints(fin("3"), fin("1"), false, None, &[]);
    assert_eq!(empty.generate(&dl).unwrap(), None);
    let no_multiple = constraints(fin("2.1"), fin("3.9"), false, Some("2"), &[]);
    assert_eq!(no_multiple.generate(&dl).unwrap(), None);
    let divides = constraints(ExtDecimal::NegInf, ExtDecimal::PosInf, false, Some("6"), &["3"]);
    assert_eq!(divides.generate(&dl).unwrap(), None);
    let stepping = constraints(fin("0"), fin("1"), true, None, &["0.5", "0.25", "0.1"]);
    let v = stepping.generate(&dl).unwrap().unwrap();
    assert!(stepping.satisfies(&v));
    let negative = constraints(ExtDecimal::NegInf, fin("-3"), true, Some("3"), &[]);
    let v = negative.generate(&dl).unwrap().unwrap();
    assert!(v < d("-3") && v.is_multiple_of(&d("3")));
}

fn bounded() -> impl Strategy<Value = ExtDecimal> {
    prop_oneof![
        1 => Just(ExtDecimal::NegInf),
        1 => Just(ExtDecimal::PosInf),
        6 => (-40i64..40).prop_map(|k| ExtDecimal::Finite(Decimal::new(k.into(), -1))),
    ]
}

fn step() -> impl Strategy<Value = Decimal> {
    prop::sample::select(vec!["0.5", "1", "2", "3", "0.25", "1.5", "4", "0.3"]).prop_map(|s| s.parse().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn number_witnesses_satisfy_their_group(
        lo in bounded(), hi in bounded(), strict in any::<bool>(),
        mul in prop::option::of(step()), not_mul in prop::collection::vec(step(), 0..3),
    ) {
        let mut c = NumConstraints::default();
        c.add_interval(lo, hi, strict);
        if let Some(m) = &mul {
            c.add_mul(m);
        }
        c.not_mul = not_mul;
        if let Some(v) = c.generate(&Deadline::none()).unwrap() {
            let r = Ratio::of(&v);
            if let Some(m) = &c.mul {
                prop_assert!(r.is_multiple_of(&Ratio::of(m)));
            }
            for n in &c.not_mul {
                prop_assert!(!r.is_multiple_of(&Ratio::of(n)));
            }
            prop_assert!(c.in_interval(&v));
        }
    }
}

/// `type(Obj) ∧ props(ab:x) ∧ pattReq(a.*:y) ∧ pro_1^1` with `x` even.
#[test]
fn overlapping_property_and_requirement() {
    let w = witness(&|s, env| {
        let (x, y) = (s.var_id("x"), s.var_id("y"));
        let xb = num_mul(s, 2);
        env.set(x, xb);
        let yb = s.type_of(TypeTag::Num);
        env.set(y, yb);
        let (p, r) = (s.pat(anchored("ab")), s.pat(anchored("a.*")));
        let (vx, vy) = (s.var(x), s.var(y));
        let obj = s.type_of(TypeTag::Obj);
        let props = s.mk(Term::Props(p, vx));
        let req = s.mk(Term::PattReq(r, vy));
        let one = s.mk(Term::Pro(1, ExtNat::Fin(1)));
        s.and([obj, props, req, one])
    });
    let m = w.as_object().expect("object witness");
    assert_eq!(m.len(), 1);
    let (k, v) = m.iter().next().unwrap();
    assert!(k.starts_with('a'));
    let n = v.as_decimal().expect("numeric member");
    if k == "ab" {
        assert!(n.is_multiple_of(&d("2")));
    }
}

#[test]
fn split_solution_on_a_single_key_is_not_viable() {
    let mut s = Store::new();
    let mut env = Env::new();
    let (x, y) = (s.var_id("x"), s.var_id("y"));
    let xb = num_mul(&mut s, 2);
    env.set(x, xb);
    let yb = num_mul(&mut s, 3);
    env.set(y, yb);
    let a = s.pat(anchored("a"));
    let (vx, vy) = (s.var(x), s.var(y));
    let obj = s.type_of(TypeTag::Obj);
    let rx = s.mk(Term::PattReq(a, vx));
    let ry = s.mk(Term::PattReq(a, vy));
    let root = s.and([obj, rx, ry]);
    let n = Normalizer::run(SchemaDoc { store: s, env, root }, Limits::default()).unwrap();
    let p = Preparer::run(n).unwrap();
    let groups = p.groups(p.norm.root()).unwrap();
    let o = groups
        .iter()
        .find_map(|g| match g {
            PreparedGroup::Object(o) => Some(o),
            _ => None,
        })
        .unwrap();
    let find = |sat: &[usize]| o.choices.iter().position(|c| c.rp_satisfied == sat).unwrap();
    let (cx, cy, cxy) = (find(&[0]), find(&[1]), find(&[0, 1]));
    assert_eq!(o.choices[cx].cell, o.choices[cy].cell);
    assert!(!object::viable(o, &[cx, cy]));
    assert!(object::viable(o, &[cxy]));
    let bu = bottom_up(&p, p.norm.root()).unwrap();
    let Outcome::Witness(w) = bu.outcome else { panic!("satisfiable") };
    if let Some(v) = w.get("a") {
        assert!(v.as_decimal().unwrap().is_multiple_of(&d("6")));
    }
}

#[test]
fn bare_object_and_array() {
    assert_eq!(witness(&|s, _| s.type_of(TypeTag::Obj)), JsonValue::Object(Default::default()));
    assert_eq!(witness(&|s, _| s.type_of(TypeTag::Arr)), JsonValue::Array(vec![]));
}

#[test]
fn array_of_the_four_shapes() {
    let build = |s: &mut Store, env: &mut Env| {
        let (x, y, z) = (s.var_id("x"), s.var_id("y"), s.var_id("z"));
        let num = s.type_of(TypeTag::Num);
        env.set(x, num);
        let yb = num_mul(s, 2);
        env.set(y, yb);
        let zb = num_mul(s, 3);
        env.set(z, zb);
        let (vx, vy, vz) = (s.var(x), s.var(y), s.var(z));
        let arr = s.type_of(TypeTag::Arr);
        let item = s.mk(Term::Item(2, vx));
        let after = s.mk(Term::ContAfter(0, vy));
        let once = s.mk(Term::Cont(1, ExtNat::Fin(1), vz));
        let top = s.top();
        let two = s.mk(Term::Cont(2, ExtNat::Fin(2), top));
        s.and([arr, item, after, once, two])
    };
    let w = witness(&build);
    let items = w.as_array().unwrap();
    assert_eq!(items.len(), 2);
    let is = |v: &JsonValue, k: &str| v.as_decimal().is_some_and(|n| n.is_multiple_of(&d(k)));
    assert!(items[1].as_decimal().is_some(), "second element satisfies x");
    assert_eq!(items.iter().filter(|v| is(v, "3")).count(), 1, "exactly one element satisfies z");
    assert!(items.iter().any(|v| is(v, "2")), "some element satisfies y");
}

#[test]
fn two_disjoint_counting_requirements() {
    let w = witness(&|s, env| {
        let (x, y) = (s.var_id("x"), s.var_id("y"));
        let xb = s.type_of(TypeTag::Null);
        env.set(x, xb);
        let yb = s.type_of(TypeTag::Bool);
        env.set(y, yb);
        let (vx, vy) = (s.var(x), s.var(y));
        let arr = s.type_of(TypeTag::Arr);
        let cx = s.mk(Term::Cont(1, ExtNat::Inf, vx));
        let cy = s.mk(Term::Cont(1, ExtNat::Inf, vy));
        s.and([arr, cx, cy])
    });
    let items = w.as_array().unwrap();
    assert_eq!(items.len(), 2);
    assert!(items.contains(&JsonValue::Null));
    assert!(items.iter().any(|v| matches!(v, JsonValue::Bool(_))));
}

#[test]
fn containment_examples() {
    let opts = Options::default();
    let string = j(r#"{"type":"string"}"#);
    assert_eq!(check_containment(&string, &string, &opts).unwrap().0, Containment::Included);
    let (s1, s2) = (j(r#"{"minimum":0}"#), j(r#"{"minimum":1}"#));
    let Containment::CounterExample(c) = check_containment(&s1, &s2, &opts).unwrap().0 else {
        panic!("minimum 0 is not within minimum 1")
    };
    assert!(reference_validate(&s1, &c).unwrap() && !reference_validate(&s2, &c).unwrap());
    let a = j(r#"{"type":"object","properties":{"foo":false}}"#);
    let b = j(r#"{"not":{"required":["foo"]}}"#);
    assert_eq!(check_equivalence(&a, &b, &opts).unwrap().0, Equivalence::Equivalent);
    let (e, _) = check_equivalence(&s1, &s2, &opts).unwrap();
    assert!(matches!(e, Equivalence::Differ { left_not_in_right: true, .. }));
}
