use schemawit_core::algebra::{
    assignment_eval, check_guarded, validate, Assignment, Env, ExtNat, Store, Term, TypeTag,
};
use schemawit_core::error::Error;
use schemawit_core::json::{parse, JsonValue};
use schemawit_core::pattern::{exact, Eere};
use schemawit_core::translate::translate;

fn j(s: &str) -> JsonValue {
    parse(s).unwrap()
}

#[test]
fn guardedness_examples() {
    let mut s = Store::new();
    let (x, y, z) = (s.var_id("x"), s.var_id("y"), s.var_id("z"));
    let r = s.pat(exact("a"));
    let vy = s.var(y);
    let vz = s.var(z);
    let props = s.mk(Term::Props(r, vy));
    let body = s.and([props, vz]);
    let top = s.top();
    let mut env = Env::new();
    env.set(x, body);
    env.set(y, top);
    env.set(z, top);
    assert_eq!(check_guarded(&s, &env), Ok(true));

    let mut env = Env::new();
    let vx = s.var(x);
    env.set(x, vx);
    assert_eq!(check_guarded(&s, &env), Ok(false));

    let mut env = Env::new();
    let guarded = s.mk(Term::Props(r, vx));
    env.set(x, guarded);
    assert_eq!(check_guarded(&s, &env), Ok(true));

    let mut env = Env::new();
    env.set(x, vy);
    assert!(matches!(check_guarded(&s, &env), Err(Error::UndefinedVariable(n)) if n == "y"));
}

#[test]
fn longer_unguarded_cycle_is_found() {
    let mut s = Store::new();
    let (x, y) = (s.var_id("x"), s.var_id("y"));
    let vx = s.var(x);
    let vy = s.var(y);
    let nx = s.not(vx);
    let num = s.type_of(TypeTag::Num);
    let body = s.or([nx, num]);
    let mut env = Env::new();
    env.set(x, vy);
    env.set(y, body);
    assert_eq!(check_guarded(&s, &env), Ok(false));
}

#[test]
fn assignment_eval_examples() {
    let mut s = Store::new();
    let x = s.var_id("x");
    let vx = s.var(x);
    let arr = s.type_of(TypeTag::Arr);
    let items = s.mk(Term::Items(0, vx));
    let top = s.top();
    let cont = s.mk(Term::Cont(1, ExtNat::Fin(2), top));
    let sch = s.and([arr, items, cont]);
    let mut a = Assignment::new();
    a.insert(x, j("0"));
    assert_eq!(assignment_eval(&s, sch, &a, &j("[0]")), Ok(true));
    assert_eq!(assignment_eval(&s, sch, &a, &j("[0,0]")), Ok(true));
    assert_eq!(assignment_eval(&s, sch, &a, &j("[]")), Ok(false));
    assert_eq!(assignment_eval(&s, sch, &a, &j("[0,0,0]")), Ok(false));
    assert_eq!(assignment_eval(&s, sch, &a, &j("[1]")), Ok(false));

    for v in ["null", "[]", "{\"a\":1}", "\"s\"", "-1.5"] {
        assert_eq!(assignment_eval(&s, top, &a, &j(v)), Ok(true));
        assert_eq!(assignment_eval(&s, s.bottom(), &a, &j(v)), Ok(false));
    }

    let y = s.var_id("y");
    let vy = s.var(y);
    let r = s.pat(exact("a"));
    let preq = s.mk(Term::PattReq(r, vy));
    let mut a = Assignment::new();
    a.insert(y, j("1"));
    assert_eq!(assignment_eval(&s, preq, &a, &j(r#"{"a":1}"#)), Ok(true));
    assert_eq!(assignment_eval(&s, preq, &a, &j("{}")), Ok(false));
    let z = s.var_id("z");
    let vz = s.var(z);
    assert!(matches!(assignment_eval(&s, vz, &a, &j("1")), Err(Error::UnboundVariable(_))));
}

#[test]
fn validate_examples_on_negated_required() {
    let doc = translate(&j(r#"{"not":{"required":["foo"]}}"#)).unwrap();
    assert_eq!(validate(&doc, &j("{}")), Ok(true));
    assert_eq!(validate(&doc, &j(r#"{"foo":1}"#)), Ok(false));
    assert_eq!(validate(&doc, &j("null")), Ok(false));
}

#[test]
fn validate_detects_unguarded_recursion() {
    let mut s = Store::new();
    let x = s.var_id("x");
    let vx = s.var(x);
    let mut env = Env::new();
    env.set(x, vx);
    let doc = schemawit_core::algebra::SchemaDoc { store: s, env, root: vx };
    assert!(matches!(validate(&doc, &j("1")), Err(Error::UnguardedRecursion(_))));
}

#[test]
fn debug_notation() {
    let mut s = Store::new();
    let r = s.pat(Eere::top());
    let num = s.type_of(TypeTag::Num);
    let p = s.mk(Term::Props(r, num));
    let c = s.mk(Term::Cont(1, ExtNat::Inf, num));
    let t = s.and([p, c]);
    assert_eq!(s.show(t), r"(props([\s\S]*:type(Num)) ∧ cont_1^inf(type(Num)))");
    assert_eq!(s.show(s.top()), "⊤");
    assert_eq!(s.show(s.bottom()), "⊥");
}
