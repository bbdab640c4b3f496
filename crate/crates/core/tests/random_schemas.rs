mod common;

use proptest::prelude::*;

use schemawit_core::algebra::{check_guarded, validate};
use schemawit_core::error::Error;
use schemawit_core::generate::Outcome;
use schemawit_core::json::JsonValue;
use schemawit_core::limits::{Deadline, Limits};
use schemawit_core::pattern::PatternError;
use schemawit_core::pipeline::{check_containment, witness, Containment, Options};
use schemawit_core::reference::reference_validate;
use schemawit_core::translate::translate;

use common::{j, probes};

/// Budget errors signal resource exhaustion, not a wrong answer.
fn resource_exhausted(e: &Error) -> bool {
    matches!(
        e,
        Error::Timeout
            | Error::ExpansionBudgetExceeded { .. }
            | Error::DnfTooLarge { .. }
            | Error::VariableBudgetExceeded { .. }
            | Error::Pattern(PatternError::TooLarge { .. })
    )
}

/// Small schemas built from one keyword per node.
fn schema() -> impl Strategy<Value = String> {
    let leaf = prop::sample::select(vec![
        r#"{"type":"string"}"#,
        r#"{"type":"number"}"#,
        r#"{"type":"integer"}"#,
        r#"{"type":"object"}"#,
        r#"{"type":"array"}"#,
        r#"{"type":["null","boolean"]}"#,
        r#"{"minimum":2}"#,
        r#"{"exclusiveMaximum":5}"#,
        r#"{"multipleOf":3}"#,
        r#"{"multipleOf":0.5}"#,
        r#"{"pattern":"^a"}"#,
        r#"{"minLength":2}"#,
        r#"{"maxLength":1}"#,
        r#"{"required":["a"]}"#,
        r#"{"minProperties":2}"#,
        r#"{"maxProperties":1}"#,
        r#"{"minItems":1}"#,
        r#"{"maxItems":2}"#,
        r#"{"const":"a"}"#,
        r#"{"enum":[1,"b",null]}"#,
        "true",
        "false",
        r##"{"$ref":"#/definitions/d"}"##,
        r##"{"$ref":"#/definitions/e"}"##,
    ])
    .prop_map(String::from);
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|s| format!(r#"{{"not":{s}}}"#)),
            prop::collection::vec(inner.clone(), 1..3).prop_map(|v| format!(r#"{{"allOf":[{}]}}"#, v.join(","))),
            prop::collection::vec(inner.clone(), 1..3).prop_map(|v| format!(r#"{{"anyOf":[{}]}}"#, v.join(","))),
            prop::collection::vec(inner.clone(), 1..3).prop_map(|v| format!(r#"{{"oneOf":[{}]}}"#, v.join(","))),
            inner.clone().prop_map(|s| format!(r#"{{"properties":{{"a":{s}}}}}"#)),
            inner.clone().prop_map(|s| format!(r#"{{"patternProperties":{{"^b":{s}}}}}"#)),
            inner.clone().prop_map(|s| format!(r#"{{"additionalProperties":{s},"properties":{{"a":true}}}}"#)),
            inner.clone().prop_map(|s| format!(r#"{{"items":{s}}}"#)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!(r#"{{"items":[{a}],"additionalItems":{b}}}"#)),
            inner.clone().prop_map(|s| format!(r#"{{"contains":{s}}}"#)),
            inner.prop_map(|s| format!(r#"{{"propertyNames":{s}}}"#)),
        ]
    })
}

/// A random schema with two definitions that may refer to each other.
fn document() -> impl Strategy<Value = String> {
    (schema(), schema(), schema())
        .prop_map(|(root, d, e)| format!(r#"{{"definitions":{{"d":{d},"e":{e}}},"allOf":[{root}]}}"#))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pipeline_is_sound_on_random_schemas(src in document()) {
        let s = j(&src);
        let doc = match translate(&s) {
            Ok(doc) => doc,
            Err(e) if resource_exhausted(&e) || matches!(e, Error::UnguardedRecursion(_) | Error::UnsupportedKeyword { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("{src}: {e}"))),
        };
        if !check_guarded(&doc.store, &doc.env).unwrap() {
            prop_assert!(matches!(witness(&s, &Options::default()), Err(Error::UnguardedRecursion(_))));
            return Ok(());
        }
        let ps = probes(&s, 150, 3, 5);
        for p in &ps {
            prop_assert_eq!(validate(&doc, p).unwrap(), reference_validate(&s, p).unwrap(), "{} on {:?}", src, p);
        }
        let opts = Options {
            limits: Limits { deadline: Deadline::after(std::time::Duration::from_secs(20)), ..Limits::default() },
            ..Options::default()
        };
        match witness(&s, &opts) {
            Ok(run) => {
                prop_assert!(run.passes <= run.fixpoint_vars + 1);
                match run.outcome {
                    Outcome::Witness(w) => prop_assert!(reference_validate(&s, &w).unwrap()),
                    Outcome::Unsatisfiable => {
                        let hit: Option<&JsonValue> = ps.iter().find(|p| reference_validate(&s, p).unwrap());
                        prop_assert!(hit.is_none(), "{} unsat but {:?} validates", src, hit);
                    }
                }
            }
            Err(e) if resource_exhausted(&e) => {}
            Err(e) => prop_assert!(false, "{}: {}", src, e),
        }
    }

    #[test]
    fn containment_verdicts_are_sound(a in document(), b in document()) {
        let (s1, s2) = (j(&a), j(&b));
        let opts = Options {
            limits: Limits { deadline: Deadline::after(std::time::Duration::from_secs(20)), ..Limits::default() },
            ..Options::default()
        };
        let guarded = |s: &JsonValue| translate(s).is_ok_and(|d| check_guarded(&d.store, &d.env).unwrap());
        prop_assume!(guarded(&s1) && guarded(&s2));
        match check_containment(&s1, &s2, &opts) {
            Ok((Containment::Included, run)) => {
                prop_assert!(run.passes <= run.fixpoint_vars + 1);
                let both = JsonValue::Array(vec![s1.clone(), s2.clone()]);
                for p in probes(&both, 150, 3, 6) {
                    let escapes = reference_validate(&s1, &p).unwrap() && !reference_validate(&s2, &p).unwrap();
                    prop_assert!(!escapes, "{} in {} but {:?}", a, b, p);
                }
            }
            Ok((Containment::CounterExample(c), _)) => {
                prop_assert!(reference_validate(&s1, &c).unwrap() && !reference_validate(&s2, &c).unwrap());
            }
            Err(e) if resource_exhausted(&e) => {}
            Err(e) => prop_assert!(false, "{} in {}: {}", a, b, e),
        }
    }
}
