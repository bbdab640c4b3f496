//! A direct JSON Schema validator over raw documents.
//!
//! It shares no code with the algebra route beyond pattern parsing: keywords
//! are interpreted on the source document, references are resolved by
//! pointer at use, and patterns are matched by the `regex` crate. It serves
//! as the self-check for generated witnesses and as a test oracle.
//!
//! Interpretation choices match the translator: `$ref` is conjoined with its
//! siblings, `additionalItems` without `items` constrains every element,
//! `contains` honours `minContains`/`maxContains`, and `uniqueItems` and
//! `format` are not checked.

use std::cell::RefCell;
use std::collections::HashMap;

use regex::Regex;

use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::json::JsonValue;
use crate::pattern::parse_re;
use crate::translate::REF_EXPANSION_FACTOR;

const MAX_NESTING: usize = 2048;

pub struct ReferenceValidator<'a> {
    root: &'a JsonValue,
    regexes: RefCell<HashMap<String, Regex>>,
}

/// Validates `j` against the document `schema`.
pub fn reference_validate(schema: &JsonValue, j: &JsonValue) -> Result<bool> {
    ReferenceValidator::new(schema).validate(j)
}

impl<'a> ReferenceValidator<'a> {
    pub fn new(root: &'a JsonValue) -> Self {
        ReferenceValidator { root, regexes: RefCell::new(HashMap::new()) }
    }

    pub fn validate(&self, j: &JsonValue) -> Result<bool> {
        self.check(self.root, j, 0)
    }

    fn matches(&self, pattern: &str, s: &str) -> Result<bool> {
        if let Some(re) = self.regexes.borrow().get(pattern) {
            return Ok(re.is_match(s));
        }
        let syntax = parse_re(pattern)?.to_regex_syntax();
        let re = regex::RegexBuilder::new(&syntax)
            .size_limit(1 << 28)
            .build()
            .map_err(|e| Error::InvalidSchema { path: pattern.into(), message: e.to_string() })?;
        let r = re.is_match(s);
        self.regexes.borrow_mut().insert(pattern.to_string(), re);
        Ok(r)
    }

    fn resolve(&self, reference: &str) -> Result<&'a JsonValue> {
        let segs =
            crate::translate::pointer_segments(reference).ok_or_else(|| Error::UnresolvableRef(reference.into()))?;
        crate::translate::resolve(self.root, &segs).ok_or_else(|| Error::UnresolvableRef(reference.into()))
    }

    fn check(&self, schema: &'a JsonValue, j: &JsonValue, nesting: usize) -> Result<bool> {
        if nesting > MAX_NESTING + REF_EXPANSION_FACTOR {
            return Err(Error::UnguardedRecursion("reference cycle".into()));
        }
        let m = match schema {
            JsonValue::Bool(b) => return Ok(*b),
            JsonValue::Object(m) => m,
            _ => return Err(Error::InvalidSchema { path: String::new(), message: "schema is not an object".into() }),
        };
        let sub = |s: &'a JsonValue, v: &JsonValue| self.check(s, v, nesting + 1);
        for (k, v) in m {
            let ok = match (k.as_str(), j) {
                ("$ref", _) => sub(self.resolve(v.as_str().unwrap_or_default())?, j)?,
                ("type", _) => {
                    let names: Vec<&str> = match v {
                        JsonValue::Array(a) => a.iter().filter_map(JsonValue::as_str).collect(),
                        other => other.as_str().into_iter().collect(),
                    };
                    names.iter().any(|n| has_type(n, j))
                }
                ("enum", _) => v.as_array().is_some_and(|a| a.contains(j)),
                ("const", _) => v == j,
                ("allOf", _) => all(v.as_array(), |s| sub(s, j))?,
                ("anyOf", _) => any(v.as_array(), |s| sub(s, j))?,
                ("oneOf", _) => {
                    let mut n = 0;
                    for s in v.as_array().into_iter().flatten() {
                        if sub(s, j)? {
                            n += 1;
                        }
                    }
                    n == 1
                }
                ("not", _) => !sub(v, j)?,
                ("if", _) => {
                    if sub(v, j)? {
                        m.get("then").map_or(Ok(true), |t| sub(t, j))?
                    } else {
                        m.get("else").map_or(Ok(true), |t| sub(t, j))?
                    }
                }
                ("multipleOf", JsonValue::Num(n)) => n.is_multiple_of(num(v)?),
                ("minimum", JsonValue::Num(n)) => {
                    if m.get("exclusiveMinimum") == Some(&JsonValue::Bool(true)) {
                        n > num(v)?
                    } else {
                        n >= num(v)?
                    }
                }
                ("maximum", JsonValue::Num(n)) => {
                    if m.get("exclusiveMaximum") == Some(&JsonValue::Bool(true)) {
                        n < num(v)?
                    } else {
                        n <= num(v)?
                    }
                }
                ("exclusiveMinimum", JsonValue::Num(n)) if !matches!(v, JsonValue::Bool(_)) => n > num(v)?,
                ("exclusiveMaximum", JsonValue::Num(n)) if !matches!(v, JsonValue::Bool(_)) => n < num(v)?,
                ("minLength", JsonValue::Str(s)) => s.chars().count() as u64 >= nat(v)?,
                ("maxLength", JsonValue::Str(s)) => s.chars().count() as u64 <= nat(v)?,
                ("pattern", JsonValue::Str(s)) => self.matches(v.as_str().unwrap_or_default(), s)?,
                ("items", JsonValue::Array(a)) => match v {
                    JsonValue::Array(schemas) => {
                        let mut ok = true;
                        for (s, e) in schemas.iter().zip(a) {
                            ok = ok && sub(s, e)?;
                        }
                        if let Some(add) = m.get("additionalItems") {
                            for e in a.iter().skip(schemas.len()) {
                                ok = ok && sub(add, e)?;
                            }
                        }
                        ok
                    }
                    s => all(Some(a), |e| sub(s, e))?,
                },
                ("additionalItems", JsonValue::Array(a)) if !m.contains_key("items") => all(Some(a), |e| sub(v, e))?,
                ("minItems", JsonValue::Array(a)) => a.len() as u64 >= nat(v)?,
                ("maxItems", JsonValue::Array(a)) => a.len() as u64 <= nat(v)?,
                ("contains", JsonValue::Array(a)) => {
                    let lo = m.get("minContains").map_or(Ok(1), nat)?;
                    let hi = m.get("maxContains").map(nat).transpose()?;
                    let mut n = 0u64;
                    for e in a {
                        if sub(v, e)? {
                            n += 1;
                        }
                    }
                    n >= lo && hi.is_none_or(|h| n <= h)
                }
                ("minProperties", JsonValue::Object(o)) => o.len() as u64 >= nat(v)?,
                ("maxProperties", JsonValue::Object(o)) => o.len() as u64 <= nat(v)?,
                ("required", JsonValue::Object(o)) => {
                    v.as_array().into_iter().flatten().all(|k| k.as_str().is_some_and(|k| o.contains_key(k)))
                }
                ("properties", JsonValue::Object(o)) => {
                    let mut ok = true;
                    for (name, s) in v.as_object().into_iter().flatten() {
                        if let Some(e) = o.get(name) {
                            ok = ok && sub(s, e)?;
                        }
                    }
                    ok
                }
                ("patternProperties", JsonValue::Object(o)) => {
                    let mut ok = true;
                    for (p, s) in v.as_object().into_iter().flatten() {
                        for (name, e) in o {
                            if self.matches(p, name)? {
                                ok = ok && sub(s, e)?;
                            }
                        }
                    }
                    ok
                }
                ("additionalProperties", JsonValue::Object(o)) => {
                    let props = m.get("properties").and_then(JsonValue::as_object);
                    let patterns = m.get("patternProperties").and_then(JsonValue::as_object);
                    let mut ok = true;
                    for (name, e) in o {
                        if props.is_some_and(|p| p.contains_key(name)) {
                            continue;
                        }
                        let mut matched = false;
                        for p in patterns.into_iter().flat_map(|p| p.keys()) {
                            if self.matches(p, name)? {
                                matched = true;
                                break;
                            }
                        }
                        if !matched {
                            ok = ok && sub(v, e)?;
                        }
                    }
                    ok
                }
                ("propertyNames", JsonValue::Object(o)) => {
                    all(Some(&o.keys().map(|k| JsonValue::Str(k.clone())).collect()), |k| sub(v, k))?
                }
                ("dependencies", JsonValue::Object(o)) => {
                    let mut ok = true;
                    for (name, dep) in v.as_object().into_iter().flatten() {
                        if !o.contains_key(name) {
                            continue;
                        }
                        ok = ok
                            && match dep {
                                JsonValue::Array(keys) => {
                                    keys.iter().all(|k| k.as_str().is_some_and(|k| o.contains_key(k)))
                                }
                                s => sub(s, j)?,
                            };
                    }
                    ok
                }
                _ => true,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn has_type(name: &str, j: &JsonValue) -> bool {
    match (name, j) {
        ("null", JsonValue::Null)
        | ("boolean", JsonValue::Bool(_))
        | ("number", JsonValue::Num(_))
        | ("string", JsonValue::Str(_))
        | ("array", JsonValue::Array(_))
        | ("object", JsonValue::Object(_)) => true,
        ("integer", JsonValue::Num(n)) => n.is_integer(),
        _ => false,
    }
}

fn num(v: &JsonValue) -> Result<&Decimal> {
    v.as_decimal().ok_or_else(|| Error::InvalidSchema { path: String::new(), message: "expected a number".into() })
}

fn nat(v: &JsonValue) -> Result<u64> {
    v.as_decimal()
        .and_then(Decimal::to_u64)
        .ok_or_else(|| Error::InvalidSchema { path: String::new(), message: "expected a natural".into() })
}

fn all<'s>(items: Option<&'s Vec<JsonValue>>, mut f: impl FnMut(&'s JsonValue) -> Result<bool>) -> Result<bool> {
    for s in items.into_iter().flatten() {
        if !f(s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn any<'s>(items: Option<&'s Vec<JsonValue>>, mut f: impl FnMut(&'s JsonValue) -> Result<bool>) -> Result<bool> {
    for s in items.into_iter().flatten() {
        if f(s)? {
            return Ok(true);
        }
    }
    Ok(false)
}
