//! JSON Schema documents to the core algebra.

mod names;
mod refs;

use std::collections::{BTreeMap, HashMap};

pub use names::patt_of_s;
pub use refs::{normalize_refs, REF_EXPANSION_FACTOR};
pub(crate) use refs::{pointer_segments, resolve};

use crate::algebra::{Env, ExtNat, SchemaDoc, Store, Term, TermId, TypeTag, VarId};
use crate::decimal::{Decimal, ExtDecimal};
use crate::error::{Error, Result};
use crate::json::JsonValue;
use crate::pattern::{complement, exact, parse_pattern, union_of_bases, Anchoring, CharSet, Eere, Re};

/// Translates a whole document into a fresh store.
pub fn translate(raw: &JsonValue) -> Result<SchemaDoc> {
    let mut store = Store::new();
    let mut env = Env::new();
    let root = translate_into(&mut store, &mut env, raw)?;
    Ok(SchemaDoc { store, env, root })
}

/// Translates a document into an existing store and environment. Variable
/// names are made unique against those already present.
pub fn translate_into(store: &mut Store, env: &mut Env, raw: &JsonValue) -> Result<TermId> {
    let doc = normalize_refs(raw)?;
    let empty = BTreeMap::new();
    let defs = match doc.get("definitions") {
        Some(JsonValue::Object(m)) => m,
        _ => &empty,
    };
    let mut tr = Translator {
        store,
        env,
        defs,
        def_vars: HashMap::new(),
        in_progress: Vec::new(),
        names_budget: names::budget_for(raw),
        path: vec!["#".to_string()],
    };
    tr.schema(&doc)
}

pub(crate) struct Translator<'a> {
    pub(crate) store: &'a mut Store,
    pub(crate) env: &'a mut Env,
    defs: &'a BTreeMap<String, JsonValue>,
    def_vars: HashMap<String, VarId>,
    /// Variables whose definitions are still being translated.
    pub(crate) in_progress: Vec<VarId>,
    pub(crate) names_budget: usize,
    path: Vec<String>,
}

impl Translator<'_> {
    fn path(&self) -> String {
        self.path.join("/")
    }

    fn invalid(&self, message: impl Into<String>) -> Error {
        Error::InvalidSchema { path: self.path(), message: message.into() }
    }

    fn at<T>(&mut self, seg: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.path.push(seg.replace('~', "~0").replace('/', "~1"));
        let r = f(self);
        self.path.pop();
        r
    }

    fn schema(&mut self, s: &JsonValue) -> Result<TermId> {
        match s {
            JsonValue::Bool(true) => Ok(self.store.top()),
            JsonValue::Bool(false) => Ok(self.store.bottom()),
            JsonValue::Object(m) => self.object_schema(m),
            other => Err(self.invalid(format!("a schema must be an object or boolean, found {}", other.type_name()))),
        }
    }

    fn object_schema(&mut self, m: &BTreeMap<String, JsonValue>) -> Result<TermId> {
        let mut parts: Vec<TermId> = Vec::new();
        for (k, v) in m {
            let t = self.at(k, |tr| tr.keyword(k, v, m))?;
            if let Some(t) = t {
                parts.push(t);
            }
        }
        Ok(self.store.and(parts))
    }

    fn mk(&mut self, t: Term) -> TermId {
        self.store.mk(t)
    }

    fn number(&self, v: &JsonValue) -> Result<Decimal> {
        v.as_decimal().cloned().ok_or_else(|| self.invalid("expected a number"))
    }

    fn natural(&self, v: &JsonValue) -> Result<u64> {
        v.as_decimal().and_then(Decimal::to_u64).ok_or_else(|| self.invalid("expected a non-negative integer"))
    }

    fn schemas(&mut self, v: &JsonValue) -> Result<Vec<TermId>> {
        let JsonValue::Array(items) = v else { return Err(self.invalid("expected an array of schemas")) };
        let mut out = Vec::with_capacity(items.len());
        for (i, s) in items.iter().enumerate() {
            out.push(self.at(&i.to_string(), |tr| tr.schema(s))?);
        }
        Ok(out)
    }

    fn keyword(&mut self, k: &str, v: &JsonValue, siblings: &BTreeMap<String, JsonValue>) -> Result<Option<TermId>> {
        let t = match k {
            "type" => self.type_keyword(v)?,
            "const" => translate_const(self.store, v),
            "enum" => {
                let JsonValue::Array(vals) = v else { return Err(self.invalid("enum must be an array")) };
                let alts: Vec<TermId> = vals.iter().map(|j| translate_const(self.store, j)).collect();
                self.store.or(alts)
            }
            "multipleOf" => {
                let q = self.number(v)?;
                if !q.is_positive() {
                    return Err(self.invalid("multipleOf must be strictly positive"));
                }
                self.mk(Term::MulOf(q))
            }
            "minimum" | "maximum" => {
                let n = ExtDecimal::Finite(self.number(v)?);
                let exclusive_key = if k == "minimum" { "exclusiveMinimum" } else { "exclusiveMaximum" };
                let exclusive = matches!(siblings.get(exclusive_key), Some(JsonValue::Bool(true)));
                let (lo, hi) = if k == "minimum" { (n, ExtDecimal::PosInf) } else { (ExtDecimal::NegInf, n) };
                self.mk(if exclusive { Term::XBetw(lo, hi) } else { Term::Betw(lo, hi) })
            }
            "exclusiveMinimum" | "exclusiveMaximum" => {
                if let JsonValue::Bool(_) = v {
                    return Ok(None);
                }
                let n = ExtDecimal::Finite(self.number(v)?);
                let (lo, hi) = if k == "exclusiveMinimum" { (n, ExtDecimal::PosInf) } else { (ExtDecimal::NegInf, n) };
                self.mk(Term::XBetw(lo, hi))
            }
            "minLength" | "maxLength" => {
                let n = u32::try_from(self.natural(v)?).map_err(|_| self.invalid("length bound too large"))?;
                let (min, max) = if k == "minLength" { (n, None) } else { (0, Some(n)) };
                let re = Re::Repeat { inner: Box::new(Re::Class(CharSet::all())), min, max };
                let p = self.store.pat(Eere::base(re));
                self.mk(Term::Pattern(p))
            }
            "pattern" => {
                let JsonValue::Str(src) = v else { return Err(self.invalid("pattern must be a string")) };
                let p = parse_pattern(src, Anchoring::Unanchored)?;
                let p = self.store.pat(p);
                self.mk(Term::Pattern(p))
            }
            "items" => self.items_family(v, siblings)?,
            "additionalItems" => {
                if siblings.contains_key("items") {
                    return Ok(None);
                }
                let s = self.schema(v)?;
                self.mk(Term::Items(0, s))
            }
            "minItems" => {
                let m = self.natural(v)?;
                let top = self.store.top();
                self.mk(Term::Cont(m, ExtNat::Inf, top))
            }
            "maxItems" => {
                let m = self.natural(v)?;
                let top = self.store.top();
                self.mk(Term::Cont(0, ExtNat::Fin(m), top))
            }
            "uniqueItems" => {
                if v == &JsonValue::Bool(true) {
                    log::warn!("uniqueItems at {} is ignored", self.path());
                }
                return Ok(None);
            }
            "contains" => {
                let s = self.schema(v)?;
                let lo = match siblings.get("minContains") {
                    Some(m) => self.at("minContains", |tr| tr.natural(m))?,
                    None => 1,
                };
                let hi = match siblings.get("maxContains") {
                    Some(m) => ExtNat::Fin(self.at("maxContains", |tr| tr.natural(m))?),
                    None => ExtNat::Inf,
                };
                self.mk(Term::Cont(lo, hi, s))
            }
            "minContains" | "maxContains" => return Ok(None),
            "minProperties" => {
                let m = self.natural(v)?;
                self.mk(Term::Pro(m, ExtNat::Inf))
            }
            "maxProperties" => {
                let m = self.natural(v)?;
                self.mk(Term::Pro(0, ExtNat::Fin(m)))
            }
            "required" => {
                let JsonValue::Array(keys) = v else { return Err(self.invalid("required must be an array")) };
                let mut reqs = Vec::with_capacity(keys.len());
                for key in keys {
                    let JsonValue::Str(key) = key else {
                        return Err(self.invalid("required must list strings"));
                    };
                    reqs.push(self.mk(Term::Req(key.clone())));
                }
                self.store.and(reqs)
            }
            "properties" | "patternProperties" => {
                let JsonValue::Object(m) = v else { return Err(self.invalid(format!("{k} must be an object"))) };
                let mut parts = Vec::with_capacity(m.len());
                for (name, s) in m {
                    let r = if k == "properties" {
                        exact(name)
                    } else {
                        self.at(name, |_| Ok(parse_pattern(name, Anchoring::Unanchored)?))?
                    };
                    let r = self.store.pat(r);
                    let s = self.at(name, |tr| tr.schema(s))?;
                    parts.push(self.mk(Term::Props(r, s)));
                }
                self.store.and(parts)
            }
            "additionalProperties" => {
                let mut covered = Vec::new();
                if let Some(JsonValue::Object(m)) = siblings.get("properties") {
                    covered.extend(m.keys().map(|name| exact(name)));
                }
                if let Some(JsonValue::Object(m)) = siblings.get("patternProperties") {
                    for name in m.keys() {
                        covered.push(self.at(name, |_| Ok(parse_pattern(name, Anchoring::Unanchored)?))?);
                    }
                }
                let r = complement(&union_of_bases(&covered).expect("keys and patterns are base patterns"));
                let r = self.store.pat(r);
                let s = self.schema(v)?;
                self.mk(Term::Props(r, s))
            }
            "dependencies" => {
                let JsonValue::Object(m) = v else { return Err(self.invalid("dependencies must be an object")) };
                let obj = self.store.type_of(TypeTag::Obj);
                let mut parts = Vec::with_capacity(m.len());
                for (name, dep) in m {
                    let then = match dep {
                        JsonValue::Array(keys) => {
                            let mut reqs = Vec::with_capacity(keys.len());
                            for key in keys {
                                let JsonValue::Str(key) = key else {
                                    return Err(self.invalid("dependency lists must hold strings"));
                                };
                                reqs.push(self.mk(Term::Req(key.clone())));
                            }
                            self.store.and(reqs)
                        }
                        s => self.at(name, |tr| tr.schema(s))?,
                    };
                    let req = self.mk(Term::Req(name.clone()));
                    let cond = self.store.and([obj, req]);
                    parts.push(self.store.implies(cond, then));
                }
                self.store.and(parts)
            }
            "propertyNames" => {
                let s = self.schema(v)?;
                let neg = self.store.not(s);
                let r = names::patt_of_s_in(self, neg)?;
                let r = self.store.pat(r);
                let bottom = self.store.bottom();
                self.mk(Term::Props(r, bottom))
            }
            "if" => {
                let cond = self.schema(v)?;
                let x = self.store.fresh_var("if");
                self.env.set(x, cond);
                let x = self.store.var(x);
                let then = match siblings.get("then") {
                    Some(s) => self.at("then", |tr| tr.schema(s))?,
                    None => self.store.top(),
                };
                let otherwise = match siblings.get("else") {
                    Some(s) => self.at("else", |tr| tr.schema(s))?,
                    None => self.store.top(),
                };
                let pos = self.store.and([x, then]);
                let nx = self.store.not(x);
                let neg = self.store.and([nx, otherwise]);
                self.store.or([pos, neg])
            }
            "then" | "else" => return Ok(None),
            "allOf" => {
                let parts = self.schemas(v)?;
                self.store.and(parts)
            }
            "anyOf" => {
                let parts = self.schemas(v)?;
                self.store.or(parts)
            }
            "oneOf" => {
                let parts = self.schemas(v)?;
                translate_one_of(self.store, self.env, &parts)
            }
            "not" => {
                let s = self.schema(v)?;
                self.store.not(s)
            }
            "$ref" => {
                let JsonValue::Str(r) = v else { return Err(self.invalid("$ref must be a string")) };
                let x = self.definition(r)?;
                self.store.var(x)
            }
            "definitions" => return Ok(None),
            _ => return Ok(None),
        };
        Ok(Some(t))
    }

    fn type_keyword(&mut self, v: &JsonValue) -> Result<TermId> {
        let names: Vec<&JsonValue> = match v {
            JsonValue::Array(a) => a.iter().collect(),
            other => vec![other],
        };
        let mut alts = Vec::with_capacity(names.len());
        for n in names {
            let t = match n.as_str() {
                Some("null") => self.store.type_of(TypeTag::Null),
                Some("boolean") => self.store.type_of(TypeTag::Bool),
                Some("number") => self.store.type_of(TypeTag::Num),
                Some("string") => self.store.type_of(TypeTag::Str),
                Some("array") => self.store.type_of(TypeTag::Arr),
                Some("object") => self.store.type_of(TypeTag::Obj),
                Some("integer") => {
                    let num = self.store.type_of(TypeTag::Num);
                    let int = self.mk(Term::MulOf(Decimal::one()));
                    self.store.and([num, int])
                }
                _ => return Err(self.invalid(format!("unknown type {n:?}"))),
            };
            alts.push(t);
        }
        Ok(self.store.or(alts))
    }

    fn items_family(&mut self, v: &JsonValue, siblings: &BTreeMap<String, JsonValue>) -> Result<TermId> {
        match v {
            JsonValue::Array(items) => {
                let mut parts = Vec::with_capacity(items.len() + 1);
                for (i, s) in items.iter().enumerate() {
                    let s = self.at(&i.to_string(), |tr| tr.schema(s))?;
                    parts.push(self.mk(Term::Item(i as u64 + 1, s)));
                }
                if let Some(add) = siblings.get("additionalItems") {
                    let s = self.at("../additionalItems", |tr| tr.schema(add))?;
                    parts.push(self.mk(Term::Items(items.len() as u64, s)));
                }
                Ok(self.store.and(parts))
            }
            s => {
                let s = self.schema(s)?;
                Ok(self.mk(Term::Items(0, s)))
            }
        }
    }

    /// The variable for a normal `#/definitions/name` reference, translating
    /// the definition on first use.
    fn definition(&mut self, reference: &str) -> Result<VarId> {
        let segs = refs::pointer_segments(reference).ok_or_else(|| Error::UnresolvableRef(reference.into()))?;
        let name = match segs.as_slice() {
            [d, name] if d == "definitions" && self.defs.contains_key(name) => name.clone(),
            _ => return Err(Error::UnresolvableRef(reference.into())),
        };
        if let Some(&x) = self.def_vars.get(&name) {
            return Ok(x);
        }
        let x = self.store.fresh_var(&name);
        self.def_vars.insert(name.clone(), x);
        let body_src = self.defs;
        let saved = std::mem::replace(&mut self.path, vec!["#".into(), "definitions".into()]);
        self.in_progress.push(x);
        let body = self.at(&name, |tr| tr.schema(&body_src[&name]));
        self.in_progress.pop();
        self.path = saved;
        self.env.set(x, body?);
        Ok(x)
    }
}

/// `⋁_i (x_i ∧ ⋀_{j≠i} ¬x_j)` with a fresh `x_i ↦ S_i` per branch.
pub fn translate_one_of(store: &mut Store, env: &mut Env, branches: &[TermId]) -> TermId {
    let vars: Vec<TermId> = branches
        .iter()
        .map(|&s| {
            let x = store.fresh_var("oneOf");
            env.set(x, s);
            store.var(x)
        })
        .collect();
    let mut alts = Vec::with_capacity(vars.len());
    for (i, &xi) in vars.iter().enumerate() {
        let mut conj = vec![xi];
        for (j, &xj) in vars.iter().enumerate() {
            if i != j {
                conj.push(store.not(xj));
            }
        }
        alts.push(store.and(conj));
    }
    store.or(alts)
}

/// Structural encoding of `const: j`.
pub fn translate_const(store: &mut Store, j: &JsonValue) -> TermId {
    match j {
        JsonValue::Null => store.type_of(TypeTag::Null),
        JsonValue::Bool(b) => {
            let t = store.type_of(TypeTag::Bool);
            let v = store.mk(Term::IsBoolValue(*b));
            store.and([t, v])
        }
        JsonValue::Num(n) => {
            let t = store.type_of(TypeTag::Num);
            let n = ExtDecimal::Finite(n.clone());
            let v = store.mk(Term::Betw(n.clone(), n));
            store.and([t, v])
        }
        JsonValue::Str(s) => {
            let t = store.type_of(TypeTag::Str);
            let p = store.pat(exact(s));
            let v = store.mk(Term::Pattern(p));
            store.and([t, v])
        }
        JsonValue::Array(items) => {
            let mut parts = vec![store.type_of(TypeTag::Arr)];
            let top = store.top();
            let n = items.len() as u64;
            parts.push(store.mk(Term::Cont(n, ExtNat::Fin(n), top)));
            for (i, item) in items.iter().enumerate() {
                let s = translate_const(store, item);
                parts.push(store.mk(Term::Item(i as u64 + 1, s)));
            }
            store.and(parts)
        }
        JsonValue::Object(m) => {
            let mut parts = vec![store.type_of(TypeTag::Obj)];
            parts.push(store.mk(Term::Pro(0, ExtNat::Fin(m.len() as u64))));
            for (k, v) in m {
                parts.push(store.mk(Term::Req(k.clone())));
                let s = translate_const(store, v);
                let p = store.pat(exact(k));
                parts.push(store.mk(Term::Props(p, s)));
            }
            store.and(parts)
        }
    }
}
