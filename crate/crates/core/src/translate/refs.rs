//! Rewrites every `$ref` into a reference to a top-level `definitions` entry.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::json::JsonValue;

/// Output is capped at this multiple of the input's node count.
pub const REF_EXPANSION_FACTOR: usize = 100;

/// Keywords whose value is a schema.
pub(crate) const SCHEMA_KEYWORDS: &[&str] =
    &["additionalItems", "additionalProperties", "contains", "propertyNames", "not", "if", "then", "else", "items"];
/// Keywords whose value is an array of schemas.
pub(crate) const SCHEMA_ARRAY_KEYWORDS: &[&str] = &["allOf", "anyOf", "oneOf", "items"];
/// Keywords whose value is an object of schemas.
pub(crate) const SCHEMA_MAP_KEYWORDS: &[&str] =
    &["properties", "patternProperties", "definitions", "$defs", "dependencies"];

/// Applies `f` to every schema position reachable from `schema`, outermost first.
fn walk_mut(schema: &mut JsonValue, f: &mut dyn FnMut(&mut JsonValue)) {
    f(schema);
    let JsonValue::Object(m) = schema else { return };
    for (k, v) in m.iter_mut() {
        let k = k.as_str();
        match v {
            JsonValue::Array(items) if SCHEMA_ARRAY_KEYWORDS.contains(&k) => {
                items.iter_mut().for_each(|s| walk_mut(s, f))
            }
            JsonValue::Object(children) if SCHEMA_MAP_KEYWORDS.contains(&k) => {
                children.values_mut().for_each(|s| walk_mut(s, f))
            }
            _ if SCHEMA_KEYWORDS.contains(&k) => walk_mut(v, f),
            _ => {}
        }
    }
}

/// Decodes a `#/a/b` fragment into unescaped pointer segments.
pub(crate) fn pointer_segments(reference: &str) -> Option<Vec<String>> {
    let frag = reference.strip_prefix('#')?;
    let frag = percent_decode(frag)?;
    if frag.is_empty() {
        return Some(Vec::new());
    }
    let rest = frag.strip_prefix('/')?;
    Some(rest.split('/').map(|s| s.replace("~1", "/").replace("~0", "~")).collect())
}

fn percent_decode(s: &str) -> Option<String> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s.get(i + 1..i + 3)?;
            out.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}

pub(crate) fn resolve<'a>(doc: &'a JsonValue, segments: &[String]) -> Option<&'a JsonValue> {
    let mut cur = doc;
    for seg in segments {
        cur = match cur {
            JsonValue::Object(m) => m.get(seg)?,
            JsonValue::Array(a) => a.get(seg.parse::<usize>().ok()?)?,
            _ => return None,
        };
    }
    Some(cur)
}

fn escape_segment(s: &str) -> String {
    s.replace('~', "~0").replace('/', "~1")
}

/// The definition name a normal reference points to, if it is normal.
pub(crate) fn definition_name(reference: &str, doc: &JsonValue) -> Option<String> {
    let segs = pointer_segments(reference)?;
    match segs.as_slice() {
        [d, name] if d == "definitions" => doc.get("definitions").and_then(|defs| defs.get(name)).map(|_| name.clone()),
        _ => None,
    }
}

/// Copies every subschema referenced by a non-`definitions` path into
/// `definitions` and redirects the reference there.
pub fn normalize_refs(raw: &JsonValue) -> Result<JsonValue> {
    let mut doc = raw.clone();
    if !matches!(doc, JsonValue::Object(_)) {
        return Ok(doc);
    }
    if let Some(defs) = doc.get("definitions") {
        if !matches!(defs, JsonValue::Object(_)) {
            return Err(Error::InvalidSchema {
                path: "#/definitions".into(),
                message: "definitions must be an object".into(),
            });
        }
    }
    let limit = raw.size().saturating_mul(REF_EXPANSION_FACTOR);
    let mut assigned: HashMap<String, String> = HashMap::new();
    loop {
        let mut pending: Vec<String> = Vec::new();
        let snapshot = doc.clone();
        let mut err = None;
        walk_mut(&mut doc, &mut |node| {
            let Some(JsonValue::Str(r)) = node.get("$ref") else { return };
            if definition_name(r, &snapshot).is_some() {
                return;
            }
            if pointer_segments(r).is_none() {
                err.get_or_insert_with(|| Error::UnresolvableRef(r.clone()));
                return;
            }
            if !assigned.contains_key(r) && !pending.contains(r) {
                pending.push(r.clone());
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if pending.is_empty() {
            return Ok(doc);
        }
        let mut additions: BTreeMap<String, JsonValue> = BTreeMap::new();
        for r in pending {
            let segs = pointer_segments(&r).expect("checked above");
            let target = resolve(&snapshot, &segs).ok_or_else(|| Error::UnresolvableRef(r.clone()))?;
            let mut copy = target.clone();
            if let JsonValue::Object(m) = &mut copy {
                m.remove("definitions");
                m.remove("$defs");
            }
            let base = if segs.is_empty() { "root".to_string() } else { segs.join("_") };
            let taken =
                |n: &str| snapshot.get("definitions").is_some_and(|d| d.get(n).is_some()) || additions.contains_key(n);
            let mut name = base.clone();
            let mut k = 1;
            while taken(&name) {
                name = format!("{base}_{k}");
                k += 1;
            }
            additions.insert(name.clone(), copy);
            assigned.insert(r, name);
        }
        let JsonValue::Object(root) = &mut doc else { unreachable!() };
        let defs = root.entry("definitions".to_string()).or_insert_with(|| JsonValue::Object(BTreeMap::new()));
        let JsonValue::Object(defs) = defs else { unreachable!() };
        defs.extend(additions);
        walk_mut(&mut doc, &mut |node| {
            if let JsonValue::Object(m) = node {
                if let Some(JsonValue::Str(r)) = m.get_mut("$ref") {
                    if let Some(name) = assigned.get(r.as_str()) {
                        *r = format!("#/definitions/{}", escape_segment(name));
                    }
                }
            }
        });
        if doc.size() > limit {
            return Err(Error::RefExpansionTooLarge { limit });
        }
    }
}
