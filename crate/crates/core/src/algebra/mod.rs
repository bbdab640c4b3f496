//! Core and positive algebra terms, environments, and their evaluation.

mod eval;
mod guard;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

pub use eval::{assignment_eval, validate, validate_term};
pub use guard::{check_guarded, direct_dependencies};

use crate::decimal::{Decimal, ExtDecimal};
use crate::error::{Error, Result};
use crate::json::JsonValue;
use crate::pattern::{compile, Dfa, Eere, PatternError, DEFAULT_MAX_STATES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeTag {
    Arr,
    Obj,
    Null,
    Bool,
    Str,
    Num,
}

impl TypeTag {
    pub const ALL: [TypeTag; 6] =
        [TypeTag::Arr, TypeTag::Obj, TypeTag::Null, TypeTag::Bool, TypeTag::Str, TypeTag::Num];

    pub fn of(j: &JsonValue) -> TypeTag {
        match j {
            JsonValue::Null => TypeTag::Null,
            JsonValue::Bool(_) => TypeTag::Bool,
            JsonValue::Num(_) => TypeTag::Num,
            JsonValue::Str(_) => TypeTag::Str,
            JsonValue::Array(_) => TypeTag::Arr,
            JsonValue::Object(_) => TypeTag::Obj,
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeTag::Arr => "Arr",
            TypeTag::Obj => "Obj",
            TypeTag::Null => "Null",
            TypeTag::Bool => "Bool",
            TypeTag::Str => "Str",
            TypeTag::Num => "Num",
        })
    }
}

/// A natural number or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub fn contains(self, n: u64) -> bool {
        match self {
            ExtNat::Fin(m) => n <= m,
            ExtNat::Inf => true,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Inf => f.write_str("inf"),
        }
    }
}

/// Algebra terms. Child terms are interned in a [`Store`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    IsBoolValue(bool),
    Pattern(PatId),
    Betw(ExtDecimal, ExtDecimal),
    XBetw(ExtDecimal, ExtDecimal),
    MulOf(Decimal),
    NotMulOf(Decimal),
    Props(PatId, TermId),
    PattReq(PatId, TermId),
    Req(String),
    Pro(u64, ExtNat),
    Item(u64, TermId),
    Items(u64, TermId),
    ContAfter(u64, TermId),
    Cont(u64, ExtNat, TermId),
    Type(TypeTag),
    Var(VarId),
    And(Vec<TermId>),
    Or(Vec<TermId>),
    Not(TermId),
}

impl Term {
    /// Typed operators: everything except variables and Boolean connectives.
    pub fn is_typed_operator(&self) -> bool {
        !matches!(self, Term::Var(_) | Term::And(_) | Term::Or(_) | Term::Not(_))
    }

    /// The type an implicative typed operator constrains; `None` for
    /// `type(T)`, variables and connectives.
    pub fn ito_type(&self) -> Option<TypeTag> {
        Some(match self {
            Term::IsBoolValue(_) => TypeTag::Bool,
            Term::Pattern(_) => TypeTag::Str,
            Term::Betw(..) | Term::XBetw(..) | Term::MulOf(_) | Term::NotMulOf(_) => TypeTag::Num,
            Term::Props(..) | Term::PattReq(..) | Term::Req(_) | Term::Pro(..) => TypeTag::Obj,
            Term::Item(..) | Term::Items(..) | Term::ContAfter(..) | Term::Cont(..) => TypeTag::Arr,
            _ => return None,
        })
    }

    /// The schema argument of an ITO, if any.
    pub fn schema_arg(&self) -> Option<TermId> {
        match self {
            Term::Props(_, s)
            | Term::PattReq(_, s)
            | Term::Item(_, s)
            | Term::Items(_, s)
            | Term::ContAfter(_, s)
            | Term::Cont(_, _, s) => Some(*s),
            _ => None,
        }
    }

    /// The same ITO with its schema argument replaced.
    pub fn with_schema_arg(&self, s: TermId) -> Term {
        match self {
            Term::Props(r, _) => Term::Props(*r, s),
            Term::PattReq(r, _) => Term::PattReq(*r, s),
            Term::Item(l, _) => Term::Item(*l, s),
            Term::Items(i, _) => Term::Items(*i, s),
            Term::ContAfter(i, _) => Term::ContAfter(*i, s),
            Term::Cont(i, j, _) => Term::Cont(*i, *j, s),
            other => other.clone(),
        }
    }
}

/// Interning arena for terms, patterns and variable names, plus a cache of
/// compiled pattern automata.
pub struct Store {
    terms: Vec<Term>,
    term_index: HashMap<Term, TermId>,
    pats: Vec<Eere>,
    pat_index: HashMap<Eere, PatId>,
    vars: Vec<String>,
    var_index: HashMap<String, VarId>,
    dfas: RefCell<HashMap<PatId, Arc<Dfa>>>,
    max_states: usize,
    top: TermId,
    bottom: TermId,
}

impl Default for Store {
    fn default() -> Self {
        Store::new()
    }
}

impl Store {
    pub fn new() -> Store {
        Store::with_max_states(DEFAULT_MAX_STATES)
    }

    pub fn with_max_states(max_states: usize) -> Store {
        let mut s = Store {
            terms: Vec::new(),
            term_index: HashMap::new(),
            pats: Vec::new(),
            pat_index: HashMap::new(),
            vars: Vec::new(),
            var_index: HashMap::new(),
            dfas: RefCell::new(HashMap::new()),
            max_states,
            top: TermId(0),
            bottom: TermId(0),
        };
        s.top = s.mk(Term::Pro(0, ExtNat::Inf));
        s.bottom = s.mk(Term::Or(Vec::new()));
        s
    }

    pub fn max_states(&self) -> usize {
        self.max_states
    }

    pub fn mk(&mut self, t: Term) -> TermId {
        if let Some(&id) = self.term_index.get(&t) {
            return id;
        }
        let id = TermId(self.terms.len() as u32);
        self.terms.push(t.clone());
        self.term_index.insert(t, id);
        id
    }

    pub fn get(&self, id: TermId) -> &Term {
        &self.terms[id.0 as usize]
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `⊤`, encoded as `pro_0^∞`.
    pub fn top(&self) -> TermId {
        self.top
    }

    /// `⊥`, encoded as the empty disjunction.
    pub fn bottom(&self) -> TermId {
        self.bottom
    }

    pub fn pat(&mut self, e: Eere) -> PatId {
        if let Some(&id) = self.pat_index.get(&e) {
            return id;
        }
        let id = PatId(self.pats.len() as u32);
        self.pats.push(e.clone());
        self.pat_index.insert(e, id);
        id
    }

    pub fn eere(&self, p: PatId) -> &Eere {
        &self.pats[p.0 as usize]
    }

    pub fn dfa(&self, p: PatId) -> Result<Arc<Dfa>, PatternError> {
        if let Some(d) = self.dfas.borrow().get(&p) {
            return Ok(d.clone());
        }
        let d = Arc::new(compile(self.eere(p), self.max_states)?);
        self.dfas.borrow_mut().insert(p, d.clone());
        Ok(d)
    }

    pub fn var_id(&mut self, name: &str) -> VarId {
        if let Some(&v) = self.var_index.get(name) {
            return v;
        }
        let v = VarId(self.vars.len() as u32);
        self.vars.push(name.to_string());
        self.var_index.insert(name.to_string(), v);
        v
    }

    pub fn lookup_var(&self, name: &str) -> Option<VarId> {
        self.var_index.get(name).copied()
    }

    /// A variable whose name starts with `hint` and is not yet in use.
    pub fn fresh_var(&mut self, hint: &str) -> VarId {
        if !self.var_index.contains_key(hint) {
            return self.var_id(hint);
        }
        let mut k = 1usize;
        loop {
            let name = format!("{hint}_{k}");
            if !self.var_index.contains_key(&name) {
                return self.var_id(&name);
            }
            k += 1;
        }
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.0 as usize]
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var(&mut self, v: VarId) -> TermId {
        self.mk(Term::Var(v))
    }

    pub fn type_of(&mut self, t: TypeTag) -> TermId {
        self.mk(Term::Type(t))
    }

    /// Flattening, deduplicating conjunction with `⊤`/`⊥` simplification.
    pub fn and(&mut self, parts: impl IntoIterator<Item = TermId>) -> TermId {
        let mut out: Vec<TermId> = Vec::new();
        for p in parts {
            if p == self.bottom {
                return self.bottom;
            }
            if p == self.top {
                continue;
            }
            match self.get(p) {
                Term::And(inner) => out.extend(inner.iter().copied()),
                _ => out.push(p),
            }
        }
        out.sort_unstable();
        out.dedup();
        match out.len() {
            0 => self.top,
            1 => out[0],
            _ => self.mk(Term::And(out)),
        }
    }

    /// Flattening, deduplicating disjunction with `⊤`/`⊥` simplification.
    pub fn or(&mut self, parts: impl IntoIterator<Item = TermId>) -> TermId {
        let mut out: Vec<TermId> = Vec::new();
        for p in parts {
            if p == self.top {
                return self.top;
            }
            match self.get(p) {
                Term::Or(inner) => out.extend(inner.iter().copied()),
                _ => out.push(p),
            }
        }
        out.sort_unstable();
        out.dedup();
        match out.len() {
            0 => self.bottom,
            1 => out[0],
            _ => self.mk(Term::Or(out)),
        }
    }

    pub fn not(&mut self, t: TermId) -> TermId {
        if let Term::Not(inner) = self.get(t) {
            return *inner;
        }
        self.mk(Term::Not(t))
    }

    pub fn implies(&mut self, a: TermId, b: TermId) -> TermId {
        let na = self.not(a);
        self.or([na, b])
    }

    /// Number of nodes in the term viewed as a tree.
    pub fn size(&self, t: TermId) -> usize {
        let mut n = 1;
        match self.get(t) {
            Term::And(v) | Term::Or(v) => n += v.iter().map(|&c| self.size(c)).sum::<usize>(),
            Term::Not(c) => n += self.size(*c),
            other => {
                if let Some(c) = other.schema_arg() {
                    n += self.size(c);
                }
            }
        }
        n
    }

    /// True iff the term contains no negation.
    pub fn is_positive(&self, t: TermId) -> bool {
        match self.get(t) {
            Term::Not(_) => false,
            Term::And(v) | Term::Or(v) => v.iter().all(|&c| self.is_positive(c)),
            other => other.schema_arg().is_none_or(|c| self.is_positive(c)),
        }
    }

    /// Variables occurring anywhere in the term.
    pub fn vars_of(&self, t: TermId, out: &mut Vec<VarId>) {
        match self.get(t) {
            Term::Var(v) => out.push(*v),
            Term::And(v) | Term::Or(v) => v.iter().for_each(|&c| self.vars_of(c, out)),
            Term::Not(c) => self.vars_of(*c, out),
            other => {
                if let Some(c) = other.schema_arg() {
                    self.vars_of(c, out);
                }
            }
        }
    }

    /// Debug rendering in the algebra's notation.
    pub fn show(&self, t: TermId) -> String {
        let mut out = String::new();
        self.write_term(&mut out, t);
        out
    }

    fn write_term(&self, out: &mut String, t: TermId) {
        use std::fmt::Write as _;
        if t == self.top {
            out.push('⊤');
            return;
        }
        if t == self.bottom {
            out.push('⊥');
            return;
        }
        match self.get(t) {
            Term::IsBoolValue(b) => {
                let _ = write!(out, "isBoolValue({b})");
            }
            Term::Pattern(p) => {
                let _ = write!(out, "pattern({})", self.eere(*p));
            }
            Term::Betw(m, n) => {
                let _ = write!(out, "betw_{m}^{n}");
            }
            Term::XBetw(m, n) => {
                let _ = write!(out, "xBetw_{m}^{n}");
            }
            Term::MulOf(q) => {
                let _ = write!(out, "mulOf({q})");
            }
            Term::NotMulOf(q) => {
                let _ = write!(out, "notMulOf({q})");
            }
            Term::Props(r, s) | Term::PattReq(r, s) => {
                let name = if matches!(self.get(t), Term::Props(..)) { "props" } else { "pattReq" };
                let _ = write!(out, "{name}({}:", self.eere(*r));
                self.write_term(out, *s);
                out.push(')');
            }
            Term::Req(k) => {
                out.push_str("req(");
                crate::json::write_json_string(out, k);
                out.push(')');
            }
            Term::Pro(i, j) => {
                let _ = write!(out, "pro_{i}^{j}");
            }
            Term::Item(l, s) => {
                let _ = write!(out, "item({l}:");
                self.write_term(out, *s);
                out.push(')');
            }
            Term::Items(i, s) => {
                let _ = write!(out, "items({i}:");
                self.write_term(out, *s);
                out.push(')');
            }
            Term::ContAfter(i, s) => {
                let _ = write!(out, "contAfter({i}:");
                self.write_term(out, *s);
                out.push(')');
            }
            Term::Cont(i, j, s) => {
                let _ = write!(out, "cont_{i}^{j}(");
                self.write_term(out, *s);
                out.push(')');
            }
            Term::Type(ty) => {
                let _ = write!(out, "type({ty})");
            }
            Term::Var(v) => out.push_str(self.var_name(*v)),
            Term::And(v) | Term::Or(v) => {
                let sep = if matches!(self.get(t), Term::And(_)) { " ∧ " } else { " ∨ " };
                out.push('(');
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    self.write_term(out, *c);
                }
                out.push(')');
            }
            Term::Not(c) => {
                out.push('¬');
                self.write_term(out, *c);
            }
        }
    }
}

/// Variable definitions, ordered by variable creation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env {
    bodies: BTreeMap<VarId, TermId>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn get(&self, v: VarId) -> Option<TermId> {
        self.bodies.get(&v).copied()
    }

    pub fn set(&mut self, v: VarId, body: TermId) {
        self.bodies.insert(v, body);
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.bodies.contains_key(&v)
    }

    pub fn len(&self) -> usize {
        self.bodies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bodies.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, TermId)> + '_ {
        self.bodies.iter().map(|(&v, &t)| (v, t))
    }

    pub fn vars(&self) -> Vec<VarId> {
        self.bodies.keys().copied().collect()
    }

    pub fn show(&self, store: &Store) -> String {
        let mut out = String::new();
        for (v, t) in self.iter() {
            out.push_str(store.var_name(v));
            out.push_str(" ↦ ");
            out.push_str(&store.show(t));
            out.push('\n');
        }
        out
    }
}

/// A root assertion with its environment.
pub struct SchemaDoc {
    pub store: Store,
    pub env: Env,
    pub root: TermId,
}

impl SchemaDoc {
    pub fn show(&self) -> String {
        format!("root: {}\n{}", self.store.show(self.root), self.env.show(&self.store))
    }
}

/// Finite witness sets per variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    sets: HashMap<VarId, Vec<JsonValue>>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn insert(&mut self, v: VarId, j: JsonValue) {
        let set = self.sets.entry(v).or_default();
        if !set.contains(&j) {
            set.push(j);
        }
    }

    pub fn bind_empty(&mut self, v: VarId) {
        self.sets.entry(v).or_default();
    }

    pub fn get(&self, v: VarId) -> Option<&[JsonValue]> {
        self.sets.get(&v).map(Vec::as_slice)
    }

    pub fn is_populated(&self, v: VarId) -> bool {
        self.sets.get(&v).is_some_and(|s| !s.is_empty())
    }

    pub fn first(&self, v: VarId) -> Option<&JsonValue> {
        self.sets.get(&v).and_then(|s| s.first())
    }

    pub fn num_populated(&self) -> usize {
        self.sets.values().filter(|s| !s.is_empty()).count()
    }
}

pub(crate) fn undefined(store: &Store, v: VarId) -> Error {
    Error::UndefinedVariable(store.var_name(v).to_string())
}
