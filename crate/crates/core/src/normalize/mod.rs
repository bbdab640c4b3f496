//! Equivalence-preserving normalization: variable interning through
//! ROBDDs, not-completion and not-elimination, stratification, guarded DNF
//! and canonical typed groups.

mod bdd;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

pub use bdd::{Bdd, BddRef};

use crate::algebra::{check_guarded, Env, ExtNat, SchemaDoc, Store, Term, TermId, TypeTag, VarId};
use crate::decimal::ExtDecimal;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::pattern::{complement, exact};

/// A conjunction of typed operators, as sorted distinct term ids.
pub type Conj = Vec<TermId>;

/// A disjunction of conjunctions of typed operators.
pub type Gdnf = BTreeSet<Conj>;

/// `type(T)` together with ITOs of type `T`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypedGroup {
    pub ty: TypeTag,
    pub itos: Vec<TermId>,
}

/// An environment and root at a stage boundary, over the shared store.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub env: Env,
    pub root: TermId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Translated,
    NotEliminated,
    Stratified,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NormStats {
    /// Disjuncts generated as `⊥` by the not-pushing rules.
    pub bottom_disjuncts: usize,
    /// Variables merged into an existing Boolean-equivalent one.
    pub robdd_hits: usize,
}

pub struct Normalizer {
    pub store: Store,
    env: Env,
    limits: Limits,
    stage: Stage,
    bdd: Bdd,
    atoms: HashMap<TermId, u32>,
    bddrep: HashMap<VarId, BddRef>,
    table: HashMap<BddRef, VarId>,
    comp: HashMap<VarId, VarId>,
    alias: HashMap<VarId, VarId>,
    root: VarId,
    top: VarId,
    bot: VarId,
    pos_memo: HashMap<TermId, TermId>,
    neg_memo: HashMap<TermId, TermId>,
    strat_memo: HashMap<TermId, TermId>,
    gdnf_memo: HashMap<VarId, Rc<Gdnf>>,
    canon_memo: HashMap<VarId, Rc<Vec<TypedGroup>>>,
    in_progress: HashSet<VarId>,
    pub stats: NormStats,
}

impl Normalizer {
    /// Wraps a translated document. The root becomes a variable, and the
    /// canonical `⊤`/`⊥` variables are registered first.
    pub fn new(doc: SchemaDoc, limits: Limits) -> Result<Normalizer> {
        let SchemaDoc { mut store, env, root } = doc;
        // Closing check; an unguarded cycle is reported by name below.
        let guarded = check_guarded(&store, &env)?;
        let top = store.fresh_var("$top");
        let bot = store.fresh_var("$bot");
        let mut env = env;
        env.set(top, store.top());
        env.set(bot, store.bottom());
        let root_var = match store.get(root) {
            Term::Var(x) => *x,
            _ => {
                let x = store.fresh_var("root");
                env.set(x, root);
                x
            }
        };
        let mut n = Normalizer {
            store,
            env,
            limits,
            stage: Stage::Translated,
            bdd: Bdd::new(),
            atoms: HashMap::new(),
            bddrep: HashMap::new(),
            table: HashMap::new(),
            comp: HashMap::new(),
            alias: HashMap::new(),
            root: root_var,
            top,
            bot,
            pos_memo: HashMap::new(),
            neg_memo: HashMap::new(),
            strat_memo: HashMap::new(),
            gdnf_memo: HashMap::new(),
            canon_memo: HashMap::new(),
            in_progress: HashSet::new(),
            stats: NormStats::default(),
        };
        n.bddrep.insert(top, BddRef::TRUE);
        n.bddrep.insert(bot, BddRef::FALSE);
        n.table.insert(BddRef::TRUE, top);
        n.table.insert(BddRef::FALSE, bot);
        n.comp.insert(top, bot);
        n.comp.insert(bot, top);
        let vars = n.env.vars();
        for &x in &vars {
            n.bddrep_of(x)?;
        }
        for &x in &vars {
            if x == top || x == bot {
                continue;
            }
            let b = n.bddrep[&x];
            match n.table.get(&b) {
                Some(&y) => {
                    n.alias.insert(x, y);
                    n.stats.robdd_hits += 1;
                }
                None => {
                    n.table.insert(b, x);
                }
            }
        }
        if !guarded {
            return Err(Error::UnguardedRecursion(String::new()));
        }
        n.root = n.resolve(n.root);
        Ok(n)
    }

    pub fn root(&self) -> VarId {
        self.root
    }

    pub fn top_var(&self) -> VarId {
        self.top
    }

    pub fn bot_var(&self) -> VarId {
        self.bot
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn snapshot(&mut self) -> Snapshot {
        let root = self.store.var(self.root);
        Snapshot { env: self.env.clone(), root }
    }

    fn resolve(&self, x: VarId) -> VarId {
        let mut x = x;
        while let Some(&y) = self.alias.get(&x) {
            x = y;
        }
        x
    }

    /// The complement variable of `x`.
    pub fn complement_of(&self, x: VarId) -> Result<VarId> {
        self.comp
            .get(&self.resolve(x))
            .copied()
            .ok_or_else(|| Error::MissingComplement(self.store.var_name(x).to_string()))
    }

    fn atom(&mut self, t: TermId) -> BddRef {
        let next = self.atoms.len() as u32;
        let a = *self.atoms.entry(t).or_insert(next);
        self.bdd.atom(a)
    }

    /// ROBDD of a Boolean combination, with typed operators as opaque
    /// atoms and variables replaced by their own ROBDDs.
    fn bdd_of(&mut self, t: TermId) -> Result<BddRef> {
        if t == self.store.top() {
            return Ok(BddRef::TRUE);
        }
        match self.store.get(t).clone() {
            Term::And(parts) => {
                let mut acc = BddRef::TRUE;
                for p in parts {
                    let b = self.bdd_of(p)?;
                    acc = self.bdd.and(acc, b);
                }
                Ok(acc)
            }
            Term::Or(parts) => {
                let mut acc = BddRef::FALSE;
                for p in parts {
                    let b = self.bdd_of(p)?;
                    acc = self.bdd.or(acc, b);
                }
                Ok(acc)
            }
            Term::Not(s) => {
                let b = self.bdd_of(s)?;
                Ok(self.bdd.not(b))
            }
            Term::Var(x) => self.bddrep_of(x),
            _ => Ok(self.atom(t)),
        }
    }

    fn bddrep_of(&mut self, x: VarId) -> Result<BddRef> {
        if let Some(&b) = self.bddrep.get(&x) {
            return Ok(b);
        }
        if let Some(&y) = self.alias.get(&x) {
            return self.bddrep_of(y);
        }
        if !self.in_progress.insert(x) {
            return Err(Error::UnguardedRecursion(self.store.var_name(x).to_string()));
        }
        let body = self.env.get(x).ok_or_else(|| Error::UndefinedVariable(self.store.var_name(x).to_string()))?;
        let b = self.bdd_of(body);
        self.in_progress.remove(&x);
        let b = b?;
        self.bddrep.insert(x, b);
        Ok(b)
    }

    fn check_var_budget(&self) -> Result<()> {
        if self.store.num_vars() > self.limits.max_vars {
            return Err(Error::VariableBudgetExceeded { limit: self.limits.max_vars });
        }
        Ok(())
    }

    /// The variable for a Boolean combination of variables: an existing one
    /// if its ROBDD is already registered, otherwise a fresh one together
    /// with its complement. `body` must be positive.
    pub fn robdd_intern(&mut self, body: TermId, hint: &str) -> Result<VarId> {
        if let Term::Var(x) = self.store.get(body) {
            return Ok(self.resolve(*x));
        }
        let b = self.bdd_of(body)?;
        if let Some(&x) = self.table.get(&b) {
            self.stats.robdd_hits += 1;
            return Ok(x);
        }
        self.check_var_budget()?;
        let x = self.store.fresh_var(hint);
        let body = if self.stage >= Stage::Stratified { self.strat(body)? } else { body };
        self.env.set(x, body);
        self.bddrep.insert(x, b);
        self.table.insert(b, x);
        let nb = self.bdd.not(b);
        let nx = self.store.fresh_var(&format!("not_{}", self.store.var_name(x)));
        self.bddrep.insert(nx, nb);
        self.table.insert(nb, nx);
        self.comp.insert(x, nx);
        self.comp.insert(nx, x);
        let neg = self.neg(body)?;
        let neg = if self.stage >= Stage::Stratified { self.strat(neg)? } else { neg };
        self.env.set(nx, neg);
        Ok(x)
    }

    /// Adds a complement for every variable and rewrites all bodies into
    /// the positive algebra.
    pub fn not_complete(&mut self) -> Result<Snapshot> {
        assert_eq!(self.stage, Stage::Translated);
        let saved = (self.comp.clone(), self.table.clone(), self.bddrep.clone());
        let env = self.complete_with(false)?;
        let env = if check_guarded(&self.store, &env)? {
            env
        } else {
            // Reusing an equivalent variable as a complement can close an
            // unguarded cycle, e.g. `y ↦ ¬x` with `y` the complement of `x`.
            (self.comp, self.table, self.bddrep) = saved;
            self.pos_memo.clear();
            self.neg_memo.clear();
            self.complete_with(true)?
        };
        self.env = env;
        self.stage = Stage::NotEliminated;
        Ok(self.snapshot())
    }

    /// Completion proper. With `unfold`, variable references outside typed
    /// operators are replaced by their original bodies unless they name a
    /// variable unchanged by dedup, so the only unguarded edges left are
    /// those of the translated environment.
    fn complete_with(&mut self, unfold: bool) -> Result<Env> {
        let original = self.env.clone();
        let mut negations: Vec<(VarId, VarId)> = Vec::new();
        for (x, _) in original.iter() {
            if self.alias.contains_key(&x) || self.comp.contains_key(&x) {
                continue;
            }
            let nb = self.bdd.not(self.bddrep[&x]);
            match self.table.get(&nb) {
                Some(&y) => {
                    self.comp.insert(x, y);
                    self.comp.insert(y, x);
                }
                None => {
                    self.check_var_budget()?;
                    let nx = self.store.fresh_var(&format!("not_{}", self.store.var_name(x)));
                    self.bddrep.insert(nx, nb);
                    self.table.insert(nb, nx);
                    self.comp.insert(x, nx);
                    self.comp.insert(nx, x);
                    negations.push((x, nx));
                }
            }
        }
        let mut env = Env::new();
        let mut memo = HashMap::new();
        for (x, body) in original.iter() {
            self.limits.deadline.check()?;
            if self.alias.contains_key(&x) {
                continue;
            }
            let b = if unfold { self.unfolded(&original, body, true, &mut memo)? } else { self.pos(body)? };
            env.set(x, b);
        }
        for (x, nx) in negations {
            let body = original.get(x).expect("registered above");
            let b = if unfold { self.unfolded(&original, body, false, &mut memo)? } else { self.neg(body)? };
            env.set(nx, b);
        }
        Ok(env)
    }

    /// `pos(t)` or `neg(t)` with top-level references to renamed variables
    /// and all top-level negated references unfolded through `original`.
    fn unfolded(
        &mut self,
        original: &Env,
        t: TermId,
        positive: bool,
        memo: &mut HashMap<(TermId, bool), TermId>,
    ) -> Result<TermId> {
        if let Some(&r) = memo.get(&(t, positive)) {
            return Ok(r);
        }
        let r = match self.store.get(t).clone() {
            Term::And(parts) | Term::Or(parts) => {
                let conj = matches!(self.store.get(t), Term::And(_)) == positive;
                let ps = parts
                    .into_iter()
                    .map(|p| self.unfolded(original, p, positive, memo))
                    .collect::<Result<Vec<_>>>()?;
                if conj {
                    self.store.and(ps)
                } else {
                    self.store.or(ps)
                }
            }
            Term::Not(s) => self.unfolded(original, s, !positive, memo)?,
            Term::Var(x) if positive && self.resolve(x) == x => self.store.var(x),
            Term::Var(x) => {
                let body =
                    original.get(x).ok_or_else(|| Error::UndefinedVariable(self.store.var_name(x).to_string()))?;
                self.unfolded(original, body, positive, memo)?
            }
            _ if positive => self.pos(t)?,
            _ => self.neg(t)?,
        };
        memo.insert((t, positive), r);
        Ok(r)
    }

    fn var_term(&mut self, x: VarId) -> TermId {
        let x = self.resolve(x);
        self.store.var(x)
    }

    /// Positive form of `t`, with `req(k)` as `pattReq(k:⊤)`.
    pub fn pos(&mut self, t: TermId) -> Result<TermId> {
        if let Some(&r) = self.pos_memo.get(&t) {
            return Ok(r);
        }
        let term = self.store.get(t).clone();
        let r = match term {
            Term::And(parts) => {
                let ps = parts.into_iter().map(|p| self.pos(p)).collect::<Result<Vec<_>>>()?;
                self.store.and(ps)
            }
            Term::Or(parts) => {
                let ps = parts.into_iter().map(|p| self.pos(p)).collect::<Result<Vec<_>>>()?;
                self.store.or(ps)
            }
            Term::Not(s) => self.neg(s)?,
            Term::Var(x) => self.var_term(x),
            Term::Req(k) => {
                let p = self.store.pat(exact(&k));
                let top = self.store.top();
                self.store.mk(Term::PattReq(p, top))
            }
            other => match other.schema_arg() {
                Some(s) => {
                    let s = self.pos(s)?;
                    self.store.mk(other.with_schema_arg(s))
                }
                None => t,
            },
        };
        self.pos_memo.insert(t, r);
        Ok(r)
    }

    fn bottom_disjunct(&mut self) -> Option<TermId> {
        self.stats.bottom_disjuncts += 1;
        None
    }

    /// Positive form of `¬t`.
    pub fn neg(&mut self, t: TermId) -> Result<TermId> {
        if let Some(&r) = self.neg_memo.get(&t) {
            return Ok(r);
        }
        let typed = |st: &mut Store, ty: TypeTag, rest: Vec<TermId>| {
            let ty = st.type_of(ty);
            st.and(std::iter::once(ty).chain(rest))
        };
        let term = self.store.get(t).clone();
        let r = if t == self.store.top() {
            self.store.bottom()
        } else {
            match term {
                Term::And(parts) => {
                    let ps = parts.into_iter().map(|p| self.neg(p)).collect::<Result<Vec<_>>>()?;
                    self.store.or(ps)
                }
                Term::Or(parts) => {
                    let ps = parts.into_iter().map(|p| self.neg(p)).collect::<Result<Vec<_>>>()?;
                    self.store.and(ps)
                }
                Term::Not(s) => self.pos(s)?,
                Term::Var(x) => {
                    let nx = self.complement_of(x)?;
                    self.store.var(nx)
                }
                Term::IsBoolValue(b) => {
                    let v = self.store.mk(Term::IsBoolValue(!b));
                    typed(&mut self.store, TypeTag::Bool, vec![v])
                }
                Term::Pattern(r) => {
                    let c = complement(self.store.eere(r));
                    let c = self.store.pat(c);
                    let v = self.store.mk(Term::Pattern(c));
                    typed(&mut self.store, TypeTag::Str, vec![v])
                }
                Term::Betw(lo, hi) | Term::XBetw(lo, hi) => {
                    let strict = matches!(self.store.get(t), Term::Betw(..));
                    let mk = |st: &mut Store, a: ExtDecimal, b: ExtDecimal| {
                        st.mk(if strict { Term::XBetw(a, b) } else { Term::Betw(a, b) })
                    };
                    let below = match lo {
                        ExtDecimal::NegInf => self.bottom_disjunct(),
                        lo => Some(mk(&mut self.store, ExtDecimal::NegInf, lo)),
                    };
                    let above = match hi {
                        ExtDecimal::PosInf => self.bottom_disjunct(),
                        hi => Some(mk(&mut self.store, hi, ExtDecimal::PosInf)),
                    };
                    let d = self.store.or(below.into_iter().chain(above));
                    typed(&mut self.store, TypeTag::Num, vec![d])
                }
                Term::MulOf(q) => {
                    let v = self.store.mk(Term::NotMulOf(q));
                    typed(&mut self.store, TypeTag::Num, vec![v])
                }
                Term::NotMulOf(q) => {
                    let v = self.store.mk(Term::MulOf(q));
                    typed(&mut self.store, TypeTag::Num, vec![v])
                }
                Term::Props(r, s) => {
                    let s = self.neg(s)?;
                    let v = self.store.mk(Term::PattReq(r, s));
                    typed(&mut self.store, TypeTag::Obj, vec![v])
                }
                Term::PattReq(r, s) => {
                    let s = self.neg(s)?;
                    let v = self.store.mk(Term::Props(r, s));
                    typed(&mut self.store, TypeTag::Obj, vec![v])
                }
                Term::Req(k) => {
                    let p = self.store.pat(exact(&k));
                    let bottom = self.store.bottom();
                    let v = self.store.mk(Term::Props(p, bottom));
                    typed(&mut self.store, TypeTag::Obj, vec![v])
                }
                Term::Pro(i, j) => {
                    let below = if i == 0 {
                        self.bottom_disjunct()
                    } else {
                        Some(self.store.mk(Term::Pro(0, ExtNat::Fin(i - 1))))
                    };
                    let above = match j {
                        ExtNat::Inf => self.bottom_disjunct(),
                        ExtNat::Fin(j) => Some(self.store.mk(Term::Pro(j + 1, ExtNat::Inf))),
                    };
                    let d = self.store.or(below.into_iter().chain(above));
                    typed(&mut self.store, TypeTag::Obj, vec![d])
                }
                Term::Item(l, s) => {
                    let s = self.neg(s)?;
                    let v = self.store.mk(Term::Item(l, s));
                    let top = self.store.top();
                    let len = self.store.mk(Term::Cont(l, ExtNat::Inf, top));
                    typed(&mut self.store, TypeTag::Arr, vec![v, len])
                }
                Term::Items(i, s) => {
                    let s = self.neg(s)?;
                    let v = self.store.mk(Term::ContAfter(i, s));
                    typed(&mut self.store, TypeTag::Arr, vec![v])
                }
                Term::ContAfter(i, s) => {
                    let s = self.neg(s)?;
                    let v = self.store.mk(Term::Items(i, s));
                    typed(&mut self.store, TypeTag::Arr, vec![v])
                }
                Term::Cont(i, j, s) => {
                    let s = self.pos(s)?;
                    let below = if i == 0 {
                        self.bottom_disjunct()
                    } else {
                        Some(self.store.mk(Term::Cont(0, ExtNat::Fin(i - 1), s)))
                    };
                    let above = match j {
                        ExtNat::Inf => self.bottom_disjunct(),
                        ExtNat::Fin(j) => Some(self.store.mk(Term::Cont(j + 1, ExtNat::Inf, s))),
                    };
                    let d = self.store.or(below.into_iter().chain(above));
                    typed(&mut self.store, TypeTag::Arr, vec![d])
                }
                Term::Type(ty) => {
                    let others: Vec<TermId> =
                        TypeTag::ALL.iter().filter(|&&u| u != ty).map(|&u| self.store.type_of(u)).collect();
                    self.store.or(others)
                }
            }
        };
        self.neg_memo.insert(t, r);
        Ok(r)
    }

    /// Replaces every non-variable ITO argument with an interned variable.
    pub fn stratify(&mut self) -> Result<Snapshot> {
        assert_eq!(self.stage, Stage::NotEliminated);
        self.stage = Stage::Stratified;
        let mut done: HashSet<VarId> = HashSet::new();
        loop {
            let pending: Vec<VarId> = self.env.vars().into_iter().filter(|x| !done.contains(x)).collect();
            if pending.is_empty() {
                break;
            }
            for x in pending {
                self.limits.deadline.check()?;
                done.insert(x);
                let body = self.env.get(x).expect("listed");
                let s = self.strat(body)?;
                self.env.set(x, s);
            }
        }
        Ok(self.snapshot())
    }

    fn strat(&mut self, t: TermId) -> Result<TermId> {
        if let Some(&r) = self.strat_memo.get(&t) {
            return Ok(r);
        }
        let term = self.store.get(t).clone();
        let r = match term {
            Term::And(parts) => {
                let ps = parts.into_iter().map(|p| self.strat(p)).collect::<Result<Vec<_>>>()?;
                self.store.and(ps)
            }
            Term::Or(parts) => {
                let ps = parts.into_iter().map(|p| self.strat(p)).collect::<Result<Vec<_>>>()?;
                self.store.or(ps)
            }
            Term::Var(_) => t,
            other => match other.schema_arg() {
                Some(s) if !matches!(self.store.get(s), Term::Var(_)) => {
                    let inner = self.strat(s)?;
                    let x = self.robdd_intern(inner, "s")?;
                    let xv = self.store.var(x);
                    self.store.mk(other.with_schema_arg(xv))
                }
                _ => t,
            },
        };
        self.strat_memo.insert(t, r);
        self.strat_memo.insert(r, r);
        Ok(r)
    }

    /// Guarded DNF of a variable's body, as a set of conjunctions of typed
    /// operators. Computed once per variable.
    pub fn gdnf(&mut self, x: VarId) -> Result<Rc<Gdnf>> {
        let x = self.resolve(x);
        if let Some(g) = self.gdnf_memo.get(&x) {
            return Ok(g.clone());
        }
        if !self.in_progress.insert(x) {
            return Err(Error::UnguardedRecursion(self.store.var_name(x).to_string()));
        }
        let body = self.env.get(x).ok_or_else(|| Error::UndefinedVariable(self.store.var_name(x).to_string()));
        let g = body.and_then(|b| self.g(b));
        self.in_progress.remove(&x);
        let g = Rc::new(g?);
        self.gdnf_memo.insert(x, g.clone());
        Ok(g)
    }

    fn g(&mut self, t: TermId) -> Result<Gdnf> {
        self.limits.deadline.check()?;
        let term = self.store.get(t).clone();
        Ok(match term {
            Term::Var(y) => (*self.gdnf(y)?).clone(),
            Term::Or(parts) => {
                let mut out = Gdnf::new();
                for p in parts {
                    out.extend(self.g(p)?);
                }
                out
            }
            Term::And(parts) => {
                let mut acc: Gdnf = std::iter::once(Conj::new()).collect();
                for p in parts {
                    let gp = self.g(p)?;
                    let mut next = Gdnf::new();
                    for c1 in &acc {
                        self.limits.deadline.check()?;
                        for c2 in &gp {
                            let mut c: Conj = c1.iter().chain(c2.iter()).copied().collect();
                            c.sort_unstable();
                            c.dedup();
                            if !self.type_clash(&c) {
                                next.insert(c);
                            }
                        }
                        if next.len() > self.limits.max_dnf {
                            return Err(Error::DnfTooLarge { limit: self.limits.max_dnf });
                        }
                    }
                    acc = next;
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
            Term::Not(_) => unreachable!("positive bodies only"),
            _ => std::iter::once(vec![t]).collect(),
        })
    }

    fn type_clash(&self, c: &Conj) -> bool {
        let mut ty = None;
        for &t in c {
            if let Term::Type(u) = self.store.get(t) {
                match ty {
                    None => ty = Some(*u),
                    Some(v) if v != *u => return true,
                    _ => {}
                }
            }
        }
        false
    }

    /// Canonical form of a variable: a disjunction of typed groups.
    pub fn canonical(&mut self, x: VarId) -> Result<Rc<Vec<TypedGroup>>> {
        let x = self.resolve(x);
        if let Some(c) = self.canon_memo.get(&x) {
            return Ok(c.clone());
        }
        let g = self.gdnf(x)?;
        let c = Rc::new(self.canonicalize(&g));
        self.canon_memo.insert(x, c.clone());
        Ok(c)
    }

    /// Splits every conjunction into typed groups, merging `pro` and
    /// `cont(⊤)` bounds and dropping trivially true operators.
    pub fn canonicalize(&mut self, g: &Gdnf) -> Vec<TypedGroup> {
        let mut out: BTreeSet<TypedGroup> = BTreeSet::new();
        for c in g {
            let mut types = c.iter().filter_map(|&t| match self.store.get(t) {
                Term::Type(u) => Some(*u),
                _ => None,
            });
            let first = types.next();
            if types.any(|u| Some(u) != first) {
                continue;
            }
            let candidates: Vec<TypeTag> = match first {
                Some(t) => vec![t],
                None => TypeTag::ALL.to_vec(),
            };
            for ty in candidates {
                let itos: Vec<TermId> =
                    c.iter().copied().filter(|&t| self.store.get(t).ito_type() == Some(ty)).collect();
                if let Some(group) = self.simplify_group(ty, itos) {
                    out.insert(group);
                }
            }
        }
        out.into_iter().collect()
    }

    fn simplify_group(&mut self, ty: TypeTag, itos: Vec<TermId>) -> Option<TypedGroup> {
        let top = self.top;
        let top_term = self.store.var(top);
        let mut kept = Vec::with_capacity(itos.len());
        let (mut lo, mut hi) = (0u64, ExtNat::Inf);
        let mut merged_bounds = false;
        for t in itos {
            match self.store.get(t).clone() {
                Term::Pro(i, j) => {
                    merged_bounds = true;
                    lo = lo.max(i);
                    hi = hi.min(j);
                }
                Term::Cont(i, j, s) if s == top_term => {
                    merged_bounds = true;
                    lo = lo.max(i);
                    hi = hi.min(j);
                }
                Term::Cont(0, ExtNat::Inf, _) => {}
                Term::Props(_, s) | Term::Items(_, s) | Term::Item(_, s) if s == top_term => {}
                Term::Betw(ExtDecimal::NegInf, ExtDecimal::PosInf) => {}
                _ => kept.push(t),
            }
        }
        if merged_bounds {
            if let ExtNat::Fin(h) = hi {
                if lo > h {
                    return None;
                }
            }
            if lo > 0 || hi != ExtNat::Inf {
                let t = match ty {
                    TypeTag::Obj => Term::Pro(lo, hi),
                    _ => Term::Cont(lo, hi, top_term),
                };
                kept.push(self.store.mk(t));
            }
        }
        kept.sort_unstable();
        kept.dedup();
        Some(TypedGroup { ty, itos: kept })
    }

    fn gdnf_term(&mut self, g: &Gdnf) -> TermId {
        let conjs: Vec<TermId> = g.iter().map(|c| self.store.and(c.iter().copied())).collect();
        self.store.or(conjs)
    }

    pub fn group_term(&mut self, g: &TypedGroup) -> TermId {
        let ty = self.store.type_of(g.ty);
        self.store.and(std::iter::once(ty).chain(g.itos.iter().copied()))
    }

    /// The environment with every body in guarded DNF.
    pub fn gdnf_snapshot(&mut self) -> Result<Snapshot> {
        let mut env = Env::new();
        for x in self.env.vars() {
            let g = self.gdnf(x)?;
            env.set(x, self.gdnf_term(&g));
        }
        let root = self.store.var(self.root);
        Ok(Snapshot { env, root })
    }

    /// The environment with every body a disjunction of typed groups.
    pub fn canonical_snapshot(&mut self) -> Result<Snapshot> {
        let mut env = Env::new();
        for x in self.env.vars() {
            let c = self.canonical(x)?;
            let groups: Vec<TermId> = c.iter().map(|g| self.group_term(g)).collect();
            env.set(x, self.store.or(groups));
        }
        let root = self.store.var(self.root);
        Ok(Snapshot { env, root })
    }

    pub fn show_snapshot(&self, s: &Snapshot) -> String {
        format!("root: {}\n{}", self.store.show(s.root), s.env.show(&self.store))
    }

    /// Runs not-elimination and stratification.
    pub fn run(doc: SchemaDoc, limits: Limits) -> Result<Normalizer> {
        let mut n = Normalizer::new(doc, limits)?;
        n.not_complete()?;
        n.stratify()?;
        Ok(n)
    }
}
