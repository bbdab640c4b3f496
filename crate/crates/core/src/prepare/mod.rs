//! Cr-combination: object and array typed groups rewritten into explicit
//! choices, each backed by one variable obtained through and-completion.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::rc::Rc;
use std::sync::Arc;

use crate::algebra::{ExtNat, PatId, Term, TermId, TypeTag, VarId};
use crate::error::{Error, Result};
use crate::normalize::{Normalizer, TypedGroup};
use crate::pattern::{compile, complement, intersect, Dfa, Eere};

/// A `props(p : x)` or `pattReq(r : y)` of an object group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatVar {
    pub pat: PatId,
    pub var: VarId,
}

/// A nonempty characteristic pattern `cp(CP′, RP′)`.
#[derive(Debug, Clone)]
pub struct KeyCell {
    /// Indices into the group's `cp`.
    pub cp_in: Vec<usize>,
    /// Indices into the group's `rp`.
    pub rp_in: Vec<usize>,
    pub dfa: Arc<Dfa>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectChoice {
    /// Index into [`ObjectPrepared::cells`].
    pub cell: usize,
    /// `RP″`, a subset of the cell's `rp_in`.
    pub rp_satisfied: Vec<usize>,
    pub var: VarId,
}

impl ObjectChoice {
    pub fn is_r_choice(&self) -> bool {
        !self.rp_satisfied.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ObjectPrepared {
    pub cp: Vec<PatVar>,
    pub rp: Vec<PatVar>,
    pub min: u64,
    pub max: ExtNat,
    pub cells: Vec<KeyCell>,
    pub choices: Vec<ObjectChoice>,
}

/// `[lo, lo]` in the head or `[lo, ∞]` for the tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lo: u64,
    pub hi: ExtNat,
}

impl Interval {
    pub fn point(i: u64) -> Interval {
        Interval { lo: i, hi: ExtNat::Fin(i) }
    }

    pub fn from(i: u64) -> Interval {
        Interval { lo: i, hi: ExtNat::Inf }
    }

    pub fn meets(&self, other: &Interval) -> bool {
        let lo = self.lo.max(other.lo);
        self.hi.contains(lo) && other.hi.contains(lo)
    }
}

/// An array ITO with a variable argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayIto {
    Item(u64, VarId),
    Items(u64, VarId),
    ContAfter(u64, VarId),
    Cont(u64, ExtNat, VarId),
}

impl ArrayIto {
    pub fn var(&self) -> VarId {
        match *self {
            ArrayIto::Item(_, x) | ArrayIto::Items(_, x) | ArrayIto::ContAfter(_, x) | ArrayIto::Cont(_, _, x) => x,
        }
    }

    /// Length of the prefix where this assertion cares about positions.
    pub fn head_length(&self) -> u64 {
        match *self {
            ArrayIto::Item(l, _) => l,
            ArrayIto::Items(i, _) | ArrayIto::ContAfter(i, _) => i,
            ArrayIto::Cont(..) => 0,
        }
    }

    /// Positions the assertion describes.
    pub fn interval(&self) -> Interval {
        match *self {
            ArrayIto::Item(l, _) => Interval::point(l),
            ArrayIto::Items(i, _) | ArrayIto::ContAfter(i, _) => Interval::from(i + 1),
            ArrayIto::Cont(..) => Interval::from(1),
        }
    }
}

/// The subset of `assertions` whose interval meets `interval`.
pub fn restrict(assertions: &[ArrayIto], interval: Interval) -> Vec<ArrayIto> {
    assertions.iter().copied().filter(|a| a.interval().meets(&interval)).collect()
}

/// Maximal head length over item, items and contAfter assertions.
pub fn head_length(assertions: &[ArrayIto]) -> u64 {
    assertions.iter().map(ArrayIto::head_length).max().unwrap_or(0)
}

/// A co-maximal array choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayChoice {
    pub interval: Interval,
    /// Indices into [`ArrayPrepared::ip`].
    pub ip_part: Vec<usize>,
    /// Indices into [`ArrayPrepared::ap`].
    pub ap_part: Vec<usize>,
    /// Indices into [`ArrayPrepared::kp`] the element satisfies.
    pub kp_pos: Vec<usize>,
    /// The remaining counting assertions, which the element violates.
    pub kp_neg: Vec<usize>,
    pub var: VarId,
}

#[derive(Debug, Clone)]
pub struct ArrayPrepared {
    pub head_length: u64,
    pub ip: Vec<ArrayIto>,
    pub ap: Vec<ArrayIto>,
    pub kp: Vec<ArrayIto>,
    /// Length bounds from `cont(⊤)`, kept out of `kp`.
    pub min_len: u64,
    pub max_len: ExtNat,
    pub choices: Vec<ArrayChoice>,
}

#[derive(Debug, Clone)]
pub enum PreparedGroup {
    Object(ObjectPrepared),
    Array(ArrayPrepared),
    Base(TypedGroup),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PrepStats {
    pub groups: usize,
    pub object_cells: usize,
    pub choices: usize,
    /// Conjunction variables interned by and-completion.
    pub fresh_vars: usize,
}

/// Prepares every variable reachable from the root through choices.
pub struct Preparer {
    pub norm: Normalizer,
    prepared: HashMap<VarId, Rc<Vec<PreparedGroup>>>,
    order: Vec<VarId>,
    seen: HashSet<VarId>,
    queue: VecDeque<VarId>,
    sigma_star: Option<Arc<Dfa>>,
    pub stats: PrepStats,
}

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl Preparer {
    pub fn new(norm: Normalizer) -> Preparer {
        Preparer {
            norm,
            prepared: HashMap::new(),
            order: Vec::new(),
            seen: HashSet::new(),
            queue: VecDeque::new(),
            sigma_star: None,
            stats: PrepStats::default(),
        }
    }

    /// Prepares the root and everything reachable from it, FIFO.
    pub fn run(norm: Normalizer) -> Result<Preparer> {
        let mut p = Preparer::new(norm);
        let root = p.norm.root();
        p.prepare_from(root)?;
        Ok(p)
    }

    pub fn prepare_from(&mut self, x: VarId) -> Result<()> {
        self.enqueue(x);
        while let Some(y) = self.queue.pop_front() {
            self.norm.limits().deadline.check()?;
            let groups = self.norm.canonical(y)?;
            let mut out = Vec::with_capacity(groups.len());
            for g in groups.iter() {
                self.stats.groups += 1;
                out.push(match g.ty {
                    TypeTag::Obj => PreparedGroup::Object(self.object_cr_combine(g)?),
                    TypeTag::Arr => PreparedGroup::Array(self.array_cr_combine(g)?),
                    _ => PreparedGroup::Base(g.clone()),
                });
            }
            self.prepared.insert(y, Rc::new(out));
            self.order.push(y);
        }
        Ok(())
    }

    fn enqueue(&mut self, x: VarId) {
        if self.seen.insert(x) {
            self.queue.push_back(x);
        }
    }

    /// Variables in preparation order.
    pub fn vars(&self) -> &[VarId] {
        &self.order
    }

    pub fn groups(&self, x: VarId) -> Option<&Rc<Vec<PreparedGroup>>> {
        self.prepared.get(&x)
    }

    /// The variable equivalent to the conjunction of `vars`: `⊤` for none,
    /// the variable itself for one, otherwise an interned conjunction.
    pub fn and_complete(&mut self, vars: &[VarId]) -> Result<VarId> {
        let mut vs = vars.to_vec();
        vs.sort_unstable();
        vs.dedup();
        let before = self.norm.store.num_vars();
        let body = {
            let terms: Vec<TermId> = vs.iter().map(|&v| self.norm.store.var(v)).collect();
            self.norm.store.and(terms)
        };
        let hint = if vs.len() > 1 {
            let mut names: Vec<&str> = vs.iter().map(|&v| self.norm.store.var_name(v)).collect();
            names.sort_unstable();
            let h = fnv1a(names.join("\u{0}").into_bytes());
            format!("and_{h:016x}")
        } else {
            "and".to_string()
        };
        let x = self.norm.robdd_intern(body, &hint)?;
        if self.norm.store.num_vars() > before {
            self.stats.fresh_vars += 1;
        }
        self.enqueue(x);
        Ok(x)
    }

    /// Subset enumeration over `k` assertions needs `2^k` variables.
    fn check_subset_width(&self, k: usize) -> Result<()> {
        let limit = self.norm.limits().max_vars;
        if k >= 63 || (1usize << k) > limit {
            return Err(Error::VariableBudgetExceeded { limit });
        }
        Ok(())
    }

    fn arg_var(&mut self, s: TermId) -> Result<VarId> {
        match self.norm.store.get(s) {
            Term::Var(x) => Ok(*x),
            _ => self.norm.robdd_intern(s, "s"),
        }
    }

    fn sigma_star(&mut self) -> Result<Arc<Dfa>> {
        if let Some(d) = &self.sigma_star {
            return Ok(d.clone());
        }
        let d = Arc::new(compile(&Eere::top(), self.norm.limits().max_states)?);
        self.sigma_star = Some(d.clone());
        Ok(d)
    }

    pub fn object_cr_combine(&mut self, g: &TypedGroup) -> Result<ObjectPrepared> {
        let mut cp = Vec::new();
        let mut rp = Vec::new();
        let (mut min, mut max) = (0u64, ExtNat::Inf);
        for &t in &g.itos {
            match self.norm.store.get(t).clone() {
                Term::Props(pat, s) => {
                    let var = self.arg_var(s)?;
                    cp.push(PatVar { pat, var });
                }
                Term::PattReq(pat, s) => {
                    let var = self.arg_var(s)?;
                    rp.push(PatVar { pat, var });
                }
                Term::Req(k) => {
                    let pat = self.norm.store.pat(crate::pattern::exact(&k));
                    rp.push(PatVar { pat, var: self.norm.top_var() });
                }
                Term::Pro(i, j) => {
                    min = min.max(i);
                    max = max.min(j);
                }
                other => unreachable!("non-object operator {other:?} in an object group"),
            }
        }
        let cells = self.split_cells(&cp, &rp)?;
        self.stats.object_cells += cells.len();
        let mut choices = Vec::new();
        for (ci, cell) in cells.iter().enumerate() {
            let k = cell.rp_in.len();
            self.check_subset_width(k)?;
            for mask in 0u64..(1u64 << k) {
                self.norm.limits().deadline.check()?;
                let rp_satisfied: Vec<usize> = (0..k).filter(|b| mask & (1 << b) != 0).map(|b| cell.rp_in[b]).collect();
                let vars: Vec<VarId> =
                    cell.cp_in.iter().map(|&i| cp[i].var).chain(rp_satisfied.iter().map(|&j| rp[j].var)).collect();
                let var = self.and_complete(&vars)?;
                choices.push(ObjectChoice { cell: ci, rp_satisfied, var });
            }
        }
        self.stats.choices += choices.len();
        Ok(ObjectPrepared { cp, rp, min, max, cells, choices })
    }

    /// Partitions Σ* by membership in every pattern, splitting each current
    /// cell `c` by a pattern `p` into `c ∧ p` and `c ∧ ¬p` and dropping empty
    /// parts. Cost is linear in the number of nonempty cells per pattern.
    fn split_cells(&mut self, cp: &[PatVar], rp: &[PatVar]) -> Result<Vec<KeyCell>> {
        let max_states = self.norm.limits().max_states;
        let mut cells = vec![KeyCell { cp_in: Vec::new(), rp_in: Vec::new(), dfa: self.sigma_star()? }];
        let all = cp.iter().map(|pv| (true, pv.pat)).chain(rp.iter().map(|pv| (false, pv.pat)));
        for (n, (is_cp, pat)) in all.enumerate() {
            let idx = if is_cp { n } else { n - cp.len() };
            let d = self.norm.store.dfa(pat)?;
            let nd = d.complement();
            let mut next = Vec::with_capacity(cells.len() + 1);
            for cell in cells {
                self.norm.limits().deadline.check()?;
                let inside = cell.dfa.intersect(&d, max_states)?;
                let outside = cell.dfa.intersect(&nd, max_states)?;
                if !inside.is_empty() {
                    let mut c = KeyCell { cp_in: cell.cp_in.clone(), rp_in: cell.rp_in.clone(), dfa: cell.dfa.clone() };
                    if is_cp {
                        c.cp_in.push(idx);
                    } else {
                        c.rp_in.push(idx);
                    }
                    if !outside.is_empty() {
                        c.dfa = Arc::new(inside.minimize());
                    }
                    next.push(c);
                }
                if !outside.is_empty() {
                    let mut c = cell;
                    if !inside.is_empty() {
                        c.dfa = Arc::new(outside.minimize());
                    }
                    next.push(c);
                }
            }
            cells = next;
        }
        Ok(cells)
    }

    pub fn array_cr_combine(&mut self, g: &TypedGroup) -> Result<ArrayPrepared> {
        let top = self.norm.top_var();
        let (mut ip, mut ap, mut kp) = (Vec::new(), Vec::new(), Vec::new());
        let (mut min_len, mut max_len) = (0u64, ExtNat::Inf);
        for &t in &g.itos {
            match self.norm.store.get(t).clone() {
                Term::Item(l, s) => ip.push(ArrayIto::Item(l, self.arg_var(s)?)),
                Term::Items(i, s) => ip.push(ArrayIto::Items(i, self.arg_var(s)?)),
                Term::ContAfter(i, s) => ap.push(ArrayIto::ContAfter(i, self.arg_var(s)?)),
                Term::Cont(i, j, s) => {
                    let x = self.arg_var(s)?;
                    if x == top {
                        min_len = min_len.max(i);
                        max_len = max_len.min(j);
                    } else {
                        kp.push(ArrayIto::Cont(i, j, x));
                    }
                }
                other => unreachable!("non-array operator {other:?} in an array group"),
            }
        }
        let h = head_length(&ip).max(head_length(&ap));
        let intervals = (1..=h).map(Interval::point).chain(std::iter::once(Interval::from(h + 1)));
        let mut choices = Vec::new();
        let complements: Vec<VarId> = kp.iter().map(|a| self.norm.complement_of(a.var())).collect::<Result<_>>()?;
        for interval in intervals {
            let ip_part: Vec<usize> = (0..ip.len()).filter(|&i| ip[i].interval().meets(&interval)).collect();
            let ap_cands: Vec<usize> = (0..ap.len()).filter(|&i| ap[i].interval().meets(&interval)).collect();
            self.check_subset_width(ap_cands.len() + kp.len())?;
            for ap_mask in 0u64..(1u64 << ap_cands.len()) {
                let ap_part: Vec<usize> =
                    (0..ap_cands.len()).filter(|b| ap_mask & (1 << b) != 0).map(|b| ap_cands[b]).collect();
                for kp_mask in 0u64..(1u64 << kp.len()) {
                    self.norm.limits().deadline.check()?;
                    let (kp_pos, kp_neg): (Vec<usize>, Vec<usize>) =
                        (0..kp.len()).partition(|b| kp_mask & (1 << b) != 0);
                    let vars: Vec<VarId> = ip_part
                        .iter()
                        .map(|&i| ip[i].var())
                        .chain(ap_part.iter().map(|&i| ap[i].var()))
                        .chain(kp_pos.iter().map(|&i| kp[i].var()))
                        .chain(kp_neg.iter().map(|&i| complements[i]))
                        .collect();
                    let var = self.and_complete(&vars)?;
                    choices.push(ArrayChoice {
                        interval,
                        ip_part: ip_part.clone(),
                        ap_part: ap_part.clone(),
                        kp_pos,
                        kp_neg,
                        var,
                    });
                }
            }
        }
        self.stats.choices += choices.len();
        Ok(ArrayPrepared { head_length: h, ip, ap, kp, min_len, max_len, choices })
    }

    /// Human-readable dump of every prepared group.
    pub fn show(&self) -> String {
        let st = &self.norm.store;
        let mut out = String::new();
        for &x in &self.order {
            let _ = writeln!(out, "{}:", st.var_name(x));
            for g in self.prepared[&x].iter() {
                match g {
                    PreparedGroup::Base(g) => {
                        let itos: Vec<String> = g.itos.iter().map(|&t| st.show(t)).collect();
                        let _ = writeln!(out, "  {} [{}]", g.ty, itos.join(", "));
                    }
                    PreparedGroup::Object(o) => {
                        let _ = writeln!(out, "  Obj pro_{}^{}", o.min, o.max);
                        for c in &o.choices {
                            let cell = &o.cells[c.cell];
                            let sample = cell.dfa.first_word().unwrap_or_default();
                            let _ = writeln!(
                                out,
                                "    cp={:?} rp={:?} rp_sat={:?} key~{:?} -> {}",
                                cell.cp_in,
                                cell.rp_in,
                                c.rp_satisfied,
                                sample,
                                st.var_name(c.var)
                            );
                        }
                    }
                    PreparedGroup::Array(a) => {
                        let _ = writeln!(out, "  Arr h={} len=[{},{}]", a.head_length, a.min_len, a.max_len);
                        for c in &a.choices {
                            let _ = writeln!(
                                out,
                                "    [{},{}] ip={:?} ap={:?} kp+={:?} kp-={:?} -> {}",
                                c.interval.lo,
                                c.interval.hi,
                                c.ip_part,
                                c.ap_part,
                                c.kp_pos,
                                c.kp_neg,
                                st.var_name(c.var)
                            );
                        }
                    }
                }
            }
        }
        out
    }
}

/// `cp(CP′, RP′)`: every included pattern and the complement of every
/// excluded one.
pub fn characteristic_pattern(cp: &[&Eere], rp: &[&Eere], cp_in: &[usize], rp_in: &[usize]) -> Eere {
    let mut acc = Eere::top();
    for (i, r) in cp.iter().enumerate() {
        let part = if cp_in.contains(&i) { (*r).clone() } else { complement(r) };
        acc = intersect(&acc, &part);
    }
    for (i, r) in rp.iter().enumerate() {
        let part = if rp_in.contains(&i) { (*r).clone() } else { complement(r) };
        acc = intersect(&acc, &part);
    }
    acc
}
