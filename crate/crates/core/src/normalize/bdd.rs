//! Reduced ordered binary decision diagrams over numbered atoms.

use std::collections::HashMap;

/// A node handle. Equal handles denote equal Boolean functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BddRef(u32);

impl BddRef {
    pub const FALSE: BddRef = BddRef(0);
    pub const TRUE: BddRef = BddRef(1);

    pub fn is_const(self) -> bool {
        self.0 < 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    atom: u32,
    lo: BddRef,
    hi: BddRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
}

/// Node store with a unique table and operation caches. Atom order is the
/// numeric order of atom indices.
#[derive(Default)]
pub struct Bdd {
    nodes: Vec<Node>,
    unique: HashMap<Node, BddRef>,
    apply_cache: HashMap<(Op, BddRef, BddRef), BddRef>,
    not_cache: HashMap<BddRef, BddRef>,
}

impl Bdd {
    pub fn new() -> Bdd {
        let sentinel = Node { atom: u32::MAX, lo: BddRef::FALSE, hi: BddRef::FALSE };
        Bdd { nodes: vec![sentinel, sentinel], ..Bdd::default() }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn mk(&mut self, atom: u32, lo: BddRef, hi: BddRef) -> BddRef {
        if lo == hi {
            return lo;
        }
        let n = Node { atom, lo, hi };
        if let Some(&r) = self.unique.get(&n) {
            return r;
        }
        let r = BddRef(self.nodes.len() as u32);
        self.nodes.push(n);
        self.unique.insert(n, r);
        r
    }

    /// The function that is true iff `atom` is.
    pub fn atom(&mut self, atom: u32) -> BddRef {
        self.mk(atom, BddRef::FALSE, BddRef::TRUE)
    }

    pub fn not(&mut self, a: BddRef) -> BddRef {
        match a {
            BddRef::FALSE => return BddRef::TRUE,
            BddRef::TRUE => return BddRef::FALSE,
            _ => {}
        }
        if let Some(&r) = self.not_cache.get(&a) {
            return r;
        }
        let n = self.nodes[a.0 as usize];
        let lo = self.not(n.lo);
        let hi = self.not(n.hi);
        let r = self.mk(n.atom, lo, hi);
        self.not_cache.insert(a, r);
        self.not_cache.insert(r, a);
        r
    }

    pub fn and(&mut self, a: BddRef, b: BddRef) -> BddRef {
        self.apply(Op::And, a, b)
    }

    pub fn or(&mut self, a: BddRef, b: BddRef) -> BddRef {
        self.apply(Op::Or, a, b)
    }

    fn apply(&mut self, op: Op, a: BddRef, b: BddRef) -> BddRef {
        match (op, a, b) {
            (Op::And, BddRef::FALSE, _) | (Op::And, _, BddRef::FALSE) => return BddRef::FALSE,
            (Op::And, BddRef::TRUE, x) | (Op::And, x, BddRef::TRUE) => return x,
            (Op::Or, BddRef::TRUE, _) | (Op::Or, _, BddRef::TRUE) => return BddRef::TRUE,
            (Op::Or, BddRef::FALSE, x) | (Op::Or, x, BddRef::FALSE) => return x,
            _ if a == b => return a,
            _ => {}
        }
        let key = if a <= b { (op, a, b) } else { (op, b, a) };
        if let Some(&r) = self.apply_cache.get(&key) {
            return r;
        }
        let na = self.nodes[a.0 as usize];
        let nb = self.nodes[b.0 as usize];
        let atom = na.atom.min(nb.atom);
        let (alo, ahi) = if na.atom == atom { (na.lo, na.hi) } else { (a, a) };
        let (blo, bhi) = if nb.atom == atom { (nb.lo, nb.hi) } else { (b, b) };
        let lo = self.apply(op, alo, blo);
        let hi = self.apply(op, ahi, bhi);
        let r = self.mk(atom, lo, hi);
        self.apply_cache.insert(key, r);
        r
    }

    /// Evaluates under an assignment of atoms.
    pub fn eval(&self, mut a: BddRef, value: impl Fn(u32) -> bool) -> bool {
        while !a.is_const() {
            let n = self.nodes[a.0 as usize];
            a = if value(n.atom) { n.hi } else { n.lo };
        }
        a == BddRef::TRUE
    }
}
