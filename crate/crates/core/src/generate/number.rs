//! Witnesses for numeric groups.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{Store, Term, TermId};
use crate::decimal::{Decimal, ExtDecimal};
use crate::error::Result;
use crate::limits::Deadline;

/// One end of an interval; `strict` excludes the end point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bound {
    pub value: ExtDecimal,
    pub strict: bool,
}

/// The merged content of a numeric group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumConstraints {
    pub lo: Bound,
    pub hi: Bound,
    pub mul: Option<Decimal>,
    pub not_mul: Vec<Decimal>,
}

impl Default for NumConstraints {
    fn default() -> Self {
        NumConstraints {
            lo: Bound { value: ExtDecimal::NegInf, strict: false },
            hi: Bound { value: ExtDecimal::PosInf, strict: false },
            mul: None,
            not_mul: Vec::new(),
        }
    }
}

impl NumConstraints {
    pub fn from_group(store: &Store, itos: &[TermId]) -> NumConstraints {
        let mut c = NumConstraints::default();
        for &t in itos {
            match store.get(t) {
                Term::Betw(lo, hi) => c.add_interval(lo.clone(), hi.clone(), false),
                Term::XBetw(lo, hi) => c.add_interval(lo.clone(), hi.clone(), true),
                Term::MulOf(q) => c.add_mul(q),
                Term::NotMulOf(q) => c.not_mul.push(q.abs()),
                other => unreachable!("non-numeric operator {other:?} in a numeric group"),
            }
        }
        c
    }

    pub fn add_interval(&mut self, lo: ExtDecimal, hi: ExtDecimal, strict: bool) {
        let strict_lo = strict && lo != ExtDecimal::NegInf;
        if lo > self.lo.value || (lo == self.lo.value && strict_lo) {
            self.lo = Bound { value: lo, strict: strict_lo };
        }
        let strict_hi = strict && hi != ExtDecimal::PosInf;
        if hi < self.hi.value || (hi == self.hi.value && strict_hi) {
            self.hi = Bound { value: hi, strict: strict_hi };
        }
    }

    pub fn add_mul(&mut self, q: &Decimal) {
        let q = q.abs();
        self.mul = Some(match &self.mul {
            Some(m) => m.lcm(&q),
            None => q,
        });
    }

    pub fn in_interval(&self, n: &Decimal) -> bool {
        let n = ExtDecimal::Finite(n.clone());
        let above = if self.lo.strict { n > self.lo.value } else { n >= self.lo.value };
        let below = if self.hi.strict { n < self.hi.value } else { n <= self.hi.value };
        above && below
    }

    pub fn satisfies(&self, n: &Decimal) -> bool {
        self.in_interval(n)
            && self.mul.as_ref().is_none_or(|m| n.is_multiple_of(m))
            && self.not_mul.iter().all(|q| !n.is_multiple_of(q))
    }

    /// A member of the merged constraints, or `None` when there is none.
    pub fn generate(&self, deadline: &Deadline) -> Result<Option<Decimal>> {
        if let Some(m) = &self.mul {
            if self.not_mul.iter().any(|n| m.is_multiple_of(n)) {
                return Ok(None);
            }
        }
        if self.lo.value > self.hi.value {
            return Ok(None);
        }
        if self.lo.value == self.hi.value {
            let ExtDecimal::Finite(v) = &self.lo.value else { return Ok(None) };
            if self.lo.strict || self.hi.strict {
                return Ok(None);
            }
            return Ok(self.satisfies(v).then(|| v.clone()));
        }
        match (&self.mul, &self.lo.value, &self.hi.value) {
            (None, ..) => Ok(self.without_multiple()),
            (Some(m), ExtDecimal::Finite(lo), ExtDecimal::Finite(hi)) => self.scan_multiples(m, lo, hi, deadline),
            (Some(m), ..) => self.prime_multiple(m, deadline),
        }
    }

    /// No `mulOf`: among `l + 1` points spaced by `ε` inside the interval,
    /// with `ε` small enough that no `notMulOf(n)` rejects two of them.
    fn without_multiple(&self) -> Option<Decimal> {
        let zero = Decimal::zero();
        if self.satisfies(&zero) {
            return Some(zero);
        }
        let one = Decimal::one();
        let (a, b) = match (&self.lo.value, &self.hi.value) {
            (ExtDecimal::Finite(lo), ExtDecimal::Finite(hi)) => (lo.clone(), hi.clone()),
            (ExtDecimal::Finite(lo), _) => (lo.clone(), lo.add(&one)),
            (_, ExtDecimal::Finite(hi)) => (hi.sub(&one), hi.clone()),
            _ => (zero, one),
        };
        let mut bound = b.sub(&a);
        for n in &self.not_mul {
            if *n < bound {
                bound = n.clone();
            }
        }
        let l = self.not_mul.len() as i64;
        let (num, den) = bound.ratio(&Decimal::from_int(l + 2));
        let eps = Decimal::pow10_floor(&num, &den);
        (1..=l + 1).map(|i| a.add(&eps.mul_int(&BigInt::from(i)))).find(|v| self.satisfies(v))
    }

    /// Finite interval with `mulOf(m)`: multiples of `m` from the lower end.
    fn scan_multiples(&self, m: &Decimal, lo: &Decimal, hi: &Decimal, deadline: &Deadline) -> Result<Option<Decimal>> {
        let mut k = lo.ceil_div(m);
        let last = hi.floor_div(m);
        let mut steps = 0u32;
        while k <= last {
            steps = steps.wrapping_add(1);
            if steps.is_multiple_of(1024) {
                deadline.check()?;
            }
            let v = m.mul_int(&k);
            if self.satisfies(&v) {
                return Ok(Some(v));
            }
            k += 1;
        }
        Ok(None)
    }

    /// Unbounded side with `mulOf(m)`: `p × m` (or its opposite) for a prime
    /// `p` above every `notMulOf` numerator over a common denominator.
    fn prime_multiple(&self, m: &Decimal, deadline: &Deadline) -> Result<Option<Decimal>> {
        let zero = Decimal::zero();
        if self.not_mul.is_empty() && self.in_interval(&zero) {
            return Ok(Some(zero));
        }
        let e = self.not_mul.iter().map(Decimal::exponent).fold(m.exponent(), i64::min);
        let numerator = |d: &Decimal| -> BigInt {
            let shift = (d.exponent() - e) as u32;
            d.coefficient().abs() * BigInt::from(10u32).pow(shift)
        };
        let mut p_min: BigInt = self.not_mul.iter().map(numerator).max().unwrap_or_else(BigInt::zero) + 1;
        let negate = match (&self.lo.value, &self.hi.value) {
            (ExtDecimal::Finite(lo), _) => {
                p_min = p_min.max(lo.floor_div(m) + 1);
                false
            }
            (_, ExtDecimal::Finite(hi)) => {
                p_min = p_min.max(hi.neg().floor_div(m) + 1);
                true
            }
            _ => false,
        };
        let mut p = p_min.max(BigInt::from(2));
        loop {
            deadline.check()?;
            p = next_prime(&p);
            let v = m.mul_int(&p);
            let v = if negate { v.neg() } else { v };
            if self.satisfies(&v) {
                return Ok(Some(v));
            }
            p += 1;
        }
    }
}

const WITNESS_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin with the first thirteen prime bases; exact below 3.3·10^24.
pub fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    if let Some(small) = n.to_u64() {
        if small < 4 {
            return true;
        }
    }
    let n = n.magnitude();
    for &b in &WITNESS_BASES {
        let b = BigUint::from(b);
        if n == &b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'bases: for &b in &WITNESS_BASES {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n);
            if x == nm1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// The least prime `≥ n`.
pub fn next_prime(n: &BigInt) -> BigInt {
    let mut p = n.clone().max(BigInt::from(2));
    if p > BigInt::from(2) && p.is_even() {
        p += 1;
    }
    while !is_prime(&p) {
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    p
}
