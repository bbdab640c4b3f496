//! Exact decimal numbers stored as `coefficient × 10^exponent`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exponents outside this range are rejected when parsing.
pub const MAX_EXPONENT: i64 = 100_000;

/// An exact decimal. Normalized: the coefficient is not divisible by ten,
/// and zero is stored with exponent zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Decimal {
    coef: BigInt,
    exp: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal literal `{0}`")]
pub struct DecimalParseError(pub String);

fn pow10(n: u64) -> BigInt {
    num_traits::pow(BigInt::from(10u32), n as usize)
}

impl Decimal {
    pub fn new(coef: BigInt, exp: i64) -> Self {
        let mut d = Decimal { coef, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Decimal { coef: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Decimal { coef: BigInt::one(), exp: 0 }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Decimal::new(v.into(), 0)
    }

    fn normalize(&mut self) {
        if self.coef.is_zero() {
            self.exp = 0;
            return;
        }
        let ten = BigInt::from(10u32);
        loop {
            let (q, r) = self.coef.div_rem(&ten);
            if !r.is_zero() {
                break;
            }
            self.coef = q;
            self.exp += 1;
        }
    }

    pub fn coefficient(&self) -> &BigInt {
        &self.coef
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.coef.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.coef.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0
    }

    pub fn abs(&self) -> Decimal {
        Decimal { coef: self.coef.abs(), exp: self.exp }
    }

    /// Both operands scaled to the smaller exponent.
    fn aligned(&self, other: &Decimal) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        let a = &self.coef * pow10((self.exp - e) as u64);
        let b = &other.coef * pow10((other.exp - e) as u64);
        (a, b, e)
    }

    pub fn add(&self, other: &Decimal) -> Decimal {
        let (a, b, e) = self.aligned(other);
        Decimal::new(a + b, e)
    }

    pub fn sub(&self, other: &Decimal) -> Decimal {
        let (a, b, e) = self.aligned(other);
        Decimal::new(a - b, e)
    }

    pub fn mul(&self, other: &Decimal) -> Decimal {
        Decimal::new(&self.coef * &other.coef, self.exp + other.exp)
    }

    pub fn mul_int(&self, k: &BigInt) -> Decimal {
        Decimal::new(&self.coef * k, self.exp)
    }

    pub fn neg(&self) -> Decimal {
        Decimal { coef: -&self.coef, exp: self.exp }
    }

    /// True iff `self = k × q` for some integer `k`. `q` must be nonzero.
    pub fn is_multiple_of(&self, q: &Decimal) -> bool {
        debug_assert!(!q.is_zero());
        let (a, b, _) = self.aligned(q);
        (a % b).is_zero()
    }

    /// `self / q` as an exact ratio of integers `(num, den)` with `den > 0`.
    pub fn ratio(&self, q: &Decimal) -> (BigInt, BigInt) {
        let (a, b, _) = self.aligned(q);
        if b.is_negative() {
            (-a, -b)
        } else {
            (a, b)
        }
    }

    /// Smallest integer `k` with `k × q ≥ self`, for `q > 0`.
    pub fn ceil_div(&self, q: &Decimal) -> BigInt {
        let (a, b) = self.ratio(q);
        a.div_ceil(&b)
    }

    /// Largest integer `k` with `k × q ≤ self`, for `q > 0`.
    pub fn floor_div(&self, q: &Decimal) -> BigInt {
        let (a, b) = self.ratio(q);
        a.div_floor(&b)
    }

    /// Least common multiple of two positive decimals.
    pub fn lcm(&self, other: &Decimal) -> Decimal {
        let (a, b, e) = self.abs().aligned(&other.abs());
        Decimal::new(a.lcm(&b), e)
    }

    /// Largest power of ten `10^k` with `10^k ≤ num/den`; both positive.
    pub fn pow10_floor(num: &BigInt, den: &BigInt) -> Decimal {
        debug_assert!(num.is_positive() && den.is_positive());
        let digits = |v: &BigInt| v.to_string().trim_start_matches('-').len() as i64;
        let mut k = digits(num) - digits(den);
        let le = |k: i64| -> bool {
            // 10^k * den <= num
            if k >= 0 {
                den * pow10(k as u64) <= *num
            } else {
                den <= &(num * pow10((-k) as u64))
            }
        };
        while !le(k) {
            k -= 1;
        }
        while le(k + 1) {
            k += 1;
        }
        Decimal::new(BigInt::one(), k)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_string().parse().unwrap_or(f64::NAN)
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.exp < 0 || self.exp > 18 {
            return if self.is_zero() { Some(0) } else { None };
        }
        (&self.coef * pow10(self.exp as u64)).to_i64()
    }

    /// Non-negative integral value as `u64`, if representable.
    pub fn to_u64(&self) -> Option<u64> {
        if self.is_negative() {
            return None;
        }
        self.to_i64().and_then(|v| u64::try_from(v).ok())
    }

    fn plain(&self) -> String {
        let neg = self.coef.sign() == Sign::Minus;
        let digits = self.coef.abs().to_string();
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        if self.exp >= 0 {
            out.push_str(&digits);
            out.extend(std::iter::repeat_n('0', self.exp as usize));
        } else {
            let frac = (-self.exp) as usize;
            if digits.len() > frac {
                let (i, f) = digits.split_at(digits.len() - frac);
                out.push_str(i);
                out.push('.');
                out.push_str(f);
            } else {
                out.push_str("0.");
                out.extend(std::iter::repeat_n('0', frac - digits.len()));
                out.push_str(&digits);
            }
        }
        out
    }

    fn scientific(&self) -> String {
        let neg = self.coef.sign() == Sign::Minus;
        let digits = self.coef.abs().to_string();
        let e = self.exp + digits.len() as i64 - 1;
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&e.to_string());
        out
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.coef.sign(), other.coef.sign());
        if sa != sb {
            return sa.cmp(&sb);
        }
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Decimal {
    /// Plain notation for adjusted exponents in `(-7, 21)`, scientific
    /// otherwise; the same split as ECMAScript number formatting.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.coef.abs().to_string().len() as i64;
        let adjusted = self.exp + digits - 1;
        if self.is_zero() || (-7 < adjusted && adjusted < 21) {
            f.write_str(&self.plain())
        } else {
            f.write_str(&self.scientific())
        }
    }
}

impl fmt::Debug for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Decimal {
    type Err = DecimalParseError;

    /// Accepts the JSON number grammar.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || DecimalParseError(s.to_string());
        let b = s.as_bytes();
        let mut i = 0;
        let neg = b.first() == Some(&b'-');
        if neg {
            i += 1;
        }
        let int_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        let int_part = &s[int_start..i];
        if int_part.is_empty() || (int_part.len() > 1 && int_part.starts_with('0')) {
            return Err(err());
        }
        let mut frac_part = "";
        if i < b.len() && b[i] == b'.' {
            i += 1;
            let fs = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            frac_part = &s[fs..i];
            if frac_part.is_empty() {
                return Err(err());
            }
        }
        let mut exp: i64 = 0;
        if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
            i += 1;
            let es = i;
            if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
                i += 1;
            }
            let ds = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if ds == i {
                return Err(err());
            }
            exp = s[es..i].parse::<i64>().map_err(|_| err())?;
        }
        if i != b.len() {
            return Err(err());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut coef: BigInt = digits.parse().map_err(|_| err())?;
        if neg {
            coef = -coef;
        }
        let exp = exp - frac_part.len() as i64;
        let d = Decimal::new(coef, exp);
        if d.exp.abs() > MAX_EXPONENT {
            return Err(err());
        }
        Ok(d)
    }
}

/// A decimal extended with the two infinities.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ExtDecimal {
    NegInf,
    Finite(Decimal),
    PosInf,
}

impl ExtDecimal {
    pub fn finite(&self) -> Option<&Decimal> {
        match self {
            ExtDecimal::Finite(d) => Some(d),
            _ => None,
        }
    }
}

impl Ord for ExtDecimal {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtDecimal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for ExtDecimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtDecimal::NegInf => f.write_str("-inf"),
            ExtDecimal::PosInf => f.write_str("inf"),
            ExtDecimal::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn parse_normalizes() {
        assert_eq!(d("1.0"), d("1"));
        assert_eq!(d("100"), d("1e2"));
        assert_eq!(d("-0"), d("0"));
        assert_eq!(d("0.50"), d("5e-1"));
        assert!("01".parse::<Decimal>().is_err());
        assert!("1.".parse::<Decimal>().is_err());
        assert!(".5".parse::<Decimal>().is_err());
        assert!("1e".parse::<Decimal>().is_err());
    }

    #[test]
    fn display_is_shortest() {
        assert_eq!(d("1.0").to_string(), "1");
        assert_eq!(d("2.5").to_string(), "2.5");
        assert_eq!(d("-0.001").to_string(), "-0.001");
        assert_eq!(d("100").to_string(), "100");
        assert_eq!(d("1e400").to_string(), "1e400");
        assert_eq!(d("1.5e-30").to_string(), "1.5e-30");
        assert_eq!(d("12000000").to_string(), "12000000");
        assert_eq!(d("1e21").to_string(), "1e21");
        assert_eq!(d("1e-7").to_string(), "1e-7");
    }

    #[test]
    fn multiples_and_lcm() {
        assert!(d("5").is_multiple_of(&d("2.5")));
        assert!(!d("5").is_multiple_of(&d("2")));
        assert!(d("0").is_multiple_of(&d("0.3")));
        assert!(d("0.9").is_multiple_of(&d("0.3")));
        assert_eq!(d("4").lcm(&d("6")), d("12"));
        assert_eq!(d("0.5").lcm(&d("0.2")), d("1"));
        assert_eq!(d("7").ceil_div(&d("2")), BigInt::from(4));
        assert_eq!(d("-7").floor_div(&d("2")), BigInt::from(-4));
    }

    #[test]
    fn ordering_and_arith() {
        assert!(d("0.1") < d("0.11"));
        assert!(d("-2") < d("-1.5"));
        assert_eq!(d("0.1").add(&d("0.2")), d("0.3"));
        assert_eq!(d("1.5").mul(&d("2")), d("3"));
        assert!(ExtDecimal::NegInf < ExtDecimal::Finite(d("-1e50")));
        assert!(ExtDecimal::Finite(d("1e50")) < ExtDecimal::PosInf);
    }

    #[test]
    fn pow10_floor_bounds() {
        let p = Decimal::pow10_floor(&BigInt::from(7), &BigInt::from(3));
        assert_eq!(p, d("1"));
        let p = Decimal::pow10_floor(&BigInt::from(1), &BigInt::from(300));
        assert_eq!(p, d("0.001"));
        let p = Decimal::pow10_floor(&BigInt::from(1000), &BigInt::from(1));
        assert_eq!(p, d("1000"));
    }
}
