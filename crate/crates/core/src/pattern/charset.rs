//! Sets of Unicode scalar values as sorted, disjoint, non-adjacent ranges.

use std::fmt;

pub const MAX_CHAR: u32 = 0x10FFFF;
pub const SURROGATE_LO: u32 = 0xD800;
pub const SURROGATE_HI: u32 = 0xDFFF;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CharSet {
    ranges: Vec<(u32, u32)>,
}

impl CharSet {
    pub fn empty() -> Self {
        CharSet { ranges: Vec::new() }
    }

    /// Every Unicode scalar value.
    pub fn all() -> Self {
        CharSet { ranges: vec![(0, SURROGATE_LO - 1), (SURROGATE_HI + 1, MAX_CHAR)] }
    }

    pub fn single(c: u32) -> Self {
        CharSet::range(c, c)
    }

    /// The range clipped to scalar values.
    pub fn range(lo: u32, hi: u32) -> Self {
        let mut s = CharSet::empty();
        if lo <= hi {
            s.ranges.push((lo, hi.min(MAX_CHAR)));
        }
        s.intersect(&CharSet::all())
    }

    pub fn from_ranges(ranges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut acc = CharSet::empty();
        for (lo, hi) in ranges {
            acc = acc.union(&CharSet::range(lo, hi));
        }
        acc
    }

    pub fn ranges(&self) -> &[(u32, u32)] {
        &self.ranges
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn contains(&self, c: u32) -> bool {
        match self.ranges.binary_search_by(|&(lo, _)| lo.cmp(&c)) {
            Ok(_) => true,
            Err(0) => false,
            Err(i) => self.ranges[i - 1].1 >= c,
        }
    }

    pub fn len(&self) -> u64 {
        self.ranges.iter().map(|&(lo, hi)| (hi - lo) as u64 + 1).sum()
    }

    fn normalized(mut v: Vec<(u32, u32)>) -> Self {
        v.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            if let Some(last) = out.last_mut() {
                if lo <= last.1.saturating_add(1) {
                    last.1 = last.1.max(hi);
                    continue;
                }
            }
            out.push((lo, hi));
        }
        CharSet { ranges: out }
    }

    pub fn union(&self, other: &CharSet) -> CharSet {
        let mut v = self.ranges.clone();
        v.extend_from_slice(&other.ranges);
        CharSet::normalized(v)
    }

    pub fn intersect(&self, other: &CharSet) -> CharSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.ranges.len() && j < other.ranges.len() {
            let (a0, a1) = self.ranges[i];
            let (b0, b1) = other.ranges[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        CharSet { ranges: out }
    }

    /// Complement within the scalar values.
    pub fn complement(&self) -> CharSet {
        let mut out = Vec::new();
        let mut next = 0u32;
        for &(lo, hi) in &self.ranges {
            if lo > next {
                out.push((next, lo - 1));
            }
            next = hi + 1;
        }
        if next <= MAX_CHAR {
            out.push((next, MAX_CHAR));
        }
        CharSet { ranges: out }.intersect(&CharSet::all())
    }

    pub fn is_all(&self) -> bool {
        *self == CharSet::all()
    }

    pub fn first(&self) -> Option<u32> {
        self.ranges.first().map(|r| r.0)
    }
}

fn fmt_char(f: &mut fmt::Formatter<'_>, c: u32) -> fmt::Result {
    match char::from_u32(c) {
        Some(ch) if ch.is_ascii_alphanumeric() || ch == '_' || ch == ' ' => write!(f, "{ch}"),
        Some(ch) if ch.is_ascii_punctuation() => write!(f, "\\{ch}"),
        _ if c <= 0xFFFF => write!(f, "\\u{c:04X}"),
        _ => write!(f, "\\u{{{c:X}}}"),
    }
}

impl fmt::Display for CharSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_all() {
            return f.write_str("[\\s\\S]");
        }
        if self.ranges.len() == 1 && self.ranges[0].0 == self.ranges[0].1 {
            return fmt_char(f, self.ranges[0].0);
        }
        f.write_str("[")?;
        for &(lo, hi) in &self.ranges {
            fmt_char(f, lo)?;
            if hi > lo {
                f.write_str("-")?;
                fmt_char(f, hi)?;
            }
        }
        f.write_str("]")
    }
}

impl fmt::Debug for CharSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
