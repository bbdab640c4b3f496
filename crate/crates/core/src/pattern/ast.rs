//! Standard regular expressions over code point classes, and the external
//! complement/intersection layer on top of them.

use std::fmt;
use std::sync::Arc;

use super::charset::CharSet;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Re {
    /// Matches nothing.
    Empty,
    Eps,
    Class(CharSet),
    Concat(Vec<Re>),
    Alt(Vec<Re>),
    Repeat {
        inner: Box<Re>,
        min: u32,
        max: Option<u32>,
    },
    /// `^`: holds only before the first character.
    Start,
    /// `$`: holds only after the last character.
    End,
}

impl Re {
    pub fn literal(s: &str) -> Re {
        let parts: Vec<Re> = s.chars().map(|c| Re::Class(CharSet::single(c as u32))).collect();
        Re::concat(parts)
    }

    pub fn any_string() -> Re {
        Re::star(Re::Class(CharSet::all()))
    }

    pub fn star(inner: Re) -> Re {
        Re::Repeat { inner: Box::new(inner), min: 0, max: None }
    }

    pub fn concat(mut parts: Vec<Re>) -> Re {
        parts.retain(|p| *p != Re::Eps);
        if parts.contains(&Re::Empty) {
            return Re::Empty;
        }
        match parts.len() {
            0 => Re::Eps,
            1 => parts.pop().unwrap(),
            _ => Re::Concat(parts),
        }
    }

    pub fn alt(mut parts: Vec<Re>) -> Re {
        parts.retain(|p| *p != Re::Empty);
        match parts.len() {
            0 => Re::Empty,
            1 => parts.pop().unwrap(),
            _ => Re::Alt(parts),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Re::Concat(v) | Re::Alt(v) => 1 + v.iter().map(Re::size).sum::<usize>(),
            Re::Repeat { inner, .. } => 1 + inner.size(),
            _ => 1,
        }
    }

    /// Syntax accepted by the `regex` crate with the same matching semantics.
    pub fn to_regex_syntax(&self) -> String {
        let mut out = String::new();
        self.write_regex(&mut out);
        out
    }

    fn write_regex(&self, out: &mut String) {
        match self {
            Re::Empty => out.push_str("[^\\x{0}-\\x{10FFFF}]"),
            Re::Eps => out.push_str("(?:)"),
            Re::Class(cs) => {
                if cs.is_empty() {
                    out.push_str("[^\\x{0}-\\x{10FFFF}]");
                    return;
                }
                out.push('[');
                for &(lo, hi) in cs.ranges() {
                    out.push_str(&format!("\\x{{{lo:X}}}"));
                    if hi > lo {
                        out.push_str(&format!("-\\x{{{hi:X}}}"));
                    }
                }
                out.push(']');
            }
            Re::Concat(v) => {
                for p in v {
                    out.push_str("(?:");
                    p.write_regex(out);
                    out.push(')');
                }
            }
            Re::Alt(v) => {
                out.push_str("(?:");
                for (i, p) in v.iter().enumerate() {
                    if i > 0 {
                        out.push('|');
                    }
                    p.write_regex(out);
                }
                out.push(')');
            }
            Re::Repeat { inner, min, max } => {
                out.push_str("(?:");
                inner.write_regex(out);
                out.push(')');
                match max {
                    None => out.push_str(&format!("{{{min},}}")),
                    Some(m) => out.push_str(&format!("{{{min},{m}}}")),
                }
            }
            Re::Start => out.push('^'),
            Re::End => out.push('$'),
        }
    }
}

impl fmt::Display for Re {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Re::Empty => f.write_str("[]"),
            Re::Eps => f.write_str("()"),
            Re::Class(cs) => write!(f, "{cs}"),
            Re::Concat(v) => {
                for p in v {
                    if matches!(p, Re::Alt(_)) {
                        write!(f, "({p})")?;
                    } else {
                        write!(f, "{p}")?;
                    }
                }
                Ok(())
            }
            Re::Alt(v) => {
                for (i, p) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            Re::Repeat { inner, min, max } => {
                match inner.as_ref() {
                    Re::Class(_) => write!(f, "{inner}")?,
                    _ => write!(f, "({inner})")?,
                }
                match (min, max) {
                    (0, None) => f.write_str("*"),
                    (1, None) => f.write_str("+"),
                    (0, Some(1)) => f.write_str("?"),
                    (m, None) => write!(f, "{{{m},}}"),
                    (m, Some(n)) if m == n => write!(f, "{{{m}}}"),
                    (m, Some(n)) => write!(f, "{{{m},{n}}}"),
                }
            }
            Re::Start => f.write_str("^"),
            Re::End => f.write_str("$"),
        }
    }
}

impl fmt::Debug for Re {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A regular expression with external complement and intersection.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Eere {
    Base(Arc<Re>),
    Complement(Arc<Eere>),
    Intersect(Arc<Eere>, Arc<Eere>),
}

impl Eere {
    pub fn base(re: Re) -> Eere {
        Eere::Base(Arc::new(re))
    }

    /// The pattern matching every string.
    pub fn top() -> Eere {
        Eere::base(Re::any_string())
    }

    /// The pattern matching no string.
    pub fn bottom() -> Eere {
        Eere::base(Re::Empty)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Eere::Base(re) if **re == Re::any_string())
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Eere::Base(re) if **re == Re::Empty)
    }

    pub fn base_re(&self) -> Option<&Re> {
        match self {
            Eere::Base(re) => Some(re),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Eere::Base(re) => re.size(),
            Eere::Complement(e) => 1 + e.size(),
            Eere::Intersect(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// Pattern whose language is exactly `{k}`.
pub fn exact(k: &str) -> Eere {
    Eere::base(Re::literal(k))
}

pub fn complement(r: &Eere) -> Eere {
    match r {
        Eere::Complement(inner) => (**inner).clone(),
        _ if r.is_top() => Eere::bottom(),
        _ if r.is_bottom() => Eere::top(),
        _ => Eere::Complement(Arc::new(r.clone())),
    }
}

pub fn intersect(a: &Eere, b: &Eere) -> Eere {
    if a.is_top() || a == b {
        return b.clone();
    }
    if b.is_top() {
        return a.clone();
    }
    if a.is_bottom() || b.is_bottom() {
        return Eere::bottom();
    }
    Eere::Intersect(Arc::new(a.clone()), Arc::new(b.clone()))
}

/// Union of base patterns, as a single base pattern.
pub fn union_of_bases(parts: &[Eere]) -> Option<Eere> {
    let mut res = Vec::with_capacity(parts.len());
    for p in parts {
        res.push(p.base_re()?.clone());
    }
    Some(Eere::base(Re::alt(res)))
}

impl fmt::Display for Eere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eere::Base(re) => write!(f, "{re}"),
            Eere::Complement(e) => write!(f, "¬({e})"),
            Eere::Intersect(a, b) => write!(f, "({a})∧({b})"),
        }
    }
}

impl fmt::Debug for Eere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
