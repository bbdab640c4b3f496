//! Parser for the supported subset of ECMA-262 pattern syntax.

use super::ast::Re;
use super::charset::CharSet;
use super::PatternError;

/// Largest accepted `{m,n}` bound.
pub const MAX_REPEAT: u32 = 100_000;

pub fn parse_re(src: &str) -> Result<Re, PatternError> {
    let chars: Vec<char> = src.chars().collect();
    let mut p = ReParser { src, chars, pos: 0 };
    let re = p.alternation()?;
    if p.pos < p.chars.len() {
        return Err(p.invalid("unmatched `)`"));
    }
    Ok(re)
}

pub fn dot_class() -> CharSet {
    CharSet::from_ranges([(0x0A, 0x0A), (0x0D, 0x0D), (0x2028, 0x2029)]).complement()
}

pub fn digit_class() -> CharSet {
    CharSet::range('0' as u32, '9' as u32)
}

pub fn word_class() -> CharSet {
    CharSet::from_ranges([
        ('a' as u32, 'z' as u32),
        ('A' as u32, 'Z' as u32),
        ('0' as u32, '9' as u32),
        ('_' as u32, '_' as u32),
    ])
}

pub fn space_class() -> CharSet {
    CharSet::from_ranges([
        (0x09, 0x0D),
        (0x20, 0x20),
        (0xA0, 0xA0),
        (0x1680, 0x1680),
        (0x2000, 0x200A),
        (0x2028, 0x2029),
        (0x202F, 0x202F),
        (0x205F, 0x205F),
        (0x3000, 0x3000),
        (0xFEFF, 0xFEFF),
    ])
}

struct ReParser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

enum ClassAtom {
    Char(u32),
    Set(CharSet),
}

impl ReParser<'_> {
    fn unsupported(&self, reason: &str) -> PatternError {
        PatternError::Unsupported { pattern: self.src.to_string(), reason: reason.to_string() }
    }

    fn invalid(&self, reason: &str) -> PatternError {
        PatternError::Invalid { pattern: self.src.to_string(), reason: reason.to_string() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn alternation(&mut self) -> Result<Re, PatternError> {
        let mut alts = vec![self.concatenation()?];
        while self.eat('|') {
            alts.push(self.concatenation()?);
        }
        Ok(if alts.len() == 1 { alts.pop().unwrap() } else { Re::Alt(alts) })
    }

    fn concatenation(&mut self) -> Result<Re, PatternError> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            let atom = self.atom()?;
            let atom = self.quantified(atom)?;
            parts.push(atom);
        }
        Ok(match parts.len() {
            0 => Re::Eps,
            1 => parts.pop().unwrap(),
            _ => Re::Concat(parts),
        })
    }

    /// Parses `{m}`, `{m,}` or `{m,n}` at the cursor without consuming on failure.
    fn brace_quantifier(&mut self) -> Result<Option<(u32, Option<u32>)>, PatternError> {
        if self.peek() != Some('{') {
            return Ok(None);
        }
        let save = self.pos;
        self.pos += 1;
        let min = self.digits();
        let Some(min) = min else {
            self.pos = save;
            return Ok(None);
        };
        let max = if self.eat(',') {
            if self.peek() == Some('}') {
                None
            } else {
                match self.digits() {
                    Some(m) => Some(m),
                    None => {
                        self.pos = save;
                        return Ok(None);
                    }
                }
            }
        } else {
            Some(min)
        };
        if !self.eat('}') {
            self.pos = save;
            return Ok(None);
        }
        if min > MAX_REPEAT || max.is_some_and(|m| m > MAX_REPEAT) {
            return Err(self.unsupported("repetition bound too large"));
        }
        if let Some(m) = max {
            if m < min {
                return Err(self.invalid("numbers out of order in {} quantifier"));
            }
        }
        Ok(Some((min, max)))
    }

    fn digits(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Some(s.parse::<u64>().map_or(u32::MAX, |v| v.min(u32::MAX as u64) as u32))
    }

    fn quantified(&mut self, atom: Re) -> Result<Re, PatternError> {
        let (min, max) = match self.peek() {
            Some('*') => {
                self.pos += 1;
                (0, None)
            }
            Some('+') => {
                self.pos += 1;
                (1, None)
            }
            Some('?') => {
                self.pos += 1;
                (0, Some(1))
            }
            Some('{') => match self.brace_quantifier()? {
                Some(q) => q,
                None => return Ok(atom),
            },
            _ => return Ok(atom),
        };
        self.eat('?');
        if matches!(self.peek(), Some('*' | '+' | '?')) || self.brace_at_cursor() {
            return Err(self.invalid("nothing to repeat"));
        }
        Ok(Re::Repeat { inner: Box::new(atom), min, max })
    }

    fn brace_at_cursor(&mut self) -> bool {
        let save = self.pos;
        let r = matches!(self.brace_quantifier(), Ok(Some(_)));
        self.pos = save;
        r
    }

    fn atom(&mut self) -> Result<Re, PatternError> {
        let c = self.peek().expect("caller checked");
        match c {
            '(' => self.group(),
            '[' => {
                self.pos += 1;
                Ok(Re::Class(self.class()?))
            }
            '.' => {
                self.pos += 1;
                Ok(Re::Class(dot_class()))
            }
            '^' => {
                self.pos += 1;
                Ok(Re::Start)
            }
            '$' => {
                self.pos += 1;
                Ok(Re::End)
            }
            '\\' => {
                self.pos += 1;
                match self.escape(false)? {
                    ClassAtom::Char(c) => Ok(Re::Class(CharSet::single(c))),
                    ClassAtom::Set(s) => Ok(Re::Class(s)),
                }
            }
            '*' | '+' | '?' => Err(self.invalid("nothing to repeat")),
            '{' if self.brace_at_cursor() => Err(self.invalid("nothing to repeat")),
            _ => {
                self.pos += 1;
                Ok(Re::Class(CharSet::single(c as u32)))
            }
        }
    }

    fn group(&mut self) -> Result<Re, PatternError> {
        self.pos += 1;
        if self.eat('?') {
            match (self.peek(), self.peek_at(1)) {
                (Some(':'), _) => self.pos += 1,
                (Some('='), _) | (Some('!'), _) => return Err(self.unsupported("look-ahead")),
                (Some('<'), Some('=')) | (Some('<'), Some('!')) => return Err(self.unsupported("look-behind")),
                (Some('<'), _) => {
                    self.pos += 1;
                    while let Some(c) = self.peek() {
                        self.pos += 1;
                        if c == '>' {
                            break;
                        }
                    }
                }
                _ => return Err(self.unsupported("inline flags or group modifiers")),
            }
        }
        let inner = self.alternation()?;
        if !self.eat(')') {
            return Err(self.invalid("missing `)`"));
        }
        Ok(inner)
    }

    fn hex(&mut self, n: usize) -> Option<u32> {
        let s: String = self.chars.get(self.pos..self.pos + n)?.iter().collect();
        let v = u32::from_str_radix(&s, 16).ok()?;
        if s.chars().all(|c| c.is_ascii_hexdigit()) {
            self.pos += n;
            Some(v)
        } else {
            None
        }
    }

    /// Parses the escape after a consumed backslash.
    fn escape(&mut self, in_class: bool) -> Result<ClassAtom, PatternError> {
        let Some(c) = self.peek() else {
            return Err(self.invalid("trailing backslash"));
        };
        self.pos += 1;
        let atom = match c {
            'd' => ClassAtom::Set(digit_class()),
            'D' => ClassAtom::Set(digit_class().complement()),
            'w' => ClassAtom::Set(word_class()),
            'W' => ClassAtom::Set(word_class().complement()),
            's' => ClassAtom::Set(space_class()),
            'S' => ClassAtom::Set(space_class().complement()),
            't' => ClassAtom::Char(0x09),
            'n' => ClassAtom::Char(0x0A),
            'v' => ClassAtom::Char(0x0B),
            'f' => ClassAtom::Char(0x0C),
            'r' => ClassAtom::Char(0x0D),
            'b' if in_class => ClassAtom::Char(0x08),
            'b' | 'B' => return Err(self.unsupported("word-boundary assertion")),
            '0' if !self.peek().is_some_and(|d| d.is_ascii_digit()) => ClassAtom::Char(0),
            '1'..='9' => return Err(self.unsupported("backreference")),
            'k' if self.peek() == Some('<') => return Err(self.unsupported("backreference")),
            'p' | 'P' if self.peek() == Some('{') => return Err(self.unsupported("Unicode property escape")),
            'c' => match self.peek() {
                Some(l) if l.is_ascii_alphabetic() => {
                    self.pos += 1;
                    ClassAtom::Char((l as u32) % 32)
                }
                _ => ClassAtom::Char('\\' as u32).also_back(self),
            },
            'x' => match self.hex(2) {
                Some(v) => ClassAtom::Char(v),
                None => ClassAtom::Char('x' as u32),
            },
            'u' => {
                if self.peek() == Some('{') {
                    let save = self.pos;
                    self.pos += 1;
                    let start = self.pos;
                    while self.peek().is_some_and(|c| c.is_ascii_hexdigit()) {
                        self.pos += 1;
                    }
                    let s: String = self.chars[start..self.pos].iter().collect();
                    match (self.eat('}'), u32::from_str_radix(&s, 16)) {
                        (true, Ok(v)) if v <= 0x10FFFF => ClassAtom::Char(v),
                        _ => {
                            self.pos = save;
                            ClassAtom::Char('u' as u32)
                        }
                    }
                } else {
                    match self.hex(4) {
                        Some(hi) if (0xD800..0xDC00).contains(&hi) => {
                            let save = self.pos;
                            if self.eat('\\') && self.eat('u') {
                                match self.hex(4) {
                                    Some(lo) if (0xDC00..0xE000).contains(&lo) => {
                                        ClassAtom::Char(0x10000 + ((hi - 0xD800) << 10) + (lo - 0xDC00))
                                    }
                                    _ => {
                                        self.pos = save;
                                        ClassAtom::Char(hi)
                                    }
                                }
                            } else {
                                self.pos = save;
                                ClassAtom::Char(hi)
                            }
                        }
                        Some(v) => ClassAtom::Char(v),
                        None => ClassAtom::Char('u' as u32),
                    }
                }
            }
            other => ClassAtom::Char(other as u32),
        };
        Ok(atom)
    }

    /// Parses a class body after the consumed `[`.
    fn class(&mut self) -> Result<CharSet, PatternError> {
        let negated = self.eat('^');
        let mut set = CharSet::empty();
        loop {
            let Some(c) = self.peek() else {
                return Err(self.invalid("missing `]`"));
            };
            if c == ']' {
                self.pos += 1;
                break;
            }
            let lo = self.class_atom()?;
            if self.peek() == Some('-') && self.peek_at(1).is_some_and(|n| n != ']') {
                self.pos += 1;
                let hi = self.class_atom()?;
                match (lo, hi) {
                    (ClassAtom::Char(a), ClassAtom::Char(b)) => {
                        if a > b {
                            return Err(self.invalid("range out of order in character class"));
                        }
                        set = set.union(&CharSet::range(a, b));
                    }
                    (a, b) => {
                        for x in [a, b] {
                            set = set.union(&x.into_set());
                        }
                        set = set.union(&CharSet::single('-' as u32));
                    }
                }
            } else {
                set = set.union(&lo.into_set());
            }
        }
        Ok(if negated { set.complement() } else { set })
    }

    fn class_atom(&mut self) -> Result<ClassAtom, PatternError> {
        let c = self.peek().ok_or_else(|| self.invalid("missing `]`"))?;
        self.pos += 1;
        if c == '\\' {
            if self.peek() == Some('-') {
                self.pos += 1;
                return Ok(ClassAtom::Char('-' as u32));
            }
            self.escape(true)
        } else {
            Ok(ClassAtom::Char(c as u32))
        }
    }
}

impl ClassAtom {
    fn into_set(self) -> CharSet {
        match self {
            ClassAtom::Char(c) => CharSet::single(c),
            ClassAtom::Set(s) => s,
        }
    }

    /// `\c` without a letter is a literal backslash followed by `c`.
    fn also_back(self, p: &mut ReParser<'_>) -> ClassAtom {
        p.pos -= 1;
        self
    }
}
