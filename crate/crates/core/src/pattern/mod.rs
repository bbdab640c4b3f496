//! Externally extended regular expressions: parsing, compilation to DFAs,
//! emptiness and word enumeration.

mod ast;
mod charset;
mod dfa;
mod parse;

pub use ast::{complement, exact, intersect, union_of_bases, Eere, Re};
pub use charset::CharSet;
pub use dfa::{compile, compile_re, DState, Dfa, Enumeration, DEFAULT_MAX_STATES};
pub use parse::{digit_class, dot_class, parse_re, space_class, word_class};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("unsupported pattern `{pattern}`: {reason}")]
    Unsupported { pattern: String, reason: String },
    #[error("invalid pattern `{pattern}`: {reason}")]
    Invalid { pattern: String, reason: String },
    #[error("automaton exceeds the budget of {limit} states")]
    TooLarge { limit: usize },
}

/// How a source pattern relates to the strings it accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchoring {
    /// The whole string must match.
    Anchored,
    /// Some substring must match, as in JSON Schema `pattern`.
    Unanchored,
}

/// Parses an ECMA-262 pattern. Under `Unanchored` the language is
/// `Σ*·L·Σ*`, with a leading `^` or trailing `$` absorbing the padding.
pub fn parse_pattern(src: &str, anchoring: Anchoring) -> Result<Eere, PatternError> {
    let re = parse_re(src)?;
    Ok(Eere::base(match anchoring {
        Anchoring::Anchored => re,
        Anchoring::Unanchored => search_form(re),
    }))
}

fn search_form(re: Re) -> Re {
    let mut parts = match re {
        Re::Concat(v) => v,
        other => vec![other],
    };
    let anchored_start = parts.first() == Some(&Re::Start);
    let anchored_end = parts.last() == Some(&Re::End) && !(parts.len() == 1 && anchored_start);
    if anchored_start {
        parts.remove(0);
    } else {
        parts.insert(0, Re::any_string());
    }
    if anchored_end {
        parts.pop();
    } else {
        parts.push(Re::any_string());
    }
    Re::concat(parts)
}

pub fn is_empty(d: &Dfa) -> bool {
    d.is_empty()
}

pub fn enumerate(d: &Dfa, i: usize) -> Enumeration {
    d.enumerate(i)
}

pub fn has_at_least(d: &Dfa, n: u64) -> bool {
    d.has_at_least(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(src: &str, a: Anchoring) -> Dfa {
        compile(&parse_pattern(src, a).unwrap(), DEFAULT_MAX_STATES).unwrap()
    }

    fn anchored(src: &str) -> Eere {
        parse_pattern(src, Anchoring::Anchored).unwrap()
    }

    #[test]
    fn unanchored_search_semantics() {
        let d = c("z$", Anchoring::Unanchored);
        assert!(d.accepts("abz") && d.accepts("z"));
        assert!(!d.accepts("za") && !d.accepts(""));
        let d = c("^a$", Anchoring::Unanchored);
        assert!(d.accepts("a") && !d.accepts("aa") && !d.accepts(""));
        let d = c("^a", Anchoring::Unanchored);
        assert!(d.accepts("abc") && !d.accepts("ba"));
        let d = c("b", Anchoring::Unanchored);
        assert!(d.accepts("abc") && !d.accepts("ac"));
        let d = c("^a|b$", Anchoring::Unanchored);
        assert!(d.accepts("ax") && d.accepts("xb") && !d.accepts("xa") && !d.accepts("bx"));
        let d = c("a^b", Anchoring::Unanchored);
        assert!(d.is_empty());
    }

    #[test]
    fn lookahead_rejected() {
        assert!(matches!(parse_pattern("a(?=b)", Anchoring::Unanchored), Err(PatternError::Unsupported { .. })));
    }

    #[test]
    fn exact_escapes_metacharacters() {
        for k in ["a", "a.b", "", "(x)*", "\\"] {
            let d = compile(&exact(k), DEFAULT_MAX_STATES).unwrap();
            assert!(d.accepts(k));
            assert_eq!(d.enumerate(2), Enumeration::Impossible);
        }
        let d = compile(&exact("a.b"), DEFAULT_MAX_STATES).unwrap();
        assert!(!d.accepts("axb"));
    }

    #[test]
    fn complement_and_intersection() {
        let a = anchored("a");
        let top = Eere::top();
        let d = compile(&intersect(&a, &top), DEFAULT_MAX_STATES).unwrap();
        assert!(d.accepts("a") && !d.accepts("b"));
        let d = compile(&Eere::Intersect(a.clone().into(), complement(&a).into()), DEFAULT_MAX_STATES).unwrap();
        assert!(d.is_empty());
        let d = compile(&intersect(&a, &anchored("a.*")), DEFAULT_MAX_STATES).unwrap();
        assert_eq!(d.enumerate(2), Enumeration::Impossible);
        assert!(d.accepts("a"));
        let d = compile(&intersect(&complement(&anchored("b")), &complement(&anchored("a.*"))), DEFAULT_MAX_STATES)
            .unwrap();
        assert!(!d.accepts("abz") && !d.accepts("b") && d.accepts("c"));
        let ra = intersect(&intersect(&complement(&anchored("b")), &a), &complement(&anchored("a.*")));
        assert!(compile(&ra, DEFAULT_MAX_STATES).unwrap().is_empty());
        assert!(!compile(&a, DEFAULT_MAX_STATES).unwrap().is_empty());
        assert!(!compile(&complement(&Eere::bottom()), DEFAULT_MAX_STATES).unwrap().is_empty());
    }

    #[test]
    fn enumeration_examples() {
        let d = c("a|b", Anchoring::Anchored);
        assert_eq!(d.enumerate(2), Enumeration::Words(vec!["a".into(), "b".into()]));
        assert!(d.accepts("a") && d.accepts("b") && !d.accepts("c") && !d.accepts(""));
        let d = c("a", Anchoring::Anchored);
        assert_eq!(d.enumerate(2), Enumeration::Impossible);
        let d = c("a.+", Anchoring::Anchored);
        let Enumeration::Words(ws) = d.enumerate(3) else { panic!() };
        assert_eq!(ws.len(), 3);
        for w in &ws {
            assert!(w.starts_with('a') && w.chars().count() >= 2 && d.accepts(w));
        }
        let top = compile(&Eere::top(), DEFAULT_MAX_STATES).unwrap();
        assert_eq!(top.first_word().as_deref(), Some(""));
    }

    #[test]
    fn counting_examples() {
        let a = c("a", Anchoring::Anchored);
        assert!(a.has_at_least(1) && !a.has_at_least(2));
        assert!(c("a|b", Anchoring::Anchored).has_at_least(2));
        assert!(c(".*", Anchoring::Anchored).has_at_least(1000));
        assert!(c("[a-c]{2}", Anchoring::Anchored).has_at_least(9));
        assert!(!c("[a-c]{2}", Anchoring::Anchored).has_at_least(10));
    }

    #[test]
    fn budget_is_enforced() {
        let e = parse_pattern("(a|b)*a(a|b){12}", Anchoring::Anchored).unwrap();
        assert!(matches!(compile(&e, 1000), Err(PatternError::TooLarge { limit: 1000 })));
        assert!(compile(&e, DEFAULT_MAX_STATES).is_ok());
    }

    #[test]
    fn minimize_preserves_language() {
        let d = c("(ab|ab)*|a(ba)*b", Anchoring::Anchored);
        let m = d.minimize();
        assert!(m.num_states() <= d.num_states());
        for w in ["", "ab", "abab", "a", "aba", "abb"] {
            assert_eq!(d.accepts(w), m.accepts(w), "{w}");
        }
    }
}
