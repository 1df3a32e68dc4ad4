//! Element text format: `c1 * e1.e2 + c2 * @v + c3 * a.~b`.
//!
//! Each term is `COEFF * WORD`; a term without `*` has coefficient one.
//! Words are dot-separated letters: `@v` (trivial path), `e` (edge) or
//! `~e` (ghost edge). Coefficients are tower expressions and are printed
//! in parentheses unless they are a single token.

use crate::error::{Error, Result};
use crate::tower::{Tower, TowerElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Letter {
    Vertex(String),
    Edge(String),
    Ghost(String),
}

#[derive(Debug, Clone)]
pub struct Term {
    pub coeff: TowerElement,
    pub word: Vec<Letter>,
}

/// Split `text` into signed terms and parse coefficients with `tower`.
pub fn parse_terms(tower: &Tower, text: &str) -> Result<Vec<Term>> {
    let text = text.trim();
    if text == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (negative, raw) in split_top_level(text)? {
        let (coeff_text, word_text) = match last_top_level_star(&raw) {
            Some(i) => (Some(raw[..i].trim()), raw[i + 1..].trim()),
            None => (None, raw.trim()),
        };
        let mut word_text = word_text;
        let mut negative = negative;
        if coeff_text.is_none() {
            while let Some(rest) = word_text.strip_prefix('-') {
                negative = !negative;
                word_text = rest.trim_start();
            }
        }
        let mut coeff = match coeff_text {
            Some(c) => tower.parse(c)?,
            None => tower.one(),
        };
        if negative {
            coeff = -&coeff;
        }
        out.push(Term { coeff, word: parse_word(word_text)? });
    }
    Ok(out)
}

fn split_top_level(text: &str) -> Result<Vec<(bool, String)>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    let mut negative = false;
    let mut prev: Option<char> = None;
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse("unbalanced `)`".into()));
                }
            }
            _ => {}
        }
        let binary = depth == 0
            && (c == '+' || c == '-')
            && prev.is_some_and(|p| !"*/^(+-~.@".contains(p));
        if binary {
            if current.trim().is_empty() {
                return Err(Error::Parse("empty term".into()));
            }
            parts.push((negative, std::mem::take(&mut current)));
            negative = c == '-';
            prev = Some(c);
            continue;
        }
        current.push(c);
        if !c.is_whitespace() {
            prev = Some(c);
        }
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced `(`".into()));
    }
    if current.trim().is_empty() {
        return Err(Error::Parse("empty term".into()));
    }
    parts.push((negative, current));
    Ok(parts)
}

fn last_top_level_star(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    let mut last = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => last = Some(i),
            _ => {}
        }
    }
    last
}

fn parse_word(s: &str) -> Result<Vec<Letter>> {
    if s.is_empty() {
        return Err(Error::Parse("missing path".into()));
    }
    s.split('.')
        .map(|l| {
            let l = l.trim();
            let ident = |x: &str| {
                if !x.is_empty() && x.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    Ok(x.to_string())
                } else {
                    Err(Error::Parse(format!("bad letter {l:?}")))
                }
            };
            if let Some(v) = l.strip_prefix('@') {
                Ok(Letter::Vertex(ident(v)?))
            } else if let Some(e) = l.strip_prefix('~') {
                Ok(Letter::Ghost(ident(e)?))
            } else {
                Ok(Letter::Edge(ident(l)?))
            }
        })
        .collect()
}

/// Coefficient as it appears in front of `*`.
pub fn format_coeff(c: &TowerElement) -> String {
    let s = c.to_string();
    let simple = !s.chars().any(|ch| " +*()".contains(ch)) && !s[1..].contains('-');
    if simple {
        s
    } else {
        format!("({s})")
    }
}

/// Join `(coefficient, word)` pairs in the canonical layout.
pub fn format_terms<'a>(terms: impl IntoIterator<Item = (&'a TowerElement, String)>) -> String {
    let parts: Vec<String> = terms.into_iter().map(|(c, w)| format!("{} * {w}", format_coeff(c))).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::TowerSpec;

    #[test]
    fn splits_signed_terms() {
        let k = TowerSpec::RationalFunction { levels: 1 }.build().unwrap();
        let terms = parse_terms(&k, "3 * @1 - (t1 + 1) * a.b + -1/2 * ~c - d").unwrap();
        assert_eq!(terms.len(), 4);
        assert_eq!(terms[0].coeff, k.from_int(3));
        assert_eq!(terms[1].coeff, k.parse("-t1 - 1").unwrap());
        assert_eq!(terms[1].word, vec![Letter::Edge("a".into()), Letter::Edge("b".into())]);
        assert_eq!(terms[2].word, vec![Letter::Ghost("c".into())]);
        assert_eq!(terms[3].coeff, k.from_int(-1));
        assert!(parse_terms(&k, "0").unwrap().is_empty());
        assert!(parse_terms(&k, "3 * ").is_err());
        assert!(parse_terms(&k, "(3 * a").is_err());
    }

    #[test]
    fn coefficient_layout() {
        let k = TowerSpec::FiniteField { p: 2, degrees: vec![1, 2] }.build().unwrap();
        assert_eq!(format_coeff(&k.one()), "1");
        assert_eq!(format_coeff(&k.w().unwrap()), "w");
        assert_eq!(format_coeff(&k.parse("w + 1").unwrap()), "(w + 1)");
        let q = TowerSpec::Constant { p: 0, levels: 0 }.build().unwrap();
        assert_eq!(format_coeff(&q.parse("-3/2").unwrap()), "-3/2");
    }
}
