//! Finite L-presentations: the data model ⟨S | Q | Φ | R⟩, a text format
//! with parser and canonical serializer, and the built-in catalog of
//! examples (Grigorchuk, generalized Fabrykowski-Gupta, Gupta-Sidki).
//!
//! A presentation holds fixed relators Q, endomorphisms Φ of the free
//! group on S, and iterated relators R; the group is the quotient of the
//! free group by the normal closure of Q together with all images of R
//! under the monoid generated by Φ. `declared_ascending` means Q is empty;
//! ascending presentations are always invariant.

use crate::words::{commutator, conjugate, FreeEndomorphism, FreeWord};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpresError {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("presentation is not declared invariant")]
    NotDeclaredInvariant,
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> LpresError {
    LpresError::Invalid(msg.into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPresentation {
    generator_names: Vec<String>,
    fixed_relators: Vec<FreeWord>,
    endomorphisms: Vec<(String, FreeEndomorphism)>,
    iterated_relators: Vec<FreeWord>,
    declared_invariant: bool,
    declared_ascending: bool,
}

impl LPresentation {
    pub fn new(
        generator_names: Vec<String>,
        fixed_relators: Vec<FreeWord>,
        endomorphisms: Vec<(String, FreeEndomorphism)>,
        iterated_relators: Vec<FreeWord>,
        declared_invariant: bool,
        declared_ascending: bool,
    ) -> Result<Self, LpresError> {
        let m = generator_names.len();
        for (idx, name) in generator_names.iter().enumerate() {
            if !is_ident(name) {
                return Err(invalid(format!("bad generator name {:?}", name)));
            }
            if generator_names[..idx].contains(name) {
                return Err(invalid(format!("duplicate generator {:?}", name)));
            }
        }
        if declared_ascending && !fixed_relators.is_empty() {
            return Err(invalid("ascending presentations must have no fixed relators"));
        }
        for w in fixed_relators.iter().chain(iterated_relators.iter()) {
            if w.max_gen() as usize > m {
                return Err(invalid("relator uses an undeclared generator"));
            }
        }
        for (name, e) in &endomorphisms {
            if !is_ident(name) {
                return Err(invalid(format!("bad endomorphism name {:?}", name)));
            }
            if e.ambient() != m {
                return Err(invalid(format!(
                    "endomorphism {} is defined on {} generators, presentation has {}",
                    name,
                    e.ambient(),
                    m
                )));
            }
        }
        Ok(LPresentation {
            generator_names,
            fixed_relators,
            endomorphisms,
            iterated_relators,
            // ascending implies invariant
            declared_invariant: declared_invariant || declared_ascending,
            declared_ascending,
        })
    }

    pub fn num_gens(&self) -> usize {
        self.generator_names.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn gen_index(&self, name: &str) -> Option<u32> {
        self.generator_names.iter().position(|n| n == name).map(|i| i as u32 + 1)
    }

    pub fn fixed_relators(&self) -> &[FreeWord] {
        &self.fixed_relators
    }

    pub fn endomorphisms(&self) -> &[(String, FreeEndomorphism)] {
        &self.endomorphisms
    }

    pub fn iterated_relators(&self) -> &[FreeWord] {
        &self.iterated_relators
    }

    pub fn is_ascending(&self) -> bool {
        self.declared_ascending
    }

    pub fn is_invariant(&self) -> bool {
        self.declared_invariant
    }

    /// Rewrite an invariant presentation in ascending form: Q is appended
    /// to R and emptied. Defines the same group.
    pub fn as_ascending(&self) -> Result<LPresentation, LpresError> {
        if !self.declared_invariant {
            return Err(LpresError::NotDeclaredInvariant);
        }
        if self.declared_ascending {
            return Ok(self.clone());
        }
        let mut iter = self.iterated_relators.clone();
        iter.extend(self.fixed_relators.iter().cloned());
        LPresentation::new(
            self.generator_names.clone(),
            Vec::new(),
            self.endomorphisms.clone(),
            iter,
            true,
            true,
        )
    }

    /// ⟨S | R⟩ as the ascending presentation ⟨S | ∅ | {id} | R⟩.
    pub fn from_finite_presentation(
        gens: Vec<String>,
        relators: Vec<FreeWord>,
    ) -> Result<LPresentation, LpresError> {
        let m = gens.len();
        LPresentation::new(
            gens,
            Vec::new(),
            vec![("id".to_string(), FreeEndomorphism::identity(m))],
            relators,
            true,
            true,
        )
    }

    pub fn serialize(&self) -> String {
        let names = &self.generator_names;
        let mut out = String::new();
        out.push_str("lpres {\n");
        out.push_str(&format!("  gens: {};\n", names.join(", ")));
        out.push_str(&format!("  fixed: {};\n", word_list(names, &self.fixed_relators)));
        for (name, e) in &self.endomorphisms {
            let maps: Vec<String> = names
                .iter()
                .enumerate()
                .map(|(i, s)| format!("{} -> {};", s, word_string(names, e.image(i as u32 + 1))))
                .collect();
            out.push_str(&format!("  endo {} {{ {} }}\n", name, maps.join(" ")));
        }
        out.push_str(&format!("  iter: {};\n", word_list(names, &self.iterated_relators)));
        let flags = if self.declared_ascending {
            "ascending"
        } else if self.declared_invariant {
            "invariant"
        } else {
            ""
        };
        out.push_str(&format!("  flags: {};\n", flags));
        out.push_str("}\n");
        out
    }

    pub fn parse(text: &str) -> Result<LPresentation, LpresError> {
        Parser::new(text)?.parse_file()
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Canonical rendering of a reduced word: `*`-joined syllables, `1` for
/// the identity, exponent omitted when it is 1.
pub fn word_string(names: &[String], w: &FreeWord) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    w.syllables()
        .iter()
        .map(|(g, e)| {
            let name = &names[(*g - 1) as usize];
            if e.is_one() {
                name.clone()
            } else {
                format!("{}^{}", name, e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn word_list(names: &[String], ws: &[FreeWord]) -> String {
    ws.iter().map(|w| word_string(names, w)).collect::<Vec<_>>().join(", ")
}

// ---------------------------------------------------------------------------
// text format

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(BigInt),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Semi,
    Comma,
    Star,
    Caret,
    Arrow,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier {:?}", s),
            Tok::Int(n) => write!(f, "integer {}", n),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBracket => write!(f, "'['"),
            Tok::RBracket => write!(f, "']'"),
            Tok::Colon => write!(f, "':'"),
            Tok::Semi => write!(f, "';'"),
            Tok::Comma => write!(f, "','"),
            Tok::Star => write!(f, "'*'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::Arrow => write!(f, "'->'"),
        }
    }
}

pub(crate) struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
    pub(crate) gens: Vec<String>,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Parser, LpresError> {
        let mut toks = Vec::new();
        let (mut line, mut col) = (1usize, 1usize);
        let mut it = text.chars().peekable();
        while let Some(&c) = it.peek() {
            let (l, co) = (line, col);
            let mut bump = |it: &mut std::iter::Peekable<std::str::Chars>| {
                let c = it.next().unwrap();
                if c == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                c
            };
            if c.is_whitespace() {
                bump(&mut it);
                continue;
            }
            if c == '#' {
                while let Some(&d) = it.peek() {
                    if d == '\n' {
                        break;
                    }
                    bump(&mut it);
                }
                continue;
            }
            let tok = match c {
                '{' => {
                    bump(&mut it);
                    Tok::LBrace
                }
                '}' => {
                    bump(&mut it);
                    Tok::RBrace
                }
                '(' => {
                    bump(&mut it);
                    Tok::LParen
                }
                ')' => {
                    bump(&mut it);
                    Tok::RParen
                }
                '[' => {
                    bump(&mut it);
                    Tok::LBracket
                }
                ']' => {
                    bump(&mut it);
                    Tok::RBracket
                }
                ':' => {
                    bump(&mut it);
                    Tok::Colon
                }
                ';' => {
                    bump(&mut it);
                    Tok::Semi
                }
                ',' => {
                    bump(&mut it);
                    Tok::Comma
                }
                '*' => {
                    bump(&mut it);
                    Tok::Star
                }
                '^' => {
                    bump(&mut it);
                    Tok::Caret
                }
                '-' => {
                    bump(&mut it);
                    match it.peek() {
                        Some('>') => {
                            bump(&mut it);
                            Tok::Arrow
                        }
                        Some(d) if d.is_ascii_digit() => {
                            let mut digits = String::new();
                            while let Some(&d) = it.peek() {
                                if d.is_ascii_digit() {
                                    digits.push(bump(&mut it));
                                } else {
                                    break;
                                }
                            }
                            Tok::Int(-digits.parse::<BigInt>().unwrap())
                        }
                        _ => {
                            return Err(LpresError::Parse {
                                line: l,
                                col: co,
                                msg: "expected '>' or digits after '-'".into(),
                            })
                        }
                    }
                }
                d if d.is_ascii_digit() => {
                    let mut digits = String::new();
                    while let Some(&d) = it.peek() {
                        if d.is_ascii_digit() {
                            digits.push(bump(&mut it));
                        } else {
                            break;
                        }
                    }
                    Tok::Int(digits.parse::<BigInt>().unwrap())
                }
                d if d.is_ascii_alphabetic() || d == '_' => {
                    let mut s = String::new();
                    while let Some(&d) = it.peek() {
                        if d.is_ascii_alphanumeric() || d == '_' {
                            s.push(bump(&mut it));
                        } else {
                            break;
                        }
                    }
                    Tok::Ident(s)
                }
                other => {
                    return Err(LpresError::Parse {
                        line: l,
                        col: co,
                        msg: format!("unexpected character {:?}", other),
                    })
                }
            };
            toks.push((tok, l, co));
        }
        Ok(Parser { toks, pos: 0, end: (line, col), gens: Vec::new() })
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|&(_, l, c)| (l, c)).unwrap_or(self.end)
    }

    pub(crate) fn err(&self, msg: impl Into<String>) -> LpresError {
        let (line, col) = self.here();
        LpresError::Parse { line, col, msg: msg.into() }
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    pub(crate) fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }

    pub(crate) fn tokens(&self) -> impl Iterator<Item = &Tok> {
        self.toks.iter().map(|(t, _, _)| t)
    }

    pub(crate) fn expect_int(&mut self) -> Result<BigInt, LpresError> {
        match self.peek() {
            Some(Tok::Int(_)) => match self.next() {
                Some(Tok::Int(n)) => Ok(n),
                _ => unreachable!(),
            },
            Some(t) => Err(self.err(format!("expected integer, found {}", t))),
            None => Err(self.err("expected integer, found end of input")),
        }
    }

    pub(crate) fn expect(&mut self, want: &Tok) -> Result<(), LpresError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {}, found {}", want, t))),
            None => Err(self.err(format!("expected {}, found end of input", want))),
        }
    }

    pub(crate) fn expect_ident(&mut self) -> Result<String, LpresError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(t) => Err(self.err(format!("expected identifier, found {}", t))),
            None => Err(self.err("expected identifier, found end of input")),
        }
    }

    fn parse_file(&mut self) -> Result<LPresentation, LpresError> {
        match self.next() {
            Some(Tok::Ident(s)) if s == "lpres" => {}
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.err("expected 'lpres'"));
            }
        }
        self.expect(&Tok::LBrace)?;
        let mut fixed: Option<Vec<FreeWord>> = None;
        let mut iter: Option<Vec<FreeWord>> = None;
        let mut endos: Vec<(String, FreeEndomorphism)> = Vec::new();
        let mut ascending = false;
        let mut invariant = false;
        let mut seen_gens = false;
        let mut seen_flags = false;
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    break;
                }
                None => return Err(self.err("unterminated 'lpres' block")),
                _ => {}
            }
            let key = self.expect_ident()?;
            match key.as_str() {
                "gens" => {
                    if seen_gens {
                        return Err(self.err("duplicate 'gens' section"));
                    }
                    seen_gens = true;
                    self.expect(&Tok::Colon)?;
                    self.gens = self.parse_ident_list()?;
                }
                "fixed" | "iter" => {
                    if !seen_gens {
                        return Err(self.err("'gens' must be declared first"));
                    }
                    let slot = if key == "fixed" { &mut fixed } else { &mut iter };
                    if slot.is_some() {
                        return Err(self.err(format!("duplicate '{}' section", key)));
                    }
                    self.expect(&Tok::Colon)?;
                    *slot = Some(self.parse_word_list()?);
                }
                "endo" => {
                    if !seen_gens {
                        return Err(self.err("'gens' must be declared first"));
                    }
                    let name = self.expect_ident()?;
                    if endos.iter().any(|(n, _)| *n == name) {
                        return Err(self.err(format!("duplicate endomorphism {:?}", name)));
                    }
                    self.expect(&Tok::LBrace)?;
                    let mut images: Vec<Option<FreeWord>> = vec![None; self.gens.len()];
                    while self.peek() != Some(&Tok::RBrace) {
                        let src = self.expect_ident()?;
                        let gi = match self.gens.iter().position(|g| *g == src) {
                            Some(i) => i,
                            None => return Err(self.err(format!("undeclared generator {:?}", src))),
                        };
                        self.expect(&Tok::Arrow)?;
                        let w = self.parse_word()?;
                        self.expect(&Tok::Semi)?;
                        if images[gi].is_some() {
                            return Err(self.err(format!("generator {:?} mapped twice", src)));
                        }
                        images[gi] = Some(w);
                    }
                    self.expect(&Tok::RBrace)?;
                    let mut full = Vec::with_capacity(images.len());
                    for (i, im) in images.into_iter().enumerate() {
                        match im {
                            Some(w) => full.push(w),
                            None => {
                                return Err(self.err(format!(
                                    "endomorphism {:?} gives no image for generator {:?}",
                                    name, self.gens[i]
                                )))
                            }
                        }
                    }
                    endos.push((name, FreeEndomorphism::new(full)));
                }
                "flags" => {
                    if seen_flags {
                        return Err(self.err("duplicate 'flags' section"));
                    }
                    seen_flags = true;
                    self.expect(&Tok::Colon)?;
                    for f in self.parse_ident_list()? {
                        match f.as_str() {
                            "ascending" => ascending = true,
                            "invariant" => invariant = true,
                            other => {
                                return Err(self.err(format!("unknown flag {:?}", other)));
                            }
                        }
                    }
                }
                other => return Err(self.err(format!("unknown section {:?}", other))),
            }
        }
        if self.pos != self.toks.len() {
            return Err(self.err("trailing input after closing '}'"));
        }
        if !seen_gens {
            return Err(self.err("missing 'gens' section"));
        }
        LPresentation::new(
            std::mem::take(&mut self.gens),
            fixed.unwrap_or_default(),
            endos,
            iter.unwrap_or_default(),
            invariant,
            ascending,
        )
    }

    /// Comma-separated identifiers up to ';' (possibly none).
    fn parse_ident_list(&mut self) -> Result<Vec<String>, LpresError> {
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.expect_ident()?);
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::Semi) => break,
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    return Err(self.err("expected ',' or ';'"));
                }
            }
        }
        Ok(out)
    }

    fn parse_word_list(&mut self) -> Result<Vec<FreeWord>, LpresError> {
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.parse_word()?);
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::Semi) => break,
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    return Err(self.err("expected ',' or ';'"));
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn parse_word(&mut self) -> Result<FreeWord, LpresError> {
        let mut w = self.parse_term()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            w = w.multiply(&self.parse_term()?);
        }
        Ok(w)
    }

    /// `atom`, `atom^int` (power) or `atom^atom` (conjugation).
    fn parse_term(&mut self) -> Result<FreeWord, LpresError> {
        let a = self.parse_atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(a);
        }
        self.pos += 1;
        match self.peek() {
            Some(Tok::Int(_)) => {
                let k = match self.next() {
                    Some(Tok::Int(k)) => k,
                    _ => unreachable!(),
                };
                if k.is_zero() {
                    self.pos -= 1;
                    return Err(self.err("zero exponent"));
                }
                Ok(a.pow(&k))
            }
            _ => {
                let b = self.parse_atom()?;
                Ok(conjugate(&a, &b))
            }
        }
    }

    fn parse_atom(&mut self) -> Result<FreeWord, LpresError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                match self.gens.iter().position(|g| *g == s) {
                    Some(i) => {
                        self.pos += 1;
                        Ok(FreeWord::gen(i as u32 + 1))
                    }
                    None => Err(self.err(format!("undeclared generator {:?}", s))),
                }
            }
            Some(Tok::Int(n)) if n.is_one() => {
                self.pos += 1;
                Ok(FreeWord::identity())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let w = self.parse_word()?;
                self.expect(&Tok::RParen)?;
                Ok(w)
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let x = self.parse_word()?;
                self.expect(&Tok::Comma)?;
                let y = self.parse_word()?;
                self.expect(&Tok::RBracket)?;
                Ok(commutator(&x, &y))
            }
            Some(t) => Err(self.err(format!("expected a word, found {}", t))),
            None => Err(self.err("expected a word, found end of input")),
        }
    }
}

/// Parse a single word over the given generator names; the whole input must
/// be consumed. Used by the pc presentation and machine file parsers.
pub(crate) fn parse_word_with_names(
    names: &[String],
    text: &str,
) -> Result<FreeWord, LpresError> {
    let mut p = Parser::new(text)?;
    p.gens = names.to_vec();
    let w = p.parse_word()?;
    if !p.at_end() {
        return Err(p.err("trailing input after word"));
    }
    Ok(w)
}

// ---------------------------------------------------------------------------
// catalog

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Grigorchuk group on {a, c, d} with one substitution and no fixed
/// relators.
pub fn grigorchuk_ascending() -> LPresentation {
    let (a, c, d) = (FreeWord::gen(1), FreeWord::gen(2), FreeWord::gen(3));
    let sigma = FreeEndomorphism::new(vec![
        conjugate(&c, &a),
        c.multiply(&d),
        c.clone(),
    ]);
    let acaca = a.multiply(&c).multiply(&a).multiply(&c).multiply(&a);
    let relators = vec![
        a.pow(&BigInt::from(2)),
        commutator(&d, &conjugate(&d, &a)),
        commutator(&d, &conjugate(&d, &acaca)),
    ];
    LPresentation::new(
        names(&["a", "c", "d"]),
        Vec::new(),
        vec![("sigma".to_string(), sigma)],
        relators,
        true,
        true,
    )
    .unwrap()
}

/// Grigorchuk group on {a, b, c, d}: fixed relators a², b², c², d², bcd
/// and a non-ascending but invariant substitution.
pub fn grigorchuk_invariant() -> LPresentation {
    let (a, b, c, d) =
        (FreeWord::gen(1), FreeWord::gen(2), FreeWord::gen(3), FreeWord::gen(4));
    let sigma = FreeEndomorphism::new(vec![
        conjugate(&c, &a),
        d.clone(),
        b.clone(),
        c.clone(),
    ]);
    let two = BigInt::from(2);
    let fixed = vec![
        a.pow(&two),
        b.pow(&two),
        c.pow(&two),
        d.pow(&two),
        b.multiply(&c).multiply(&d),
    ];
    let acaca = a.multiply(&c).multiply(&a).multiply(&c).multiply(&a);
    let relators = vec![
        commutator(&d, &conjugate(&d, &a)),
        commutator(&d, &conjugate(&d, &acaca)),
    ];
    LPresentation::new(
        names(&["a", "b", "c", "d"]),
        fixed,
        vec![("sigma".to_string(), sigma)],
        relators,
        true,
        false,
    )
    .unwrap()
}

/// sigma_i = r^(a^i) with the subscript normalized into {1..p}.
fn fg_sigma(p: i64, i: i64) -> FreeWord {
    let norm = (i - 1).rem_euclid(p) + 1;
    conjugate(&FreeWord::gen(2), &FreeWord::gen_pow(1, norm))
}

/// Generalized Fabrykowski-Gupta group on {a, r}, one relator family
/// index fixed at i = 1 (the redundancy reduction).
pub fn gen_fabrykowski_gupta(p: u32) -> Result<LPresentation, LpresError> {
    fabrykowski_gupta_with(p, false)
}

/// Same group, full redundant relator set (all i), for cross-checking.
pub fn gen_fabrykowski_gupta_full(p: u32) -> Result<LPresentation, LpresError> {
    fabrykowski_gupta_with(p, true)
}

fn fabrykowski_gupta_with(p: u32, full: bool) -> Result<LPresentation, LpresError> {
    if p < 3 {
        return Err(invalid("p must be at least 3"));
    }
    let p = p as i64;
    let a = FreeWord::gen(1);
    let phi = FreeEndomorphism::new(vec![
        conjugate(&FreeWord::gen(2), &a),
        FreeWord::gen(2),
    ]);
    let mut relators = vec![a.pow(&BigInt::from(p))];
    let is: Vec<i64> = if full { (1..=p).collect() } else { vec![1] };
    for &i in &is {
        for j in 1..=p {
            let d = (i - j).abs();
            if d < 2 || d > p - 2 {
                continue;
            }
            for n in 0..p {
                for m in 0..p {
                    let lhs = conjugate(&fg_sigma(p, i), &fg_sigma(p, i - 1).pow(&BigInt::from(n)));
                    let rhs = conjugate(&fg_sigma(p, j), &fg_sigma(p, j - 1).pow(&BigInt::from(m)));
                    relators.push(commutator(&lhs, &rhs));
                }
            }
        }
    }
    for &i in &is {
        for n in 0..p {
            for m in 0..p {
                let left =
                    conjugate(&fg_sigma(p, i), &fg_sigma(p, i - 1).pow(&BigInt::from(n + 1)));
                let tail = fg_sigma(p, i - 1)
                    .pow(&BigInt::from(n))
                    .multiply(&conjugate(&fg_sigma(p, i - 1), &fg_sigma(p, i - 2).pow(&BigInt::from(m))));
                relators.push(left.inverse().multiply(&conjugate(&fg_sigma(p, i), &tail)));
            }
        }
    }
    // The relator schemas above are the usual right-action formulas for this
    // family. The tree machines in this crate act on the left, so each
    // relator is reversed (reversal is an anti-automorphism fixing the
    // generators) and phi conjugates r by a from the matching side. The
    // self-similarity oracle accepts exactly this transcription.
    let relators = relators.iter().map(FreeWord::reversed).collect();
    LPresentation::new(
        names(&["a", "r"]),
        Vec::new(),
        vec![("phi".to_string(), phi)],
        relators,
        true,
        true,
    )
}

fn is_odd_prime(p: u32) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn modinv(a: i64, p: i64) -> i64 {
    // p is prime and a nonzero mod p, so a^(p-2) works
    let mut result = 1i64;
    let mut base = a.rem_euclid(p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// The transversal conjugate sigma_{i,ell} expressed in sigma_1..sigma_p:
/// sigma_i for ell = 0, otherwise
/// sigma_i * [sigma_i^x sigma_j^y, sigma_k^z sigma_i^x]^-1 where x = 1/2,
/// y = (k-i)/2(j-k), z = (i-j)/2(j-k) mod p, and (j,k) is the
/// lexicographically least pair with (j-i)(i-k)/2(j-k) = ell mod p.
pub fn sigma_i_ell(p: u32, i: u32, ell: u32) -> FreeWord {
    assert!(is_odd_prime(p), "p must be an odd prime");
    assert!((1..=p).contains(&i), "index out of range");
    assert!(ell < p, "residue out of range");
    if ell == 0 {
        return FreeWord::gen(i);
    }
    let (p, i, ell) = (p as i64, i as i64, ell as i64);
    for j in 1..=p {
        if j == i {
            continue;
        }
        for k in 1..=p {
            if k == i || k == j {
                continue;
            }
            let inv = modinv((2 * (j - k)).rem_euclid(p), p);
            if ((j - i) * (i - k)).rem_euclid(p) * inv % p == ell {
                let x = modinv(2, p);
                let y = (k - i).rem_euclid(p) * inv % p;
                let z = (i - j).rem_euclid(p) * inv % p;
                let six = FreeWord::gen_pow(i as u32, x);
                let left = six.multiply(&FreeWord::gen_pow(j as u32, y));
                let right = FreeWord::gen_pow(k as u32, z).multiply(&six);
                return FreeWord::gen(i as u32)
                    .multiply(&commutator(&left, &right).inverse());
            }
        }
    }
    unreachable!("every nonzero residue is realized by some (j,k)");
}

/// Normal closure of t in the Gupta-Sidki p-group, on generators
/// sigma_1..sigma_p, with the substitution Sigma(sigma_i) = sigma_{1,i}.
pub fn gen_gupta_sidki_d(p: u32) -> Result<LPresentation, LpresError> {
    if !is_odd_prime(p) {
        return Err(invalid("p must be an odd prime"));
    }
    let gens: Vec<String> = (1..=p).map(|i| format!("s{}", i)).collect();
    let big_sigma = FreeEndomorphism::new(
        (1..=p).map(|i| sigma_i_ell(p, 1, i % p)).collect(),
    );
    let mut relators: Vec<FreeWord> =
        (1..=p).map(|i| FreeWord::gen_pow(i, p as i64)).collect();
    for i in 1..=p {
        for j in 1..=p {
            if i == j {
                continue;
            }
            for m in 0..p {
                for n in 0..p {
                    let w = sigma_i_ell(p, i, (m + i) % p)
                        .inverse()
                        .multiply(&sigma_i_ell(p, j, (n + i) % p).inverse())
                        .multiply(&sigma_i_ell(p, i, (m + j) % p))
                        .multiply(&sigma_i_ell(p, j, (n + j) % p));
                    relators.push(w);
                }
            }
        }
    }
    LPresentation::new(
        gens,
        Vec::new(),
        vec![("Sigma".to_string(), big_sigma)],
        relators,
        true,
        true,
    )
}

/// Finite presentation of the split extension (D quotient) x| C_p, where
/// the cyclic group permutes the sigma generators cyclically. Takes a
/// nilpotent quotient of the D subgroup as a pc presentation together with
/// the images of s1..sp in it; the shift s_i -> s_{i+1} is induced onto
/// the pc generators and must be an automorphism of the quotient. The
/// result has one generator per pc generator plus the permuting generator
/// t, with the pc relations, t^p = 1, and g^t = shift(g).
pub fn gs_split_extension(
    p: u32,
    d_quotient: &crate::pcgroup::PcPresentation,
    sigma_images: &[crate::pcgroup::NormalWord],
) -> Result<LPresentation, LpresError> {
    use crate::pcgroup::{igs_close, pc_endomorphism_images, NormalWord};

    if !is_odd_prime(p) {
        return Err(invalid("p must be an odd prime"));
    }
    if sigma_images.len() != p as usize {
        return Err(invalid("need one image per sigma generator"));
    }
    let l = d_quotient.num_gens();
    let shift = FreeEndomorphism::new(
        (0..p).map(|i| FreeWord::gen((i + 1) % p + 1)).collect(),
    );
    let zeta = pc_endomorphism_images(d_quotient, sigma_images, &shift)
        .map_err(|e| invalid(format!("cannot induce the cyclic shift: {}", e)))?;
    let seq = igs_close(d_quotient, &zeta, false)
        .map_err(|e| invalid(format!("cannot close the shift images: {}", e)))?;
    for g in 0..l {
        let sifted = seq
            .sift(d_quotient, &NormalWord::gen(l, g))
            .map_err(|e| invalid(format!("cannot sift a generator: {}", e)))?;
        if !sifted.is_identity() {
            return Err(invalid(
                "the cyclic shift does not induce an automorphism of the quotient",
            ));
        }
    }

    let word_of = |nw: &NormalWord| -> FreeWord {
        FreeWord::from_syllables(
            nw.syllables().into_iter().map(|(k, e)| ((k + 1) as u32, BigInt::from(e))),
        )
    };
    let t = FreeWord::gen((l + 1) as u32);
    let mut relators: Vec<FreeWord> = Vec::new();
    for i in 0..l {
        for j in 0..i {
            let rhs = match d_quotient.conj_relation(i, j) {
                Some(r) => word_of(r),
                None => FreeWord::gen((i + 1) as u32),
            };
            let lhs = conjugate(&FreeWord::gen((i + 1) as u32), &FreeWord::gen((j + 1) as u32));
            relators.push(lhs.multiply(&rhs.inverse()));
        }
    }
    for i in 0..l {
        let r = d_quotient.order(i);
        if r != 0 {
            let rhs = d_quotient.power_relation(i).map(&word_of).unwrap_or_else(FreeWord::identity);
            relators.push(FreeWord::gen_pow((i + 1) as u32, r).multiply(&rhs.inverse()));
        }
    }
    relators.push(FreeWord::gen_pow((l + 1) as u32, p as i64));
    for (g, z) in zeta.iter().enumerate() {
        let lhs = conjugate(&FreeWord::gen((g + 1) as u32), &t);
        relators.push(lhs.multiply(&word_of(z).inverse()));
    }
    let mut names: Vec<String> = (1..=l).map(|i| format!("g{}", i)).collect();
    names.push("t".to_string());
    LPresentation::from_finite_presentation(names, relators)
}

/// Free group of the given rank as an ascending presentation with the
/// identity substitution.
pub fn free_group(rank: usize) -> LPresentation {
    let gens: Vec<String> = (0..rank)
        .map(|i| {
            if rank <= 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("x{}", i + 1)
            }
        })
        .collect();
    LPresentation::from_finite_presentation(gens, Vec::new()).unwrap()
}

/// ⟨a,b | [a,[a,[a,b]]], [b,[b,[a,b]]]⟩.
pub fn fp_g3() -> LPresentation {
    let (a, b) = (FreeWord::gen(1), FreeWord::gen(2));
    let ab = commutator(&a, &b);
    LPresentation::from_finite_presentation(
        names(&["a", "b"]),
        vec![
            commutator(&a, &commutator(&a, &ab)),
            commutator(&b, &commutator(&b, &ab)),
        ],
    )
    .unwrap()
}

/// ⟨x,y | [[y,x],y], [[[[[y,x],x],x],x],x]⟩.
pub fn fp_g4() -> LPresentation {
    let (x, y) = (FreeWord::gen(1), FreeWord::gen(2));
    let yx = commutator(&y, &x);
    let mut deep = yx.clone();
    for _ in 0..5 {
        deep = commutator(&deep, &x);
    }
    LPresentation::from_finite_presentation(
        names(&["x", "y"]),
        vec![commutator(&yx, &y), deep],
    )
    .unwrap()
}

/// Resolve a catalog name: `grigorchuk`, `grigorchuk-invariant`, `fg:P`,
/// `fg-full:P`, `gs:P`, `free:M`, `g3`, `g4`.
pub fn catalog(name: &str) -> Result<LPresentation, LpresError> {
    let mut parts = name.splitn(2, ':');
    let head = parts.next().unwrap_or("");
    let arg = parts.next();
    let num = |arg: Option<&str>| -> Result<u32, LpresError> {
        arg.and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| invalid(format!("catalog entry {:?} needs a numeric parameter", head)))
    };
    match head {
        "grigorchuk" if arg.is_none() => Ok(grigorchuk_ascending()),
        "grigorchuk-invariant" if arg.is_none() => Ok(grigorchuk_invariant()),
        "fg" => gen_fabrykowski_gupta(num(arg)?),
        "fg-full" => gen_fabrykowski_gupta_full(num(arg)?),
        "gs" => gen_gupta_sidki_d(num(arg)?),
        "free" => Ok(free_group(num(arg)? as usize)),
        "g3" if arg.is_none() => Ok(fp_g3()),
        "g4" if arg.is_none() => Ok(fp_g4()),
        _ => Err(invalid(format!("unknown catalog entry {:?}", name))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn parse_minimal_file() {
        let p = LPresentation::parse(
            "lpres {\n  gens: a, r;\n  fixed: ;\n  endo phi { a -> r^(a^-1); r -> r; }\n  iter: a^5, [r, r^a];\n  flags: ascending;\n}\n",
        )
        .unwrap();
        assert_eq!(p.generator_names(), &["a".to_string(), "r".to_string()]);
        assert!(p.fixed_relators().is_empty());
        assert_eq!(p.endomorphisms().len(), 1);
        assert_eq!(p.endomorphisms()[0].0, "phi");
        // a -> r^(a^-1) = a r a^-1
        let expect = FreeWord::gen(1)
            .multiply(&FreeWord::gen(2))
            .multiply(&FreeWord::gen(1).inverse());
        assert_eq!(p.endomorphisms()[0].1.image(1), &expect);
        assert_eq!(p.iterated_relators().len(), 2);
        assert_eq!(p.iterated_relators()[0], FreeWord::gen_pow(1, 5));
        assert!(p.is_ascending());
        assert!(p.is_invariant());
    }

    #[test]
    fn serialize_then_parse_is_identity() {
        for p in [
            grigorchuk_ascending(),
            grigorchuk_invariant(),
            gen_fabrykowski_gupta(3).unwrap(),
            gen_gupta_sidki_d(3).unwrap(),
            free_group(3),
            fp_g3(),
            fp_g4(),
        ] {
            let text = p.serialize();
            let q = LPresentation::parse(&text).unwrap();
            assert_eq!(q, p);
            // serialization is canonical: a second round trip is byte-identical
            assert_eq!(q.serialize(), text);
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = LPresentation::parse("lpres {\n  gens: a;\n  iter: a^x;\n}").unwrap_err();
        match e {
            LpresError::Parse { line, col, msg } => {
                assert_eq!(line, 3);
                assert_eq!(col, 11);
                assert!(msg.contains("undeclared generator"), "{}", msg);
            }
            other => panic!("unexpected error {:?}", other),
        }

        let e = LPresentation::parse("lpres { gens: a; iter: a^0; }").unwrap_err();
        match e {
            LpresError::Parse { msg, .. } => assert!(msg.contains("zero exponent"), "{}", msg),
            other => panic!("unexpected error {:?}", other),
        }

        assert!(LPresentation::parse("lpres { iter: a; gens: a; }").is_err());
        assert!(LPresentation::parse("lpres { gens: a; iter: a^2 }").is_err());
        assert!(LPresentation::parse("").is_err());
    }

    #[test]
    fn identity_atom_and_comments() {
        let p = LPresentation::parse(
            "# leading comment\nlpres { gens: a; iter: 1, a*1*a; # trailing\n }",
        )
        .unwrap();
        assert!(p.iterated_relators()[0].is_identity());
        assert_eq!(p.iterated_relators()[1], FreeWord::gen_pow(1, 2));
    }

    #[test]
    fn ascending_conversion() {
        let inv = grigorchuk_invariant();
        let asc = inv.as_ascending().unwrap();
        assert!(asc.is_ascending());
        assert!(asc.fixed_relators().is_empty());
        assert_eq!(asc.iterated_relators().len(), 7);
        // the five fixed relators land at the end, in order
        assert_eq!(asc.iterated_relators()[2], FreeWord::gen_pow(1, 2));
        assert_eq!(&asc.iterated_relators()[..2], inv.iterated_relators());

        let already = grigorchuk_ascending();
        assert_eq!(already.as_ascending().unwrap(), already);

        let plain = LPresentation::new(
            names(&["a"]),
            vec![FreeWord::gen_pow(1, 2)],
            vec![],
            vec![],
            false,
            false,
        )
        .unwrap();
        assert!(matches!(plain.as_ascending(), Err(LpresError::NotDeclaredInvariant)));
    }

    #[test]
    fn grigorchuk_shapes() {
        let asc = grigorchuk_ascending();
        assert_eq!(asc.num_gens(), 3);
        assert_eq!(asc.fixed_relators().len(), 0);
        assert_eq!(asc.endomorphisms().len(), 1);
        assert_eq!(asc.iterated_relators().len(), 3);

        let inv = grigorchuk_invariant();
        assert_eq!(inv.num_gens(), 4);
        assert_eq!(inv.fixed_relators().len(), 5);
        assert_eq!(inv.iterated_relators().len(), 2);
        assert!(inv.is_invariant() && !inv.is_ascending());
        // sigma sends b to d
        assert_eq!(inv.endomorphisms()[0].1.image(2), &FreeWord::gen(4));
    }

    #[test]
    fn fabrykowski_gupta_relator_counts() {
        // p = 3: no commutator pairs, 1 + 9 relators
        assert_eq!(gen_fabrykowski_gupta(3).unwrap().iterated_relators().len(), 10);
        // closed form 1 + (p-3)p^2 + p^2 with i = 1 fixed
        for p in 3..=7u32 {
            let expect = 1 + (p as usize - 3) * (p * p) as usize + (p * p) as usize;
            assert_eq!(
                gen_fabrykowski_gupta(p).unwrap().iterated_relators().len(),
                expect,
                "p = {}",
                p
            );
        }
        assert_eq!(gen_fabrykowski_gupta_full(3).unwrap().iterated_relators().len(), 28);
        assert!(gen_fabrykowski_gupta(2).is_err());
    }

    #[test]
    fn fabrykowski_gupta_words() {
        let p5 = gen_fabrykowski_gupta(5).unwrap();
        // sigma_1 = a^-1 r a appears as the base of the relator families
        assert_eq!(
            fg_sigma(5, 1),
            FreeWord::gen(1).inverse().multiply(&FreeWord::gen(2)).multiply(&FreeWord::gen(1))
        );
        // endomorphism: a -> a^-1 r a, r -> r
        let phi = &p5.endomorphisms()[0].1;
        assert_eq!(
            phi.image(1),
            &FreeWord::gen(1).inverse().multiply(&FreeWord::gen(2)).multiply(&FreeWord::gen(1))
        );
        assert_eq!(phi.image(2), &FreeWord::gen(2));
        // every relator except a^p has zero exponent sums
        for (k, r) in p5.iterated_relators().iter().enumerate() {
            let ab = r.abelianized(2);
            if k == 0 {
                assert_eq!(ab[0].to_i64(), Some(5));
                assert!(ab[1].is_zero());
            } else {
                assert!(ab.iter().all(|x| x.is_zero()), "relator {} abelianizes to {:?}", k, ab);
            }
        }
    }

    #[test]
    fn gupta_sidki_relator_counts() {
        let d3 = gen_gupta_sidki_d(3).unwrap();
        assert_eq!(d3.num_gens(), 3);
        // p + p^3 (p-1) = 3 + 54
        assert_eq!(d3.iterated_relators().len(), 57);
        assert!(gen_gupta_sidki_d(9).is_err());
        assert!(gen_gupta_sidki_d(2).is_err());

        // power relators map to p e_i, the rest to zero
        for (k, r) in d3.iterated_relators().iter().enumerate() {
            let ab = r.abelianized(3);
            if k < 3 {
                let mut expect = vec![BigInt::from(0); 3];
                expect[k] = BigInt::from(3);
                assert_eq!(ab, expect);
            } else {
                assert!(ab.iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn sigma_i_ell_examples() {
        // ell = 0 is the plain generator
        assert_eq!(sigma_i_ell(3, 2, 0), FreeWord::gen(2));
        // p=3, i=1, ell=1: (j,k) = (2,3) and all three exponents lift to 2
        let s = sigma_i_ell(3, 1, 1);
        let s1 = FreeWord::gen_pow(1, 2);
        let left = s1.multiply(&FreeWord::gen_pow(2, 2));
        let right = FreeWord::gen_pow(3, 2).multiply(&s1);
        let expect = FreeWord::gen(1).multiply(&commutator(&left, &right).inverse());
        assert_eq!(s, expect);
        // abelianizes to e_i
        for i in 1..=5u32 {
            for ell in 0..5 {
                let ab = sigma_i_ell(5, i, ell).abelianized(5);
                for (k, x) in ab.iter().enumerate() {
                    assert_eq!(x.to_i64(), Some(if k + 1 == i as usize { 1 } else { 0 }));
                }
            }
        }
    }

    #[test]
    fn catalog_lookup() {
        assert_eq!(catalog("grigorchuk").unwrap(), grigorchuk_ascending());
        assert_eq!(catalog("grigorchuk-invariant").unwrap(), grigorchuk_invariant());
        assert_eq!(catalog("fg:4").unwrap(), gen_fabrykowski_gupta(4).unwrap());
        assert_eq!(catalog("gs:3").unwrap(), gen_gupta_sidki_d(3).unwrap());
        assert_eq!(catalog("free:3").unwrap().num_gens(), 3);
        assert!(catalog("free:3").unwrap().iterated_relators().is_empty());
        assert_eq!(catalog("g3").unwrap().num_gens(), 2);
        assert_eq!(catalog("g4").unwrap().iterated_relators().len(), 2);
        assert!(catalog("nope").is_err());
        assert!(catalog("fg").is_err());
        assert!(catalog("fg:x").is_err());
    }

    #[test]
    fn finite_presentation_embedding() {
        let free3 = free_group(3);
        assert_eq!(free3.num_gens(), 3);
        assert!(free3.fixed_relators().is_empty());
        assert_eq!(free3.endomorphisms().len(), 1);
        assert!(free3.endomorphisms()[0].1.is_identity());
        assert!(free3.is_ascending());

        let g3 = fp_g3();
        assert_eq!(g3.iterated_relators().len(), 2);
        // [a,[a,[a,b]]] has zero exponent sums
        assert!(g3.iterated_relators()[0].abelianized(2).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn split_extension_of_an_elementary_quotient() {
        use crate::pcgroup::{Definition, NormalWord, PcPresentation};
        let pres = PcPresentation::new(
            vec![3, 3, 3],
            vec![1, 1, 1],
            Default::default(),
            Default::default(),
        )
        .unwrap()
        .with_definitions(vec![
            Definition::ImageOfSource(0),
            Definition::ImageOfSource(1),
            Definition::ImageOfSource(2),
        ])
        .unwrap();
        let images: Vec<NormalWord> = (0..3).map(|g| NormalWord::gen(3, g)).collect();
        let h = gs_split_extension(3, &pres, &images).unwrap();
        assert_eq!(h.num_gens(), 4);
        // shift coinvariants of (Z/3)^3 give one factor, t the other
        let ab = crate::nq::abelian_quotient(&h).unwrap();
        assert_eq!(ab.presentation().orders(), &[3, 3]);

        // degenerate input: trivial quotient leaves only the cyclic top
        let trivial = PcPresentation::new(vec![], vec![], Default::default(), Default::default())
            .unwrap()
            .with_definitions(vec![])
            .unwrap();
        let top = gs_split_extension(3, &trivial, &vec![NormalWord::identity(0); 3]).unwrap();
        let ab = crate::nq::abelian_quotient(&top).unwrap();
        assert_eq!(ab.presentation().orders(), &[3]);

        // a collapsed image makes the shift non-surjective
        let one = PcPresentation::new(vec![3], vec![1], Default::default(), Default::default())
            .unwrap()
            .with_definitions(vec![Definition::ImageOfSource(0)])
            .unwrap();
        let bad = vec![NormalWord::gen(1, 0), NormalWord::identity(1), NormalWord::identity(1)];
        let err = gs_split_extension(3, &one, &bad).unwrap_err();
        assert!(err.to_string().contains("automorphism"), "{}", err);
    }
}
