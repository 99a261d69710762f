//! Words over a finite generator alphabet, stored as syllables `(generator, exponent)`.
//!
//! Word grammar (whitespace is insignificant except as a separator):
//!
//! ```text
//! word    := ε | term ( ('*')? term )*
//! term    := atom ( '^' int )?
//! atom    := ident | '1' | '(' word ')' | '[' word ',' word ']'
//! ident   := [A-Za-z_][A-Za-z0-9_]*
//! int     := '-'? [0-9]+
//! ```
//!
//! `[u,v]` is the commutator `u v u^-1 v^-1`. An identifier that is not a
//! generator name but spells a sequence of one-character generator names is
//! read as their product, so `ab` means `a*b` over the alphabet `{a, b}`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator or its inverse; `gen` indexes the alphabet.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter(i32);

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        let v = gen as i32 + 1;
        Letter(if inverse { -v } else { v })
    }

    pub fn gen(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    pub fn sign(self) -> i64 {
        if self.0 < 0 {
            -1
        } else {
            1
        }
    }
}

impl Ord for Letter {
    /// Generators in alphabet order, each positive letter before its inverse.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.gen(), self.is_inverse()).cmp(&(other.gen(), other.is_inverse()))
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Freely reduced word: no zero exponents, adjacent syllables use distinct generators.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementWord {
    syl: Vec<(usize, i64)>,
}

impl ElementWord {
    pub fn identity() -> Self {
        ElementWord { syl: Vec::new() }
    }

    pub fn gen(g: usize) -> Self {
        ElementWord { syl: vec![(g, 1)] }
    }

    pub fn gen_pow(g: usize, e: i64) -> Self {
        if e == 0 {
            Self::identity()
        } else {
            ElementWord { syl: vec![(g, e)] }
        }
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = Self::identity();
        for l in letters {
            w.push_letter(l);
        }
        w
    }

    pub fn from_syllables<I: IntoIterator<Item = (usize, i64)>>(syllables: I) -> Self {
        let mut w = Self::identity();
        for (g, e) in syllables {
            w.push_syllable(g, e);
        }
        w
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syl
    }

    pub fn is_identity(&self) -> bool {
        self.syl.is_empty()
    }

    /// Number of letters.
    pub fn len(&self) -> usize {
        self.syl.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syl.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.syl
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat(Letter::new(g, e < 0)).take(e.unsigned_abs() as usize))
    }

    pub fn to_letters(&self) -> Vec<Letter> {
        self.letters().collect()
    }

    pub fn first_letter(&self) -> Option<Letter> {
        self.syl.first().map(|&(g, e)| Letter::new(g, e < 0))
    }

    pub fn last_letter(&self) -> Option<Letter> {
        self.syl.last().map(|&(g, e)| Letter::new(g, e < 0))
    }

    pub fn push_letter(&mut self, l: Letter) {
        self.push_syllable(l.gen(), l.sign());
    }

    pub fn push_syllable(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.syl.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.syl.pop();
                }
                return;
            }
        }
        self.syl.push((g, e));
    }

    pub fn append(&mut self, other: &ElementWord) {
        for &(g, e) in &other.syl {
            self.push_syllable(g, e);
        }
    }

    /// Free product `self · other`.
    pub fn mul(&self, other: &ElementWord) -> ElementWord {
        let mut w = self.clone();
        w.append(other);
        w
    }

    pub fn inverse(&self) -> ElementWord {
        ElementWord {
            syl: self.syl.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    /// Free power; negative exponents invert.
    pub fn pow(&self, n: i64) -> ElementWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut w = ElementWord::identity();
        for _ in 0..n.unsigned_abs() {
            w.append(&base);
        }
        w
    }

    /// `u v u^-1 v^-1`.
    pub fn commutator(u: &ElementWord, v: &ElementWord) -> ElementWord {
        u.mul(v).mul(&u.inverse()).mul(&v.inverse())
    }

    pub fn conjugate_by(&self, k: &ElementWord) -> ElementWord {
        k.mul(self).mul(&k.inverse())
    }

    /// Replace every generator `g` by `images[g]`.
    pub fn substitute(&self, images: &[ElementWord]) -> ElementWord {
        let mut w = ElementWord::identity();
        for &(g, e) in &self.syl {
            w.append(&images[g].pow(e));
        }
        w
    }

    /// Relabel generators through `map[g]`.
    pub fn relabel(&self, map: &[usize]) -> ElementWord {
        ElementWord::from_syllables(self.syl.iter().map(|&(g, e)| (map[g], e)))
    }

    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.syl.iter().filter(|s| s.0 == g).map(|s| s.1).sum()
    }

    pub fn total_exponent(&self) -> i64 {
        self.syl.iter().map(|s| s.1).sum()
    }

    /// Sorted distinct generators occurring in the word.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.syl.iter().map(|s| s.0).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Cyclically reduced core `c` and conjugator `k` with `self = k c k^-1`.
    pub fn cyclic_reduction(&self) -> (ElementWord, ElementWord) {
        let letters = self.to_letters();
        let (mut i, mut j) = (0usize, letters.len());
        while j > i + 1 && letters[i] == letters[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        (
            ElementWord::from_letters(letters[i..j].iter().copied()),
            ElementWord::from_letters(letters[..i].iter().copied()),
        )
    }

    /// Length first, then letters in `Letter` order.
    pub fn shortlex_cmp(&self, other: &ElementWord) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters().cmp(other.letters()))
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay { word: self, alphabet }
    }
}

pub struct WordDisplay<'a> {
    word: &'a ElementWord,
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return f.write_str("1");
        }
        for (i, &(g, e)) in self.word.syl.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            f.write_str(self.alphabet.name(g))?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Ordered generator names.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl From<Vec<String>> for Alphabet {
    fn from(names: Vec<String>) -> Self {
        Alphabet::new(names)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.names
    }
}

impl Alphabet {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(names: I) -> Self {
        let mut a = Alphabet::default();
        for n in names {
            a.intern(&n.into());
        }
        a
    }

    /// Index of `name`, adding it if absent.
    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn parse(&self, s: &str) -> Result<ElementWord> {
        Parser::run(s, AlphabetRef::Fixed(self))
    }

    /// Parse, adding unseen identifiers as new generators.
    pub fn parse_extending(&mut self, s: &str) -> Result<ElementWord> {
        Parser::run(s, AlphabetRef::Growing(self))
    }

    pub fn render(&self, w: &ElementWord) -> String {
        w.display(self).to_string()
    }
}

enum AlphabetRef<'a> {
    Fixed(&'a Alphabet),
    Growing(&'a mut Alphabet),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Caret,
    Star,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    End,
}

struct Parser<'a> {
    toks: Vec<(Tok, usize, String)>,
    at: usize,
    alphabet: AlphabetRef<'a>,
}

fn tokenize(s: &str) -> Result<Vec<(Tok, usize, String)>> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '^' => Some(Tok::Caret),
            '*' => Some(Tok::Star),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos, c.to_string()));
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|p| p.1).collect();
            out.push((Tok::Ident(text.clone()), pos, text));
            continue;
        }
        if c.is_ascii_digit() || c == '-' {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|p| p.1).collect();
            let v: i64 = text
                .parse()
                .map_err(|_| Error::parse(&text, pos, "malformed integer"))?;
            out.push((Tok::Int(v), pos, text));
            continue;
        }
        return Err(Error::parse(c.to_string(), pos, "unexpected character"));
    }
    out.push((Tok::End, s.len(), "<end>".to_string()));
    Ok(out)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn err_here(&self, message: &str) -> Error {
        let (_, pos, text) = &self.toks[self.at];
        Error::parse(text.clone(), *pos, message)
    }

    fn run(s: &str, alphabet: AlphabetRef<'a>) -> Result<ElementWord> {
        let mut p = Parser {
            toks: tokenize(s)?,
            at: 0,
            alphabet,
        };
        let w = p.word()?;
        if *p.peek() != Tok::End {
            return Err(p.err_here("unexpected token"));
        }
        Ok(w)
    }

    fn starts_term(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen | Tok::LBracket | Tok::Int(1))
    }

    fn word(&mut self) -> Result<ElementWord> {
        let mut w = ElementWord::identity();
        if !self.starts_term() {
            return Ok(w);
        }
        w.append(&self.term()?);
        loop {
            if *self.peek() == Tok::Star {
                self.at += 1;
                if !self.starts_term() {
                    return Err(self.err_here("expected a factor after `*`"));
                }
                w.append(&self.term()?);
            } else if self.starts_term() {
                w.append(&self.term()?);
            } else {
                return Ok(w);
            }
        }
    }

    fn term(&mut self) -> Result<ElementWord> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.at += 1;
            match *self.peek() {
                Tok::Int(n) => {
                    self.at += 1;
                    Ok(base.pow(n))
                }
                _ => Err(self.err_here("expected an integer exponent after `^`")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<ElementWord> {
        match self.peek().clone() {
            Tok::Int(1) => {
                self.at += 1;
                Ok(ElementWord::identity())
            }
            Tok::Ident(name) => {
                let w = self.resolve(&name)?;
                self.at += 1;
                Ok(w)
            }
            Tok::LParen => {
                self.at += 1;
                let w = self.word()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.err_here("expected `)`"));
                }
                self.at += 1;
                Ok(w)
            }
            Tok::LBracket => {
                self.at += 1;
                let u = self.word()?;
                if *self.peek() != Tok::Comma {
                    return Err(self.err_here("expected `,` in commutator"));
                }
                self.at += 1;
                let v = self.word()?;
                if *self.peek() != Tok::RBracket {
                    return Err(self.err_here("expected `]`"));
                }
                self.at += 1;
                Ok(ElementWord::commutator(&u, &v))
            }
            _ => Err(self.err_here("expected a generator")),
        }
    }

    fn resolve(&mut self, name: &str) -> Result<ElementWord> {
        match &mut self.alphabet {
            AlphabetRef::Growing(a) => Ok(ElementWord::gen(a.intern(name))),
            AlphabetRef::Fixed(a) => {
                if let Some(g) = a.index_of(name) {
                    return Ok(ElementWord::gen(g));
                }
                let mut w = ElementWord::identity();
                for c in name.chars() {
                    match a.index_of(&c.to_string()) {
                        Some(g) => w.push_syllable(g, 1),
                        None => return Err(self.err_here("unknown generator")),
                    }
                }
                Ok(w)
            }
        }
    }
}
