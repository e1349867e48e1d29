//! Finite presentations with parametrised relator families, relator checks
//! against group models, finite group tables and homomorphism counting.
//!
//! # Text format
//!
//! A presentation is a `;`-separated list of sections:
//!
//! ```text
//! name: <ident>                                  (optional)
//! gens: <ident> <ident> ...                      (required)
//! rel: <relation>, <relation>, ...               (any number of rel sections)
//! fam(n>=<int>): <expr> = <expr> [if n (in|notin) I else <expr>]
//! I = <set>                                      ({1,3}, {}, all, all\{2})
//! ```
//!
//! A relation is `expr` (meaning `expr = 1`) or a chain `e₁ = e₂ = … = e_k`.
//! Expressions are products of factors separated by spaces or `*`; a factor
//! is an atom with an optional exponent `^k`, `^-k`, `^n` or `^-n` (the
//! symbol `n` only inside `fam`). Atoms are generator names, `1`,
//! parenthesised expressions, commutators `[x, y]` or `comm(x, y)`, both
//! meaning `x y x⁻¹ y⁻¹`. An identifier that is not a generator is split
//! greedily into generator names, so `xyz` reads as `x y z`.
//!
//! # Truncating families
//!
//! In a finite target, if the symbolic generator `t` maps to an element of
//! order `m`, the left side of a family relator depends on `n` only modulo
//! `m`. Its right side depends on whether `n ∈ I`, which is constant for
//! `n > L`, where `L` is the largest integer listed in the description of
//! `I`. Checking `n_min ≤ n ≤ max(L, n_min − 1) + m` therefore covers every
//! `n`. Checking only `n ≤ m` is not enough: for `I = {1}` and the target
//! ℤ/2 with `t ↦ 0`, the relator at `n = 2` forces `z ↦ 0`, which `n = 1`
//! alone does not.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::groups::{power, Generator, GroupModel, TwistSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("parse error at offset {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("no image given for generator `{0}`")]
    MissingAssignment(String),
    #[error("search needs {needed} assignments, over the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("invalid group table `{name}`: {message}")]
    InvalidTable { name: String, message: String },
    #[error("unknown target group `{0}`")]
    UnknownTarget(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

type Result<T> = std::result::Result<T, PresentationError>;

/// Word as (generator index, exponent) letters.
pub type Word = Vec<(usize, i64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Exponent {
    Const(i64),
    /// `coefficient · n`.
    Param(i64),
}

impl Exponent {
    fn at(self, n: i64) -> i64 {
        match self {
            Exponent::Const(k) => k,
            Exponent::Param(c) => c * n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Expr {
    One,
    Gen(usize),
    Seq(Vec<Expr>),
    Pow(Box<Expr>, Exponent),
    Comm(Box<Expr>, Box<Expr>),
}

fn invert(w: &[(usize, i64)]) -> Word {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

fn merge(w: Word) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for (g, e) in w {
        if e == 0 {
            continue;
        }
        match out.last_mut() {
            Some((h, f)) if *h == g => {
                *f += e;
                if *f == 0 {
                    out.pop();
                }
            }
            _ => out.push((g, e)),
        }
    }
    out
}

impl Expr {
    fn expand_into(&self, n: i64, out: &mut Word) {
        match self {
            Expr::One => {}
            Expr::Gen(g) => out.push((*g, 1)),
            Expr::Seq(v) => v.iter().for_each(|e| e.expand_into(n, out)),
            Expr::Pow(e, k) => {
                let k = k.at(n);
                if let Expr::Gen(g) = **e {
                    out.push((g, k));
                    return;
                }
                let mut w = Vec::new();
                e.expand_into(n, &mut w);
                let w = if k < 0 { invert(&w) } else { w };
                for _ in 0..k.unsigned_abs() {
                    out.extend_from_slice(&w);
                }
            }
            Expr::Comm(x, y) => {
                let (mut wx, mut wy) = (Vec::new(), Vec::new());
                x.expand_into(n, &mut wx);
                y.expand_into(n, &mut wy);
                out.extend_from_slice(&wx);
                out.extend_from_slice(&wy);
                out.extend(invert(&wx));
                out.extend(invert(&wy));
            }
        }
    }

    fn expand(&self, n: i64) -> Word {
        let mut w = Vec::new();
        self.expand_into(n, &mut w);
        merge(w)
    }

    fn visit(&self, f: &mut dyn FnMut(usize, Option<Exponent>)) {
        match self {
            Expr::One => {}
            Expr::Gen(g) => f(*g, None),
            Expr::Seq(v) => v.iter().for_each(|e| e.visit(f)),
            Expr::Pow(e, k) => match **e {
                Expr::Gen(g) => f(g, Some(*k)),
                _ => {
                    if let Exponent::Param(_) = k {
                        e.visit(&mut |g, _| f(g, Some(*k)));
                    } else {
                        e.visit(f);
                    }
                }
            },
            Expr::Comm(x, y) => {
                x.visit(f);
                y.visit(f);
            }
        }
    }

    fn generators(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        self.visit(&mut |g, _| {
            s.insert(g);
        });
        s
    }

    /// Generators raised to a power involving `n`.
    fn symbolic_generators(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        self.visit(&mut |g, k| {
            if let Some(Exponent::Param(_)) = k {
                s.insert(g);
            }
        });
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Membership {
    In,
    NotIn,
}

/// `lhs = rhs` for all `n >= n_min`, or `lhs = rhs if n (in|notin) I else alt`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    text: String,
    n_min: i64,
    lhs: Expr,
    rhs: Expr,
    alternative: Option<(Membership, Expr)>,
}

impl Family {
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    /// The relator word `lhs · rhs(n)⁻¹` at parameter `n`.
    pub fn word(&self, n: i64, twist: Option<&TwistSet>) -> Word {
        let rhs = match &self.alternative {
            None => &self.rhs,
            Some((cond, alt)) => {
                let member = n >= 1 && twist.is_some_and(|i| i.contains(n as u64));
                let primary = match cond {
                    Membership::In => member,
                    Membership::NotIn => !member,
                };
                if primary {
                    &self.rhs
                } else {
                    alt
                }
            }
        };
        let mut w = self.lhs.expand(n);
        w.extend(invert(&rhs.expand(n)));
        merge(w)
    }

    fn generators(&self) -> BTreeSet<usize> {
        let mut s = self.lhs.generators();
        s.extend(self.rhs.generators());
        if let Some((_, alt)) = &self.alternative {
            s.extend(alt.generators());
        }
        s
    }

    fn symbolic_generators(&self) -> BTreeSet<usize> {
        let mut s = self.lhs.symbolic_generators();
        s.extend(self.rhs.symbolic_generators());
        if let Some((_, alt)) = &self.alternative {
            s.extend(alt.symbolic_generators());
        }
        s
    }

    fn is_conditional(&self) -> bool {
        self.alternative.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relator {
    pub text: String,
    pub word: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePresentation {
    pub name: String,
    pub generators: Vec<String>,
    pub relators: Vec<Relator>,
    pub families: Vec<Family>,
    pub twist: Option<TwistSet>,
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
}

fn lex(text: &str, base: usize) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        let pos = base + i;
        if c.is_whitespace() {
            it.next();
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    s.push(d);
                    it.next();
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), pos));
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_ascii_digit() {
                    s.push(d);
                    it.next();
                } else {
                    break;
                }
            }
            let v = s.parse().map_err(|_| PresentationError::Parse { pos, message: "integer too large".into() })?;
            out.push((Tok::Int(v), pos));
        } else {
            it.next();
            let sym = match c {
                '^' => "^",
                '-' => "-",
                ',' => ",",
                '(' => "(",
                ')' => ")",
                '[' => "[",
                ']' => "]",
                '=' => "=",
                '*' | '·' => "*",
                ':' => ":",
                '>' if it.peek().map(|p| p.1) == Some('=') => {
                    it.next();
                    ">="
                }
                other => {
                    return Err(PresentationError::Parse { pos, message: format!("unexpected character `{other}`") });
                }
            };
            out.push((Tok::Sym(sym), pos));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    gens: &'a [String],
    allow_n: bool,
    /// The last atom came from splitting an identifier such as `xy`.
    split_last: bool,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(PresentationError::Parse { pos: self.pos(), message: message.into() })
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.peek() == Some(&Tok::Sym(leak(s))) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn eat_ident(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(x)) if x == s) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self, s: &str) -> Result<()> {
        if self.eat_ident(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn at_expr_end(&self) -> bool {
        match self.peek() {
            None => true,
            Some(Tok::Sym(s)) => matches!(*s, "," | ")" | "]" | "="),
            Some(Tok::Ident(s)) => s == "if" || s == "else",
            Some(Tok::Int(_)) => false,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut factors = Vec::new();
        loop {
            self.eat_sym("*");
            if self.at_expr_end() {
                break;
            }
            factors.push(self.factor()?);
        }
        match factors.len() {
            0 => self.err("expected an expression"),
            1 => Ok(factors.pop().unwrap()),
            _ => Ok(Expr::Seq(factors)),
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let atom = self.atom()?;
        if !self.eat_sym("^") {
            return Ok(atom);
        }
        let neg = self.eat_sym("-");
        let sign = if neg { -1 } else { 1 };
        let exp = match self.peek().cloned() {
            Some(Tok::Int(k)) => {
                self.at += 1;
                Exponent::Const(sign * k)
            }
            Some(Tok::Ident(s)) if s == "n" => {
                if !self.allow_n {
                    return self.err("the parameter `n` is only allowed in `fam` sections");
                }
                self.at += 1;
                Exponent::Param(sign)
            }
            _ => return self.err("expected an exponent"),
        };
        // A generator split from a longer identifier binds the exponent to its last letter.
        Ok(match atom {
            Expr::Seq(mut v) if matches!(v.last(), Some(Expr::Gen(_))) && self.split_last => {
                let last = v.pop().unwrap();
                v.push(Expr::Pow(Box::new(last), exp));
                Expr::Seq(v)
            }
            a => Expr::Pow(Box::new(a), exp),
        })
    }

    fn atom(&mut self) -> Result<Expr> {
        self.split_last = false;
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(1)) => {
                self.at += 1;
                Ok(Expr::One)
            }
            Some(Tok::Sym("(")) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Some(Tok::Sym("[")) => {
                self.at += 1;
                let x = self.expr()?;
                self.expect_sym(",")?;
                let y = self.expr()?;
                self.expect_sym("]")?;
                Ok(Expr::Comm(Box::new(x), Box::new(y)))
            }
            Some(Tok::Ident(s)) if s == "comm" && self.toks.get(self.at + 1).map(|t| &t.0) == Some(&Tok::Sym("(")) => {
                self.at += 2;
                let x = self.expr()?;
                self.expect_sym(",")?;
                let y = self.expr()?;
                self.expect_sym(")")?;
                Ok(Expr::Comm(Box::new(x), Box::new(y)))
            }
            Some(Tok::Ident(s)) => {
                self.at += 1;
                if let Some(g) = self.gens.iter().position(|x| *x == s) {
                    return Ok(Expr::Gen(g));
                }
                let letters = split_generators(&s, self.gens)
                    .ok_or(PresentationError::Parse { pos, message: format!("unknown generator `{s}`") })?;
                self.split_last = true;
                Ok(Expr::Seq(letters.into_iter().map(Expr::Gen).collect()))
            }
            _ => self.err("expected a generator, `1`, `(`, `[` or `comm(`"),
        }
    }
}

fn leak(s: &str) -> &'static str {
    match s {
        "^" => "^",
        "-" => "-",
        "," => ",",
        "(" => "(",
        ")" => ")",
        "[" => "[",
        "]" => "]",
        "=" => "=",
        "*" => "*",
        ":" => ":",
        ">=" => ">=",
        _ => "",
    }
}

/// Greedy longest-prefix split of `s` into generator names.
fn split_generators(s: &str, gens: &[String]) -> Option<Vec<usize>> {
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(gens[i].len()));
    let mut rest = s;
    let mut out = Vec::new();
    while !rest.is_empty() {
        let &g = order.iter().find(|&&g| rest.starts_with(gens[g].as_str()))?;
        out.push(g);
        rest = &rest[gens[g].len()..];
    }
    Some(out)
}

/// Splits on `;` and returns `(offset, section)` pairs.
fn sections(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if c == ';' {
            out.push((start, &text[start..i]));
            start = i + 1;
        }
    }
    out.push((start, &text[start..]));
    out.into_iter()
        .filter(|(_, s)| !s.trim().is_empty())
        .map(|(o, s)| {
            let lead = s.len() - s.trim_start().len();
            (o + lead, s.trim())
        })
        .collect()
}

impl FinitePresentation {
    /// Parses the text format described in the module documentation.
    pub fn parse(text: &str) -> Result<Self> {
        let secs = sections(text);
        let mut name = None;
        let mut generators: Option<Vec<String>> = None;
        let mut twist = None;
        for &(off, s) in &secs {
            if let Some(rest) = s.strip_prefix("gens:") {
                if generators.is_some() {
                    return Err(PresentationError::Parse { pos: off, message: "duplicate `gens` section".into() });
                }
                let mut gens = Vec::new();
                for (tok, pos) in lex(rest, off + 5)? {
                    match tok {
                        Tok::Ident(g) if g != "n" && g != "comm" && !gens.contains(&g) => gens.push(g),
                        Tok::Sym(",") => {}
                        _ => return Err(PresentationError::Parse { pos, message: "expected a new generator name".into() }),
                    }
                }
                if gens.is_empty() {
                    return Err(PresentationError::Parse { pos: off, message: "no generators".into() });
                }
                generators = Some(gens);
            } else if let Some(rest) = s.strip_prefix("name:") {
                name = Some(rest.trim().to_string());
            } else if let Some(rest) = s.strip_prefix('I').map(str::trim_start).and_then(|r| r.strip_prefix('=')) {
                let set: TwistSet = rest
                    .trim()
                    .parse()
                    .map_err(|e| PresentationError::Parse { pos: off, message: format!("bad set: {e}") })?;
                twist = Some(set);
            }
        }
        let generators =
            generators.ok_or(PresentationError::Parse { pos: 0, message: "missing `gens:` section".into() })?;
        let mut relators = Vec::new();
        let mut families = Vec::new();
        for &(off, s) in &secs {
            if s.starts_with("gens:") || s.starts_with("name:") {
                continue;
            }
            if s.strip_prefix('I').is_some_and(|r| r.trim_start().starts_with('=')) {
                continue;
            }
            if let Some(rest) = s.strip_prefix("rel:") {
                let mut p = Parser { toks: lex(rest, off + 4)?, at: 0, end: off + s.len(), gens: &generators, allow_n: false, split_last: false };
                loop {
                    let start = p.at;
                    let mut chain = vec![p.expr()?];
                    while p.eat_sym("=") {
                        chain.push(p.expr()?);
                    }
                    let text = token_text(rest, off + 4, &p.toks[start..p.at]);
                    for pair in chain.windows(2) {
                        let mut w = pair[0].expand(0);
                        w.extend(invert(&pair[1].expand(0)));
                        relators.push(Relator { text: text.clone(), word: merge(w) });
                    }
                    if chain.len() == 1 {
                        relators.push(Relator { text, word: chain[0].expand(0) });
                    }
                    if p.peek().is_none() {
                        break;
                    }
                    p.expect_sym(",")?;
                }
            } else if s.starts_with("fam") {
                let mut p = Parser { toks: lex(s, off)?, at: 0, end: off + s.len(), gens: &generators, allow_n: true, split_last: false };
                p.expect_ident("fam")?;
                p.expect_sym("(")?;
                p.expect_ident("n")?;
                p.expect_sym(">=")?;
                let n_min = match p.peek().cloned() {
                    Some(Tok::Int(k)) => {
                        p.at += 1;
                        k
                    }
                    _ => return p.err("expected the least value of n"),
                };
                p.expect_sym(")")?;
                p.expect_sym(":")?;
                let body_start = p.at;
                let lhs = p.expr()?;
                p.expect_sym("=")?;
                let rhs = p.expr()?;
                let alternative = if p.eat_ident("if") {
                    p.expect_ident("n")?;
                    let cond = if p.eat_ident("notin") {
                        Membership::NotIn
                    } else if p.eat_ident("in") {
                        Membership::In
                    } else {
                        return p.err("expected `in` or `notin`");
                    };
                    p.expect_ident("I")?;
                    p.expect_ident("else")?;
                    if twist.is_none() {
                        return p.err("conditional family needs an `I = ...` section");
                    }
                    Some((cond, p.expr()?))
                } else {
                    None
                };
                if p.peek().is_some() {
                    return p.err("unexpected trailing input");
                }
                let text = token_text(s, off, &p.toks[body_start..]);
                families.push(Family { text, n_min, lhs, rhs, alternative });
            } else {
                return Err(PresentationError::Parse {
                    pos: off,
                    message: "expected `gens:`, `rel:`, `fam(n>=k):`, `I =` or `name:`".into(),
                });
            }
        }
        Ok(FinitePresentation {
            name: name.unwrap_or_else(|| "presentation".into()),
            generators,
            relators,
            families,
            twist,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Largest integer mentioned in the description of `I` (0 when there is none).
    pub fn twist_horizon(&self) -> i64 {
        self.twist.as_ref().map_or(0, |t| t.max_listed() as i64)
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }
}

fn token_text(src: &str, base: usize, toks: &[(Tok, usize)]) -> String {
    match (toks.first(), toks.last()) {
        (Some(a), Some(b)) => {
            let start = a.1 - base;
            let end_tok = match &b.0 {
                Tok::Ident(s) => s.len(),
                Tok::Int(k) => k.to_string().len(),
                Tok::Sym(s) => s.len(),
            };
            src[start..b.1 - base + end_tok].trim().to_string()
        }
        _ => String::new(),
    }
}

// ---------------------------------------------------------------------------
// Named presentations

fn twist_text(i: &TwistSet) -> String {
    format!(
        "name: GI:I={i}; gens: a t z; rel: a^2, z^2, [z,a], [z,t]; fam(n>=1): comm(t^n a t^-n, a) = z if n notin I else 1; I = {i}"
    )
}

pub fn lamplighter() -> FinitePresentation {
    FinitePresentation::parse("name: lamplighter; gens: a t; rel: a^2; fam(n>=1): comm(t^n a t^-n, a) = 1")
        .expect("built-in presentation")
}

/// `G_I`: `a² = z² = [z,a] = [z,t] = 1`, `[tⁿat⁻ⁿ, a] = z` for `n ∉ I`, `= 1` for `n ∈ I`.
pub fn twisted_lamplighter(i: &TwistSet) -> FinitePresentation {
    FinitePresentation::parse(&twist_text(i)).expect("built-in presentation")
}

/// `⟨x, y, z | x^a = y^b = z^c = xyz = 1⟩`.
pub fn von_dyck(a: u32, b: u32, c: u32) -> FinitePresentation {
    FinitePresentation::parse(&format!("name: vondyck:{a},{b},{c}; gens: x y z; rel: x^{a}, y^{b}, z^{c}, x y z"))
        .expect("built-in presentation")
}

/// `⟨s, t, u | s² = t² = u² = (st)^a = (tu)^b = (us)^c = 1⟩`.
pub fn triangle(a: u32, b: u32, c: u32) -> FinitePresentation {
    FinitePresentation::parse(&format!(
        "name: triangle:{a},{b},{c}; gens: s t u; rel: s^2, t^2, u^2, (s t)^{a}, (t u)^{b}, (u s)^{c}"
    ))
    .expect("built-in presentation")
}

/// `⟨x, y, z | x² = y³ = z⁷ = xyz⟩`.
pub fn extension_237() -> FinitePresentation {
    FinitePresentation::parse("name: ext237; gens: x y z; rel: x^2 = y^3 = z^7 = x y z").expect("built-in presentation")
}

/// `⟨a₁, b₁, …, a_g, b_g | [a₁,b₁]⋯[a_g,b_g]⟩`.
pub fn surface(genus: u32) -> Result<FinitePresentation> {
    if genus == 0 {
        return Err(PresentationError::InvalidParam("genus must be positive".into()));
    }
    let gens: Vec<String> = (1..=genus).flat_map(|i| [format!("a{i}"), format!("b{i}")]).collect();
    let rel: Vec<String> = (1..=genus).map(|i| format!("[a{i},b{i}]")).collect();
    FinitePresentation::parse(&format!("name: surface:{genus}; gens: {}; rel: {}", gens.join(" "), rel.join(" ")))
}

/// Resolves `lamplighter`, `GI:I=<set>`, `vondyck:a,b,c`, `triangle:a,b,c`,
/// `ext237`, `surface:<g>`, or parses the argument as presentation text.
pub fn named_presentation(name: &str) -> Result<FinitePresentation> {
    let n = name.trim();
    let triple = |s: &str| -> Result<(u32, u32, u32)> {
        let v: Vec<u32> = s.split(',').map(|x| x.trim().parse()).collect::<std::result::Result<_, _>>()
            .map_err(|_| PresentationError::InvalidParam(format!("expected three integers in `{s}`")))?;
        match v[..] {
            [a, b, c] => Ok((a, b, c)),
            _ => Err(PresentationError::InvalidParam(format!("expected three integers in `{s}`"))),
        }
    };
    if n == "lamplighter" {
        Ok(lamplighter())
    } else if let Some(set) = n.strip_prefix("GI:") {
        let i: TwistSet = set.parse().map_err(|e| PresentationError::InvalidParam(format!("{e}")))?;
        Ok(twisted_lamplighter(&i))
    } else if let Some(s) = n.strip_prefix("vondyck:") {
        let (a, b, c) = triple(s)?;
        Ok(von_dyck(a, b, c))
    } else if let Some(s) = n.strip_prefix("triangle:") {
        let (a, b, c) = triple(s)?;
        Ok(triangle(a, b, c))
    } else if n == "ext237" {
        Ok(extension_237())
    } else if let Some(g) = n.strip_prefix("surface:") {
        surface(g.trim().parse().map_err(|_| PresentationError::InvalidParam(format!("bad genus `{g}`")))?)
    } else {
        FinitePresentation::parse(n)
    }
}

// ---------------------------------------------------------------------------
// Relator checks against models

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelatorReport {
    pub presentation: String,
    pub model: String,
    pub pass: bool,
    pub checked: usize,
    /// First relator that does not evaluate to the identity, with `n` for families.
    pub failure: Option<String>,
}

fn eval_model<M: GroupModel>(model: &M, images: &[M::Element], w: &[(usize, i64)]) -> M::Element {
    w.iter()
        .fold(model.identity(), |acc, &(g, e)| model.mul(&acc, &power(model, &images[g], e)))
}

/// Evaluates every relator, and every family relator for `n_min ≤ n ≤ n_bound`, in `model`.
pub fn check_relators<M: GroupModel>(
    p: &FinitePresentation,
    model: &M,
    assignment: &HashMap<String, M::Element>,
    n_bound: i64,
) -> Result<RelatorReport> {
    if let Some(extra) = assignment.keys().filter(|k| p.generator_index(k).is_none()).min() {
        return Err(PresentationError::UnknownGenerator(extra.clone()));
    }
    let images = p
        .generators
        .iter()
        .map(|g| assignment.get(g).cloned().ok_or_else(|| PresentationError::MissingAssignment(g.clone())))
        .collect::<Result<Vec<_>>>()?;
    let mut checked = 0;
    let mut failure = None;
    'outer: for r in &p.relators {
        checked += 1;
        if !model.is_identity(&eval_model(model, &images, &r.word)) {
            failure = Some(r.text.clone());
            break 'outer;
        }
    }
    if failure.is_none() {
        'fam: for f in &p.families {
            for n in f.n_min..=n_bound {
                checked += 1;
                if !model.is_identity(&eval_model(model, &images, &f.word(n, p.twist.as_ref()))) {
                    failure = Some(format!("{} [n={n}]", f.text));
                    break 'fam;
                }
            }
        }
    }
    Ok(RelatorReport {
        presentation: p.name.clone(),
        model: model.name(),
        pass: failure.is_none(),
        checked,
        failure,
    })
}

// ---------------------------------------------------------------------------
// Finite group tables

/// Multiplication table of a finite group; element 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    name: String,
    n: usize,
    table: Vec<u16>,
    inverse: Vec<u16>,
    orders: Vec<u32>,
}

/// Largest supported table order.
pub const MAX_TABLE_ORDER: usize = 4096;

impl FiniteGroupTable {
    /// Builds a table from a row-major product table, verifying the group axioms.
    pub fn from_table(name: impl Into<String>, n: usize, table: Vec<u16>) -> Result<Self> {
        let name = name.into();
        let bad = |m: &str| PresentationError::InvalidTable { name: name.clone(), message: m.into() };
        if n == 0 || n > MAX_TABLE_ORDER || table.len() != n * n {
            return Err(bad("table must be n×n with 1 ≤ n ≤ 4096"));
        }
        if table.iter().any(|&x| x as usize >= n) {
            return Err(bad("entry out of range"));
        }
        if (0..n).any(|x| table[x] as usize != x || table[x * n] as usize != x) {
            return Err(bad("element 0 is not the identity"));
        }
        let mut inverse = vec![0u16; n];
        for (x, inv) in inverse.iter_mut().enumerate() {
            let y = (0..n).find(|&y| table[x * n + y] == 0).ok_or_else(|| bad("missing inverse"))?;
            if table[y * n + x] != 0 {
                return Err(bad("one-sided inverse"));
            }
            *inv = y as u16;
        }
        let assoc = (0..n).into_par_iter().all(|x| {
            (0..n).all(|y| {
                let xy = table[x * n + y] as usize;
                (0..n).all(|z| table[xy * n + z] == table[x * n + table[y * n + z] as usize])
            })
        });
        if !assoc {
            return Err(bad("not associative"));
        }
        let orders = (0..n)
            .map(|x| {
                let mut k = 1;
                let mut acc = x;
                while acc != 0 {
                    acc = table[acc * n + x] as usize;
                    k += 1;
                }
                k
            })
            .collect();
        Ok(FiniteGroupTable { name, n, table, inverse, orders })
    }

    /// Closure of `gens` under `mul`, with `identity` placed at index 0.
    pub fn generated_by<E: Clone + Eq + Hash>(
        name: impl Into<String>,
        identity: E,
        gens: &[E],
        mul: impl Fn(&E, &E) -> E,
    ) -> Result<Self> {
        let name = name.into();
        let mut elements = vec![identity];
        let mut index: HashMap<E, usize> = HashMap::from([(elements[0].clone(), 0)]);
        let mut i = 0;
        while i < elements.len() {
            for g in gens {
                let y = mul(&elements[i], g);
                if !index.contains_key(&y) {
                    if elements.len() >= MAX_TABLE_ORDER {
                        return Err(PresentationError::InvalidTable { name, message: "group too large".into() });
                    }
                    index.insert(y.clone(), elements.len());
                    elements.push(y);
                }
            }
            i += 1;
        }
        let n = elements.len();
        let mut table = Vec::with_capacity(n * n);
        for x in &elements {
            for y in &elements {
                let p = mul(x, y);
                let k = *index.get(&p).ok_or_else(|| PresentationError::InvalidTable {
                    name: name.clone(),
                    message: "not closed under the product".into(),
                })?;
                table.push(k as u16);
            }
        }
        Self::from_table(name, n, table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x] as usize
    }

    pub fn element_order(&self, x: usize) -> u32 {
        self.orders[x]
    }

    pub fn pow(&self, x: usize, k: i64) -> usize {
        let r = k.rem_euclid(i64::from(self.orders[x]));
        (0..r).fold(0, |acc, _| self.mul(acc, x))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|x| (0..x).all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    pub fn center_size(&self) -> usize {
        (0..self.n).filter(|&x| (0..self.n).all(|y| self.mul(x, y) == self.mul(y, x))).count()
    }

    /// Sorted multiset of element orders.
    pub fn order_profile(&self) -> Vec<u32> {
        let mut v = self.orders.clone();
        v.sort_unstable();
        v
    }

    fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Elements are table indices; every non-identity element is a generator.
impl GroupModel for FiniteGroupTable {
    type Element = usize;

    fn name(&self) -> String {
        self.name.clone()
    }

    fn identity(&self) -> usize {
        0
    }

    fn mul(&self, a: &usize, b: &usize) -> usize {
        FiniteGroupTable::mul(self, *a, *b)
    }

    fn inv(&self, a: &usize) -> usize {
        FiniteGroupTable::inv(self, *a)
    }

    fn eq(&self, a: &usize, b: &usize) -> bool {
        a == b
    }

    fn digest(&self, a: &usize) -> u64 {
        *a as u64
    }

    fn generators(&self) -> Vec<Generator<usize>> {
        (1..self.n).map(|x| Generator::new(format!("g{x}"), x)).collect()
    }

    fn format(&self, a: &usize) -> String {
        format!("g{a}")
    }
}

pub fn cyclic(k: usize) -> Result<FiniteGroupTable> {
    if k == 0 {
        return Err(PresentationError::InvalidParam("cyclic order must be positive".into()));
    }
    let table = (0..k * k).map(|i| ((i / k + i % k) % k) as u16).collect();
    FiniteGroupTable::from_table(format!("Z{k}"), k, table)
}

/// `⟨x, y | x^m = 1, y^k = x^s, y x y⁻¹ = x^r⟩` with elements `x^i y^j`.
pub fn metacyclic(name: &str, m: u64, k: u64, r: u64, s: u64) -> Result<FiniteGroupTable> {
    let rpow = |j: u64| (0..j).fold(1u64, |acc, _| acc * r % m);
    let mul = |a: &(u64, u64), b: &(u64, u64)| {
        let i = a.0 + b.0 * rpow(a.1);
        let j = a.1 + b.1;
        if j >= k {
            ((i + s) % m, j - k)
        } else {
            (i % m, j)
        }
    };
    FiniteGroupTable::generated_by(name, (0, 0), &[(1 % m, 0), (0, 1 % k)], mul)
}

/// Dihedral group of order `2n`.
pub fn dihedral(n: u64) -> Result<FiniteGroupTable> {
    metacyclic(&format!("D{n}"), n, 2, n - 1, 0)
}

/// Dicyclic group of order `4n` (`Q8` for `n = 2`).
pub fn dicyclic(n: u64) -> Result<FiniteGroupTable> {
    let name = match n {
        2 => "Q8".to_string(),
        4 => "Q16".to_string(),
        _ => format!("Dic{n}"),
    };
    metacyclic(&name, 2 * n, 2, 2 * n - 1, n)
}

pub fn quaternion() -> FiniteGroupTable {
    dicyclic(2).expect("Q8")
}

fn permutation_group(name: &str, degree: usize, gens: &[Vec<u8>]) -> Result<FiniteGroupTable> {
    let id: Vec<u8> = (0..degree as u8).collect();
    // (p ∘ q)(i) = p(q(i)).
    FiniteGroupTable::generated_by(name, id, gens, |p, q| q.iter().map(|&i| p[i as usize]).collect())
}

pub fn symmetric(n: usize) -> Result<FiniteGroupTable> {
    if !(1..=6).contains(&n) {
        return Err(PresentationError::InvalidParam("symmetric degree must be in 1..=6".into()));
    }
    let mut swap: Vec<u8> = (0..n as u8).collect();
    if n > 1 {
        swap.swap(0, 1);
    }
    let cycle: Vec<u8> = (0..n as u8).map(|i| (i + 1) % n as u8).collect();
    permutation_group(&format!("S{n}"), n, &[swap, cycle])
}

pub fn alternating4() -> FiniteGroupTable {
    permutation_group("A4", 4, &[vec![1, 2, 0, 3], vec![0, 2, 3, 1]]).expect("A4")
}

pub fn direct_product(a: &FiniteGroupTable, b: &FiniteGroupTable) -> Result<FiniteGroupTable> {
    let (na, nb) = (a.order(), b.order());
    let n = na * nb;
    if n > MAX_TABLE_ORDER {
        return Err(PresentationError::InvalidParam("product too large".into()));
    }
    let mut table = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let p = a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb);
            table.push(p as u16);
        }
    }
    FiniteGroupTable::from_table(format!("{}x{}", a.name(), b.name()), n, table)
}

/// `N ⋊ ℤ/2` for an automorphism `phi` of `N` with `phi² = id`.
pub fn semidirect_z2(name: &str, n: &FiniteGroupTable, phi: &[usize]) -> Result<FiniteGroupTable> {
    let mul = |x: &(usize, u8), y: &(usize, u8)| {
        let y0 = if x.1 == 1 { phi[y.0] } else { y.0 };
        (n.mul(x.0, y0), x.1 ^ y.1)
    };
    let mut gens: Vec<(usize, u8)> = (0..n.order()).map(|x| (x, 0)).collect();
    gens.push((0, 1));
    let g = FiniteGroupTable::generated_by(name, (0, 0), &gens, mul)?;
    if g.order() != 2 * n.order() {
        return Err(PresentationError::InvalidTable { name: name.into(), message: "map is not an involutive automorphism".into() });
    }
    Ok(g)
}

/// The Pauli group `⟨X, Z, iI⟩` of monomial 2×2 matrices, order 16.
pub fn pauli() -> FiniteGroupTable {
    // (perm, phases): column j is i^{phase_j} e_{perm_j}.
    type Mono = ([u8; 2], [u8; 2]);
    let mul = |a: &Mono, b: &Mono| {
        let mut perm = [0u8; 2];
        let mut ph = [0u8; 2];
        for j in 0..2 {
            let k = b.0[j] as usize;
            perm[j] = a.0[k];
            ph[j] = (b.1[j] + a.1[k]) % 4;
        }
        (perm, ph)
    };
    let x: Mono = ([1, 0], [0, 0]);
    let z: Mono = ([0, 1], [0, 2]);
    let i: Mono = ([0, 1], [1, 1]);
    FiniteGroupTable::generated_by("Pauli", ([0, 1], [0, 0]), &[x, z, i], mul).expect("Pauli group")
}

fn product_of(parts: &[FiniteGroupTable]) -> FiniteGroupTable {
    let mut acc = parts[0].clone();
    for p in &parts[1..] {
        acc = direct_product(&acc, p).expect("small product");
    }
    acc
}

/// One representative of every isomorphism class of groups of order `<= max_order` (at most 16).
pub fn small_groups(max_order: usize) -> Result<Vec<FiniteGroupTable>> {
    if max_order > 16 {
        return Err(PresentationError::InvalidParam("the catalog stops at order 16".into()));
    }
    let z = |k| cyclic(k).expect("cyclic");
    let mut out = Vec::new();
    for n in 1..=max_order {
        match n {
            4 => out.extend([z(4), product_of(&[z(2), z(2)])]),
            6 => out.extend([z(6), symmetric(3)?]),
            8 => out.extend([
                z(8),
                product_of(&[z(4), z(2)]),
                product_of(&[z(2), z(2), z(2)]),
                dihedral(4)?,
                quaternion(),
            ]),
            9 => out.extend([z(9), product_of(&[z(3), z(3)])]),
            10 => out.extend([z(10), dihedral(5)?]),
            12 => out.extend([z(12), product_of(&[z(6), z(2)]), dihedral(6)?, alternating4(), dicyclic(3)?]),
            14 => out.extend([z(14), dihedral(7)?]),
            16 => {
                let z4z2 = product_of(&[z(4), z(2)]);
                // (i, j) ↦ (i, j + i mod 2) on ℤ/4 × ℤ/2, indexed as 2i + j.
                let phi: Vec<usize> = (0..8).map(|x| 2 * (x / 2) + ((x % 2) + (x / 2)) % 2).collect();
                out.extend([
                    z(16),
                    product_of(&[z(4), z(4)]),
                    semidirect_z2("(Z4xZ2):Z2", &z4z2, &phi)?,
                    metacyclic("Z4:Z4", 4, 4, 3, 0)?,
                    product_of(&[z(8), z(2)]),
                    metacyclic("M16", 8, 2, 5, 0)?,
                    dihedral(8)?,
                    metacyclic("SD16", 8, 2, 3, 0)?,
                    dicyclic(4)?,
                    product_of(&[z(4), z(2), z(2)]),
                    product_of(&[z(2), dihedral(4)?]),
                    product_of(&[z(2), quaternion()]),
                    pauli(),
                    product_of(&[z(2), z(2), z(2), z(2)]),
                ]);
            }
            _ => out.push(z(n)),
        }
    }
    Ok(out)
}

/// Resolves `trivial`, `Z<k>`, `D<n>`, `Q8`, `Q16`, `Dic<n>`, `S<n>`, `A4`,
/// `Pauli`, catalog names such as `SD16`, and products `AxB`.
pub fn named_target(name: &str) -> Result<FiniteGroupTable> {
    let n = name.trim();
    let unknown = || PresentationError::UnknownTarget(n.to_string());
    if n == "trivial" {
        return Ok(cyclic(1)?.renamed("trivial"));
    }
    if let Some(g) = small_groups(16)?.into_iter().find(|g| g.name() == n) {
        return Ok(g);
    }
    if n.contains('x') && !n.starts_with('(') {
        let parts = n.split('x').map(named_target).collect::<Result<Vec<_>>>()?;
        return Ok(product_of(&parts));
    }
    let num = |s: &str| s.parse::<u64>().map_err(|_| unknown());
    match n {
        "Q8" => Ok(quaternion()),
        "A4" => Ok(alternating4()),
        "Pauli" => Ok(pauli()),
        _ => {
            if let Some(k) = n.strip_prefix("Dic") {
                dicyclic(num(k)?)
            } else if let Some(k) = n.strip_prefix('Z') {
                cyclic(num(k)? as usize)
            } else if let Some(k) = n.strip_prefix('D') {
                let k = num(k)?;
                if k < 2 {
                    return Err(unknown());
                }
                dihedral(k)
            } else if let Some(k) = n.strip_prefix('S') {
                symmetric(num(k)? as usize)
            } else {
                Err(unknown())
            }
        }
    }
}

/// Comma-separated target names; `small:<k>` expands to the catalog up to order `k`.
pub fn parse_targets(list: &str) -> Result<Vec<FiniteGroupTable>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some(k) = item.strip_prefix("small:") {
            let k = k.parse().map_err(|_| PresentationError::UnknownTarget(item.to_string()))?;
            out.extend(small_groups(k)?);
        } else {
            out.push(named_target(item)?);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Homomorphism counting

/// Default cap on `|H|^{#generators}`.
pub const DEFAULT_HOM_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomCountReport {
    pub presentation: String,
    pub target: String,
    pub count: u64,
    /// Largest `n` any family relator was evaluated at (0 without families).
    pub family_bound: i64,
    #[serde(skip)]
    pub elapsed: Duration,
}

struct TableEval<'a> {
    h: &'a FiniteGroupTable,
}

impl TableEval<'_> {
    fn eval(&self, images: &[usize], w: &[(usize, i64)]) -> usize {
        w.iter().fold(0, |acc, &(g, e)| self.h.mul(acc, self.h.pow(images[g], e)))
    }
}

struct FamilyPlan {
    /// `words[i]` is the relator at `n = n_min + i`.
    words: Vec<Word>,
    n_min: i64,
    symbolic: Vec<usize>,
    /// `max(L, n_min − 1)` for conditional families, `n_min − 1` otherwise.
    horizon: i64,
}

struct SearchPlan {
    k: usize,
    relators_at: Vec<Vec<Word>>,
    families_at: Vec<Vec<FamilyPlan>>,
}

fn lcm(a: u64, b: u64) -> u64 {
    a / num_integer::gcd(a, b) * b
}

impl SearchPlan {
    fn new(p: &FinitePresentation, h: &FiniteGroupTable) -> Self {
        let k = p.generators.len();
        let ready = |gens: &BTreeSet<usize>| gens.iter().next_back().copied().unwrap_or(0);
        let mut relators_at = vec![Vec::new(); k];
        for r in &p.relators {
            let gens: BTreeSet<usize> = r.word.iter().map(|l| l.0).collect();
            relators_at[ready(&gens)].push(r.word.clone());
        }
        let mut families_at: Vec<Vec<FamilyPlan>> = (0..k).map(|_| Vec::new()).collect();
        let horizon_i = p.twist_horizon();
        for f in &p.families {
            let horizon = if f.is_conditional() { horizon_i.max(f.n_min - 1) } else { f.n_min - 1 };
            // Periods divide |H|, so n up to horizon + |H| covers every assignment.
            let top = horizon + h.order() as i64;
            let words = (f.n_min..=top).map(|n| f.word(n, p.twist.as_ref())).collect();
            families_at[ready(&f.generators())].push(FamilyPlan {
                words,
                n_min: f.n_min,
                symbolic: f.symbolic_generators().into_iter().collect(),
                horizon,
            });
        }
        SearchPlan { k, relators_at, families_at }
    }

    fn level_ok(&self, ev: &TableEval, images: &[usize], level: usize, max_n: &mut i64) -> bool {
        if !self.relators_at[level].iter().all(|w| ev.eval(images, w) == 0) {
            return false;
        }
        for f in &self.families_at[level] {
            let period = f.symbolic.iter().fold(1u64, |acc, &g| lcm(acc, u64::from(ev.h.element_order(images[g]))));
            let top = f.horizon + period as i64;
            *max_n = (*max_n).max(top);
            let upto = (top - f.n_min + 1).max(0) as usize;
            if !f.words[..upto].iter().all(|w| ev.eval(images, w) == 0) {
                return false;
            }
        }
        true
    }

    fn count_from(&self, ev: &TableEval, images: &mut Vec<usize>, level: usize, max_n: &mut i64) -> u64 {
        if level == self.k {
            return 1;
        }
        let mut total = 0;
        for x in 0..ev.h.order() {
            images[level] = x;
            if self.level_ok(ev, images, level, max_n) {
                total += self.count_from(ev, images, level + 1, max_n);
            }
        }
        total
    }
}

/// Exact number of homomorphisms `⟨p⟩ → h`, by backtracking in generator
/// order with relators checked as soon as their generators are assigned.
pub fn count_homs(p: &FinitePresentation, h: &FiniteGroupTable, budget: u128) -> Result<HomCountReport> {
    let start = Instant::now();
    let k = p.generators.len() as u32;
    let needed = (h.order() as u128).checked_pow(k).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(PresentationError::BudgetExceeded { needed, budget });
    }
    let plan = SearchPlan::new(p, h);
    let ev = TableEval { h };
    let (count, max_n) = (0..h.order())
        .into_par_iter()
        .map(|x| {
            let mut images = vec![0usize; plan.k];
            images[0] = x;
            let mut max_n = 0;
            let c = if plan.level_ok(&ev, &images, 0, &mut max_n) {
                plan.count_from(&ev, &mut images, 1, &mut max_n)
            } else {
                0
            };
            (c, max_n)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    Ok(HomCountReport {
        presentation: p.name.clone(),
        target: h.name().to_string(),
        count,
        family_bound: max_n,
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Separated { target: String, a: u64, b: u64 },
    Indistinguishable { targets: Vec<String> },
}

impl Verdict {
    pub fn is_separated(&self) -> bool {
        matches!(self, Verdict::Separated { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Separated { target, a, b } => write!(f, "separated by {target} ({a} vs {b})"),
            Verdict::Indistinguishable { .. } => f.write_str("indistinguishable by given targets"),
        }
    }
}

/// Compares hom counts target by target; the first mismatch certifies non-isomorphism.
pub fn separate(a: &FinitePresentation, b: &FinitePresentation, targets: &[FiniteGroupTable], budget: u128) -> Result<Verdict> {
    for h in targets {
        let ca = count_homs(a, h, budget)?.count;
        let cb = count_homs(b, h, budget)?.count;
        if ca != cb {
            return Ok(Verdict::Separated { target: h.name().to_string(), a: ca, b: cb });
        }
    }
    let mut seen = HashSet::new();
    let names = targets.iter().map(|h| h.name().to_string()).filter(|n| seen.insert(n.clone())).collect();
    Ok(Verdict::Indistinguishable { targets: names })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{Lamplighter, LamplighterElement, TwistedLamplighter};

    /// Independent oracle: every assignment, every relator, families up to `L + |H|`.
    fn naive_count(p: &FinitePresentation, h: &FiniteGroupTable) -> u64 {
        let k = p.generators.len();
        let top = p.twist_horizon().max(0) + h.order() as i64;
        let mut words: Vec<Word> = p.relators.iter().map(|r| r.word.clone()).collect();
        for f in &p.families {
            words.extend((f.n_min..=top.max(f.n_min)).map(|n| f.word(n, p.twist.as_ref())));
        }
        let eval = |img: &[usize], w: &Word| {
            let mut acc = 0;
            for &(g, e) in w {
                for _ in 0..e.unsigned_abs() {
                    let x = if e > 0 { img[g] } else { h.inv(img[g]) };
                    acc = h.mul(acc, x);
                }
            }
            acc
        };
        let total = h.order().pow(k as u32);
        (0..total)
            .filter(|&code| {
                let img: Vec<usize> = (0..k).map(|i| code / h.order().pow(i as u32) % h.order()).collect();
                words.iter().all(|w| eval(&img, w) == 0)
            })
            .count() as u64
    }

    #[test]
    fn parse_lamplighter_text() {
        let p = FinitePresentation::parse(
            "gens: a t z; rel: a^2, z^2, [z,a], [z,t]; fam(n>=1): comm(t^n a t^-n, a) = z if n notin I else 1; I = {1,3}",
        )
        .unwrap();
        assert_eq!(p.generators, vec!["a", "t", "z"]);
        assert_eq!(p.relators.len(), 4);
        assert_eq!(p.relators[2].word, vec![(2, 1), (0, 1), (2, -1), (0, -1)]);
        assert_eq!(p.families.len(), 1);
        // n = 2 ∉ I: t² a t⁻² a t² a⁻¹ t⁻² a⁻¹ z⁻¹.
        assert_eq!(
            p.families[0].word(2, p.twist.as_ref()),
            vec![(1, 2), (0, 1), (1, -2), (0, 1), (1, 2), (0, -1), (1, -2), (0, -1), (2, -1)]
        );
        assert_eq!(p.families[0].word(3, p.twist.as_ref()).last(), Some(&(0, -1)));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = FinitePresentation::parse("gens: a b; rel: a^2, c").unwrap_err();
        assert_eq!(e, PresentationError::Parse { pos: 21, message: "unknown generator `c`".into() });
        let e = FinitePresentation::parse("gens: a; rel: a^n").unwrap_err();
        assert!(matches!(e, PresentationError::Parse { pos: 16, .. }));
        assert!(FinitePresentation::parse("rel: a").is_err());
        assert!(FinitePresentation::parse("gens: a; fam(n>=1): a^n = 1 if n in I else a").is_err());
        assert!(FinitePresentation::parse("gens: a; rel: [a, a").is_err());
        assert!(FinitePresentation::parse("gens: a; rel: a ? a").is_err());
    }

    #[test]
    fn chained_relations_and_juxtaposition() {
        let p = extension_237();
        assert_eq!(p.relators.len(), 3);
        // z^7 = x y z becomes z^7 z⁻¹ y⁻¹ x⁻¹ = z^6 y⁻¹ x⁻¹.
        assert_eq!(p.relators[2].word, vec![(2, 6), (1, -1), (0, -1)]);
        let q = FinitePresentation::parse("gens: x y z; rel: xyz, xy^2").unwrap();
        assert_eq!(q.relators[0].word, vec![(0, 1), (1, 1), (2, 1)]);
        assert_eq!(q.relators[1].word, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn relators_against_models() {
        let p = lamplighter();
        let mut asg = HashMap::new();
        asg.insert("a".to_string(), LamplighterElement::new([0], 0));
        asg.insert("t".to_string(), LamplighterElement::new([], 1));
        assert!(check_relators(&p, &Lamplighter, &asg, 20).unwrap().pass);

        asg.insert("a".to_string(), LamplighterElement::new([], 1));
        let r = check_relators(&p, &Lamplighter, &asg, 20).unwrap();
        assert_eq!(r.failure.as_deref(), Some("a^2"));

        asg.insert("q".to_string(), LamplighterElement::new([], 1));
        assert_eq!(check_relators(&p, &Lamplighter, &asg, 20), Err(PresentationError::UnknownGenerator("q".into())));

        let two: TwistSet = "{2}".parse().unwrap();
        let gi = TwistedLamplighter::new(two.clone());
        let p = twisted_lamplighter(&two);
        let asg: HashMap<String, _> = [("a", gi.a()), ("t", gi.t()), ("z", gi.z())]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        assert!(check_relators(&p, &gi, &asg, 20).unwrap().pass);
        // Wrong model: the same elements in G_{1} break the family at n = 1.
        let one = TwistedLamplighter::new("{1}".parse().unwrap());
        let asg1: HashMap<String, _> = [("a", one.a()), ("t", one.t()), ("z", one.z())]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let r = check_relators(&p, &one, &asg1, 20).unwrap();
        assert!(!r.pass);
        assert!(r.failure.unwrap().ends_with("[n=1]"));
    }

    #[test]
    fn catalog_is_valid() {
        let groups = small_groups(16).unwrap();
        assert_eq!(groups.len(), 42);
        let sixteen: Vec<_> = groups.iter().filter(|g| g.order() == 16).collect();
        assert_eq!(sixteen.len(), 14);
        assert_eq!(named_target("S4").unwrap().order(), 24);
        assert_eq!(named_target("D4").unwrap().order(), 8);
        assert_eq!(named_target("Z2xS3").unwrap().order(), 12);
        assert!(!named_target("Q8").unwrap().is_abelian());
        assert_eq!(named_target("Q8").unwrap().center_size(), 2);
        assert!(named_target("Y7").is_err());
    }

    #[test]
    fn table_validation() {
        assert!(FiniteGroupTable::from_table("bad", 2, vec![0, 1, 1, 1]).is_err());
        // Loop of order 5 that is not associative.
        let t: Vec<u16> = vec![
            0, 1, 2, 3, 4, 1, 0, 3, 4, 2, 2, 4, 0, 1, 3, 3, 2, 4, 0, 1, 4, 3, 1, 2, 0,
        ];
        assert!(FiniteGroupTable::from_table("loop", 5, t).is_err());
    }

    #[test]
    fn hom_counts_match_naive_oracle() {
        let z2 = cyclic(2).unwrap();
        let cases = [
            (twisted_lamplighter(&TwistSet::empty()), 4),
            (twisted_lamplighter(&TwistSet::all()), 8),
            (von_dyck(2, 3, 7), 1),
            (twisted_lamplighter(&"{1}".parse().unwrap()), 4),
        ];
        for (p, expected) in cases {
            assert_eq!(naive_count(&p, &z2), expected, "{}", p.name);
            assert_eq!(count_homs(&p, &z2, DEFAULT_HOM_BUDGET).unwrap().count, expected, "{}", p.name);
        }
        for h in [symmetric(3).unwrap(), quaternion(), dihedral(4).unwrap(), cyclic(4).unwrap()] {
            for p in [lamplighter(), twisted_lamplighter(&"{1,3}".parse().unwrap()), triangle(2, 3, 3), extension_237()] {
                assert_eq!(count_homs(&p, &h, DEFAULT_HOM_BUDGET).unwrap().count, naive_count(&p, &h), "{} -> {}", p.name, h.name());
            }
        }
    }

    #[test]
    fn budget_and_trivial_target() {
        let p = surface(3).unwrap();
        assert!(matches!(
            count_homs(&p, &symmetric(4).unwrap(), 1000),
            Err(PresentationError::BudgetExceeded { .. })
        ));
        assert_eq!(count_homs(&p, &named_target("trivial").unwrap(), 10).unwrap().count, 1);
    }

    #[test]
    fn separation() {
        let z2 = vec![cyclic(2).unwrap()];
        let a = twisted_lamplighter(&TwistSet::empty());
        let b = twisted_lamplighter(&TwistSet::all());
        let v = separate(&a, &b, &z2, DEFAULT_HOM_BUDGET).unwrap();
        assert_eq!(v.to_string(), "separated by Z2 (4 vs 8)");
        let v = separate(&a, &a, &z2, DEFAULT_HOM_BUDGET).unwrap();
        assert_eq!(v.to_string(), "indistinguishable by given targets");
    }
}
