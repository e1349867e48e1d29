//! The lamplighter group `L₂ = ℤ/2 ≀ ℤ` and its twisted central extensions
//! `G_I` by a central `z` of order two.
//!
//! Write `a_p = t^p a t^{-p}`. An element of `L₂` is `a_{i₁} ⋯ a_{i_k} t^n`
//! with `i₁ < … < i_k`. In `G_I` the lamps commute only up to the centre:
//! `a_p a_q = z^{β(p-q)} a_q a_p` for `p > q`, where `β(d) = 0` if `d ∈ I`
//! and `1` otherwise. Normal forms are `z^ε a_{i₁} ⋯ a_{i_k} t^n`.
//!
//! The index set `I` lives in `{1, 2, …}`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::{stable_digest, Generator, GroupError, GroupModel};

/// Subset of `{1, 2, …}` given by finitely many members or finitely many
/// non-members.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwistSet {
    complement: bool,
    listed: BTreeSet<u64>,
}

impl TwistSet {
    pub fn empty() -> Self {
        TwistSet { complement: false, listed: BTreeSet::new() }
    }

    pub fn all() -> Self {
        TwistSet { complement: true, listed: BTreeSet::new() }
    }

    pub fn finite(members: impl IntoIterator<Item = u64>) -> Result<Self, GroupError> {
        let listed: BTreeSet<u64> = members.into_iter().collect();
        if listed.contains(&0) {
            return Err(GroupError::InvalidParam("twist indices start at 1".into()));
        }
        Ok(TwistSet { complement: false, listed })
    }

    pub fn cofinite(excluded: impl IntoIterator<Item = u64>) -> Result<Self, GroupError> {
        let mut s = Self::finite(excluded)?;
        s.complement = true;
        Ok(s)
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= 1 && (self.listed.contains(&n) != self.complement)
    }

    /// Twist exponent for a lamp gap `d >= 1`.
    pub fn beta(&self, d: u64) -> u8 {
        u8::from(!self.contains(d))
    }

    /// Largest explicitly listed index; beyond it membership is constant.
    pub fn max_listed(&self) -> u64 {
        self.listed.iter().next_back().copied().unwrap_or(0)
    }

    pub fn is_all(&self) -> bool {
        self.complement && self.listed.is_empty()
    }
}

impl fmt::Display for TwistSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.listed.iter().map(u64::to_string).collect();
        match (self.complement, list.is_empty()) {
            (true, true) => write!(f, "all"),
            (true, false) => write!(f, "all-{{{}}}", list.join(",")),
            (false, _) => write!(f, "{{{}}}", list.join(",")),
        }
    }
}

impl FromStr for TwistSet {
    type Err = GroupError;

    /// Accepts `{}`, `{1,3}`, `all`, `all-{2}` (also `all\{2}`), optionally
    /// prefixed by `I=`.
    fn from_str(s: &str) -> Result<Self, GroupError> {
        let err = |m: &str| GroupError::Parse { text: s.to_string(), message: m.to_string() };
        let body = s.trim();
        let body = body.strip_prefix("I").map(str::trim_start).and_then(|b| b.strip_prefix('=')).unwrap_or(body).trim();
        let parse_list = |t: &str| -> Result<Vec<u64>, GroupError> {
            let inner = t
                .trim()
                .strip_prefix('{')
                .and_then(|t| t.strip_suffix('}'))
                .ok_or_else(|| err("expected a braced list"))?;
            inner
                .split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<u64>().map_err(|_| err("list entries must be positive integers")))
                .collect()
        };
        if body == "all" {
            return Ok(TwistSet::all());
        }
        if body == "empty" {
            return Ok(TwistSet::empty());
        }
        if let Some(rest) = body.strip_prefix("all") {
            let rest = rest.trim_start().trim_start_matches(['-', '\\']);
            return TwistSet::cofinite(parse_list(rest)?);
        }
        TwistSet::finite(parse_list(body)?)
    }
}

/// Parity of crossings `Σ β(p - q)` over `p ∈ left`, `q ∈ right`, `p > q`.
fn crossing_parity(family: &TwistSet, left: &BTreeSet<i64>, right: impl Iterator<Item = i64> + Clone) -> u8 {
    let mut parity = 0u8;
    for &p in left {
        for q in right.clone() {
            if p > q {
                parity ^= family.beta((p - q) as u64);
            }
        }
    }
    parity
}

fn lamps_bytes(lamps: &BTreeSet<i64>, shift: i64) -> Vec<u8> {
    let mut bytes: Vec<u8> = lamps.iter().flat_map(|p| p.to_le_bytes()).collect();
    bytes.push(0xff);
    bytes.extend(shift.to_le_bytes());
    bytes
}

fn format_lamps(lamps: &BTreeSet<i64>, shift: i64) -> String {
    let list: Vec<String> = lamps.iter().map(i64::to_string).collect();
    format!("{{{}}} · t^{}", list.join(","), shift)
}

/// Parses `{p1,…} · t^n` (the `·` may also be `*` or whitespace).
fn parse_lamps(text: &str) -> Result<(BTreeSet<i64>, i64), GroupError> {
    let err = |m: &str| GroupError::Parse { text: text.to_string(), message: m.to_string() };
    let open = text.find('{').ok_or_else(|| err("missing lamp set"))?;
    let close = text.find('}').ok_or_else(|| err("unclosed lamp set"))?;
    let lamps = text[open + 1..close]
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<i64>().map_err(|_| err("lamp positions must be integers")))
        .collect::<Result<BTreeSet<i64>, _>>()?;
    let rest = text[close + 1..].trim().trim_start_matches(['·', '*']).trim();
    let shift = match rest.strip_prefix("t^") {
        Some(n) => n.trim().parse().map_err(|_| err("bad shift exponent"))?,
        None if rest.is_empty() => 0,
        None => return Err(err("expected `t^n`")),
    };
    Ok((lamps, shift))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LamplighterElement {
    pub lamps: BTreeSet<i64>,
    pub shift: i64,
}

impl LamplighterElement {
    pub fn new(lamps: impl IntoIterator<Item = i64>, shift: i64) -> Self {
        LamplighterElement { lamps: lamps.into_iter().collect(), shift }
    }

    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let (lamps, shift) = parse_lamps(text)?;
        Ok(LamplighterElement { lamps, shift })
    }
}

impl fmt::Display for LamplighterElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_lamps(&self.lamps, self.shift))
    }
}

/// `L₂` with generators `a` (an involution), `t`, `t⁻¹`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Lamplighter;

impl GroupModel for Lamplighter {
    type Element = LamplighterElement;

    fn name(&self) -> String {
        "lamplighter".into()
    }

    fn identity(&self) -> LamplighterElement {
        LamplighterElement::default()
    }

    fn mul(&self, a: &LamplighterElement, b: &LamplighterElement) -> LamplighterElement {
        let shifted: BTreeSet<i64> = b.lamps.iter().map(|q| q + a.shift).collect();
        LamplighterElement {
            lamps: a.lamps.symmetric_difference(&shifted).copied().collect(),
            shift: a.shift + b.shift,
        }
    }

    fn inv(&self, a: &LamplighterElement) -> LamplighterElement {
        LamplighterElement::new(a.lamps.iter().map(|p| p - a.shift), -a.shift)
    }

    fn eq(&self, a: &LamplighterElement, b: &LamplighterElement) -> bool {
        a == b
    }

    fn digest(&self, a: &LamplighterElement) -> u64 {
        stable_digest(&lamps_bytes(&a.lamps, a.shift))
    }

    fn generators(&self) -> Vec<Generator<LamplighterElement>> {
        vec![
            Generator::new("a", LamplighterElement::new([0], 0)),
            Generator::new("t", LamplighterElement::new([], 1)),
            Generator::new("T", LamplighterElement::new([], -1)),
        ]
    }

    fn format(&self, a: &LamplighterElement) -> String {
        a.to_string()
    }
}

/// Element `z^eps · a_{lamps} · t^shift` of `G_I`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwistedElement {
    pub eps: u8,
    pub lamps: BTreeSet<i64>,
    pub shift: i64,
    pub family: Arc<TwistSet>,
}

impl TwistedElement {
    pub fn new(family: Arc<TwistSet>, eps: u8, lamps: impl IntoIterator<Item = i64>, shift: i64) -> Self {
        TwistedElement { eps: eps & 1, lamps: lamps.into_iter().collect(), shift, family }
    }

    /// Image in `L₂` (forgets the central coordinate).
    pub fn project(&self) -> LamplighterElement {
        LamplighterElement { lamps: self.lamps.clone(), shift: self.shift }
    }

    /// Parses `z^e · {p1,…} · t^n`; the `z^e ·` prefix is optional.
    pub fn parse(text: &str, family: Arc<TwistSet>) -> Result<Self, GroupError> {
        let t = text.trim();
        let (eps, rest) = match t.strip_prefix("z^") {
            Some(r) => {
                let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
                let e: u8 = r[..end].parse().map_err(|_| GroupError::Parse {
                    text: text.to_string(),
                    message: "bad central exponent".into(),
                })?;
                (e & 1, &r[end..])
            }
            None => (0, t),
        };
        let (lamps, shift) = parse_lamps(rest)?;
        Ok(TwistedElement { eps, lamps, shift, family })
    }
}

impl fmt::Display for TwistedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z^{} · {}", self.eps, format_lamps(&self.lamps, self.shift))
    }
}

/// Product in `G_I`:
/// `eps = eps₁ + eps₂ + γ`, `lamps = lamps₁ Δ (lamps₂ + shift₁)`,
/// `shift = shift₁ + shift₂`, with `γ` the crossing parity of
/// `lamps₁` against `lamps₂ + shift₁`.
pub fn twisted_product(a: &TwistedElement, b: &TwistedElement) -> Result<TwistedElement, GroupError> {
    if !Arc::ptr_eq(&a.family, &b.family) && a.family != b.family {
        return Err(GroupError::ModelMismatch(format!("I = {} vs I = {}", a.family, b.family)));
    }
    let shifted = b.lamps.iter().map(|q| q + a.shift);
    let gamma = crossing_parity(&a.family, &a.lamps, shifted.clone());
    Ok(TwistedElement {
        eps: (a.eps + b.eps + gamma) & 1,
        lamps: a.lamps.symmetric_difference(&shifted.collect()).copied().collect(),
        shift: a.shift + b.shift,
        family: a.family.clone(),
    })
}

pub fn twisted_inverse(a: &TwistedElement) -> TwistedElement {
    let self_crossings = crossing_parity(&a.family, &a.lamps, a.lamps.iter().copied());
    TwistedElement {
        eps: (a.eps + self_crossings) & 1,
        lamps: a.lamps.iter().map(|p| p - a.shift).collect(),
        shift: -a.shift,
        family: a.family.clone(),
    }
}

/// The ℤ/2-valued cocycle on `L₂` whose extension is `G_I`: the crossing
/// parity of `a.lamps` against `b.lamps + a.shift`.
pub fn twist_cocycle_value(family: &TwistSet, a: &LamplighterElement, b: &LamplighterElement) -> u8 {
    crossing_parity(family, &a.lamps, b.lamps.iter().map(|q| q + a.shift))
}

/// `G_I` with generators `a`, `t`, `t⁻¹`, plus `z` when `I` is everything
/// (then `z` is not a product of `a` and `t`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedLamplighter {
    family: Arc<TwistSet>,
}

impl TwistedLamplighter {
    pub fn new(family: TwistSet) -> Self {
        TwistedLamplighter { family: Arc::new(family) }
    }

    pub fn family(&self) -> &TwistSet {
        &self.family
    }

    pub fn element(&self, eps: u8, lamps: impl IntoIterator<Item = i64>, shift: i64) -> TwistedElement {
        TwistedElement::new(self.family.clone(), eps, lamps, shift)
    }

    pub fn a(&self) -> TwistedElement {
        self.element(0, [0], 0)
    }

    pub fn t(&self) -> TwistedElement {
        self.element(0, [], 1)
    }

    pub fn z(&self) -> TwistedElement {
        self.element(1, [], 0)
    }

    pub fn parse(&self, text: &str) -> Result<TwistedElement, GroupError> {
        TwistedElement::parse(text, self.family.clone())
    }
}

impl GroupModel for TwistedLamplighter {
    type Element = TwistedElement;

    fn name(&self) -> String {
        format!("GI:I={}", self.family)
    }

    fn identity(&self) -> TwistedElement {
        self.element(0, [], 0)
    }

    fn mul(&self, a: &TwistedElement, b: &TwistedElement) -> TwistedElement {
        twisted_product(a, b).expect("elements of one model share their twist set")
    }

    fn inv(&self, a: &TwistedElement) -> TwistedElement {
        twisted_inverse(a)
    }

    fn eq(&self, a: &TwistedElement, b: &TwistedElement) -> bool {
        a.eps == b.eps && a.lamps == b.lamps && a.shift == b.shift
    }

    fn digest(&self, a: &TwistedElement) -> u64 {
        let mut bytes = vec![a.eps];
        bytes.extend(lamps_bytes(&a.lamps, a.shift));
        stable_digest(&bytes)
    }

    fn generators(&self) -> Vec<Generator<TwistedElement>> {
        let mut gens = vec![
            Generator::new("a", self.a()),
            Generator::new("t", self.t()),
            Generator::new("T", self.element(0, [], -1)),
        ];
        if self.family.is_all() {
            gens.push(Generator::new("z", self.z()));
        }
        gens
    }

    fn format(&self, a: &TwistedElement) -> String {
        a.to_string()
    }
}
