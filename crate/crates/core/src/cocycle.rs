//! Explicit 2-cocycles, the central extensions they define, and the
//! quasimorphism `φ(z, q) = z` on those extensions.
//!
//! An extension element is a pair `(z, q)` with product
//! `(z₁, q₁)(z₂, q₂) = (z₁ + z₂ + c(q₁, q₂), q₁q₂)`. Cocycle validity is
//! sampled: exhaustively over a Cayley ball of the base when it is
//! enumerable, over seeded random triples otherwise.

use std::fmt;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::experiments::{cayley_ball, ExperimentError};
use crate::groups::thompson::{self, CircleMap, LineMap};
use crate::groups::{
    parse_word, random_element, stable_digest, twist_cocycle_value, FreeAbelian, Generator, GroupError, GroupModel,
    Lamplighter, LamplighterElement, ThompsonT, TwistSet,
};

#[derive(Debug, Error)]
pub enum CocycleError {
    #[error("cocycle `{}` failed its check: {}", .0.name, .0.violation.as_deref().unwrap_or("?"))]
    CocycleInvalid(Box<CocycleReport>),
    #[error("unknown cocycle `{0}` (expected trivial, heisenberg, euler:T or twist:I=...)")]
    UnknownCocycle(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

/// A normalised or unnormalised 2-cocycle on a base group.
pub trait Cocycle: Sync {
    type Base: GroupModel;

    fn base(&self) -> &Self::Base;
    fn name(&self) -> String;
    fn value(&self, a: &<Self::Base as GroupModel>::Element, b: &<Self::Base as GroupModel>::Element) -> i64;

    /// `Some(m)` for ℤ/m-valued cocycles; values and central coordinates are reduced mod `m`.
    fn modulus(&self) -> Option<i64> {
        None
    }

    fn claimed_bound(&self) -> Option<u64> {
        None
    }
}

fn reduce(v: i64, modulus: Option<i64>) -> i64 {
    match modulus {
        Some(m) => v.rem_euclid(m),
        None => v,
    }
}

/// `c ≡ 0` over any base.
#[derive(Debug, Clone)]
pub struct TrivialCocycle<M> {
    pub base: M,
}

impl<M: GroupModel> Cocycle for TrivialCocycle<M> {
    type Base = M;

    fn base(&self) -> &M {
        &self.base
    }

    fn name(&self) -> String {
        "trivial".into()
    }

    fn value(&self, _a: &M::Element, _b: &M::Element) -> i64 {
        0
    }

    fn claimed_bound(&self) -> Option<u64> {
        Some(0)
    }
}

/// `c((x₁,y₁),(x₂,y₂)) = x₁y₂` over ℤ²; its extension is the Heisenberg group.
#[derive(Debug, Clone)]
pub struct HeisenbergCocycle {
    base: FreeAbelian,
}

impl Default for HeisenbergCocycle {
    fn default() -> Self {
        HeisenbergCocycle { base: FreeAbelian::new(2).expect("rank 2") }
    }
}

impl Cocycle for HeisenbergCocycle {
    type Base = FreeAbelian;

    fn base(&self) -> &FreeAbelian {
        &self.base
    }

    fn name(&self) -> String {
        "heisenberg".into()
    }

    fn value(&self, a: &Vec<i64>, b: &Vec<i64>) -> i64 {
        a[0] * b[1]
    }
}

/// `c(g, h)` with `s(g) ∘ s(h) = τ^{c(g,h)} ∘ s(gh)` for the section with `s(g)(0) ∈ [0, 1)`.
///
/// Since `s(gh)(0) ∈ [0, 1)`, the translation amount is `⌊s(g)(s(h)(0))⌋`.
pub fn euler_cocycle(g: &CircleMap, h: &CircleMap) -> i64 {
    let sh0 = LineMap::lift(h).value_at_zero().clone();
    let v = LineMap::lift(g).eval(&sh0).floor();
    i64::try_from(v).expect("Euler cocycle values are 0 or 1")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EulerCocycle {
    base: ThompsonT,
}

impl Cocycle for EulerCocycle {
    type Base = ThompsonT;

    fn base(&self) -> &ThompsonT {
        &self.base
    }

    fn name(&self) -> String {
        "euler:T".into()
    }

    fn value(&self, a: &CircleMap, b: &CircleMap) -> i64 {
        euler_cocycle(a, b)
    }

    fn claimed_bound(&self) -> Option<u64> {
        Some(1)
    }
}

/// The ℤ/2-valued crossing cocycle on `L₂` whose extension is `G_I`.
#[derive(Debug, Clone)]
pub struct TwistCocycle {
    base: Lamplighter,
    family: TwistSet,
}

impl TwistCocycle {
    pub fn new(family: TwistSet) -> Self {
        TwistCocycle { base: Lamplighter, family }
    }

    pub fn family(&self) -> &TwistSet {
        &self.family
    }
}

impl Cocycle for TwistCocycle {
    type Base = Lamplighter;

    fn base(&self) -> &Lamplighter {
        &self.base
    }

    fn name(&self) -> String {
        format!("twist:I={}", self.family)
    }

    fn value(&self, a: &LamplighterElement, b: &LamplighterElement) -> i64 {
        i64::from(twist_cocycle_value(&self.family, a, b))
    }

    fn modulus(&self) -> Option<i64> {
        Some(2)
    }

    fn claimed_bound(&self) -> Option<u64> {
        Some(1)
    }
}

/// Adds `delta` to one value of an inner cocycle; used to exercise failure reporting.
pub struct Perturbed<C: Cocycle> {
    pub inner: C,
    pub at: (<C::Base as GroupModel>::Element, <C::Base as GroupModel>::Element),
    pub delta: i64,
}

impl<C: Cocycle> Cocycle for Perturbed<C> {
    type Base = C::Base;

    fn base(&self) -> &C::Base {
        self.inner.base()
    }

    fn name(&self) -> String {
        format!("{}+perturbed", self.inner.name())
    }

    fn value(&self, a: &<C::Base as GroupModel>::Element, b: &<C::Base as GroupModel>::Element) -> i64 {
        let base = self.inner.base();
        let hit = base.eq(a, &self.at.0) && base.eq(b, &self.at.1);
        self.inner.value(a, b) + if hit { self.delta } else { 0 }
    }

    fn modulus(&self) -> Option<i64> {
        self.inner.modulus()
    }
}

/// How elements are drawn for cocycle checks and defect computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// `count` seeded random triples (or pairs) of words of length at most `max_len`.
    Random { count: usize, seed: u64, max_len: usize },
    /// Every triple (or pair) from the Cayley ball of this radius.
    Ball { radius: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CocycleReport {
    pub name: String,
    pub samples: u64,
    pub pass: bool,
    /// Formatted elements of the first violating triple (or pair, for bound violations).
    pub witness: Option<Vec<String>>,
    pub violation: Option<String>,
}

fn sample_elements<M: GroupModel>(model: &M, n: usize, seed: u64, max_len: usize) -> Vec<M::Element> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_element(model, &mut rng, max_len)).collect()
}

enum Violation {
    Identity(i64),
    Bound(i64),
}

fn triple_violation<C: Cocycle>(c: &C, q1: &Elem<C>, q2: &Elem<C>, q3: &Elem<C>) -> Option<Violation> {
    let base = c.base();
    let m = c.modulus();
    let q12 = base.mul(q1, q2);
    let q23 = base.mul(q2, q3);
    let c12 = c.value(q1, q2);
    let lhs = c.value(q2, q3) - c.value(&q12, q3) + c.value(q1, &q23) - c12;
    if reduce(lhs, m) != 0 {
        return Some(Violation::Identity(lhs));
    }
    match c.claimed_bound() {
        Some(b) if c12.unsigned_abs() > b => Some(Violation::Bound(c12)),
        _ => None,
    }
}

type Elem<C> = <<C as Cocycle>::Base as GroupModel>::Element;

/// Checks the cocycle identity `c(q₂,q₃) − c(q₁q₂,q₃) + c(q₁,q₂q₃) − c(q₁,q₂) = 0`
/// and the claimed bound on the sampled triples. The witness is the first
/// violation in sampling order, independent of thread count.
pub fn check_cocycle<C: Cocycle>(c: &C, sampling: Sampling) -> Result<CocycleReport, CocycleError> {
    let base = c.base();
    let (found, samples) = match sampling {
        Sampling::Ball { radius } => {
            let ball = cayley_ball(base, radius, crate::cap_from_env(crate::DEFAULT_BALL_CAP))?;
            let els = &ball.elements;
            let n = els.len();
            let found = (0..n).into_par_iter().find_map_first(|i| {
                for j in 0..n {
                    for k in 0..n {
                        if let Some(v) = triple_violation(c, &els[i], &els[j], &els[k]) {
                            return Some((vec![&els[i], &els[j], &els[k]].into_iter().cloned().collect::<Vec<_>>(), v));
                        }
                    }
                }
                None
            });
            (found, (n as u64).pow(3))
        }
        Sampling::Random { count, seed, max_len } => {
            let els = sample_elements(base, 3 * count, seed, max_len);
            let found = els.par_chunks(3).find_map_first(|t| {
                triple_violation(c, &t[0], &t[1], &t[2]).map(|v| (t.to_vec(), v))
            });
            (found, count as u64)
        }
    };
    let (witness, violation) = match found {
        None => (None, None),
        Some((els, v)) => {
            let text = match v {
                Violation::Identity(lhs) => format!("cocycle identity evaluates to {lhs}"),
                Violation::Bound(val) => format!("|c| = {} exceeds claimed bound", val.abs()),
            };
            let els = match v {
                Violation::Bound(_) => &els[..2],
                Violation::Identity(_) => &els[..],
            };
            (Some(els.iter().map(|e| base.format(e)).collect()), Some(text))
        }
    };
    Ok(CocycleReport { name: c.name(), samples, pass: witness.is_none(), witness, violation })
}

/// Element `(z, q)` of a central extension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtensionElement<E> {
    pub z: i64,
    pub q: E,
}

/// The central extension `E_c` of the base by ℤ (or ℤ/m).
pub struct Extension<C: Cocycle> {
    cocycle: C,
}

impl<C: Cocycle> Extension<C> {
    /// Builds the extension after checking the cocycle with `sampling`.
    pub fn new(cocycle: C, sampling: Sampling) -> Result<Self, CocycleError> {
        let report = check_cocycle(&cocycle, sampling)?;
        if !report.pass {
            return Err(CocycleError::CocycleInvalid(Box::new(report)));
        }
        Ok(Extension { cocycle })
    }

    /// Builds the extension without checking; products of an invalid cocycle are not associative.
    pub fn new_unchecked(cocycle: C) -> Self {
        Extension { cocycle }
    }

    pub fn cocycle(&self) -> &C {
        &self.cocycle
    }

    pub fn base(&self) -> &C::Base {
        self.cocycle.base()
    }

    pub fn element(&self, z: i64, q: Elem<C>) -> ExtensionElement<Elem<C>> {
        ExtensionElement { z: reduce(z, self.cocycle.modulus()), q }
    }

    /// The central generator `(1, 1_Q)`.
    pub fn central(&self) -> ExtensionElement<Elem<C>> {
        self.element(1, self.base().identity())
    }

    /// `(0, q)`.
    pub fn lift(&self, q: Elem<C>) -> ExtensionElement<Elem<C>> {
        self.element(0, q)
    }

    /// The quasimorphism `φ(z, q) = z`.
    pub fn phi(&self, e: &ExtensionElement<Elem<C>>) -> i64 {
        e.z
    }

    fn c_one(&self) -> i64 {
        let id = self.base().identity();
        self.cocycle.value(&id, &id)
    }
}

impl<C: Cocycle> GroupModel for Extension<C>
where
    Elem<C>: PartialEq,
{
    type Element = ExtensionElement<Elem<C>>;

    fn name(&self) -> String {
        format!("ext({}, {})", self.base().name(), self.cocycle.name())
    }

    fn identity(&self) -> Self::Element {
        self.element(-self.c_one(), self.base().identity())
    }

    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Self::Element {
        let z = a.z + b.z + self.cocycle.value(&a.q, &b.q);
        self.element(z, self.base().mul(&a.q, &b.q))
    }

    fn inv(&self, a: &Self::Element) -> Self::Element {
        let qi = self.base().inv(&a.q);
        let z = -self.c_one() - a.z - self.cocycle.value(&a.q, &qi);
        self.element(z, qi)
    }

    fn eq(&self, a: &Self::Element, b: &Self::Element) -> bool {
        a.z == b.z && self.base().eq(&a.q, &b.q)
    }

    fn digest(&self, a: &Self::Element) -> u64 {
        let mut bytes = a.z.to_le_bytes().to_vec();
        bytes.extend(self.base().digest(&a.q).to_le_bytes());
        stable_digest(&bytes)
    }

    /// Lifts `(0, s)` of the base generators, their inverses where these
    /// differ from the lift of `s⁻¹`, and the central generator and its inverse.
    fn generators(&self) -> Vec<Generator<Self::Element>> {
        let mut gens: Vec<Generator<Self::Element>> = self
            .base()
            .generators()
            .into_iter()
            .map(|g| Generator::new(g.name, self.lift(g.element)))
            .collect();
        let lifted = gens.len();
        for i in 0..lifted {
            let inv = self.inv(&gens[i].element);
            if !gens.iter().any(|h| self.eq(&h.element, &inv)) {
                let name = format!("{}^-1", gens[i].name);
                gens.push(Generator::new(name, inv));
            }
        }
        let zeta = self.central();
        let zeta_inv = self.inv(&zeta);
        let distinct = !self.eq(&zeta, &zeta_inv);
        gens.push(Generator::new("zeta", zeta));
        if distinct {
            gens.push(Generator::new("zeta^-1", zeta_inv));
        }
        gens
    }

    fn format(&self, a: &Self::Element) -> String {
        format!("({}, {})", a.z, self.base().format(&a.q))
    }

    fn is_enumerable(&self) -> bool {
        self.base().is_enumerable()
    }
}

impl<E: fmt::Debug> fmt::Display for ExtensionElement<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:?})", self.z, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectReport {
    pub name: String,
    pub pairs: u64,
    /// `max |φ(gh) − φ(g) − φ(h)|` over the sampled pairs.
    pub defect: i64,
    /// `max |c(q_g, q_h)|` over the same pairs, computed separately.
    pub max_abs_cocycle: i64,
    /// For ball sampling: the defect restricted to each radius `0..=R`.
    pub by_radius: Option<Vec<i64>>,
}

impl DefectReport {
    pub fn agrees(&self) -> bool {
        self.defect == self.max_abs_cocycle
    }
}

/// Defect of `φ(z, q) = z` on a ball of the extension or on seeded random pairs.
pub fn defect<C: Cocycle>(ext: &Extension<C>, sampling: Sampling) -> Result<DefectReport, CocycleError>
where
    Elem<C>: PartialEq,
{
    if ext.cocycle.modulus().is_some() {
        return Err(GroupError::InvalidParam("φ is only defined for ℤ-valued cocycles".into()).into());
    }
    let pair = |g: &ExtensionElement<Elem<C>>, h: &ExtensionElement<Elem<C>>| {
        let d = (ext.phi(&ext.mul(g, h)) - ext.phi(g) - ext.phi(h)).abs();
        let c = ext.cocycle.value(&g.q, &h.q).abs();
        (d, c)
    };
    let name = ext.cocycle.name();
    match sampling {
        Sampling::Ball { radius } => {
            let ball = cayley_ball(ext, radius, crate::cap_from_env(crate::DEFAULT_BALL_CAP))?;
            let els = &ball.elements;
            let lens = &ball.lengths;
            let r = radius as usize;
            let rows: Vec<(Vec<i64>, i64)> = (0..els.len())
                .into_par_iter()
                .map(|i| {
                    let mut by = vec![0i64; r + 1];
                    let mut cmax = 0;
                    for j in 0..els.len() {
                        let (d, c) = pair(&els[i], &els[j]);
                        let k = lens[i].max(lens[j]) as usize;
                        by[k] = by[k].max(d);
                        cmax = cmax.max(c);
                    }
                    (by, cmax)
                })
                .collect();
            let mut by = vec![0i64; r + 1];
            let mut cmax = 0;
            for (row, c) in rows {
                for (acc, v) in by.iter_mut().zip(row) {
                    *acc = (*acc).max(v);
                }
                cmax = cmax.max(c);
            }
            for k in 1..=r {
                by[k] = by[k].max(by[k - 1]);
            }
            Ok(DefectReport {
                name,
                pairs: (els.len() as u64).pow(2),
                defect: by[r],
                max_abs_cocycle: cmax,
                by_radius: Some(by),
            })
        }
        Sampling::Random { count, seed, max_len } => {
            let els = sample_elements(ext, 2 * count, seed, max_len);
            let (d, c) = els
                .par_chunks(2)
                .map(|p| pair(&p[0], &p[1]))
                .reduce(|| (0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
            Ok(DefectReport { name, pairs: count as u64, defect: d, max_abs_cocycle: c, by_radius: None })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslationReport {
    pub n: u64,
    /// `φ(eⁿ)` by repeated multiplication.
    pub phi_n: i64,
    /// `φ(eⁿ)` as `n·z + Σ_{k<n} c(q^k, q)`.
    pub phi_n_telescoped: i64,
    /// `φ(eⁿ)/n` as `"p/q"`.
    pub estimate: String,
    /// `defect/n` when the defect is known.
    pub error_bound: Option<String>,
    /// The exact limit when the base part has finite order `k ≤ n`.
    pub exact: Option<String>,
}

impl TranslationReport {
    pub fn value(&self) -> Ratio<i64> {
        self.exact.as_deref().unwrap_or(&self.estimate).parse().expect("ratio text")
    }
}

/// `φ(eⁿ)/n`, with the bound `|φ(eⁿ)/n − τ(e)| ≤ defect/n` when `defect` is given.
///
/// If `q^k = 1` for some `k ≤ n`, then `e^k = (m, 1)` is central and the
/// limit is exactly `(m + c(1,1))/k`.
pub fn translation_number<C: Cocycle>(
    ext: &Extension<C>,
    e: &ExtensionElement<Elem<C>>,
    n: u64,
    defect: Option<u64>,
) -> Result<TranslationReport, CocycleError>
where
    Elem<C>: PartialEq,
{
    if n == 0 {
        return Err(GroupError::InvalidParam("iteration budget must be at least 1".into()).into());
    }
    if ext.cocycle.modulus().is_some() {
        return Err(GroupError::InvalidParam("translation numbers need a ℤ-valued cocycle".into()).into());
    }
    let base = ext.base();
    let mut acc = e.clone();
    let mut qk = e.q.clone();
    let mut telescoped = e.z;
    let mut exact = None;
    for k in 1..=n {
        if exact.is_none() && base.is_identity(&acc.q) {
            exact = Some(Ratio::new(acc.z + ext.c_one(), k as i64));
        }
        if k == n {
            break;
        }
        telescoped += e.z + ext.cocycle.value(&qk, &e.q);
        qk = base.mul(&qk, &e.q);
        acc = ext.mul(&acc, e);
    }
    let estimate = Ratio::new(acc.z, n as i64);
    Ok(TranslationReport {
        n,
        phi_n: acc.z,
        phi_n_telescoped: telescoped,
        estimate: estimate.to_string(),
        error_bound: defect.map(|d| Ratio::new(d as i64, n as i64).to_string()),
        exact: exact.map(|r| r.to_string()),
    })
}

/// Parses a product of named circle maps (`A`, `Bi`, `r_half`, `r:1/4`, …).
pub fn parse_circle_word(text: &str) -> Result<CircleMap, GroupError> {
    let t = ThompsonT;
    let gens = t.generators();
    let mut acc = CircleMap::identity();
    for tok in text.split(|c: char| c.is_whitespace() || c == '*').filter(|s| !s.is_empty()) {
        let g = match gens.iter().find(|g| g.name == tok) {
            Some(g) => g.element.clone(),
            None => thompson::named_map(tok)?,
        };
        acc = acc.compose(&g);
    }
    Ok(acc)
}

/// Cocycles addressable by name from the command line and bindings.
pub enum RegisteredCocycle {
    Trivial(TrivialCocycle<FreeAbelian>),
    Heisenberg(HeisenbergCocycle),
    Euler(EulerCocycle),
    Twist(TwistCocycle),
}

impl RegisteredCocycle {
    /// `trivial` (over ℤ²), `heisenberg`, `euler:T`, `twist:I=<set>`.
    pub fn parse(name: &str) -> Result<Self, CocycleError> {
        match name.trim() {
            "trivial" => Ok(Self::Trivial(TrivialCocycle { base: FreeAbelian::new(2)? })),
            "heisenberg" => Ok(Self::Heisenberg(HeisenbergCocycle::default())),
            "euler:T" | "euler" => Ok(Self::Euler(EulerCocycle::default())),
            other => match other.strip_prefix("twist:") {
                Some(set) => Ok(Self::Twist(TwistCocycle::new(set.parse()?))),
                None => Err(CocycleError::UnknownCocycle(other.to_string())),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Trivial(c) => c.name(),
            Self::Heisenberg(c) => c.name(),
            Self::Euler(c) => c.name(),
            Self::Twist(c) => c.name(),
        }
    }

    /// Default sampling: a radius-3 ball for enumerable bases, else random triples.
    pub fn default_sampling(&self, seed: u64) -> Sampling {
        match self {
            Self::Euler(_) => Sampling::Random { count: 1000, seed, max_len: 6 },
            _ => Sampling::Ball { radius: 3 },
        }
    }

    pub fn check(&self, sampling: Sampling) -> Result<CocycleReport, CocycleError> {
        match self {
            Self::Trivial(c) => check_cocycle(c, sampling),
            Self::Heisenberg(c) => check_cocycle(c, sampling),
            Self::Euler(c) => check_cocycle(c, sampling),
            Self::Twist(c) => check_cocycle(c, sampling),
        }
    }

    pub fn defect(self, sampling: Sampling) -> Result<DefectReport, CocycleError> {
        match self {
            Self::Trivial(c) => defect(&Extension::new_unchecked(c), sampling),
            Self::Heisenberg(c) => defect(&Extension::new_unchecked(c), sampling),
            Self::Euler(c) => defect(&Extension::new_unchecked(c), sampling),
            Self::Twist(c) => defect(&Extension::new_unchecked(c), sampling),
        }
    }

    /// Translation number of `(z, q)`, with `q` a word in the base generators
    /// (for `euler:T`, named circle maps such as `r_half`).
    pub fn translation(self, z: i64, q: &str, n: u64) -> Result<TranslationReport, CocycleError> {
        match self {
            Self::Trivial(c) => {
                let q = parse_word(&c.base, q)?;
                let ext = Extension::new_unchecked(c);
                translation_number(&ext, &ext.element(z, q), n, Some(0))
            }
            Self::Heisenberg(c) => {
                let q = parse_word(&c.base, q)?;
                let ext = Extension::new_unchecked(c);
                translation_number(&ext, &ext.element(z, q), n, None)
            }
            Self::Euler(c) => {
                let q = parse_circle_word(q)?;
                let ext = Extension::new_unchecked(c);
                translation_number(&ext, &ext.element(z, q), n, Some(1))
            }
            Self::Twist(_) => {
                Err(GroupError::InvalidParam("translation numbers need a ℤ-valued cocycle".into()).into())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{check_axioms, commutator, thompson::rotation, TwistedLamplighter};
    use rand::Rng;

    #[test]
    fn registered_cocycles_pass() {
        for name in ["trivial", "heisenberg", "euler:T", "twist:I={}", "twist:I={1,3}", "twist:I=all"] {
            let c = RegisteredCocycle::parse(name).unwrap();
            let report = c.check(c.default_sampling(7)).unwrap();
            assert!(report.pass, "{name}: {report:?}");
        }
        assert!(RegisteredCocycle::parse("nope").is_err());
    }

    #[test]
    fn heisenberg_extension_matches_heisenberg_group() {
        // Oracle: (z, (x, y)) ↦ (x, y, z) must be a homomorphism onto the matrix model.
        let ext = Extension::new_unchecked(HeisenbergCocycle::default());
        let report = check_cocycle(ext.cocycle(), Sampling::Random { count: 1000, seed: 1, max_len: 12 }).unwrap();
        assert!(report.pass);
        let h = crate::groups::Heisenberg;
        let to_h = |e: &ExtensionElement<Vec<i64>>| crate::groups::HeisenbergElement::new(e.q[0], e.q[1], e.z);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let v: Vec<i64> = (0..6).map(|_| rng.random_range(-20..21)).collect();
            let g = ext.element(v[0], vec![v[1], v[2]]);
            let k = ext.element(v[3], vec![v[4], v[5]]);
            assert_eq!(to_h(&ext.mul(&g, &k)), h.mul(&to_h(&g), &to_h(&k)));
        }
    }

    #[test]
    fn perturbed_cocycle_fails_with_witness() {
        let base = FreeAbelian::new(2).unwrap();
        let bad = Perturbed {
            inner: TrivialCocycle { base },
            at: (vec![1, 0], vec![0, 1]),
            delta: 1,
        };
        let report = check_cocycle(&bad, Sampling::Ball { radius: 2 }).unwrap();
        assert!(!report.pass);
        assert_eq!(report.witness.as_ref().unwrap().len(), 3);
        assert!(matches!(
            Extension::new(bad, Sampling::Ball { radius: 2 }),
            Err(CocycleError::CocycleInvalid(_))
        ));
    }

    #[test]
    fn bound_violation_is_reported() {
        struct Loud(FreeAbelian);
        impl Cocycle for Loud {
            type Base = FreeAbelian;
            fn base(&self) -> &FreeAbelian {
                &self.0
            }
            fn name(&self) -> String {
                "loud".into()
            }
            fn value(&self, a: &Vec<i64>, b: &Vec<i64>) -> i64 {
                a[0] * b[1]
            }
            fn claimed_bound(&self) -> Option<u64> {
                Some(0)
            }
        }
        let report = check_cocycle(&Loud(FreeAbelian::new(2).unwrap()), Sampling::Ball { radius: 1 }).unwrap();
        assert!(!report.pass);
        assert_eq!(report.witness.unwrap().len(), 2);
    }

    #[test]
    fn euler_values() {
        let r = rotation(1, 1);
        assert_eq!(euler_cocycle(&r, &r), 1);
        let id = CircleMap::identity();
        let t = ThompsonT;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let g = random_element(&t, &mut rng, 6);
            let h = random_element(&t, &mut rng, 6);
            let c = euler_cocycle(&g, &h);
            assert!(c == 0 || c == 1);
            assert_eq!(euler_cocycle(&id, &g), 0);
            assert_eq!(euler_cocycle(&g, &id), 0);
            // Defining relation s(g)s(h) = τ^c s(gh), checked as line maps.
            let lhs = LineMap::lift(&g).compose(&LineMap::lift(&h));
            let rhs = LineMap::lift(&g.compose(&h)).translate(&c.into());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn extensions_satisfy_axioms_and_centrality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let heis = Extension::new(HeisenbergCocycle::default(), Sampling::Ball { radius: 2 }).unwrap();
        assert!(check_axioms(&heis, &mut rng, 1000, 8).passed());
        let a = heis.lift(vec![1, 0]);
        let b = heis.lift(vec![0, 1]);
        assert!(heis.eq(&commutator(&heis, &a, &b), &heis.central()));
        for _ in 0..200 {
            let g = random_element(&heis, &mut rng, 10);
            let z = heis.central();
            assert!(heis.eq(&heis.mul(&z, &g), &heis.mul(&g, &z)));
        }

        let euler = Extension::new(EulerCocycle::default(), Sampling::Random { count: 200, seed: 4, max_len: 5 }).unwrap();
        assert!(check_axioms(&euler, &mut rng, 300, 5).passed());

        let split = Extension::new(TrivialCocycle { base: FreeAbelian::new(2).unwrap() }, Sampling::Ball { radius: 2 }).unwrap();
        assert!(check_axioms(&split, &mut rng, 1000, 8).passed());
    }

    #[test]
    fn twist_extension_matches_twisted_model() {
        let family: TwistSet = "{1,3}".parse().unwrap();
        let ext = Extension::new(TwistCocycle::new(family.clone()), Sampling::Ball { radius: 3 }).unwrap();
        let gi = TwistedLamplighter::new(family);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let x = random_element(&gi, &mut rng, 10);
            let y = random_element(&gi, &mut rng, 10);
            let ex = ext.element(i64::from(x.eps), x.project());
            let ey = ext.element(i64::from(y.eps), y.project());
            let p = ext.mul(&ex, &ey);
            let q = gi.mul(&x, &y);
            assert_eq!(p.z, i64::from(q.eps));
            assert_eq!(p.q, q.project());
        }
    }

    #[test]
    fn defects() {
        let split = Extension::new_unchecked(TrivialCocycle { base: FreeAbelian::new(2).unwrap() });
        let d = defect(&split, Sampling::Ball { radius: 3 }).unwrap();
        assert_eq!(d.defect, 0);

        let euler = Extension::new_unchecked(EulerCocycle::default());
        let d = defect(&euler, Sampling::Random { count: 500, seed: 6, max_len: 6 }).unwrap();
        assert_eq!((d.defect, d.max_abs_cocycle), (1, 1));
        assert!(matches!(defect(&euler, Sampling::Ball { radius: 2 }), Err(CocycleError::Experiment(_))));

        let heis = Extension::new_unchecked(HeisenbergCocycle::default());
        let d = defect(&heis, Sampling::Ball { radius: 4 }).unwrap();
        assert!(d.agrees());
        let by = d.by_radius.unwrap();
        assert!(by.windows(2).all(|w| w[0] <= w[1]));
        assert!(by[4] > by[2]);
    }

    #[test]
    fn translation_numbers() {
        let euler = Extension::new_unchecked(EulerCocycle::default());
        let e = euler.lift(rotation(1, 1));
        for n in [2, 7, 64] {
            let r = translation_number(&euler, &e, n, Some(1)).unwrap();
            assert_eq!(r.value(), Ratio::new(1, 2));
            assert_eq!(r.phi_n, r.phi_n_telescoped);
        }
        let r = translation_number(&euler, &e, 64, Some(1)).unwrap();
        assert_eq!(r.estimate, "1/2");
        // A single step only sees φ(e) = 0, within the bound 1/1.
        let r = translation_number(&euler, &e, 1, Some(1)).unwrap();
        assert_eq!((r.estimate.as_str(), r.exact.as_deref()), ("0", None));

        let split = Extension::new_unchecked(TrivialCocycle { base: FreeAbelian::new(2).unwrap() });
        let r = translation_number(&split, &split.lift(vec![2, -1]), 1, Some(0)).unwrap();
        assert_eq!(r.value(), Ratio::from_integer(0));
        for n in 1..6 {
            let r = translation_number(&split, &split.central(), n, Some(0)).unwrap();
            assert_eq!(r.estimate, "1");
        }
        assert_eq!(
            RegisteredCocycle::parse("euler:T").unwrap().translation(0, "r_half", 9).unwrap().value(),
            Ratio::new(1, 2)
        );
    }
}
