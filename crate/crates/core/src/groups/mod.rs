//! Exact group models.
//!
//! Every model implements [`GroupModel`]: identity, product, inverse, an
//! exact equality test and a stable digest that is constant on equality
//! classes. Elements are plain immutable values.

use std::collections::HashMap;
use std::fmt::Debug;

use rand::Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub mod free;
pub mod heisenberg;
pub mod lamplighter;
pub mod surface;
pub mod thompson;

pub use free::{FreeAbelian, FreeGroup};
pub use heisenberg::{Heisenberg, HeisenbergElement};
pub use lamplighter::{
    twist_cocycle_value, twisted_inverse, twisted_product, Lamplighter, LamplighterElement, TwistSet, TwistedElement,
    TwistedLamplighter,
};
pub use surface::{SurfaceElement, SurfaceGroup};
pub use thompson::{CircleMap, LineMap, LiftedThompson, ThompsonT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("elements belong to different models: {0}")]
    ModelMismatch(String),
    #[error("model `{0}` does not support Cayley enumeration")]
    NotEnumerable(String),
    #[error("element not reached within radius {0}")]
    NotFound(u32),
    #[error("non-dyadic input: {0}")]
    NonDyadicInput(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("cannot parse `{text}`: {message}")]
    Parse { text: String, message: String },
}

/// A named generator.
#[derive(Debug, Clone)]
pub struct Generator<E> {
    pub name: String,
    pub element: E,
}

impl<E> Generator<E> {
    pub fn new(name: impl Into<String>, element: E) -> Self {
        Generator { name: name.into(), element }
    }
}

pub trait GroupModel: Sync {
    type Element: Clone + Debug + Send + Sync;

    fn name(&self) -> String;
    fn identity(&self) -> Self::Element;
    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn inv(&self, a: &Self::Element) -> Self::Element;
    fn eq(&self, a: &Self::Element, b: &Self::Element) -> bool;
    /// Deterministic digest; equal elements must have equal digests.
    fn digest(&self, a: &Self::Element) -> u64;
    /// Symmetric generating set (closed under inverses).
    fn generators(&self) -> Vec<Generator<Self::Element>>;
    fn format(&self, a: &Self::Element) -> String;

    fn is_enumerable(&self) -> bool {
        true
    }

    /// Exact word length when the model knows a closed form.
    fn length_oracle(&self, _a: &Self::Element) -> Option<u64> {
        None
    }

    fn is_identity(&self, a: &Self::Element) -> bool {
        self.eq(a, &self.identity())
    }
}

/// Digest of a canonical byte serialisation (first 8 bytes of SHA-256).
pub fn stable_digest(bytes: &[u8]) -> u64 {
    let hash = Sha256::digest(bytes);
    u64::from_le_bytes(hash[..8].try_into().expect("sha256 output"))
}

pub fn power<M: GroupModel>(model: &M, e: &M::Element, k: i64) -> M::Element {
    let base = if k < 0 { model.inv(e) } else { e.clone() };
    let mut acc = model.identity();
    let mut sq = base;
    let mut k = k.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc = model.mul(&acc, &sq);
        }
        k >>= 1;
        if k > 0 {
            sq = model.mul(&sq, &sq);
        }
    }
    acc
}

/// `[a, b] = a b a⁻¹ b⁻¹`.
pub fn commutator<M: GroupModel>(model: &M, a: &M::Element, b: &M::Element) -> M::Element {
    let ab = model.mul(a, b);
    let ab_ai = model.mul(&ab, &model.inv(a));
    model.mul(&ab_ai, &model.inv(b))
}

/// `a b a⁻¹`.
pub fn conjugate<M: GroupModel>(model: &M, a: &M::Element, b: &M::Element) -> M::Element {
    model.mul(&model.mul(a, b), &model.inv(a))
}

/// Product of generators by index, left to right.
pub fn eval_generator_word<M: GroupModel>(model: &M, gens: &[Generator<M::Element>], word: &[usize]) -> M::Element {
    word.iter()
        .fold(model.identity(), |acc, &i| model.mul(&acc, &gens[i].element))
}

/// Parses a word over generator names: whitespace- or `*`-separated, or
/// concatenated names matched greedily (longest name first).
pub fn parse_word<M: GroupModel>(model: &M, text: &str) -> Result<M::Element, GroupError> {
    let gens = model.generators();
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(gens[i].name.len()));
    let mut acc = model.identity();
    for chunk in text.split(|c: char| c.is_whitespace() || c == '*' || c == '·') {
        let mut rest = chunk;
        while !rest.is_empty() {
            if let Some(&i) = order.iter().find(|&&i| rest.starts_with(gens[i].name.as_str())) {
                acc = model.mul(&acc, &gens[i].element);
                rest = &rest[gens[i].name.len()..];
            } else if rest == "1" || rest == "e" {
                rest = "";
            } else {
                return Err(GroupError::Parse {
                    text: text.to_string(),
                    message: format!("unknown generator at `{rest}`"),
                });
            }
        }
    }
    Ok(acc)
}

/// Product of `len` uniformly chosen generators.
pub fn random_word<M: GroupModel, R: Rng>(model: &M, rng: &mut R, len: usize) -> M::Element {
    let gens = model.generators();
    (0..len).fold(model.identity(), |acc, _| {
        let g = &gens[rng.random_range(0..gens.len())];
        model.mul(&acc, &g.element)
    })
}

/// Random element from a word of length in `0..=max_len`.
pub fn random_element<M: GroupModel, R: Rng>(model: &M, rng: &mut R, max_len: usize) -> M::Element {
    let len = rng.random_range(0..=max_len);
    random_word(model, rng, len)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Order {
    Finite(u64),
    /// No power up to the bound is the identity.
    Infinite { bound: u64 },
}

/// Least `k <= bound` with `e^k = 1`.
pub fn order_of<M: GroupModel>(model: &M, e: &M::Element, bound: u64) -> Order {
    let mut acc = e.clone();
    for k in 1..=bound {
        if model.is_identity(&acc) {
            return Order::Finite(k);
        }
        acc = model.mul(&acc, e);
    }
    Order::Infinite { bound }
}

/// Set of elements deduplicated by digest buckets and exact equality.
pub struct ElementIndex<'m, M: GroupModel> {
    model: &'m M,
    buckets: HashMap<u64, Vec<usize>>,
    elements: Vec<M::Element>,
}

impl<'m, M: GroupModel> ElementIndex<'m, M> {
    pub fn new(model: &'m M) -> Self {
        ElementIndex {
            model,
            buckets: HashMap::new(),
            elements: Vec::new(),
        }
    }

    pub fn find_with_digest(&self, e: &M::Element, digest: u64) -> Option<usize> {
        self.buckets
            .get(&digest)?
            .iter()
            .copied()
            .find(|&i| self.model.eq(&self.elements[i], e))
    }

    pub fn find(&self, e: &M::Element) -> Option<usize> {
        self.find_with_digest(e, self.model.digest(e))
    }

    /// Inserts `e` unless present; returns its index and whether it was new.
    pub fn insert_with_digest(&mut self, e: M::Element, digest: u64) -> (usize, bool) {
        if let Some(i) = self.find_with_digest(&e, digest) {
            return (i, false);
        }
        let idx = self.elements.len();
        self.elements.push(e);
        self.buckets.entry(digest).or_default().push(idx);
        (idx, true)
    }

    pub fn insert(&mut self, e: M::Element) -> (usize, bool) {
        let d = self.model.digest(&e);
        self.insert_with_digest(e, d)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, i: usize) -> &M::Element {
        &self.elements[i]
    }

    pub fn into_elements(self) -> Vec<M::Element> {
        self.elements
    }
}

/// Exact word length: closed form when available, else breadth-first search
/// up to `max_radius`.
pub fn word_length<M: GroupModel>(model: &M, e: &M::Element, max_radius: u32) -> Result<u64, GroupError> {
    if let Some(len) = model.length_oracle(e) {
        return Ok(len);
    }
    if !model.is_enumerable() {
        return Err(GroupError::NotEnumerable(model.name()));
    }
    if model.is_identity(e) {
        return Ok(0);
    }
    let gens = model.generators();
    let mut index = ElementIndex::new(model);
    index.insert(model.identity());
    let mut frontier = vec![model.identity()];
    for r in 1..=max_radius {
        let mut next = Vec::new();
        for x in &frontier {
            for g in &gens {
                let y = model.mul(x, &g.element);
                if index.insert(y.clone()).1 {
                    if model.eq(&y, e) {
                        return Ok(u64::from(r));
                    }
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    Err(GroupError::NotFound(max_radius))
}

/// Outcome of a sampled group-axiom check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub samples: usize,
    pub failure: Option<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Associativity, identity and inverse laws on seeded random elements.
pub fn check_axioms<M: GroupModel, R: Rng>(model: &M, rng: &mut R, samples: usize, max_len: usize) -> AxiomReport {
    let id = model.identity();
    for i in 0..samples {
        let a = random_element(model, rng, max_len);
        let b = random_element(model, rng, max_len);
        let c = random_element(model, rng, max_len);
        let left = model.mul(&model.mul(&a, &b), &c);
        let right = model.mul(&a, &model.mul(&b, &c));
        let fail = |law: &str| AxiomReport {
            samples: i + 1,
            failure: Some(format!("{law} fails for a = {}", model.format(&a))),
        };
        if !model.eq(&left, &right) {
            return fail("associativity");
        }
        if !model.eq(&model.mul(&a, &id), &a) || !model.eq(&model.mul(&id, &a), &a) {
            return fail("identity");
        }
        if !model.is_identity(&model.mul(&a, &model.inv(&a))) || !model.is_identity(&model.mul(&model.inv(&a), &a)) {
            return fail("inverse");
        }
        if model.eq(&a, &b) && model.digest(&a) != model.digest(&b) {
            return fail("digest consistency");
        }
    }
    AxiomReport { samples, failure: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn power_matches_iteration() {
        let h = Heisenberg;
        let a = h.generators()[0].element;
        let b = h.generators()[1].element;
        let e = h.mul(&a, &b);
        let mut acc = h.identity();
        for k in 0..9i64 {
            assert_eq!(power(&h, &e, k), acc);
            acc = h.mul(&acc, &e);
        }
        assert_eq!(power(&h, &e, -3), h.inv(&power(&h, &e, 3)));
    }

    #[test]
    fn word_length_examples() {
        let f2 = FreeGroup::new(2).unwrap();
        let w = parse_word(&f2, "abA").unwrap();
        assert_eq!(word_length(&f2, &w, 10), Ok(3));

        let z2 = FreeAbelian::new(2).unwrap();
        assert_eq!(word_length(&z2, &vec![3, 4], 0), Ok(7));

        let h = Heisenberg;
        let z = HeisenbergElement { x: 0, y: 0, z: 1 };
        assert_eq!(word_length(&h, &z, 8), Ok(4));
        assert_eq!(word_length(&h, &z, 3), Err(GroupError::NotFound(3)));

        let t = ThompsonT;
        assert!(matches!(
            word_length(&t, &thompson::rotation(1, 1), 3),
            Err(GroupError::NotEnumerable(_))
        ));
    }

    #[test]
    fn heisenberg_commutator_is_central_unit() {
        // Oracle: enumerate all words of length <= 3 and confirm none equals z.
        let h = Heisenberg;
        let gens = h.generators();
        let z = HeisenbergElement { x: 0, y: 0, z: 1 };
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..3 {
            let mut next = Vec::new();
            for w in &words {
                for g in 0..gens.len() {
                    let mut w2 = w.clone();
                    w2.push(g);
                    next.push(w2);
                }
            }
            for w in &next {
                assert_ne!(eval_generator_word(&h, &gens, w), z);
            }
            words = next;
        }
        assert_eq!(commutator(&h, &gens[0].element, &gens[2].element), z);
    }

    #[test]
    fn orders() {
        let t = ThompsonT;
        let r = thompson::rotation(1, 1);
        assert_eq!(order_of(&t, &r, 64), Order::Finite(2));
        assert_eq!(order_of(&t, &t.identity(), 64), Order::Finite(1));
        let lift = LiftedThompson;
        assert_eq!(
            order_of(&lift, &LineMap::lift(&r), 64),
            Order::Infinite { bound: 64 }
        );
        let c = thompson::generator_c();
        assert_eq!(order_of(&t, &c, 64), Order::Finite(3));
    }

    #[test]
    fn axioms_hold_for_every_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert!(check_axioms(&FreeGroup::new(2).unwrap(), &mut rng, 1000, 8).passed());
        assert!(check_axioms(&FreeAbelian::new(3).unwrap(), &mut rng, 1000, 8).passed());
        assert!(check_axioms(&Heisenberg, &mut rng, 1000, 8).passed());
        assert!(check_axioms(&Lamplighter, &mut rng, 1000, 8).passed());
        for set in ["{}", "all", "{2}", "{1,3}", "all-{2}"] {
            let m = TwistedLamplighter::new(set.parse().unwrap());
            assert!(check_axioms(&m, &mut rng, 1000, 8).passed(), "{set}");
        }
        assert!(check_axioms(&SurfaceGroup::new(2).unwrap(), &mut rng, 300, 8).passed());
        assert!(check_axioms(&ThompsonT, &mut rng, 200, 5).passed());
        assert!(check_axioms(&LiftedThompson, &mut rng, 200, 5).passed());
    }
}
