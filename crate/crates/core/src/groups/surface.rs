//! Closed orientable surface groups of genus `g >= 2`,
//! `⟨a₁, b₁, …, a_g, b_g | [a₁,b₁]⋯[a_g,b_g]⟩`, with equality decided by
//! Dehn's algorithm.
//!
//! Every piece of the symmetrised relator has length 1 and the relator has
//! length `4g >= 8`, so the presentation is C′(1/6) and a word is trivial
//! iff Dehn reduction empties it. Reduction replaces the leftmost, then
//! longest, subword `u` of a cyclic conjugate `r = u v` of the relator or its
//! inverse with `|u| > 2g` by `v⁻¹`.

use std::fmt;

use super::free::{free_reduce, invert_word};
use super::{stable_digest, Generator, GroupError, GroupModel};

/// Letters: `a_i ↦ 2i - 1`, `b_i ↦ 2i` (1-based), negated for inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurfaceElement {
    pub genus: u32,
    pub word: Vec<i32>,
}

impl SurfaceElement {
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceGroup {
    genus: u32,
    /// All cyclic conjugates of the relator and of its inverse.
    rotations: Vec<Vec<i32>>,
}

fn letter_name(l: i32) -> String {
    let k = l.unsigned_abs();
    let (base, idx) = if k % 2 == 1 { ('a', k.div_ceil(2)) } else { ('b', k / 2) };
    let c = if l < 0 { base.to_ascii_uppercase() } else { base };
    format!("{c}{idx}")
}

impl SurfaceGroup {
    pub fn new(genus: u32) -> Result<Self, GroupError> {
        if !(2..=32).contains(&genus) {
            return Err(GroupError::InvalidParam("surface genus must be in 2..=32".into()));
        }
        let relator = Self::relator_word(genus);
        let inverse = invert_word(&relator);
        let mut rotations = Vec::with_capacity(relator.len() * 2);
        for base in [&relator, &inverse] {
            for k in 0..base.len() {
                let mut r = base[k..].to_vec();
                r.extend_from_slice(&base[..k]);
                rotations.push(r);
            }
        }
        Ok(SurfaceGroup { genus, rotations })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// `a₁ b₁ a₁⁻¹ b₁⁻¹ ⋯ a_g b_g a_g⁻¹ b_g⁻¹`.
    pub fn relator_word(genus: u32) -> Vec<i32> {
        (1..=genus as i32)
            .flat_map(|i| {
                let (a, b) = (2 * i - 1, 2 * i);
                [a, b, -a, -b]
            })
            .collect()
    }

    pub fn relator(&self) -> SurfaceElement {
        SurfaceElement { genus: self.genus, word: Self::relator_word(self.genus) }
    }

    pub fn element(&self, word: Vec<i32>) -> Result<SurfaceElement, GroupError> {
        let max = 2 * self.genus as i32;
        if let Some(&bad) = word.iter().find(|&&l| l == 0 || l.abs() > max) {
            return Err(GroupError::InvalidParam(format!("letter {bad} outside genus {}", self.genus)));
        }
        Ok(SurfaceElement { genus: self.genus, word: self.dehn_reduce(word) })
    }

    /// Leftmost position and longest match of a relator prefix exceeding half its length.
    fn find_reduction(&self, w: &[i32]) -> Option<(usize, usize, usize)> {
        let half = 2 * self.genus as usize;
        for i in 0..w.len() {
            let mut best: Option<(usize, usize)> = None;
            for (ri, r) in self.rotations.iter().enumerate() {
                if r[0] != w[i] {
                    continue;
                }
                let len = r.iter().zip(&w[i..]).take_while(|(x, y)| x == y).count();
                if len > half && best.is_none_or(|(_, b)| len > b) {
                    best = Some((ri, len));
                }
            }
            if let Some((ri, len)) = best {
                return Some((i, len, ri));
            }
        }
        None
    }

    /// Dehn's algorithm: free reduction plus greedy relator-half replacement.
    pub fn dehn_reduce(&self, word: Vec<i32>) -> Vec<i32> {
        let mut w = free_reduce(word);
        while let Some((i, len, ri)) = self.find_reduction(&w) {
            let r = &self.rotations[ri];
            let replacement = invert_word(&r[len..]);
            let mut next = Vec::with_capacity(w.len());
            next.extend_from_slice(&w[..i]);
            next.extend(replacement);
            next.extend_from_slice(&w[i + len..]);
            w = free_reduce(next);
        }
        w
    }

    pub fn is_trivial_word(&self, word: &[i32]) -> bool {
        self.dehn_reduce(word.to_vec()).is_empty()
    }

    fn check(&self, e: &SurfaceElement) -> Result<(), GroupError> {
        if e.genus != self.genus {
            return Err(GroupError::ModelMismatch(format!("genus {} vs {}", e.genus, self.genus)));
        }
        Ok(())
    }

    pub fn try_mul(&self, a: &SurfaceElement, b: &SurfaceElement) -> Result<SurfaceElement, GroupError> {
        self.check(a)?;
        self.check(b)?;
        let word = a.word.iter().chain(&b.word).copied().collect();
        Ok(SurfaceElement { genus: self.genus, word: self.dehn_reduce(word) })
    }

    /// Exponent sums per generator; an invariant of the element.
    pub fn abelianization(&self, e: &SurfaceElement) -> Vec<i64> {
        let mut v = vec![0i64; 2 * self.genus as usize];
        for &l in &e.word {
            v[l.unsigned_abs() as usize - 1] += i64::from(l.signum());
        }
        v
    }
}

impl fmt::Display for SurfaceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        let s: String = self.word.iter().map(|&l| letter_name(l)).collect();
        f.write_str(&s)
    }
}

impl GroupModel for SurfaceGroup {
    type Element = SurfaceElement;

    fn name(&self) -> String {
        format!("surface:{}", self.genus)
    }

    fn identity(&self) -> SurfaceElement {
        SurfaceElement { genus: self.genus, word: Vec::new() }
    }

    fn mul(&self, a: &SurfaceElement, b: &SurfaceElement) -> SurfaceElement {
        self.try_mul(a, b).expect("surface elements of matching genus")
    }

    fn inv(&self, a: &SurfaceElement) -> SurfaceElement {
        SurfaceElement { genus: a.genus, word: self.dehn_reduce(invert_word(&a.word)) }
    }

    fn eq(&self, a: &SurfaceElement, b: &SurfaceElement) -> bool {
        if a.word == b.word {
            return true;
        }
        let w = a.word.iter().copied().chain(invert_word(&b.word)).collect();
        self.dehn_reduce(w).is_empty()
    }

    /// Digest of the abelianisation, which is constant on equality classes;
    /// elements in one bucket are told apart by [`GroupModel::eq`].
    fn digest(&self, a: &SurfaceElement) -> u64 {
        let ab = self.abelianization(a);
        let bytes: Vec<u8> = ab.iter().flat_map(|x| x.to_le_bytes()).collect();
        stable_digest(&bytes)
    }

    fn generators(&self) -> Vec<Generator<SurfaceElement>> {
        (1..=2 * self.genus as i32)
            .flat_map(|l| {
                [
                    Generator::new(letter_name(l), SurfaceElement { genus: self.genus, word: vec![l] }),
                    Generator::new(letter_name(-l), SurfaceElement { genus: self.genus, word: vec![-l] }),
                ]
            })
            .collect()
    }

    fn format(&self, a: &SurfaceElement) -> String {
        a.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::parse_word;

    #[test]
    fn relator_reduces_to_identity() {
        for g in 2..=4 {
            let s = SurfaceGroup::new(g).unwrap();
            assert!(s.is_trivial_word(&SurfaceGroup::relator_word(g)));
            let r = s.relator();
            assert!(s.is_identity(&s.element(r.word.clone()).unwrap()));
            // Cyclic conjugates and the inverse are trivial too.
            for rot in &s.rotations {
                assert!(s.is_trivial_word(rot));
            }
        }
    }

    #[test]
    fn names_round_trip() {
        let s = SurfaceGroup::new(2).unwrap();
        let e = parse_word(&s, "a1b1A1B1a2").unwrap();
        // [a1,b1] = [a2,b2]⁻¹, so the product collapses to b2 a2 b2⁻¹.
        assert_eq!(e.to_string(), "b2a2B2");
        let e = parse_word(&s, "a1b1A1").unwrap();
        assert_eq!(e.to_string(), "a1b1A1");
    }

    #[test]
    fn half_relator_is_replaced_by_complement() {
        let s = SurfaceGroup::new(2).unwrap();
        // a1 b1 A1 B1 a2 is five letters of the relator; it equals (b2 A2 B2)⁻¹.
        let w = vec![1, 2, -1, -2, 3];
        assert_eq!(s.dehn_reduce(w), vec![4, 3, -4]);
    }

    #[test]
    fn short_words_are_never_trivial() {
        // Greendlinger: no non-empty freely reduced word of length <= 4 is trivial.
        let s = SurfaceGroup::new(2).unwrap();
        let letters: Vec<i32> = (1..=4).flat_map(|l| [l, -l]).collect();
        let mut frontier: Vec<Vec<i32>> = vec![vec![]];
        let mut total = 0;
        for _ in 0..4 {
            let mut next = Vec::new();
            for w in &frontier {
                for &l in &letters {
                    if w.last() == Some(&-l) {
                        continue;
                    }
                    let mut w2 = w.clone();
                    w2.push(l);
                    assert!(!s.is_trivial_word(&w2), "{w2:?}");
                    next.push(w2);
                }
            }
            total += next.len();
            frontier = next;
        }
        assert_eq!(total, 8 + 56 + 392 + 2744);
    }

    #[test]
    fn genus_mismatch() {
        let s2 = SurfaceGroup::new(2).unwrap();
        let s3 = SurfaceGroup::new(3).unwrap();
        let a = s2.generators()[0].element.clone();
        let b = s3.generators()[0].element.clone();
        assert!(matches!(s2.try_mul(&a, &b), Err(GroupError::ModelMismatch(_))));
        assert!(SurfaceGroup::new(1).is_err());
    }
}
