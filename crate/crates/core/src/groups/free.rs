//! Free groups and free abelian groups.

use super::{stable_digest, Generator, GroupError, GroupModel};

/// Lower-case generator name for index `i` (`a`, `b`, …); inverses are upper-case.
pub(crate) fn letter_name(i: usize, inverse: bool) -> String {
    let c = (b'a' + i as u8) as char;
    if inverse {
        c.to_ascii_uppercase().to_string()
    } else {
        c.to_string()
    }
}

/// Free group of finite rank; elements are freely reduced words with letters
/// `±1..=±rank`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeGroup {
    rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Result<Self, GroupError> {
        if rank == 0 || rank > 26 {
            return Err(GroupError::InvalidParam("free rank must be in 1..=26".into()));
        }
        Ok(FreeGroup { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Cancels adjacent inverse pairs.
pub fn free_reduce(word: impl IntoIterator<Item = i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for l in word {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn invert_word(word: &[i32]) -> Vec<i32> {
    word.iter().rev().map(|&l| -l).collect()
}

pub(crate) fn word_bytes(word: &[i32]) -> Vec<u8> {
    word.iter().flat_map(|l| l.to_le_bytes()).collect()
}

impl GroupModel for FreeGroup {
    type Element = Vec<i32>;

    fn name(&self) -> String {
        format!("free:{}", self.rank)
    }

    fn identity(&self) -> Vec<i32> {
        Vec::new()
    }

    fn mul(&self, a: &Vec<i32>, b: &Vec<i32>) -> Vec<i32> {
        free_reduce(a.iter().chain(b).copied())
    }

    fn inv(&self, a: &Vec<i32>) -> Vec<i32> {
        invert_word(a)
    }

    fn eq(&self, a: &Vec<i32>, b: &Vec<i32>) -> bool {
        a == b
    }

    fn digest(&self, a: &Vec<i32>) -> u64 {
        stable_digest(&word_bytes(a))
    }

    fn generators(&self) -> Vec<Generator<Vec<i32>>> {
        (0..self.rank)
            .flat_map(|i| {
                let l = i as i32 + 1;
                [
                    Generator::new(letter_name(i, false), vec![l]),
                    Generator::new(letter_name(i, true), vec![-l]),
                ]
            })
            .collect()
    }

    fn format(&self, a: &Vec<i32>) -> String {
        if a.is_empty() {
            return "1".into();
        }
        a.iter()
            .map(|&l| letter_name(l.unsigned_abs() as usize - 1, l < 0))
            .collect()
    }

    fn length_oracle(&self, a: &Vec<i32>) -> Option<u64> {
        Some(a.len() as u64)
    }
}

/// ℤ^rank with the standard symmetric generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeAbelian {
    rank: usize,
}

impl FreeAbelian {
    pub fn new(rank: usize) -> Result<Self, GroupError> {
        if rank == 0 || rank > 26 {
            return Err(GroupError::InvalidParam("free abelian rank must be in 1..=26".into()));
        }
        Ok(FreeAbelian { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

impl GroupModel for FreeAbelian {
    type Element = Vec<i64>;

    fn name(&self) -> String {
        format!("abelian:{}", self.rank)
    }

    fn identity(&self) -> Vec<i64> {
        vec![0; self.rank]
    }

    fn mul(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn inv(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }

    fn eq(&self, a: &Vec<i64>, b: &Vec<i64>) -> bool {
        a == b
    }

    fn digest(&self, a: &Vec<i64>) -> u64 {
        let bytes: Vec<u8> = a.iter().flat_map(|x| x.to_le_bytes()).collect();
        stable_digest(&bytes)
    }

    fn generators(&self) -> Vec<Generator<Vec<i64>>> {
        (0..self.rank)
            .flat_map(|i| {
                let mut e = vec![0; self.rank];
                e[i] = 1;
                let neg = e.iter().map(|x| -x).collect();
                [
                    Generator::new(letter_name(i, false), e),
                    Generator::new(letter_name(i, true), neg),
                ]
            })
            .collect()
    }

    fn format(&self, a: &Vec<i64>) -> String {
        let parts: Vec<String> = a.iter().map(i64::to_string).collect();
        format!("({})", parts.join(","))
    }

    fn length_oracle(&self, a: &Vec<i64>) -> Option<u64> {
        Some(a.iter().map(|x| x.unsigned_abs()).sum())
    }
}
