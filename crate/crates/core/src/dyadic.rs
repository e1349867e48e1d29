//! Exact dyadic rationals `num / 2^exp`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A dyadic rational in lowest terms: `num` is odd whenever `exp > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        let mut d = Dyadic { num: num.into(), exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic::from(1)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(u64::from(self.exp)) as u32;
        if tz > 0 {
            self.num >>= tz;
            self.exp -= tz;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    /// Multiplies by `2^k` (k may be negative).
    pub fn mul_pow2(&self, k: i64) -> Self {
        if k >= 0 {
            let k = k as u64;
            let shift = k.min(u64::from(self.exp));
            let mut num = self.num.clone();
            num <<= (k - shift) as usize;
            Dyadic::new(num, self.exp - shift as u32)
        } else {
            let exp = u64::from(self.exp) + k.unsigned_abs();
            Dyadic::new(self.num.clone(), u32::try_from(exp).expect("dyadic exponent overflow"))
        }
    }

    pub fn floor(&self) -> BigInt {
        self.num.div_floor(&(BigInt::one() << self.exp as usize))
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Self {
        self - &Dyadic::from(self.floor())
    }

    /// `log2(self / other)` when the ratio is a power of two.
    pub fn log2_ratio(&self, other: &Dyadic) -> Option<i64> {
        if self.is_zero() || other.is_zero() || self.is_negative() != other.is_negative() {
            return None;
        }
        let (a, b) = (self.num.abs(), other.num.abs());
        let (ta, tb) = (a.trailing_zeros().unwrap_or(0), b.trailing_zeros().unwrap_or(0));
        if (&a >> ta as usize) != (&b >> tb as usize) {
            return None;
        }
        Some(ta as i64 - tb as i64 - i64::from(self.exp) + i64::from(other.exp))
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::NAN) / 2f64.powi(self.exp as i32)
    }

    /// `[num, exp]` as machine integers when they fit.
    pub fn to_pair(&self) -> Option<(i64, u32)> {
        self.num.to_i64().map(|n| (n, self.exp))
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic { num: BigInt::from(v), exp: 0 }
    }
}

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Dyadic { num: v, exp: 0 }
    }
}

fn align(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, u32) {
    let exp = a.exp.max(b.exp);
    (
        &a.num << (exp - a.exp) as usize,
        &b.num << (exp - b.exp) as usize,
        exp,
    )
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, exp) = align(self, rhs);
        Dyadic::new(a + b, exp)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, exp) = align(self, rhs);
        Dyadic::new(a - b, exp)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -&self.num, exp: self.exp }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = align(self, other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, BigInt::one() << self.exp as usize)
        }
    }
}
