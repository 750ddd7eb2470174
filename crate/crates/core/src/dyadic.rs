//! Exact dyadic rationals `num / 2^log2den`.
//!
//! Values are kept in lowest terms: either `num` is odd or `log2den == 0`.
//! Arithmetic is exact; operations panic if the result no longer fits in
//! an `i64` numerator, which never happens for the arities this crate
//! supports (denominators stay below `2^24`).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawDyadic")]
pub struct Dyadic {
    num: i64,
    log2den: u32,
}

#[derive(Deserialize)]
struct RawDyadic {
    num: i64,
    log2den: u32,
}

impl From<RawDyadic> for Dyadic {
    fn from(r: RawDyadic) -> Self {
        Dyadic::new(r.num, r.log2den)
    }
}

fn narrow(v: i128) -> i64 {
    i64::try_from(v).expect("dyadic numerator overflow")
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, log2den: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, log2den: 0 };

    pub fn new(num: i64, log2den: u32) -> Self {
        Self::from_i128(num as i128, log2den)
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic { num: v, log2den: 0 }
    }

    fn from_i128(mut num: i128, mut log2den: u32) -> Self {
        if num == 0 {
            return Dyadic::ZERO;
        }
        let tz = num.trailing_zeros().min(log2den);
        num >>= tz;
        log2den -= tz;
        Dyadic { num: narrow(num), log2den }
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn log2den(self) -> u32 {
        self.log2den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_integer(self) -> bool {
        self.log2den == 0
    }

    /// Numerator after rescaling to denominator `2^k`; `None` if `k` is too small.
    pub fn scaled_num(self, k: u32) -> Option<i128> {
        (k >= self.log2den).then(|| (self.num as i128) << (k - self.log2den))
    }

    pub fn mul_int(self, k: i64) -> Self {
        Self::from_i128(self.num as i128 * k as i128, self.log2den)
    }

    /// Divides by `2^k`.
    pub fn halve(self, k: u32) -> Self {
        Self::from_i128(self.num as i128, self.log2den + k)
    }

    /// Representative in `[0, 2)`.
    pub fn rem2(self) -> Self {
        let period = 2i128 << self.log2den;
        Self::from_i128((self.num as i128).rem_euclid(period), self.log2den)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (self.log2den as f64).exp2()
    }

    fn align(self, other: Self) -> (i128, i128, u32) {
        let k = self.log2den.max(other.log2den);
        let a = (self.num as i128) << (k - self.log2den);
        let b = (other.num as i128) << (k - other.log2den);
        (a, b, k)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::ZERO
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, k) = self.align(rhs);
        Dyadic::from_i128(a + b, k)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (a, b, k) = self.align(rhs);
        Dyadic::from_i128(a - b, k)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, log2den: self.log2den }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::from_i128(self.num as i128 * rhs.num as i128, self.log2den + rhs.log2den)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.align(*other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.log2den)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
