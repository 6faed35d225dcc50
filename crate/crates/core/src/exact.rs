//! Exact dyadic rationals.
//!
//! Every metric value in this crate is a finite sum of powers of two, so a
//! `num / 2^exp` representation is exact and avoids gcd work on the very
//! long denominators produced by far-out enumeration indices.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Non-negative dyadic rational `num / 2^exp`, kept in lowest terms
/// (`num` odd, or `num == 0` with `exp == 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigUint,
    exp: u64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { num: BigUint::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { num: BigUint::one(), exp: 0 }
    }

    /// `2^-e`
    pub fn pow2_neg(e: u64) -> Self {
        Dyadic { num: BigUint::one(), exp: e }
    }

    pub fn from_parts(num: BigUint, exp: u64) -> Self {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.exp);
        if tz > 0 {
            self.num >>= tz;
            self.exp -= tz;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    /// Base-2 exponent of the (reduced) denominator.
    pub fn denominator_exp(&self) -> u64 {
        self.exp
    }

    /// Lossy conversion for statistics and plotting only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.num.bits();
        // keep the top 64 bits to stay in f64 range for huge exponents
        let shift = bits.saturating_sub(64);
        let top = (&self.num >> shift).iter_u64_digits().next().unwrap_or(0) as f64;
        let e = shift as i64 - self.exp as i64;
        top * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// `p/q` rendering; integers render without a denominator.
    pub fn to_ratio_string(&self) -> String {
        if self.exp == 0 {
            self.num.to_string()
        } else {
            format!("{}/{}", self.num, BigUint::one() << self.exp)
        }
    }

    pub fn parse_ratio(s: &str) -> Option<Self> {
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let num: BigUint = p.parse().ok()?;
        let den: BigUint = q.parse().ok()?;
        if den.is_zero() || den.count_ones() != 1 {
            return None;
        }
        let exp = den.trailing_zeros().unwrap_or(0);
        Some(Dyadic::from_parts(num, exp))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        let a = &self.num << (exp - self.exp);
        let b = &rhs.num << (exp - rhs.exp);
        Dyadic::from_parts(a + b, exp)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| &acc + &x)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
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
        f.write_str(&self.to_ratio_string())
    }
}

impl serde::Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_ratio_string())
    }
}

/// A truncated infinite sum: the true value lies in `[value, value + error_bound]`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Bounded {
    pub value: Dyadic,
    pub error_bound: Dyadic,
}

impl Bounded {
    pub fn upper(&self) -> Dyadic {
        &self.value + &self.error_bound
    }
}

impl fmt::Display for Bounded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.error_bound.numerator().is_one() {
            write!(f, "{} (±2^-{})", self.value, self.error_bound.denominator_exp())
        } else {
            write!(f, "{} (±{})", self.value, self.error_bound)
        }
    }
}
