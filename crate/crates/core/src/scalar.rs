//! Exact rational scalars.
//!
//! [`Scalar`] is a thin newtype over an arbitrary-precision rational kept in
//! lowest terms. Its text form is `"p/q"` or a bare integer, which is also the
//! only form used by the JSON formats: floating point never enters.
//!
//! [`Scaled`] stores a vector of scalars over one common denominator so that
//! alternating sums reduce to integer additions. Numerators use `i128` when
//! every value fits in 62 bits, which leaves ample headroom for sums of up to
//! 2^64 terms.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact rational number in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Scalar(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Scalar(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn recip(&self) -> Self {
        Scalar(self.0.recip())
    }

    /// Lossy conversion for display or plotting only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidScalar(s.to_string());
        let t = s.trim();
        let parse_int = |x: &str| -> Result<BigInt, Error> {
            let x = x.trim();
            let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            x.parse::<BigInt>().map_err(|_| bad())
        };
        match t.split_once('/') {
            None => Ok(Scalar::from_integer(parse_int(t)?)),
            Some((p, q)) => {
                let p = parse_int(p)?;
                let q = parse_int(q)?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::new(p, q))
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ScalarVisitor;

        impl Visitor<'_> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an exact rational as a string \"p/q\" or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
                Ok(Scalar::from(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
                Ok(Scalar::from_integer(v))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
                Err(E::custom(format!(
                    "floating-point scalar {v} is not exact; write it as \"p/q\""
                )))
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

const SMALL_BOUND: i128 = 1 << 62;

/// Integer numerators over a shared denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Nums {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

/// A vector of rationals over its least common denominator.
///
/// The representation is canonical: the denominator is the lcm of the reduced
/// denominators, so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Scaled {
    den: BigInt,
    nums: Nums,
}

/// Running integer sum matched to a [`Scaled`] representation.
#[derive(Clone, Debug)]
pub(crate) enum Acc {
    Small(i128),
    Big(BigInt),
}

impl Acc {
    pub fn is_zero(&self) -> bool {
        match self {
            Acc::Small(v) => *v == 0,
            Acc::Big(v) => v.is_zero(),
        }
    }
}

impl Scaled {
    pub fn from_scalars(values: &[Scalar]) -> Scaled {
        let den = values
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let nums: Vec<BigInt> = values
            .iter()
            .map(|v| v.numer() * (&den / v.denom()))
            .collect();
        Scaled::pack(den, nums)
    }

    /// Builds from integer numerators over `den`, reducing to canonical form.
    pub fn from_numerators(den: BigInt, nums: Vec<BigInt>) -> Scaled {
        assert!(den.is_positive(), "denominator must be positive");
        let g = nums.iter().fold(den.clone(), |g, n| g.gcd(n));
        if g.is_one() {
            return Scaled::pack(den, nums);
        }
        let den = den / &g;
        let nums = nums.into_iter().map(|n| n / &g).collect();
        Scaled::pack(den, nums)
    }

    fn pack(den: BigInt, nums: Vec<BigInt>) -> Scaled {
        let small: Option<Vec<i128>> = nums
            .iter()
            .map(|n| n.to_i128().filter(|v| v.abs() < SMALL_BOUND))
            .collect();
        let nums = match small {
            Some(v) => Nums::Small(v),
            None => Nums::Big(nums),
        };
        Scaled { den, nums }
    }

    pub fn len(&self) -> usize {
        match &self.nums {
            Nums::Small(v) => v.len(),
            Nums::Big(v) => v.len(),
        }
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn nums(&self) -> &Nums {
        &self.nums
    }

    pub fn numer_at(&self, i: usize) -> BigInt {
        match &self.nums {
            Nums::Small(v) => BigInt::from(v[i]),
            Nums::Big(v) => v[i].clone(),
        }
    }

    pub fn get(&self, i: usize) -> Scalar {
        Scalar::new(self.numer_at(i), self.den.clone())
    }

    pub fn to_scalars(&self) -> Vec<Scalar> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    pub fn acc_zero(&self) -> Acc {
        match &self.nums {
            Nums::Small(_) => Acc::Small(0),
            Nums::Big(_) => Acc::Big(BigInt::zero()),
        }
    }

    /// Adds (`positive`) or subtracts the numerator at `i` into `acc`.
    #[inline]
    pub fn accumulate(&self, acc: &mut Acc, i: usize, positive: bool) {
        match (&self.nums, acc) {
            (Nums::Small(v), Acc::Small(a)) => {
                if positive {
                    *a += v[i]
                } else {
                    *a -= v[i]
                }
            }
            (Nums::Big(v), Acc::Big(a)) => {
                if positive {
                    *a += &v[i]
                } else {
                    *a -= &v[i]
                }
            }
            _ => unreachable!("accumulator kind does not match representation"),
        }
    }

    pub fn acc_to_scalar(&self, acc: Acc) -> Scalar {
        match acc {
            Acc::Small(v) => Scalar::new(v, self.den.clone()),
            Acc::Big(v) => Scalar::new(v, self.den.clone()),
        }
    }
}
