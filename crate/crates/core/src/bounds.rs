//! Exact rational lower bounds on Kakeya set sizes and the Cauchy-Schwarz
//! fiber-counting inequality `|B| >= |A|^2 / |C|`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    /// Panics if `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> ExactRational {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        ExactRational(BigRational::new(num.into(), den))
    }

    pub fn from_integer(v: impl Into<BigInt>) -> ExactRational {
        ExactRational(BigRational::from_integer(v.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    /// Decimal expansion rounded half-up to `sig` significant digits.
    pub fn to_decimal(&self, sig: usize) -> String {
        assert!(sig > 0);
        let num = self.numer().abs();
        let den = self.denom().clone();
        if num.is_zero() {
            return "0".to_string();
        }
        let ten = BigInt::from(10);
        // exponent e with 10^e <= |x| < 10^(e+1)
        let mut e: i64 = if num >= den {
            (&num / &den).to_string().len() as i64 - 1
        } else {
            let mut m = 0;
            let mut scaled = num.clone();
            while scaled < den {
                scaled *= &ten;
                m += 1;
            }
            -m
        };
        let shift = sig as i64 - 1 - e;
        let (top, bottom): (BigInt, BigInt) = if shift >= 0 {
            (&num * Pow::pow(&ten, shift as u64), den)
        } else {
            (num, den * Pow::pow(&ten, (-shift) as u64))
        };
        let rounded: BigInt = (top * 2 + &bottom) / (bottom * 2);
        let mut digits = rounded.to_string();
        if digits.len() > sig {
            digits.truncate(sig);
            e += 1;
        }
        let body = if e >= 0 {
            let int_len = e as usize + 1;
            if int_len >= sig {
                format!("{digits}{}", "0".repeat(int_len - sig))
            } else {
                format!("{}.{}", &digits[..int_len], &digits[int_len..])
            }
        } else {
            format!("0.{}{digits}", "0".repeat((-e - 1) as usize))
        };
        if self.numer().is_negative() {
            format!("-{body}")
        } else {
            body
        }
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn check_q(q: u64) -> Result<()> {
    if q < 2 {
        Err(Error::FieldOrder(q))
    } else {
        Ok(())
    }
}

/// `(q^{2n} - q^n) / (q^n + q^2 - 2q)`, the lower bound on the size of any
/// hyperplane Kakeya set in `F_q^n`. Use [`ExactRational::ceil`] for the
/// integer refinement.
pub fn theorem1_bound(q: u64, n: usize) -> Result<ExactRational> {
    check_q(q)?;
    if n < 2 {
        return Err(Error::Dimension { n, min: 2 });
    }
    let q = BigInt::from(q);
    let qn: BigInt = Pow::pow(&q, n);
    let num = &qn * &qn - &qn;
    let den = &qn + &q * &q - &q * 2;
    Ok(ExactRational::new(num, den))
}

/// `q(q+1)/2`, the classical bound for `n = 2`.
pub fn dim2_known_bound(q: u64) -> Result<ExactRational> {
    check_q(q)?;
    Ok(ExactRational::new(BigInt::from(q) * (q + 1), 2))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CauchySchwarzCount {
    /// `|A| = sum of fiber sizes`.
    pub a_total: BigUint,
    /// `|C| = sum of squared fiber sizes`.
    pub c_total: BigUint,
    /// `|A|^2 / |C|`, or 0 when every fiber is empty.
    pub bound: ExactRational,
}

/// Given the fiber sizes of a map `A -> B`, returns `|A|`, the number of
/// pairs with equal image `|C|`, and the lower bound `|A|^2/|C|` on the
/// number of nonempty fibers.
pub fn cauchy_schwarz_count(fiber_sizes: &[i64]) -> Result<CauchySchwarzCount> {
    if let Some(&neg) = fiber_sizes.iter().find(|&&s| s < 0) {
        return Err(Error::NegativeFiber(neg));
    }
    let mut a = BigUint::zero();
    let mut c = BigUint::zero();
    for &s in fiber_sizes {
        let s = BigUint::from(s as u64);
        c += &s * &s;
        a += s;
    }
    let bound = if c.is_zero() {
        ExactRational::from_integer(0)
    } else {
        ExactRational::new(BigInt::from(&a * &a), BigInt::from(c.clone()))
    };
    Ok(CauchySchwarzCount { a_total: a, c_total: c, bound })
}

/// Fiber sizes of `map: A -> {0..codomain}`, given as the image of each element of `A`.
pub fn fiber_sizes(map: &[usize], codomain: usize) -> Vec<i64> {
    let mut sizes = vec![0i64; codomain];
    for &b in map {
        sizes[b] += 1;
    }
    sizes
}

/// `q^n - theorem1_bound(q, n)`, which simplifies to `q^n (q-1)^2 / (q^n + q^2 - 2q)`.
pub fn theorem1_deficit(q: u64, n: usize) -> Result<ExactRational> {
    let bound = theorem1_bound(q, n)?;
    let qn: BigInt = Pow::pow(&BigInt::from(q), n);
    Ok(ExactRational(BigRational::from_integer(qn) - bound.0))
}

/// `gcd(|num|, den) == 1` and `den >= 1`.
pub fn is_reduced(r: &ExactRational) -> bool {
    r.denom().is_positive() && r.numer().abs().gcd(r.denom()).is_one()
}
