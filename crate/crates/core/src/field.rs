//! Finite fields `F_q`, `q = p^k`.
//!
//! An element index `e` in `[0, q)` encodes the polynomial `sum d_i x^i`
//! where `d_i` are the base-`p` digits of `e` (digit 0 is the constant term).
//! Index 0 is the additive identity and index 1 the multiplicative identity.
//! For `k > 1` products are reduced modulo the lexicographically smallest
//! monic irreducible polynomial of degree `k`, comparing coefficients from the
//! constant term upward.

use std::fmt;

use crate::limits::{check_cap, size_cap};
use crate::{Elem, Error, Result};

/// Fields up to this order get full addition and multiplication tables.
pub const FULL_TABLE_MAX: u32 = 256;

#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    arith: Arith,
}

#[derive(Clone)]
enum Arith {
    Tables {
        add: Vec<Elem>,
        mul: Vec<Elem>,
        neg: Vec<Elem>,
        inv: Vec<Elem>,
    },
    Prime,
    // exp has length 2(q-1) so that log a + log b never needs a reduction.
    Log { log: Vec<u32>, exp: Vec<Elem> },
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Writes `q` as `p^k` if it is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if rest == 1 {
        Some((u32::try_from(p).ok()?, k))
    } else {
        None
    }
}

/// Builds `F_{p^k}`.
pub fn make_field(p: u32, k: u32) -> Result<FieldSpec> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if k < 1 {
        return Err(Error::ZeroDegree);
    }
    let cap = size_cap();
    let q = crate::limits::checked_pow(p as u64, k as usize).unwrap_or(u128::MAX);
    check_cap("q", q, cap.min(u32::MAX as u64))?;
    let q = q as u32;

    let modulus = smallest_irreducible(p, k);
    let mut field = FieldSpec {
        p,
        k,
        q,
        modulus,
        arith: Arith::Prime,
    };
    field.arith = if q <= FULL_TABLE_MAX {
        field.build_tables()
    } else if k == 1 {
        Arith::Prime
    } else {
        field.build_log_tables()
    };
    Ok(field)
}

/// Parses `"p^k"` or a literal prime power `"q"`.
pub fn parse_field(text: &str) -> Result<FieldSpec> {
    let text = text.trim();
    let bad = || Error::InvalidFieldSpec(text.to_string());
    if let Some((p, k)) = text.split_once('^') {
        let p: u32 = p.trim().parse().map_err(|_| bad())?;
        let k: u32 = k.trim().parse().map_err(|_| bad())?;
        make_field(p, k)
    } else {
        let q: u64 = text.parse().map_err(|_| bad())?;
        let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        make_field(p, k)
    }
}

impl FieldSpec {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Coefficients of the modulus, constant term first; length `k + 1`, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn has_full_tables(&self) -> bool {
        matches!(self.arith, Arith::Tables { .. })
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.q
    }

    pub fn check(&self, a: u64) -> Result<Elem> {
        if a < self.q as u64 {
            Ok(a as Elem)
        } else {
            Err(Error::ElementOutOfRange { elem: a, q: self.q })
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(a < self.q && b < self.q);
        match &self.arith {
            Arith::Tables { add, .. } => add[(a * self.q + b) as usize],
            Arith::Prime => {
                let s = a + b;
                if s >= self.q {
                    s - self.q
                } else {
                    s
                }
            }
            Arith::Log { .. } => self.add_digits(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        debug_assert!(a < self.q);
        match &self.arith {
            Arith::Tables { neg, .. } => neg[a as usize],
            Arith::Prime => {
                if a == 0 {
                    0
                } else {
                    self.q - a
                }
            }
            Arith::Log { .. } => self.neg_digits(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(a < self.q && b < self.q);
        match &self.arith {
            Arith::Tables { mul, .. } => mul[(a * self.q + b) as usize],
            Arith::Prime => ((a as u64 * b as u64) % self.q as u64) as Elem,
            Arith::Log { log, exp } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    exp[(log[a as usize] + log[b as usize]) as usize]
                }
            }
        }
    }

    /// Multiplicative inverse; zero has none.
    pub fn inv(&self, a: Elem) -> Result<Elem> {
        self.check(a as u64)?;
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.arith {
            Arith::Tables { inv, .. } => inv[a as usize],
            Arith::Prime => self.pow(a, self.q as u64 - 2),
            Arith::Log { log, exp } => exp[(self.q - 1 - log[a as usize]) as usize],
        })
    }

    pub fn try_add(&self, a: u64, b: u64) -> Result<Elem> {
        Ok(self.add(self.check(a)?, self.check(b)?))
    }

    pub fn try_mul(&self, a: u64, b: u64) -> Result<Elem> {
        Ok(self.mul(self.check(a)?, self.check(b)?))
    }

    pub fn try_neg(&self, a: u64) -> Result<Elem> {
        Ok(self.neg(self.check(a)?))
    }

    pub fn pow(&self, mut base: Elem, mut exp: u64) -> Elem {
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Base-`p` digits of an element, constant term first.
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k as usize);
        let mut a = a;
        for _ in 0..self.k {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u32]) -> Elem {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn add_digits(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn neg_digits(&self, a: Elem) -> Elem {
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    /// Reference multiplication by schoolbook polynomial arithmetic and
    /// reduction modulo the modulus. Independent of the lookup tables.
    pub fn mul_poly(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p as u64;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * self.k as usize];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        let reduced = poly_rem(&prod, &self.modulus, self.p);
        let mut digits: Vec<u32> = reduced.into_iter().map(|c| c as u32).collect();
        digits.resize(self.k as usize, 0);
        self.from_digits(&digits)
    }

    fn pow_poly(&self, mut base: Elem, mut exp: u64) -> Elem {
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            exp >>= 1;
        }
        acc
    }

    fn build_tables(&self) -> Arith {
        let q = self.q as usize;
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for a in 0..self.q {
            neg[a as usize] = self.neg_digits(a);
            for b in 0..self.q {
                let idx = a as usize * q + b as usize;
                add[idx] = self.add_digits(a, b);
                mul[idx] = self.mul_poly(a, b);
            }
        }
        for a in 1..self.q {
            inv[a as usize] = (1..self.q)
                .find(|&b| mul[a as usize * q + b as usize] == 1)
                .expect("nonzero element of a field is invertible");
        }
        Arith::Tables { add, mul, neg, inv }
    }

    fn build_log_tables(&self) -> Arith {
        let order = (self.q - 1) as u64;
        let factors = prime_factors(order);
        let generator = (2..self.q)
            .find(|&g| factors.iter().all(|&r| self.pow_poly(g, order / r) != 1))
            .expect("multiplicative group of a finite field is cyclic");
        let m = order as usize;
        let mut exp = vec![0; 2 * m];
        let mut log = vec![0; self.q as usize];
        let mut x = 1;
        for i in 0..m {
            exp[i] = x;
            exp[i + m] = x;
            log[x as usize] = i as u32;
            x = self.mul_poly(x, generator);
        }
        Arith::Log { log, exp }
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m` over `F_p`; coefficients
/// constant term first.
fn poly_rem(a: &[u64], m: &[u32], p: u32) -> Vec<u64> {
    let p = p as u64;
    let deg_m = m.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&c| c % p).collect();
    while r.len() > deg_m {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - deg_m;
            for (i, &c) in m[..deg_m].iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - lead) * c as u64) % p;
            }
        }
    }
    r
}

/// Monic polynomial of degree `deg` whose lower coefficients are the base-`p`
/// digits of `rank`, most significant digit as the constant term, so that
/// increasing `rank` walks polynomials in constant-term-first lexicographic
/// order.
fn monic_by_rank(p: u32, deg: u32, rank: u64) -> Vec<u32> {
    let mut coeffs = vec![0u32; deg as usize + 1];
    coeffs[deg as usize] = 1;
    let mut r = rank;
    for i in (0..deg as usize).rev() {
        coeffs[i] = (r % p as u64) as u32;
        r /= p as u64;
    }
    coeffs
}

/// Irreducibility by trial division against every monic polynomial of degree
/// `1..=deg/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() as u32 - 1;
    if deg == 0 {
        return false;
    }
    let a: Vec<u64> = poly.iter().map(|&c| c as u64).collect();
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d);
        for rank in 0..count {
            let divisor = monic_by_rank(p, d, rank);
            if poly_rem(&a, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    (0..count)
        .map(|rank| monic_by_rank(p, k, rank))
        .find(|m| is_irreducible(m, p))
        .expect("an irreducible polynomial exists in every degree")
}
