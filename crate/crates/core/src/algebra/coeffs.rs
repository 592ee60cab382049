//! Coefficient rings: the integers and the integers modulo `m`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A coefficient value. Over `Mod(m)` it is always the least non-negative
/// residue.
pub type Coeff = BigInt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientRing {
    Integers,
    Mod(BigInt),
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (g, x, _) = ext_gcd(&a.mod_floor(m), m);
    g.is_one().then(|| x.mod_floor(m))
}

impl CoefficientRing {
    pub fn modulo(m: impl Into<BigInt>) -> Result<Self> {
        let m = m.into();
        if m < BigInt::from(2) {
            return Err(Error::invalid(format!("modulus must be at least 2, got {m}")));
        }
        Ok(CoefficientRing::Mod(m))
    }

    pub fn modulus(&self) -> Option<&BigInt> {
        match self {
            CoefficientRing::Integers => None,
            CoefficientRing::Mod(m) => Some(m),
        }
    }

    pub fn reduce(&self, a: &BigInt) -> Coeff {
        match self {
            CoefficientRing::Integers => a.clone(),
            CoefficientRing::Mod(m) => a.mod_floor(m),
        }
    }

    pub fn reduce_owned(&self, a: BigInt) -> Coeff {
        match self {
            CoefficientRing::Integers => a,
            CoefficientRing::Mod(m) => {
                if a.sign() != Sign::Minus && &a < m {
                    a
                } else {
                    a.mod_floor(m)
                }
            }
        }
    }

    pub fn is_canonical(&self, a: &BigInt) -> bool {
        match self {
            CoefficientRing::Integers => true,
            CoefficientRing::Mod(m) => !a.is_negative() && a < m,
        }
    }

    pub fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce_owned(a + b)
    }

    pub fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce_owned(a - b)
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce_owned(a * b)
    }

    pub fn neg(&self, a: &Coeff) -> Coeff {
        self.reduce_owned(-a)
    }

    /// Multiplicative inverse: over `Z` only `±1`, over `Z/m` exactly the
    /// residues coprime to `m`.
    pub fn inv(&self, a: &Coeff) -> Result<Coeff> {
        match self {
            CoefficientRing::Integers => {
                if a.abs().is_one() {
                    Ok(a.clone())
                } else {
                    Err(Error::NotInvertible(a.to_string(), self.to_string()))
                }
            }
            CoefficientRing::Mod(m) => {
                mod_inverse(a, m).ok_or_else(|| Error::NotInvertible(a.to_string(), self.to_string()))
            }
        }
    }

    /// Signed representative for display: residues above `m/2` are shown
    /// as negatives.
    pub fn signed(&self, a: &Coeff) -> BigInt {
        match self {
            CoefficientRing::Integers => a.clone(),
            CoefficientRing::Mod(m) => {
                let r = a.mod_floor(m);
                if &r * 2 > *m {
                    r - m
                } else {
                    r
                }
            }
        }
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Integers => write!(f, "Z"),
            CoefficientRing::Mod(m) => write!(f, "Zmod {m}"),
        }
    }
}

impl FromStr for CoefficientRing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Z" {
            return Ok(CoefficientRing::Integers);
        }
        let m = s
            .strip_prefix("Zmod")
            .map(str::trim)
            .and_then(|m| m.parse::<BigInt>().ok())
            .ok_or_else(|| Error::invalid(format!("bad ring description '{s}'")))?;
        CoefficientRing::modulo(m)
    }
}
