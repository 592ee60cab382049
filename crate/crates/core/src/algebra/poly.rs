//! Extended Euclid in `R[x]` against `x^n - 1`.
//!
//! Generic over the coefficient domain so the same routine serves word-sized
//! moduli, arbitrary moduli and the rationals. Over a composite modulus a
//! leading coefficient may fail to be invertible; the routine then reports
//! the factor of the modulus it stumbled on instead of an answer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::coeffs::mod_inverse;

/// A non-invertible pivot was met; carries `gcd(pivot, m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct PivotFailure(pub BigInt);

pub(crate) trait EuclidDomain {
    type E: Clone;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Result<Self::E, PivotFailure>;
}

fn ext_gcd_i128(a: i128, b: i128) -> (i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r, old_s)
}

/// `Z/m` with `m < 2^63`.
pub(crate) struct SmallMod(pub u64);

impl EuclidDomain for SmallMod {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.0 as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.0 - a
        }
    }
    fn inv(&self, a: &u64) -> Result<u64, PivotFailure> {
        let (g, x) = ext_gcd_i128(*a as i128, self.0 as i128);
        if g == 1 {
            Ok(x.rem_euclid(self.0 as i128) as u64)
        } else {
            Err(PivotFailure(BigInt::from(g)))
        }
    }
}

/// `Z/m` for arbitrary `m`.
pub(crate) struct BigMod(pub BigInt);

impl EuclidDomain for BigMod {
    type E = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a + b).mod_floor(&self.0)
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a - b).mod_floor(&self.0)
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b).mod_floor(&self.0)
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        (-a).mod_floor(&self.0)
    }
    fn inv(&self, a: &BigInt) -> Result<BigInt, PivotFailure> {
        mod_inverse(a, &self.0).ok_or_else(|| PivotFailure(a.gcd(&self.0)))
    }
}

pub(crate) struct Rationals;

impl EuclidDomain for Rationals {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational, PivotFailure> {
        Ok(a.recip())
    }
}

fn trim<D: EuclidDomain>(d: &D, mut p: Vec<D::E>) -> Vec<D::E> {
    while p.last().is_some_and(|c| d.is_zero(c)) {
        p.pop();
    }
    p
}

type QuotRem<E> = (Vec<E>, Vec<E>);

/// Quotient and remainder of `a / b`; `b` must be trimmed and non-zero.
fn div_rem<D: EuclidDomain>(d: &D, a: &[D::E], b: &[D::E]) -> Result<QuotRem<D::E>, PivotFailure> {
    let lead_inv = d.inv(b.last().expect("non-zero divisor"))?;
    let mut rem = a.to_vec();
    if rem.len() < b.len() {
        return Ok((Vec::new(), rem));
    }
    let mut quot = vec![d.zero(); rem.len() - b.len() + 1];
    for shift in (0..quot.len()).rev() {
        let top = &rem[shift + b.len() - 1];
        if d.is_zero(top) {
            continue;
        }
        let q = d.mul(top, &lead_inv);
        for (k, bk) in b.iter().enumerate() {
            let t = d.mul(&q, bk);
            rem[shift + k] = d.sub(&rem[shift + k], &t);
        }
        quot[shift] = q;
    }
    rem.truncate(b.len() - 1);
    Ok((quot, trim(d, rem)))
}

fn mul_sub<D: EuclidDomain>(d: &D, t0: &[D::E], q: &[D::E], t1: &[D::E]) -> Vec<D::E> {
    let len = t0.len().max(if q.is_empty() || t1.is_empty() { 0 } else { q.len() + t1.len() - 1 });
    let mut out: Vec<D::E> = (0..len)
        .map(|i| t0.get(i).cloned().unwrap_or_else(|| d.zero()))
        .collect();
    for (i, qi) in q.iter().enumerate() {
        if d.is_zero(qi) {
            continue;
        }
        for (j, tj) in t1.iter().enumerate() {
            let p = d.mul(qi, tj);
            out[i + j] = d.sub(&out[i + j], &p);
        }
    }
    trim(d, out)
}

/// Outcome of inverting a polynomial modulo `x^n - 1`.
#[derive(Debug)]
pub(crate) enum EuclidOutcome<E> {
    /// Coefficients `0..n` of the inverse.
    Inverse(Vec<E>),
    /// `gcd(u, x^n - 1)` is a non-constant polynomial.
    NonTrivialGcd(usize),
}

/// Inverts `u` (length `n`, low degree first) in `R[x]/(x^n - 1)`.
pub(crate) fn invert_mod_xn_minus_1<D: EuclidDomain>(
    d: &D,
    u: &[D::E],
    n: usize,
) -> Result<EuclidOutcome<D::E>, PivotFailure> {
    let mut r0: Vec<D::E> = vec![d.zero(); n + 1];
    r0[0] = d.neg(&d.one());
    r0[n] = d.one();
    let mut r1 = trim(d, u.to_vec());
    let mut t0: Vec<D::E> = Vec::new();
    let mut t1: Vec<D::E> = vec![d.one()];
    while !r1.is_empty() {
        let (q, r) = div_rem(d, &r0, &r1)?;
        let t2 = mul_sub(d, &t0, &q, &t1);
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.len() > 1 {
        return Ok(EuclidOutcome::NonTrivialGcd(r0.len() - 1));
    }
    let c_inv = d.inv(&r0[0])?;
    let mut inverse = vec![d.zero(); n];
    for (k, c) in t0.iter().enumerate() {
        let scaled = d.mul(c, &c_inv);
        // deg t0 < n already, so this fold never wraps in practice
        let slot = &mut inverse[k % n];
        *slot = d.add(slot, &scaled);
    }
    Ok(EuclidOutcome::Inverse(inverse))
}
