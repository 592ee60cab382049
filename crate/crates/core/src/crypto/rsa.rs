//! Textbook RSA and its combination with a unit layer.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, RandBigInt, Sign};
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::pipeline::{decrypt, encrypt, Ciphertext, MessageCodec};
use crate::algebra::coeffs::{mod_inverse, CoefficientRing};
use crate::algebra::extended::ExtendedElement;
use crate::algebra::groupring::GroupRingElement;
use crate::error::{Error, Result};
use crate::keys::units::{PrivateKey, PublicKey};

const WITNESSES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller–Rabin with the first thirteen prime bases; deterministic below
/// about 3.3e24, probabilistic above.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if *n < BigInt::from(2) {
        return false;
    }
    for &p in &WITNESSES {
        let p = BigInt::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n > 2");
    let d = &n_minus_1 >> s;
    'witness: for &a in &WITNESSES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Uniform random prime with exactly `bits` bits.
pub fn random_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> Result<BigInt> {
    if bits < 2 {
        return Err(Error::invalid("primes need at least 2 bits"));
    }
    loop {
        let mut c = rng.gen_biguint(bits);
        c.set_bit(bits - 1, true);
        if bits > 2 {
            c.set_bit(0, true);
        }
        let c = BigInt::from_biguint(Sign::Plus, c);
        if is_probable_prime(&c) {
            return Ok(c);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsaPublicKey {
    pub n: BigInt,
    pub e: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsaPrivateKey {
    pub n: BigInt,
    pub d: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsaKey {
    pub p: BigInt,
    pub q: BigInt,
    pub n: BigInt,
    pub phi: BigInt,
    pub e: BigInt,
    pub d: BigInt,
}

impl RsaKey {
    pub fn public(&self) -> RsaPublicKey {
        RsaPublicKey {
            n: self.n.clone(),
            e: self.e.clone(),
        }
    }

    pub fn private(&self) -> RsaPrivateKey {
        RsaPrivateKey {
            n: self.n.clone(),
            d: self.d.clone(),
        }
    }
}

pub fn rsa_keygen(p: &BigInt, q: &BigInt, e: &BigInt) -> Result<RsaKey> {
    for x in [p, q] {
        if !is_probable_prime(x) {
            return Err(Error::Rsa(format!("{x} is not prime")));
        }
    }
    if p == q {
        return Err(Error::Rsa("p and q must differ".into()));
    }
    let phi = (p - 1u32) * (q - 1u32);
    if *e <= BigInt::one() || *e >= phi {
        return Err(Error::Rsa(format!("exponent {e} outside 1 < e < phi")));
    }
    let d = mod_inverse(e, &phi).ok_or_else(|| Error::Rsa(format!("gcd({e}, {phi}) is not 1")))?;
    Ok(RsaKey {
        p: p.clone(),
        q: q.clone(),
        n: p * q,
        phi,
        e: e.clone(),
        d,
    })
}

fn check_range(m: &BigInt, n: &BigInt) -> Result<()> {
    if m.is_negative() || m >= n {
        return Err(Error::Rsa(format!("value {m} outside [0, {n})")));
    }
    Ok(())
}

pub fn rsa_encrypt(m: &BigInt, key: &RsaPublicKey) -> Result<BigInt> {
    check_range(m, &key.n)?;
    Ok(m.modpow(&key.e, &key.n))
}

pub fn rsa_decrypt(c: &BigInt, key: &RsaPrivateKey) -> Result<BigInt> {
    check_range(c, &key.n)?;
    Ok(c.modpow(&key.d, &key.n))
}

/// Order in which the layers are applied on encryption.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerOrder {
    /// RSA on the integer, then its base-N digits through the unit.
    RsaThenUnit,
    /// Unit over `Z_n`, then RSA on every coefficient.
    UnitThenRsa,
    /// RSA, unit, RSA again.
    Both,
}

impl fmt::Display for LayerOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayerOrder::RsaThenUnit => "rsa-then-unit",
            LayerOrder::UnitThenRsa => "unit-then-rsa",
            LayerOrder::Both => "both",
        })
    }
}

impl FromStr for LayerOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rsa-then-unit" => Ok(LayerOrder::RsaThenUnit),
            "unit-then-rsa" => Ok(LayerOrder::UnitThenRsa),
            "both" => Ok(LayerOrder::Both),
            other => Err(Error::invalid(format!("unknown layer order `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridCiphertext {
    pub order: LayerOrder,
    /// Digit count of the integer fed to the unit layer.
    pub digits: usize,
    pub body: Ciphertext,
}

/// Unit layers that meet RSA work over `Z_n`; keys over `Z` (or a
/// multiple of `n`) are reduced, other moduli are rejected.
fn unit_ring_for(ring: &CoefficientRing, n: &BigInt) -> Result<CoefficientRing> {
    match ring.modulus() {
        Some(m) if !(m % n).is_zero() => Err(Error::RingMismatch(ring.to_string(), format!("Zmod {n}"))),
        _ => CoefficientRing::modulo(n.clone()),
    }
}

fn rsa_coeffs(c: &Ciphertext, n: &BigInt, exp: &BigInt) -> Result<Ciphertext> {
    Ok(match c {
        Ciphertext::Element(e) => {
            let coeffs = e.dense_coeffs()?.iter().map(|x| x.modpow(exp, n)).collect();
            Ciphertext::Element(GroupRingElement::from_coeffs(e.group(), e.ring(), coeffs)?)
        }
        Ciphertext::Extended(x) => Ciphertext::Extended(ExtendedElement::new(
            x.ring(),
            x.coeffs().iter().map(|c| c.modpow(exp, n)).collect(),
        )),
    })
}

pub fn hybrid_encrypt(
    plain: &BigInt,
    rsa: &RsaPublicKey,
    unit: &PublicKey,
    codec: &MessageCodec,
    order: LayerOrder,
) -> Result<HybridCiphertext> {
    let value = match order {
        LayerOrder::RsaThenUnit | LayerOrder::Both => rsa_encrypt(plain, rsa)?,
        LayerOrder::UnitThenRsa => {
            check_range(plain, &rsa.n)?;
            plain.clone()
        }
    };
    let digits = codec.digits_of(&value)?;
    let body = match order {
        LayerOrder::RsaThenUnit => encrypt(&codec.encode_digits(&digits, unit.ring())?, unit)?,
        LayerOrder::UnitThenRsa | LayerOrder::Both => {
            let ring = unit_ring_for(unit.ring(), &rsa.n)?;
            let key = unit.reduce_mod(&rsa.n)?;
            let inner = encrypt(&codec.encode_digits(&digits, &ring)?, &key)?;
            rsa_coeffs(&inner, &rsa.n, &rsa.e)?
        }
    };
    Ok(HybridCiphertext {
        order,
        digits: digits.len(),
        body,
    })
}

pub fn hybrid_decrypt(
    ct: &HybridCiphertext,
    rsa: &RsaPrivateKey,
    unit: &PrivateKey,
    codec: &MessageCodec,
) -> Result<BigInt> {
    let w = match ct.order {
        LayerOrder::RsaThenUnit => decrypt(&ct.body, unit)?,
        LayerOrder::UnitThenRsa | LayerOrder::Both => {
            unit_ring_for(unit.ring(), &rsa.n)?;
            let inner = rsa_coeffs(&ct.body, &rsa.n, &rsa.d)?;
            decrypt(&inner, &unit.reduce_mod(&rsa.n)?)?
        }
    };
    let value = codec.decode_value(&w, Some(ct.digits))?;
    match ct.order {
        LayerOrder::RsaThenUnit | LayerOrder::Both => rsa_decrypt(&value, rsa),
        LayerOrder::UnitThenRsa => Ok(value),
    }
}
