//! Message codecs, encryption in every key variant, blocking and signatures.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::algebra::coeffs::{Coeff, CoefficientRing};
use crate::algebra::extended::ExtendedElement;
use crate::algebra::groupring::GroupRingElement;
use crate::algebra::groups::Group;
use crate::error::{Error, Result};
use crate::keys::units::{KeyPair, PrivateKey, PublicKey};

/// Writes a message as coefficients of the listed group elements,
/// most-significant digit at position 0.
#[derive(Clone, Debug)]
pub struct MessageCodec {
    group: Group,
    /// `None` places raw signed integers without a positional base.
    base: Option<BigInt>,
}

impl MessageCodec {
    pub fn new(group: &Group, base: u64) -> Result<Self> {
        if base < 2 {
            return Err(Error::invalid(format!("base {base} is below 2")));
        }
        group.dense_order()?;
        Ok(MessageCodec {
            group: group.clone(),
            base: Some(BigInt::from(base)),
        })
    }

    pub fn raw(group: &Group) -> Result<Self> {
        group.dense_order()?;
        Ok(MessageCodec {
            group: group.clone(),
            base: None,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn base(&self) -> Option<&BigInt> {
        self.base.as_ref()
    }

    /// Digit capacity, the order of the group.
    pub fn capacity(&self) -> usize {
        self.group.dense_order().expect("checked at construction")
    }

    /// Base-`N` digits of `value`, most significant first; `0` has no digits.
    pub fn digits_of(&self, value: &BigInt) -> Result<Vec<Coeff>> {
        let base = self
            .base
            .as_ref()
            .ok_or_else(|| Error::invalid("raw codecs have no positional digits"))?;
        if value.is_negative() {
            return Err(Error::invalid("messages are non-negative integers"));
        }
        let mut digits = Vec::new();
        let mut rest = value.clone();
        while !rest.is_zero() {
            let (q, r) = rest.div_rem(base);
            digits.push(r);
            rest = q;
        }
        digits.reverse();
        Ok(digits)
    }

    pub fn value_of(&self, digits: &[Coeff]) -> Result<BigInt> {
        let base = self
            .base
            .as_ref()
            .ok_or_else(|| Error::invalid("raw codecs have no positional digits"))?;
        Ok(digits.iter().fold(BigInt::zero(), |acc, d| acc * base + d))
    }

    pub fn encode_digits(&self, digits: &[Coeff], ring: &CoefficientRing) -> Result<GroupRingElement> {
        let n = self.capacity();
        if digits.len() > n {
            return Err(Error::TooManyDigits {
                digits: digits.len(),
                capacity: n,
            });
        }
        if let Some(base) = &self.base {
            if let Some((position, d)) = digits.iter().enumerate().find(|(_, d)| d.is_negative() || *d >= base) {
                return Err(Error::DigitOutOfRange {
                    position,
                    value: d.to_string(),
                });
            }
        }
        let mut coeffs = vec![BigInt::zero(); n];
        for (position, d) in digits.iter().enumerate() {
            coeffs[self.group.listed_index(position)] = d.clone();
        }
        GroupRingElement::from_coeffs(&self.group, ring, coeffs)
    }

    pub fn encode_value(&self, value: &BigInt, ring: &CoefficientRing) -> Result<GroupRingElement> {
        self.encode_digits(&self.digits_of(value)?, ring)
    }

    /// All `|G|` coefficients in message order. Positional codecs insist
    /// on digits in `[0, N)`; anything else means a wrong key or damage.
    pub fn decode_digits(&self, w: &GroupRingElement) -> Result<Vec<Coeff>> {
        if !w.group().same_group(&self.group) {
            return Err(Error::GroupMismatch(w.group().to_string(), self.group.to_string()));
        }
        let dense = w.dense_coeffs()?;
        let out: Vec<Coeff> = (0..self.capacity())
            .map(|p| {
                let c = &dense[self.group.listed_index(p)];
                if self.base.is_some() {
                    c.clone()
                } else {
                    w.ring().signed(c)
                }
            })
            .collect();
        if let Some(base) = &self.base {
            if let Some((position, d)) = out.iter().enumerate().find(|(_, d)| d.is_negative() || *d >= base) {
                return Err(Error::DigitOutOfRange {
                    position,
                    value: w.ring().signed(d).to_string(),
                });
            }
        }
        Ok(out)
    }

    /// Integer carried by `w`. `digits` is the original digit count; without
    /// it trailing zero positions are taken as unused.
    pub fn decode_value(&self, w: &GroupRingElement, digits: Option<usize>) -> Result<BigInt> {
        let all = self.decode_digits(w)?;
        let used = match digits {
            Some(k) => {
                if k > all.len() {
                    return Err(Error::TooManyDigits {
                        digits: k,
                        capacity: all.len(),
                    });
                }
                if let Some((position, d)) = all.iter().enumerate().skip(k).find(|(_, d)| !d.is_zero()) {
                    return Err(Error::DigitOutOfRange {
                        position,
                        value: d.to_string(),
                    });
                }
                k
            }
            None => all.iter().rposition(|d| !d.is_zero()).map_or(0, |p| p + 1),
        };
        self.value_of(&all[..used])
    }
}

/// A ciphertext: a group-ring element, or a non-reduced product under a
/// disguised key.
#[derive(Clone, Debug, PartialEq)]
pub enum Ciphertext {
    Element(GroupRingElement),
    Extended(ExtendedElement),
}

impl Ciphertext {
    pub fn element(&self) -> Option<&GroupRingElement> {
        match self {
            Ciphertext::Element(e) => Some(e),
            Ciphertext::Extended(_) => None,
        }
    }

    pub fn ring(&self) -> &CoefficientRing {
        match self {
            Ciphertext::Element(e) => e.ring(),
            Ciphertext::Extended(x) => x.ring(),
        }
    }
}

/// `w * u`, `u * w` or `v * w * u` depending on the key.
pub fn encrypt(w: &GroupRingElement, key: &PublicKey) -> Result<Ciphertext> {
    Ok(match key {
        PublicKey::Right(u) => Ciphertext::Element(w.try_mul(u)?),
        PublicKey::Left(u) => Ciphertext::Element(u.try_mul(w)?),
        PublicKey::TwoSided { left, right } => Ciphertext::Element(left.try_mul(w)?.try_mul(right)?),
        PublicKey::Disguised(x) => Ciphertext::Extended(ExtendedElement::mul_nonreduced(w, x)?),
    })
}

/// Folds a disguised ciphertext, then applies the inverse factors in order.
pub fn decrypt(c: &Ciphertext, key: &PrivateKey) -> Result<GroupRingElement> {
    let mut x = match (c, key.extlen) {
        (Ciphertext::Element(e), _) => e.clone(),
        (Ciphertext::Extended(x), Some(s)) => {
            let n = key.group().dense_order()?;
            if x.len() > n + s - 1 {
                return Err(Error::invalid(format!(
                    "ciphertext of length {} is too long for extended length {s}",
                    x.len()
                )));
            }
            x.fold(key.group())?
        }
        (Ciphertext::Extended(_), None) => {
            return Err(Error::SideMismatch(
                "extended ciphertext needs a private key for a disguised public key".into(),
            ))
        }
    };
    for f in &key.left_factors {
        x = f.try_mul(&x)?;
    }
    for f in &key.right_factors {
        x = x.try_mul(f)?;
    }
    Ok(x)
}

/// Both key halves with coefficients reduced mod `m`. Round trips stay exact
/// for plaintexts whose coefficients already lie in `[0, m)`.
pub fn reduce_keys_mod(pair: &KeyPair, m: &BigInt) -> Result<KeyPair> {
    pair.reduce_mod(m)
}

/// Two-layer ciphertext: inner ciphertexts `C_i` over `G` are laid out as
/// `X_p = sum_i C_i[p] h_i` over `H`, one outer ciphertext per coordinate `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCiphertext {
    /// Digit count of each block.
    pub block_digits: Vec<usize>,
    pub columns: Vec<Ciphertext>,
}

pub fn block_encrypt(
    digits: &[Coeff],
    inner_codec: &MessageCodec,
    inner: &PublicKey,
    outer_group: &Group,
    outer: &PublicKey,
) -> Result<BlockCiphertext> {
    let ring = inner.ring();
    if outer.ring() != ring {
        return Err(Error::RingMismatch(ring.to_string(), outer.ring().to_string()));
    }
    let n = inner_codec.capacity();
    let blocks: Vec<&[Coeff]> = if digits.is_empty() {
        vec![digits]
    } else {
        digits.chunks(n).collect()
    };
    let t = blocks.len();
    let h = outer_group.dense_order()?;
    if t >= h {
        return Err(Error::invalid(format!("{t} blocks need an outer group of order above {t}, got {h}")));
    }
    let inner_ct: Vec<Vec<Coeff>> = blocks
        .iter()
        .map(|b| {
            let w = inner_codec.encode_digits(b, ring)?;
            match encrypt(&w, inner)? {
                Ciphertext::Element(c) => c.dense_coeffs(),
                Ciphertext::Extended(_) => Err(Error::Unsupported("disguised inner keys in block mode".into())),
            }
        })
        .collect::<Result<_>>()?;
    let columns = (0..n)
        .map(|p| {
            let mut coeffs = vec![BigInt::zero(); h];
            for (i, c) in inner_ct.iter().enumerate() {
                coeffs[outer_group.listed_index(i)] = c[p].clone();
            }
            encrypt(&GroupRingElement::from_coeffs(outer_group, ring, coeffs)?, outer)
        })
        .collect::<Result<_>>()?;
    Ok(BlockCiphertext {
        block_digits: blocks.iter().map(|b| b.len()).collect(),
        columns,
    })
}

/// Undoes the outer layer only, returning the inner ciphertexts.
pub fn block_open_outer(ct: &BlockCiphertext, inner_codec: &MessageCodec, outer: &PrivateKey) -> Result<Vec<GroupRingElement>> {
    let n = inner_codec.capacity();
    if ct.columns.len() != n {
        return Err(Error::invalid(format!("{} columns for an inner group of order {n}", ct.columns.len())));
    }
    let t = ct.block_digits.len();
    let mut inner = vec![vec![BigInt::zero(); n]; t];
    for (p, col) in ct.columns.iter().enumerate() {
        let x = decrypt(col, outer)?;
        let xg = x.group().clone();
        let dense = x.dense_coeffs()?;
        for pos in 0..xg.dense_order()? {
            let c = &dense[xg.listed_index(pos)];
            if pos < t {
                inner[pos][p] = c.clone();
            } else if !c.is_zero() {
                return Err(Error::DigitOutOfRange {
                    position: pos,
                    value: c.to_string(),
                });
            }
        }
    }
    let ring = outer.ring().clone();
    inner
        .into_iter()
        .map(|c| GroupRingElement::from_coeffs(inner_codec.group(), &ring, c))
        .collect()
}

pub fn block_decrypt(
    ct: &BlockCiphertext,
    inner_codec: &MessageCodec,
    inner: &PrivateKey,
    outer: &PrivateKey,
) -> Result<Vec<Coeff>> {
    let blocks = block_open_outer(ct, inner_codec, outer)?;
    let mut digits = Vec::new();
    for (c, &len) in blocks.iter().zip(&ct.block_digits) {
        let w = decrypt(&Ciphertext::Element(c.clone()), inner)?;
        let all = inner_codec.decode_digits(&w)?;
        if let Some((position, d)) = all.iter().enumerate().skip(len).find(|(_, d)| !d.is_zero()) {
            return Err(Error::DigitOutOfRange {
                position,
                value: d.to_string(),
            });
        }
        digits.extend_from_slice(&all[..len]);
    }
    Ok(digits)
}

/// Signature `w * secret`.
pub fn sign(w: &GroupRingElement, secret: &GroupRingElement) -> Result<GroupRingElement> {
    w.try_mul(secret)
}

/// Message recovered from a signature with the published inverse.
pub fn open_signature(sig: &GroupRingElement, public_inverse: &GroupRingElement) -> Result<GroupRingElement> {
    sig.try_mul(public_inverse)
}

pub fn verify(sig: &GroupRingElement, public_inverse: &GroupRingElement, claimed: &GroupRingElement) -> Result<()> {
    if open_signature(sig, public_inverse)? == *claimed {
        Ok(())
    } else {
        Err(Error::VerificationFailed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::groups::GroupSpec;
    use crate::keys::units::{bass_cyclic_unit, random_cyclic_unit, UnitKey};
    use num_traits::One;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z() -> CoefficientRing {
        CoefficientRing::Integers
    }

    #[test]
    fn positional_encoding() {
        let g = GroupSpec::cyclic(11).unwrap();
        let codec = MessageCodec::new(&g, 10).unwrap();
        let w = codec.encode_value(&BigInt::from(15134643), &z()).unwrap();
        assert_eq!(w.to_string(), "1+5*g+g^2+3*g^3+4*g^4+6*g^5+4*g^6+3*g^7");
        assert_eq!(codec.decode_value(&w, None).unwrap(), BigInt::from(15134643));
        let zero = codec.encode_value(&BigInt::zero(), &z()).unwrap();
        assert!(zero.is_zero());
        assert_eq!(codec.decode_value(&zero, None).unwrap(), BigInt::zero());
    }

    #[test]
    fn trailing_zeros_need_the_digit_count() {
        let g = GroupSpec::cyclic(6).unwrap();
        let codec = MessageCodec::new(&g, 10).unwrap();
        let w = codec.encode_value(&BigInt::from(1500), &z()).unwrap();
        assert_eq!(codec.decode_value(&w, Some(4)).unwrap(), BigInt::from(1500));
        assert_eq!(codec.decode_value(&w, None).unwrap(), BigInt::from(15));
    }

    #[test]
    fn random_value_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = GroupSpec::cyclic(24).unwrap();
        for base in [2u64, 10, 16] {
            let codec = MessageCodec::new(&g, base).unwrap();
            for _ in 0..1000 {
                let v = BigInt::from(rng.gen::<u64>() >> rng.gen_range(0..64));
                let digits = codec.digits_of(&v).unwrap();
                if digits.len() > 24 {
                    continue;
                }
                let w = codec.encode_value(&v, &z()).unwrap();
                assert_eq!(codec.decode_value(&w, Some(digits.len())).unwrap(), v);
            }
        }
    }

    #[test]
    fn codec_rejections() {
        let g = GroupSpec::cyclic(3).unwrap();
        let codec = MessageCodec::new(&g, 10).unwrap();
        assert!(matches!(
            codec.encode_value(&BigInt::from(1234), &z()),
            Err(Error::TooManyDigits { digits: 4, capacity: 3 })
        ));
        assert!(matches!(
            codec.encode_digits(&[BigInt::from(10)], &z()),
            Err(Error::DigitOutOfRange { position: 0, .. })
        ));
        let bad = GroupRingElement::from_i64s(&g, &z(), &[1, -2, 0]).unwrap();
        assert!(codec.decode_digits(&bad).is_err());
        assert!(MessageCodec::new(&g, 1).is_err());
    }

    #[test]
    fn listing_permutation_moves_positions() {
        let g = GroupSpec::cyclic(4).unwrap().with_listing_permutation(vec![0, 3, 1, 2]).unwrap();
        let codec = MessageCodec::new(&g, 10).unwrap();
        let w = codec.encode_value(&BigInt::from(123), &z()).unwrap();
        let c: Vec<i64> = w.dense_coeffs().unwrap().iter().map(|c| i64::try_from(c).unwrap()).collect();
        assert_eq!(c, vec![1, 3, 0, 2]);
        assert_eq!(codec.decode_value(&w, Some(3)).unwrap(), BigInt::from(123));
    }

    /// Ciphertext computed independently as a polynomial product modulo x^n - 1.
    #[test]
    fn ciphertext_matches_polynomial_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 40;
        let g = GroupSpec::cyclic(n as u64).unwrap();
        let key = bass_cyclic_unit(&g, 3).unwrap();
        let u: Vec<i64> = key.unit().dense_coeffs().unwrap().iter().map(|c| i64::try_from(c).unwrap()).collect();
        for _ in 0..20 {
            let w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..10)).collect();
            let mut expected = vec![0i128; n];
            for i in 0..n {
                for j in 0..n {
                    expected[(i + j) % n] += w[i] as i128 * u[j] as i128;
                }
            }
            let we = GroupRingElement::from_i64s(&g, &z(), &w).unwrap();
            let c = encrypt(&we, &KeyPair::right(&key).public).unwrap();
            let got: Vec<i128> = c.element().unwrap().dense_coeffs().unwrap().iter().map(|c| i128::try_from(c).unwrap()).collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn identity_key_and_linearity() {
        let g = GroupSpec::cyclic(8).unwrap();
        let one = UnitKey::identity(&g, &z());
        let w = GroupRingElement::from_i64s(&g, &z(), &[3, 1, 4, 1, 5]).unwrap();
        let pair = KeyPair::right(&one);
        assert_eq!(encrypt(&w, &pair.public).unwrap(), Ciphertext::Element(w.clone()));
        assert_eq!(decrypt(&Ciphertext::Element(w.clone()), &pair.private).unwrap(), w);

        let key = KeyPair::right(&bass_cyclic_unit(&g, 3).unwrap());
        let v = GroupRingElement::from_i64s(&g, &z(), &[2, 7, 1, 8]).unwrap();
        let sum = encrypt(&(&w + &v), &key.public).unwrap();
        let parts = encrypt(&w, &key.public).unwrap().element().unwrap() + encrypt(&v, &key.public).unwrap().element().unwrap();
        assert_eq!(sum, Ciphertext::Element(parts));
    }

    #[test]
    fn disguised_ciphertext_needs_extlen() {
        let g = GroupSpec::cyclic(8).unwrap();
        let pair = KeyPair::right(&bass_cyclic_unit(&g, 3).unwrap());
        let disguised = pair.disguised(20, 7).unwrap();
        let w = GroupRingElement::from_i64s(&g, &z(), &[1, 2, 3]).unwrap();
        let c = encrypt(&w, &disguised.public).unwrap();
        assert_eq!(decrypt(&c, &disguised.private).unwrap(), w);
        assert!(matches!(decrypt(&c, &pair.private), Err(Error::SideMismatch(_))));
    }

    #[test]
    fn blocks_round_trip_and_need_both_keys() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ring = CoefficientRing::modulo(1_000_003).unwrap();
        let g = GroupSpec::cyclic(6).unwrap();
        let h = GroupSpec::cyclic(5).unwrap();
        let codec = MessageCodec::new(&g, 10).unwrap();
        let inner = KeyPair::right(&random_cyclic_unit(&g, &ring, 6, 1).unwrap());
        let outer = KeyPair::right(&random_cyclic_unit(&h, &ring, 5, 2).unwrap());
        for _ in 0..30 {
            let len = rng.gen_range(13..=18);
            let digits: Vec<Coeff> = (0..len).map(|_| BigInt::from(rng.gen_range(0..10))).collect();
            let ct = block_encrypt(&digits, &codec, &inner.public, &h, &outer.public).unwrap();
            assert_eq!(ct.block_digits.len(), 3);
            assert_eq!(block_decrypt(&ct, &codec, &inner.private, &outer.private).unwrap(), digits);
            let raw = block_open_outer(&ct, &codec, &outer.private).unwrap();
            assert!(raw.iter().any(|c| codec.decode_digits(c).is_err()));
        }
        let too_many: Vec<Coeff> = vec![BigInt::one(); 6 * 5];
        assert!(block_encrypt(&too_many, &codec, &inner.public, &h, &outer.public).is_err());
    }

    #[test]
    fn single_block_is_plain_encryption() {
        let ring = CoefficientRing::modulo(97).unwrap();
        let g = GroupSpec::cyclic(4).unwrap();
        let h = GroupSpec::cyclic(2).unwrap();
        let codec = MessageCodec::new(&g, 10).unwrap();
        let inner = KeyPair::right(&random_cyclic_unit(&g, &ring, 4, 1).unwrap());
        let outer = KeyPair::right(&UnitKey::identity(&h, &ring));
        let digits: Vec<Coeff> = [4, 2, 7].map(BigInt::from).to_vec();
        let ct = block_encrypt(&digits, &codec, &inner.public, &h, &outer.public).unwrap();
        let plain = encrypt(&codec.encode_digits(&digits, &ring).unwrap(), &inner.public).unwrap();
        let opened = block_open_outer(&ct, &codec, &outer.private).unwrap();
        assert_eq!(Ciphertext::Element(opened[0].clone()), plain);
    }

    #[test]
    fn signatures() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = GroupSpec::cyclic(16).unwrap();
        let key = bass_cyclic_unit(&g, 5).unwrap();
        for _ in 0..50 {
            let c: Vec<i64> = (0..16).map(|_| rng.gen_range(0..10)).collect();
            let w = GroupRingElement::from_i64s(&g, &z(), &c).unwrap();
            let sig = sign(&w, key.unit()).unwrap();
            verify(&sig, key.inverse(), &w).unwrap();
            let tampered = &sig + &GroupRingElement::one(&g, &z());
            assert!(matches!(verify(&tampered, key.inverse(), &w), Err(Error::VerificationFailed)));
        }
        let w = GroupRingElement::from_i64s(&g, &z(), &[1, 2]).unwrap();
        assert_eq!(sign(&w, &GroupRingElement::one(&g, &z())).unwrap(), w);
    }
}
