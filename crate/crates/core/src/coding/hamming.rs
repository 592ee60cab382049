//! Hamming `[2^r - 1, 2^r - 1 - r, 3]` codes and their use alongside the
//! unit cipher.
//!
//! Layout is the positional one: codeword position `j` (1-based) carries a
//! parity bit when `j` is a power of two and message bits otherwise, in
//! order. The syndrome of a single error is the binary form of its
//! position. Integer renderings put codeword bit 0 in the most significant
//! place, and messages are read most-significant bit first.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::algebra::coeffs::CoefficientRing;
use crate::algebra::groupring::GroupRingElement;
use crate::algebra::groups::Group;
use crate::crypto::pipeline::{decrypt, encrypt, Ciphertext};
use crate::error::{Error, Result};
use crate::keys::units::{PrivateKey, PublicKey};

/// Largest `r` whose codewords fit a `u64` rendering.
pub const MAX_WORD_R: u32 = 6;
/// Largest `r` accepted at all.
pub const MAX_R: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HammingCode {
    r: u32,
}

impl HammingCode {
    pub fn new(r: u32) -> Result<Self> {
        if !(2..=MAX_R).contains(&r) {
            return Err(Error::invalid(format!("Hamming parameter r = {r} outside 2..={MAX_R}")));
        }
        Ok(HammingCode { r })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn length(&self) -> usize {
        (1 << self.r) - 1
    }

    pub fn dimension(&self) -> usize {
        self.length() - self.r as usize
    }

    fn data_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.length()).filter(|j| !j.is_power_of_two())
    }

    fn check_len(&self, got: usize, want: usize) -> Result<()> {
        if got != want {
            return Err(Error::invalid(format!("expected {want} bits, got {got}")));
        }
        Ok(())
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        self.check_len(message.len(), self.dimension())?;
        let mut word = vec![0u8; self.length()];
        for (j, &b) in self.data_positions().zip(message) {
            word[j - 1] = b & 1;
        }
        let s = self.syndrome(&word);
        for k in 0..self.r {
            word[(1 << k) - 1] = ((s >> k) & 1) as u8;
        }
        Ok(word)
    }

    /// XOR of the 1-based positions holding a one.
    pub fn syndrome(&self, word: &[u8]) -> usize {
        word.iter()
            .enumerate()
            .filter(|(_, &b)| b & 1 == 1)
            .fold(0, |acc, (i, _)| acc ^ (i + 1))
    }

    /// Message bits and the 0-based position corrected, if any. Two or
    /// more errors are silently miscorrected.
    pub fn decode(&self, received: &[u8]) -> Result<(Vec<u8>, Option<usize>)> {
        self.check_len(received.len(), self.length())?;
        let mut word: Vec<u8> = received.iter().map(|b| b & 1).collect();
        let s = self.syndrome(&word);
        let corrected = (s != 0).then(|| {
            word[s - 1] ^= 1;
            s - 1
        });
        Ok((self.data_positions().map(|j| word[j - 1]).collect(), corrected))
    }

    fn check_word_r(&self) -> Result<()> {
        if self.r > MAX_WORD_R {
            return Err(Error::Unsupported(format!("integer codewords need r <= {MAX_WORD_R}")));
        }
        Ok(())
    }

    /// Codeword of a `dimension`-bit value, rendered as an integer.
    pub fn encode_value(&self, value: u64) -> Result<u64> {
        self.check_word_r()?;
        let k = self.dimension();
        if value >> k != 0 {
            return Err(Error::invalid(format!("{value} needs more than {k} bits")));
        }
        Ok(bits_to_u64(&self.encode(&u64_to_bits(value, k))?))
    }

    pub fn decode_value(&self, word: u64) -> Result<(u64, Option<usize>)> {
        self.check_word_r()?;
        let n = self.length();
        if word >> n != 0 {
            return Err(Error::invalid(format!("{word} needs more than {n} bits")));
        }
        let (bits, corrected) = self.decode(&u64_to_bits(word, n))?;
        Ok((bits_to_u64(&bits), corrected))
    }
}

/// `width` bits of `v`, most significant first.
pub fn u64_to_bits(v: u64, width: usize) -> Vec<u8> {
    (0..width).rev().map(|i| ((v >> i) & 1) as u8).collect()
}

pub fn bits_to_u64(bits: &[u8]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as u64)
}

/// Coefficientwise codewords of an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedCoeffs {
    pub r: u32,
    pub words: Vec<u64>,
}

impl fmt::Display for CodedCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "coded r={}", self.r)?;
        for w in &self.words {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

impl FromStr for CodedCoeffs {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.split_whitespace();
        if it.next() != Some("coded") {
            return Err(Error::invalid("coded line must start with `coded`"));
        }
        let r = it
            .next()
            .and_then(|t| t.strip_prefix("r="))
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::invalid("missing `r=<r>`"))?;
        let words = it
            .map(|t| t.parse().map_err(|_| Error::invalid(format!("bad codeword `{t}`"))))
            .collect::<Result<_>>()?;
        Ok(CodedCoeffs { r, words })
    }
}

/// Encodes every coefficient (in listing order) as one codeword.
pub fn coeff_code_wrap(x: &GroupRingElement, code: &HammingCode) -> Result<CodedCoeffs> {
    code.check_word_r()?;
    let bits = code.dimension() as u32;
    let words = x
        .dense_coeffs()?
        .iter()
        .enumerate()
        .map(|(position, c)| {
            let v = c
                .to_u64()
                .filter(|v| v >> bits == 0 && !c.is_negative())
                .ok_or_else(|| Error::CoefficientTooWide {
                    position,
                    value: c.to_string(),
                    bits,
                })?;
            code.encode_value(v)
        })
        .collect::<Result<_>>()?;
    Ok(CodedCoeffs { r: code.r, words })
}

/// Decodes each codeword with single-error correction. Returns the
/// element and the number of corrected codewords.
pub fn coeff_code_unwrap(
    coded: &CodedCoeffs,
    group: &Group,
    ring: &CoefficientRing,
) -> Result<(GroupRingElement, usize)> {
    let code = HammingCode::new(coded.r)?;
    let mut corrections = 0;
    let mut coeffs = Vec::with_capacity(coded.words.len());
    for &w in &coded.words {
        let (v, fixed) = code.decode_value(w)?;
        corrections += fixed.is_some() as usize;
        coeffs.push(BigInt::from(v));
    }
    if coeffs.len() != group.dense_order()? {
        return Err(Error::invalid(format!("{} codewords for a group of order {}", coeffs.len(), group)));
    }
    Ok((GroupRingElement::from_coeffs(group, ring, coeffs)?, corrections))
}

/// Blockwise coded bitstream; `len` is the original length before padding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedBits {
    pub r: u32,
    pub len: usize,
    pub bits: Vec<u8>,
}

pub fn bitstream_code_wrap(bits: &[u8], code: &HammingCode) -> Result<CodedBits> {
    let k = code.dimension();
    let mut out = Vec::with_capacity(bits.len().div_ceil(k) * code.length());
    for block in bits.chunks(k) {
        let mut padded = block.to_vec();
        padded.resize(k, 0);
        out.extend(code.encode(&padded)?);
    }
    Ok(CodedBits {
        r: code.r,
        len: bits.len(),
        bits: out,
    })
}

/// Original bits and the corrected positions (0-based, in the coded stream).
pub fn bitstream_code_unwrap(coded: &CodedBits) -> Result<(Vec<u8>, Vec<usize>)> {
    let code = HammingCode::new(coded.r)?;
    let n = code.length();
    if !coded.bits.len().is_multiple_of(n) || coded.len > coded.bits.len() / n * code.dimension() {
        return Err(Error::invalid("coded bitstream length does not match its header"));
    }
    let mut out = Vec::with_capacity(coded.len);
    let mut fixed = Vec::new();
    for (b, block) in coded.bits.chunks(n).enumerate() {
        let (msg, corrected) = code.decode(block)?;
        fixed.extend(corrected.map(|p| b * n + p));
        out.extend(msg);
    }
    out.truncate(coded.len);
    Ok((out, fixed))
}

pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::invalid(format!("`{other}` is not a bit"))),
        })
        .collect()
}

/// Flips one uniformly chosen bit in every codeword.
pub fn inject_single_errors<R: Rng + ?Sized>(words: &mut [u64], code: &HammingCode, rng: &mut R) {
    for w in words {
        *w ^= 1 << rng.gen_range(0..code.length());
    }
}

/// Relative order of the coding and encryption layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodingOrder {
    EncryptThenEncode,
    EncodeThenEncrypt,
}

impl FromStr for CodingOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "encrypt-then-encode" => Ok(CodingOrder::EncryptThenEncode),
            "encode-then-encrypt" => Ok(CodingOrder::EncodeThenEncrypt),
            other => Err(Error::invalid(format!("unknown coding order `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Wire {
    Coded(CodedCoeffs),
    Cipher(Ciphertext),
}

/// Sending side of the combined pipeline. `w` must have coefficients below
/// `2^dimension`; for encrypt-then-encode the key ring must keep ciphertext
/// coefficients that narrow too (for example `Zmod 16` with `r = 3`).
pub fn code_crypto_send(w: &GroupRingElement, key: &PublicKey, code: &HammingCode, order: CodingOrder) -> Result<Wire> {
    match order {
        CodingOrder::EncryptThenEncode => match encrypt(w, key)? {
            Ciphertext::Element(c) => Ok(Wire::Coded(coeff_code_wrap(&c, code)?)),
            Ciphertext::Extended(_) => Err(Error::Unsupported("disguised keys with coefficient coding".into())),
        },
        CodingOrder::EncodeThenEncrypt => {
            let coded = coeff_code_wrap(w, code)?;
            if let Some(m) = key.ring().modulus() {
                if *m < BigInt::from(1u64 << code.length()) {
                    return Err(Error::RingMismatch(key.ring().to_string(), format!("codewords of {} bits", code.length())));
                }
            }
            let group = key
                .group()
                .ok_or_else(|| Error::Unsupported("disguised keys with coefficient coding".into()))?;
            let x = GroupRingElement::from_coeffs(group, key.ring(), coded.words.iter().map(|&v| BigInt::from(v)).collect())?;
            Ok(Wire::Cipher(encrypt(&x, key)?))
        }
    }
}

/// Receiving side. `channel` sees the codewords right before decoding,
/// which is where transmission errors are corrected in both orders.
pub fn code_crypto_receive(
    wire: &Wire,
    key: &PrivateKey,
    code: &HammingCode,
    data_ring: &CoefficientRing,
    channel: &mut dyn FnMut(&mut Vec<u64>),
) -> Result<(GroupRingElement, usize)> {
    match wire {
        Wire::Coded(coded) => {
            let mut coded = coded.clone();
            channel(&mut coded.words);
            let (c, fixed) = coeff_code_unwrap(&coded, key.group(), key.ring())?;
            let w = decrypt(&Ciphertext::Element(c), key)?;
            Ok((w.map_ring(data_ring), fixed))
        }
        Wire::Cipher(ct) => {
            let x = decrypt(ct, key)?;
            let mut words = x
                .dense_coeffs()?
                .iter()
                .map(|c| c.to_u64().filter(|v| v >> code.length() == 0))
                .collect::<Option<Vec<u64>>>()
                .ok_or_else(|| Error::invalid("decrypted values are not codewords"))?;
            channel(&mut words);
            let coded = CodedCoeffs { r: code.r, words };
            coeff_code_unwrap(&coded, key.group(), data_ring)
        }
    }
}

/// All-zero check used by callers that only need emptiness.
pub fn is_zero_word(words: &[u64]) -> bool {
    words.iter().all(|w| w.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::groups::GroupSpec;
    use crate::keys::units::{random_cyclic_unit, KeyPair};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parameters() {
        let c = HammingCode::new(3).unwrap();
        assert_eq!((c.length(), c.dimension()), (7, 4));
        let c = HammingCode::new(4).unwrap();
        assert_eq!((c.length(), c.dimension()), (15, 11));
        assert!(HammingCode::new(1).is_err());
    }

    #[test]
    fn zero_message() {
        let c = HammingCode::new(3).unwrap();
        assert_eq!(c.encode(&[0; 4]).unwrap(), vec![0; 7]);
        assert!(bitstream_code_wrap(&[], &c).unwrap().bits.is_empty());
    }

    fn exhaustive(r: u32) -> usize {
        let code = HammingCode::new(r).unwrap();
        let mut cases = 0;
        for m in 0..1u64 << code.dimension() {
            let msg = u64_to_bits(m, code.dimension());
            let word = code.encode(&msg).unwrap();
            assert_eq!(code.decode(&word).unwrap(), (msg.clone(), None));
            for e in 0..code.length() {
                let mut bad = word.clone();
                bad[e] ^= 1;
                assert_eq!(code.decode(&bad).unwrap(), (msg.clone(), Some(e)));
                cases += 1;
            }
        }
        cases
    }

    #[test]
    fn corrects_every_single_error_r3() {
        assert_eq!(exhaustive(3), 112);
    }

    #[test]
    fn corrects_every_single_error_r4() {
        assert_eq!(exhaustive(4), 30720);
    }

    #[test]
    fn linear_and_distance_three() {
        let code = HammingCode::new(3).unwrap();
        let enc = |m: u64| code.encode_value(m).unwrap();
        for a in 0..16 {
            for b in 0..16 {
                assert_eq!(enc(a ^ b), enc(a) ^ enc(b));
            }
        }
        let min_weight = (1..16).map(|m| enc(m).count_ones()).min().unwrap();
        assert_eq!(min_weight, 3);
        // r = 4: the parity-check columns are the distinct non-zero 4-bit values
        let code4 = HammingCode::new(4).unwrap();
        let cols: std::collections::HashSet<usize> = (0..15)
            .map(|e| {
                let mut w = vec![0u8; 15];
                w[e] = 1;
                code4.syndrome(&w)
            })
            .collect();
        assert_eq!(cols.len(), 15);
        assert!(!cols.contains(&0));
    }

    #[test]
    fn positional_layout_values() {
        let code = HammingCode::new(3).unwrap();
        let words: Vec<u64> = [11, 14, 5, 7].iter().map(|&m| code.encode_value(m).unwrap()).collect();
        assert_eq!(words, vec![51, 22, 37, 15]);
        assert_eq!(words[0] ^ words[1], words[2]);
        assert_eq!(words[2] ^ code.encode_value(2).unwrap(), words[3]);
        assert_eq!(code.decode_value(19).unwrap(), (11, Some(1)));
        assert_eq!(code.decode_value(79).unwrap(), (7, Some(0)));
    }

    #[test]
    fn bitstream_example_vector() {
        let code = HammingCode::new(4).unwrap();
        let msg = parse_bits("11101011001").unwrap();
        let mut coded = bitstream_code_wrap(&msg, &code).unwrap();
        assert_eq!(bits_to_string(&coded.bits), "101011001011001");
        coded.bits[0] ^= 1;
        let (back, fixed) = bitstream_code_unwrap(&coded).unwrap();
        assert_eq!(back, msg);
        assert_eq!(fixed, vec![0]);
    }

    #[test]
    fn bitstream_padding() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let code = HammingCode::new(3).unwrap();
        for len in 0..30 {
            let bits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2)).collect();
            let mut coded = bitstream_code_wrap(&bits, &code).unwrap();
            for block in coded.bits.chunks_mut(7) {
                block[rng.gen_range(0..7)] ^= 1;
            }
            assert_eq!(bitstream_code_unwrap(&coded).unwrap().0, bits);
        }
    }

    #[test]
    fn coefficient_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let code = HammingCode::new(3).unwrap();
        let g = GroupSpec::cyclic(11).unwrap();
        let ring = CoefficientRing::modulo(16).unwrap();
        let zero = GroupRingElement::zero(&g, &ring);
        assert!(is_zero_word(&coeff_code_wrap(&zero, &code).unwrap().words));
        for _ in 0..500 {
            let c: Vec<i64> = (0..11).map(|_| rng.gen_range(0..16)).collect();
            let x = GroupRingElement::from_i64s(&g, &ring, &c).unwrap();
            let mut coded = coeff_code_wrap(&x, &code).unwrap();
            inject_single_errors(&mut coded.words, &code, &mut rng);
            let (back, fixed) = coeff_code_unwrap(&coded, &g, &ring).unwrap();
            assert_eq!(back, x);
            assert_eq!(fixed, 11);
        }
        let wide = GroupRingElement::from_i64s(&g, &CoefficientRing::Integers, &[16]).unwrap();
        assert!(matches!(coeff_code_wrap(&wide, &code), Err(Error::CoefficientTooWide { .. })));
    }

    #[test]
    fn wire_text_round_trip() {
        let c = CodedCoeffs { r: 3, words: vec![51, 22, 0] };
        assert_eq!(c.to_string(), "coded r=3 51 22 0");
        assert_eq!(c.to_string().parse::<CodedCoeffs>().unwrap(), c);
    }

    #[test]
    fn both_pipeline_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let code = HammingCode::new(3).unwrap();
        let g = GroupSpec::cyclic(8).unwrap();
        let m16 = CoefficientRing::modulo(16).unwrap();
        let big = CoefficientRing::modulo(1_000_003).unwrap();
        let cases = [
            (CodingOrder::EncryptThenEncode, KeyPair::right(&random_cyclic_unit(&g, &m16, 5, 5).unwrap())),
            (CodingOrder::EncodeThenEncrypt, KeyPair::right(&random_cyclic_unit(&g, &big, 8, 6).unwrap())),
        ];
        for (order, pair) in cases {
            for _ in 0..200 {
                let c: Vec<i64> = (0..8).map(|_| rng.gen_range(0..16)).collect();
                let w_ring = match order {
                    CodingOrder::EncryptThenEncode => &m16,
                    CodingOrder::EncodeThenEncrypt => &big,
                };
                let w = GroupRingElement::from_i64s(&g, w_ring, &c).unwrap();
                let wire = code_crypto_send(&w, &pair.public, &code, order).unwrap();
                let (clean, _) = code_crypto_receive(&wire, &pair.private, &code, &m16, &mut |_| {}).unwrap();
                assert_eq!(clean, w.map_ring(&m16));
                let mut channel = |words: &mut Vec<u64>| inject_single_errors(words, &code, &mut rng);
                let (back, fixed) = code_crypto_receive(&wire, &pair.private, &code, &m16, &mut channel).unwrap();
                assert_eq!(back, w.map_ring(&m16));
                assert_eq!(fixed, 8);
            }
        }
    }
}
