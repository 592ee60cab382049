//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Reference vectors are kept here as
//! literals, independent of the library's own sample tables.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use grunits::algebra::extended::ExtendedElement;
use grunits::analysis::attacks::euclid_attack;
use grunits::coding::hamming::{
    bitstream_code_unwrap, bitstream_code_wrap, coeff_code_unwrap, coeff_code_wrap, inject_single_errors, HammingCode,
};
use grunits::crypto::pipeline::{decrypt, encrypt, Ciphertext, MessageCodec};
use grunits::crypto::rsa::{rsa_decrypt, rsa_encrypt, rsa_keygen};
use grunits::keys::units::{
    bass_cyclic_unit, bicyclic_unit, binomial_product_unit, disguise, embed_cyclic, random_cyclic_unit, unit_power,
    unit_product, Provenance,
};
use grunits::{CoefficientRing, Group, GroupElement, GroupRingElement, GroupSpec, KeyPair, Permutation, UnitKey};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

const H16: [i64; 16] = [
    -408, -402, -374, -298, -144, 94, 374, 606, 697, 606, 374, 94, -144, -298, -374, -402,
];
const H16_INV: [i64; 16] = [
    -13464, 5106, 9622, -12470, -144, 12674, -9622, -5310, 13753, -5310, -9622, 12674, -144, -12470, 9622, 5106,
];
const H11: [i64; 11] = [2983, 1407, -573, -2308, -3301, -3301, -2308, -573, 1407, 2983, 3585];
const H11_INV: [i64; 11] = [-14659, 22389, -14659, -3190, 18832, -21472, 9295, 9295, -21472, 18832, -3190];

fn z() -> CoefficientRing {
    CoefficientRing::Integers
}

fn cyclic(n: u64) -> Group {
    GroupSpec::cyclic(n).unwrap()
}

fn elem(group: &Group, ring: &CoefficientRing, c: &[i64]) -> GroupRingElement {
    GroupRingElement::from_i64s(group, ring, c).unwrap()
}

fn perm(d: usize, cycles: &[&[u32]]) -> GroupElement {
    GroupElement::Perm(Permutation::from_cycles(d, cycles).unwrap())
}

fn key16() -> UnitKey {
    let g = cyclic(16);
    UnitKey::certify(elem(&g, &z(), &H16), elem(&g, &z(), &H16_INV), Provenance::Trial).unwrap()
}

fn key11() -> UnitKey {
    let g = cyclic(11);
    UnitKey::certify(elem(&g, &z(), &H11), elem(&g, &z(), &H11_INV), Provenance::Trial).unwrap()
}

fn random_element(rng: &mut ChaCha8Rng, group: &Group, ring: &CoefficientRing, lo: i64, hi: i64) -> GroupRingElement {
    let n = group.dense_order().unwrap();
    let c: Vec<i64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    elem(group, ring, &c)
}

fn round_trip(pair: &KeyPair, w: &GroupRingElement) -> Result<(), String> {
    let c = ok(encrypt(w, &pair.public))?;
    let back = ok(decrypt(&c, &pair.private))?;
    ensure!(&back == w, "round trip failed for {w}");
    Ok(())
}

fn criterion_1() -> Outcome {
    let message = [-3, 12, -16, 72, -123, 1, -1, 0, 1234, -17, 143, 0, 64, -173, 13, -234];
    let cipher = [
        1033182, 949413, 646149, 228128, -179124, -488007, -663825, -718750, -688787, -614702, -516410, -379628,
        -164099, 153119, 534225, 870088,
    ];
    let g = cyclic(16);
    let h = elem(&g, &z(), &H16);
    let hinv = elem(&g, &z(), &H16_INV);
    let r = elem(&g, &z(), &message);
    let start = Instant::now();
    let one = ok(h.try_mul(&hinv))?;
    let x = ok(r.try_mul(&h))?;
    let y = ok(x.try_mul(&hinv))?;
    let elapsed = start.elapsed();
    ensure!(one.is_one(), "h * hinv = {one}");
    ensure!(x == elem(&g, &z(), &cipher), "r * h = {x}");
    ensure!(y == r, "(r * h) * hinv = {y}");
    ensure!(elapsed < Duration::from_millis(10), "took {elapsed:?}");
    Ok(format!("ciphertext bit-exact, {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let key = ok(rsa_keygen(&BigInt::from(7459), &BigInt::from(10459), &BigInt::from(5)))?;
    ensure!(key.n == BigInt::from(78013681), "n = {}", key.n);
    ensure!(key.phi == BigInt::from(77995764u64), "phi = {}", key.phi);
    ensure!(key.d == BigInt::from(15599153u64), "d = {}", key.d);
    let c = ok(rsa_encrypt(&BigInt::from(1231), &key.public()))?;
    ensure!(c == BigInt::from(15134643u64), "1231^5 mod n = {c}");

    let g = cyclic(11);
    let codec = ok(MessageCodec::new(&g, 10))?;
    let digits = ok(codec.digits_of(&c))?;
    let expected: Vec<BigInt> = [1, 5, 1, 3, 4, 6, 4, 3].iter().map(|&d| BigInt::from(d)).collect();
    ensure!(digits == expected, "digits {digits:?}");
    let r = ok(codec.encode_digits(&digits, &z()))?;
    let pair = KeyPair::right(&key11());
    let ct = ok(encrypt(&r, &pair.public))?;
    let trans = [-11135, 11911, 31358, 41330, 38402, 22982, -201, -23410, -38792, -41440, -30978];
    ensure!(ct == Ciphertext::Element(elem(&g, &z(), &trans)), "unit layer gave {:?}", ct.element());

    let w = ok(decrypt(&ct, &pair.private))?;
    let value = ok(codec.decode_value(&w, Some(digits.len())))?;
    ensure!(value == BigInt::from(15134643u64), "unit layer decrypts to {value}");
    let back = ok(rsa_decrypt(&value, &key.private()))?;
    let elapsed = start.elapsed();
    ensure!(back == BigInt::from(1231), "recovered {back}");
    ensure!(elapsed < Duration::from_millis(50), "took {elapsed:?}");
    Ok(format!("all printed values bit-exact, {elapsed:?}"))
}

fn criterion_3() -> Outcome {
    let hh = [1, -1, 0, 1, -1, 1, 0, -1, 1, 0, 0, 0, 0, 0, 0, 0];
    let hhinv = [1, 0, -1, -2, -2, -2, -1, 0, 1, 1, 1, 1, 1, 1, 1, 1];
    let newunit = [25, 18, -18, -66, -88, -66, -18, 18, 25, 17, 18, 31, 39, 31, 18, 17];
    let newunit_inv = [25, -3497, 2663, 1459, -3791, 1459, 2663, -3497, 25, 3462, -2663, -1424, 3742, -1424, -2663, 3462];
    let message = [-12, -12, -234, 345, -435, 0, 165, -142, 43, -17, -12, 456, -2341, -321, 23, -76];
    let cipher = [
        185871, 165276, 68927, -21364, -51052, -34033, -26102, -48807, -73742, -67942, -44554, -41339, -63822,
        -63651, 1671, 112093,
    ];
    let g = cyclic(16);
    let second = ok(UnitKey::certify(elem(&g, &z(), &hh), elem(&g, &z(), &hhinv), Provenance::Trial))?;
    ensure!(ok(second.unit().try_mul(second.inverse()))?.is_one(), "hh * hhinv != 1");
    let pair = ok(unit_product(&[key16(), second.clone()]))?;
    let prod = ok(UnitKey::product(&[key16(), second]))?;
    ensure!(prod.unit() == &elem(&g, &z(), &newunit), "h * hh = {}", prod.unit());
    ensure!(prod.inverse() == &elem(&g, &z(), &newunit_inv), "hhinv * hinv = {}", prod.inverse());
    let r = elem(&g, &z(), &message);
    let ct = ok(encrypt(&r, &pair.public))?;
    ensure!(ct == Ciphertext::Element(elem(&g, &z(), &cipher)), "r * newunit = {:?}", ct.element());
    let y = ok(ct.element().unwrap().try_mul(prod.inverse()))?;
    ensure!(y == r, "decryption with newunitinv gave {y}");
    let chained = ok(decrypt(&ct, &pair.private))?;
    ensure!(chained == r, "factor-by-factor decryption gave {chained}");
    Ok("product, inverse, ciphertext and decryption bit-exact".into())
}

fn criterion_4() -> Outcome {
    let message = [11, 15, 12, 8, 0, 13, 11, 7, 13, 4, 7];
    let g = cyclic(11);
    let m16 = ok(CoefficientRing::modulo(16))?;
    let key = ok(key11().reduce_mod(&BigInt::from(16)))?;
    let pair = KeyPair::right(&key);
    let r = elem(&g, &m16, &message);
    let ct = ok(encrypt(&r, &pair.public))?;
    let expected = elem(&g, &m16, &[11, 14, 5, 7]);
    ensure!(ct == Ciphertext::Element(expected.clone()), "r * h mod 16 = {:?}", ct.element());

    let code = ok(HammingCode::new(3))?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut coded = ok(coeff_code_wrap(&expected, &code))?;
    let clean = coded.words.clone();
    inject_single_errors(&mut coded.words, &code, &mut rng);
    for (a, b) in clean.iter().zip(&coded.words) {
        ensure!((a ^ b).count_ones() == 1, "channel did not flip exactly one bit");
    }
    let (corrected, fixed) = ok(coeff_code_unwrap(&coded, &g, &m16))?;
    ensure!(fixed == clean.len(), "{fixed} of {} codewords corrected", clean.len());
    ensure!(corrected == expected, "decoded to {corrected}");
    let back = ok(decrypt(&Ciphertext::Element(corrected), &pair.private))?;
    ensure!(back == r, "decrypted to {back}");

    let f2 = ok(CoefficientRing::modulo(2))?;
    let pair2 = KeyPair::right(&ok(key11().reduce_mod(&BigInt::from(2)))?);
    let start = elem(&g, &f2, &[1, 0, 1, 1]);
    let enc = ok(encrypt(&start, &pair2.public))?;
    let seq: Vec<u8> = ok(enc.element().unwrap().dense_coeffs())?
        .iter()
        .map(|c| u8::from(c.is_one()))
        .collect();
    ensure!(seq == [1, 1, 1, 0, 1, 0, 1, 1, 0, 0, 1], "start * h mod 2 = {seq:?}");
    let code4 = ok(HammingCode::new(4))?;
    let mut bits = ok(bitstream_code_wrap(&seq, &code4))?;
    ensure!(bits.bits == [1, 0, 1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 0, 1], "codeword {:?}", bits.bits);
    bits.bits[0] ^= 1;
    let (decoded, fixed) = ok(bitstream_code_unwrap(&bits))?;
    ensure!(fixed == [0], "corrected positions {fixed:?}");
    ensure!(decoded == seq, "decoded {decoded:?}");
    let received = elem(&g, &f2, &decoded.iter().map(|&b| i64::from(b)).collect::<Vec<_>>());
    let back = ok(decrypt(&Ciphertext::Element(received), &pair2.private))?;
    ensure!(back == start, "bitstream decrypted to {back}");
    Ok("messages 11,14,5,7 and both bit vectors recovered".into())
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let g = cyclic(4096);
    let ring = ok(CoefficientRing::modulo(2147483647u64))?;
    let base = ok(random_cyclic_unit(&g, &ring, 511, 511_127))?;
    ensure!(base.unit().support_len() == 511, "support {}", base.unit().support_len());
    let pair = ok(unit_power(&base, 127))?;
    let ones = elem(&g, &ring, &[1; 4096]);
    round_trip(&pair, &ones)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let w = random_element(&mut rng, &g, &ring, 0, 1 << 30);
    round_trip(&pair, &w)?;
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("u^127 round trips the all-ones message, {elapsed:?}"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let group = ok(GroupSpec::symmetric(10))?;
    ensure!(!group.is_dense(), "S_10 should be stored sparsely");
    let a = perm(10, &[&[0, 1]]);
    let b = perm(10, &[&[0, 2, 3, 4, 5]]);
    let c = perm(10, &[&[2, 3, 4, 5, 6, 7, 8, 9]]);
    let uab = ok(bicyclic_unit(&group, &z(), &a, &b))?;
    let bau = ok(bicyclic_unit(&group, &z(), &b, &a))?;
    let h = ok(embed_cyclic(&key16(), &group, &c))?;
    let mul = |x: &GroupRingElement, y: &GroupRingElement| x.try_mul(y).map_err(|e| e.to_string());

    let enc1 = mul(uab.unit(), bau.unit())?;
    let enc2 = mul(bau.unit(), uab.unit())?;
    ensure!(enc1 != enc2, "uab and bau commute");
    let dec1 = mul(bau.inverse(), uab.inverse())?;
    ensure!(mul(&enc1, &dec1)?.is_one(), "(uab bau)(bau^-1 uab^-1) != 1");
    ensure!(mul(&enc2, &mul(uab.inverse(), bau.inverse())?)?.is_one(), "(bau uab)(uab^-1 bau^-1) != 1");
    ensure!(mul(&enc1.pow(5), &dec1.pow(5))?.is_one(), "fifth powers are not inverse");

    let enc4 = mul(&enc1, h.unit())?;
    let dec4 = mul(&mul(h.inverse(), bau.inverse())?, uab.inverse())?;
    ensure!(mul(&enc4, &dec4)?.is_one(), "chain (h^-1, bau^-1, uab^-1) is not an inverse");
    let wrong = mul(&mul(bau.inverse(), uab.inverse())?, h.inverse())?;
    ensure!(!mul(&enc4, &wrong)?.is_one(), "wrong-order chain inverts");

    let pair = ok(KeyPair::from_chains(&[], &[uab, bau, h]))?;
    let w = ok(GroupRingElement::from_terms(
        &group,
        &z(),
        vec![(perm(10, &[&[0, 9]]), BigInt::from(7)), (perm(10, &[&[1, 2, 3]]), BigInt::from(-2))],
    ))?;
    round_trip(&pair, &w)?;
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("noncommuting chains behave as expected, {elapsed:?}"))
}

/// Product of two or three Bass units over a random `C_n`, shifted by `g^k`.
fn random_integral_unit(rng: &mut ChaCha8Rng) -> Result<(Group, UnitKey), String> {
    let n = [5u64, 7, 8, 9, 10, 11, 12, 13, 15, 16, 17, 19, 23][rng.gen_range(0..13)];
    let g = cyclic(n);
    let k = rng.gen_range(0..n);
    let shift = ok(UnitKey::certify(
        GroupRingElement::basis(&g, &z(), GroupElement::Power(k)),
        GroupRingElement::basis(&g, &z(), GroupElement::Power((n - k) % n)),
        Provenance::Trial,
    ))?;
    let mut factors = vec![shift];
    let count = rng.gen_range(3..=4);
    while factors.len() < count {
        if let Ok(k) = bass_cyclic_unit(&g, rng.gen_range(2..n - 1)) {
            factors.push(k);
        }
    }
    Ok((g, ok(UnitKey::product(&factors))?))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trials = 200;
    let c16 = cyclic(16);
    let s4 = ok(GroupSpec::symmetric(4))?;
    let second = ok(UnitKey::certify(
        elem(&c16, &z(), &[1, -1, 0, 1, -1, 1, 0, -1, 1]),
        elem(&c16, &z(), &[1, 0, -1, -2, -2, -2, -1, 0, 1, 1, 1, 1, 1, 1, 1, 1]),
        Provenance::Trial,
    ))?;
    let v = ok(bicyclic_unit(&s4, &z(), &perm(4, &[&[0, 1, 2]]), &perm(4, &[&[0, 3]])))?;
    let u = ok(bicyclic_unit(&s4, &z(), &perm(4, &[&[0, 1]]), &perm(4, &[&[0, 1, 2, 3]])))?;
    let bass = ok(bass_cyclic_unit(&c16, 3))?;
    let variants: Vec<(&str, KeyPair, Group)> = vec![
        ("right", KeyPair::right(&key16()), c16.clone()),
        ("left", KeyPair::left(&v), s4.clone()),
        ("two-sided", ok(KeyPair::two_sided(&v, &u))?, s4.clone()),
        ("product", ok(unit_product(&[key16(), second, bass.clone()]))?, c16.clone()),
        ("power", ok(unit_power(&bass, 5))?, c16.clone()),
        ("disguised", ok(KeyPair::right(&key16()).disguised(40, 77))?, c16.clone()),
    ];
    for (name, pair, group) in &variants {
        for _ in 0..trials {
            let w = random_element(&mut rng, group, &z(), -1000, 1000);
            round_trip(pair, &w).map_err(|e| format!("{name}: {e}"))?;
        }
    }
    let m = BigInt::from(1000);
    let ring = ok(CoefficientRing::modulo(1000))?;
    let reduced = ok(unit_product(&[key16(), bass.clone()]))?;
    let reduced = ok(reduced.reduce_mod(&m))?;
    for _ in 0..trials {
        let w = random_element(&mut rng, &c16, &ring, 0, 999);
        round_trip(&reduced, &w).map_err(|e| format!("mod-reduced: {e}"))?;
    }

    for r in [3u32, 4] {
        let code = ok(HammingCode::new(r))?;
        let (n, k) = (code.length(), code.dimension());
        for msg in 0u64..(1 << k) {
            let bits: Vec<u8> = (0..k).map(|i| ((msg >> i) & 1) as u8).collect();
            let word = ok(code.encode(&bits))?;
            for flip in 0..=n {
                let mut received = word.clone();
                if flip < n {
                    received[flip] ^= 1;
                }
                let (decoded, pos) = ok(code.decode(&received))?;
                ensure!(decoded == bits, "r={r} message {msg} flip {flip} decoded wrongly");
                ensure!(pos == (flip < n).then_some(flip), "r={r} reported {pos:?} for flip {flip}");
            }
        }
    }

    for _ in 0..trials {
        let m: u64 = rng.gen_range(2..5000);
        let (g, key) = random_integral_unit(&mut rng)?;
        let n = g.dense_order().unwrap();
        let bound = key.unit().max_abs_coeff().max(key.inverse().max_abs_coeff());
        let pair = ok(KeyPair::right(&key).reduce_mod(&BigInt::from(m)))?;
        let ring = ok(CoefficientRing::modulo(m))?;
        let w = random_element(&mut rng, &g, &ring, 0, m as i64 - 1);
        round_trip(&pair, &w).map_err(|e| format!("mod {m} over C_{n} (bound {bound}): {e}"))?;
    }

    for t in 0..trials {
        let (g, key) = random_integral_unit(&mut rng)?;
        let s = g.dense_order().unwrap() + rng.gen_range(0..40usize);
        let padded = ok(disguise(key.unit(), s, t))?;
        ensure!(padded.len() == s, "padded length {} != {s}", padded.len());
        ensure!(&ok(padded.fold(&g))? == key.unit(), "fold of disguised key differs");
        let w = random_element(&mut rng, &g, &z(), -50, 50);
        let long = ok(ExtendedElement::mul_nonreduced(&w, &padded))?;
        ensure!(ok(long.fold(&g))? == ok(w.try_mul(key.unit()))?, "folded ciphertext differs");
    }

    let ring97 = ok(CoefficientRing::modulo(97))?;
    let c32 = cyclic(32);
    let mut recovered = 0;
    for t in 0..100 {
        let key = ok(binomial_product_unit(&c32, &ring97, 4, 9700 + t))?;
        let report = euclid_attack(key.unit());
        if report.success && report.recovered.as_ref() == Some(key.inverse()) {
            recovered += 1;
        }
    }
    ensure!(recovered == 100, "attack recovered {recovered}/100");
    Ok(format!("{trials} round trips per variant, exhaustive Hamming, 100/100 attacks"))
}

fn random_big(rng: &mut ChaCha8Rng, bits: u32) -> BigInt {
    let words = bits.div_ceil(32);
    let mut v = BigInt::zero();
    for _ in 0..words {
        v = (v << 32u32) + rng.gen::<u32>();
    }
    v >>= words * 32 - bits;
    if rng.gen() {
        -v
    } else {
        v
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rings = [
        z(),
        ok(CoefficientRing::modulo(2147483647u64))?,
        ok(CoefficientRing::modulo(BigInt::one() << 127u32))?,
    ];
    let mut checked = 0;
    for n in [16u64, 64, 256, 1024] {
        let g = cyclic(n);
        for i in 0..1000 {
            let ring = &rings[i % rings.len()];
            let bits = if i % 50 == 0 { 300 } else { [4, 16, 31, 56][i % 4] };
            let mut draw = || -> Result<GroupRingElement, String> {
                let c = (0..n).map(|_| random_big(&mut rng, bits)).collect();
                ok(GroupRingElement::from_coeffs(&g, ring, c))
            };
            let (a, b) = (draw()?, draw()?);
            let fast = ok(a.mul_fast_cyclic(&b))?;
            let naive = ok(a.mul_naive(&b))?;
            ensure!(fast == naive, "n={n} pair {i} ({bits} bits over {ring}) differs");
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs bit-exact"))
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 8] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
    ];
    let mut failed = 0;
    for (i, run) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
